//! Two coupled layers of a finite quantum experiment description and the
//! machinery connecting them.
//!
//! The result layer is a probability table over finite knob and detector
//! domains ([`ppm::Ppm`]). The model layer is a Hilbert-space explanation: a
//! parametrized density operator plus a parametrized POVM
//! ([`explanation::Explanation`]), mapped onto the result layer by the trace
//! rule. The map is many-to-one; this crate makes the multiplicity of its
//! inverse computable:
//!
//! - metric deviations between distance profiles of density operators,
//!   POVMs, and probability tables, with witnessing setting pairs;
//! - dimension counts for the model space, the result space, the fiber over
//!   a fixed table, and the metric-equivalence quotient, corroborated by a
//!   finite-difference rank probe;
//! - constructive inhabitants of a fiber (diagonal, pure, orthogonal) and
//!   the two-level shift that separates metric from unitary equivalence;
//! - the partition, quotient metric and finite topology a table induces on
//!   its knob domain without reference to any model;
//! - an expanding cycle that discriminates rival models, extends the knob
//!   domain with the discriminating preparations, and adjudicates against a
//!   caller-supplied ground truth.
//!
//! Pair sweeps, subset enumerations and Jacobian columns run data parallel
//! on rayon under the default `parallel` feature; sequential fallbacks stay
//! available either way (see [`sweep`]).

pub mod config;
pub mod cycle;
pub mod domains;
pub mod error;
pub mod explanation;
pub mod inverse;
pub mod operators;
pub mod ppm;
pub mod sample;
pub mod sweep;

#[cfg(test)]
pub(crate) mod testutil;

pub use config::Tolerances;
pub use cycle::{run_cycle, CycleTrace, Discrimination};
pub use domains::{Detector, DetectorDomain, Domain, Factor, Knob, KnobDomain, Label};
pub use error::{Error, Result};
pub use explanation::{dim_report, DimReport, Explanation};
pub use inverse::{explain_diagonal, explain_orthogonal, explain_pure, FiberProbe};
pub use operators::{ComplexMatrix, EigenSystem, HermitianOp};
pub use ppm::{KnobPartition, MetDev, Ppm, QuotientMetric};
