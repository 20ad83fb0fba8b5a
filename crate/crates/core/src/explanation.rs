//! Explanations: a Hilbert dimension, a parametrized density operator and a
//! parametrized POVM over finite domains, the trace map down to probability
//! tables, metric deviations between explanations, necessary invariants of
//! unitary equivalence, and dimension counting.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domains::{DetectorDomain, KnobDomain};
use crate::error::{Error, Result};
use crate::operators::{
    self, eig_hermitian, op_norm, trace_product_re, ComplexMatrix, HermitianOp,
};
use crate::ppm::{MetDev, Ppm};
use crate::sweep;

/// A model of how a table of results comes about: for every knob setting a
/// density operator, and for every knob setting a POVM over the detector
/// outcomes, all on one Hilbert space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawExplanation", try_from = "RawExplanation")]
pub struct Explanation {
    hilbert_dim: usize,
    knobs: KnobDomain,
    detectors: DetectorDomain,
    rho: Vec<HermitianOp>,
    povm: Vec<Vec<HermitianOp>>,
}

#[derive(Serialize, Deserialize)]
struct RawExplanation {
    hilbert_dim: usize,
    knob_domain: KnobDomain,
    detector_domain: DetectorDomain,
    rho: Vec<HermitianOp>,
    povm: Vec<Vec<HermitianOp>>,
}

impl From<Explanation> for RawExplanation {
    fn from(e: Explanation) -> Self {
        RawExplanation {
            hilbert_dim: e.hilbert_dim,
            knob_domain: e.knobs,
            detector_domain: e.detectors,
            rho: e.rho,
            povm: e.povm,
        }
    }
}

impl TryFrom<RawExplanation> for Explanation {
    type Error = Error;

    fn try_from(raw: RawExplanation) -> Result<Self> {
        Explanation::new(
            raw.hilbert_dim,
            raw.knob_domain,
            raw.detector_domain,
            raw.rho,
            raw.povm,
            &Tolerances::DEFAULT,
        )
    }
}

impl Explanation {
    /// Validates the whole family: one density operator per setting, one
    /// POVM per setting (positive elements summing to the identity), all of
    /// the declared dimension.
    pub fn new(
        hilbert_dim: usize,
        knobs: KnobDomain,
        detectors: DetectorDomain,
        rho: Vec<HermitianOp>,
        povm: Vec<Vec<HermitianOp>>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let settings = knobs.num_points();
        let outcomes = detectors.num_points();
        if rho.len() != settings {
            return Err(Error::TableShapeMismatch {
                len: rho.len(),
                rows: settings,
                cols: 1,
            });
        }
        if povm.len() != settings || povm.iter().any(|row| row.len() != outcomes) {
            return Err(Error::TableShapeMismatch {
                len: povm.iter().map(Vec::len).sum(),
                rows: settings,
                cols: outcomes,
            });
        }
        for (k, r) in rho.iter().enumerate() {
            if r.dim() != hilbert_dim {
                return Err(Error::DimensionMismatch {
                    left: r.dim(),
                    right: hilbert_dim,
                });
            }
            r.validate_density(tol).map_err(|e| match e {
                Error::NotDensity { reason } => Error::NotDensity {
                    reason: format!("at setting {k}: {reason}"),
                },
                other => other,
            })?;
        }
        let identity = ComplexMatrix::identity(hilbert_dim);
        for (k, elements) in povm.iter().enumerate() {
            let mut sum = ComplexMatrix::zeros(hilbert_dim);
            for (w, m) in elements.iter().enumerate() {
                if m.dim() != hilbert_dim {
                    return Err(Error::DimensionMismatch {
                        left: m.dim(),
                        right: hilbert_dim,
                    });
                }
                let min_eig = m.min_eigenvalue(tol)?;
                if min_eig < -tol.psd_floor {
                    return Err(Error::PovmNotPositive {
                        setting: k,
                        outcome: w,
                        min_eig,
                    });
                }
                sum = sum.add(m.matrix())?;
            }
            let deviation = sum.max_abs_diff(&identity);
            if deviation > tol.equality {
                return Err(Error::PovmIncomplete {
                    setting: k,
                    deviation,
                });
            }
        }
        Ok(Explanation {
            hilbert_dim,
            knobs,
            detectors,
            rho,
            povm,
        })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn knob_domain(&self) -> &KnobDomain {
        &self.knobs
    }

    pub fn detector_domain(&self) -> &DetectorDomain {
        &self.detectors
    }

    pub fn rho(&self, setting: usize) -> &HermitianOp {
        &self.rho[setting]
    }

    pub fn povm(&self, setting: usize, outcome: usize) -> &HermitianOp {
        &self.povm[setting][outcome]
    }

    pub fn num_settings(&self) -> usize {
        self.knobs.num_points()
    }

    pub fn num_outcomes(&self) -> usize {
        self.detectors.num_points()
    }

    /// Conjugates the whole family by one setting-independent unitary.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Explanation> {
        let rho = self
            .rho
            .iter()
            .map(|r| r.conjugate(u))
            .collect::<Result<Vec<_>>>()?;
        let povm = self
            .povm
            .iter()
            .map(|row| row.iter().map(|m| m.conjugate(u)).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(Explanation {
            hilbert_dim: self.hilbert_dim,
            knobs: self.knobs.clone(),
            detectors: self.detectors.clone(),
            rho,
            povm,
        })
    }

    /// Tapes one knob down to a fixed setting, restricting the family.
    pub fn fix_knob(&self, name: &str, value: &crate::domains::Label) -> Result<Explanation> {
        let (reduced, pos) = self.knobs.without_factor(name)?;
        let factor = self.knobs.factor(name).expect("factor exists");
        let fixed = factor.index_of(value).ok_or_else(|| Error::UnknownSetting {
            factor: name.to_string(),
            label: value.to_string(),
        })?;
        let mut rho = Vec::with_capacity(reduced.num_points());
        let mut povm = Vec::with_capacity(reduced.num_points());
        for k in 0..reduced.num_points() {
            let mut coords = reduced.decode(k);
            coords.insert(pos, fixed);
            let full = self.knobs.encode(&coords);
            rho.push(self.rho[full].clone());
            povm.push(self.povm[full].clone());
        }
        Ok(Explanation {
            hilbert_dim: self.hilbert_dim,
            knobs: reduced,
            detectors: self.detectors.clone(),
            rho,
            povm,
        })
    }

    /// The trace rule: probability of outcome w at setting k is
    /// Re Tr(rho(k) M(k, w)). Output rows are validated; values drifting
    /// outside [0, 1] by more than the equality tolerance are an error.
    pub fn trace_map(&self, tol: &Tolerances) -> Result<Ppm> {
        let outcomes = self.num_outcomes();
        let rows = sweep::map_collect(self.num_settings(), |k| {
            let mut row = Vec::with_capacity(outcomes);
            for w in 0..outcomes {
                row.push(trace_product_re(&self.rho[k], &self.povm[k][w]));
            }
            row
        });
        Ppm::new(
            self.knobs.clone(),
            self.detectors.clone(),
            rows.into_iter().flatten().collect(),
            tol,
        )
    }
}

/// Deviation between the trace-distance profiles of two parametrized
/// density operators over a common knob domain. The Hilbert spaces may
/// differ; zero means metric equivalence.
pub fn metdev_rho(e1: &Explanation, e2: &Explanation, tol: &Tolerances) -> Result<MetDev> {
    if e1.knobs != e2.knobs {
        return Err(Error::KnobDomainMismatch);
    }
    let n = e1.num_settings();
    let tol = *tol;
    let best = sweep::argmax_by(sweep::pair_count(n), move |p| {
        let (k1, k2) = sweep::pair_at(n, p);
        let d1 = operators::half_trace_norm_diff(&e1.rho[k1], &e1.rho[k2], &tol)
            .expect("validated operators");
        let d2 = operators::half_trace_norm_diff(&e2.rho[k1], &e2.rho[k2], &tol)
            .expect("validated operators");
        (d1 - d2).abs()
    });
    Ok(match best {
        Some((p, value)) => MetDev {
            value,
            witness: sweep::pair_at(n, p),
        },
        None => MetDev {
            value: 0.0,
            witness: (0, 0),
        },
    })
}

/// Largest operator norm of a summed POVM difference over all outcome
/// subsets, for one setting pair. Enumerates all 2^n subsets via a Gray
/// code; refuses beyond the configured cap.
pub fn povm_subset_sup(e: &Explanation, k1: usize, k2: usize, tol: &Tolerances) -> Result<f64> {
    let outcomes = e.num_outcomes();
    if outcomes > tol.subset_cap {
        return Err(Error::SubsetCapExceeded {
            outcomes,
            cap: tol.subset_cap,
        });
    }
    let diffs: Vec<ComplexMatrix> = (0..outcomes)
        .map(|w| {
            e.povm[k1][w]
                .matrix()
                .sub(e.povm[k2][w].matrix())
                .expect("same dimension")
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(e.hilbert_dim);
    let mut sup = 0.0f64;
    let mut prev_gray = 0usize;
    for i in 1usize..(1 << outcomes) {
        let gray = i ^ (i >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        if gray & (1 << flipped) != 0 {
            sum = sum.add(&diffs[flipped])?;
        } else {
            sum = sum.sub(&diffs[flipped])?;
        }
        prev_gray = gray;
        let norm = op_norm(&HermitianOp::symmetrize(sum.clone()), tol)?;
        sup = sup.max(norm);
    }
    Ok(sup)
}

/// Deviation between the lifted-norm profiles of two parametrized POVMs
/// over a common knob domain. Detector domains and Hilbert spaces may
/// differ on the two sides.
pub fn metdev_povm(e1: &Explanation, e2: &Explanation, tol: &Tolerances) -> Result<MetDev> {
    if e1.knobs != e2.knobs {
        return Err(Error::KnobDomainMismatch);
    }
    for e in [e1, e2] {
        if e.num_outcomes() > tol.subset_cap {
            return Err(Error::SubsetCapExceeded {
                outcomes: e.num_outcomes(),
                cap: tol.subset_cap,
            });
        }
    }
    let n = e1.num_settings();
    let results = sweep::map_collect(sweep::pair_count(n), |p| {
        let (k1, k2) = sweep::pair_at(n, p);
        let s1 = povm_subset_sup(e1, k1, k2, tol)?;
        let s2 = povm_subset_sup(e2, k1, k2, tol)?;
        Ok((s1 - s2).abs())
    });
    let mut best = MetDev {
        value: 0.0,
        witness: (0, 0),
    };
    let mut first = true;
    for (p, r) in results.into_iter().enumerate() {
        let value: f64 = r?;
        if first || value > best.value {
            best = MetDev {
                value,
                witness: sweep::pair_at(n, p),
            };
            first = false;
        }
    }
    Ok(best)
}

/// Outcome of the necessary-invariant check for unitary equivalence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub equal: bool,
    /// First violated invariant, when not equal.
    pub reason: Option<String>,
}

/// Compares invariants preserved by any setting-independent unitary: the
/// sorted spectrum of every density operator and every pairwise overlap
/// Tr(rho(k1) rho(k2)). These are necessary conditions only; agreement does
/// not decide unitary equivalence.
pub fn unitary_invariants_equal(
    e1: &Explanation,
    e2: &Explanation,
    tol: &Tolerances,
) -> Result<InvariantCheck> {
    if e1.knobs != e2.knobs {
        return Err(Error::KnobDomainMismatch);
    }
    if e1.hilbert_dim != e2.hilbert_dim {
        return Ok(InvariantCheck {
            equal: false,
            reason: Some(format!(
                "Hilbert dimensions differ: {} vs {}",
                e1.hilbert_dim, e2.hilbert_dim
            )),
        });
    }
    for k in 0..e1.num_settings() {
        let s1 = eig_hermitian(&e1.rho[k], tol)?.eigenvalues;
        let s2 = eig_hermitian(&e2.rho[k], tol)?.eigenvalues;
        for (a, b) in s1.iter().zip(&s2) {
            if (a - b).abs() > tol.equality {
                return Ok(InvariantCheck {
                    equal: false,
                    reason: Some(format!(
                        "spectrum mismatch at setting {k}: {a} vs {b}"
                    )),
                });
            }
        }
    }
    for k1 in 0..e1.num_settings() {
        for k2 in k1..e1.num_settings() {
            let o1 = trace_product_re(&e1.rho[k1], &e1.rho[k2]);
            let o2 = trace_product_re(&e2.rho[k1], &e2.rho[k2]);
            if (o1 - o2).abs() > tol.equality {
                return Ok(InvariantCheck {
                    equal: false,
                    reason: Some(format!(
                        "overlap mismatch at settings ({k1}, {k2}): {o1} vs {o2}"
                    )),
                });
            }
        }
    }
    Ok(InvariantCheck {
        equal: true,
        reason: None,
    })
}

/// Degree-of-freedom counts for explanations over a fixed Hilbert dimension
/// and for the tables they generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    /// Real dimension of the space of explanations on the given Hilbert space.
    pub dim_expl: usize,
    /// Real dimension of the space of probability tables.
    pub dim_ppm: usize,
    /// Dimension of the fiber over one table: dim_expl - dim_ppm.
    pub dim_fiber: usize,
    /// Number of metric-equivalence constraints, independent or not.
    pub n_constraints: usize,
    /// Dimension bound for the metric-equivalence quotient of a fiber.
    pub dim_quotient: usize,
}

/// Evaluates the counting formulas for `num_settings` knob settings,
/// `num_outcomes` elementary outcomes and Hilbert dimension `n`. All inputs
/// must be at least 1.
pub fn dim_report(num_settings: usize, num_outcomes: usize, n: usize) -> DimReport {
    assert!(
        num_settings >= 1 && num_outcomes >= 1 && n >= 1,
        "dimension counts need positive inputs"
    );
    let nk = num_settings;
    let nw = num_outcomes;
    let n2 = n * n;
    let dim_expl = nk * (n2 * nw - 1);
    let dim_ppm = nk * (nw - 1);
    let dim_fiber = nk * nw * (n2 - 1);
    let n_constraints = nk * (nk - 1) * nw / 2;
    DimReport {
        dim_expl,
        dim_ppm,
        dim_fiber,
        n_constraints,
        dim_quotient: n_constraints.min(dim_fiber),
    }
}


#[cfg(test)]
pub(crate) use tests::{entangled_pair_explanation, two_level_family};
