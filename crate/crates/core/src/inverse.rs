//! Constructive inhabitants of the set of explanations behind a given
//! probability table, a deformation separating metric from unitary
//! equivalence, and a finite-difference probe of the fiber dimension.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::domains::Label;
use crate::error::{Error, Result};
use crate::explanation::Explanation;
use crate::operators::{eig_hermitian, trace_product_re, ComplexMatrix, HermitianOp};
use crate::ppm::Ppm;
use crate::sweep;

/// Classical explanation: states are the probability rows on the diagonal,
/// measured by the fixed standard-basis projectors.
pub fn explain_diagonal(mu: &Ppm, tol: &Tolerances) -> Result<Explanation> {
    let dim = mu.num_outcomes();
    let rho: Vec<HermitianOp> = (0..mu.num_settings())
        .map(|k| HermitianOp::diag(mu.row(k)))
        .collect();
    let projectors: Vec<HermitianOp> = (0..dim)
        .map(|w| HermitianOp::symmetrize(ComplexMatrix::basis_projector(dim, w)))
        .collect();
    let povm = vec![projectors; mu.num_settings()];
    Explanation::new(
        dim,
        mu.knob_domain().clone(),
        mu.detector_domain().clone(),
        rho,
        povm,
        tol,
    )
}

/// Pure-state explanation: amplitudes are square roots of the probabilities,
/// measured by the same standard-basis projectors.
pub fn explain_pure(mu: &Ppm, tol: &Tolerances) -> Result<Explanation> {
    let dim = mu.num_outcomes();
    let rho: Vec<HermitianOp> = (0..mu.num_settings())
        .map(|k| {
            let amplitudes: Vec<Complex64> = mu
                .row(k)
                .iter()
                .map(|&p| Complex64::new(p.max(0.0).sqrt(), 0.0))
                .collect();
            HermitianOp::projector(&amplitudes)
        })
        .collect();
    let projectors: Vec<HermitianOp> = (0..dim)
        .map(|w| HermitianOp::symmetrize(ComplexMatrix::basis_projector(dim, w)))
        .collect();
    let povm = vec![projectors; mu.num_settings()];
    Explanation::new(
        dim,
        mu.knob_domain().clone(),
        mu.detector_domain().clone(),
        rho,
        povm,
        tol,
    )
}

/// Orthogonal explanation: one basis vector per block of identical rows, so
/// inequivalent settings get perfectly distinguishable states, and the whole
/// table is carried by the setting-dependent POVM mu(k, w) I.
pub fn explain_orthogonal(mu: &Ppm, tol: &Tolerances) -> Result<Explanation> {
    let partition = mu.equiv_partition(tol);
    let dim = partition.num_blocks();
    let assignment = partition.assignment(mu.num_settings());
    let identity = HermitianOp::identity(dim);
    let rho: Vec<HermitianOp> = (0..mu.num_settings())
        .map(|k| HermitianOp::symmetrize(ComplexMatrix::basis_projector(dim, assignment[k])))
        .collect();
    let povm: Vec<Vec<HermitianOp>> = (0..mu.num_settings())
        .map(|k| {
            (0..mu.num_outcomes())
                .map(|w| identity.scale(mu.prob(k, w)))
                .collect()
        })
        .collect();
    Explanation::new(
        dim,
        mu.knob_domain().clone(),
        mu.detector_domain().clone(),
        rho,
        povm,
        tol,
    )
}

/// Shifts every two-level diagonal state diag(1/2 - a, 1/2 + a) to
/// diag(1/2 - a - delta, 1/2 + a + delta), leaving the POVM alone. The shift
/// cancels from every difference, so trace-distance profiles are untouched
/// while the spectra move: metric equivalence without unitary equivalence.
/// Requires 0 < a and 0 < a + delta < 1/2 at every setting.
pub fn deform_delta(e: &Explanation, delta: f64, tol: &Tolerances) -> Result<Explanation> {
    if e.hilbert_dim() != 2 {
        return Err(Error::DeformForm {
            setting: 0,
            reason: format!("Hilbert dimension is {}, not 2", e.hilbert_dim()),
        });
    }
    let mut rho = Vec::with_capacity(e.num_settings());
    for k in 0..e.num_settings() {
        let r = e.rho(k);
        let off = r.get(0, 1).norm().max(r.get(1, 0).norm());
        if off > tol.equality {
            return Err(Error::DeformForm {
                setting: k,
                reason: format!("off-diagonal entry of size {off:.3e}"),
            });
        }
        let a = r.get(1, 1).re - 0.5;
        if a <= 0.0 || a >= 0.5 {
            return Err(Error::DeformForm {
                setting: k,
                reason: format!("population offset a = {a} outside (0, 1/2)"),
            });
        }
        let shifted = a + delta;
        if shifted <= 0.0 || shifted >= 0.5 {
            return Err(Error::DeformRange {
                setting: k,
                delta,
                shifted,
            });
        }
        rho.push(HermitianOp::diag(&[0.5 - shifted, 0.5 + shifted]));
    }
    let povm = (0..e.num_settings())
        .map(|k| {
            (0..e.num_outcomes())
                .map(|w| e.povm(k, w).clone())
                .collect()
        })
        .collect();
    Explanation::new(
        2,
        e.knob_domain().clone(),
        e.detector_domain().clone(),
        rho,
        povm,
        tol,
    )
}

/// Numeric rank data for the trace map at one explanation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberProbe {
    pub base: Explanation,
    /// Rank of the finite-difference Jacobian of the trace map.
    pub jacobian_rank: usize,
    /// Parameters minus rank; at generic interior points this matches the
    /// fiber dimension formula.
    pub nullity: usize,
    /// Central-difference step used.
    pub step: f64,
    /// Number of free real parameters of the local parametrization.
    pub params: usize,
    /// Set when the base point sits too close to a boundary stratum for the
    /// rank to be trustworthy.
    pub degeneracy: Option<String>,
}

enum Direction {
    Rho(usize, ComplexMatrix),
    // Free POVM element index (never the last) and its perturbation; the
    // last element absorbs the negative to keep completeness exact.
    Povm(usize, usize, ComplexMatrix),
}

/// Central-difference Jacobian of the trace map over the real parametrization
/// of one explanation: per setting, the traceless Hermitian directions of the
/// state plus full Hermitian directions of all but the last POVM element.
/// Rank is decided by a relative singular-value threshold.
pub fn fiber_rank_probe(e: &Explanation, step: f64, tol: &Tolerances) -> Result<FiberProbe> {
    let n = e.hilbert_dim();
    let settings = e.num_settings();
    let outcomes = e.num_outcomes();

    let mut directions = Vec::new();
    let traceless = traceless_hermitian_basis(n);
    let full = hermitian_basis(n);
    for k in 0..settings {
        for b in &traceless {
            directions.push(Direction::Rho(k, b.clone()));
        }
        for w in 0..outcomes.saturating_sub(1) {
            for b in &full {
                directions.push(Direction::Povm(k, w, b.clone()));
            }
        }
    }
    let params = directions.len();
    debug_assert_eq!(
        params,
        if outcomes >= 1 {
            settings * (n * n * outcomes - 1)
        } else {
            0
        }
    );

    let degeneracy = check_interior(e, step, tol)?;

    let rows = settings * outcomes;
    let columns: Vec<Vec<f64>> = {
        let e = &e;
        let directions = &directions;
        sweep::map_collect(params, move |col| {
            let plus = eval_perturbed(e, &directions[col], step);
            let minus = eval_perturbed(e, &directions[col], -step);
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * step))
                .collect()
        })
    };

    // Rank via the spectrum of J^T J (real symmetric, modest size).
    let rank = if params == 0 || rows == 0 {
        0
    } else {
        let mut gram = ComplexMatrix::zeros(params);
        for i in 0..params {
            for j in i..params {
                let dot: f64 = columns[i]
                    .iter()
                    .zip(&columns[j])
                    .map(|(a, b)| a * b)
                    .sum();
                gram.set(i, j, Complex64::new(dot, 0.0));
                gram.set(j, i, Complex64::new(dot, 0.0));
            }
        }
        let eigs = eig_hermitian(&HermitianOp::symmetrize(gram), tol)?.eigenvalues;
        let lead = eigs.first().copied().unwrap_or(0.0).max(0.0);
        if lead == 0.0 {
            0
        } else {
            let cutoff = tol.rank_rel * tol.rank_rel * lead;
            eigs.iter().filter(|&&l| l > cutoff).count()
        }
    };

    Ok(FiberProbe {
        base: e.clone(),
        jacobian_rank: rank,
        nullity: params - rank,
        step,
        params,
        degeneracy,
    })
}

fn check_interior(e: &Explanation, step: f64, tol: &Tolerances) -> Result<Option<String>> {
    let margin = 10.0 * step;
    for k in 0..e.num_settings() {
        if e.rho(k).min_eigenvalue(tol)? <= margin {
            return Ok(Some(format!("state at setting {k} is nearly rank deficient")));
        }
        for w in 0..e.num_outcomes() {
            if e.povm(k, w).min_eigenvalue(tol)? <= margin {
                return Ok(Some(format!(
                    "POVM element ({k}, {w}) is nearly singular"
                )));
            }
        }
    }
    let mu = e.trace_map(tol)?;
    for value in mu.table() {
        if *value <= margin || *value >= 1.0 - margin {
            return Ok(Some(format!("probability {value} sits on the boundary")));
        }
    }
    Ok(None)
}

fn eval_perturbed(e: &Explanation, direction: &Direction, amount: f64) -> Vec<f64> {
    let settings = e.num_settings();
    let outcomes = e.num_outcomes();
    let mut out = Vec::with_capacity(settings * outcomes);
    for k in 0..settings {
        for w in 0..outcomes {
            let value = match direction {
                Direction::Rho(kk, b) if *kk == k => {
                    let perturbed =
                        HermitianOp::symmetrize(e.rho(k).matrix().add(&b.scale(amount)).unwrap());
                    trace_product_re(&perturbed, e.povm(k, w))
                }
                Direction::Povm(kk, ww, b) if *kk == k && (*ww == w || w == outcomes - 1) => {
                    let sign = if *ww == w { amount } else { -amount };
                    let perturbed = HermitianOp::symmetrize(
                        e.povm(k, w).matrix().add(&b.scale(sign)).unwrap(),
                    );
                    trace_product_re(e.rho(k), &perturbed)
                }
                _ => trace_product_re(e.rho(k), e.povm(k, w)),
            };
            out.push(value);
        }
    }
    out
}

/// Hermitian traceless basis: n - 1 diagonal deviations against the last
/// entry, then symmetric and antisymmetric off-diagonal pairs.
pub fn traceless_hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n.saturating_sub(1) {
        let mut m = ComplexMatrix::zeros(n);
        m.set(i, i, Complex64::new(1.0, 0.0));
        m.set(n - 1, n - 1, Complex64::new(-1.0, 0.0));
        basis.push(m);
    }
    append_offdiagonal_pairs(n, &mut basis);
    basis
}

/// Full Hermitian basis: n diagonal units plus the off-diagonal pairs.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut m = ComplexMatrix::zeros(n);
        m.set(i, i, Complex64::new(1.0, 0.0));
        basis.push(m);
    }
    append_offdiagonal_pairs(n, &mut basis);
    basis
}

fn append_offdiagonal_pairs(n: usize, basis: &mut Vec<ComplexMatrix>) {
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = ComplexMatrix::zeros(n);
            sym.set(i, j, Complex64::new(1.0, 0.0));
            sym.set(j, i, Complex64::new(1.0, 0.0));
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(n);
            asym.set(i, j, Complex64::new(0.0, 1.0));
            asym.set(j, i, Complex64::new(0.0, -1.0));
            basis.push(asym);
        }
    }
}

/// Preparation labels for an extension knob: `keep` plus one label per
/// supplied state.
pub(crate) fn preparation_labels(count: usize) -> Vec<Label> {
    let mut labels = vec![Label::text("keep")];
    for i in 1..=count {
        labels.push(Label::text(format!("s{i}")));
    }
    labels
}
