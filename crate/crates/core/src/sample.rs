//! Random instances for tests and benchmarks: densities, POVMs, unitaries,
//! probability tables and whole explanations. Callers pass the generator,
//! so seeded runs are reproducible.

use num_complex::Complex64;
use rand::Rng;

use crate::config::Tolerances;
use crate::domains::{DetectorDomain, KnobDomain};
use crate::error::Result;
use crate::explanation::Explanation;
use crate::operators::{ComplexMatrix, HermitianOp};
use crate::ppm::Ppm;

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::new(dim, (0..dim * dim).map(|_| random_complex(rng)).collect())
        .expect("positive dimension")
}

/// Random full-rank density operator G G† / Tr(G G†).
pub fn random_density(rng: &mut impl Rng, dim: usize) -> HermitianOp {
    let g = random_matrix(rng, dim);
    let psd = g.matmul(&g.adjoint()).expect("same dimension");
    let tr = psd.trace().re;
    HermitianOp::symmetrize(psd.scale(1.0 / tr))
}

/// Random pure state projector.
pub fn random_pure(rng: &mut impl Rng, dim: usize) -> HermitianOp {
    let v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
    HermitianOp::projector(&v)
}

/// Random unitary from twice-iterated Gram-Schmidt of a random matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| random_complex(rng)).collect())
        .collect();
    for _pass in 0..2 {
        for j in 0..dim {
            for i in 0..j {
                let proj: Complex64 = (0..dim)
                    .map(|r| cols[i][r].conj() * cols[j][r])
                    .sum();
                for r in 0..dim {
                    let correction = proj * cols[i][r];
                    cols[j][r] -= correction;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for r in 0..dim {
                cols[j][r] /= norm;
            }
        }
    }
    let mut u = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        for i in 0..dim {
            u.set(i, j, cols[j][i]);
        }
    }
    u
}

/// Random POVM: random strictly positive elements sandwiched by the inverse
/// square root of their sum, so completeness holds by construction.
pub fn random_povm(rng: &mut impl Rng, dim: usize, outcomes: usize) -> Vec<HermitianOp> {
    let parts: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = random_matrix(rng, dim);
            let psd = g.matmul(&g.adjoint()).expect("same dimension");
            psd.add(&ComplexMatrix::identity(dim).scale(0.05))
                .expect("same dimension")
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim);
    for p in &parts {
        total = total.add(p).expect("same dimension");
    }
    let sys = crate::operators::eig_hermitian(
        &HermitianOp::symmetrize(total),
        &Tolerances::DEFAULT,
    )
    .expect("positive definite sum");
    let inv_sqrt = sys.rebuild(|l| 1.0 / l.sqrt());
    parts
        .into_iter()
        .map(|p| {
            HermitianOp::symmetrize(
                inv_sqrt
                    .matmul(&p)
                    .expect("same dimension")
                    .matmul(&inv_sqrt)
                    .expect("same dimension"),
            )
        })
        .collect()
}

/// Random table with strictly positive entries, rows normalized.
pub fn random_ppm(
    rng: &mut impl Rng,
    knobs: &KnobDomain,
    detectors: &DetectorDomain,
    tol: &Tolerances,
) -> Result<Ppm> {
    let cols = detectors.num_points();
    let mut table = Vec::with_capacity(knobs.num_points() * cols);
    for _ in 0..knobs.num_points() {
        let row: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = row.iter().sum();
        table.extend(row.into_iter().map(|x| x / sum));
    }
    Ppm::new(knobs.clone(), detectors.clone(), table, tol)
}

/// Random explanation with setting-dependent states and POVMs.
pub fn random_explanation(
    rng: &mut impl Rng,
    knobs: &KnobDomain,
    detectors: &DetectorDomain,
    dim: usize,
    tol: &Tolerances,
) -> Result<Explanation> {
    let settings = knobs.num_points();
    let outcomes = detectors.num_points();
    let rho = (0..settings).map(|_| random_density(rng, dim)).collect();
    let povm = (0..settings)
        .map(|_| random_povm(rng, dim, outcomes))
        .collect();
    Explanation::new(dim, knobs.clone(), detectors.clone(), rho, povm, tol)
}

/// Random explanation whose POVM does not depend on the knob setting.
pub fn knob_independent_explanation(
    rng: &mut impl Rng,
    knobs: &KnobDomain,
    detectors: &DetectorDomain,
    dim: usize,
    tol: &Tolerances,
) -> Result<Explanation> {
    let settings = knobs.num_points();
    let outcomes = detectors.num_points();
    let shared = random_povm(rng, dim, outcomes);
    let rho = (0..settings).map(|_| random_density(rng, dim)).collect();
    let povm = (0..settings).map(|_| shared.clone()).collect();
    Explanation::new(dim, knobs.clone(), detectors.clone(), rho, povm, tol)
}

/// Strictly interior explanation: full-rank states bounded away from the
/// boundary and POVM elements mixed toward the uniform one, so probabilities
/// stay inside (0, 1) with a comfortable margin.
pub fn interior_explanation(
    rng: &mut impl Rng,
    knobs: &KnobDomain,
    detectors: &DetectorDomain,
    dim: usize,
    tol: &Tolerances,
) -> Result<Explanation> {
    let settings = knobs.num_points();
    let outcomes = detectors.num_points();
    let uniform_state = HermitianOp::identity(dim).scale(1.0 / dim as f64);
    let uniform_element = HermitianOp::identity(dim).scale(1.0 / outcomes as f64);
    let rho: Vec<HermitianOp> = (0..settings)
        .map(|_| {
            random_density(rng, dim)
                .scale(0.7)
                .add(&uniform_state.scale(0.3))
                .expect("same dimension")
        })
        .collect();
    // Elementwise 0.8 M + 0.2 I/outcomes keeps completeness:
    // the mixtures sum to 0.8 I + 0.2 I = I.
    let povm: Vec<Vec<HermitianOp>> = (0..settings)
        .map(|_| {
            random_povm(rng, dim, outcomes)
                .into_iter()
                .map(|m| {
                    m.scale(0.8)
                        .add(&uniform_element.scale(0.2))
                        .expect("same dimension")
                })
                .collect()
        })
        .collect();
    Explanation::new(dim, knobs.clone(), detectors.clone(), rho, povm, tol)
}
