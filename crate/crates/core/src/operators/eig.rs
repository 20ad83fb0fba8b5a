//! Cyclic Jacobi diagonalization for complex Hermitian matrices.
//!
//! Each pivot (p, q) is killed by a complex plane rotation: a phase factor
//! first makes the pivot real, then the usual symmetric 2x2 Schur rotation
//! zeroes it. Convergence is declared when the off-diagonal Frobenius norm
//! falls below `eig_offdiag_rel` times the Frobenius norm of the input.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::operators::matrix::ComplexMatrix;

/// Eigenvalues (descending) and the accumulated unitary whose columns are
/// the matching eigenvectors.
pub(crate) fn jacobi_hermitian(
    a: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.dim();
    let mut work = a.clone();
    let mut vecs = ComplexMatrix::identity(n);

    let input_norm = work.frobenius_norm();
    let target = tol.eig_offdiag_rel * input_norm;

    if n == 1 || off_diagonal_norm(&work) <= target {
        return Ok(sorted_system(&work, vecs));
    }

    let mut sweeps = 0;
    loop {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
        sweeps += 1;
        let off = off_diagonal_norm(&work);
        if off <= target {
            return Ok(sorted_system(&work, vecs));
        }
        if sweeps >= tol.eig_max_sweeps {
            return Err(Error::EigenNonConvergence {
                off_diagonal: off,
                sweeps,
            });
        }
    }
}

fn rotate(a: &mut ComplexMatrix, vecs: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let phase_conj = phase.conj();

    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    // Rotation G restricted to the (p, q) plane:
    //   G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    // Update columns: A <- A G.
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * (phase_conj * s));
        a.set(k, q, akp * s + akq * (phase_conj * c));
    }
    // Update rows: A <- G† A.
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c - aqk * (phase * s));
        a.set(q, k, apk * s + aqk * (phase * c));
    }
    // The pivot is zero by construction; pin it and keep diagonals real.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dq = a.get(q, q);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    a.set(q, q, Complex64::new(dq.re, 0.0));

    for k in 0..n {
        let vkp = vecs.get(k, p);
        let vkq = vecs.get(k, q);
        vecs.set(k, p, vkp * c - vkq * (phase_conj * s));
        vecs.set(k, q, vkp * s + vkq * (phase_conj * c));
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn sorted_system(diagonalized: &ComplexMatrix, vecs: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = diagonalized.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        diagonalized
            .get(j, j)
            .re
            .partial_cmp(&diagonalized.get(i, i).re)
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| diagonalized.get(i, i).re).collect();
    let mut sorted_vecs = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            sorted_vecs.set(row, new_col, vecs.get(row, old_col));
        }
    }
    (values, sorted_vecs)
}
