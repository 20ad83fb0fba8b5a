//! Complex Hermitian operator algebra with exact contracts: symmetrized
//! storage, Jacobi eigendecomposition, operator absolute value, trace and
//! operator norms, and optimal discriminating states.

mod eig;
mod matrix;

pub use matrix::ComplexMatrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// A Hermitian operator. Construction checks `|A - A†|` entrywise and stores
/// the symmetrized form `(A + A†) / 2`, so downstream code can rely on exact
/// Hermitian symmetry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComplexMatrix", try_from = "ComplexMatrix")]
pub struct HermitianOp {
    matrix: ComplexMatrix,
}

impl HermitianOp {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dev = matrix.hermiticity_error();
        if dev > tol.hermiticity {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        Ok(HermitianOp {
            matrix: matrix.symmetrized(),
        })
    }

    /// Forces hermiticity instead of validating it. For operators that are
    /// Hermitian by construction (projectors, real diagonals, sums of such).
    pub fn symmetrize(matrix: ComplexMatrix) -> Self {
        HermitianOp {
            matrix: matrix.symmetrized(),
        }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        HermitianOp {
            matrix: ComplexMatrix::diag(values),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOp {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOp {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    /// Projector |v><v| onto a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Self {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let m = ComplexMatrix::outer(v);
        if norm_sqr == 0.0 {
            return HermitianOp { matrix: m };
        }
        HermitianOp {
            matrix: m.scale(1.0 / norm_sqr),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(HermitianOp {
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(HermitianOp {
            matrix: self.matrix.sub(&other.matrix)?,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOp {
            matrix: self.matrix.scale(factor),
        }
    }

    /// Conjugation U A U†.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        let prod = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(HermitianOp {
            matrix: prod.symmetrized(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Checks the density-operator contract: positive semidefinite within the
    /// floor and unit trace within the equality tolerance.
    pub fn validate_density(&self, tol: &Tolerances) -> Result<()> {
        let tr = self.trace_re();
        if (tr - 1.0).abs() > tol.equality {
            return Err(Error::NotDensity {
                reason: format!("trace is {tr}, not 1"),
            });
        }
        let eigs = eig_hermitian(self, tol)?;
        let min = eigs.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol.psd_floor {
            return Err(Error::NotDensity {
                reason: format!("min eigenvalue {min:.3e} below the PSD floor"),
            });
        }
        Ok(())
    }

    /// Positive semidefiniteness within the floor.
    pub fn min_eigenvalue(&self, tol: &Tolerances) -> Result<f64> {
        let eigs = eig_hermitian(self, tol)?;
        Ok(eigs.eigenvalues.last().copied().unwrap_or(0.0))
    }
}

impl TryFrom<ComplexMatrix> for HermitianOp {
    type Error = Error;

    fn try_from(matrix: ComplexMatrix) -> Result<Self> {
        HermitianOp::new(matrix, &Tolerances::DEFAULT)
    }
}

impl From<HermitianOp> for ComplexMatrix {
    fn from(op: HermitianOp) -> Self {
        op.matrix
    }
}

/// Result of a Hermitian eigendecomposition: real eigenvalues in descending
/// order and a unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    /// V diag(f(lambda)) V† for tests and derived operators.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let factor = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled.set(i, j, scaled.get(i, j) * factor);
            }
        }
        scaled
            .matmul(&self.eigenvectors.adjoint())
            .expect("dimensions agree")
    }
}

pub fn eig_hermitian(a: &HermitianOp, tol: &Tolerances) -> Result<EigenSystem> {
    let (eigenvalues, eigenvectors) = eig::jacobi_hermitian(&a.matrix, tol)?;
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// |A| = sqrt(A†A), computed on the eigensystem of a Hermitian input.
pub fn abs_op(a: &HermitianOp, tol: &Tolerances) -> Result<HermitianOp> {
    let sys = eig_hermitian(a, tol)?;
    Ok(HermitianOp::symmetrize(sys.rebuild(f64::abs)))
}

/// Tr|A|, the trace norm.
pub fn trace_norm(a: &HermitianOp, tol: &Tolerances) -> Result<f64> {
    let sys = eig_hermitian(a, tol)?;
    Ok(sys.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Half the trace norm of a difference of Hermitian operators. No density
/// validation; operands are ordered deterministically so the result is
/// bit-for-bit symmetric in its arguments.
pub fn half_trace_norm_diff(a: &HermitianOp, b: &HermitianOp, tol: &Tolerances) -> Result<f64> {
    let (lo, hi) = if a.matrix.lex_le(&b.matrix) {
        (a, b)
    } else {
        (b, a)
    };
    let diff = hi.sub(lo)?;
    Ok(0.5 * trace_norm(&diff, tol)?)
}

/// Trace distance between density operators. Inputs are validated; the
/// result is clamped into [0, 1] against rounding.
pub fn trace_distance(r1: &HermitianOp, r2: &HermitianOp, tol: &Tolerances) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimensionMismatch {
            left: r1.dim(),
            right: r2.dim(),
        });
    }
    r1.validate_density(tol)?;
    r2.validate_density(tol)?;
    Ok(half_trace_norm_diff(r1, r2, tol)?.clamp(0.0, 1.0))
}

/// Operator norm max |lambda_i|.
pub fn op_norm(a: &HermitianOp, tol: &Tolerances) -> Result<f64> {
    let sys = eig_hermitian(a, tol)?;
    Ok(sys
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max))
}

/// The numerical radius of a Hermitian operator together with a rank-one
/// density operator attaining it: the projector onto an eigenvector of the
/// eigenvalue of maximal modulus. Ties in modulus prefer the more positive
/// eigenvalue, then the lowest index in descending order.
pub fn numerical_radius_state(a: &HermitianOp, tol: &Tolerances) -> Result<(f64, HermitianOp)> {
    let sys = eig_hermitian(a, tol)?;
    let mut best = 0usize;
    for (i, &l) in sys.eigenvalues.iter().enumerate() {
        if l.abs() > sys.eigenvalues[best].abs() {
            best = i;
        }
    }
    let sigma = HermitianOp::projector(&sys.eigenvector(best));
    Ok((sys.eigenvalues[best].abs(), sigma))
}

/// Re Tr(A B) for same-dimension operators.
pub fn trace_product_re(a: &HermitianOp, b: &HermitianOp) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += (a.get(i, j) * b.get(j, i)).re;
        }
    }
    sum
}
