use serde::{Deserialize, Serialize};

/// Numerical tolerances and caps used throughout the crate.
///
/// Everything tunable lives in this one record so tests and the CLI have a
/// single knob. `Tolerances::DEFAULT` is the standard configuration; the
/// usual override is [`Tolerances::with_equality`], which rescales the
/// general-purpose equality threshold and leaves the rest alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum allowed entry of |A - A†| when constructing a Hermitian operator.
    pub hermiticity: f64,
    /// General equality threshold: probability rows, traces, metric values.
    pub equality: f64,
    /// Eigenvalues down to -psd_floor still count as positive semidefinite.
    pub psd_floor: f64,
    /// Jacobi convergence: off-diagonal Frobenius norm relative to the input norm.
    pub eig_offdiag_rel: f64,
    /// Cap on Jacobi sweeps before giving up.
    pub eig_max_sweeps: usize,
    /// Hard cap on elementary outcomes for subset enumeration (2^n subsets).
    pub subset_cap: usize,
    /// Central-difference step for the fiber rank probe.
    pub jacobian_step: f64,
    /// Relative singular-value threshold for numeric rank decisions.
    pub rank_rel: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        equality: 1e-9,
        psd_floor: 1e-9,
        eig_offdiag_rel: 1e-12,
        eig_max_sweeps: 100,
        subset_cap: 12,
        jacobian_step: 1e-5,
        rank_rel: 1e-6,
    };

    /// Standard tolerances with a custom equality threshold.
    pub fn with_equality(equality: f64) -> Self {
        Tolerances {
            equality,
            ..Self::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
