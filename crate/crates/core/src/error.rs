use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("entry count {len} does not match a {dim}x{dim} matrix")]
    EntryCountMismatch { dim: usize, len: usize },

    #[error("matrix rows have unequal lengths")]
    RaggedRows,

    #[error("not Hermitian: max |A - A\u{2020}| entry is {max_deviation:.3e}")]
    NotHermitian { max_deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge: off-diagonal residual {off_diagonal:.3e} after {sweeps} sweeps")]
    EigenNonConvergence { off_diagonal: f64, sweeps: usize },

    #[error("not a density operator: {reason}")]
    NotDensity { reason: String },

    #[error("POVM element not positive semidefinite at setting {setting}, outcome {outcome}: min eigenvalue {min_eig:.3e}")]
    PovmNotPositive {
        setting: usize,
        outcome: usize,
        min_eig: f64,
    },

    #[error("POVM completeness violated at setting {setting}: sum deviates from identity by {deviation:.3e}")]
    PovmIncomplete { setting: usize, deviation: f64 },

    #[error("factor label list invalid: {0}")]
    InvalidFactor(String),

    #[error("duplicate factor name {0:?}")]
    DuplicateFactor(String),

    #[error("factors named {0:?} carry different settings")]
    IncompatibleFactor(String),

    #[error("domain is not included in the target domain")]
    NotIncluded,

    #[error("unknown factor {0:?}")]
    UnknownFactor(String),

    #[error("unknown setting {label:?} for factor {factor:?}")]
    UnknownSetting { factor: String, label: String },

    #[error("index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("probability row {row} sums to {sum}, not 1")]
    RowNotNormalized { row: usize, sum: f64 },

    #[error("probability {value} out of [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("table length {len} does not match {rows} settings x {cols} outcomes")]
    TableShapeMismatch { len: usize, rows: usize, cols: usize },

    #[error("knob domains differ")]
    KnobDomainMismatch,

    #[error("detector domains differ")]
    DetectorDomainMismatch,

    #[error("{outcomes} elementary outcomes exceed the subset enumeration cap of {cap}")]
    SubsetCapExceeded { outcomes: usize, cap: usize },

    #[error("quotient metric depends on representatives: deviation {max_dev:.3e} at settings ({k1}, {k2})")]
    RepresentativeDependence { max_dev: f64, k1: usize, k2: usize },

    #[error("density operator at setting {setting} is not of the two-level diagonal form: {reason}")]
    DeformForm { setting: usize, reason: String },

    #[error("shift {delta} leaves setting {setting} outside the admissible range: a + delta = {shifted}")]
    DeformRange {
        setting: usize,
        delta: f64,
        shifted: f64,
    },

    #[error("preparation list is empty")]
    EmptyPreparations,

    #[error("ground truth does not explain the seed measure: max deviation {max_gap:.3e}")]
    TruthMismatch { max_gap: f64 },
}
