use thiserror::Error;

/// Reason a real subspace fails to be standard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonStandardReason {
    /// `H ∩ iH` is nonzero; carries its real dimension.
    IntersectsIH { dim: usize },
    /// `H + iH` spans a proper subspace; carries its real dimension.
    NotCyclic { span_dim: usize, ambient_real_dim: usize },
}

impl std::fmt::Display for NonStandardReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NonStandardReason::IntersectsIH { dim } => {
                write!(f, "H ∩ iH has real dimension {dim}")
            }
            NonStandardReason::NotCyclic {
                span_dim,
                ambient_real_dim,
            } => write!(
                f,
                "H + iH has real dimension {span_dim} < {ambient_real_dim}"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("subspace is not standard: {0}")]
    NotStandard(NonStandardReason),
    #[error("subspace is not factorial: H ∩ H' has real dimension {0}")]
    NotFactorial(usize),
    #[error("subspace is not abelian: max |Im<h, k>| = {0:e}")]
    NotAbelian(f64),
    #[error("numerically singular: {0}")]
    NumericallySingular(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("λ = {at} is a kink of the packet: φ'(λ-)² π = {left}, φ'(λ+)² π = {right}")]
    KinkPoint { at: f64, left: f64, right: f64 },
    #[error("spectral grid too coarse: tail bound {tail:e} exceeds {limit:e}")]
    GridTooCoarse { tail: f64, limit: f64 },
    #[error("invalid packet: {0}")]
    InvalidPacket(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("domination violated: kernel eigenvalue {0:e} < 0")]
    DominationViolated(f64),
    #[error("invalid symplectic data: {0}")]
    InvalidSymplecticData(String),
    #[error("parameters must be positive: {0}")]
    NonPositiveParameters(String),
    #[error("cutoff too small: tail {tail:e} exceeds {limit:e}")]
    CutoffTooSmall { tail: f64, limit: f64 },
    #[error("too many modes for truncated Fock space: {0} (max 3)")]
    TooManyModes(usize),
    #[error("subspace is not of thermal form: {0}")]
    NotThermalForm(String),
    #[error("point leaves the Kruskal chart: x² - t² = {0}")]
    LeavesChart(f64),
    #[error("point outside the Kruskal chart: x² - t² = {0} <= -1")]
    OutsideChart(f64),
    #[error("orbit root not bracketed: defect {at_zero:e} at s = 0, {at_max:e} at s_max")]
    RootNotBracketed { at_zero: f64, at_max: f64 },
    #[error("surface defect is not monotone along the orbit")]
    AmbiguousRoot,
    #[error("causal relation across different sphere points is not computed")]
    DifferentSpheres,
    #[error("rejection sampler found no point after {0} attempts")]
    EmptySample(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
