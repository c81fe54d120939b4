use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to attribute a
/// failure to the stage of the pipeline that produced it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("first moment of the potential diverges; model rejected")]
    DivergentMoment,

    #[error("wavenumber k = 0 is not admissible here")]
    ZeroWaveNumber,

    #[error(
        "k = {k} lies below the certified strip: need gamma > {needed:.6} but certificate has gamma = {gamma:.6}"
    )]
    OutsideStrip { k: Complex64, gamma: f64, needed: f64 },

    #[error("exponential moment is infinite at gamma = {gamma}; strip evaluation unavailable")]
    InfiniteExpMoment { gamma: f64 },

    #[error("Volterra solve failed after {sweeps} sweeps (last delta {delta:.3e}): {hint}")]
    VolterraDivergence { sweeps: usize, delta: f64, hint: String },

    #[error("mismatched Jost evaluations: {0}")]
    MismatchedEvaluations(String),

    #[error(
        "Jost matrix nearly singular at k = {k} (|det| = {det:.3e}): near bound state or spectral singularity"
    )]
    NearSingularJost { k: Complex64, det: f64 },

    #[error("root count mismatch: refinement found {refined} roots, argument principle counts {winding}")]
    RootCountMismatch { refined: usize, winding: usize },

    #[error("bound-state detectors disagree: {0}")]
    PoleScanMismatch(String),

    #[error("no pole: {0}")]
    NoPole(String),

    #[error("invalid contour radius {radius:.3e}: {reason}")]
    BadContourRadius { radius: f64, reason: String },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },

    #[error("k' = {0} is not a bound state (Jost matrix kernel is trivial)")]
    NotABoundState(f64),

    #[error("Gram restriction is not positive definite (min eigenvalue {0:.3e})")]
    NonPositiveGram(f64),

    #[error("weight system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("Marchenko kernel tail does not decay: {0}")]
    KernelTail(String),

    #[error("Wronskian drifts with x: spread {spread:.3e} exceeds {tol:.1e}")]
    WronskianDrift { spread: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("stage {stage}: {source}")]
    InStage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a pipeline stage label for diagnostics and exit-code reporting.
    pub fn in_stage(self, stage: &str) -> Error {
        Error::InStage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 4,
            Error::Json(_) => 2,
            Error::InStage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
