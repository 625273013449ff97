use thiserror::Error;

/// Cascade stage that produced a solver failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Alpha,
    Lambda1,
    Lambda2,
    Witness,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Alpha => "alpha",
            Stage::Lambda1 => "lambda1",
            Stage::Lambda2 => "lambda2",
            Stage::Witness => "witness",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum SpongeError {
    #[error("malformed tree at {path:?}: {constraint}")]
    Structure { path: Vec<usize>, constraint: String },

    #[error("spec has dimension {found}, operation needs {expected}")]
    Dimension { expected: String, found: usize },

    #[error("packing error at {path:?}: {count} boxes of ratio {ratio} do not fit")]
    Packing { path: Vec<usize>, count: usize, ratio: f64 },

    #[error("infeasible perturbation at {path:?}: feasible interval [{lo}, {hi}] is empty")]
    InfeasiblePerturbation { path: Vec<usize>, lo: f64, hi: f64 },

    #[error("degenerate range: t_low = t_high = {t}")]
    DegenerateRange { t: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProb(String),

    #[error("degenerate denominator at level {level}")]
    DegenerateDenominator { level: usize },

    #[error("word of length {len} is too short for n = {n}")]
    WordTooShort { len: usize, n: usize },

    #[error("n = {n} is below the approximate-cube threshold {threshold}")]
    BelowThreshold { n: usize, threshold: f64 },

    #[error("zero mass: word position {position} uses a symbol of probability 0")]
    ZeroMass { position: usize },

    #[error("{count} boxes exceed cap {cap}")]
    CapExceeded { count: f64, cap: usize },

    #[error("degenerate scales: {0}")]
    DegenerateScales(String),

    #[error("grid oracle supports at most 4 words, spec has {0}")]
    TooManyWords(usize),

    #[error("{stage}: no sign change found ({detail})")]
    NoBracket { stage: Stage, detail: String },

    #[error("lambda2: H has constant sign on [{lo}, {hi}] (H(lo) = {h_lo}, H(hi) = {h_hi})")]
    NoRoot { lo: f64, hi: f64, h_lo: f64, h_hi: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SpongeError>;
