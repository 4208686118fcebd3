use thiserror::Error;

/// Failure to read one of the textual formats (scalars, series, matrices,
/// trajectories, TEG documents).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            message: message.into(),
        }
    }

    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("undefined slope: the series is eps")]
    UndefinedSlope,
    /// The star of a series holding a non-positive monomial of negative
    /// exponent is finite at every event index and has no periodic encoding.
    #[error("star of non-causal series {0} is not ultimately periodic")]
    NonCausalStar(String),
    #[error("inconsistent series description: {0}")]
    Inconsistent(String),
    #[error("invalid period monomial {0}: need finite coefficient >= 0 and exponent >= 0")]
    InvalidPeriod(String),
    #[error("dater is not nondecreasing at index {0}")]
    NotMonotone(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserverError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    /// The meet of the two lemma matrices and the single fused residuation
    /// disagree, which can only come from an arithmetic bug.
    #[error("observer matrices disagree: L1 meet L2 = {meet}, fused residuation = {fused}")]
    FusionMismatch { meet: String, fused: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{what}: expected {expected} slices, got {got}")]
    SliceCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} covers events 0..={got}, horizon is {want}")]
    Horizon {
        what: &'static str,
        want: usize,
        got: usize,
    },
    #[error("observer gain entry ({0},{1}) is not causal")]
    NonCausalGain(usize, usize),
    #[error("output row {0} does not select exactly one state")]
    BadOutputRow(usize),
    #[error("fixpoint iteration did not settle within {0} sweeps")]
    Diverged(usize),
}
