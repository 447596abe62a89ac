use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("asymmetric entries at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),
    #[error("negative or NaN entry at ({0},{1})")]
    NegativeEntry(usize, usize),
    #[error("triangle violation d[{0}][{2}] > d[{0}][{1}] + d[{1}][{2}]")]
    TriangleViolation(usize, usize, usize),
    #[error("distinct points {0} and {1} at distance 0")]
    DuplicatePoint(usize, usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {}", display_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("empty space")]
    Empty,
    #[error("base index {base} out of range for {n} points")]
    BadBase { base: usize, n: usize },
    #[error("search exceeded its limit of {limit} nodes; use a bounded variant")]
    SizeLimitExceeded { limit: u64 },
    #[error("infinite distance where a finite metric is required")]
    InfiniteEntry,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("empty set of spaces")]
    EmptySet,
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn display_violations(v: &[Violation]) -> String {
    let shown: Vec<String> = v.iter().take(8).map(|e| e.to_string()).collect();
    let more = if v.len() > 8 {
        format!(" (+{} more)", v.len() - 8)
    } else {
        String::new()
    };
    format!("{}{}", shown.join("; "), more)
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
