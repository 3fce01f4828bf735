use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error on line {line}: {message}")]
    Validation { line: u64, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sizing error: {0}")]
    Sizing(String),

    #[error("degenerate category `{0}`: week-to-week spread is zero")]
    DegenerateCategory(String),

    #[error("position group {0} has fewer than two players")]
    Grouping(String),

    #[error("degenerate covariance: v'Σv must be positive")]
    DegenerateCovariance,

    #[error("category weights are collinear with the baseline weights; the future-pick differential is undefined")]
    Singular,

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("roster cannot fit the positional structure")]
    Infeasible,

    #[error("cannot renormalize: vector sum {0} is too close to zero")]
    Renormalization(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("player pool exhausted: {0}")]
    PoolExhausted(String),

    #[error("no feasible candidate for team {0}")]
    NoCandidate(usize),

    #[error("unknown player `{0}`")]
    UnknownPlayer(String),

    #[error("player `{0}` is already drafted")]
    AlreadyDrafted(String),
}
