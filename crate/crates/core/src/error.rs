use thiserror::Error;

/// Errors raised while ingesting rules, compiling, or updating an account.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed keyword {0:?}: must contain at least one non-whitespace character")]
    MalformedKeyword(String),

    #[error("malformed token {0:?}: must be non-empty, lowercase and free of whitespace")]
    MalformedToken(String),

    #[error("item id must not be empty")]
    EmptyItemId,

    #[error("rule for {0:?} has no items")]
    EmptyItemSet(String),

    #[error("duplicate keyword {0:?}")]
    DuplicateKeyword(String),

    #[error("unknown keyword {0:?}")]
    UnknownKeyword(String),

    #[error("brand {0:?} is listed both as sold and as non-sold")]
    BrandOverlap(String),

    #[error("keyword {keyword:?} contains the non-sold brand {brand:?} and could never be served")]
    KeywordContainsNonSoldBrand { keyword: String, brand: String },

    #[error("the rule set is empty")]
    EmptyRuleSet,

    #[error("{owner} carries {count} negative keywords, above the limit of {limit}")]
    LimitExceeded { owner: String, count: usize, limit: usize },

    #[error("target group size {target} is below the largest selected eraser image ({largest})")]
    InfeasibleTarget { target: usize, largest: usize },

    #[error("{what} must be positive")]
    NonPositive { what: &'static str },

    #[error("selected eraser images overlap on keyword {0:?}")]
    OverlappingImages(String),

    #[error("exhaustive packing is limited to {limit} candidates, got {got}")]
    OracleTooLarge { limit: usize, got: usize },

    #[error("probe generator has an empty token pool: {0}")]
    EmptyProbePool(String),

    #[error("invalid account: {0}")]
    InvalidAccount(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("change log cannot be replayed: {0}")]
    Replay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
