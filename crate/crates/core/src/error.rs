use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("non-mutual acceptability: `{lister}` lists `{listed}` but `{listed}` does not list `{lister}`")]
    NonMutual { lister: String, listed: String },

    #[error("invalid choice function for `{agent}`: {message}")]
    InvalidChoice { agent: String, message: String },

    #[error("choice table of `{agent}` has no entry for {set}")]
    TableMiss { agent: String, set: String },

    #[error("`{partner}` is not an acceptable partner of `{agent}`")]
    NotAcceptable { agent: String, partner: String },

    #[error("`{agent}` has {partners} acceptable partners, above the exhaustive-check cap of {cap}")]
    CapExceeded {
        agent: String,
        partners: usize,
        cap: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not an upper set: {0}")]
    NotUpperSet(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("minimal differences {0} and {1} overlap")]
    OverlappingDifferences(usize, usize),

    #[error("matrix has rank {rank}, expected full column rank {columns}")]
    RankDeficient { rank: usize, columns: usize },

    #[error("search limit of {limit} exceeded")]
    LimitExceeded { limit: u64 },

    #[error("integer overflow while accumulating weights")]
    WeightOverflow,

    #[error("invalid weights: {0}")]
    Weights(String),

    #[error("no successful break-marriage run from a matching other than the worker-optimal one")]
    NoDescendant,
}
