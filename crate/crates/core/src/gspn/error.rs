use thiserror::Error;

#[derive(Debug, Error)]
pub enum GspnError {
    #[error("duplicate place or transition name `{0}`")]
    DuplicateName(String),

    #[error("unknown place or transition name `{0}`")]
    UnknownName(String),

    #[error("transition `{transition}`: {what}")]
    BadParameter { transition: String, what: String },

    #[error("state space exceeded cap of {cap} states (net may be unbounded)")]
    StateSpaceExceeded { cap: usize },

    #[error("cycle of vanishing markings with no timed exit (loop through state {state})")]
    VanishingLoop { state: usize },

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error("net file, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("query: {0}")]
    BadQuery(String),

    #[error("invariant computation overflowed integer range")]
    InvariantOverflow,
}
