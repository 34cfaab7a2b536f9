use thiserror::Error;

use crate::program::Atom;
use crate::text::SourceSpan;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("atom `{0}` uses the reserved `__` prefix")]
    ReservedAtom(String),

    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("program has {atoms} atoms, above the enumeration cap of {cap}")]
    UniverseTooLarge { atoms: usize, cap: usize },

    #[error("program is not negation-free: rule `{0}` has a negative literal")]
    NotNegationFree(String),

    #[error("more than {cap} cycles; raise the cycle cap")]
    CycleCapExceeded { cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("bridge not found in program: {0}")]
    BridgeNotFound(String),

    #[error("cannot reconstruct `{atom}`: `{missing}` is not in the universe")]
    Reconstruction { atom: Atom, missing: Atom },

    #[error("no kernel program found after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("malformed answer set: {0}")]
    Decode(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid anti-chain: {0}")]
    AntiChain(String),
}
