use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable sets differ")]
    VarSetMismatch,
    #[error("variable name collision on `{0}`")]
    NameCollision(String),
    #[error("arity {arity} exceeds the arity cap {cap}")]
    ArityCap { arity: usize, cap: usize },
    #[error("table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("negative table entry")]
    NegativeValue,
    #[error("signature has empty support")]
    EmptySupport,
    #[error("signature is not 0/1-valued")]
    NotRelation,
    #[error("signature is identically zero")]
    IdenticallyZero,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unknown signature `{0}`")]
    UnknownSignature(String),
    #[error("variable `{var}` has degree {degree}, not allowed by policy {policy}")]
    DegreePolicy {
        var: String,
        degree: usize,
        policy: String,
    },
    #[error("the signature already satisfies {0}")]
    AlreadySatisfies(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("instance too large: {what} is {size}, cap {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("atom {atom} (`{sig}`) is not {class}")]
    NotInClass {
        atom: usize,
        sig: String,
        class: String,
    },
    #[error("no signature with support outside {{{0}}} is available to build a pin gadget; the problem is trivially tractable")]
    NoPinGadget(u8),
    #[error("gadget invariant violated: {0}")]
    Gadget(String),
    #[error("atom {atom} (`{sig}`) takes value {value}, outside [1, {bound}) for d={d}, k={k}")]
    OutOfRegime {
        atom: usize,
        sig: String,
        value: String,
        bound: String,
        d: usize,
        k: usize,
    },
    #[error("numeric failure: {0}")]
    Numeric(String),
}
