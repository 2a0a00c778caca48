use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
///
/// Scalar payloads are carried as their literal text so the error type does
/// not depend on the numeric backend.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative weight {value} at atom `{atom}`")]
    NegativeWeight { atom: String, value: String },

    #[error("weights sum to {sum}, expected 1")]
    WeightSumMismatch { sum: String },

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("assignment is not total: atom `{0}` has no image")]
    PartialAssignment(String),

    #[error("map is not measure preserving: target atom `{atom}` receives {pushed}, expects {expected}")]
    NotMeasurePreserving {
        atom: String,
        pushed: String,
        expected: String,
    },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("codomain has {size} atoms, subset enumeration is capped at {cap}")]
    CodomainTooLarge { size: usize, cap: usize },

    #[error("objects live on different probability spaces")]
    SpaceMismatch,

    #[error("negative value {value} at atom `{atom}`")]
    NegativeValue { atom: String, value: String },

    #[error("measure is not absolutely continuous: mass {mass} on null atom `{atom}`")]
    NotAbsolutelyContinuous { atom: String, mass: String },

    #[error("expected a positive bound, got {0}")]
    NonPositiveBound(String),

    #[error("value {value} at atom `{atom}` exceeds the bound {bound}")]
    BoundViolation {
        atom: String,
        value: String,
        bound: String,
    },

    #[error("diagram has no top element")]
    NoTopElement,

    #[error("generation condition fails: top atoms `{0}` and `{1}` are never separated")]
    GenerationFailure(String, String),

    #[error("family is not consistent (residual {residual})")]
    Inconsistent { residual: String },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("index poset is not a chain: `{0}` and `{1}` are incomparable")]
    NotAChain(String, String),

    #[error("no certificate: tail gap {tail_gap} exceeds eps^2 = {eps_sq}")]
    NoCertificate { tail_gap: String, eps_sq: String },

    #[error("objects belong to different diagrams")]
    DiagramMismatch,

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("depth {depth} exceeds the limit {max}")]
    DepthTooLarge { depth: u32, max: u32 },

    #[error("bad segments: {0}")]
    BadSegments(String),

    #[error("construction would have {size} points, limit is {max}")]
    ProductTooLarge { size: usize, max: usize },

    #[error("maps are not parallel")]
    NotParallel,

    #[error("map is not 1-Lipschitz: d({x}, {y}) = {src} but images are {dst} apart")]
    NotLipschitz {
        x: String,
        y: String,
        src: String,
        dst: String,
    },

    #[error("no factorization: {0}")]
    NoFactorization(String),

    #[error("not a pseudometric: {0}")]
    NotPseudometric(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
