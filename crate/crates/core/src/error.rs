use alloc::string::String;

use crate::ObjId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("`{0}` cannot be used as a symbol")]
    InvalidSymbol(String),
    #[error("decorations and scripts need a non-empty arrangement")]
    EmptyArrangement,
    #[error("the same script position was given twice")]
    DuplicateScript,
    #[error("ill-formed object: {0}")]
    IllFormed(&'static str),
    #[error("unknown object id {0:?}")]
    UnknownObject(ObjId),

    #[error("arity mismatch: {holes} hole(s) but {replacements} replacement(s)")]
    ArityMismatch { holes: usize, replacements: usize },
    #[error("a hole lies inside an object whose class is not a singleton")]
    OpaqueClassDescent,
    #[error("arrangement is not decomposable into a primitive constructor")]
    NotDecomposable,
    #[error("the hole has no primitive constructor decomposition")]
    NoDecomposition,
    #[error("arrangement can be built by splicing in more than one way")]
    AmbiguousParse,
    #[error("arrangement cannot be built from declared constructors")]
    NoParse,

    #[error("name group `{0}` overlaps an existing group")]
    OverlappingGroup(String),
    #[error("names are not in the same group")]
    NotSameGroup,
    #[error("object is not a name")]
    NotAName,
    #[error("primitive constructor decompositions disagree on free names")]
    UndefinedFreeNames,
    #[error("substitution is undefined (every decomposition captures)")]
    SubstUndefined,
    #[error("binder hole {0} is outside the constructor's arity")]
    BadBinder(usize),

    #[error("equivalence relates distinct arrangements containing a hole")]
    HoleEquivalenceViolation,
    #[error("equivalence schema relates names from different groups")]
    CrossGroupSchema,

    #[error("unknown set `{0}`")]
    UnknownSet(String),
    #[error("set `{0}` is already declared; mark the rule `override` to replace it")]
    DuplicateSetName(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unbound metavariable `{0}`")]
    UnboundMetavariable(String),
    #[error("ill-typed condition: {0}")]
    IllTypedCondition(&'static str),
    #[error("no least fixed point: `{set}` lost a member between strata {depth} and {next}")]
    NoLeastFixpoint { set: String, depth: usize, next: usize },
    #[error("search bound of {0} exceeded")]
    BoundExceeded(usize),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    /// Stable identifier used in diagnostics and CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSymbol(_) => "InvalidSymbol",
            Error::EmptyArrangement => "EmptyArrangement",
            Error::DuplicateScript => "DuplicateScript",
            Error::IllFormed(_) => "IllFormed",
            Error::UnknownObject(_) => "UnknownObject",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::OpaqueClassDescent => "OpaqueClassDescent",
            Error::NotDecomposable => "NotDecomposable",
            Error::NoDecomposition => "NoDecomposition",
            Error::AmbiguousParse => "AmbiguousParse",
            Error::NoParse => "NoParse",
            Error::OverlappingGroup(_) => "OverlappingGroup",
            Error::NotSameGroup => "NotSameGroup",
            Error::NotAName => "NotAName",
            Error::UndefinedFreeNames => "UndefinedFreeNames",
            Error::SubstUndefined => "SubstUndefined",
            Error::BadBinder(_) => "BadBinder",
            Error::HoleEquivalenceViolation => "HoleEquivalenceViolation",
            Error::CrossGroupSchema => "CrossGroupSchema",
            Error::UnknownSet(_) => "UnknownSet",
            Error::DuplicateSetName(_) => "DuplicateSetName",
            Error::UnknownRelation(_) => "UnknownRelation",
            Error::UnboundMetavariable(_) => "UnboundMetavariable",
            Error::IllTypedCondition(_) => "IllTypedCondition",
            Error::NoLeastFixpoint { .. } => "NoLeastFixpoint",
            Error::BoundExceeded(_) => "BoundExceeded",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
