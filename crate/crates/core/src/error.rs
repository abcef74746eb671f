use thiserror::Error;

use crate::lang::Diagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("semiring {0} declares no multiplication")]
    NoTimes(String),
    #[error("arithmetic undefined: {0}")]
    Undefined(String),
    #[error("unassigned symbol `{0}`")]
    Unassigned(String),
    #[error("ill-sorted: {0}")]
    IllSorted(String),
    #[error("unresolved formula reference `{0}`")]
    UnresolvedRef(String),
    #[error("sort `{0}` is not finite")]
    InfiniteDomain(String),
    #[error("undeclared sort `{0}`")]
    UndeclaredSort(String),
    #[error("search space of {size} assignments exceeds the cap of {cap}; use the circuit backend or refine the program")]
    CapExceeded { size: String, cap: u64 },
    #[error("no weight guard applies to model {0}")]
    NoGuard(String),
    #[error("semiring {0} is not distributive; the circuit backend cannot be used")]
    NonDistributive(String),
    #[error("atom `{0}` relates several variables; the exact measure path needs single-variable atoms (use --backend mc)")]
    MultiVariableAtom(String),
    #[error("nonlinear atom `{0}` is outside the exact measure fragment (use --backend mc)")]
    NonlinearAtom(String),
    #[error("infinite measure: `{0}` is unbounded in the region")]
    InfiniteMeasure(String),
    #[error("missing finite bounds for `{0}`; add (set-option bounds {0} LO HI)")]
    MissingBounds(String),
    #[error("environments share atom `{0}`")]
    SharedAtom(String),
    #[error("undefined conditional: the denominator count is zero")]
    UndefinedConditional,
    #[error("backend {backend} cannot run this program: {reason}")]
    BackendMismatch { backend: String, reason: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Parse(#[from] Diagnostics),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
