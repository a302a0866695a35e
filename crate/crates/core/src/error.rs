use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("family `{0}` has no word-problem oracle for this query")]
    UnsupportedFamily(String),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("unsupported peripheral subgroup: {0}")]
    UnsupportedPeripheral(String),
    #[error("resource limit exceeded: {what} needs more than {budget} vertices")]
    ResourceLimit { what: &'static str, budget: usize },
    #[error("empty graph")]
    EmptyGraph,
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("normal-form apex at level {apex} exceeds truncation depth {max_depth}")]
    DepthClipped { apex: u32, max_depth: u32 },
    #[error("geodesic enumeration exceeded cap {0}")]
    EnumerationCap(usize),
    #[error("not enough samples: {0}")]
    SampleExhausted(String),
    #[error("geodesic of length {len} is shorter than {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("sample touches the truncation frontier: {0}")]
    Contaminated(String),
    #[error("rays have no usable overlap")]
    NoOverlap,
    #[error("rays are equivalent at the available resolution")]
    RaysEquivalent,
    #[error("resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("normal form unavailable: {0}")]
    NormalFormUnavailable(String),
    #[error("endpoint lies in the removed coset")]
    EndpointRemoved,
    #[error("empty net")]
    EmptyNet,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("stale cache: {0}")]
    StaleCache(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
