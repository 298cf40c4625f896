use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("operation undefined on the zero element")]
    ZeroInput,
    #[error("empty input")]
    EmptyInput,
    #[error("denominator vanishes at the specialization point")]
    PoleAtPoint,
    #[error("resource limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("level {level} exceeds the degree cap")]
    LevelTooDeep { level: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("basepoint is periodic (period {period})")]
    PeriodicBasepoint { period: usize },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("could not classify the basepoint within {0} iterations")]
    ClassificationUnknown(usize),
    #[error("tree automorphisms have mismatched shape")]
    ShapeMismatch,
    #[error("level groups are not truncation compatible at level {0}")]
    IncompatibleLevels(usize),
    #[error("extension element is a square in the base field")]
    InvalidExtension,
    #[error("first level of the tower is trivial")]
    DegenerateTower,
    #[error("target lies in the forward orbit (iterate {m})")]
    OrbitCollision { m: u32 },
    #[error("target of map {map} is postcritical (iterate {ell})")]
    PostcriticalTarget { map: usize, ell: u32 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
}
