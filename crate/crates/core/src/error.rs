use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("room size must be at least 1")]
    ZeroRoomSize,
    #[error("red count {red} is outside [0, {size}]")]
    FractionOutOfRange { red: usize, size: usize },
    #[error("{agents} agents cannot be split into rooms of size {size}")]
    Divisibility { agents: usize, size: usize },
    #[error("agent id `{0}` is used more than once")]
    DuplicateAgentId(String),
    #[error("agent `{agent}` has {found} ranks, expected {expected}")]
    RankLength {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("agent `{0}` is listed under the wrong color")]
    ColorMismatch(String),
    #[error("fraction numerator {value} is outside [0, {size}]")]
    PreferenceOutOfRange { value: usize, size: usize },
    #[error("fraction {0} is listed as both approved and neutral")]
    OverlappingLevels(usize),
    #[error("room {room} has {found} agents, expected {expected}")]
    RoomSize {
        room: usize,
        expected: usize,
        found: usize,
    },
    #[error("outcome has {found} rooms, expected {expected}")]
    RoomCount { expected: usize, found: usize },
    #[error("agent `{0}` is not assigned to any room")]
    MissingAgent(String),
    #[error("agent `{0}` is assigned more than once")]
    DuplicatedAgent(String),
    #[error("agent `{0}` does not belong to the game")]
    UnknownAgent(String),
    #[error("search would visit more than {cap} outcomes")]
    CapExceeded { cap: u64 },
    #[error("invalid mixed outcome: {0}")]
    InvalidDistribution(String),
    #[error("invalid X3C instance: {0}")]
    InvalidInstance(String),
    #[error("set indices do not form an exact cover")]
    InvalidCover,
    #[error("invalid reduction argument: {0}")]
    InvalidReduction(String),
    #[error("outcome is not a top-type outcome of the counterexample game")]
    NotTopType,
    #[error("operation requires room size 2, game has {0}")]
    RoomSizeNotTwo(usize),
    #[error("an agent cannot be paired with itself")]
    SameAgent,
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code, one per variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroRoomSize => "zero-room-size",
            Error::FractionOutOfRange { .. } => "fraction-range",
            Error::Divisibility { .. } => "divisibility",
            Error::DuplicateAgentId(_) => "duplicate-id",
            Error::RankLength { .. } => "rank-length",
            Error::ColorMismatch(_) => "color-mismatch",
            Error::PreferenceOutOfRange { .. } => "preference-range",
            Error::OverlappingLevels(_) => "overlapping-levels",
            Error::RoomSize { .. } => "room-size",
            Error::RoomCount { .. } => "room-count",
            Error::MissingAgent(_) => "missing-agent",
            Error::DuplicatedAgent(_) => "duplicated-agent",
            Error::UnknownAgent(_) => "unknown-agent",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::InvalidDistribution(_) => "invalid-distribution",
            Error::InvalidInstance(_) => "invalid-instance",
            Error::InvalidCover => "invalid-cover",
            Error::InvalidReduction(_) => "invalid-reduction",
            Error::NotTopType => "not-top-type",
            Error::RoomSizeNotTwo(_) => "room-size-not-two",
            Error::SameAgent => "same-agent",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal",
        }
    }
}
