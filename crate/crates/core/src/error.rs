use thiserror::Error;

use crate::lamination::Chord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("chord endpoints must be distinct (got {0} twice)")]
    DegenerateChord(String),

    #[error("lamination has {} crossing chord pair(s), first: {} x {}", .0.len(), .0[0].0, .0[0].1)]
    Crossing(Vec<(Chord, Chord)>),

    #[error("chords {0} and {1} cross or share an endpoint; cannot re-pair")]
    BadPairing(Box<Chord>, Box<Chord>),

    #[error("gap has no nested pair of boundary chords; unlabelable at this depth")]
    Unlabelable,

    #[error("unknown component name {0:?}")]
    UnknownName(String),

    #[error("no face of the basilica is labeled {0}")]
    NoSuchComponent(String),

    #[error("insufficient generation: {0}")]
    InsufficientGeneration(String),

    #[error("generation mismatch: {0} vs {1}")]
    GenerationMismatch(u32, u32),

    #[error("gaps are not adjacent")]
    NotAdjacent,

    #[error("gaps share {0} boundary chords; expected exactly one")]
    AmbiguousMeeting(usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("not a basilica lamination: {0}")]
    NotBasilica(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("invalid map parameters: {0}")]
    InvalidParams(String),

    #[error("invalid render configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
