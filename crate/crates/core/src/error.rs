use thiserror::Error;

use crate::maze::RoomCoord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("maze size must be at least 1")]
    EmptyMaze,

    #[error("room {room} is outside a {size}x{size} maze")]
    RoomOutOfBounds { room: RoomCoord, size: usize },

    #[error("door mask {mask:#x} at {room} is out of range")]
    InvalidDoorMask { room: RoomCoord, mask: u8 },

    #[error("door at {room} opens off the grid")]
    DoorOffGrid { room: RoomCoord },

    #[error("asymmetric door between {a} and {b}")]
    AsymmetricDoor { a: RoomCoord, b: RoomCoord },

    #[error("malformed maze text: {0}")]
    Parse(String),

    #[error("path has {actual} steps, expected {expected}")]
    PathLengthMismatch { expected: usize, actual: usize },

    #[error("path index {value} is out of range for length {len}")]
    IndexOutOfRange { value: u64, len: usize },

    #[error("invalid direction character {0:?}")]
    InvalidDirection(char),

    #[error("path length {len} exceeds the configured cap of {cap}")]
    LengthCapExceeded { len: usize, cap: usize },

    #[error("fitness table has {actual} entries, expected {expected}")]
    TableSizeMismatch { expected: usize, actual: usize },

    #[error("fitness value {value} exceeds the maximum {max}")]
    FitnessOutOfRange { value: u32, max: u32 },

    #[error("known-count iteration schedule needs at least one marked state")]
    NoMarkedStates,

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("state has length {state} but table has length {table}")]
    LengthMismatch { state: usize, table: usize },

    #[error("{end} is unreachable from {start}")]
    Unreachable { start: RoomCoord, end: RoomCoord },

    #[error("malformed fitness table dump: {0}")]
    TableFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
