//! Direction sequences ("individuals") and their integer basis labels.
//!
//! A path of length `n` is a point of `{N,E,S,W}^n`. Each direction carries a
//! 2-bit code (`N=00`, `E=01`, `S=10`, `W=11`) and the path index is the
//! concatenation of those codes with the first step in the most significant
//! pair, so ordering indices numerically orders paths lexicographically.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maze::RoomCoord;

/// Longest path whose index still fits in a `u64`.
pub const MAX_ENCODABLE_LEN: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub const fn code(self) -> u8 {
        match self {
            Direction::North => 0b00,
            Direction::East => 0b01,
            Direction::South => 0b10,
            Direction::West => 0b11,
        }
    }

    /// Only the low two bits of `code` are used.
    pub const fn from_code(code: u8) -> Direction {
        match code & 0b11 {
            0b00 => Direction::North,
            0b01 => Direction::East,
            0b10 => Direction::South,
            _ => Direction::West,
        }
    }

    /// Bit of this direction in a room's door mask.
    pub const fn door_bit(self) -> u8 {
        1 << self.code()
    }

    pub const fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    /// (row delta, col delta); row 0 is the top of the grid.
    pub const fn delta(self) -> (isize, isize) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Direction::North => 'N',
            Direction::East => 'E',
            Direction::South => 'S',
            Direction::West => 'W',
        }
    }

    pub fn from_char(c: char) -> Result<Direction> {
        match c {
            'N' | 'n' => Ok(Direction::North),
            'E' | 'e' => Ok(Direction::East),
            'S' | 's' => Ok(Direction::South),
            'W' | 'w' => Ok(Direction::West),
            other => Err(Error::InvalidDirection(other)),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A fixed-length sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Path(Vec<Direction>);

impl Path {
    pub fn new(steps: Vec<Direction>) -> Self {
        Path(steps)
    }

    pub fn steps(&self) -> &[Direction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Encodes this path as a basis index for registers of length `len`.
    pub fn to_index(&self, len: usize) -> Result<PathIndex> {
        index_from_path(&self.0, len)
    }
}

impl From<Vec<Direction>> for Path {
    fn from(steps: Vec<Direction>) -> Self {
        Path(steps)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{}", d.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Path> {
        s.trim()
            .chars()
            .map(Direction::from_char)
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }
}

/// Integer label of a path basis state, `value < 4^len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathIndex {
    value: u64,
    len: usize,
}

impl PathIndex {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len > MAX_ENCODABLE_LEN || value >= state_count_u64(len) {
            return Err(Error::IndexOutOfRange { value, len });
        }
        Ok(PathIndex { value, len })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn as_usize(self) -> usize {
        self.value as usize
    }

    pub fn to_path(self) -> Path {
        Path(directions_of(self.value, self.len).collect())
    }
}

impl fmt::Display for PathIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_path())
    }
}

fn state_count_u64(len: usize) -> u64 {
    1u64 << (2 * len)
}

/// Number of basis states `4^len`. Panics if `len` is not encodable.
pub fn state_count(len: usize) -> usize {
    assert!(len <= MAX_ENCODABLE_LEN, "path length {len} is not encodable");
    1usize
        .checked_shl(2 * len as u32)
        .expect("4^len overflows usize")
}

pub fn index_from_path(steps: &[Direction], len: usize) -> Result<PathIndex> {
    if steps.len() != len {
        return Err(Error::PathLengthMismatch {
            expected: len,
            actual: steps.len(),
        });
    }
    if len > MAX_ENCODABLE_LEN {
        return Err(Error::LengthCapExceeded {
            len,
            cap: MAX_ENCODABLE_LEN,
        });
    }
    let value = steps
        .iter()
        .fold(0u64, |acc, d| (acc << 2) | u64::from(d.code()));
    Ok(PathIndex { value, len })
}

pub fn path_from_index(index: PathIndex) -> Path {
    index.to_path()
}

/// Decodes the directions of `value` lazily, first step first.
pub fn directions_of(value: u64, len: usize) -> impl Iterator<Item = Direction> {
    (0..len).map(move |k| {
        let shift = 2 * (len - 1 - k);
        Direction::from_code(((value >> shift) & 0b11) as u8)
    })
}

/// Individual length for a start/end pair: twice the Manhattan distance.
pub fn path_length(start: RoomCoord, end: RoomCoord) -> usize {
    2 * (start.row.abs_diff(end.row) + start.col.abs_diff(end.col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use Direction::*;

    #[test]
    fn codes_are_a_bijection() {
        for code in 0..4u8 {
            assert_eq!(Direction::from_code(code).code(), code);
        }
        assert_eq!(North.code(), 0b00);
        assert_eq!(East.code(), 0b01);
        assert_eq!(South.code(), 0b10);
        assert_eq!(West.code(), 0b11);
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(path_length(RoomCoord::new(0, 0), RoomCoord::new(2, 2)), 8);
        assert_eq!(path_length(RoomCoord::new(0, 0), RoomCoord::new(0, 3)), 6);
        assert_eq!(path_length(RoomCoord::new(1, 1), RoomCoord::new(1, 1)), 0);
        // end up-left of start still gives a usable length
        assert_eq!(path_length(RoomCoord::new(2, 2), RoomCoord::new(0, 0)), 8);
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_from_path(&[North, North], 2).unwrap().value(), 0);
        assert_eq!(index_from_path(&[East, West], 2).unwrap().value(), 0b0111);
        assert_eq!(
            PathIndex::new(7, 2).unwrap().to_path(),
            Path::new(vec![East, West])
        );
    }

    #[test]
    fn index_rejects_bad_input() {
        assert_eq!(
            index_from_path(&[North], 2),
            Err(Error::PathLengthMismatch {
                expected: 2,
                actual: 1
            })
        );
        assert!(PathIndex::new(16, 2).is_err());
        assert!(PathIndex::new(15, 2).is_ok());
        assert!(PathIndex::new(0, 32).is_err());
    }

    #[test]
    fn round_trip_exhaustive() {
        for len in 0..=8 {
            for value in 0..state_count(len) as u64 {
                let idx = PathIndex::new(value, len).unwrap();
                let path = path_from_index(idx);
                assert_eq!(path.len(), len);
                assert_eq!(path.to_index(len).unwrap(), idx);
            }
        }
    }

    #[test]
    fn numeric_order_is_lexicographic() {
        let paths: Vec<String> = (0..16)
            .map(|v| PathIndex::new(v, 2).unwrap().to_path().to_string())
            .collect();
        let mut sorted = paths.clone();
        sorted.sort_by_key(|s| {
            s.chars()
                .map(|c| Direction::from_char(c).unwrap().code())
                .collect::<Vec<_>>()
        });
        assert_eq!(paths, sorted);
        assert_eq!(paths[0], "NN");
        assert_eq!(paths[15], "WW");
    }

    #[test]
    fn path_text_round_trip() {
        let p: Path = "EENNSW".parse().unwrap();
        assert_eq!(p.to_string(), "EENNSW");
        assert!("ENX".parse::<Path>().is_err());
    }

    proptest! {
        #[test]
        fn path_length_symmetric(a in 0usize..50, b in 0usize..50, c in 0usize..50, d in 0usize..50) {
            let s = RoomCoord::new(a, b);
            let e = RoomCoord::new(c, d);
            prop_assert_eq!(path_length(s, e), path_length(e, s));
            prop_assert_eq!(path_length(s, e) == 0, s == e);
        }

        #[test]
        fn index_round_trip(len in 0usize..=MAX_ENCODABLE_LEN, raw in any::<u64>()) {
            let value = raw % state_count_u64(len);
            let idx = PathIndex::new(value, len).unwrap();
            prop_assert_eq!(idx.to_path().to_index(len).unwrap(), idx);
        }
    }
}
