//! Walk-based fitness of individuals and the fitness table over all of them.
//!
//! A walk starts at the start room and consumes directions in order, moving
//! through each open door. It halts for good at the first closed (or
//! off-grid) door, on reaching the end room, or when the path is exhausted.
//! The fitness of the room it stops in is
//!
//! ```text
//! D_max − ((i_end − i)² + (j_end − j)²),   D_max = 2·(m − 1)²
//! ```
//!
//! so values lie in `[0, D_max]` and `D_max` is reached exactly at the end room.
//!
//! The table holds one value per path index. It is the classical image of the
//! entangled path/fitness register: the fitness map sends basis states to
//! basis states, so storing `fit[x]` beside the amplitudes is lossless.

use std::io::{self, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maze::{Maze, RoomCoord};
use crate::path::{directions_of, state_count, Direction, PathIndex, MAX_ENCODABLE_LEN};

/// Default cap on the individual length; `4^14` entries.
pub const DEFAULT_LENGTH_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct FitnessValue(pub u32);

impl FitnessValue {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Largest squared distance on an `size`x`size` grid.
pub fn max_fitness(size: usize) -> u32 {
    let span = size.saturating_sub(1) as u32;
    2 * span * span
}

/// Bits needed to hold any fitness value on an `size`x`size` grid.
pub fn fitness_width(size: usize) -> u32 {
    u32::BITS - max_fitness(size).leading_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkResult {
    pub final_room: RoomCoord,
    pub steps_taken: usize,
    pub reached_end: bool,
}

pub fn walk(maze: &Maze, start: RoomCoord, end: RoomCoord, path: &[Direction]) -> Result<WalkResult> {
    maze.check_room(start)?;
    maze.check_room(end)?;
    Ok(walk_steps(maze, start, end, path.iter().copied()))
}

/// Walk over any direction stream; `start` and `end` are assumed in bounds.
pub fn walk_steps<I>(maze: &Maze, start: RoomCoord, end: RoomCoord, steps: I) -> WalkResult
where
    I: IntoIterator<Item = Direction>,
{
    let mut current = start;
    let mut taken = 0;
    if current == end {
        return WalkResult {
            final_room: current,
            steps_taken: 0,
            reached_end: true,
        };
    }
    for dir in steps {
        if !maze.is_open(current, dir) {
            break;
        }
        // is_open guarantees the neighbour exists
        current = current.step(dir, maze.size()).unwrap();
        taken += 1;
        if current == end {
            return WalkResult {
                final_room: current,
                steps_taken: taken,
                reached_end: true,
            };
        }
    }
    WalkResult {
        final_room: current,
        steps_taken: taken,
        reached_end: false,
    }
}

pub fn fitness_of(result: &WalkResult, end: RoomCoord, size: usize) -> FitnessValue {
    let di = result.final_room.row.abs_diff(end.row) as u32;
    let dj = result.final_room.col.abs_diff(end.col) as u32;
    FitnessValue(max_fitness(size) - (di * di + dj * dj))
}

/// Parameters a fitness table was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableParams {
    pub len: usize,
    pub maze_size: usize,
    pub maze_seed: u64,
    pub start: RoomCoord,
    pub end: RoomCoord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitnessTable {
    params: TableParams,
    d_max: FitnessValue,
    values: Vec<FitnessValue>,
    max_fitness: FitnessValue,
}

impl FitnessTable {
    /// Evaluates every individual of length `len` with the default cap.
    pub fn build(maze: &Maze, start: RoomCoord, end: RoomCoord, len: usize) -> Result<FitnessTable> {
        Self::build_with_cap(maze, start, end, len, DEFAULT_LENGTH_CAP)
    }

    pub fn build_with_cap(
        maze: &Maze,
        start: RoomCoord,
        end: RoomCoord,
        len: usize,
        cap: usize,
    ) -> Result<FitnessTable> {
        check_length(len, cap)?;
        maze.check_room(start)?;
        maze.check_room(end)?;
        let size = maze.size();
        let mut values = vec![FitnessValue::default(); state_count(len)];
        values.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let result = walk_steps(maze, start, end, directions_of(idx as u64, len));
            *slot = fitness_of(&result, end, size);
        });
        let params = TableParams {
            len,
            maze_size: size,
            maze_seed: maze.seed(),
            start,
            end,
        };
        Self::from_values(params, values)
    }

    /// Wraps precomputed values, checking their count and range.
    pub fn from_values(params: TableParams, values: Vec<FitnessValue>) -> Result<FitnessTable> {
        if params.len > MAX_ENCODABLE_LEN {
            return Err(Error::LengthCapExceeded {
                len: params.len,
                cap: MAX_ENCODABLE_LEN,
            });
        }
        let expected = state_count(params.len);
        if values.len() != expected {
            return Err(Error::TableSizeMismatch {
                expected,
                actual: values.len(),
            });
        }
        let d_max = FitnessValue(max_fitness(params.maze_size));
        let max_value = values.par_iter().copied().max().unwrap_or_default();
        if max_value > d_max {
            return Err(Error::FitnessOutOfRange {
                value: max_value.0,
                max: d_max.0,
            });
        }
        Ok(FitnessTable {
            params,
            d_max,
            values,
            max_fitness: max_value,
        })
    }

    pub fn params(&self) -> &TableParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len
    }

    /// Number of entries, `4^len`.
    pub fn state_count(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[FitnessValue] {
        &self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> FitnessValue {
        self.values[idx]
    }

    pub fn fitness_at(&self, index: PathIndex) -> FitnessValue {
        self.values[index.as_usize()]
    }

    pub fn d_max(&self) -> FitnessValue {
        self.d_max
    }

    pub fn max_fitness(&self) -> FitnessValue {
        self.max_fitness
    }

    pub fn min_fitness(&self) -> FitnessValue {
        self.values.par_iter().copied().min().unwrap_or_default()
    }

    pub fn width(&self) -> u32 {
        fitness_width(self.params.maze_size)
    }

    /// Writes the binary dump: a little-endian header followed by one `u32`
    /// per entry.
    ///
    /// ```text
    /// b"QMFT" | version u32 = 1 | len u32 | maze_size u32 | maze_seed u64
    /// | start_row u32 | start_col u32 | end_row u32 | end_col u32 | d_max u32
    /// | values[4^len] u32
    /// ```
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        let p = &self.params;
        out.write_all(TABLE_MAGIC)?;
        for v in [1u32, p.len as u32, p.maze_size as u32] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&p.maze_seed.to_le_bytes())?;
        for v in [
            p.start.row as u32,
            p.start.col as u32,
            p.end.row as u32,
            p.end.col as u32,
            self.d_max.0,
        ] {
            out.write_all(&v.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(4 * self.values.len().min(1 << 16));
        for chunk in self.values.chunks(1 << 16) {
            buf.clear();
            buf.extend(chunk.iter().flat_map(|v| v.0.to_le_bytes()));
            out.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<FitnessTable> {
        let io_err = |e: io::Error| Error::TableFormat(e.to_string());
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io_err)?;
        if &magic != TABLE_MAGIC {
            return Err(Error::TableFormat("bad magic".into()));
        }
        let read_u32 = |input: &mut R| -> Result<u32> {
            let mut b = [0u8; 4];
            input.read_exact(&mut b).map_err(io_err)?;
            Ok(u32::from_le_bytes(b))
        };
        let version = read_u32(&mut input)?;
        if version != 1 {
            return Err(Error::TableFormat(format!("unsupported version {version}")));
        }
        let len = read_u32(&mut input)? as usize;
        let maze_size = read_u32(&mut input)? as usize;
        let mut seed = [0u8; 8];
        input.read_exact(&mut seed).map_err(io_err)?;
        let start = RoomCoord::new(read_u32(&mut input)? as usize, read_u32(&mut input)? as usize);
        let end = RoomCoord::new(read_u32(&mut input)? as usize, read_u32(&mut input)? as usize);
        let d_max = read_u32(&mut input)?;
        if d_max != max_fitness(maze_size) {
            return Err(Error::TableFormat(format!(
                "D_max {d_max} inconsistent with maze size {maze_size}"
            )));
        }
        if len > MAX_ENCODABLE_LEN {
            return Err(Error::TableFormat(format!("length {len} not encodable")));
        }
        let count = state_count(len);
        let mut bytes = vec![0u8; 4 * count];
        input.read_exact(&mut bytes).map_err(io_err)?;
        let values = bytes
            .chunks_exact(4)
            .map(|b| FitnessValue(u32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect();
        let params = TableParams {
            len,
            maze_size,
            maze_seed: u64::from_le_bytes(seed),
            start,
            end,
        };
        Self::from_values(params, values)
    }
}

const TABLE_MAGIC: &[u8; 4] = b"QMFT";

pub(crate) fn check_length(len: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ENCODABLE_LEN);
    if len > cap {
        Err(Error::LengthCapExceeded { len, cap })
    } else {
        Ok(())
    }
}
