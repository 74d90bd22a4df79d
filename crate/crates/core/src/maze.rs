//! Square perfect mazes built by the recursive backtracker.
//!
//! Rooms are addressed by `(row, col)` with row 0 at the top. Each room stores
//! a 4-bit door mask (bit 0 = N, 1 = E, 2 = S, 3 = W). A maze is perfect when
//! its open doors form a spanning tree over the rooms.
//!
//! Generation is driven by [`ChaCha8Rng`] seeded with [`SeedableRng::seed_from_u64`],
//! so a `(size, seed)` pair yields the same maze on every platform.
//!
//! Text format:
//!
//! ```text
//! <size> <seed>
//! <size lowercase hex digits, one per room of row 0>
//! ...
//! ```

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoomCoord {
    pub row: usize,
    pub col: usize,
}

impl RoomCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        RoomCoord { row, col }
    }

    /// Neighbouring coordinate in `dir`, or `None` when it leaves an `size`x`size` grid.
    pub fn step(self, dir: Direction, size: usize) -> Option<RoomCoord> {
        let (dr, dc) = dir.delta();
        let row = self.row.checked_add_signed(dr)?;
        let col = self.col.checked_add_signed(dc)?;
        (row < size && col < size).then_some(RoomCoord { row, col })
    }
}

impl fmt::Display for RoomCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl FromStr for RoomCoord {
    type Err = Error;

    /// Accepts `r,c` or `(r,c)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (r, c) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `row,col`, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad coordinate {t:?}: {e}")))
        };
        Ok(RoomCoord::new(parse(r)?, parse(c)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DoorMask(u8);

impl DoorMask {
    pub const CLOSED: DoorMask = DoorMask(0);

    pub fn new(bits: u8) -> Option<DoorMask> {
        (bits <= 0xF).then_some(DoorMask(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_open(self, dir: Direction) -> bool {
        self.0 & dir.door_bit() != 0
    }

    pub fn with(self, dir: Direction, open: bool) -> DoorMask {
        if open {
            DoorMask(self.0 | dir.door_bit())
        } else {
            DoorMask(self.0 & !dir.door_bit())
        }
    }

    pub fn open_count(self) -> u32 {
        self.0.count_ones()
    }
}

/// An open door recorded by the generator: the room it was opened from and its direction.
pub type DoorEvent = (RoomCoord, Direction);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Maze {
    size: usize,
    seed: u64,
    rooms: Vec<DoorMask>,
}

impl Maze {
    /// Generates a perfect maze with the recursive backtracker.
    pub fn generate(size: usize, seed: u64) -> Result<Maze> {
        Self::generate_logged(size, seed).map(|(maze, _)| maze)
    }

    /// Like [`Maze::generate`], also returning every door opening in order.
    pub fn generate_logged(size: usize, seed: u64) -> Result<(Maze, Vec<DoorEvent>)> {
        if size == 0 {
            return Err(Error::EmptyMaze);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut maze = Maze {
            size,
            seed,
            rooms: vec![DoorMask::CLOSED; size * size],
        };
        let mut visited = vec![false; size * size];
        let mut log = Vec::with_capacity(size * size - 1);

        let start = RoomCoord::new(rng.random_range(0..size), rng.random_range(0..size));
        visited[maze.offset(start)] = true;
        let mut stack = vec![start];

        let mut candidates: Vec<(Direction, RoomCoord)> = Vec::with_capacity(4);
        while let Some(&current) = stack.last() {
            candidates.clear();
            candidates.extend(Direction::ALL.iter().filter_map(|&d| {
                current
                    .step(d, size)
                    .filter(|next| !visited[maze.offset(*next)])
                    .map(|next| (d, next))
            }));
            if candidates.is_empty() {
                stack.pop();
                continue;
            }
            let (dir, next) = candidates[rng.random_range(0..candidates.len())];
            maze.open_between(current, dir, next);
            log.push((current, dir));
            visited[maze.offset(next)] = true;
            stack.push(next);
        }
        Ok((maze, log))
    }

    /// Builds a maze from raw row-major masks, checking ranges, grid edges and symmetry.
    ///
    /// Perfectness is not required here; see [`Maze::validate_perfect`].
    pub fn from_masks(size: usize, seed: u64, masks: &[u8]) -> Result<Maze> {
        if size == 0 {
            return Err(Error::EmptyMaze);
        }
        if masks.len() != size * size {
            return Err(Error::Parse(format!(
                "expected {} rooms, got {}",
                size * size,
                masks.len()
            )));
        }
        let mut rooms = Vec::with_capacity(masks.len());
        for (k, &bits) in masks.iter().enumerate() {
            let room = RoomCoord::new(k / size, k % size);
            let mask = DoorMask::new(bits).ok_or(Error::InvalidDoorMask { room, mask: bits })?;
            rooms.push(mask);
        }
        let maze = Maze { size, seed, rooms };
        maze.check_doors()?;
        Ok(maze)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rooms(&self) -> &[DoorMask] {
        &self.rooms
    }

    pub fn contains(&self, room: RoomCoord) -> bool {
        room.row < self.size && room.col < self.size
    }

    pub fn check_room(&self, room: RoomCoord) -> Result<()> {
        if self.contains(room) {
            Ok(())
        } else {
            Err(Error::RoomOutOfBounds {
                room,
                size: self.size,
            })
        }
    }

    pub fn mask(&self, room: RoomCoord) -> Result<DoorMask> {
        self.check_room(room)?;
        Ok(self.rooms[self.offset(room)])
    }

    /// Whether the door of `room` facing `dir` is open. Doors facing off the
    /// grid and rooms outside it are always closed.
    #[inline]
    pub fn is_open(&self, room: RoomCoord, dir: Direction) -> bool {
        self.contains(room)
            && room.step(dir, self.size).is_some()
            && self.rooms[self.offset(room)].is_open(dir)
    }

    /// Returns a copy with the door between `room` and its `dir` neighbour set
    /// on both sides.
    pub fn with_door(mut self, room: RoomCoord, dir: Direction, open: bool) -> Result<Maze> {
        self.check_room(room)?;
        let next = room
            .step(dir, self.size)
            .ok_or(Error::DoorOffGrid { room })?;
        let (a, b) = (self.offset(room), self.offset(next));
        self.rooms[a] = self.rooms[a].with(dir, open);
        self.rooms[b] = self.rooms[b].with(dir.opposite(), open);
        Ok(self)
    }

    /// Number of open doors, counting each shared wall once.
    pub fn open_door_count(&self) -> usize {
        self.rooms
            .iter()
            .map(|m| (m.is_open(Direction::East) as usize) + (m.is_open(Direction::South) as usize))
            .sum()
    }

    /// Open neighbours of `room`.
    pub fn neighbors(&self, room: RoomCoord) -> impl Iterator<Item = (Direction, RoomCoord)> + '_ {
        Direction::ALL.into_iter().filter_map(move |d| {
            if self.is_open(room, d) {
                room.step(d, self.size).map(|n| (d, n))
            } else {
                None
            }
        })
    }

    /// Door symmetry, connectivity and exactly `size² − 1` open doors.
    pub fn validate_perfect(&self) -> bool {
        self.check_doors().is_ok()
            && self.open_door_count() == self.size * self.size - 1
            && self.is_connected()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.rooms.len()];
        let mut queue = VecDeque::from([RoomCoord::new(0, 0)]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(room) = queue.pop_front() {
            for (_, next) in self.neighbors(room) {
                let k = self.offset(next);
                if !seen[k] {
                    seen[k] = true;
                    reached += 1;
                    queue.push_back(next);
                }
            }
        }
        reached == self.rooms.len()
    }

    fn check_doors(&self) -> Result<()> {
        for k in 0..self.rooms.len() {
            let room = RoomCoord::new(k / self.size, k % self.size);
            let mask = self.rooms[k];
            for dir in Direction::ALL {
                if !mask.is_open(dir) {
                    continue;
                }
                match room.step(dir, self.size) {
                    None => return Err(Error::DoorOffGrid { room }),
                    Some(next) => {
                        if !self.rooms[self.offset(next)].is_open(dir.opposite()) {
                            return Err(Error::AsymmetricDoor { a: room, b: next });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn open_between(&mut self, room: RoomCoord, dir: Direction, next: RoomCoord) {
        let (a, b) = (self.offset(room), self.offset(next));
        self.rooms[a] = self.rooms[a].with(dir, true);
        self.rooms[b] = self.rooms[b].with(dir.opposite(), true);
    }

    #[inline]
    fn offset(&self, room: RoomCoord) -> usize {
        room.row * self.size + room.col
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Maze> {
        text.parse()
    }
}

impl fmt::Display for Maze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.size, self.seed)?;
        for row in self.rooms.chunks(self.size) {
            for mask in row {
                write!(f, "{:x}", mask.bits())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Maze {
    type Err = Error;

    fn from_str(text: &str) -> Result<Maze> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))?;
        let mut fields = header.split_whitespace();
        let size: usize = fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad size in header {header:?}")))?;
        let seed: u64 = fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad seed in header {header:?}")))?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in header {header:?}")));
        }
        if size == 0 {
            return Err(Error::EmptyMaze);
        }

        let mut masks = Vec::with_capacity(size * size);
        for row in 0..size {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {row}")))?
                .trim();
            if line.chars().count() != size {
                return Err(Error::Parse(format!(
                    "row {row} has {} rooms, expected {size}",
                    line.chars().count()
                )));
            }
            for c in line.chars() {
                match c {
                    '0'..='9' | 'a'..='f' => masks.push(c.to_digit(16).unwrap() as u8),
                    other => {
                        return Err(Error::Parse(format!("invalid mask digit {other:?} in row {row}")))
                    }
                }
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after maze body".into()));
        }
        Maze::from_masks(size, seed, &masks)
    }
}
