//! Maze solving as a quantum search problem, on a classical statevector simulator.
//!
//! The pipeline:
//!
//! 1. [`maze`] generates a perfect square maze with the recursive backtracker.
//! 2. [`path`] labels every direction sequence of length `n` with an index in `[0, 4^n)`.
//! 3. [`fitness`] walks each sequence through the maze and scores where it stops.
//! 4. [`statevector`] holds the uniform superposition and applies the threshold
//!    oracle and the diffusion operator.
//! 5. [`search`] raises a fitness cutoff round by round with Grover amplification.
//! 6. [`verify`] supplies classical ground truth (BFS, exhaustive maximum) and
//!    the benchmark harness.

pub mod error;
pub mod fitness;
pub mod maze;
pub mod path;
pub mod search;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
pub use fitness::{fitness_of, walk, FitnessTable, FitnessValue, TableParams, WalkResult};
pub use maze::{DoorMask, Maze, RoomCoord};
pub use path::{path_length, Direction, Path, PathIndex};
pub use search::{search_max, search_table, IterationMode, SearchConfig, SearchResult};
pub use statevector::{marked_count, OracleSpec, StateVector};
