//! Iterative threshold search for the maximum-fitness path.
//!
//! Each round re-prepares the uniform state, marks every path whose fitness
//! is strictly above the current cutoff, amplifies, and measures. A measured
//! path above the cutoff is accepted and becomes the new cutoff; otherwise the
//! round is spent and the cutoff stays put.
//!
//! Two ways of choosing the number of Grover applications per round:
//!
//! * [`IterationMode::KnownCount`] reads the marked count `l` from the table
//!   and uses `floor(π/4 · √(N/l))`, at least 1.
//! * [`IterationMode::UnknownCount`] needs no count: it draws uniformly from
//!   `[0, min(M, cap))`, growing `M` by 6/5 after every failed round and
//!   resetting it to 1 once the cutoff moves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{FitnessTable, FitnessValue, DEFAULT_LENGTH_CAP};
use crate::maze::{Maze, RoomCoord};
use crate::path::PathIndex;
use crate::statevector::{marked_count, OracleSpec, StateVector};

const GROWTH: f64 = 6.0 / 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationMode {
    KnownCount,
    UnknownCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_rounds: usize,
    pub mode: IterationMode,
    pub rng_seed: u64,
    /// Upper bound on Grover applications in one round.
    pub grover_cap: usize,
    /// Stop as soon as no path lies above the cutoff.
    pub certify: bool,
    /// Longest individual the search will build a register for.
    pub length_cap: usize,
}

impl SearchConfig {
    /// Defaults sized for `table`: one round per fitness bit and a Grover cap of `ceil(√N)`.
    pub fn for_table(table: &FitnessTable, mode: IterationMode, rng_seed: u64) -> SearchConfig {
        SearchConfig {
            max_rounds: default_rounds(table.params().maze_size),
            mode,
            rng_seed,
            grover_cap: default_grover_cap(table.state_count()),
            certify: true,
            length_cap: DEFAULT_LENGTH_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        if self.grover_cap == 0 {
            return Err(Error::InvalidConfig("grover_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Round budget: the fitness register width, at least one.
pub fn default_rounds(maze_size: usize) -> usize {
    (crate::fitness::fitness_width(maze_size) as usize).max(1)
}

pub fn default_grover_cap(state_count: usize) -> usize {
    ((state_count as f64).sqrt().ceil() as usize).max(1)
}

/// Grover applications for `marked` out of `states` with the count known.
pub fn known_count_iterations(states: usize, marked: usize) -> Result<usize> {
    if marked == 0 || marked > states {
        return Err(Error::NoMarkedStates);
    }
    let r = (std::f64::consts::FRAC_PI_4 * (states as f64 / marked as f64).sqrt()).floor() as usize;
    Ok(r.max(1))
}

/// Per-search state of the iteration-count schedule.
#[derive(Debug, Clone)]
pub struct IterationSchedule {
    mode: IterationMode,
    bound: f64,
}

impl IterationSchedule {
    pub fn new(mode: IterationMode) -> Self {
        IterationSchedule { mode, bound: 1.0 }
    }

    pub fn mode(&self) -> IterationMode {
        self.mode
    }

    /// Current growth bound `M` of the unknown-count schedule.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn choose<R: Rng + ?Sized>(
        &self,
        states: usize,
        marked: usize,
        rng: &mut R,
        cap: usize,
    ) -> Result<usize> {
        match self.mode {
            IterationMode::KnownCount => Ok(known_count_iterations(states, marked)?.min(cap)),
            IterationMode::UnknownCount => {
                let upper = (self.bound.ceil() as usize).min(cap).max(1);
                Ok(rng.random_range(0..upper))
            }
        }
    }

    pub fn record(&mut self, accepted: bool) {
        if accepted {
            self.bound = 1.0;
        } else {
            self.bound *= GROWTH;
        }
    }
}

/// Free-function form of a single schedule draw.
pub fn choose_iterations<R: Rng + ?Sized>(
    states: usize,
    marked: usize,
    schedule: &IterationSchedule,
    rng: &mut R,
    cap: usize,
) -> Result<usize> {
    schedule.choose(states, marked, rng, cap)
}

/// Fitness of one uniformly drawn path, as if measuring the fresh register once.
pub fn initial_cutoff<R: Rng + ?Sized>(table: &FitnessTable, rng: &mut R) -> (PathIndex, FitnessValue) {
    let idx = rng.random_range(0..table.state_count());
    let index = PathIndex::new(idx as u64, table.len()).expect("index within table");
    (index, table.value(idx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub round: usize,
    pub cutoff_before: FitnessValue,
    pub marked: usize,
    pub grover_r: usize,
    /// Probability of measuring a marked path, read off the state before measuring.
    pub marked_probability: f64,
    pub measured_index: PathIndex,
    pub measured_fitness: FitnessValue,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub initial_index: PathIndex,
    pub initial_cutoff: FitnessValue,
    pub best_index: PathIndex,
    pub best_fitness: FitnessValue,
    pub history: Vec<IterationRecord>,
    pub oracle_calls_total: usize,
    /// Set once the marked set at the final cutoff was seen to be empty.
    pub optimal: bool,
}

impl SearchResult {
    pub fn rounds(&self) -> usize {
        self.history.len()
    }

    pub fn accepted_cutoffs(&self) -> impl Iterator<Item = FitnessValue> + '_ {
        self.history
            .iter()
            .filter(|r| r.accepted)
            .map(|r| r.measured_fitness)
    }
}

/// Builds the fitness table for the maze and searches it.
pub fn search_max(
    maze: &Maze,
    start: RoomCoord,
    end: RoomCoord,
    len: usize,
    config: &SearchConfig,
) -> Result<(FitnessTable, SearchResult)> {
    config.validate()?;
    let table = FitnessTable::build_with_cap(maze, start, end, len, config.length_cap)?;
    let result = search_table(&table, config)?;
    Ok((table, result))
}

/// Runs the search over an existing table, drawing the starting cutoff at random.
pub fn search_table(table: &FitnessTable, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let (index, _) = initial_cutoff(table, &mut rng);
    run_rounds(table, config, index, &mut rng)
}

/// Runs the search starting from the cutoff given by `initial`.
pub fn search_table_from(
    table: &FitnessTable,
    config: &SearchConfig,
    initial: PathIndex,
) -> Result<SearchResult> {
    config.validate()?;
    if initial.len() != table.len() {
        return Err(Error::LengthMismatch {
            state: initial.len(),
            table: table.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    run_rounds(table, config, initial, &mut rng)
}

fn run_rounds(
    table: &FitnessTable,
    config: &SearchConfig,
    initial: PathIndex,
    rng: &mut ChaCha8Rng,
) -> Result<SearchResult> {
    let states = table.state_count();
    let initial_fitness = table.fitness_at(initial);
    let mut cutoff = initial_fitness;
    let mut best = initial;
    let mut schedule = IterationSchedule::new(config.mode);
    let mut history = Vec::new();
    let mut oracle_calls = 0;
    let mut optimal = false;

    for round in 0..config.max_rounds {
        let marked = marked_count(table, cutoff);
        if marked == 0 && config.certify {
            optimal = true;
            break;
        }
        let grover_r = if marked == 0 {
            0
        } else {
            schedule.choose(states, marked, rng, config.grover_cap)?
        };

        let oracle = OracleSpec::new(table, cutoff);
        let mut state = StateVector::uniform_with_cap(table.len(), config.length_cap)?;
        state.grover_iterate(&oracle, grover_r)?;
        oracle_calls += grover_r;
        let marked_probability = state.marked_probability(&oracle);

        let measured = state.measure(rng);
        let fitness = table.fitness_at(measured);
        let accepted = fitness > cutoff;
        history.push(IterationRecord {
            round,
            cutoff_before: cutoff,
            marked,
            grover_r,
            marked_probability,
            measured_index: measured,
            measured_fitness: fitness,
            accepted,
        });
        schedule.record(accepted);
        if accepted {
            cutoff = fitness;
            best = measured;
        }
    }
    if config.certify && !optimal {
        optimal = marked_count(table, cutoff) == 0;
    }

    Ok(SearchResult {
        config: *config,
        initial_index: initial,
        initial_cutoff: initial_fitness,
        best_index: best,
        best_fitness: cutoff,
        history,
        oracle_calls_total: oracle_calls,
        optimal,
    })
}
