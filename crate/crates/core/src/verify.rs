//! Classical ground truth for the search: shortest paths, exhaustive maxima,
//! and an empirical benchmark over many seeded searches.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fitness::{FitnessTable, FitnessValue};
use crate::maze::{Maze, RoomCoord};
use crate::path::{index_from_path, Direction, PathIndex};
use crate::search::{search_table, SearchConfig, SearchResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfsResult {
    pub distance: usize,
    pub path: Vec<Direction>,
}

impl BfsResult {
    /// Rooms visited by the path, start and end included.
    pub fn rooms(&self, maze: &Maze, start: RoomCoord) -> Vec<RoomCoord> {
        let mut rooms = vec![start];
        let mut cur = start;
        for &d in &self.path {
            cur = cur.step(d, maze.size()).expect("bfs path stays on grid");
            rooms.push(cur);
        }
        rooms
    }
}

pub fn bfs_shortest_path(maze: &Maze, start: RoomCoord, end: RoomCoord) -> Result<BfsResult> {
    maze.check_room(start)?;
    maze.check_room(end)?;
    let size = maze.size();
    let offset = |r: RoomCoord| r.row * size + r.col;
    let mut came_from: Vec<Option<(RoomCoord, Direction)>> = vec![None; size * size];
    let mut seen = vec![false; size * size];
    seen[offset(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(room) = queue.pop_front() {
        if room == end {
            break;
        }
        for (dir, next) in maze.neighbors(room) {
            if !seen[offset(next)] {
                seen[offset(next)] = true;
                came_from[offset(next)] = Some((room, dir));
                queue.push_back(next);
            }
        }
    }
    if !seen[offset(end)] {
        return Err(Error::Unreachable { start, end });
    }
    let mut path = Vec::new();
    let mut cur = end;
    while let Some((prev, dir)) = came_from[offset(cur)] {
        path.push(dir);
        cur = prev;
    }
    path.reverse();
    Ok(BfsResult {
        distance: path.len(),
        path,
    })
}

/// Index and value of the best table entry, lowest index on ties.
pub fn exhaustive_max(table: &FitnessTable) -> (PathIndex, FitnessValue) {
    let (idx, value) = table
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, v)| (i, *v))
        .reduce(
            || (usize::MAX, FitnessValue(0)),
            |a, b| {
                if a.0 == usize::MAX {
                    b
                } else if b.0 == usize::MAX {
                    a
                } else if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    let idx = if idx == usize::MAX { 0 } else { idx };
    (
        PathIndex::new(idx as u64, table.len()).expect("index within table"),
        value,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Consistency {
    /// The padded shortest path scores `D_max`.
    Holds { index: PathIndex },
    /// The shortest path is longer than the individuals, nothing to check.
    NotApplicable { bfs_distance: usize, len: usize },
    Violated { index: PathIndex, fitness: FitnessValue },
}

impl Consistency {
    pub fn passed(&self) -> bool {
        !matches!(self, Consistency::Violated { .. })
    }
}

/// Checks that, when the shortest path fits in `len` steps, the table scores
/// the padded shortest path at `D_max`.
pub fn bfs_consistency_check(
    maze: &Maze,
    start: RoomCoord,
    end: RoomCoord,
    len: usize,
    table: &FitnessTable,
) -> Result<Consistency> {
    let p = table.params();
    if p.len != len || p.start != start || p.end != end || p.maze_size != maze.size() {
        return Err(Error::InvalidConfig(
            "fitness table was built for different parameters".into(),
        ));
    }
    let bfs = bfs_shortest_path(maze, start, end)?;
    if bfs.distance > len {
        return Ok(Consistency::NotApplicable {
            bfs_distance: bfs.distance,
            len,
        });
    }
    let index = padded_index(&bfs.path, len)?;
    let fitness = table.fitness_at(index);
    if fitness == table.d_max() {
        Ok(Consistency::Holds { index })
    } else {
        Ok(Consistency::Violated { index, fitness })
    }
}

/// Encodes `prefix` followed by `N` steps up to `len`.
pub fn padded_index(prefix: &[Direction], len: usize) -> Result<PathIndex> {
    let mut steps = prefix.to_vec();
    steps.resize(len, Direction::North);
    index_from_path(&steps, len)
}

/// Replays `path` through `maze`; `Some(final room)` only if every move is through an open door.
pub fn replay(maze: &Maze, start: RoomCoord, path: &[Direction]) -> Option<RoomCoord> {
    path.iter().try_fold(start, |cur, &d| {
        if maze.is_open(cur, d) {
            cur.step(d, maze.size())
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeParams {
    pub size: usize,
    pub seed: u64,
    pub start: RoomCoord,
    pub end: RoomCoord,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub rng_seed: u64,
    pub best_index: PathIndex,
    pub best_path: String,
    pub best_fitness: FitnessValue,
    pub rounds: usize,
    pub oracle_calls: usize,
    pub optimal: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub maze: MazeParams,
    pub config: SearchConfig,
    pub trials: usize,
    #[serde(rename = "N")]
    pub state_count: usize,
    pub exhaustive_max: FitnessValue,
    pub success_rate: f64,
    pub mean_oracle_calls: f64,
    pub mean_rounds: f64,
    /// `mean_oracle_calls / √N`.
    pub sqrt_n_constant: f64,
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` independent searches (seeds `config.rng_seed + k`) in parallel.
pub fn run_benchmark(maze_params: &MazeParams, config: &SearchConfig, trials: usize) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    config.validate()?;
    let maze = Maze::generate(maze_params.size, maze_params.seed)?;
    let table = FitnessTable::build_with_cap(
        &maze,
        maze_params.start,
        maze_params.end,
        maze_params.len,
        config.length_cap,
    )?;
    run_benchmark_on(maze_params, &table, config, trials)
}

/// Benchmark over an already built table.
pub fn run_benchmark_on(
    maze_params: &MazeParams,
    table: &FitnessTable,
    config: &SearchConfig,
    trials: usize,
) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let (_, best) = exhaustive_max(table);
    let results: Vec<SearchResult> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let cfg = SearchConfig {
                rng_seed: config.rng_seed.wrapping_add(k as u64),
                ..*config
            };
            search_table(table, &cfg)
        })
        .collect::<Result<_>>()?;

    let records: Vec<TrialRecord> = results
        .iter()
        .enumerate()
        .map(|(k, r)| TrialRecord {
            trial: k,
            rng_seed: r.config.rng_seed,
            best_index: r.best_index,
            best_path: r.best_index.to_path().to_string(),
            best_fitness: r.best_fitness,
            rounds: r.rounds(),
            oracle_calls: r.oracle_calls_total,
            optimal: r.optimal,
            success: r.best_fitness == best,
        })
        .collect();
    let n = trials as f64;
    let mean_oracle_calls = records.iter().map(|r| r.oracle_calls as f64).sum::<f64>() / n;
    Ok(BenchReport {
        maze: *maze_params,
        config: *config,
        trials,
        state_count: table.state_count(),
        exhaustive_max: best,
        success_rate: records.iter().filter(|r| r.success).count() as f64 / n,
        mean_oracle_calls,
        mean_rounds: records.iter().map(|r| r.rounds as f64).sum::<f64>() / n,
        sqrt_n_constant: mean_oracle_calls / (table.state_count() as f64).sqrt(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareOutcome {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson goodness-of-fit of `observed` counts against `expected` probabilities.
/// Categories with zero expected probability must have zero counts and are dropped.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> Result<ChiSquareOutcome> {
    if observed.len() != expected.len() {
        return Err(Error::InvalidConfig(
            "observed and expected category counts differ".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    let norm: f64 = expected.iter().sum();
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return Ok(ChiSquareOutcome {
                    statistic: f64::INFINITY,
                    dof: 0,
                    p_value: 0.0,
                });
            }
            continue;
        }
        let e = total as f64 * p / norm;
        statistic += (o as f64 - e).powi(2) / e;
        categories += 1;
    }
    let dof = categories.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    Ok(ChiSquareOutcome {
        statistic,
        dof,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::IterationMode;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    /// Unit-weight Dijkstra over open doors.
    fn dijkstra(maze: &Maze, start: RoomCoord, end: RoomCoord) -> usize {
        let size = maze.size();
        let mut dist = vec![usize::MAX; size * size];
        let mut heap = BinaryHeap::new();
        dist[start.row * size + start.col] = 0;
        heap.push(Reverse((0usize, start.row, start.col)));
        while let Some(Reverse((d, r, c))) = heap.pop() {
            if d > dist[r * size + c] {
                continue;
            }
            let room = RoomCoord::new(r, c);
            for dir in Direction::ALL {
                if maze.is_open(room, dir) {
                    let n = room.step(dir, size).unwrap();
                    let k = n.row * size + n.col;
                    if d + 1 < dist[k] {
                        dist[k] = d + 1;
                        heap.push(Reverse((d + 1, n.row, n.col)));
                    }
                }
            }
        }
        dist[end.row * size + end.col]
    }

    #[test]
    fn bfs_trivial_cases() {
        let maze = Maze::generate(1, 0).unwrap();
        let c = RoomCoord::new(0, 0);
        assert_eq!(
            bfs_shortest_path(&maze, c, c).unwrap(),
            BfsResult {
                distance: 0,
                path: vec![]
            }
        );
        let maze = Maze::generate(5, 3).unwrap();
        let c = RoomCoord::new(2, 3);
        assert_eq!(bfs_shortest_path(&maze, c, c).unwrap().distance, 0);
    }

    #[test]
    fn bfs_matches_dijkstra() {
        let maze = Maze::generate(3, 11).unwrap();
        let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(2, 2));
        let bfs = bfs_shortest_path(&maze, s, e).unwrap();
        assert_eq!(bfs.distance, dijkstra(&maze, s, e));
        for seed in 0..50u64 {
            let maze = Maze::generate(7, seed).unwrap();
            let s = RoomCoord::new((seed % 7) as usize, 0);
            let e = RoomCoord::new(6, (seed % 5) as usize);
            let bfs = bfs_shortest_path(&maze, s, e).unwrap();
            assert_eq!(bfs.distance, dijkstra(&maze, s, e));
            assert_eq!(replay(&maze, s, &bfs.path), Some(e));
            assert_eq!(bfs.path.len(), bfs.distance);
        }
    }

    #[test]
    fn exhaustive_max_ties_and_reverse_scan() {
        let maze = Maze::generate(2, 42).unwrap();
        let table = FitnessTable::build(&maze, RoomCoord::new(0, 0), RoomCoord::new(1, 1), 4).unwrap();
        let (idx, value) = exhaustive_max(&table);
        let reverse = table.values().iter().rev().copied().max().unwrap();
        assert_eq!(value, reverse);
        assert_eq!(value, table.max_fitness());
        let first = table.values().iter().position(|v| *v == value).unwrap();
        assert_eq!(idx.as_usize(), first);

        let c = RoomCoord::new(0, 0);
        let single = FitnessTable::build(&maze, c, RoomCoord::new(1, 1), 0).unwrap();
        assert_eq!(exhaustive_max(&single).0.value(), 0);

        let flat = FitnessTable::from_values(*table.params(), vec![FitnessValue(1); 256]).unwrap();
        assert_eq!(exhaustive_max(&flat), (PathIndex::new(0, 4).unwrap(), FitnessValue(1)));
    }

    #[test]
    fn consistency_on_corridor_maze() {
        // 2x2 U-shaped corridor: (0,0) - (1,0) - (1,1) - (0,1)
        let maze = Maze::from_masks(2, 0, &[0b0100, 0b0100, 0b0011, 0b1001]).unwrap();
        assert!(maze.validate_perfect());
        let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(0, 1));
        let bfs = bfs_shortest_path(&maze, s, e).unwrap();
        assert_eq!(bfs.distance, 3);
        let len = 2 * bfs.distance;
        let table = FitnessTable::build(&maze, s, e, len).unwrap();
        assert!(matches!(
            bfs_consistency_check(&maze, s, e, len, &table).unwrap(),
            Consistency::Holds { .. }
        ));
        // the default length 2·1 is too short for a detour of 3
        let short = FitnessTable::build(&maze, s, e, 2).unwrap();
        let outcome = bfs_consistency_check(&maze, s, e, 2, &short).unwrap();
        assert_eq!(
            outcome,
            Consistency::NotApplicable {
                bfs_distance: 3,
                len: 2
            }
        );
        assert!(outcome.passed());
        assert!(short.max_fitness() < short.d_max());
    }

    #[test]
    fn consistency_start_equals_end() {
        let maze = Maze::generate(3, 1).unwrap();
        let c = RoomCoord::new(1, 1);
        let table = FitnessTable::build(&maze, c, c, 0).unwrap();
        assert!(bfs_consistency_check(&maze, c, c, 0, &table).unwrap().passed());
    }

    #[test]
    fn consistency_rejects_foreign_table() {
        let maze = Maze::generate(3, 1).unwrap();
        let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(2, 2));
        let table = FitnessTable::build(&maze, s, e, 3).unwrap();
        assert!(bfs_consistency_check(&maze, s, e, 4, &table).is_err());
    }

    #[test]
    fn single_trial_benchmark_echoes_search() {
        let params = MazeParams {
            size: 2,
            seed: 42,
            start: RoomCoord::new(0, 0),
            end: RoomCoord::new(1, 1),
            len: 4,
        };
        let maze = Maze::generate(2, 42).unwrap();
        let table = FitnessTable::build(&maze, params.start, params.end, 4).unwrap();
        let config = SearchConfig::for_table(&table, IterationMode::KnownCount, 7);
        let report = run_benchmark(&params, &config, 1).unwrap();
        let direct = search_table(&table, &config).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].best_index, direct.best_index);
        assert_eq!(report.records[0].oracle_calls, direct.oracle_calls_total);
        assert_eq!(report.mean_oracle_calls, direct.oracle_calls_total as f64);
        assert_eq!(report.state_count, 256);
        assert!(run_benchmark(&params, &config, 0).is_err());
    }

    #[test]
    fn chi_square_known_values() {
        // counts (10, 20, 30) against 20 each: (10² + 0² + 10²) / 20 = 10
        let out = chi_square_test(&[10, 20, 30], &[1.0, 1.0, 1.0]).unwrap();
        assert!((out.statistic - 10.0).abs() < 1e-12);
        assert_eq!(out.dof, 2);
        // survival of chi-square(2) at 10 is exp(-5)
        assert!((out.p_value - (-5.0f64).exp()).abs() < 1e-12);
        let perfect = chi_square_test(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(perfect.statistic, 0.0);
        assert!((perfect.p_value - 1.0).abs() < 1e-12);
        assert_eq!(chi_square_test(&[1, 0], &[0.0, 1.0]).unwrap().p_value, 0.0);
    }
}
