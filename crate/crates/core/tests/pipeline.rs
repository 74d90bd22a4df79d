use maze_grover::path::state_count;
use maze_grover::search::{initial_cutoff, search_table, IterationMode, SearchConfig};
use maze_grover::verify::{
    bfs_consistency_check, bfs_shortest_path, chi_square_test, exhaustive_max, replay,
    run_benchmark, MazeParams,
};
use maze_grover::{search_max, walk, FitnessTable, Maze, RoomCoord, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn search_max_on_three_by_three() {
    let maze = Maze::generate(3, 11).unwrap();
    let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(2, 2));
    let probe = FitnessTable::build(&maze, s, e, 0).unwrap();
    let config = SearchConfig::for_table(&probe, IterationMode::KnownCount, 3);
    let (table, result) = search_max(&maze, s, e, 8, &config).unwrap();
    assert_eq!(table.state_count(), 65_536);
    assert!(result.best_fitness >= result.initial_cutoff);
    let accepted: Vec<_> = result.accepted_cutoffs().collect();
    if let Some(last) = accepted.last() {
        assert_eq!(*last, result.best_fitness);
    }
    // the reported best path replays to a room scoring the reported fitness
    let path = result.best_index.to_path();
    let r = walk(&maze, s, e, path.steps()).unwrap();
    assert_eq!(maze_grover::fitness_of(&r, e, 3), result.best_fitness);
}

#[test]
fn benchmark_small_register_succeeds() {
    let params = MazeParams {
        size: 3,
        seed: 11,
        start: RoomCoord::new(0, 0),
        end: RoomCoord::new(2, 2),
        len: 4,
    };
    let maze = Maze::generate(3, 11).unwrap();
    let table = FitnessTable::build(&maze, params.start, params.end, 4).unwrap();
    let config = SearchConfig::for_table(&table, IterationMode::KnownCount, 500);
    let report = run_benchmark(&params, &config, 100).unwrap();
    assert_eq!(report.state_count, 256);
    assert!(report.success_rate >= 0.9, "{}", report.success_rate);
    let successes = report.records.iter().filter(|r| r.success).count();
    assert_eq!(report.success_rate, successes as f64 / 100.0);
}

#[test]
fn benchmark_large_register_cost_bound() {
    let params = MazeParams {
        size: 3,
        seed: 11,
        start: RoomCoord::new(0, 0),
        end: RoomCoord::new(2, 2),
        len: 8,
    };
    let maze = Maze::generate(3, 11).unwrap();
    let table = FitnessTable::build(&maze, params.start, params.end, 8).unwrap();
    let config = SearchConfig::for_table(&table, IterationMode::KnownCount, 900);
    let report = run_benchmark(&params, &config, 100).unwrap();
    assert!(report.mean_oracle_calls <= 10.0 * 256.0);
    assert!((report.sqrt_n_constant - report.mean_oracle_calls / 256.0).abs() < 1e-12);
}

#[test]
fn initial_cutoff_follows_fitness_histogram() {
    let maze = Maze::generate(2, 42).unwrap();
    let table = FitnessTable::build(&maze, RoomCoord::new(0, 0), RoomCoord::new(1, 1), 4).unwrap();
    let d_max = table.d_max().get() as usize;
    let mut expected = vec![0.0; d_max + 1];
    for v in table.values() {
        expected[v.get() as usize] += 1.0;
    }
    let mut observed = vec![0u64; d_max + 1];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        observed[initial_cutoff(&table, &mut rng).1.get() as usize] += 1;
    }
    let outcome = chi_square_test(&observed, &expected).unwrap();
    assert!(outcome.passes(0.001), "{outcome:?}");
}

#[test]
fn uniform_measurement_is_uniform() {
    let state = StateVector::uniform(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = vec![0u64; 16];
    for _ in 0..40_000 {
        counts[state.measure(&mut rng).as_usize()] += 1;
    }
    assert!(chi_square_test(&counts, &[1.0; 16]).unwrap().passes(0.001));
}

#[test]
fn verification_pipeline_on_seeded_mazes() {
    for seed in 0..30u64 {
        let maze = Maze::generate(4, seed).unwrap();
        let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(3, 3));
        let bfs = bfs_shortest_path(&maze, s, e).unwrap();
        assert_eq!(replay(&maze, s, &bfs.path), Some(e));
        let len = bfs.distance.min(10);
        let table = FitnessTable::build(&maze, s, e, len).unwrap();
        assert!(bfs_consistency_check(&maze, s, e, len, &table).unwrap().passed());
        let (_, max) = exhaustive_max(&table);
        assert_eq!(max, table.max_fitness());
        if bfs.distance <= len {
            assert_eq!(max, table.d_max());
        }
    }
}

#[test]
fn certified_results_are_exhaustive_maxima() {
    for seed in 0..40u64 {
        let maze = Maze::generate(3, seed).unwrap();
        let (s, e) = (RoomCoord::new(2, 0), RoomCoord::new(0, 2));
        let table = FitnessTable::build(&maze, s, e, 5).unwrap();
        let config = SearchConfig::for_table(&table, IterationMode::UnknownCount, seed);
        let result = search_table(&table, &config).unwrap();
        if result.optimal {
            assert_eq!(result.best_fitness, exhaustive_max(&table).1);
        }
        assert_eq!(
            result.oracle_calls_total,
            result.history.iter().map(|r| r.grover_r).sum::<usize>()
        );
        assert!(result.history.iter().all(|r| r.grover_r <= config.grover_cap));
    }
}

#[test]
fn search_result_json_round_trip() {
    let maze = Maze::generate(3, 11).unwrap();
    let (s, e) = (RoomCoord::new(0, 0), RoomCoord::new(2, 2));
    let table = FitnessTable::build(&maze, s, e, 4).unwrap();
    let config = SearchConfig::for_table(&table, IterationMode::KnownCount, 2);
    let result = search_table(&table, &config).unwrap();
    let text = serde_json::to_string(&result).unwrap();
    let back: maze_grover::SearchResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, result);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["config"]["mode"], "known_count");
    assert_eq!(value["history"].as_array().unwrap().len(), result.rounds());
    assert_eq!(state_count(4), 256);
}
