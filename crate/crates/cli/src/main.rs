//! `qmaze`: generate, solve, verify, benchmark and render perfect mazes.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 check failed.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maze_grover::fitness::{fitness_width, max_fitness, DEFAULT_LENGTH_CAP};
use maze_grover::path::path_length;
use maze_grover::verify::{bfs_consistency_check, bfs_shortest_path, exhaustive_max, run_benchmark_on, MazeParams};
use maze_grover::{
    search_table, walk, Error, FitnessTable, IterationMode, Maze, Path, RoomCoord, SearchConfig,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qmaze", version, about = "Perfect mazes solved by iterative Grover threshold search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a perfect maze and write it in the text format.
    Gen(GenArgs),
    /// Search for the best path with the threshold Grover search.
    Solve(SolveArgs),
    /// Run the classical checks on a maze and its fitness table.
    Verify(VerifyArgs),
    /// Repeat the search over many seeds and report success and cost.
    Bench(BenchArgs),
    /// Draw a maze as ASCII art.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Where the maze comes from: a file, or a fresh `--size`/`--seed`.
#[derive(Debug, Args)]
struct MazeSource {
    #[arg(short, long, conflicts_with = "size")]
    input: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    size: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Endpoints {
    /// Start room `row,col`; defaults to the top-left room.
    #[arg(long)]
    start: Option<RoomCoord>,
    /// End room `row,col`; defaults to the bottom-right room.
    #[arg(long)]
    end: Option<RoomCoord>,
    /// Individual length; defaults to twice the Manhattan distance.
    #[arg(short = 'n', long)]
    length: Option<usize>,
    /// Largest individual length allowed.
    #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
    max_length: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Known,
    Unknown,
}

impl From<Mode> for IterationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Known => IterationMode::KnownCount,
            Mode::Unknown => IterationMode::UnknownCount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Mode::Known)]
    mode: Mode,
    /// Round budget; defaults to the fitness bit width.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rounds: Option<u64>,
    /// Maximum Grover applications per round; defaults to ceil(sqrt(N)).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    grover_cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Keep running all rounds even once no path lies above the cutoff.
    #[arg(long)]
    no_certificate: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    maze: MazeSource,
    #[command(flatten)]
    ends: Endpoints,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    maze: MazeSource,
    #[command(flatten)]
    ends: Endpoints,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ends: Endpoints,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Overlay {
    None,
    Bfs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    maze: MazeSource,
    #[arg(long)]
    start: Option<RoomCoord>,
    #[arg(long)]
    end: Option<RoomCoord>,
    /// Overlay the shortest path.
    #[arg(long, value_enum, default_value_t = Overlay::None)]
    overlay: Overlay,
    /// Overlay an explicit direction string instead, e.g. `EESS`.
    #[arg(long, conflicts_with = "overlay")]
    path: Option<Path>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Check(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Check(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::TableFormat(_) => Failure::Io(e.to_string()),
            Error::AsymmetricDoor { .. } | Error::DoorOffGrid { .. } | Error::InvalidDoorMask { .. } => {
                Failure::Check(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Render(a) => cmd_render(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let maze = Maze::generate(args.size as usize, args.seed)?;
    let text = maze.to_text();
    match &args.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            println!(
                "wrote {}x{} maze (seed {}, {} open doors) to {}",
                maze.size(),
                maze.size(),
                maze.seed(),
                maze.open_door_count(),
                path.display()
            );
        }
        None => {
            print!("{text}");
            eprintln!(
                "{}x{} maze, seed {}, {} open doors",
                maze.size(),
                maze.size(),
                maze.seed(),
                maze.open_door_count()
            );
        }
    }
    Ok(())
}

fn load_maze(src: &MazeSource) -> Result<Maze, Failure> {
    match (&src.input, src.size) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(Maze::from_text(&text)?)
        }
        (None, Some(size)) => Ok(Maze::generate(size as usize, src.seed)?),
        (None, None) => Err(Failure::Usage("either --input or --size is required".into())),
    }
}

struct Resolved {
    start: RoomCoord,
    end: RoomCoord,
    len: usize,
    cap: usize,
}

fn resolve_endpoints(maze: &Maze, ends: &Endpoints) -> Result<Resolved, Failure> {
    let last = maze.size() - 1;
    let start = ends.start.unwrap_or(RoomCoord::new(0, 0));
    let end = ends.end.unwrap_or(RoomCoord::new(last, last));
    maze.check_room(start)?;
    maze.check_room(end)?;
    let len = ends.length.unwrap_or_else(|| path_length(start, end));
    if len > ends.max_length {
        return Err(Failure::Usage(format!(
            "path length {len} exceeds the cap of {}; the register would hold 4^{len} states. \
             Pass --max-length {len} to allow it.",
            ends.max_length
        )));
    }
    Ok(Resolved {
        start,
        end,
        len,
        cap: ends.max_length,
    })
}

fn search_config(table: &FitnessTable, args: &SearchArgs, cap: usize) -> SearchConfig {
    let mut config = SearchConfig::for_table(table, args.mode.into(), args.rng_seed);
    if let Some(r) = args.rounds {
        config.max_rounds = r as usize;
    }
    if let Some(g) = args.grover_cap {
        config.grover_cap = g as usize;
    }
    config.certify = !args.no_certificate;
    config.length_cap = cap;
    config
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    maze_size: usize,
    maze_seed: u64,
    start: RoomCoord,
    end: RoomCoord,
    length: usize,
    #[serde(rename = "N")]
    state_count: usize,
    d_max: u32,
    best_path: String,
    final_room: RoomCoord,
    reached_end: bool,
    result: &'a maze_grover::SearchResult,
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let maze = load_maze(&args.maze)?;
    let ends = resolve_endpoints(&maze, &args.ends)?;
    let table = FitnessTable::build_with_cap(&maze, ends.start, ends.end, ends.len, ends.cap)?;
    let config = search_config(&table, &args.search, ends.cap);
    let result = search_table(&table, &config)?;
    let best_path = result.best_index.to_path();
    let replay = walk(&maze, ends.start, ends.end, best_path.steps())?;

    if args.format == Format::Json {
        return print_json(&SolveOutput {
            maze_size: maze.size(),
            maze_seed: maze.seed(),
            start: ends.start,
            end: ends.end,
            length: ends.len,
            state_count: table.state_count(),
            d_max: table.d_max().get(),
            best_path: best_path.to_string(),
            final_room: replay.final_room,
            reached_end: replay.reached_end,
            result: &result,
        });
    }

    println!(
        "maze {0}x{0} seed {1}, start {2}, end {3}, length {4}, N = {5}",
        maze.size(),
        maze.seed(),
        ends.start,
        ends.end,
        ends.len,
        table.state_count()
    );
    println!("initial cutoff {}", result.initial_cutoff);
    for r in &result.history {
        println!(
            "round {:>3}: cutoff {:>4}  marked {:>8}  r {:>5}  p {:.4}  measured {} (fitness {}){}",
            r.round,
            r.cutoff_before,
            r.marked,
            r.grover_r,
            r.marked_probability,
            r.measured_index,
            r.measured_fitness,
            if r.accepted { "  accepted" } else { "" }
        );
    }
    println!("best path:    {}", if best_path.is_empty() { "-".to_string() } else { best_path.to_string() });
    println!("best fitness: {} / {}", result.best_fitness, table.d_max());
    println!("final room:   {}{}", replay.final_room, if replay.reached_end { " (end reached)" } else { "" });
    println!("oracle calls: {}", result.oracle_calls_total);
    println!("optimal:      {}", result.optimal);
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    perfect: bool,
    open_doors: usize,
    bfs_distance: usize,
    bfs_path: String,
    length: usize,
    d_max: u32,
    exhaustive_max: u32,
    exhaustive_max_path: String,
    consistency: maze_grover::verify::Consistency,
    passed: bool,
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let maze = load_maze(&args.maze)?;
    let perfect = maze.validate_perfect();
    if !perfect {
        let msg = format!(
            "maze is not perfect ({} open doors, expected {})",
            maze.open_door_count(),
            maze.size() * maze.size() - 1
        );
        if args.format == Format::Json {
            print_json(&serde_json::json!({ "perfect": false, "passed": false }))?;
        } else {
            println!("perfect maze:      FAIL");
        }
        return Err(Failure::Check(msg));
    }
    let ends = resolve_endpoints(&maze, &args.ends)?;
    let bfs = bfs_shortest_path(&maze, ends.start, ends.end)?;
    let table = FitnessTable::build_with_cap(&maze, ends.start, ends.end, ends.len, ends.cap)?;
    let (max_index, max_value) = exhaustive_max(&table);
    let consistency = bfs_consistency_check(&maze, ends.start, ends.end, ends.len, &table)?;
    let passed = consistency.passed() && max_value == table.max_fitness();
    let bfs_path = Path::new(bfs.path.clone()).to_string();

    if args.format == Format::Json {
        print_json(&VerifyReport {
            perfect,
            open_doors: maze.open_door_count(),
            bfs_distance: bfs.distance,
            bfs_path,
            length: ends.len,
            d_max: table.d_max().get(),
            exhaustive_max: max_value.get(),
            exhaustive_max_path: max_index.to_path().to_string(),
            consistency: consistency.clone(),
            passed,
        })?;
    } else {
        println!("perfect maze:      ok ({} open doors)", maze.open_door_count());
        println!("shortest path:     {} steps {}", bfs.distance, bfs_path);
        println!(
            "exhaustive max:    {} / {} at {} (length {})",
            max_value,
            table.d_max(),
            max_index,
            ends.len
        );
        let status = match &consistency {
            maze_grover::verify::Consistency::Holds { index } => format!("ok (padded path {index})"),
            maze_grover::verify::Consistency::NotApplicable { bfs_distance, len } => {
                format!("not applicable (shortest path {bfs_distance} > length {len})")
            }
            maze_grover::verify::Consistency::Violated { index, fitness } => {
                format!("FAIL ({index} scores {fitness})")
            }
        };
        println!("bfs consistency:   {status}");
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let maze = Maze::generate(args.size as usize, args.seed)?;
    let ends = resolve_endpoints(&maze, &args.ends)?;
    let table = FitnessTable::build_with_cap(&maze, ends.start, ends.end, ends.len, ends.cap)?;
    let config = search_config(&table, &args.search, ends.cap);
    let params = MazeParams {
        size: maze.size(),
        seed: maze.seed(),
        start: ends.start,
        end: ends.end,
        len: ends.len,
    };
    let report = run_benchmark_on(&params, &table, &config, args.trials as usize)?;
    if args.format == Format::Json {
        return print_json(&report);
    }
    println!(
        "maze {0}x{0} seed {1}, length {2}, N = {3}, {4} trials, mode {5:?}",
        params.size, params.seed, params.len, report.state_count, report.trials, config.mode
    );
    println!("exhaustive max:    {}", report.exhaustive_max);
    println!("success rate:      {:.3}", report.success_rate);
    println!("mean rounds:       {:.3}", report.mean_rounds);
    println!("mean oracle calls: {:.3}", report.mean_oracle_calls);
    println!("calls / sqrt(N):   {:.4}", report.sqrt_n_constant);
    println!("fitness width:     {} bits (D_max {})", fitness_width(params.size), max_fitness(params.size));
    Ok(())
}

fn cmd_render(args: RenderArgs) -> CmdResult {
    let maze = load_maze(&args.maze)?;
    let last = maze.size() - 1;
    let start = args.start.unwrap_or(RoomCoord::new(0, 0));
    let end = args.end.unwrap_or(RoomCoord::new(last, last));
    maze.check_room(start)?;
    maze.check_room(end)?;
    let rooms = match (&args.path, args.overlay) {
        (Some(path), _) => {
            let result = walk(&maze, start, end, path.steps())?;
            let mut rooms = vec![start];
            let mut cur = start;
            for &d in &path.steps()[..result.steps_taken] {
                cur = cur.step(d, maze.size()).expect("walk stays on grid");
                rooms.push(cur);
            }
            rooms
        }
        (None, Overlay::Bfs) => bfs_shortest_path(&maze, start, end)?.rooms(&maze, start),
        (None, Overlay::None) => Vec::new(),
    };
    print!("{}", render::render(&maze, &rooms));
    Ok(())
}
