//! Command-line driver: mesh/field generation, vector-potential solves,
//! spanning tree technique runs, and benchmark sweeps.
//!
//! Exit codes: 0 success, 1 internal/IO/usage, 2 precondition violated
//! (non-solenoidal input), 3 STT stall.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use vecpot::algebra::{Cochain, Id, Scalar};
use vecpot::complex::CellComplex;
use vecpot::generators::{cube_grid, furch_ball, GridSpec, KnotPath};
use vecpot::io::{self, Report};
use vecpot::matching::{
    bfs_tree, greedy_matching, is_complete, stt_run, tree_from_edges, tree_from_matching,
    Selection, SttOutcome,
};
use vecpot::solver::{solve_vector_potential, BasisLedger, SolveOptions, SolverError};

const EXIT_PRECONDITION: u8 = 2;
const EXIT_STALL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vecpot",
    about = "Exact discrete vector potentials via acyclic matchings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh (and optionally a solenoidal field) and validate it.
    Gen(GenArgs),
    /// Solve C h = i and write the potential plus a run report.
    Solve(SolveArgs),
    /// Run the spanning tree technique on a mesh and field.
    Stt(SttArgs),
    /// Sweep grid sizes and emit a CSV of timings and recursion stats.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Cube grid with n cells per axis (6 n^3 Kuhn tetrahedra).
    #[arg(long, value_name = "N", conflicts_with = "furch")]
    grid: Option<usize>,
    /// Furch ball: grid size with a blind knotted tunnel removed.
    #[arg(long, value_name = "N", requires = "knot")]
    furch: Option<usize>,
    /// Tunnel for --furch: trefoil-1, trefoil-K, straight, or file:PATH.
    #[arg(long, value_name = "NAME")]
    knot: Option<String>,
    /// Output mesh file.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write a seeded solenoidal field next to the mesh.
    #[arg(long, value_name = "PATH")]
    field_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Integer magnitude bound for the generating edge cochain.
    #[arg(long, default_value_t = 10)]
    magnitude: i64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_name = "PATH")]
    mesh: PathBuf,
    /// Face cochain file with D i = 0.
    #[arg(long, value_name = "PATH")]
    field: PathBuf,
    /// Output edge cochain file for h.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for the greedy selection order (omit for ascending ids).
    #[arg(long)]
    seed: Option<u64>,
    /// Re-check boundary-of-boundary after every collapse.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct SttArgs {
    #[arg(long, value_name = "PATH")]
    mesh: PathBuf,
    #[arg(long, value_name = "PATH")]
    field: PathBuf,
    /// Spanning tree choice: bfs, file:PATH, or from-matching.
    #[arg(long, default_value = "bfs")]
    tree: String,
    /// BFS root vertex.
    #[arg(long, default_value_t = 0)]
    root: u32,
    /// Output edge cochain file for h on termination.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Dump the matching extracted from a terminating run.
    #[arg(long, value_name = "PATH")]
    matching_out: Option<PathBuf>,
    /// Idle sweeps over the face list before declaring a stall.
    #[arg(long, default_value_t = 1)]
    max_idle_sweeps: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid sizes to sweep, e.g. --grid 4,8,16.
    #[arg(long, value_name = "N,N,...", value_delimiter = ',')]
    grid: Vec<usize>,
    /// Seeded solves per size; the CSV reports the median wall time.
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    magnitude: i64,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2; keep 2 reserved for precondition failures
            eprint!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Stt(args) => cmd_stt(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn parse_knot(name: &str, n: usize) -> Result<KnotPath, String> {
    if let Some(path) = name.strip_prefix("file:") {
        let cells = io::read_knot_path(std::path::Path::new(path)).map_err(|e| e.to_string())?;
        return Ok(KnotPath::new(cells));
    }
    if name == "straight" {
        return KnotPath::straight(n).map_err(|e| e.to_string());
    }
    if let Some(k) = name.strip_prefix("trefoil-") {
        let k: usize = k.parse().map_err(|_| format!("bad knot name `{name}`"))?;
        return KnotPath::trefoil_chain(n, k).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown knot `{name}` (expected trefoil-K, straight, or file:PATH)"
    ))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let complex = match (args.grid, args.furch) {
        (Some(n), None) => cube_grid(&GridSpec { n }).map_err(|e| e.to_string())?,
        (None, Some(n)) => {
            let knot = args.knot.as_deref().expect("clap enforces --knot");
            furch_ball(n, &parse_knot(knot, n)?).map_err(|e| e.to_string())?
        }
        _ => return Err("exactly one of --grid or --furch is required".into()),
    };
    io::write_mesh(&complex, &args.out).map_err(|e| e.to_string())?;
    if let Some(field_path) = &args.field_out {
        let field = vecpot::random_solenoidal_field(&complex, args.seed, args.magnitude);
        io::write_cochain(&field, field_path).map_err(|e| e.to_string())?;
    }
    let report = Report {
        validation: complex.validate(),
        trace: None,
        residual_zero: None,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    print!("{}", report.to_json());
    Ok(ExitCode::SUCCESS)
}

/// Recomputes C h - i on the canonical basis, straight off the mesh.
fn residual_is_zero(complex: &CellComplex, h: &Cochain, field: &Cochain) -> bool {
    (0..complex.count(2) as Id).all(|f| {
        let mut acc = Scalar::zero();
        for &(e, s) in complex.boundary(2, f) {
            let v = h.get(e).expect("canonical edge domain");
            if !v.is_zero() {
                acc += &(&Scalar::from_int(s as i64) * v);
            }
        }
        Some(&acc) == field.get(f)
    })
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let complex = io::read_mesh(&args.mesh).map_err(|e| e.to_string())?;
    let field = io::read_cochain(&args.field, &complex, 2).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        selection: args.seed.map_or(Selection::Ascending, Selection::Seeded),
        check_collapses: args.check,
    };
    let (h, trace) = match solve_vector_potential(&complex, &field, &opts) {
        Ok(out) => out,
        Err(SolverError::NotSolenoidal) => {
            eprintln!("error: {}", SolverError::NotSolenoidal);
            return Ok(ExitCode::from(EXIT_PRECONDITION));
        }
        Err(e) => return Err(e.to_string()),
    };
    // independent exactness check; success is refused unless it holds
    if !residual_is_zero(&complex, &h, &field) {
        return Err("residual C h - i is not exactly zero".into());
    }
    if let Some(out) = &args.out {
        io::write_cochain(&h, out).map_err(|e| e.to_string())?;
    }
    let report = Report {
        validation: complex.validate(),
        trace: Some(trace),
        residual_zero: Some(true),
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    print!("{}", report.to_json());
    Ok(ExitCode::SUCCESS)
}

fn cmd_stt(args: SttArgs) -> Result<ExitCode, String> {
    let complex = io::read_mesh(&args.mesh).map_err(|e| e.to_string())?;
    let field = io::read_cochain(&args.field, &complex, 2).map_err(|e| e.to_string())?;
    let tree = match args.tree.as_str() {
        "bfs" => bfs_tree(&complex, args.root).map_err(|e| e.to_string())?,
        "from-matching" => {
            // greedy matching of 1-chains on the canonical basis; its
            // critical edges form the tree when the matching is complete
            let mut ledger = BasisLedger::from_complex(&complex);
            greedy_matching(&mut ledger, 2, Selection::Ascending);
            let m1 = greedy_matching(&mut ledger, 1, Selection::Ascending);
            if !is_complete(&m1, &complex) {
                return Err(format!(
                    "greedy matching is not complete ({} pairs); no tree to extract",
                    m1.len()
                ));
            }
            tree_from_matching(&m1, &complex).map_err(|e| e.to_string())?
        }
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let edges = io::read_tree_edges(std::path::Path::new(path), &complex)
                    .map_err(|e| e.to_string())?;
                tree_from_edges(&complex, &edges.into_iter().collect(), args.root)
                    .map_err(|e| e.to_string())?
            }
            None => return Err(format!("unknown tree choice `{other}`")),
        },
    };
    let started = Instant::now();
    match stt_run(&complex, &tree, &field, args.max_idle_sweeps).map_err(|e| e.to_string())? {
        SttOutcome::Terminated { h, matching } => {
            if !residual_is_zero(&complex, &h, &field) {
                return Err("STT terminated but the residual is not zero".into());
            }
            if let Some(out) = &args.out {
                io::write_cochain(&h, out).map_err(|e| e.to_string())?;
            }
            if let Some(out) = &args.matching_out {
                io::write_matching(&matching, out).map_err(|e| e.to_string())?;
            }
            println!(
                "terminated: {} pairs used, residual exactly zero, {:.3} ms",
                matching.len(),
                started.elapsed().as_secs_f64() * 1e3
            );
            Ok(ExitCode::SUCCESS)
        }
        SttOutcome::Stalled { unresolved } => {
            println!("stalled: {} unresolved faces", unresolved.len());
            Ok(ExitCode::from(EXIT_STALL))
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    if args.grid.is_empty() {
        return Err("empty sweep: pass --grid N,N,...".into());
    }
    if args.runs == 0 {
        return Err("--runs must be at least 1".into());
    }
    let mut csv = String::from("n,tets,runs,median_ms,ratio_vs_prev,max_depth,max_b2_level1\n");
    let mut prev_median: Option<f64> = None;
    for &n in &args.grid {
        let complex = cube_grid(&GridSpec { n }).map_err(|e| e.to_string())?;
        let mut times_ms: Vec<f64> = Vec::with_capacity(args.runs);
        let mut max_depth = 0usize;
        let mut max_b2 = 0usize;
        for run in 0..args.runs as u64 {
            let field = vecpot::random_solenoidal_field(&complex, args.seed + run, args.magnitude);
            let opts = SolveOptions {
                selection: Selection::Seeded(args.seed + run),
                check_collapses: false,
            };
            let started = Instant::now();
            let (h, trace) =
                solve_vector_potential(&complex, &field, &opts).map_err(|e| e.to_string())?;
            times_ms.push(started.elapsed().as_secs_f64() * 1e3);
            if !residual_is_zero(&complex, &h, &field) {
                return Err(format!("nonzero residual at n={n}"));
            }
            max_depth = max_depth.max(trace.depth());
            max_b2 = max_b2.max(trace.level1_face_basis().unwrap_or(0));
        }
        times_ms.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
        let median = times_ms[times_ms.len() / 2];
        let ratio = prev_median
            .map(|p| format!("{:.2}", median / p))
            .unwrap_or_default();
        prev_median = Some(median);
        csv.push_str(&format!(
            "{n},{},{},{median:.3},{ratio},{max_depth},{max_b2}\n",
            complex.count(3),
            args.runs
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| e.to_string())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
