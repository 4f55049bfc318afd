use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irreg_core::bench::{rows_to_csv, run_grid, BenchOptions, Grid};
use irreg_core::generate::{generate, Family, GraphFamilySpec};
use irreg_core::params::derive_params;
use irreg_core::report::{parse_weights, write_weights, Algorithm, SolveReport, WeightFileError};
use irreg_core::solve::{solve, SolveError, SolveOptions};
use irreg_core::weighting::{first_collision, vertex_weights, Irregularity};
use irreg_core::{load_edge_list, save_edge_list, Graph};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_PIPELINE: u8 = 3;
const EXIT_INFINITE: u8 = 4;
const EXIT_INVALID: u8 = 5;

#[derive(Parser)]
#[command(name = "irreg", version, about = "Irregular edge weightings of graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph and write it as an edge list
    Gen(GenArgs),
    /// Find an irregular weighting
    Solve(SolveArgs),
    /// Check a weighting file against a graph
    Verify(VerifyArgs),
    /// Sweep a parameter grid over random regular graphs
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Circulant offsets, comma separated
    #[arg(long, value_delimiter = ',')]
    connections: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "auto")]
    algo: Algorithm,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.04)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Keep going with the last partition when the resampling budget runs out
    #[arg(long)]
    best_effort_partition: bool,
    /// Largest k the exact search tries
    #[arg(long, default_value_t = 64)]
    k_max: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    weights_out: Option<PathBuf>,
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "paper")]
    algo: Algorithm,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long)]
    no_timings: bool,
}

/// An exit code with a message for stderr.
struct Exit(u8, String);

type CmdResult = Result<(), Exit>;

fn input_err(msg: impl std::fmt::Display) -> Exit {
    Exit(EXIT_INPUT, msg.to_string())
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, Exit> {
    load_edge_list(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let family: Family = a.family.parse().map_err(input_err)?;
    let spec = GraphFamilySpec {
        family,
        n: a.n,
        d: a.d,
        connections: a.connections,
        seed: a.seed,
    };
    let g = generate(&spec).map_err(input_err)?;
    write_or_print(a.out.as_deref(), &save_edge_list(&g))
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let g = load_graph(&a.input)?;
    let opts = SolveOptions {
        algorithm: a.algo,
        epsilon: a.eps,
        gamma: a.gamma,
        seed: a.seed,
        budget: a.budget,
        best_effort_partition: a.best_effort_partition,
        exact_k_max: a.k_max,
        timings: !a.no_timings,
        ..Default::default()
    };
    let out = solve(&g, &opts);
    match &a.report {
        Some(p) => write_or_print(Some(p), &out.report.to_json())?,
        None => eprint!("{}", out.report.to_json()),
    }
    if let Some(err) = out.error {
        let code = match err {
            SolveError::InfiniteStrength => EXIT_INFINITE,
            _ => EXIT_PIPELINE,
        };
        return Err(Exit(code, err.to_string()));
    }
    let w = out
        .weighting
        .expect("a weighting exists when no error is reported");
    write_or_print(a.weights_out.as_deref(), &write_weights(&g, &w))?;
    if !out.report.valid {
        return Err(Exit(
            EXIT_INVALID,
            "produced weighting is not irregular".into(),
        ));
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let g = load_graph(&a.input)?;
    let w = match parse_weights(&g, &read(&a.weights)?) {
        Ok(w) => w,
        Err(e @ WeightFileError::Malformed { .. }) => return Err(input_err(e)),
        Err(e) => return Err(Exit(EXIT_INVALID, e.to_string())),
    };
    let vw = vertex_weights(&g, w.weights()).expect("parsed weighting covers every edge");
    if let Irregularity::Collision { u, v, weight } = first_collision(&vw) {
        return Err(Exit(
            EXIT_INVALID,
            format!("collision: vertices {u} and {v} both weigh {weight}"),
        ));
    }
    if let Some(path) = &a.report {
        let report = SolveReport::from_json(&read(path)?)
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        if report.achieved_k != Some(w.k()) {
            return Err(Exit(
                EXIT_INVALID,
                format!(
                    "report claims k = {:?} but the weighting has k = {}",
                    report.achieved_k,
                    w.k()
                ),
            ));
        }
        let from_pipeline = matches!(report.algorithm, Algorithm::Paper | Algorithm::Auto)
            && report.stage_failure.is_none();
        if let (true, Some(d), Some(echo)) = (from_pipeline, report.d, &report.params) {
            let p = derive_params(report.n, d, echo.epsilon, echo.gamma).map_err(input_err)?;
            let bound = p.max_edge_weight();
            if w.k() > bound {
                return Err(Exit(
                    EXIT_INVALID,
                    format!("max weight {} exceeds the bound {bound}", w.k()),
                ));
            }
        }
    }
    println!("ok: {} vertices, {} edges, k = {}", g.n(), g.m(), w.k());
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let grid: Grid = a.grid.parse().map_err(input_err)?;
    let opts = BenchOptions {
        algorithm: a.algo,
        budget: a.budget,
        timings: !a.no_timings,
    };
    let csv = rows_to_csv(&run_grid(&grid, &opts)).map_err(input_err)?;
    write_or_print(a.out.as_deref(), &csv)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(Exit(code, msg)) => {
            eprintln!("irreg: {msg}");
            ExitCode::from(code)
        }
    }
}
