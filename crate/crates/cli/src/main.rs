//! `qsvm`: data preparation, single-cell training, grid runs, raw QUBO solving
//! and plotting.

mod fetch;
mod grid_spec;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qubosvm::data::{default_data_dir, DATASET_NAMES, DATA_DIR_ENV};
use qubosvm::qubo::{read_qubo, write_qubo};
use qubosvm::{
    brute_force_solve, build_qubo, emit_plot, emit_results, load_dataset, make_encoding, multistart_best,
    read_results, run_grid, train_with_stats, GridConfig, QuboSolver, SmoConfig, TabuConfig, TrainConfig,
};

#[derive(Parser)]
#[command(name = "qsvm", version, about = "Linear SVMs trained through k-bit QUBO encodings")]
struct Cli {
    /// Data directory [default: $QSVM_DATA_DIR, then the bundled data/]
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Download data files listed in the manifest and check their digests
    Fetch {
        /// Only this data set
        #[arg(long)]
        dataset: Option<String>,
        /// Download even when a verified copy exists
        #[arg(long)]
        force: bool,
    },
    /// Load and prepare a data set, printing a summary
    Prepare {
        dataset: String,
        /// Also write the prepared rows as CSV (features, then the ±1 label)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train one QUBO-SVM on a whole data set
    Train(TrainArgs),
    /// Cross-validated grid over C and k with the SMO baseline
    Grid(GridArgs),
    /// Minimise a QUBO read from a text file
    Solve {
        file: PathBuf,
        /// Exhaustive search instead of tabu search
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Render accuracy curves from a results CSV
    Plot {
        results: PathBuf,
        /// Output SVG [default: the CSV path with an .svg extension]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Budget {
    /// Tabu restarts per run
    #[arg(long)]
    restarts: Option<usize>,
    /// Tabu iterations per restart
    #[arg(long)]
    iterations: Option<usize>,
    /// Independent tabu runs; the best is kept
    #[arg(long)]
    runs: Option<usize>,
    /// Wall-clock limit per run, in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Budget {
    fn tabu(&self, base: TabuConfig) -> TabuConfig {
        TabuConfig {
            restarts: self.restarts.unwrap_or(base.restarts),
            iterations_per_restart: self.iterations.or(base.iterations_per_restart),
            time_limit: self.time_limit.or(base.time_limit),
            rng_seed: self.seed,
            ..base
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: String,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 32)]
    max_doublings: u32,
    /// Exhaustive QUBO search (tiny data sets only)
    #[arg(long)]
    exact: bool,
    /// Write the QUBO at the accepted λ to this file
    #[arg(long)]
    dump_qubo: Option<PathBuf>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct GridArgs {
    /// Data set names, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    dataset: Vec<String>,
    /// C values: numbers, `2^e`, or ranges `2^a..2^b`, comma-separated
    #[arg(long, default_value = "2^-6..2^4", allow_hyphen_values = true)]
    c_grid: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k_grid: Vec<u32>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "results/results.csv")]
    out: PathBuf,
    /// SMO stopping tolerance
    #[arg(long)]
    smo_tol: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    /// Skip the SMO baseline
    #[arg(long)]
    no_baseline: bool,
    /// Also write the accuracy plot next to the CSV
    #[arg(long)]
    plot: bool,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Lib(qubosvm::Error),
}

impl From<qubosvm::Error> for Failure {
    fn from(e: qubosvm::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        use qubosvm::Error as E;
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Lib(E::ConstraintUnsatisfied { .. }) => 3,
            Failure::Lib(e) if e.is_io() || matches!(e, E::Checksum { .. }) => 2,
            Failure::Lib(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialise"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let dir = cli.data_dir.clone().unwrap_or_else(default_data_dir);
    let outcome = match cli.command {
        Command::Fetch { dataset, force } => fetch::run(&dir, dataset.as_deref(), force),
        Command::Prepare { dataset, out } => prepare(&dir, &dataset, out.as_deref()),
        Command::Train(args) => train(&dir, &args),
        Command::Grid(args) => grid(&dir, &args),
        Command::Solve { file, exact, budget } => solve(&file, exact, &budget),
        Command::Plot { results, out } => plot(&results, out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(&e, Failure::Lib(qubosvm::Error::Io { .. }) | Failure::Io(_)) {
                eprintln!("(data directory: {}; override with --data-dir or {DATA_DIR_ENV})", dir.display());
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn check_dataset(name: &str) -> CliResult {
    if DATASET_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "unknown data set `{name}` (expected one of {})",
            DATASET_NAMES.join(", ")
        )))
    }
}

fn prepare(dir: &Path, name: &str, out: Option<&Path>) -> CliResult {
    check_dataset(name)?;
    let ds = load_dataset(name, dir)?;
    let (pos, neg) = ds.class_counts();
    if let Some(path) = out {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        for (row, y) in ds.rows().zip(ds.labels()) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{},{y}", cells.join(",")).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    print_json(&json!({
        "dataset": ds.name(),
        "n": ds.n(),
        "d": ds.d(),
        "positive": pos,
        "negative": neg,
        "provenance": ds.provenance(),
    }));
    Ok(())
}

fn train(dir: &Path, args: &TrainArgs) -> CliResult {
    check_dataset(&args.dataset)?;
    let ds = load_dataset(&args.dataset, dir)?;
    let enc = make_encoding(args.k, args.c)?;
    let solver = if args.exact {
        QuboSolver::Exact
    } else {
        QuboSolver::Tabu {
            config: args.budget.tabu(TabuConfig::default()),
            runs: args.budget.runs.unwrap_or(1),
        }
    };
    let cfg = TrainConfig {
        solver,
        lambda0: args.lambda0,
        max_doublings: args.max_doublings,
    };
    let result = train_with_stats(&ds, &enc, &cfg);
    if let Some(path) = &args.dump_qubo {
        let lambda = match &result {
            Ok((m, _)) => m.lambda_used.unwrap_or(args.lambda0),
            Err(qubosvm::Error::ConstraintUnsatisfied { lambda, .. }) => *lambda,
            Err(_) => args.lambda0,
        };
        let problem = build_qubo(&ds, &enc, lambda)?;
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        write_qubo(&problem.qubo, &mut w).map_err(|e| io_err(path, e))?;
        w.flush().map_err(|e| io_err(path, e))?;
    }
    let (model, stats) = result?;
    let accuracy = if model.degenerate { None } else { Some(model.accuracy(&ds)?) };
    print_json(&json!({
        "dataset": ds.name(),
        "c": args.c,
        "k": args.k,
        "lambda_used": model.lambda_used,
        "attempts": stats.attempts,
        "evaluations": stats.evaluations,
        "final_energy": stats.final_energy,
        "degenerate": model.degenerate,
        "support_vectors": model.support_mask.iter().filter(|&&s| s).count(),
        "training_accuracy": accuracy,
        "w": model.w,
        "b": model.b,
    }));
    Ok(())
}

fn grid(dir: &Path, args: &GridArgs) -> CliResult {
    for name in &args.dataset {
        check_dataset(name)?;
    }
    let base = GridConfig::default();
    let cfg = GridConfig {
        c_values: grid_spec::parse_c_grid(&args.c_grid).map_err(Failure::Usage)?,
        k_values: args.k_grid.clone(),
        n_folds: args.folds,
        seed: args.seed,
        solver: TabuConfig {
            restarts: args.restarts.unwrap_or(base.solver.restarts),
            iterations_per_restart: args.iterations.or(base.solver.iterations_per_restart),
            ..base.solver.clone()
        },
        runs: args.runs.unwrap_or(base.runs),
        lambda0: args.lambda0.unwrap_or(base.lambda0),
        smo: SmoConfig {
            tolerance: args.smo_tol.unwrap_or(base.smo.tolerance),
            ..base.smo.clone()
        },
        include_baseline: !args.no_baseline,
        ..base
    };
    let mut records = Vec::new();
    for name in &args.dataset {
        let ds = load_dataset(name, dir)?;
        eprintln!("{name}: {} x {}, running grid", ds.n(), ds.d());
        records.extend(run_grid(&ds, &cfg)?);
    }
    emit_results(&records, &args.out, Some(&cfg))?;
    let mut summary = json!({ "records": records.len(), "csv": args.out });
    if args.plot {
        let files = emit_plot(&records, &args.out.with_extension("svg"))?;
        summary["plots"] = json!(files);
    }
    print_json(&summary);
    Ok(())
}

fn solve(file: &Path, exact: bool, budget: &Budget) -> CliResult {
    let f = File::open(file).map_err(|e| io_err(file, e))?;
    let q = read_qubo(BufReader::new(f))?;
    let report = if exact {
        brute_force_solve(&q)?
    } else {
        multistart_best(&q, &budget.tabu(TabuConfig::default()), budget.runs.unwrap_or(1))?
    };
    print_json(&json!({
        "n": q.n(),
        "solver": if exact { "exact" } else { "tabu" },
        "best_energy": report.best_energy,
        "best_assignment": report.best_assignment.to_string(),
        "evaluations": report.evaluations,
        "restarts_used": report.restarts_used,
        "truncated": report.truncated,
        "wall_time": report.wall_time,
    }));
    Ok(())
}

fn plot(results: &Path, out: Option<PathBuf>) -> CliResult {
    let records = read_results(results)?;
    let out = out.unwrap_or_else(|| results.with_extension("svg"));
    let files = emit_plot(&records, &out)?;
    print_json(&json!({ "plots": files }));
    Ok(())
}
