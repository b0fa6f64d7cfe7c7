use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use isoflow_bench::check::run_checks;
use isoflow_bench::grid::{default_setup, effective_sizes, run_cell};
use isoflow_bench::ic::load_coefficients;
use isoflow_bench::trajectory::CONVENTIONS_VERSION;
use isoflow_bench::{
    emit_csv, emit_markdown_table, load_config, markdown_table, read_csv, run_grid, write_trajectory,
    BenchConfig, ConfigOverrides, TrajectoryMetadata,
};

#[derive(Parser)]
#[command(name = "isoflow", version, about = "Isospectral flow integrator benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the benchmark grid and write results.csv and results.md.
    Bench(GridArgs),
    /// Integrate a single trajectory and print its diagnostics.
    Run(GridArgs),
    /// Run the structural verification suite.
    Check,
    /// Convert a results CSV into the markdown table.
    Report {
        csv: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// zeitlin, rigidbody or null.
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "dump-frames")]
    dump_frames: bool,
    #[arg(long)]
    ic: Option<PathBuf>,
}

impl GridArgs {
    fn load(self) -> Result<BenchConfig> {
        let overrides = ConfigOverrides {
            model: self.model,
            n_values: self.n,
            s_values: self.s,
            schemes: self.scheme,
            h: self.h,
            t_end: self.t_end,
            fp_tolerance: self.tol,
            fp_max_iters: self.max_iters,
            repetitions: self.reps,
            out_dir: self.out,
            dump_frames: self.dump_frames,
            ic_path: self.ic,
        };
        Ok(load_config(self.config.as_deref(), &overrides)?)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn bench(cfg: BenchConfig) -> Result<bool> {
    let records = run_grid(&cfg)?;
    create_dir(&cfg.out_dir)?;
    let csv = cfg.out_dir.join("results.csv");
    let md = cfg.out_dir.join("results.md");
    emit_csv(&records, &csv)?;
    emit_markdown_table(&records, &md)?;
    print!("{}", markdown_table(&records)?);
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    for r in records.iter().filter(|r| !r.is_ok()) {
        eprintln!("N={} s={} scheme {}: {}", r.n, r.s, r.scheme, r.status);
    }
    println!("wrote {} and {}", csv.display(), md.display());
    Ok(failed == 0)
}

fn run(cfg: BenchConfig) -> Result<bool> {
    let n = effective_sizes(&cfg)[0];
    let s = cfg.s_values[0];
    let scheme = cfg.schemes[0];
    let coefficients = load_coefficients(cfg.ic_path.as_deref())?;
    let factory = |kind, n| default_setup(kind, n, &coefficients);
    let outcome = run_cell(&cfg, &factory, n, s, scheme);
    let r = &outcome.record;
    println!("model {} N={} scheme {} s={} h={} steps={}", r.model, r.n, r.scheme, r.s, r.h, r.steps);
    if !r.is_ok() {
        eprintln!("{}", r.status);
        return Ok(false);
    }
    println!("median stepping time   {:.6} s", r.wall_time);
    println!("fixed-point iterations {:.2} mean, {} max", r.fp_iterations_mean, r.fp_iterations_max);
    println!("spectrum drift         {:.3e}", r.spectrum_drift);
    println!("tr(W^2) drift          {:.3e}", r.casimir2_drift);
    println!("tr(W^3) drift          {:.3e}", r.casimir3_drift);
    if let Some(h) = r.hamiltonian_relative_drift {
        println!("relative H drift       {h:.3e}");
    }
    if let Some(g) = r.group_residual_max {
        println!("max group residual     {g:.3e}");
    }
    if cfg.dump_frames {
        create_dir(&cfg.out_dir)?;
        let path = cfg
            .out_dir
            .join(format!("trajectory_{}_N{}_{}_s{}.isoflow", r.model, r.n, r.scheme, r.s));
        let metadata = TrajectoryMetadata {
            model: r.model.clone(),
            n: r.n,
            scheme: r.scheme.clone(),
            s: r.s,
            h: r.h,
            conventions: CONVENTIONS_VERSION.to_string(),
        };
        write_trajectory(&outcome.frames, &metadata, &path)?;
        println!("wrote {} frames to {}", outcome.frames.len(), path.display());
    }
    Ok(true)
}

fn check() -> Result<bool> {
    let outcomes = run_checks()?;
    for o in &outcomes {
        println!("{o}");
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn report(csv: &Path, out: Option<&Path>) -> Result<bool> {
    let records = read_csv(csv)?;
    match out {
        Some(path) => emit_markdown_table(&records, path)?,
        None => print!("{}", markdown_table(&records)?),
    }
    Ok(true)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let ok = match cli.command {
        Command::Bench(args) => bench(args.load()?)?,
        Command::Run(args) => run(args.load()?)?,
        Command::Check => check()?,
        Command::Report { csv, out } => report(&csv, out.as_deref())?,
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
