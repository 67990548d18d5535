use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernred::funcrep::io::{fmt17, format_step_csv, parse_index_spec, read_step_csv};
use kernred::kernelops::{apply_h, apply_r, KernelQuery};
use kernred::level::level_analysis;
use kernred::norms::{associate_norm_exact, down_norm_bruteforce_with, down_norm_sawyer, ri_norm, BruteForceOptions, NormSpec};
use kernred::rearrange::rearrangement;
use kernred::verify::json::{extended, to_json};
use kernred::verify::{chain_grid, estimate_reduction_constants, run_suite, run_suite_config, verify_chain, EnsembleSpec, SuiteConfig, DEFAULT_CONFIG};
use kernred::{Error, Grid, IndexFunction, Result, SampledFunction, StepFunction};
use serde::Serialize;

mod plot;

#[derive(Parser)]
#[command(name = "kernred", version, about = "Rearrangements, kernel Hardy operators, level functions and down norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Non-increasing rearrangement f* of a step function.
    Rearrange {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// R_I^m f or H_I^m f sampled on a grid.
    Apply {
        #[command(flatten)]
        args: OperatorArgs,
        #[arg(long, value_enum, default_value = "r")]
        op: OpKind,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level function G_I^m f, its plateau decomposition and plot data.
    Level {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Curve TSV (t, f*, R f*, G f); the interval TSV goes next to it.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// ‖f‖ in L^p, or in the associate space with --associate.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: NormSpec,
        #[arg(long)]
        associate: bool,
    },
    /// Down-associate norm of f for X = L^p.
    Downnorm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: NormSpec,
        #[arg(long, value_enum, default_value = "sawyer")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Norm chain ‖R f*‖_{X'_d} ≤ ‖R f*‖_{X'} ≤ ‖G f‖_{X'} ≤ 2^{m+1}‖R f*‖_{X'_d}.
    Chain {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
        #[arg(long, default_value_t = 4096)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical constants C and C' of H_I^m: X → Y over a seeded ensemble.
    Constants {
        #[arg(long)]
        index: String,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        x: NormSpec,
        #[arg(long)]
        y: NormSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 5e-3)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full verification suite; without a config the shipped default runs.
    Suite {
        #[arg(long, env = "KERNRED_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OperatorArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// `power:c=<c>,alpha=<alpha>` or `step:<csv path>`.
    #[arg(long)]
    index: String,
    #[arg(long)]
    m: u32,
}

impl OperatorArgs {
    fn load(&self) -> Result<(StepFunction, IndexFunction, KernelQuery)> {
        let f = read_step_csv(&self.input)?;
        let idx = parse_index_spec(&self.index)?;
        let q = KernelQuery::new(idx.clone(), self.m)?;
        Ok((f, idx, q))
    }
}

/// Log grid; the range defaults to [s·1e-3, s·1e3] with s the support end of f*.
#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 241)]
    points: usize,
}

impl GridArgs {
    fn build(&self, f: &StepFunction, extra: &[f64]) -> Result<Grid> {
        let s = if f.is_zero() { 1.0 } else { f.support_end() };
        let (lo, hi) = (self.t_min.unwrap_or(s * 1e-3), self.t_max.unwrap_or(s * 1e3));
        let inside: Vec<f64> = extra.iter().copied().filter(|&x| x > lo && x < hi).collect();
        Ok(Grid::log(lo, hi, self.points)?.merged(&inside))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    R,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sawyer,
    Brute,
}

/// Exit status 1 when a check fails.
enum Outcome {
    Pass,
    Fail,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sampled_tsv(s: &SampledFunction) -> String {
    let mut out = String::from("t\tvalue\n");
    for (t, v) in s.grid().points().iter().zip(s.values()) {
        out.push_str(&format!("{}\t{}\n", fmt17(*t), fmt17(*v)));
    }
    out
}

#[derive(Serialize)]
struct DownNormOut {
    p: String,
    method: &'static str,
    #[serde(serialize_with = "extended")]
    value: f64,
    source: Option<String>,
    #[serde(serialize_with = "extended")]
    discrete_optimum: f64,
    #[serde(serialize_with = "extended")]
    stationarity: f64,
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Rearrange { input, out } => {
            let f = read_step_csv(&input)?;
            emit(out.as_deref(), &format_step_csv(&rearrangement(&f)))?;
        }
        Command::Apply { args, op, grid, out } => {
            let (f, idx, q) = args.load()?;
            let mut extra = f.breakpoints().to_vec();
            extra.extend(idx.jumps());
            let grid = grid.build(&f, &extra)?;
            let s = match op {
                OpKind::R => apply_r(&q, &f, &grid)?,
                OpKind::H => apply_h(&q, &f, &grid)?,
            };
            if let Some(why) = s.diagnostic() {
                eprintln!("divergent: {why}");
                return Ok(Outcome::Fail);
            }
            emit(out.as_deref(), &sampled_tsv(&s))?;
        }
        Command::Level { op, grid, plot } => {
            let (f, idx, q) = op.load()?;
            let fs = rearrangement(&f);
            let mut extra = fs.breakpoints().to_vec();
            extra.extend(idx.jumps());
            let grid = grid.build(&fs, &extra)?;
            let a = level_analysis(&q, &f, &grid)?;
            if a.is_divergent() {
                eprintln!("divergent: {}", a.r.diagnostic().unwrap_or("R f* is infinite"));
                return Ok(Outcome::Fail);
            }
            match plot {
                Some(path) => {
                    let companion = plot::emit_plot_data(&a.fstar, &a.r, &a.g, &a.decomposition, &path)?;
                    println!("{}\n{}", path.display(), companion.display());
                }
                None => print!("{}", a.decomposition.to_tsv()),
            }
        }
        Command::Norm { input, p, associate } => {
            let f = read_step_csv(&input)?;
            let v = if associate { associate_norm_exact(p, &f) } else { ri_norm(p, &f) };
            println!("{}", fmt17(v));
        }
        Command::Downnorm { input, p, method, seed, restarts, grid } => {
            let f = read_step_csv(&input)?;
            let res = match method {
                Method::Sawyer => {
                    let v = down_norm_sawyer(p.exponent(), &f);
                    DownNormOut { p: p.to_string(), method: "sawyer", value: v, source: None, discrete_optimum: v, stationarity: 0.0 }
                }
                Method::Brute => {
                    let grid = grid.build(&f, f.breakpoints())?;
                    let opts = BruteForceOptions { restarts, seed, ..BruteForceOptions::default() };
                    let r = down_norm_bruteforce_with(p, &f, &grid, &[], &opts);
                    DownNormOut {
                        p: p.to_string(),
                        method: "brute_force",
                        value: r.value,
                        source: Some(r.source),
                        discrete_optimum: r.discrete_optimum,
                        stationarity: r.stationarity,
                    }
                }
            };
            print!("{}", to_json(&res));
        }
        Command::Chain { op, p, tol, points, out } => {
            let (f, idx, _) = op.load()?;
            let grid = chain_grid(&f, &idx, points)?;
            let r = verify_chain(&idx, op.m, p, &f, &grid, tol)?;
            emit(out.as_deref(), &to_json(&r))?;
            if let Some(why) = &r.skipped {
                eprintln!("skipped: {why}");
            }
            return Ok(if r.pass { Outcome::Pass } else { Outcome::Fail });
        }
        Command::Constants { index, m, x, y, seed, count, tol, out } => {
            let idx = parse_index_spec(&index)?;
            let spec = EnsembleSpec { seed, count, ..EnsembleSpec::default() };
            let r = estimate_reduction_constants(&spec, &idx, m, x, y, tol)?;
            emit(out.as_deref(), &to_json(&r))?;
            return Ok(if r.pass { Outcome::Pass } else { Outcome::Fail });
        }
        Command::Suite { config, out } => {
            let report = match config {
                Some(path) => run_suite(&path)?,
                None => run_suite_config(&SuiteConfig::parse(DEFAULT_CONFIG)?, Path::new("."))?,
            };
            emit(out.as_deref(), &report.to_json())?;
            for w in &report.warnings {
                eprintln!("{w}");
            }
            eprintln!("{} checks, {} failed, {} skipped", report.records.len(), report.failures(), report.skipped);
            return Ok(if report.pass { Outcome::Pass } else { Outcome::Fail });
        }
    }
    Ok(Outcome::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
