//! Command implementations behind the `schedgame` binary.
//!
//! Exit codes: 0 feasible / verified, 1 infeasible / verification failed,
//! 2 parse, I/O or usage errors, 3 budget exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{derive_seed, parse_ratio, read_csv, rng_for, run_campaign, summarize, write_csv, Campaign};
use crate::error::{Error, Result};
use crate::solver::{bw_tba_solve_with, es_solve, Algorithm, Budget, BwOptions, SolveOutcome};
use crate::strategy::{edf_schedulable, verify_certificate, Certificate};
use crate::task_model::{generate_instance, parse_task_set, InstanceParams, TaskSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "schedgame", version, about = "Exact online feasibility of sporadic task sets")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Maximum explored nodes per solve.
    #[arg(long, global = true, default_value_t = 50_000_000)]
    pub budget_nodes: u64,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Seed for generation and campaigns (overrides the campaign file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl GlobalArgs {
    pub fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_seconds: self.budget_seconds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Es,
    BwTba,
    BwTbaNofrontier,
}

impl From<SolverChoice> for Algorithm {
    fn from(c: SolverChoice) -> Self {
        match c {
            SolverChoice::Es => Algorithm::Es,
            SolverChoice::BwTba => Algorithm::BwTba,
            SolverChoice::BwTbaNofrontier => Algorithm::BwTbaNoFrontier,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide feasibility of a task-set file.
    Analyze {
        tasks_file: PathBuf,
        #[arg(long, value_enum, default_value = "bw-tba")]
        algorithm: SolverChoice,
        /// Write the losing antichain as a certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Generate random task-set files named `<seed>_<idx>.tasks`.
    Generate {
        #[arg(long)]
        tasks: usize,
        #[arg(long)]
        count: usize,
        /// Total utilization, decimal or fraction.
        #[arg(long)]
        utilization: String,
        #[arg(long, default_value_t = 2)]
        cpus: u32,
        #[arg(long, default_value_t = 5)]
        t_min: u32,
        #[arg(long, default_value_t = 15)]
        t_max: u32,
        #[arg(long, default_value = "constrained")]
        deadline_mode: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a campaign and write one CSV row per instance and algorithm.
    Bench {
        campaign: PathBuf,
        /// Comma-separated: es, bw-tba, bw-tba-nofrontier, edf.
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Per-utilization ratios and explored-node medians of a bench CSV.
    Summarize { csv: PathBuf },
    /// Check a certificate by exhaustive play against all release patterns.
    Verify { certificate: PathBuf },
    /// Exhaustive check of EDF on a task-set file.
    SimulateEdf { tasks_file: PathBuf },
}

/// Runs a parsed command line, writing reports to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Analyze {
            tasks_file,
            algorithm,
            certificate,
        } => cmd_analyze(tasks_file, (*algorithm).into(), certificate.as_deref(), &cli.global, out),
        Command::Generate {
            tasks,
            count,
            utilization,
            cpus,
            t_min,
            t_max,
            deadline_mode,
            out_dir,
        } => (|| {
            let u = parse_ratio(utilization)?;
            let params = InstanceParams {
                tasks: *tasks,
                cpus: *cpus,
                utilization: *u.numer() as f64 / *u.denom() as f64,
                t_min: *t_min,
                t_max: *t_max,
                deadline_mode: deadline_mode.parse()?,
            };
            cmd_generate(&params, *count, cli.global.seed.unwrap_or(1), out_dir, out)
        })(),
        Command::Bench {
            campaign,
            algorithms,
            out: csv_path,
            jobs,
        } => cmd_bench(campaign, algorithms.as_deref(), csv_path, *jobs, &cli.global, out),
        Command::Summarize { csv } => cmd_summarize(csv, out),
        Command::Verify { certificate } => cmd_verify(certificate, out),
        Command::SimulateEdf { tasks_file } => cmd_simulate_edf(tasks_file, &cli.global, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_ERROR,
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn load_task_set(path: &Path) -> Result<TaskSet> {
    parse_task_set(&read_file(path)?)
}

pub fn solve(ts: &TaskSet, algorithm: Algorithm, budget: Budget) -> Result<SolveOutcome> {
    match algorithm {
        Algorithm::Es => es_solve(ts, budget),
        Algorithm::BwTba | Algorithm::BwTbaNoFrontier => bw_tba_solve_with(
            ts,
            &BwOptions {
                use_frontier: algorithm == Algorithm::BwTba,
                budget,
                ..BwOptions::default()
            },
        ),
        Algorithm::Edf => Err(Error::InvalidArgument("edf is not an exact solver".into())),
    }
}

pub fn cmd_analyze(
    tasks_file: &Path,
    algorithm: Algorithm,
    certificate: Option<&Path>,
    global: &GlobalArgs,
    out: &mut dyn Write,
) -> Result<i32> {
    let ts = load_task_set(tasks_file)?;
    let outcome = solve(&ts, algorithm, global.budget())?;
    writeln!(out, "{}", if outcome.feasible { "feasible" } else { "infeasible" })?;
    writeln!(out, "algorithm {}", outcome.algorithm)?;
    writeln!(out, "explored_nodes {}", outcome.metrics.explored_nodes)?;
    writeln!(out, "peak_set_size {}", outcome.metrics.peak_set_size)?;
    writeln!(out, "iterations {}", outcome.iterations)?;
    writeln!(out, "losing_antichain {}", outcome.losing.len())?;
    writeln!(out, "wall_time_ms {:.3}", outcome.metrics.wall_time_ms())?;
    if let Some(path) = certificate {
        fs::write(path, Certificate::from_outcome(&ts, &outcome).to_string())?;
        writeln!(out, "certificate {}", path.display())?;
    }
    Ok(if outcome.feasible { EXIT_OK } else { EXIT_NEGATIVE })
}

pub fn cmd_generate(
    params: &InstanceParams,
    count: usize,
    seed: u64,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    if params.utilization <= 0.0 {
        return Err(Error::InvalidArgument("utilization must be positive".into()));
    }
    fs::create_dir_all(out_dir)?;
    for idx in 0..count {
        let ts = generate_instance(params, &mut rng_for(derive_seed(seed, idx as u64)))?;
        let path = out_dir.join(format!("{seed}_{idx}.tasks"));
        fs::write(&path, ts.to_string())?;
    }
    writeln!(out, "generated {count} task sets in {}", out_dir.display())?;
    Ok(EXIT_OK)
}

pub fn cmd_bench(
    campaign_file: &Path,
    algorithms: Option<&[String]>,
    csv_path: &Path,
    jobs: Option<usize>,
    global: &GlobalArgs,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut campaign = Campaign::from_toml(&read_file(campaign_file)?)?;
    if let Some(seed) = global.seed {
        campaign.seed = seed;
    }
    let algorithms: Vec<Algorithm> = match algorithms {
        Some(list) => list.iter().map(|a| a.trim().parse()).collect::<Result<_>>()?,
        None => campaign.algorithms.clone(),
    };
    let rows = run_campaign(&campaign, &algorithms, global.budget(), jobs)?;
    write_csv(&rows, fs::File::create(csv_path)?)?;
    writeln!(out, "wrote {} rows to {}", rows.len(), csv_path.display())?;
    Ok(EXIT_OK)
}

pub fn cmd_summarize(csv_path: &Path, out: &mut dyn Write) -> Result<i32> {
    let rows = read_csv(fs::File::open(csv_path)?)?;
    write!(out, "{}", summarize(&rows))?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(certificate: &Path, out: &mut dyn Write) -> Result<i32> {
    let cert: Certificate = read_file(certificate)?.parse()?;
    let report = verify_certificate(&cert);
    if report.ok {
        writeln!(out, "ok ({} nodes visited)", report.visited)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "certificate rejected ({} nodes visited)", report.visited)?;
        if let Some(play) = &report.counterexample {
            write!(out, "{play}")?;
        }
        Ok(EXIT_NEGATIVE)
    }
}

pub fn cmd_simulate_edf(tasks_file: &Path, global: &GlobalArgs, out: &mut dyn Write) -> Result<i32> {
    let ts = load_task_set(tasks_file)?;
    let report = edf_schedulable(&ts, global.budget())?;
    writeln!(
        out,
        "{} ({} nodes explored)",
        if report.schedulable { "edf-schedulable" } else { "edf-unschedulable" },
        report.metrics.explored_nodes
    )?;
    if let Some(play) = &report.counterexample {
        write!(out, "{play}")?;
    }
    Ok(if report.schedulable { EXIT_OK } else { EXIT_NEGATIVE })
}

