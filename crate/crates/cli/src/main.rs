//! `fjs` — fuzzy job-shop scheduler.
//!
//! Exit codes: 0 success, 1 instance validation or oracle precondition
//! failure, 2 scheduling stall, 3 I/O or schema errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fjs_cli::{default_rule_base, formats, gantt, gen, metrics, read_instance, read_rule_base};
use fjs_core::allocate::{self, RunError};
use fjs_core::baseline;
use fjs_core::model::validate;
use fjs_core::retrograde;
use fjs_core::{ActivityId, Instance};

#[derive(Parser)]
#[command(name = "fjs", version, about = "Fuzzy job-shop scheduler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GanttFormat {
    Svg,
    Txt,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scheduling pipeline and write schedule.json, metrics.json,
    /// and a Gantt chart into the output directory.
    Schedule {
        #[arg(long)]
        instance: PathBuf,
        /// Rule-base file; the built-in default rules are used when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Override the window length H.
        #[arg(long)]
        horizon: Option<f64>,
        /// Override the window shift per iteration.
        #[arg(long)]
        step: Option<f64>,
        /// Override the fixpoint significance epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Override the fixpoint iteration cap.
        #[arg(long = "max-iters")]
        max_iters: Option<u32>,
        /// Override the recorded seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write arrangement.json and trace iterations on stderr.
        #[arg(long)]
        verbose: bool,
        #[arg(long, value_enum, default_value_t = GanttFormat::Svg)]
        gantt: GanttFormat,
    },
    /// Lint an instance file and list every violation.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run the classical baselines on a crisp instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exhaustive-search activity limit.
        #[arg(long, default_value_t = 8)]
        limit: usize,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        jobs: usize,
        /// Activities per job.
        #[arg(long)]
        activities: usize,
        #[arg(long)]
        resources: usize,
        #[arg(long)]
        seed: u64,
        /// Relative spread of fuzzy values in [0, 1]; 0 = crisp.
        #[arg(long, default_value_t = 0.0)]
        fuzziness: f64,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<fjs_cli::CliError> for Failure {
    fn from(err: fjs_cli::CliError) -> Self {
        Failure::new(3, err.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Schedule {
            instance,
            rules,
            out,
            horizon,
            step,
            epsilon,
            max_iters,
            seed,
            verbose,
            gantt,
        } => schedule(
            &instance, rules.as_deref(), &out, horizon, step, epsilon, max_iters, seed, verbose,
            gantt,
        ),
        Command::Validate { instance } => lint(&instance),
        Command::Oracle {
            instance,
            out,
            limit,
        } => oracle(&instance, out.as_deref(), limit),
        Command::Gen {
            jobs,
            activities,
            resources,
            seed,
            fuzziness,
            out,
        } => generate(jobs, activities, resources, seed, fuzziness, out.as_deref()),
    }
}

#[allow(clippy::too_many_arguments)]
fn schedule(
    instance_path: &Path,
    rules_path: Option<&Path>,
    out_dir: &Path,
    horizon: Option<f64>,
    step: Option<f64>,
    epsilon: Option<f64>,
    max_iters: Option<u32>,
    seed: Option<u64>,
    verbose: bool,
    gantt_format: GanttFormat,
) -> Result<(), Failure> {
    let mut instance = read_instance(instance_path)?;
    if let Some(h) = horizon {
        instance.config.horizon = h;
    }
    if let Some(s) = step {
        instance.config.step = s;
    }
    if let Some(e) = epsilon {
        instance.config.significance_epsilon = e;
    }
    if let Some(m) = max_iters {
        instance.config.max_fixpoint_iters = m;
    }
    if let Some(s) = seed {
        instance.config.seed = s;
    }

    fail_on_violations(&instance)?;

    let rule_base = match rules_path {
        Some(path) => read_rule_base(path)?,
        None => default_rule_base(),
    };

    let schedule = allocate::run(&instance, &rule_base).map_err(|err| match err {
        RunError::Stall { .. } => Failure::new(2, err.to_string()),
        RunError::Rating(_) => Failure::new(3, err.to_string()),
    })?;

    if verbose {
        for record in &schedule.iteration_log {
            eprintln!(
                "iteration {}: window {:.2}, selected {}, committed {}, deferred {}, fixpoint {} ({})",
                record.iteration,
                record.window_start,
                record.selected.len(),
                record.committed.len(),
                record.deferred.len(),
                record.fixpoint_iterations,
                if record.converged { "converged" } else { "capped" },
            );
        }
    }

    std::fs::create_dir_all(out_dir).map_err(|source| fjs_cli::CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    formats::write_json(&out_dir.join("schedule.json"), &schedule)?;
    formats::write_json(&out_dir.join("metrics.json"), &metrics::compute(&instance, &schedule))?;
    match gantt_format {
        GanttFormat::Svg => write_text(&out_dir.join("gantt.svg"), gantt::svg(&instance, &schedule))?,
        GanttFormat::Txt => write_text(&out_dir.join("gantt.txt"), gantt::text(&instance, &schedule))?,
        GanttFormat::None => {}
    }
    if verbose {
        formats::write_json(
            &out_dir.join("arrangement.json"),
            &retrograde::backward_pass(&instance),
        )?;
    }

    println!(
        "scheduled {} activities on {} resources, makespan {:.3} -> {}",
        schedule.allocations.len(),
        instance.resources.len(),
        schedule.makespan(),
        out_dir.display()
    );
    Ok(())
}

fn write_text(path: &Path, content: String) -> Result<(), Failure> {
    std::fs::write(path, content).map_err(|source| {
        Failure::from(fjs_cli::CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn fail_on_violations(instance: &Instance) -> Result<(), Failure> {
    let violations = validate(instance);
    if violations.is_empty() {
        return Ok(());
    }
    let mut message = format!("instance has {} violation(s):", violations.len());
    for v in &violations {
        message.push_str(&format!("\n  {v}"));
    }
    Err(Failure::new(1, message))
}

fn lint(instance_path: &Path) -> Result<(), Failure> {
    let instance = read_instance(instance_path)?;
    fail_on_violations(&instance)?;
    println!("{}: ok", instance_path.display());
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    cpm_latest_starts: BTreeMap<ActivityId, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<baseline::BruteForceResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force_skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edd: Option<baseline::EddResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edd_skipped: Option<String>,
}

fn oracle(instance_path: &Path, out: Option<&Path>, limit: usize) -> Result<(), Failure> {
    let instance = read_instance(instance_path)?;
    fail_on_violations(&instance)?;

    let cpm = baseline::cpm_backward(&instance).map_err(|e| Failure::new(1, e.to_string()))?;
    let (brute_force, brute_force_skipped) = match baseline::brute_force(&instance, limit) {
        Ok(result) => (Some(result), None),
        Err(err @ baseline::BaselineError::TooLarge { .. }) => (None, Some(err.to_string())),
        Err(err) => return Err(Failure::new(1, err.to_string())),
    };
    let (edd, edd_skipped) = match baseline::edd_single_machine(&instance) {
        Ok(result) => (Some(result), None),
        Err(baseline::BaselineError::Shape(reason)) => (None, Some(reason)),
        Err(err) => return Err(Failure::new(1, err.to_string())),
    };

    let report = OracleReport {
        cpm_latest_starts: cpm,
        brute_force,
        brute_force_skipped,
        edd,
        edd_skipped,
    };
    match out {
        Some(path) => formats::write_json(path, &report)?,
        None => print!("{}", formats::to_json_string(&report)),
    }
    Ok(())
}

fn generate(
    jobs: usize,
    activities: usize,
    resources: usize,
    seed: u64,
    fuzziness: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if !(0.0..=1.0).contains(&fuzziness) {
        return Err(Failure::new(1, format!("fuzziness {fuzziness} outside [0, 1]")));
    }
    let instance = gen::generate(&gen::GenParams {
        jobs,
        activities_per_job: activities,
        resources,
        seed,
        fuzziness,
    });
    match out {
        Some(path) => formats::write_json(path, &instance)?,
        None => print!("{}", formats::to_json_string(&instance)),
    }
    Ok(())
}
