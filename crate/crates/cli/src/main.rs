use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ris_dps::analysis::{analyze, regions_csv, HStarSource};
use ris_dps::channel::{sample_realization, LinkBudget, RealizationDocument};
use ris_dps::exec::Execution;
use ris_dps::experiment::{
    builtin_scenario, builtin_scenarios, region_dump, run_scenario_with, to_csv, Scenario,
};
use ris_dps::{cpp_optimize, exhaustive_optimize, sweep_optimize, CppMode, PhaseShiftSet};

#[derive(Parser)]
#[command(
    name = "ris-dps",
    version,
    about = "Optimal discrete-phase RIS configuration and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file or built-in preset and write CSV plus metadata.
    Run {
        /// Path to a scenario JSON file, or a preset name (see `list`).
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Cap trials at 100.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        trials: Option<usize>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Optimize a single realization and print the solution as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated phases such as `pi/6,5pi/6`; defaults to the
        /// phases stored in the input file.
        #[arg(long)]
        phases: Option<String>,
        #[arg(long, value_enum, default_value_t = SolverArg::Sweep)]
        solver: SolverArg,
    },
    /// Print the empty regions of a realization as CSV.
    Regions {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        phases: Option<String>,
        /// Size regions with the continuous upper bound instead of the optimum.
        #[arg(long)]
        continuous_bound: bool,
    },
    /// Draw a random realization and print it as JSON.
    Sample {
        #[arg(long)]
        elements: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        phases: Option<String>,
    },
    /// List the built-in presets.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Sweep,
    Cpp,
    Exhaustive,
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Scenario::from_json(&text).with_context(|| format!("parsing {}", path.display()));
    }
    Ok(builtin_scenario(arg)?)
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn run(
    scenario: &str,
    out: &Path,
    seed: Option<u64>,
    fast: bool,
    trials: Option<usize>,
    sequential: bool,
) -> Result<()> {
    let mut s = load_scenario(scenario)?;
    if let Some(seed) = seed {
        s = s.with_seed(seed);
    }
    if let Some(t) = trials {
        s = s.with_trials(t);
    }
    if fast {
        s = s.fast();
    }
    s.validate()?;
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let rows = run_scenario_with(&s, exec)?;
    let csv_path = out.join(format!("{}.csv", s.name));
    fs::write(&csv_path, to_csv(&s, &rows))?;

    if let Some(dump) = region_dump(&s)? {
        fs::write(out.join(format!("{}_regions.csv", s.name)), dump)?;
    }

    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "name": s.name,
        "seed": s.seed,
        "trials": s.trials,
        "git_describe": git_describe(),
        "timestamp_unix": timestamp,
        "scenario": s,
    });
    fs::write(
        out.join(format!("{}.meta.json", s.name)),
        serde_json::to_string_pretty(&meta)?,
    )?;
    println!("{}", csv_path.display());
    Ok(())
}

fn load_realization(
    input: &Path,
    phases: Option<&str>,
) -> Result<(RealizationDocument, PhaseShiftSet)> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let doc = RealizationDocument::from_json(&text)
        .with_context(|| format!("parsing {}", input.display()))?;
    let set = match (phases, &doc.phases) {
        (Some(list), _) => PhaseShiftSet::parse(list)?,
        (None, Some(set)) => set.clone(),
        (None, None) => bail!("no phases given and none stored in {}", input.display()),
    };
    Ok((doc, set))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Cmd::Run {
            scenario,
            out,
            seed,
            fast,
            trials,
            sequential,
        } => run(&scenario, &out, seed, fast, trials, sequential)?,
        Cmd::Solve {
            input,
            phases,
            solver,
        } => {
            let (doc, set) = load_realization(&input, phases.as_deref())?;
            let real = &doc.realization;
            let result = match solver {
                SolverArg::Sweep => sweep_optimize(real, &set),
                SolverArg::Cpp => cpp_optimize(real, &set, CppMode::OffEnabled)?,
                SolverArg::Exhaustive => exhaustive_optimize(real, &set)?,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&result.to_document(None))?
            );
        }
        Cmd::Regions {
            input,
            phases,
            continuous_bound,
        } => {
            let (doc, set) = load_realization(&input, phases.as_deref())?;
            let source = if continuous_bound {
                HStarSource::ContinuousBound
            } else {
                HStarSource::Sweep
            };
            let (regions, report) = analyze(&doc.realization, &set, source)?;
            print!("{}", regions_csv(&regions));
            eprintln!(
                "measured_ratio={} sum_ratio_ub={} overlap_fraction={}",
                report.measured_ratio, report.sum_ratio_ub, report.overlap_fraction
            );
        }
        Cmd::Sample {
            elements,
            seed,
            phases,
        } => {
            let real = sample_realization(&LinkBudget::default(), elements, seed);
            let phases = phases.as_deref().map(PhaseShiftSet::parse).transpose()?;
            println!("{}", RealizationDocument::new(real, phases).to_json());
        }
        Cmd::List => {
            for s in builtin_scenarios() {
                println!("{}", s.name);
            }
        }
    }
    Ok(())
}
