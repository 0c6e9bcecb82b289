use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ssthreshless::experiment::{
    emit_trace, preset, read_metrics_csv, run_preset, sweep_preset, sweep_template, write_metrics,
    write_metrics_csv, ControllerLabel, MetricsRow, Preset, PresetRun, SweepAxis, PRESET_NAMES,
};
use ssthreshless::ScenarioConfig;

mod table;

#[derive(Parser)]
#[command(
    name = "sslsim",
    version,
    about = "Simulate TCP startup algorithms on a dumbbell network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in preset.
    Run(RunArgs),
    /// Sweep buffer size, one-way delay or bandwidth across controllers.
    Sweep(SweepArgs),
    /// Print the metrics written by an earlier run or sweep.
    Report(ReportArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    scenario: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    preset: Option<String>,
    /// Directory for traces and metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the horizon, in seconds. Windows ending later are dropped.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// buffer (packets), delay (one-way ms) or bandwidth (Mbps).
    #[arg(long)]
    axis: SweepAxis,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Comma-separated controllers: sls, hc, lss, ss_s, ss_a, ss_l, vegas.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "sls,hc,lss,ss_s,ss_a,ss_l,vegas"
    )]
    controllers: Vec<ControllerLabel>,
    /// Horizon of every point, in seconds.
    #[arg(long, default_value_t = 20.0)]
    horizon: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for traces and metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory containing metrics.csv.
    #[arg(long = "in")]
    input: PathBuf,
    /// Print CSV instead of an aligned table.
    #[arg(long)]
    csv: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Report(args) => report(args),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn override_run(cfg: &mut ScenarioConfig, seed: Option<u64>, horizon: Option<f64>) {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(h) = horizon {
        cfg.horizon_s = h;
        cfg.measurement.windows.retain(|w| w[1] <= h);
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut p = match (&args.scenario, &args.preset) {
        (Some(path), _) => {
            let cfg = ScenarioConfig::from_file(path)?;
            Preset {
                name: cfg.id.clone(),
                runs: vec![PresetRun {
                    group: cfg.id.clone(),
                    label: cfg.flows[0].controller.name().to_string(),
                    reference: false,
                    scenario: cfg,
                }],
            }
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires one of --scenario or --preset"),
    };
    for r in &mut p.runs {
        override_run(&mut r.scenario, args.seed, args.horizon);
        r.scenario
            .validate()
            .with_context(|| format!("scenario `{}`", r.scenario.id))?;
    }
    execute(&p, args.out.as_deref())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut template = sweep_template(&format!("sweep_{}", args.axis.key()));
    template.horizon_s = args.horizon;
    if let Some(s) = args.seed {
        template.seed = s;
    }
    let p = sweep_preset(
        &template.id,
        &template,
        args.axis,
        &args.values,
        &args.controllers,
    )?;
    execute(&p, args.out.as_deref())
}

fn execute(p: &Preset, out: Option<&Path>) -> Result<()> {
    let results = run_preset(p);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (run, outcome) in &results.results {
            if let Ok(o) = outcome {
                let path = dir.join(format!("{}.trace.csv", run.scenario.id));
                if let Err(e) = emit_trace(&o.traces, &path) {
                    eprintln!("warning: {e}");
                }
            }
        }
    }
    let rows = results.rows();
    if let Some(dir) = out {
        write_metrics_csv(&rows, &dir.join("metrics.csv"))?;
    }
    print!("{}", table::render(&rows));
    let failures = results.failures();
    for (id, err) in &failures {
        eprintln!("error: scenario `{id}` failed: {err}");
    }
    if !failures.is_empty() && failures.len() == results.results.len() {
        bail!("every scenario failed");
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let rows: Vec<MetricsRow> = read_metrics_csv(&args.input.join("metrics.csv"))?;
    if args.csv {
        write_metrics(&rows, std::io::stdout().lock())?;
    } else {
        print!("{}", table::render(&rows));
    }
    Ok(())
}
