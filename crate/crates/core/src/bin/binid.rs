use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use binid::config::{example_config, ExperimentConfig, Overrides};
use binid::plots;
use binid::sim::experiment::{trace_path, SUMMARY_METRICS};
use binid::sim::{run_experiment, ExperimentReport};

#[derive(Parser)]
#[command(name = "binid", version, about = "Recursive identification with binary-valued observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the bundled examples (1, 2 or 3).
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run an experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Check a config file and print the derived quantities.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct OverrideArgs {
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, env = "BINID_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    no_plots: bool,
    #[arg(long)]
    stride: Option<u64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            seeds: a.seeds,
            base_seed: a.base_seed,
            steps: a.steps,
            out: a.out,
            no_plots: a.no_plots,
            stride: a.stride,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Example { id, overrides } => {
            let cfg = example_config(id).expect("id range checked by the parser");
            execute(cfg, overrides.into())
        }
        Command::Run { config, overrides } => {
            ExperimentConfig::from_path(&config).and_then(|cfg| execute(cfg, overrides.into()))
        }
        Command::Validate { config } => ExperimentConfig::from_path(&config)
            .and_then(|cfg| cfg.validation_report())
            .map(|report| println!("{report}\nconfig OK")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(mut cfg: ExperimentConfig, overrides: Overrides) -> binid::Result<()> {
    cfg.apply(&overrides);
    let exp = cfg.build()?;
    let dir = cfg
        .output
        .directory
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml_string())?;

    let report = run_experiment(&exp, Some(&dir))?;

    if cfg.output.emit_plots {
        let traces: Vec<String> = report
            .replications
            .iter()
            .map(|r| file_name(&trace_path(&dir, r.seed)))
            .collect();
        plots::write_scripts(&dir, &traces)?;
    }
    print_report(&report, &dir)?;
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn print_report(report: &ExperimentReport, dir: &Path) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    let Some(first) = report.replications.first() else {
        return Ok(());
    };
    writeln!(out, "{} seeds, n = {}; output in {}", report.replications.len(), first.n, dir.display())?;
    write!(out, "{:>10}", "n")?;
    for m in SUMMARY_METRICS {
        write!(out, " {m:>17}")?;
    }
    writeln!(out)?;
    for cp in &first.checkpoints {
        write!(out, "{:>10}", cp.n)?;
        for m in SUMMARY_METRICS {
            write!(out, " {:>17.6e}", report.median(cp.n, m))?;
        }
        writeln!(out)?;
    }
    let clamps: u64 = report.replications.iter().map(|r| r.clamp_count).sum();
    let audit: u64 = report.replications.iter().map(|r| r.audit.violations()).sum();
    writeln!(out, "(medians across seeds; control clamps: {clamps}; range-audit violations: {audit})")
}
