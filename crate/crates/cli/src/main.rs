use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use log::info;

use hrbound::experiment::{
    build_setup, fit_real_trace, load_results_csv, render_summary, replication_trace, run_with_setup, summarize,
    write_outputs, write_plot_csv, write_summary_csv, ExperimentConfig,
};
use hrbound::traffic_gen::write_trace_csv;

#[derive(Parser)]
#[command(name = "hrbound", version, about = "Hazard-rate cache hit-probability bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the trace of one replication as CSV.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Replication whose trace to write.
        #[arg(long, default_value_t = 0)]
        rep: usize,
    },
    /// Run an experiment and write results and summaries.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the config's `output`, else `results`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit per-object GPD inter-request models to a recorded trace.
    Fit {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 100)]
        min_requests: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a results CSV.
    Summarize {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.experiment.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { config, seed, out, rep } => {
            let cfg = load_config(&config, seed)?;
            let setup = build_setup(&cfg)?;
            let trace = replication_trace(&cfg, &setup, rep)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join("trace.csv");
            write_trace_csv(&trace, &setup.catalog, &path)?;
            info!("wrote {} requests to {}", trace.len(), path.display());
        }
        Command::Run { config, seed, out } => {
            let cfg = load_config(&config, seed)?;
            let out = out
                .or_else(|| cfg.experiment.output.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let setup = build_setup(&cfg)?;
            let rows = run_with_setup(&cfg, &setup)?;
            let summary = write_outputs(&rows, &out)?;
            print!("{}", render_summary(&summary));
            info!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Fit { trace, min_requests, out } => {
            let fit = fit_real_trace(&trace, min_requests)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut w = csv::Writer::from_path(out.join("fits.csv"))?;
            w.write_record(["object_id", "requests", "status", "shape", "scale", "log_likelihood", "converged"])?;
            for o in &fit.objects {
                let (k, s, ll, c) = o.fit.as_ref().map_or_else(
                    || Default::default(),
                    |f| {
                        (
                            f.shape.to_string(),
                            f.scale.to_string(),
                            f.log_likelihood.to_string(),
                            f.converged.to_string(),
                        )
                    },
                );
                w.write_record([o.original_id.clone(), o.requests.to_string(), o.status.label().into(), k, s, ll, c])?;
            }
            w.flush()?;
            println!("fitted {} of {} objects", fit.kept.len(), fit.objects.len());
        }
        Command::Summarize { results, out } => {
            let rows = load_results_csv(&results)?;
            if rows.is_empty() {
                anyhow::bail!(hrbound::Error::InvalidArgument(format!("{} has no rows", results.display())));
            }
            let summary = summarize(&rows);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_summary_csv(&summary, dir.join("summary.csv"))?;
                write_plot_csv(&summary, dir.join("plot.csv"))?;
            }
            print!("{}", render_summary(&summary));
        }
    }
    Ok(())
}

/// 1 for invalid input, 2 for failures while running.
fn exit_code(err: &anyhow::Error) -> u8 {
    use hrbound::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::Config(_)
            | E::InvalidArgument(_)
            | E::Parse { .. }
            | E::CacheTooLarge { .. }
            | E::Unsupported(_)
            | E::InsufficientData { .. },
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
