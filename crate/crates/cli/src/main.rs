use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};

use gridlab::runner::{self, ExperimentConfig, ResultRecord};
use gridlab::sampler::{self, Interval, Rect, Strategy};
use gridlab::Error;

#[derive(Parser)]
#[command(name = "gridlab", version, about = "Training-point distribution experiments for physics-informed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a point set as CSV (`index,x` or `index,x,y`).
    Sample {
        #[arg(long)]
        strategy: Strategy,
        /// Points per axis.
        #[arg(long)]
        n: usize,
        /// `a,b` for an interval or `a,b,c,d` for the rectangle [a,b]x[c,d].
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, default_value_t = runner::DEFAULT_SEED)]
        seed: u64,
    },
    /// Train a single configuration and write its record, loss history and checkpoint.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every configuration point and write results, summary and charts.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Rebuild summary and charts from an existing results.csv.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_RUN_FAILURES: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Csv { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn parse_domain(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::config(format!("bad domain bound {s:?}"))))
        .collect()
}

fn sample(strategy: Strategy, n: usize, domain: &str, seed: u64) -> Result<(), Error> {
    let bounds = parse_domain(domain)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let io = |e| Error::io("<stdout>", e);
    match bounds[..] {
        [a, b] => {
            let set = sampler::sample_1d(strategy, Interval::new(a, b)?, n, seed)?;
            writeln!(out, "index,x").map_err(io)?;
            for (i, x) in set.points.iter().enumerate() {
                writeln!(out, "{i},{}", runner::fmt_float(*x)).map_err(io)?;
            }
        }
        [a, b, c, d] => {
            let rect = Rect::new(Interval::new(a, b)?, Interval::new(c, d)?);
            let set = sampler::sample_rect(strategy, rect, n, n, seed)?;
            writeln!(out, "index,x,y").map_err(io)?;
            for (i, p) in set.points.iter().enumerate() {
                writeln!(out, "{i},{},{}", runner::fmt_float(p[0]), runner::fmt_float(p[1])).map_err(io)?;
            }
        }
        _ => return Err(Error::config(format!("domain needs 2 or 4 numbers, got {domain:?}"))),
    }
    out.flush().map_err(io)
}

fn create(path: &Path) -> Result<BufWriter<std::fs::File>, Error> {
    std::fs::File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn failures(records: &[ResultRecord]) -> usize {
    records.iter().filter(|r| !r.is_ok()).count()
}

fn train(config: &Path, out: Option<PathBuf>) -> Result<u8, Error> {
    let cfg = ExperimentConfig::from_path(config)?;
    cfg.validate()?;
    let runs = cfg.runs();
    let [run] = &runs[..] else {
        return Err(Error::config(format!(
            "train needs a configuration with exactly one run, this one has {} (use sweep)",
            runs.len()
        )));
    };
    let outdir = out.unwrap_or_else(|| cfg.out_dir.clone());
    let outcome = runner::run_one(&cfg, run);
    let records = vec![outcome.record];
    runner::emit_outputs(&records, &runner::summarize(&records), &outdir)?;
    if let Some(report) = outcome.report {
        let path = outdir.join("loss_history.csv");
        let mut w = create(&path)?;
        runner::write_loss_history(&mut w, &report.loss_history, cfg.log_every)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        let path = outdir.join("checkpoint.txt");
        let mut w = create(&path)?;
        report.final_net.write_checkpoint(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;
    }
    let r = &records[0];
    println!("{} {} {} {}: final_loss {:.6e} mae {:.6e} ({})", r.problem, r.strategy, r.grid, r.widths, r.final_loss, r.mae, r.status);
    Ok(if failures(&records) > 0 { EXIT_RUN_FAILURES } else { 0 })
}

fn sweep(config: &Path, out: &Path, workers: usize) -> Result<u8, Error> {
    let cfg = ExperimentConfig::from_path(config)?;
    info!("{} runs on {} worker(s)", cfg.run_count(), workers.max(1));
    let records = runner::run_experiment(&cfg, workers)?;
    runner::emit_outputs(&records, &runner::summarize(&records), out)?;
    let failed = failures(&records);
    println!("{} runs, {} failed; results in {}", records.len(), failed, out.display());
    Ok(if failed > 0 { EXIT_RUN_FAILURES } else { 0 })
}

fn plot(input: &Path, out: &Path) -> Result<u8, Error> {
    let records = runner::read_results_file(input)?;
    let written = runner::emit_summary(&runner::summarize(&records), out)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the configuration-error code
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sample { strategy, n, domain, seed } => sample(strategy, n, &domain, seed).map(|_| 0),
        Command::Train { config, out } => train(&config, out),
        Command::Sweep { config, out, workers } => sweep(&config, &out, workers),
        Command::Plot { input, out } => plot(&input, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            error!("{e}");
            eprintln!("gridlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
