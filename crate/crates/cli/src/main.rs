//! `wislab`: simulate captures, inspect spectra and run the evaluation
//! sweeps from the command line.
//!
//! Exit status: 0 success, 1 usage or configuration error, 2 bad input
//! data, 3 internal failure (including a failed `validate` check).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wislab::dsp::{angle_grid, aoa_spectrum, doppler_vector_stream, range_spectrum, sanitize_phase};
use wislab::eval::{sweep_ru, sweep_sampling, SweepReport};
use wislab::io::{
    campaigns_from_dir, read_capture, simulate_to_dir, write_reports_csv, write_summary_json,
    RunConfig,
};
use wislab::ofdma::RuId;
use wislab::selftest;

#[derive(Parser)]
#[command(name = "wislab", version, about = "Wi-Fi CFR sensing lab: simulation, spectra and evaluation sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate 4 classes x 4 campaigns and write one capture file each.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Write range, Doppler and angle-of-arrival profiles of a capture as CSV.
    Spectra(SpectraArgs),
    /// Evaluate each resource unit with campaign-level cross-validation.
    SweepRu {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Resource units to evaluate, e.g. RU1-996 (default: from config).
        #[arg(long = "ru", value_name = "RU")]
        rus: Vec<RuId>,
    },
    /// Evaluate each channel sub-sampling factor on the full band.
    SweepSampling {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the built-in invariant checks.
    Validate,
    /// Print the effective configuration as TOML.
    Config {
        #[command(flatten)]
        config: ConfigArg,
    },
}

#[derive(Args)]
struct ConfigArg {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<RunConfig> {
        let config = match &self.config {
            Some(path) => RunConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => RunConfig::default(),
        };
        config.validate().context("validating config")?;
        Ok(config)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Directory of capture files (4 per class).
    #[arg(long)]
    captures: PathBuf,
    /// Per-set CSV report.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON percentile summary.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SpectraArgs {
    #[command(flatten)]
    config: ConfigArg,
    /// Capture file to analyse.
    #[arg(long)]
    capture: PathBuf,
    /// Output directory for range.csv, doppler.csv and aoa.csv.
    #[arg(long)]
    out: PathBuf,
    /// Snapshot used for the range and AoA profiles.
    #[arg(long, default_value_t = 0)]
    snapshot: usize,
    /// Subcarrier used for the AoA profile (default: band centre).
    #[arg(long)]
    subcarrier: Option<usize>,
    /// Receive antenna used for the range profile.
    #[arg(long, default_value_t = 0)]
    antenna: usize,
    /// Doppler sub-sampling factor.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Maximum number of Doppler windows written (default: all).
    #[arg(long)]
    max_windows: Option<usize>,
    /// Angular grid step of the AoA profile, degrees.
    #[arg(long, default_value_t = 1.0)]
    angle_step: f64,
    /// Skip phase sanitization.
    #[arg(long)]
    raw: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("wislab: error: {}", describe(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Joins the context chain down to the first library error, whose own
/// message already includes its cause.
fn describe(err: &anyhow::Error) -> String {
    let mut parts = Vec::new();
    for e in err.chain() {
        parts.push(e.to_string());
        if e.is::<wislab::Error>() {
            break;
        }
    }
    parts.join(": ")
}

/// Maps the first library error in the chain to an exit status.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<wislab::Error>()) {
        Some(e) if e.is_usage_error() => 1,
        Some(e) if e.is_data_error() => 2,
        Some(_) => 3,
        None if err.chain().any(|e| e.is::<std::io::Error>()) => 2,
        None => 3,
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate { config, out } => {
            let config = config.load()?;
            let start = Instant::now();
            let paths = simulate_to_dir(&config, &out).context("simulate")?;
            println!(
                "wrote {} captures to {} in {:.1} s",
                paths.len(),
                out.display(),
                start.elapsed().as_secs_f64()
            );
        }
        Command::Spectra(args) => spectra(&args)?,
        Command::SweepRu { sweep, rus } => {
            let config = sweep.config.load()?;
            let rus = if rus.is_empty() { config.eval.rus.clone() } else { rus };
            run_sweep(&sweep, "sweep-ru", |campaigns| {
                sweep_ru(campaigns, &rus, &config.pipeline())
            })?;
        }
        Command::SweepSampling { sweep } => {
            let config = sweep.config.load()?;
            let factors = config.sampling_factors();
            run_sweep(&sweep, "sweep-sampling", |campaigns| {
                sweep_sampling(campaigns, &factors, &config.pipeline())
            })?;
        }
        Command::Validate => return Ok(validate()),
        Command::Config { config } => {
            print!("{}", config.load()?.to_toml_string()?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(
    args: &SweepArgs,
    stage: &str,
    sweep: impl FnOnce(&[wislab::eval::Campaign]) -> wislab::Result<Vec<SweepReport>>,
) -> Result<()> {
    let campaigns = campaigns_from_dir(&args.captures)
        .with_context(|| format!("{stage}: reading captures in {}", args.captures.display()))?;
    let start = Instant::now();
    let reports = sweep(&campaigns).with_context(|| format!("{stage}: evaluation"))?;
    write_reports_csv(&args.out, &reports).with_context(|| format!("{stage}: writing report"))?;
    if let Some(path) = &args.summary {
        write_summary_json(path, &reports).with_context(|| format!("{stage}: writing summary"))?;
    }
    for r in &reports {
        println!(
            "{:<10} sets {:>3}  accuracy median {:.4} [p5 {:.4}, p95 {:.4}]  macro-F1 median {:.4}",
            r.config_label,
            r.sets.len(),
            r.accuracy.median,
            r.accuracy.p5,
            r.accuracy.p95,
            r.macro_f1.median
        );
    }
    println!("{stage} finished in {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn create_csv(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn spectra(args: &SpectraArgs) -> Result<()> {
    let config = args.config.load()?;
    let (mut cfr, meta) = read_capture(&args.capture)
        .with_context(|| format!("spectra: reading capture {}", args.capture.display()))?;
    if !args.raw {
        cfr = sanitize_phase(&cfr).context("spectra: phase sanitization")?.cfr;
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("spectra: creating {}", args.out.display()))?;

    let range = range_spectrum(&cfr, args.snapshot, args.antenna).context("spectra: range profile")?;
    let mut w = create_csv(&args.out.join("range.csv"))?;
    w.write_record(["bin", "delay_s", "path_length_m", "power"])?;
    for (i, p) in range.power.iter().enumerate() {
        w.write_record([
            i.to_string(),
            range.delay(i).to_string(),
            range.path_length(i).to_string(),
            p.to_string(),
        ])?;
    }
    w.flush()?;

    let vectors = doppler_vector_stream(&cfr, &config.doppler, args.k).context("spectra: Doppler stream")?;
    let n_windows = args.max_windows.map_or(vectors.len(), |m| m.min(vectors.len()));
    let mut w = create_csv(&args.out.join("doppler.csv"))?;
    w.write_record(["window", "timestamp_s", "bin", "doppler_hz", "dynamic_power", "total_power"])?;
    for (i, v) in vectors.iter().take(n_windows).enumerate() {
        for (b, p) in v.power.iter().enumerate() {
            let total = if b == v.center() { p + v.static_power } else { *p };
            w.write_record([
                i.to_string(),
                v.timestamp.to_string(),
                b.to_string(),
                v.frequency(b).to_string(),
                p.to_string(),
                total.to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut written = vec!["range.csv", "doppler.csv"];
    if cfr.n_antennas() >= 2 {
        let subcarrier = args.subcarrier.unwrap_or(cfr.n_subcarriers() / 2);
        let angles = angle_grid(args.angle_step);
        let aoa = aoa_spectrum(&cfr, args.snapshot, subcarrier, &angles).context("spectra: AoA profile")?;
        let mut w = create_csv(&args.out.join("aoa.csv"))?;
        w.write_record(["angle_deg", "power"])?;
        for (a, p) in aoa.angles.iter().zip(&aoa.power) {
            w.write_record([a.to_degrees().to_string(), p.to_string()])?;
        }
        w.flush()?;
        written.push("aoa.csv");
    } else {
        println!("single receive antenna: AoA profile skipped");
    }
    println!(
        "{} capture ({} snapshots, {} Doppler windows): wrote {} to {}",
        meta.label,
        cfr.n_snapshots(),
        n_windows,
        written.join(", "),
        args.out.display()
    );
    Ok(())
}

fn validate() -> ExitCode {
    let outcomes = selftest::run_all();
    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        let _ = writeln!(
            stdout,
            "{status} {:<24} {:>8.1} ms  {}",
            o.name,
            o.elapsed.as_secs_f64() * 1e3,
            o.detail
        );
    }
    let _ = writeln!(stdout, "{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("wislab: error: validate: {failed} check(s) failed");
        ExitCode::from(3)
    }
}
