//! `sparsemon` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failed, 2 usage or precondition
//! error, 3 I/O or input-format error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsity_monitor::io::{self, SeriesRecord};
use sparsity_monitor::sim::{self, AnomalyKind, StreamSettings};
use sparsity_monitor::sparsity::{self, SignBalance};
use sparsity_monitor::stream::{self, BaselineAccumulator, StreamMonitor};
use sparsity_monitor::{Error, ImageMatrix, MomentMode};

pub mod defaults;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "sparsemon", version, about = "Sparsity estimation for anomalies in noisy image streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hoyer index of one matrix; corrected index when a baseline is given.
    Index(IndexArgs),
    /// Reproduce the noise-robustness or dimension-consistency sweep.
    Simulate(SimulateArgs),
    /// Corrected-index series over a directory of frames.
    Monitor(MonitorArgs),
    /// Monte Carlo checks of the noise behaviour of the Hoyer index.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Literal,
    Debias,
}

impl From<ModeArg> for MomentMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Literal => MomentMode::Literal,
            ModeArg::Debias => MomentMode::Debias,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Dense,
    Sparse,
}

impl From<KindArg> for AnomalyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Dense => AnomalyKind::Dense,
            KindArg::Sparse => AnomalyKind::Sparse,
        }
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Matrix file (.csv or .pgm).
    pub matrix: PathBuf,
    /// Directory of in-control frames used to fit a baseline.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// File-name pattern selecting baseline frames.
    #[arg(long, default_value = "*")]
    pub pattern: String,
    /// Number of baseline frames (default: all matched).
    #[arg(long)]
    pub w0: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Debias)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Robustness,
    Consistency,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, value_enum, default_value_t = KindArg::Dense)]
    pub kind: KindArg,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: PathBuf,
    /// Plot-ready CSV path (default: report path with a .csv extension).
    #[arg(long)]
    pub plot_csv: Option<PathBuf>,
    /// Noise levels for the robustness sweep (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Magnifications for the consistency sweep (comma-separated multiples of 10).
    #[arg(long, value_delimiter = ',')]
    pub cs: Option<Vec<usize>>,
    /// Noise level for the consistency sweep.
    #[arg(long, default_value_t = defaults::CONSISTENCY_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = defaults::SIM_W0)]
    pub w0: usize,
    #[arg(long, default_value_t = defaults::SIM_N_OOC)]
    pub n_ooc: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Debias)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Directory holding the frame stream.
    #[arg(long)]
    pub frames: PathBuf,
    /// File-name pattern selecting frames.
    #[arg(long, default_value = "*")]
    pub pattern: String,
    /// In-control window: frames 1..=w0 fit the baseline.
    #[arg(long, default_value_t = defaults::MONITOR_W0)]
    pub w0: usize,
    /// First monitored frame (1-based position in the sorted stream).
    #[arg(long)]
    pub tau_from: i64,
    /// Last monitored frame (default: last frame).
    #[arg(long)]
    pub tau_to: Option<i64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Debias)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Lemma2,
    Theorem1,
    Corollary1,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Optional JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. }
            | Error::InFile { .. }
            | Error::Csv { .. }
            | Error::Pgm(_)
            | Error::FrameDir(_)
            | Error::Serialize(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything needed to rerun a command, embedded in its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindArg>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ooc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_csv: Option<PathBuf>,
}

impl RunConfig {
    fn new(command: &'static str, seed: u64) -> Self {
        Self {
            command,
            experiment: None,
            check: None,
            kind: None,
            seed,
            mode: None,
            dims: None,
            w0: None,
            n_ooc: None,
            sigma_grid: None,
            c_grid: None,
            sigma: None,
            reps: None,
            out: None,
            plot_csv: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub rows: Vec<sim::BandRow>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub pass: bool,
    pub threshold: f64,
    pub result: T,
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Io(msg) => eprintln!("error: {msg}"),
                CliError::VerificationFailed => eprintln!("verification FAILED"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Index(a) => cmd_index(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Monitor(a) => cmd_monitor(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

fn print_record(rec: &SeriesRecord) -> CliResult<()> {
    let bytes = io::format_series_csv(std::slice::from_ref(rec))?;
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn warn_if_mixed_sign(m: &ImageMatrix, what: &str) {
    let b = SignBalance::of(m);
    if b.is_mixed() {
        eprintln!(
            "warning: {what} has mixed-sign mass (positive {:.6e}, negative {:.6e}); \
             the Hoyer index assumes a same-sign anomaly",
            b.positive, b.negative
        );
    }
}

pub fn cmd_index(a: &IndexArgs) -> CliResult<()> {
    let x = io::read_frame(&a.matrix)?;
    let mode = MomentMode::from(a.mode);
    let record = match &a.baseline {
        None => {
            warn_if_mixed_sign(&x, "matrix");
            let h = sparsity::hoyer_index(&x)?;
            let m = sparsity::estimate_moments(&x, 0.0, mode)?;
            SeriesRecord {
                t: 0,
                h_raw: h,
                bias: 0.0,
                g: h,
                g_unclamped: h,
                a_bar: m.a_bar,
                a2_bar: m.a2_bar,
                sigma2: 0.0,
            }
        }
        Some(dir) => {
            let listing = io::read_frame_dir(dir, &a.pattern)?;
            let w0 = a.w0.unwrap_or(listing.len());
            if w0 < 2 || w0 > listing.len() {
                return Err(CliError::Usage(format!(
                    "--w0 {w0} needs 2..={} baseline frames",
                    listing.len()
                )));
            }
            let mut acc = BaselineAccumulator::new();
            for frame in listing.frames().take(w0) {
                acc.push(&frame?)?;
            }
            let b = acc.finish()?;
            warn_if_mixed_sign(&stream::residual(&x, &b)?, "residual");
            SeriesRecord::from(&stream::corrected_reading(&x, &b, mode)?)
        }
    };
    if x.is_zero() {
        eprintln!("note: all-zero matrix; blank matrix convention gives h = 1");
    }
    print_record(&record)
}

fn default_plot_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let kind = AnomalyKind::from(a.kind);
    let settings = StreamSettings {
        w0: a.w0,
        n_ooc: a.n_ooc,
        mode: a.mode.into(),
    };
    if a.w0 < 2 || a.n_ooc < 2 {
        return Err(CliError::Usage("--w0 and --n-ooc must both be at least 2".into()));
    }
    let plot_csv = a.plot_csv.clone().unwrap_or_else(|| default_plot_path(&a.out));
    let mut config = RunConfig::new("simulate", a.seed);
    config.experiment = Some(a.experiment);
    config.kind = Some(a.kind);
    config.mode = Some(a.mode);
    config.w0 = Some(a.w0);
    config.n_ooc = Some(a.n_ooc);
    config.out = Some(a.out.clone());
    config.plot_csv = Some(plot_csv.clone());

    let rows = match a.experiment {
        Experiment::Robustness => {
            let sigmas = a.sigmas.clone().unwrap_or_else(defaults::sigma_grid);
            if sigmas.is_empty() || sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(CliError::Usage("sigma grid must be non-empty and positive".into()));
            }
            config.dims = Some(defaults::SIM_DIMS);
            config.sigma_grid = Some(sigmas.clone());
            sim::run_robustness(&sigmas, kind, defaults::SIM_DIMS, a.seed, settings)?
        }
        Experiment::Consistency => {
            let cs = a.cs.clone().unwrap_or_else(defaults::c_grid);
            if cs.is_empty() || cs.iter().any(|&c| c == 0 || !c.is_multiple_of(10)) {
                return Err(CliError::Usage(
                    "magnification grid must be non-empty multiples of 10".into(),
                ));
            }
            if !(a.sigma.is_finite() && a.sigma > 0.0) {
                return Err(CliError::Usage("--sigma must be positive".into()));
            }
            config.c_grid = Some(cs.clone());
            config.sigma = Some(a.sigma);
            sim::run_consistency(&cs, a.sigma, kind, a.seed, settings)?
        }
    };

    let label = match a.experiment {
        Experiment::Robustness => "sigma",
        Experiment::Consistency => "c",
    };
    println!("{} {} ({}, seed {})", a.experiment_name(), kind, a.mode_name(), a.seed);
    println!("{label:>8} {:>10} {:>10} {:>10}", "m_eps", "lo", "hi");
    for r in &rows {
        println!("{:>8} {:>10.5} {:>10.5} {:>10.5}", r.x, r.band.m_eps, r.band.lo, r.band.hi);
    }

    let report = SimulationReport {
        tool: "sparsemon",
        version: VERSION,
        config,
        rows,
    };
    io::write_report_json(&report, &a.out)?;
    io::write_plot_csv(&report.rows, &plot_csv)?;
    Ok(())
}

impl SimulateArgs {
    fn experiment_name(&self) -> &'static str {
        match self.experiment {
            Experiment::Robustness => "robustness",
            Experiment::Consistency => "consistency",
        }
    }

    fn mode_name(&self) -> &'static str {
        match self.mode {
            ModeArg::Literal => "literal",
            ModeArg::Debias => "debias",
        }
    }
}

pub fn cmd_monitor(a: &MonitorArgs) -> CliResult<()> {
    if a.w0 < 2 {
        return Err(CliError::Usage(format!("--w0 must be at least 2, got {}", a.w0)));
    }
    if a.tau_from <= a.w0 as i64 {
        return Err(CliError::Usage(format!(
            "--tau-from {} must come after the {} in-control frames",
            a.tau_from, a.w0
        )));
    }
    let listing = io::read_frame_dir(&a.frames, &a.pattern)?;
    let n = listing.len() as i64;
    let tau_to = a.tau_to.unwrap_or(n);
    if tau_to > n {
        return Err(CliError::Usage(format!(
            "--tau-to {tau_to} beyond the {n} frames in {}",
            a.frames.display()
        )));
    }
    let mut monitor = StreamMonitor::new(1, a.w0, a.tau_from..=tau_to, a.mode.into())?;
    let mut records = Vec::new();
    for frame in listing.frames() {
        if monitor.is_done() {
            break;
        }
        if let Some(r) = monitor.push(&frame?)? {
            records.push(SeriesRecord::from(&r));
        }
    }
    monitor.finish()?;
    io::write_series_csv(&records, &a.out)?;
    if let Some(b) = monitor.baseline() {
        println!("baseline: w0 = {}, sigma2_hat = {:.6e}", b.w0, b.sigma2_hat);
    }
    println!("{} readings written to {}", records.len(), a.out.display());
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let mut config = RunConfig::new("verify", a.seed);
    config.check = Some(a.check);
    config.out = a.out.clone();
    let pass = match a.check {
        Check::Theorem1 => {
            let (rows, cols) = defaults::THEOREM1_DIMS;
            let anomaly = ImageMatrix::filled(rows, cols, 1.0)?;
            config.dims = Some((rows, cols));
            config.sigma = Some(defaults::THEOREM1_SIGMA);
            config.reps = Some(defaults::THEOREM1_REPS);
            let c = sim::verify_bias_theorem(&anomaly, defaults::THEOREM1_SIGMA, defaults::THEOREM1_REPS, a.seed)?;
            let pass = c.abs_diff < defaults::THEOREM1_TOL;
            println!(
                "theorem1: mean gap {:.6}, predicted {:.6}, |diff| {:.6} (< {}) -> {}",
                c.empirical_mean_gap,
                c.predicted_bias,
                c.abs_diff,
                defaults::THEOREM1_TOL,
                verdict(pass)
            );
            write_verify(a, config, pass, defaults::THEOREM1_TOL, c)?;
            pass
        }
        Check::Corollary1 => {
            let anomaly = defaults::corollary1_anomaly()?;
            config.dims = Some(anomaly.dims());
            config.sigma = Some(defaults::COROLLARY1_SIGMA);
            config.reps = Some(defaults::COROLLARY1_REPS);
            let c = sim::verify_divergent_noise(
                &anomaly,
                defaults::COROLLARY1_SIGMA,
                defaults::COROLLARY1_REPS,
                a.seed,
            )?;
            let pass = c.values.iter().all(|&h| h > defaults::COROLLARY1_MIN_H);
            println!(
                "corollary1: min h(A+e) {:.6} over {} reps, predicted {:.6} (> {}) -> {}",
                c.min,
                c.values.len(),
                c.predicted,
                defaults::COROLLARY1_MIN_H,
                verdict(pass)
            );
            write_verify(a, config, pass, defaults::COROLLARY1_MIN_H, c)?;
            pass
        }
        Check::Lemma2 => {
            config.sigma = Some(defaults::LEMMA2_SIGMA);
            config.reps = Some(defaults::LEMMA2_REPS);
            let rows = sim::verify_noise_sparsity_decay(
                &defaults::LEMMA2_SIZES,
                defaults::LEMMA2_SIGMA,
                defaults::LEMMA2_REPS,
                a.seed,
            )?;
            let spread = decay_spread(&rows);
            let pass = spread < defaults::LEMMA2_MAX_SPREAD;
            for r in &rows {
                println!(
                    "lemma2: {:>6} entries  median |1-h| {:.6e}  scaled {:.4}",
                    r.rows * r.cols,
                    r.median_one_minus_h,
                    r.median_scaled
                );
            }
            println!(
                "lemma2: max/min scaled median {:.4} (< {}) -> {}",
                spread,
                defaults::LEMMA2_MAX_SPREAD,
                verdict(pass)
            );
            write_verify(a, config, pass, defaults::LEMMA2_MAX_SPREAD, rows)?;
            pass
        }
    };
    if pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

/// Ratio of the largest to the smallest scaled median.
pub fn decay_spread(rows: &[sim::DecayRow]) -> f64 {
    let max = rows.iter().map(|r| r.median_scaled).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.median_scaled).fold(f64::INFINITY, f64::min);
    max / min
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_verify<T: Serialize>(a: &VerifyArgs, config: RunConfig, pass: bool, threshold: f64, result: T) -> CliResult<()> {
    if let Some(out) = &a.out {
        let report = VerifyReport {
            tool: "sparsemon",
            version: VERSION,
            config,
            pass,
            threshold,
            result,
        };
        io::write_report_json(&report, out)?;
    }
    Ok(())
}
