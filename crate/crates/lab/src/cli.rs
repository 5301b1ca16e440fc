//! Command-line front end.
//!
//! Exit status: 0 ok, 1 runtime error, 2 usage, 3 resolution check failed,
//! 4 inconclusive, 5 check failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use persistence_core::functionals::FunctionalParams;
use persistence_core::specfun::{
    cross_check_tolerance, goldman_report, kappa_tau_closed, kappa_xi_report, oscillating_integral, stable_pdf_origin,
    theorem_a_constant, ConstantReport,
};
use persistence_core::stable::sample_stable;
use persistence_core::{RngStream, StableParams};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{io_error, LabError, LabResult};
use crate::identities::{run_suite, Suite, Verdict};
use crate::montecarlo::{estimate_survival, fit_exponent, survival_csv, with_threads, Resolution};
use crate::output::{document, merge_files, to_json, write_file};

pub const SEED_ENV: &str = "PERSISTENCE_LAB_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOLUTION: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "persistence-lab",
    version,
    about = "First-passage exponents of stable processes and their functionals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw increments Z_1 of the stable law, one per line.
    Sample {
        #[command(flatten)]
        run: RunArgs,
        /// Number of draws.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Estimate the survival exponent of a first-passage time.
    Theta {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Closed-form constants with their numerical cross-checks. Without
    /// --alpha (or a config file) the default lattice is evaluated.
    Constants {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run statistical identity checks.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// all, symmetry, fgb, bingham, kp, tauberian, positivity or split.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Merge JSON outputs of the other commands into one document.
    Report {
        /// Input JSON files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// key = value configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Homogeneity of the functional; absent means the process itself.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Defaults to $PERSISTENCE_LAB_SEED, then 1.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = one per core. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Stopping times may run to extension × horizon.
    #[arg(long)]
    pub extension: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub pv_epsilon: Option<f64>,
    /// Half-width of the local-time box kernel.
    #[arg(long, allow_negative_numbers = true)]
    pub bandwidth: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Defaults, then the seed environment variable, then the config file,
    /// then flags.
    pub fn resolve(&self) -> LabResult<RunConfig> {
        let mut base = RunConfig::default();
        if let Ok(s) = std::env::var(SEED_ENV) {
            base.seed = s
                .trim()
                .parse()
                .map_err(|_| LabError::Usage(format!("{SEED_ENV}={s:?} is not an unsigned integer")))?;
        }
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(io_error(path))?;
                RunConfig::parse_onto(&text, base).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?
            }
            None => base,
        };
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { c.$f = v; })*};
        }
        set!(alpha, chi, level, paths, steps, horizon, seed, threads, extension);
        if self.kappa.is_some() {
            c.kappa = self.kappa;
        }
        if self.beta.is_some() {
            c.beta = self.beta;
        }
        if self.pv_epsilon.is_some() {
            c.pv_epsilon = self.pv_epsilon;
        }
        if self.bandwidth.is_some() {
            c.bandwidth = self.bandwidth;
        }
        Ok(c)
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> LabResult<()> {
    match out {
        Some(p) => write_file(p, text),
        None => stdout.write_all(text.as_bytes()).map_err(io_error("<stdout>")),
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// exit status; messages go to `stderr`.
pub fn run(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_USAGE;
        }
        Err(e) => {
            // --help and --version
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> LabResult<i32> {
    match command {
        Command::Sample { run, n } => cmd_sample(&run, n, stdout),
        Command::Theta { run } => cmd_theta(&run, stdout, stderr),
        Command::Constants { run } => cmd_constants(&run, stdout, stderr),
        Command::Verify { run, suite } => cmd_verify(&run, suite.as_deref(), stdout, stderr),
        Command::Report { inputs, out } => {
            let merged = merge_files(&inputs)?;
            emit(out.as_deref(), &to_json(&merged)?, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

pub fn cmd_sample(args: &RunArgs, n: Option<usize>, stdout: &mut dyn Write) -> LabResult<i32> {
    let mut c = args.resolve()?;
    if let Some(n) = n {
        c.samples = n;
    }
    let params = c.params()?;
    let draws = sample_stable(&params, c.samples, RngStream::new(c.seed, 0))?;
    let mut text = String::with_capacity(draws.len() * 24);
    for x in draws {
        text.push_str(&format!("{x}\n"));
    }
    emit(args.out.as_deref(), &text, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_theta(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> LabResult<i32> {
    let c = args.resolve()?;
    let mc = c.monte_carlo()?;
    let tail = with_threads(c.threads, || estimate_survival(&mc).and_then(|run| fit_exponent(&run)))??;
    let doc = document("theta", &c, &tail)?;
    emit(args.out.as_deref(), &to_json(&doc)?, stdout)?;
    if let Some(out) = &args.out {
        write_file(&out.with_extension("csv"), &survival_csv(&tail))?;
    }
    if tail.resolution_check == Resolution::Failed {
        let _ = writeln!(
            stderr,
            "resolution check failed: fine theta {:.4} ± {:.4}, coarse {:?} ± {:?}",
            tail.theta_hat, tail.theta_stderr, tail.coarse_theta_hat, tail.coarse_theta_stderr
        );
        return Ok(EXIT_RESOLUTION);
    }
    Ok(EXIT_OK)
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub alpha: Option<f64>,
    pub kappa: Option<f64>,
    pub chi: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(flatten)]
    pub report: ConstantReport,
}

impl ConstantRow {
    fn new(params: Option<&StableParams>, beta: Option<f64>, delta: Option<f64>, report: ConstantReport) -> Self {
        let tolerance = cross_check_tolerance(&report.name);
        Self {
            alpha: params.map(|p| p.alpha()),
            kappa: params.map(|p| p.kappa()),
            chi: params.map(|p| p.chi()),
            beta,
            delta,
            tolerance,
            passed: report.within(tolerance),
            report,
        }
    }
}

pub const LATTICE_ALPHA: [f64; 4] = [1.2, 1.5, 1.8, 2.0];
pub const LATTICE_CHI: [f64; 3] = [-1.0, 0.0, 1.0];
pub const LATTICE_KAPPA: [f64; 3] = [0.5, 1.0, 2.0];
pub const LEMMA_DELTAS: [f64; 6] = [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5, 1.75];

fn functional_rows(p: &StableParams, beta: f64, eps: f64) -> LabResult<Vec<ConstantRow>> {
    let f = FunctionalParams::new(p, beta, eps)?;
    Ok(vec![
        ConstantRow::new(Some(p), Some(beta), Some(f.delta()), kappa_xi_report(p, &f)),
        ConstantRow::new(Some(p), Some(beta), Some(f.delta()), theorem_a_constant(p, &f)),
    ])
}

pub fn constant_rows(config: Option<&RunConfig>) -> LabResult<Vec<ConstantRow>> {
    let mut rows = Vec::new();
    match config {
        Some(c) => {
            let p = c.params()?;
            rows.push(ConstantRow::new(Some(&p), None, None, kappa_tau_closed(&p)));
            rows.push(ConstantRow::new(Some(&p), None, None, stable_pdf_origin(&p)?));
            if let Some(beta) = c.beta {
                // the principal-value radius does not enter any constant
                rows.extend(functional_rows(&p, beta, c.pv_epsilon.unwrap_or(1e-3))?);
                let delta = (p.alpha() - 1.0) / (p.alpha() + beta);
                rows.push(ConstantRow::new(None, None, Some(delta), oscillating_integral(delta)?));
            }
        }
        None => {
            for alpha in LATTICE_ALPHA {
                for chi in LATTICE_CHI {
                    for kappa in LATTICE_KAPPA {
                        let p = StableParams::new(alpha, kappa, chi)?;
                        rows.push(ConstantRow::new(Some(&p), None, None, kappa_tau_closed(&p)));
                    }
                }
            }
            for delta in LEMMA_DELTAS {
                rows.push(ConstantRow::new(None, None, Some(delta), oscillating_integral(delta)?));
            }
            rows.extend(functional_rows(&StableParams::brownian(), 1.0, 0.0)?);
            rows.extend(functional_rows(&StableParams::new(1.5, 1.0, 1.0)?, -1.0, 1e-3)?);
        }
    }
    rows.push(ConstantRow::new(None, None, None, goldman_report()));
    Ok(rows)
}

pub fn cmd_constants(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> LabResult<i32> {
    let single = args.alpha.is_some() || args.config.is_some();
    let c = args.resolve()?;
    let rows = constant_rows(single.then_some(&c))?;
    let doc = document("constants", &single.then_some(&c), &rows)?;
    emit(args.out.as_deref(), &to_json(&doc)?, stdout)?;
    let failed: Vec<&ConstantRow> = rows.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        let _ = writeln!(
            stderr,
            "{} cross-check off by {:?} (tolerance {})",
            r.report.name, r.report.rel_error, r.tolerance
        );
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_verify(
    args: &RunArgs,
    suite: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> LabResult<i32> {
    let mut c = args.resolve()?;
    if let Some(s) = suite {
        c.suite = s.into();
    }
    let suite: Suite = c.suite.parse()?;
    let check = c.check()?;
    let reports = with_threads(c.threads, || run_suite(suite, &check))??;
    let doc = document("verify", &c, &reports)?;
    emit(args.out.as_deref(), &to_json(&doc)?, stdout)?;
    let counted = reports.iter().filter(|r| !r.exploratory);
    let mut code = EXIT_OK;
    for r in counted {
        let _ = writeln!(
            stderr,
            "{}: {:?} (statistic {:.4}, threshold {:.4})",
            r.name, r.verdict, r.statistic, r.threshold
        );
        code = match (r.verdict, code) {
            (Verdict::Fail, _) => EXIT_FAILED,
            (Verdict::Inconclusive, EXIT_OK) => EXIT_INCONCLUSIVE,
            (_, c) => c,
        };
    }
    Ok(code)
}
