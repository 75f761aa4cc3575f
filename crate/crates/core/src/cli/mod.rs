//! The `exoflex` command: scenario handling, subcommands and report writers.
//!
//! Exit codes: `0` success, `1` invalid input, `2` a checked invariant
//! failed, `3` internal error.

pub mod scenario;
pub mod verify;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use scenario::{ComponentChoice, Scenario};
pub use verify::{elliptic_suite, run_suite, Check, SuiteReport};

use crate::bricard::exotic_face_check;
use crate::configspace::y_bounds;
use crate::elliptic::kind_report;
use crate::octa::Violation;
use crate::volume::{bellows_sweep, loop_increment, volume_profile, BellowsOptions, ProfileRow};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "exoflex", version, about = "Exotic flexible octahedra in the 3-sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
    /// Family parameters.
    #[arg(long, global = true, value_name = "p1,p2,q1,q2", allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Trace nodes per component.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub component: Option<ComponentChoice>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    /// Monte-Carlo samples per sampled volume.
    #[arg(long, global = true, value_name = "N")]
    pub mc_samples: Option<u64>,
    /// Sampled spot checks per mask and component (`bellows`).
    #[arg(long, global = true, value_name = "N")]
    pub spot_checks: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the parameter inequalities and report the θ and y ranges.
    Validate,
    /// Trace the components and write their volume profiles as CSV.
    Sweep,
    /// Sweep all antipode variants and report their volume spreads.
    Bellows,
    /// Report the link structure and the per-face elliptic kinds.
    Classify,
    /// Run the full invariant suite.
    Verify,
    /// Check the elliptic kernel identities.
    EllipticCheck,
}

impl Cli {
    /// The scenario after applying the file and then the flags.
    pub fn scenario(&self) -> crate::Result<Scenario> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        if let Some(text) = &self.params {
            s.params = parse_params(text)?;
        }
        if let Some(n) = self.samples {
            s.samples = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(c) = self.component {
            s.component = c;
        }
        if let Some(n) = self.mc_samples {
            s.mc_samples = n;
        }
        if let Some(n) = self.spot_checks {
            s.spot_checks = n;
        }
        for t in &self.tol {
            s.set_tolerance(t)?;
        }
        Ok(s)
    }
}

pub fn parse_params(text: &str) -> crate::Result<[f64; 4]> {
    let values = text
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad parameter {x:?} in {text:?}"))))
        .collect::<crate::Result<Vec<_>>>()?;
    values.try_into().map_err(|v: Vec<f64>| Error::Parse(format!("expected 4 parameters, got {}", v.len())))
}

/// Which exit code an error maps to.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) | Error::ThetaOutOfRange { .. } | Error::Modulus(_) => EXIT_INVALID,
        Error::InconsistentDiagonals(_) | Error::Ambiguous(_) | Error::FitFailed { .. } => EXIT_INVARIANT,
        Error::Domain { .. } | Error::DegenerateFace(_) | Error::ApexSelection(_) => EXIT_INTERNAL,
    }
}

#[derive(Debug)]
enum Failure {
    Run(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

struct Outcome {
    stdout: String,
    code: i32,
}

impl Outcome {
    fn json<T: Serialize>(value: &T, passed: bool) -> Self {
        let mut stdout = serde_json::to_string_pretty(value).expect("reports serialize");
        stdout.push('\n');
        Self { stdout, code: if passed { EXIT_OK } else { EXIT_INVARIANT } }
    }
}

#[derive(Serialize)]
struct ValidateReport<'a> {
    params: [f64; 4],
    valid: bool,
    violations: &'a [Violation],
    theta_bounds: Option<(f64, f64)>,
    y_bounds: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct SweepSummary {
    params: [f64; 4],
    samples: usize,
    components: BTreeMap<&'static str, SweepComponent>,
}

#[derive(Serialize)]
struct SweepComponent {
    file: String,
    rows: usize,
    min: f64,
    max: f64,
    spread: f64,
    loop_increment: f64,
}

#[derive(Serialize)]
struct ClassifyReport {
    params: [f64; 4],
    link: crate::bricard::WitnessReport,
    kinds: BTreeMap<String, crate::elliptic::FaceKindReport>,
}

/// Writes the profile rows as CSV.
pub fn write_profile_csv<W: Write>(rows: &[ProfileRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn write_report(dir: Option<&Path>, name: &str, text: &str) -> Result<(), Failure> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn execute(command: Command, s: &Scenario, out: Option<&Path>) -> Result<Outcome, Failure> {
    let p = s.exotic_params();
    match command {
        Command::Validate => {
            let violations = p.validate();
            let valid = violations.is_empty();
            let report = ValidateReport {
                params: s.params,
                valid,
                violations: &violations,
                theta_bounds: valid.then(|| p.theta_bounds()),
                y_bounds: if valid { Some(y_bounds(&p)?) } else { None },
            };
            let mut o = Outcome::json(&report, true);
            if !valid {
                o.code = EXIT_INVALID;
            }
            write_report(out, "validate.json", &o.stdout)?;
            Ok(o)
        }
        Command::Sweep => {
            p.check()?;
            let dir = out.unwrap_or(Path::new("."));
            fs::create_dir_all(dir)?;
            let mut components = BTreeMap::new();
            for c in s.component.components() {
                let profile = volume_profile(&p, c, s.samples)?;
                let file = format!("profile_{}.csv", c.name());
                write_profile_csv(&profile.rows, fs::File::create(dir.join(&file))?)?;
                components.insert(
                    c.name(),
                    SweepComponent {
                        file,
                        rows: profile.rows.len(),
                        min: profile.min,
                        max: profile.max,
                        spread: profile.spread,
                        loop_increment: loop_increment(&profile),
                    },
                );
            }
            Ok(Outcome::json(&SweepSummary { params: s.params, samples: s.samples, components }, true))
        }
        Command::Bellows => {
            let options = BellowsOptions {
                nodes: s.samples,
                threshold: s.tolerances.nonconstant,
                spot_checks: s.spot_checks,
                mc_samples: s.mc_samples,
                seed: s.seed,
                sigmas: s.tolerances.oracle_sigmas,
                masks: s.antipode_masks()?,
            };
            let report = bellows_sweep(&p, &options)?;
            let passed = report.confirmed() && report.spot_checks_within_sigmas != Some(false);
            let o = Outcome::json(&report, passed);
            write_report(out, "bellows.json", &o.stdout)?;
            Ok(o)
        }
        Command::Classify => {
            let link = exotic_face_check(&p, s.samples.min(256), s.tolerances.classification)?;
            let kinds = kind_report(&p, s.samples.min(256), s.tolerances.fit)?;
            let passed = link.passed();
            let o = Outcome::json(&ClassifyReport { params: s.params, link, kinds }, passed);
            write_report(out, "classify.json", &o.stdout)?;
            Ok(o)
        }
        Command::Verify => {
            let report = run_suite(s)?;
            let o = Outcome::json(&report, report.passed);
            write_report(out, "verify.json", &o.stdout)?;
            Ok(o)
        }
        Command::EllipticCheck => {
            let report = elliptic_suite()?;
            let o = Outcome::json(&report, report.passed);
            write_report(out, "elliptic.json", &o.stdout)?;
            Ok(o)
        }
    }
}

/// Runs one invocation, writing reports to `stdout` and diagnostics to
/// `stderr`. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = cli.scenario().map_err(Failure::from).and_then(|s| execute(cli.command, &s, cli.out.as_deref()));
    match result {
        Ok(o) => {
            if stdout.write_all(o.stdout.as_bytes()).is_err() {
                return EXIT_INTERNAL;
            }
            o.code
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
