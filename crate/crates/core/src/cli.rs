//! Command-line front end.
//!
//! Exit codes: 0 when every case passes, 1 when a check fails, 2 on usage
//! errors (including arguments that violate a routine's preconditions).

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::channel::{verify_cptp, ProductChannel, WhChannel};
use crate::dims::{SiteDims, SubsetMask};
use crate::entropy::ExponentRange;
use crate::error::Error;
use crate::expansion::{additivity_rhs, inclusion_exclusion_collapse, purity_report, subset_weight};
use crate::optimize::{certify_additivity, minimize_entropy_output, OptimizerConfig, GAP_LOWER_TOL, GAP_UPPER_TOL};
use crate::random::{random_density_matrix, random_pure_state, random_unitary, rng_from_seed, sub_seed};
use crate::report::{emit_report, Case, CaseInput, ConfigEcho, LogBase, OutputFormat, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wh-meo",
    version,
    about = "Werner-Holevo channel entropy and additivity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the closed-form output purity with the assembled output matrix.
    VerifyIdentity(RunArgs),
    /// Minimal p-Renyi output entropy of the product channel.
    Meo(RunArgs),
    /// Optimizer estimate for the product channel against the sum of single-channel values.
    Additivity(RunArgs),
    /// Choi-matrix positivity, trace preservation and covariance for each listed dimension.
    ChoiCheck(RunArgs),
    /// Exact integer inclusion-exclusion collapse for every subset of sites.
    CollapseCheck(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentity(_) => "verify-identity",
            Command::Meo(_) => "meo",
            Command::Additivity(_) => "additivity",
            Command::ChoiCheck(_) => "choi-check",
            Command::CollapseCheck(_) => "collapse-check",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::VerifyIdentity(a)
            | Command::Meo(a)
            | Command::Additivity(a)
            | Command::ChoiCheck(a)
            | Command::CollapseCheck(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Comma-separated site dimensions, e.g. 3,3,4 (for choi-check: the list of d to test).
    #[arg(long, value_parser = parse_dims)]
    dims: Option<DimList>,
    /// Renyi exponent; 1 selects the von Neumann entropy.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Random states (or unitaries) per configuration.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0.1)]
    initial_step: f64,
    #[arg(long, default_value_t = 0.5)]
    step_shrink: f64,
    #[arg(long, default_value_t = 1e-12)]
    converge_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    min_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    fd_step: f64,
    /// Tolerance for identity, CPTP and covariance checks.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Allowed amount by which an optimizer estimate may undercut the analytic value.
    #[arg(long, default_value_t = GAP_LOWER_TOL)]
    gap_lower: f64,
    /// Allowed amount by which an optimizer estimate may exceed the analytic value.
    #[arg(long, default_value_t = GAP_UPPER_TOL)]
    gap_upper: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Permit p > 2 for `meo`; no analytic value is asserted in that case.
    #[arg(long)]
    allow_p_above_2: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = LogBase::Nats)]
    log_base: LogBase,
    /// Record the measured wall time (otherwise reported as 0 so output is reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct DimList(Vec<usize>);

fn parse_dims(s: &str) -> Result<DimList, String> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad dimension '{part}': {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(DimList)
}

impl RunArgs {
    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            initial_step: self.initial_step,
            step_shrink: self.step_shrink,
            converge_tol: self.converge_tol,
            min_step: self.min_step,
            fd_step: self.fd_step,
            seed: self.seed,
            threads: self.threads,
            exponent_range: if self.allow_p_above_2 {
                ExponentRange::Unrestricted
            } else {
                ExponentRange::Standard
            },
        }
    }

    fn echo(&self, dims: &[usize]) -> ConfigEcho {
        ConfigEcho {
            dims: dims.to_vec(),
            p: self.p,
            seed: self.seed,
            restarts: self.restarts,
            samples: self.samples,
            max_iters: self.max_iters,
            initial_step: self.initial_step,
            step_shrink: self.step_shrink,
            converge_tol: self.converge_tol,
            min_step: self.min_step,
            fd_step: self.fd_step,
            tol: self.tol,
            gap_lower: self.gap_lower,
            gap_upper: self.gap_upper,
            threads: self.threads,
            allow_p_above_2: self.allow_p_above_2,
            format: self.format,
            log_base: self.log_base,
        }
    }
}

/// Failure before any check ran.
#[derive(Debug)]
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Vec<Case>, UsageError>;

fn dim_list(args: &RunArgs) -> Result<Vec<usize>, UsageError> {
    let DimList(dims) = args
        .dims
        .clone()
        .ok_or_else(|| UsageError("--dims is required for this command".into()))?;
    Ok(dims)
}

fn site_dims(args: &RunArgs) -> Result<SiteDims, UsageError> {
    Ok(SiteDims::new(dim_list(args)?)?)
}

fn verify_identity(args: &RunArgs, dims: &SiteDims) -> CmdResult {
    let mut cases = Vec::with_capacity(2 * args.samples);
    for s in 0..args.samples {
        let mut rng = rng_from_seed(sub_seed(args.seed, s as u64));
        let omega = random_pure_state(&mut rng, dims);
        let rep = purity_report(dims, &omega)?;
        let input = CaseInput {
            dims: Some(dims.as_slice().to_vec()),
            sample: Some(s),
            ..Default::default()
        };
        let err = rep.abs_error();
        cases.push(Case {
            id: format!("identity/{s}"),
            input: input.clone(),
            expected: Some(rep.brute_force),
            actual: rep.closed_form,
            abs_error: err,
            pass: err <= args.tol,
            entropic: false,
        });
        let excess = (rep.closed_form - rep.bound).max(0.0);
        cases.push(Case {
            id: format!("bound/{s}"),
            input,
            expected: Some(rep.bound),
            actual: rep.closed_form,
            abs_error: excess,
            pass: excess <= args.tol,
            entropic: false,
        });
    }
    Ok(cases)
}

fn gap_case(args: &RunArgs, id: &str, dims: &SiteDims, expected: Option<f64>, actual: f64) -> Case {
    let (abs_error, pass) = match expected {
        Some(e) => {
            let gap = actual - e;
            (gap.abs(), gap >= -args.gap_lower && gap <= args.gap_upper)
        }
        None => (0.0, true),
    };
    Case {
        id: id.into(),
        input: CaseInput {
            dims: Some(dims.as_slice().to_vec()),
            p: Some(args.p),
            ..Default::default()
        },
        expected,
        actual,
        abs_error,
        pass,
        entropic: true,
    }
}

fn meo(args: &RunArgs, dims: &SiteDims) -> CmdResult {
    let pc = ProductChannel::from_dims(dims);
    let result = minimize_entropy_output(&pc, args.p, &args.optimizer())?;
    let expected = (args.p <= 2.0).then(|| additivity_rhs(dims));
    Ok(vec![gap_case(args, "meo", dims, expected, result.best_value)])
}

fn additivity(args: &RunArgs, dims: &SiteDims) -> CmdResult {
    let cert = certify_additivity(dims, args.p, &args.optimizer())?;
    let mut main = gap_case(
        args,
        "additivity",
        dims,
        Some(cert.meo_sum_of_singles),
        cert.meo_product_estimate,
    );
    main.abs_error = cert.gap.abs();
    let distance = Case {
        id: "argmin-product-distance".into(),
        input: main.input.clone(),
        expected: None,
        actual: cert.argmin_product_distance,
        abs_error: 0.0,
        pass: true,
        entropic: false,
    };
    Ok(vec![main, distance])
}

fn choi_check(args: &RunArgs, ds: &[usize]) -> CmdResult {
    let mut cases = Vec::new();
    for &d in ds {
        let ch = WhChannel::new(d)?;
        if d > 32 {
            return Err(UsageError(format!("dimension {d} is too large for a Choi check")));
        }
        let report = verify_cptp(&ch.choi(), d)?;
        let input = CaseInput {
            dims: Some(vec![d]),
            ..Default::default()
        };
        let neg = (-report.min_eigenvalue).max(0.0);
        cases.push(Case {
            id: format!("cp/d{d}"),
            input: input.clone(),
            expected: Some(0.0),
            actual: report.min_eigenvalue,
            abs_error: neg,
            pass: neg <= args.tol,
            entropic: false,
        });
        cases.push(Case {
            id: format!("tp/d{d}"),
            input: input.clone(),
            expected: Some(0.0),
            actual: report.trace_preservation_error,
            abs_error: report.trace_preservation_error,
            pass: report.trace_preservation_error <= args.tol,
            entropic: false,
        });
        let site = SiteDims::single(d)?;
        for s in 0..args.samples {
            let mut rng = rng_from_seed(sub_seed(args.seed ^ ((d as u64) << 32), s as u64));
            let u = random_unitary(&mut rng, d);
            let rho = random_density_matrix(&mut rng, &site, d);
            let r = ch.covariance_residual(&u, &rho)?;
            cases.push(Case {
                id: format!("covariance/d{d}/{s}"),
                input: CaseInput {
                    sample: Some(s),
                    ..input.clone()
                },
                expected: Some(0.0),
                actual: r,
                abs_error: r,
                pass: r <= args.tol,
                entropic: false,
            });
        }
    }
    Ok(cases)
}

fn collapse_check(dims: &SiteDims) -> CmdResult {
    let n = dims.num_sites();
    let mut cases = Vec::new();
    let mut weight_sum: u128 = 0;
    for lambda in dims.subsets() {
        let expected = subset_weight(dims, lambda);
        weight_sum += expected as u128;
        let actual = inclusion_exclusion_collapse(dims, lambda);
        cases.push(Case {
            id: format!("collapse/{}", lambda.bits()),
            input: CaseInput {
                dims: Some(dims.as_slice().to_vec()),
                subset: Some(lambda.bits()),
                ..Default::default()
            },
            expected: Some(expected as f64),
            actual: actual as f64,
            abs_error: (actual - expected as i128).unsigned_abs() as f64,
            pass: actual == expected as i128,
            entropic: false,
        });
    }
    let target: u128 = dims.as_slice().iter().map(|&d| (d - 1) as u128).product();
    cases.push(Case {
        id: "weight-sum".into(),
        input: CaseInput {
            dims: Some(dims.as_slice().to_vec()),
            subset: Some(SubsetMask::full(n).bits()),
            ..Default::default()
        },
        expected: Some(target as f64),
        actual: weight_sum as f64,
        abs_error: target.abs_diff(weight_sum) as f64,
        pass: target == weight_sum,
        entropic: false,
    });
    Ok(cases)
}

fn dispatch(cmd: &Command) -> Result<(Vec<usize>, Vec<Case>), UsageError> {
    let args = cmd.args();
    if args.p > 2.0 && !matches!(cmd, Command::Meo(_)) {
        return Err(UsageError(format!("p = {} is outside [1, 2]", args.p)));
    }
    if args.allow_p_above_2 {
        ExponentRange::Unrestricted.check(args.p)?;
    } else {
        ExponentRange::Standard.check(args.p)?;
    }
    if !(args.tol >= 0.0) || !(args.gap_lower >= 0.0) || !(args.gap_upper >= 0.0) {
        return Err(UsageError("tolerances must be non-negative".into()));
    }
    args.optimizer().validate()?;
    match cmd {
        Command::ChoiCheck(a) => {
            let ds = a.dims.clone().map(|d| d.0).unwrap_or_else(|| vec![2, 3, 4, 5]);
            if ds.is_empty() {
                return Err(UsageError("--dims must list at least one dimension".into()));
            }
            let cases = choi_check(a, &ds)?;
            Ok((ds, cases))
        }
        Command::VerifyIdentity(a) => {
            let dims = site_dims(a)?;
            Ok((dims.as_slice().to_vec(), verify_identity(a, &dims)?))
        }
        Command::Meo(a) => {
            let dims = site_dims(a)?;
            Ok((dims.as_slice().to_vec(), meo(a, &dims)?))
        }
        Command::Additivity(a) => {
            let dims = site_dims(a)?;
            if dims.num_sites() < 2 {
                return Err(UsageError("additivity needs at least two sites".into()));
            }
            Ok((dims.as_slice().to_vec(), additivity(a, &dims)?))
        }
        Command::CollapseCheck(a) => {
            // integer-only: no operator on the full space is built
            let dims = SiteDims::unbounded(dim_list(a)?)?;
            if dims.num_sites() > 12 {
                return Err(UsageError("collapse-check supports at most 12 sites".into()));
            }
            Ok((dims.as_slice().to_vec(), collapse_check(&dims)?))
        }
    }
}

/// Runs the CLI on `argv` (program name first), writing the report to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let args = cli.command.args().clone();
    let start = Instant::now();
    let (dims, cases) = match dispatch(&cli.command) {
        Ok(v) => v,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "usage: wh-meo {} --dims D1,D2,... [OPTIONS]", cli.command.name());
            return EXIT_USAGE;
        }
    };
    let wall_time_ms = if args.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let report = Report::new(cli.command.name(), args.echo(&dims), cases, wall_time_ms).in_units(args.log_base);
    let _ = write!(out, "{}", emit_report(&report, args.format));
    if report.summary.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("wh-meo").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dims_parser() {
        assert_eq!(parse_dims("3,3,4").unwrap(), DimList(vec![3, 3, 4]));
        assert_eq!(parse_dims("5").unwrap(), DimList(vec![5]));
        assert!(parse_dims("3,x").is_err());
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_str(&["meo", "--dims", "3", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn missing_dims_is_usage_error() {
        let (code, _, err) = run_str(&["meo"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("usage"));
    }

    #[test]
    fn precondition_violations_are_usage_errors() {
        assert_eq!(run_str(&["meo", "--dims", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["meo", "--dims", "3", "--p", "0.5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["meo", "--dims", "3", "--p", "3"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["additivity", "--dims", "3", "--p", "1"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["additivity", "--dims", "3,3", "--p", "3", "--allow-p-above-2"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&["meo", "--dims", "3", "--restarts", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn p_above_two_with_override_asserts_nothing() {
        let (code, out, _) = run_str(&["meo", "--dims", "3", "--p", "3", "--allow-p-above-2", "--restarts", "2"]);
        assert_eq!(code, EXIT_PASS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["cases"][0]["expected"].is_null());
    }

    #[test]
    fn collapse_check_passes() {
        let (code, out, _) = run_str(&["collapse-check", "--dims", "3,4,5"]);
        assert_eq!(code, EXIT_PASS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["cases"].as_array().unwrap().len(), 9);
        // beyond the matrix-size cap, still integer-exact
        let (code, _, _) = run_str(&["collapse-check", "--dims", "7,7,7,7,7"]);
        assert_eq!(code, EXIT_PASS);
    }

    #[test]
    fn failing_check_exits_one() {
        // a negative tolerance is rejected, but zero tolerance on an inexact check fails
        let (code, out, _) = run_str(&["verify-identity", "--dims", "3,3", "--samples", "20", "--tol", "0"]);
        assert_eq!(code, EXIT_FAIL, "{out}");
    }

    #[test]
    fn text_and_csv_formats() {
        let (code, out, _) = run_str(&["collapse-check", "--dims", "2,3", "--format", "text"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("summary: PASS"));
        let (_, out, _) = run_str(&["collapse-check", "--dims", "2,3", "--format", "csv"]);
        assert!(out.starts_with("id,input,expected,actual,abs_error,pass\n"));
        assert_eq!(out.lines().count(), 1 + 4 + 1);
    }
}
