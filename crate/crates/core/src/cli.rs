//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 domain error, 2 usage error, 3 bound violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::distributions::{Cdf, EvFamily, Kind, Scaled};
use crate::error::Error;
use crate::ratelab::{
    boolean_rate_experiment, check_dagum_lipschitz, check_sandwich, check_tail_chain,
    free_rate_experiment, homomorphism_suite, render_svg, to_json, write_csv, RateReport,
};
use crate::scaling::{scaling, RhoSolver};
use crate::semigroup::power_cdf;
use crate::vonmises::{geometric_grid, verify_von_mises, AuxFn};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "MAXCONV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "maxconv", version, about = "Max-convolution powers and certified rate checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Vonmises,
    Sandwich,
    DagumLipschitz,
    TailChain,
    Homomorphism,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Classical,
    Free,
    Boolean,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Classical => Kind::Classical,
            KindArg::Free => Kind::Free,
            KindArg::Boolean => Kind::Boolean,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print `x,cdf,survival` for a limit law.
    Dist {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// Print `x,cdf,survival` for the n-fold power of a law.
    Power {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: f64,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        x: Vec<f64>,
        /// Evaluate at `a_n x` with `a_n = F^{<-}(e^{-1/n})`.
        #[arg(long)]
        normalized: bool,
    },
    /// Print `n,a_n,a_n_prime,A_n`.
    Scaling {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Print `x,rho(x)`, or `t,rho_inv(t)` with `--inverse`.
    Rho {
        #[arg(long)]
        alpha: f64,
        /// Tabulated auxiliary function (`valid_from = v` and `x, g` lines).
        #[arg(long)]
        aux: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long)]
        inverse: bool,
    },
    /// Run a verification suite and print a JSON verdict.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value = "frechet")]
        family: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        aux: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        /// Grid size for the pointwise suites.
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha1: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha2: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a convergence-rate experiment over a geometric range of n.
    Rate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value = "frechet")]
        family: String,
        #[arg(long)]
        alpha: f64,
        /// `start:stop:points`, geometric, rounded to distinct integers.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        aux: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `start:stop:points` into geometric integer levels.
pub fn parse_n_range(range: &str) -> std::result::Result<Vec<u64>, String> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("n range `{range}` is not start:stop:points"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}` in n range"));
    let (start, stop, points) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(start >= 1.0 && stop >= start && stop.is_finite()) {
        return Err(format!("n range needs 1 <= start <= stop, got {start}:{stop}"));
    }
    if !(points >= 1.0 && points.fract() == 0.0) {
        return Err(format!("n range needs a positive integer point count, got {points}"));
    }
    let mut ns: Vec<u64> =
        geometric_grid(start, stop, points as usize).into_iter().map(|x| x.round() as u64).collect();
    ns.dedup();
    Ok(ns)
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // a pool built earlier in the same process stays in place
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the CLI on `args` (program name first), writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn load_aux(path: &Option<PathBuf>, alpha: f64) -> crate::Result<AuxFn> {
    match path {
        Some(p) => AuxFn::from_path(p),
        None => AuxFn::frechet(alpha),
    }
}

fn emit(out: &mut dyn Write, output: &Option<PathBuf>, text: &str) -> std::result::Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verdict(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Dist { family, alpha, x } => {
            let f = EvFamily::from_name(&family, alpha)?;
            for x in x {
                let (p, s) = f.eval_pair(x);
                writeln!(out, "{x},{p},{s}")?;
            }
            Ok(EXIT_PASS)
        }
        Command::Power { family, alpha, kind, n, x, normalized } => {
            let f = EvFamily::from_name(&family, alpha)?;
            let scale = if normalized {
                if n.fract() != 0.0 {
                    return Err(Failure::Usage("--normalized needs an integer --n".into()));
                }
                scaling(&f, n as u64)?.a_n
            } else {
                1.0
            };
            let p = power_cdf(Scaled::new(f, scale)?, n, kind.into())?;
            for x in x {
                let (c, s) = p.eval_pair(x);
                writeln!(out, "{x},{c},{s}")?;
            }
            Ok(EXIT_PASS)
        }
        Command::Scaling { family, alpha, n } => {
            let f = EvFamily::from_name(&family, alpha)?;
            writeln!(out, "n,a_n,a_n_prime,A_n")?;
            for n in n {
                let t = scaling(&f, n)?;
                writeln!(out, "{},{},{},{}", t.n, t.a_n, t.a_n_prime, t.big_a_n)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Rho { alpha, aux, x, inverse } => {
            let solver = RhoSolver::new(alpha, load_aux(&aux, alpha)?)?;
            for x in x {
                let v = if inverse { solver.rho_inverse(x)? } else { solver.rho(x)? };
                writeln!(out, "{x},{v}")?;
            }
            Ok(EXIT_PASS)
        }
        Command::Verify { suite, family, alpha, aux, n, points, alpha1, alpha2, tol, samples, seed, output } => {
            let (passed, body) = match suite {
                Suite::Vonmises => {
                    let f = EvFamily::from_name(&family, alpha)?;
                    let g = load_aux(&aux, alpha)?;
                    let lo = 1.1 * g.valid_from().max(f64::MIN_POSITIVE);
                    let grid = geometric_grid(lo, lo.max(1e6 / 1.1) * 1.1, points);
                    let r = verify_von_mises(&f, alpha, &g, &grid)?;
                    let body = json!({
                        "suite": "vonmises",
                        "passed": r.passed(),
                        "config": { "family": family, "alpha": alpha, "aux": g.label(), "points": points },
                        "ratio_max": r.ratio_max,
                        "violations": r.violations,
                        "diagnostics": r.diagnostics,
                    });
                    (r.passed(), body)
                }
                Suite::Sandwich => {
                    let f = EvFamily::from_name(&family, alpha)?;
                    let g = load_aux(&aux, alpha)?;
                    let grid: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();
                    let r = check_sandwich(&f, alpha, &g, n, &grid)?;
                    let body = json!({
                        "suite": "sandwich",
                        "passed": r.passed,
                        "config": { "family": family, "alpha": alpha, "aux": g.label(), "n": n, "points": points },
                        "report": r,
                    });
                    (r.passed, body)
                }
                Suite::DagumLipschitz => {
                    let r = check_dagum_lipschitz(alpha1, alpha2, tol)?;
                    let body = json!({
                        "suite": "dagum-lipschitz",
                        "passed": r.passed,
                        "config": { "alpha1": alpha1, "alpha2": alpha2, "tol": tol },
                        "measured": r.bracket.hi,
                        "measured_lo": r.bracket.lo,
                        "bound": r.bound,
                        "witness_x": r.bracket.witness_x,
                    });
                    (r.passed, body)
                }
                Suite::TailChain => {
                    let f = EvFamily::from_name(&family, alpha)?;
                    let grid = geometric_grid(1.0, 1e6, points);
                    let r = check_tail_chain(&f, alpha, n, &grid)?;
                    let body = json!({
                        "suite": "tail-chain",
                        "passed": r.passed,
                        "config": { "family": family, "alpha": alpha, "n": n, "points": points },
                        "report": r,
                    });
                    (r.passed, body)
                }
                Suite::Homomorphism => {
                    let r = homomorphism_suite(samples, seed);
                    let body = json!({
                        "suite": "homomorphism",
                        "passed": r.passed,
                        "config": { "samples": samples, "seed": seed },
                        "checks": r.checks,
                    });
                    (r.passed, body)
                }
            };
            let text = serde_json::to_string_pretty(&body).map_err(Error::from)? + "\n";
            emit(out, &output, &text)?;
            Ok(verdict(passed))
        }
        Command::Rate { kind, family, alpha, n, tol, format, output, aux } => {
            let ns = parse_n_range(&n).map_err(Failure::Usage)?;
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Failure::Usage(format!("--tol must lie in (0, 1e-2], got {tol}")));
            }
            let kind = Kind::from(kind);
            if kind == Kind::Classical {
                return Err(Failure::Usage("rate supports --kind boolean or free".into()));
            }
            if !family.eq_ignore_ascii_case("frechet") && aux.is_none() {
                return Err(Failure::Usage(format!(
                    "rate supports --family frechet; other families need an auxiliary function via --aux (got `{family}`)"
                )));
            }
            let f = EvFamily::from_name(&family, alpha)?;
            let g = load_aux(&aux, alpha)?;
            let report: RateReport = match kind {
                Kind::Boolean => boolean_rate_experiment(&f, alpha, &g, &ns, tol)?,
                _ => free_rate_experiment(&f, alpha, &g, &ns, tol)?,
            };
            let text = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&report, &mut buf)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
                Format::Json => to_json(&report)? + "\n",
                Format::Svg => render_svg(&report),
            };
            emit(out, &output, &text)?;
            Ok(verdict(report.passed))
        }
    }
}
