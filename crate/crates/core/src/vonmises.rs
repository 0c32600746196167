//! The von Mises functionals `k` and `h`, the helpers `r` and `ell`, the
//! bound `u = g + alpha * ell(F)` on `|h|`, and pointwise verification of
//! `|k| <= g` for a candidate auxiliary function `g`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::Cdf;
use crate::error::{domain, Error, Result};
use crate::stable::{log_excess, neg_ln};

/// Functionals refuse to evaluate where `F` or `1 - F` drops below this.
pub const POLE_GUARD: f64 = 1e-300;

/// Non-increasing bound `g` on `|k_{alpha,F}|`, asserted only on `[valid_from, inf)`.
#[derive(Clone)]
pub struct AuxFn {
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    valid_from: f64,
    label: String,
}

impl fmt::Debug for AuxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AuxFn")
            .field("label", &self.label)
            .field("valid_from", &self.valid_from)
            .finish()
    }
}

impl AuxFn {
    pub fn new(
        label: impl Into<String>,
        valid_from: f64,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !valid_from.is_finite() {
            return Err(Error::InvalidParameter(format!("valid_from must be finite, got {valid_from}")));
        }
        Ok(Self { g: Arc::new(g), valid_from, label: label.into() })
    }

    /// `g(x) = alpha / (x^alpha - 1)` from `2^{1/alpha}` on, where `g <= alpha`.
    pub fn frechet(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        Self::new(format!("alpha/(x^alpha-1), alpha={alpha}"), 2f64.powf(1.0 / alpha), move |x| {
            alpha / (x.powf(alpha) - 1.0)
        })
    }

    pub fn constant(c: f64, valid_from: f64) -> Result<Self> {
        Self::new(format!("const {c}"), valid_from, move |_| c)
    }

    /// Piecewise log-log interpolation through `(x, g)` points, extended past
    /// the last point with the final segment's slope.
    pub fn tabulated(points: Vec<(f64, f64)>, valid_from: Option<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("need at least two (x, g) points".into()));
        }
        if points.iter().any(|&(x, g)| !(x > 0.0 && x.is_finite() && g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter("tabulated points need x > 0 and g > 0".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameter("tabulated x must be strictly increasing".into()));
        }
        let first = points[0].0;
        let valid_from = valid_from.unwrap_or(first);
        if valid_from < first {
            return Err(Error::InvalidParameter(format!(
                "valid_from {valid_from} lies below the first tabulated point {first}"
            )));
        }
        let logs: Vec<(f64, f64)> = points.iter().map(|&(x, g)| (x.ln(), g.ln())).collect();
        let label = format!("tabulated[{}]", logs.len());
        Self::new(label, valid_from, move |x| {
            let lx = x.ln();
            let i = logs.partition_point(|&(l, _)| l <= lx).clamp(1, logs.len() - 1);
            let (x0, y0) = logs[i - 1];
            let (x1, y1) = logs[i];
            (y0 + (y1 - y0) * (lx - x0) / (x1 - x0)).exp()
        })
    }

    /// Reads `valid_from = <v>` (optional) and `x, g` lines; `#` starts a comment.
    pub fn from_str_table(text: &str) -> Result<Self> {
        let mut valid_from = None;
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("valid_from") {
                let v = rest.trim_start_matches([' ', '=', ':']).trim();
                valid_from = Some(v.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: bad valid_from `{v}`", lineno + 1))
                })?);
                continue;
            }
            let mut it = line.split([',', ' ', '\t']).filter(|t| !t.is_empty());
            let parse = |t: Option<&str>| -> Result<f64> {
                t.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `x, g`", lineno + 1)))
            };
            let x = parse(it.next())?;
            let g = parse(it.next())?;
            points.push((x, g));
        }
        Self::tabulated(points, valid_from)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_str_table(&std::fs::read_to_string(path)?)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn valid_from(&self) -> f64 {
        self.valid_from
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks monotonicity on a geometric grid over `[x0, 1e6 x0]` and the
    /// decay `g(1e6 x0) < g(x0) / 10`.
    pub fn check_shape(&self) -> Result<()> {
        let x0 = self.valid_from.max(f64::MIN_POSITIVE);
        let pts = 400;
        let mut prev = self.eval(x0);
        for i in 1..=pts {
            let x = x0 * 1e6f64.powf(i as f64 / pts as f64);
            let g = self.eval(x);
            if !(g <= prev) {
                return Err(Error::InvalidParameter(format!(
                    "auxiliary function increases near x = {x}: {prev} -> {g}"
                )));
            }
            prev = g;
        }
        if !(self.eval(1e6 * x0) < self.eval(x0) / 10.0) {
            return Err(Error::InvalidParameter("auxiliary function does not decay".into()));
        }
        Ok(())
    }
}

fn guarded(f: &(impl Cdf + ?Sized), x: f64) -> Result<(f64, f64, f64)> {
    let (p, s) = f.eval_pair(x);
    if !(p >= POLE_GUARD && s >= POLE_GUARD) {
        return Err(Error::Pole { x, cdf: p, survival: s });
    }
    let d = f.density(x).ok_or_else(|| Error::NoDensity(f.label()))?;
    Ok((p, s, d))
}

/// `k_{alpha,F}(x) = x F'(x) / (F(x) (1 - F(x))) - alpha`.
pub fn k_func(f: &(impl Cdf + ?Sized), alpha: f64, x: f64) -> Result<f64> {
    let (p, s, d) = guarded(f, x)?;
    Ok(x * d / (p * s) - alpha)
}

/// `h_{alpha,F}(x) = x F'(x) / (F(x) (-ln F(x))) - alpha`.
pub fn h_func(f: &(impl Cdf + ?Sized), alpha: f64, x: f64) -> Result<f64> {
    let (p, s, d) = guarded(f, x)?;
    Ok(x * d / (p * neg_ln(p, s)) - alpha)
}

fn open_unit(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{u} is not in (0, 1)")))
    }
}

/// `r(u) = -ln u - (1 - u)`.
pub fn r_func(u: f64) -> Result<f64> {
    open_unit(u)?;
    Ok(log_excess(u, 1.0 - u))
}

/// `r` at `u = 1 - s`, for tail levels known through their survival value.
pub fn r_func_upper(s: f64) -> Result<f64> {
    open_unit(s)?;
    Ok(log_excess(1.0 - s, s))
}

/// `ell(u) = r(u) / (-ln u)`, decreasing from 1 at `0+` to 0 at `1-`.
pub fn ell_func(u: f64) -> Result<f64> {
    open_unit(u)?;
    Ok(ell_ps(u, 1.0 - u))
}

pub(crate) fn ell_ps(p: f64, s: f64) -> f64 {
    log_excess(p, s) / neg_ln(p, s)
}

/// `u(x) = g(x) + alpha * ell(F(x))`; dominates `|h_{alpha,F}(x)|` where `|k| <= g`.
pub fn u_bound(f: &(impl Cdf + ?Sized), alpha: f64, g: &AuxFn, x: f64) -> Result<f64> {
    if x < g.valid_from() {
        return Err(domain(format!("x = {x} below the auxiliary function's range {}", g.valid_from())));
    }
    let (p, s) = f.eval_pair(x);
    if !(p >= POLE_GUARD && s >= POLE_GUARD) {
        return Err(Error::Pole { x, cdf: p, survival: s });
    }
    Ok(g.eval(x) + alpha * ell_ps(p, s))
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub x: f64,
    pub k: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub x: f64,
    pub message: String,
}

/// Pointwise outcome of `|k_{alpha,F}| <= g` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct VonMisesReport {
    pub distribution: String,
    pub aux: String,
    pub alpha: f64,
    pub grid: Vec<f64>,
    /// `None` where the functional hit a pole.
    pub k: Vec<Option<f64>>,
    pub g: Vec<f64>,
    pub ratio_max: f64,
    pub violations: Vec<Violation>,
    pub diagnostics: Vec<Diagnostic>,
}

impl VonMisesReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.diagnostics.is_empty()
    }
}

pub fn verify_von_mises(
    f: &(impl Cdf + ?Sized),
    alpha: f64,
    g: &AuxFn,
    grid: &[f64],
) -> Result<VonMisesReport> {
    if let Some(&x) = grid.iter().find(|&&x| !(x >= g.valid_from())) {
        return Err(domain(format!(
            "grid point {x} lies below the auxiliary function's range {}",
            g.valid_from()
        )));
    }
    let evals: Vec<(Result<f64>, f64)> =
        grid.par_iter().map(|&x| (k_func(f, alpha, x), g.eval(x))).collect();

    let mut report = VonMisesReport {
        distribution: f.label(),
        aux: g.label().to_string(),
        alpha,
        grid: grid.to_vec(),
        k: Vec::with_capacity(grid.len()),
        g: Vec::with_capacity(grid.len()),
        ratio_max: 0.0,
        violations: Vec::new(),
        diagnostics: Vec::new(),
    };
    for (&x, (k, gx)) in grid.iter().zip(evals) {
        report.g.push(gx);
        match k {
            Ok(k) => {
                let ratio = if k == 0.0 { 0.0 } else { k.abs() / gx };
                report.ratio_max = report.ratio_max.max(ratio);
                if ratio > 1.0 || ratio.is_nan() {
                    report.violations.push(Violation { x, k, g: gx });
                }
                report.k.push(Some(k));
            }
            Err(e) => {
                report.diagnostics.push(Diagnostic { x, message: e.to_string() });
                report.k.push(None);
            }
        }
    }
    Ok(report)
}

/// `points` geometric samples over `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln() / (points - 1) as f64;
            let mut v: Vec<f64> = (0..points).map(|i| lo * (ratio * i as f64).exp()).collect();
            v[points - 1] = hi;
            v
        }
    }
}
