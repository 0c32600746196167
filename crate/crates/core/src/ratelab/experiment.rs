//! Convergence-rate experiments for normalized max-convolution powers.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_rate, RateFit, MIN_FIT_ROWS};
use super::sup::{sup_distance_closed, sup_distance_with, sup_monotone_product, SupBracket, SupOptions};
use crate::distributions::{Cdf, EvFamily, Kind, Scaled};
use crate::error::{domain, Error, Result};
use crate::scaling::{scaling, RhoSolver, ScalingTriple};
use crate::semigroup::power_cdf;
use crate::vonmises::{geometric_grid, r_func_upper, verify_von_mises, AuxFn};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateConfig {
    pub kind: Kind,
    pub distribution: String,
    pub alpha: f64,
    pub aux: String,
    pub aux_valid_from: f64,
    pub tol: f64,
    pub n_list: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: u64,
    pub a_n: f64,
    pub a_n_prime: f64,
    #[serde(rename = "A_n")]
    pub big_a_n: f64,
    pub sup_lo: f64,
    pub sup_hi: f64,
    pub witness_x: f64,
    pub bound_tail: Option<f64>,
    pub bound_interior: Option<f64>,
    #[serde(rename = "bound_A")]
    pub bound_a: Option<f64>,
    pub n_times_sup: f64,
    pub converged: bool,
    /// `None` when a bound component is unavailable at this `n`.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub config: RateConfig,
    /// Largest `|k| / g` on the von Mises precheck grid.
    pub von_mises_ratio_max: f64,
    pub rows: Vec<RateRow>,
    pub fit: Option<RateFit>,
    /// Smallest `n` in the list from which every row's inequality holds.
    pub onset_n0: Option<u64>,
    pub passed: bool,
}

/// Grid used for the von Mises precheck: 200 geometric points over six decades.
pub fn default_von_mises_grid(g: &AuxFn) -> Vec<f64> {
    let lo = 1.1 * if g.valid_from() > 0.0 { g.valid_from() } else { 1.0 };
    geometric_grid(lo, 1e6 * lo, 200)
}

/// `u(a_n) / (e (alpha - u(a_n))) + n r(e^{-1/n})`, the free-side bound on
/// `x >= 1`, with `u(a_n) = g(a_n) + alpha ell(e^{-1/n})`.
fn free_tail_bound(alpha: f64, g: &AuxFn, n: u64, a_n: f64) -> Option<f64> {
    if a_n < g.valid_from() {
        return None;
    }
    let nf = n as f64;
    let s = -(-1.0 / nf).exp_m1();
    // ell(e^{-1/n}) = n r(e^{-1/n})
    let ell = nf * r_func_upper(s).ok()?;
    let u = g.eval(a_n) + alpha * ell;
    if !(u >= 0.0 && u < alpha) {
        return None;
    }
    Some(u / (E * (alpha - u)) + ell)
}

fn frechet_alpha(f: &(impl Cdf + ?Sized)) -> Option<f64> {
    f.as_family().filter(|fam| fam.kind() == Kind::Classical && fam.alpha() > 0.0).map(|fam| fam.alpha())
}

/// `e^t - 1 - t` without cancellation near 0.
fn expm1_minus_id(t: f64) -> f64 {
    if t.abs() < 0.25 {
        let mut term = t * t / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= t / k;
            sum += term;
        }
        sum
    } else {
        t.exp_m1() - t
    }
}

/// Certified `sup_x |F^{boolean n}(n^{1/alpha} x) - Dagum_alpha(x)|` for Frechet `F`.
///
/// With `u = x^{-alpha}` and `v = n (e^{u/n} - 1)` the difference is
/// `(v - u) / ((1 + u)(1 + v))`, a non-decreasing factor times a
/// non-increasing one.
pub fn boolean_frechet_sup(alpha: f64, n: f64, tol: f64) -> Result<SupBracket> {
    if !(alpha > 0.0 && n >= 1.0 && n.is_finite()) {
        return Err(domain(format!("boolean Frechet sup needs alpha > 0 and n >= 1, got ({alpha}, {n})")));
    }
    let inc = move |u: f64| n * expm1_minus_id(u / n);
    let dec = move |u: f64| 1.0 / ((1.0 + u) * (1.0 + n * (u / n).exp_m1()));
    let cap = |u: f64| 1.0 / (1.0 + u);
    let u_lo = (0.2 * n * tol).sqrt();
    let u_hi = 10.0 / tol;
    let r = sup_monotone_product(inc, dec, cap, u_lo, u_hi, tol, super::DEFAULT_MAX_CELLS)?;
    let tail_right = inc(u_lo);
    let tail_left = cap(u_hi);
    Ok(SupBracket {
        lo: r.lo,
        hi: r.hi.max(tail_left).max(tail_right),
        witness_x: r.witness.powf(-1.0 / alpha),
        x_lo: u_hi.powf(-1.0 / alpha),
        x_hi: u_lo.powf(-1.0 / alpha),
        tail_left,
        tail_right,
        cells_used: r.cells_used,
        converged: r.converged,
    })
}

/// Certified `sup_x |F^{free n}(n^{1/alpha} x) - Pareto_alpha(x)|` for Frechet `F`.
///
/// With `u = x^{-alpha}` the difference is `u - n (1 - e^{-u/n})` on `u <= 1`,
/// non-decreasing, and `1 - n (1 - e^{-u/n})` beyond, non-increasing until
/// the free power vanishes.
pub fn free_frechet_sup(alpha: f64, n: f64, tol: f64) -> Result<SupBracket> {
    if !(alpha > 0.0 && n >= 1.0 && n.is_finite()) {
        return Err(domain(format!("free Frechet sup needs alpha > 0 and n >= 1, got ({alpha}, {n})")));
    }
    let one = |_: f64| 1.0;
    let none = |_: f64| f64::INFINITY;
    let rising = move |u: f64| (n * expm1_minus_id(-u / n)).max(0.0);
    let falling = move |u: f64| (1.0 + n * (-u / n).exp_m1()).max(0.0);
    let u_lo = (0.2 * n * tol).sqrt().min(0.5);
    // the free power is zero past -n ln(1 - 1/n)
    let u_hi = if n > 1.0 { -n * (-1.0 / n).ln_1p() } else { (10.0 / tol).ln() };
    let max_cells = super::DEFAULT_MAX_CELLS;
    let left = sup_monotone_product(rising, one, none, u_lo, 1.0, tol, max_cells)?;
    let right = sup_monotone_product(one, falling, none, 1.0, u_hi.max(1.0 + f64::EPSILON), tol, max_cells)?;
    let best = if left.lo >= right.lo { left } else { right };
    let tail_right = rising(u_lo);
    let tail_left = falling(u_hi);
    Ok(SupBracket {
        lo: best.lo,
        hi: left.hi.max(right.hi).max(tail_left).max(tail_right),
        witness_x: best.witness.powf(-1.0 / alpha),
        x_lo: u_hi.powf(-1.0 / alpha),
        x_hi: u_lo.powf(-1.0 / alpha),
        tail_left,
        tail_right,
        cells_used: left.cells_used + right.cells_used,
        converged: left.converged && right.converged,
    })
}

fn check_inputs(alpha: f64, n_list: &[u64], tol: f64) -> Result<Vec<u64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!("tol must lie in (0, 1e-2], got {tol}")));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidParameter("n list must be non-empty with every n >= 1".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

fn precheck(f: &dyn Cdf, alpha: f64, g: &AuxFn) -> Result<f64> {
    let report = verify_von_mises(f, alpha, g, &default_von_mises_grid(g))?;
    if !report.passed() {
        let detail = match (report.violations.first(), report.diagnostics.first()) {
            (Some(v), _) => format!("|k({})| = {} exceeds g = {}", v.x, v.k.abs(), v.g),
            (None, Some(d)) => format!("at x = {}: {}", d.x, d.message),
            _ => String::new(),
        };
        return Err(domain(format!("von Mises condition fails for {} with {}: {detail}", f.label(), g.label())));
    }
    Ok(report.ratio_max)
}

fn onset(rows: &[RateRow]) -> Option<u64> {
    let mut n0 = None;
    for row in rows.iter().rev() {
        if row.holds == Some(true) {
            n0 = Some(row.n);
        } else {
            break;
        }
    }
    n0
}

fn finish(config: RateConfig, ratio: f64, rows: Vec<RateRow>, every_row: bool) -> RateReport {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.sup_hi)).collect();
    let fit = if pts.len() >= MIN_FIT_ROWS { fit_rate(&pts).ok() } else { None };
    let onset_n0 = onset(&rows);
    let passed = if every_row { rows.iter().all(|r| r.holds == Some(true)) } else { onset_n0.is_some() };
    RateReport { config, von_mises_ratio_max: ratio, rows, fit, onset_n0, passed }
}

fn config(kind: Kind, f: &dyn Cdf, alpha: f64, g: &AuxFn, ns: &[u64], tol: f64) -> RateConfig {
    RateConfig {
        kind,
        distribution: f.label(),
        alpha,
        aux: g.label().to_string(),
        aux_valid_from: g.valid_from(),
        tol,
        n_list: ns.to_vec(),
    }
}

fn row_from(t: &ScalingTriple, b: &SupBracket) -> RateRow {
    RateRow {
        n: t.n,
        a_n: t.a_n,
        a_n_prime: t.a_n_prime,
        big_a_n: t.big_a_n,
        sup_lo: b.lo,
        sup_hi: b.hi,
        witness_x: b.witness_x,
        bound_tail: None,
        bound_interior: None,
        bound_a: None,
        n_times_sup: t.n as f64 * b.hi,
        converged: b.converged,
        holds: None,
    }
}

/// Rows of `sup_x |F^{boolean n}(a_n x) - Dagum_alpha(x)|` with the interior,
/// rescaling and tail bound components at each `n`.
pub fn boolean_rate_experiment(
    f: &dyn Cdf,
    alpha: f64,
    g: &AuxFn,
    n_list: &[u64],
    tol: f64,
) -> Result<RateReport> {
    let ns = check_inputs(alpha, n_list, tol)?;
    let ratio = precheck(f, alpha, g)?;
    let rho = RhoSolver::new(alpha, g.clone())?;
    let limit = EvFamily::dagum(alpha)?;
    let fast = frechet_alpha(f) == Some(alpha);

    let rows = ns
        .par_iter()
        .map(|&n| -> Result<RateRow> {
            let t = scaling(f, n)?;
            let bracket = if fast {
                boolean_frechet_sup(alpha, n as f64, tol)?
            } else {
                let p = power_cdf(Scaled::new(f, t.a_n)?, n as f64, Kind::Boolean)?;
                sup_distance_closed(&p, &limit, tol)?
            };
            let mut row = row_from(&t, &bracket);
            let g_rho = g.eval(rho.rho(t.a_n)?);
            row.bound_interior = (g_rho < alpha).then(|| g_rho / (E * (alpha - g_rho)));
            row.bound_a = Some(alpha * (1.0 / t.big_a_n - 1.0));
            row.bound_tail = free_tail_bound(alpha, g, n, t.a_n).map(|b| b - (-1.0 / n as f64).exp_m1());
            row.holds = match (row.bound_interior, row.bound_a, row.bound_tail) {
                (Some(i), Some(a), Some(tail)) => Some(row.sup_hi <= i + a + tail),
                _ => None,
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(config(Kind::Boolean, f, alpha, g, &ns, tol), ratio, rows, false))
}

/// Rows of `sup_x |F^{free n}(a_n x) - Pareto_alpha(x)|`. For the Frechet law
/// every row must satisfy `sup_hi <= 1/n + tol`.
pub fn free_rate_experiment(
    f: &dyn Cdf,
    alpha: f64,
    g: &AuxFn,
    n_list: &[u64],
    tol: f64,
) -> Result<RateReport> {
    let ns = check_inputs(alpha, n_list, tol)?;
    let ratio = precheck(f, alpha, g)?;
    let limit = EvFamily::pareto(alpha)?;
    let frechet = frechet_alpha(f) == Some(alpha);

    let rows = ns
        .par_iter()
        .map(|&n| -> Result<RateRow> {
            let t = scaling(f, n)?;
            let bracket = if frechet {
                free_frechet_sup(alpha, n as f64, tol)?
            } else {
                let p = power_cdf(Scaled::new(f, t.a_n)?, n as f64, Kind::Free)?;
                sup_distance_closed(&p, &limit, tol)?
            };
            let mut row = row_from(&t, &bracket);
            row.bound_tail = free_tail_bound(alpha, g, n, t.a_n);
            row.holds = if frechet {
                Some(row.sup_hi <= 1.0 / n as f64 + tol)
            } else {
                row.bound_tail.map(|b| row.sup_hi <= b + tol)
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(config(Kind::Free, f, alpha, g, &ns, tol), ratio, rows, frechet))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorRow {
    pub n: u64,
    pub a_n_prime: f64,
    pub sup_lo: f64,
    pub sup_hi: f64,
    pub witness_x: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorReport {
    pub alpha: f64,
    pub rows: Vec<InteriorRow>,
    pub onset_n0: Option<u64>,
}

/// `sup_{0<x<1} |F^{boolean n}(a_n' x) - Dagum_alpha(x)|` against
/// `g(rho(a_n)) / (e (alpha - g(rho(a_n))))`.
pub fn interior_bound_experiment(
    f: &dyn Cdf,
    alpha: f64,
    g: &AuxFn,
    n_list: &[u64],
    tol: f64,
) -> Result<InteriorReport> {
    let ns = check_inputs(alpha, n_list, tol)?;
    let rho = RhoSolver::new(alpha, g.clone())?;
    let limit = EvFamily::dagum(alpha)?;
    // left of x_lo both laws stay below tol / 10
    let x_lo = (0.1 * tol).powf(1.0 / alpha);
    let rows = ns
        .par_iter()
        .map(|&n| -> Result<InteriorRow> {
            let t = scaling(f, n)?;
            let p = power_cdf(Scaled::new(f, t.a_n_prime)?, n as f64, Kind::Boolean)?;
            let opts = SupOptions::new(tol).interval(x_lo.min(0.5), 1.0).closed(true, false);
            let b = sup_distance_with(&p, &limit, &opts)?;
            let g_rho = g.eval(rho.rho(t.a_n)?);
            let bound = if g_rho < alpha { g_rho / (E * (alpha - g_rho)) } else { f64::INFINITY };
            Ok(InteriorRow {
                n,
                a_n_prime: t.a_n_prime,
                sup_lo: b.lo,
                sup_hi: b.hi,
                witness_x: b.witness_x,
                bound,
                holds: b.hi <= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut onset_n0 = None;
    for r in rows.iter().rev() {
        if !r.holds {
            break;
        }
        onset_n0 = Some(r.n);
    }
    Ok(InteriorReport { alpha, rows, onset_n0 })
}
