//! Pointwise checks of the inequalities behind the rate bounds, and a
//! randomized suite for the algebraic laws of the three calculi.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sup::{sup_distance_with, SupBracket, SupOptions};
use crate::distributions::{Cdf, EvFamily, Kind, Scaled};
use crate::error::{Error, Result};
use crate::scaling::scaling;
use crate::semigroup::{
    boolean_combine, boolean_power_ps, classical_power_ps, free_power_ps, power_cdf, power_ps, x_inv,
    x_map, UnitValue,
};
use crate::vonmises::AuxFn;

/// Slack below which a pointwise inequality counts as violated.
pub const SLACK_FLOOR: f64 = -1e-12;
const KEPT_EXAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckPoint {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
    /// `f64::INFINITY` when nothing was checked.
    pub min_slack: f64,
    /// First violating points, for reproduction.
    pub examples: Vec<CheckPoint>,
    pub passed: bool,
}

impl CheckReport {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            skipped: 0,
            violations: 0,
            min_slack: f64::INFINITY,
            examples: Vec::new(),
            passed: true,
        }
    }

    /// Records `lhs <= rhs`, failing when `rhs - lhs < floor`.
    fn record(&mut self, x: f64, lhs: f64, rhs: f64, floor: f64) {
        let slack = rhs - lhs;
        self.checked += 1;
        if slack.is_nan() || slack < floor {
            self.violations += 1;
            self.passed = false;
            if self.examples.len() < KEPT_EXAMPLES {
                self.examples.push(CheckPoint { x, lhs, rhs, slack });
            }
        }
        self.min_slack = self.min_slack.min(slack);
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }
}

fn dagum_cdf(alpha: f64, x: f64) -> f64 {
    1.0 / (1.0 + x.powf(-alpha))
}

/// `Dagum_{alpha + g(a_n' x)}(x) <= F^{boolean n}(a_n' x) <= Dagum_{alpha - g(a_n' x)}(x)`
/// at grid points `x` in `(0, 1)` with `a_n' x >= valid_from` and `g(a_n' x) < alpha`.
pub fn check_sandwich(f: &dyn Cdf, alpha: f64, g: &AuxFn, n: u64, grid: &[f64]) -> Result<CheckReport> {
    let t = scaling(f, n)?;
    let p = power_cdf(Scaled::new(f, t.a_n_prime)?, n as f64, Kind::Boolean)?;
    let mut report = CheckReport::new(format!("sandwich n={n}"));
    for &x in grid {
        let y = t.a_n_prime * x;
        if !(x > 0.0 && x < 1.0) || y < g.valid_from() {
            report.skip();
            continue;
        }
        let gy = g.eval(y);
        if !(gy >= 0.0 && gy < alpha) {
            report.skip();
            continue;
        }
        let mid = p.cdf(x);
        let lower = dagum_cdf(alpha + gy, x);
        let upper = dagum_cdf(alpha - gy, x);
        report.record(x, lower, mid, SLACK_FLOOR);
        report.record(x, mid, upper, SLACK_FLOOR);
    }
    // each admissible point carries two inequalities
    report.checked /= 2;
    Ok(report)
}

/// `|F^{boolean n}(a_n x) - Dagum(x)| <= |x^{-alpha} - n S| + x^{-alpha} S`
/// with `S = 1 - F(a_n x)`, at grid points `x >= 1`.
pub fn check_tail_chain(f: &dyn Cdf, alpha: f64, n: u64, grid: &[f64]) -> Result<CheckReport> {
    let t = scaling(f, n)?;
    let nf = n as f64;
    let mut report = CheckReport::new(format!("tail-chain n={n}"));
    for &x in grid {
        if !(x >= 1.0 && x.is_finite()) {
            report.skip();
            continue;
        }
        let (p, s) = f.eval_pair(t.a_n * x);
        let w = x.powf(-alpha);
        let boolean_s = boolean_power_ps(p, s, nf).1;
        let lhs = (boolean_s - w / (1.0 + w)).abs();
        let rhs = (w - nf * s).abs() + w * s;
        report.record(x, lhs, rhs, -1e-15 * (1.0 + rhs));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub bracket: SupBracket,
    pub bound: f64,
    pub passed: bool,
}

/// `e^{-1} |alpha2 - alpha1| / min(alpha1, alpha2)`
pub fn dagum_lipschitz_bound(alpha1: f64, alpha2: f64) -> f64 {
    (alpha2 - alpha1).abs() / (E * alpha1.min(alpha2))
}

/// Certified `sup_{0<x<1} |Dagum_{alpha1} - Dagum_{alpha2}|` against
/// [`dagum_lipschitz_bound`].
pub fn check_dagum_lipschitz(alpha1: f64, alpha2: f64, tol: f64) -> Result<LipschitzReport> {
    let d1 = EvFamily::dagum(alpha1)?;
    let d2 = EvFamily::dagum(alpha2)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {tol}")));
    }
    // left of x_lo both laws stay below tol / 10
    let x_lo = (0.1 * tol).powf(1.0 / alpha1.min(alpha2)).min(0.5);
    let opts = SupOptions::new(tol).interval(x_lo.max(f64::MIN_POSITIVE), 1.0).closed(true, false);
    let bracket = sup_distance_with(&d1, &d2, &opts)?;
    let bound = dagum_lipschitz_bound(alpha1, alpha2);
    Ok(LipschitzReport { alpha1, alpha2, bracket, bound, passed: bracket.hi <= bound + tol })
}

/// `|Dagum(A x) - Dagum(x)| <= alpha (A^{-1} - 1)` at grid points in `(0, 1)`.
pub fn check_rescaling(alpha: f64, big_a: f64, grid: &[f64]) -> Result<CheckReport> {
    if !(big_a > 0.0 && big_a <= 1.0) {
        return Err(Error::InvalidParameter(format!("A_n must lie in (0, 1], got {big_a}")));
    }
    let bound = alpha * (1.0 / big_a - 1.0);
    let mut report = CheckReport::new(format!("rescaling A={big_a}"));
    for &x in grid {
        if !(x > 0.0 && x < 1.0) {
            report.skip();
            continue;
        }
        let lhs = (dagum_cdf(alpha, big_a * x) - dagum_cdf(alpha, x)).abs();
        report.record(x, lhs, bound, SLACK_FLOOR);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

pub const LAW_TOL: f64 = 1e-12;

/// Uniform on `(0, 1)`, with a quarter of the draws pushed towards 1.
fn draw_unit(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen();
    let u = if rng.gen_bool(0.25) { 1.0 - 10f64.powf(-12.0 * u) } else { u };
    u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

/// Draws until `samples` points are checked; points whose route through `X`
/// underflows are skipped and counted.
fn run_law(
    name: &str,
    samples: usize,
    rng: &mut ChaCha8Rng,
    mut law: impl FnMut(&mut ChaCha8Rng) -> Option<(f64, f64, f64)>,
) -> CheckReport {
    let mut report = CheckReport::new(name);
    let cap = samples.saturating_mul(100).max(1000);
    let mut draws = 0;
    while report.checked < samples && draws < cap {
        draws += 1;
        match law(rng) {
            Some((x, lhs, rhs)) => report.record(x, (lhs - rhs).abs(), LAW_TOL, 0.0),
            None => report.skip(),
        }
    }
    if report.checked < samples {
        report.passed = false;
    }
    report
}

fn unit(u: f64) -> UnitValue {
    UnitValue::new(u).expect("sampled in [0, 1]")
}

/// Randomized checks of the `X` homomorphism, its inverse, the Boolean power
/// through `X`, power composition and the ordering of the three powers.
pub fn homomorphism_suite(samples: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiny = f64::MIN_POSITIVE;
    let mut checks = Vec::new();

    checks.push(run_law("X(u + v) = X(u) X(v)", samples, &mut rng, |r| {
        let (u, v) = (draw_unit(r), draw_unit(r));
        let prod = x_map(unit(u)).get() * x_map(unit(v)).get();
        (prod >= tiny).then(|| (u, x_map(boolean_combine(unit(u), unit(v))).get(), prod))
    }));

    checks.push(run_law("Xinv(X(u)) = u", samples, &mut rng, |r| {
        let u = draw_unit(r);
        let xu = x_map(unit(u)).get();
        (xu >= tiny).then(|| (u, x_inv(unit(xu)).get(), u))
    }));

    checks.push(run_law("X(Xinv(u)) = u", samples, &mut rng, |r| {
        let u = draw_unit(r);
        Some((u, x_map(x_inv(unit(u))).get(), u))
    }));

    checks.push(run_law("boolean power = Xinv(X(u)^n)", samples, &mut rng, |r| {
        let u = draw_unit(r);
        let n = r.gen_range(1.0..50.0);
        let xn = x_map(unit(u)).get().powf(n);
        if xn < tiny {
            return None;
        }
        Some((u, x_inv(unit(xn)).get(), boolean_power_ps(u, 1.0 - u, n).0))
    }));

    checks.push(run_law("boolean power = iterated combine", samples, &mut rng, |r| {
        let u = draw_unit(r);
        let n = r.gen_range(1..=12u32);
        let folded = (1..n).fold(unit(u), |acc, _| boolean_combine(acc, unit(u)));
        Some((u, folded.get(), boolean_power_ps(u, 1.0 - u, n as f64).0))
    }));

    for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
        checks.push(run_law(&format!("{kind} (u^m)^n = u^(mn)"), samples, &mut rng, |r| {
            let u = draw_unit(r);
            let (m, n) = (r.gen_range(1.0..20.0), r.gen_range(1.0..20.0));
            let inner = power_ps(kind, u, 1.0 - u, m);
            let twice = power_ps(kind, inner.0, inner.1, n).0;
            Some((u, twice, power_ps(kind, u, 1.0 - u, m * n).0))
        }));
    }

    let mut order = CheckReport::new("free <= classical <= boolean");
    let mut order_rng = rng.clone();
    for _ in 0..samples {
        let u = draw_unit(&mut order_rng);
        let n = order_rng.gen_range(1.0..1000.0);
        let s = 1.0 - u;
        let free = free_power_ps(u, s, n).0;
        let classical = classical_power_ps(u, s, n).0;
        let boolean = boolean_power_ps(u, s, n).0;
        order.record(u, free, classical, -LAW_TOL);
        order.record(u, classical, boolean, -LAW_TOL);
    }
    order.checked /= 2;
    checks.push(order);

    let passed = checks.iter().all(|c| c.passed);
    SuiteReport { name: "homomorphism".into(), seed, checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vonmises::geometric_grid;

    #[test]
    fn sandwich_for_frechet() {
        let f = EvFamily::frechet(1.0).unwrap();
        let g = AuxFn::frechet(1.0).unwrap();
        let r = check_sandwich(&f, 1.0, &g, 10_000, &[0.1, 0.3, 0.5, 0.9]).unwrap();
        assert!(r.passed && r.checked == 4 && r.skipped == 0, "{r:?}");
        // a'_n x below valid_from, and x outside (0, 1)
        let r = check_sandwich(&f, 1.0, &g, 1, &[0.5, 1.5]).unwrap();
        assert_eq!((r.checked, r.skipped), (0, 2));
        // g(y) >= alpha
        let big = AuxFn::constant(2.0, 0.0).unwrap();
        let r = check_sandwich(&f, 1.0, &big, 100, &[0.5]).unwrap();
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn sandwich_collapses_for_tiny_g() {
        let f = EvFamily::frechet(1.0).unwrap();
        let g = AuxFn::constant(1e-14, 0.0).unwrap();
        let t = scaling(&f, 1_000_000).unwrap();
        let p = power_cdf(Scaled::new(&f, t.a_n_prime).unwrap(), 1e6, Kind::Boolean).unwrap();
        for &x in &[0.2, 0.5, 0.8] {
            let width = dagum_cdf(1.0 - 1e-14, x) - dagum_cdf(1.0 + 1e-14, x);
            assert!(width.abs() < 1e-13);
            assert!((p.cdf(x) - dagum_cdf(1.0, x)).abs() < 1e-5);
        }
        let r = check_sandwich(&f, 1.0, &g, 1_000_000, &[0.5]).unwrap();
        assert!(r.min_slack.abs() < 1e-5);
    }

    #[test]
    fn tail_chain_for_frechet() {
        let f = EvFamily::frechet(1.0).unwrap();
        let r = check_tail_chain(&f, 1.0, 1000, &[1.0, 2.0, 10.0, 100.0]).unwrap();
        assert!(r.passed && r.checked == 4, "{r:?}");
        let r = check_tail_chain(&f, 1.0, 1, &geometric_grid(1.0, 1e6, 100)).unwrap();
        assert!(r.passed);
        let r = check_tail_chain(&f, 1.0, 10, &[0.5]).unwrap();
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn tail_chain_endpoint_algebra() {
        // at x = 1 the right side equals (1 - e^{-1/n}) + n r(e^{-1/n})
        let f = EvFamily::frechet(1.0).unwrap();
        for &n in &[1u64, 10, 1000] {
            let nf = n as f64;
            let s = -(-1.0 / nf).exp_m1();
            let rhs = (1.0 - nf * s).abs() + s;
            let r = crate::vonmises::r_func_upper(s).unwrap();
            assert!((rhs - (s + nf * r)).abs() < 1e-15);
            let rep = check_tail_chain(&f, 1.0, n, &[1.0]).unwrap();
            assert!(rep.passed);
        }
    }

    #[test]
    fn lipschitz_examples() {
        let r = check_dagum_lipschitz(1.0, 2.0, 1e-9).unwrap();
        assert!(r.passed && r.bracket.hi <= (-1.0f64).exp());
        let r = check_dagum_lipschitz(2.0, 2.0, 1e-9).unwrap();
        assert_eq!(r.bracket.hi, 0.0);
        let r = check_dagum_lipschitz(2.0, 2.1, 1e-9).unwrap();
        assert!((r.bound - 0.018_393_972_058_572_116).abs() < 1e-15);
        // grid oracle
        let oracle = (1..100_000)
            .map(|i| {
                let x = i as f64 / 100_000.0;
                (dagum_cdf(2.0, x) - dagum_cdf(2.1, x)).abs()
            })
            .fold(0.0, f64::max);
        assert!(r.bracket.lo >= oracle - 1e-9 && r.bracket.hi >= oracle && r.bracket.hi < r.bound);
    }

    #[test]
    fn rescaling_bound() {
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        for &n in &[1u64, 10, 10_000] {
            let a = scaling(&EvFamily::frechet(1.0).unwrap(), n).unwrap().big_a_n;
            assert!(check_rescaling(1.0, a, &grid).unwrap().passed);
        }
        assert!(check_rescaling(1.0, 1.5, &grid).is_err());
    }

    #[test]
    fn algebraic_suite_passes() {
        let r = homomorphism_suite(10_000, 7);
        for c in &r.checks {
            assert!(c.passed && c.checked == 10_000, "{c:?}");
        }
        assert!(r.checks.iter().any(|c| c.skipped > 0));
        assert_eq!(r, homomorphism_suite(10_000, 7));
    }
}
