//! Normalizing sequences and the crossover scale `rho`.
//!
//! For `F` in the Boolean domain of attraction of the Dagum law,
//! `a_n = F^{<-}(e^{-1/n})`, `a_n' = F^{<-}(n / (n+1))` and `A_n = a_n / a_n'`.
//! The crossover scale is the inverse of
//! `rho_inv(t) = t * (alpha e / g(t) - (e + 1))^{1 / (alpha - g(t))}`,
//! defined where `g(t) < alpha e / (e + 1)`.

use std::f64::consts::E;

use serde::Serialize;

use crate::distributions::{Cdf, Kind};
use crate::error::{domain, Error, Result};
use crate::solve::{bisect_flip, expand_up};
use crate::vonmises::AuxFn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingTriple {
    pub n: u64,
    pub a_n: f64,
    pub a_n_prime: f64,
    #[serde(rename = "A_n")]
    pub big_a_n: f64,
}

impl ScalingTriple {
    /// Closed forms for the Frechet law: `a_n = n^{1/alpha}`,
    /// `a_n' = ln(1 + 1/n)^{-1/alpha}`, `A_n = (n ln(1 + 1/n))^{1/alpha}`.
    pub fn frechet(alpha: f64, n: u64) -> Result<Self> {
        check_n(n)?;
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let nf = n as f64;
        let l = (1.0 / nf).ln_1p();
        Ok(Self {
            n,
            a_n: nf.powf(1.0 / alpha),
            a_n_prime: l.powf(-1.0 / alpha),
            big_a_n: (nf * l).powf(1.0 / alpha),
        })
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(domain("n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Solves `F(a_n) = e^{-1/n}` and `F(a_n') = n/(n+1)` through the
/// generalized inverse, with closed forms for the Frechet family.
pub fn scaling(f: &(impl Cdf + ?Sized), n: u64) -> Result<ScalingTriple> {
    check_n(n)?;
    if let Some(fam) = f.as_family() {
        if fam.kind() == Kind::Classical && fam.alpha() > 0.0 {
            return ScalingTriple::frechet(fam.alpha(), n);
        }
    }
    let nf = n as f64;
    let a_n = f.quantile_upper(-(-1.0 / nf).exp_m1())?;
    let a_n_prime = f.quantile_upper(1.0 / (nf + 1.0))?;
    for (name, v) in [("a_n", a_n), ("a_n'", a_n_prime)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Solver(format!(
                "{name} = {v} for n = {n}: the quantile is not a positive finite level of {}",
                f.label()
            )));
        }
    }
    Ok(ScalingTriple { n, a_n, a_n_prime, big_a_n: a_n / a_n_prime })
}

const MAX_DOUBLINGS: usize = 1100;

/// Evaluates `rho_inv` and inverts it by bracketing and bisection.
#[derive(Debug, Clone)]
pub struct RhoSolver {
    alpha: f64,
    g: AuxFn,
    t_min: f64,
}

impl RhoSolver {
    /// Locates `t_min`, the lower end of `{ t >= valid_from : g(t) < alpha e / (e+1) }`.
    pub fn new(alpha: f64, g: AuxFn) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let threshold = alpha * E / (E + 1.0);
        let below = |t: f64| g.eval(t) < threshold;
        let start = g.valid_from();
        let t_min = if below(start) {
            start
        } else {
            let base = start.max(f64::MIN_POSITIVE);
            let hi = expand_up(base, 2000, below).ok_or_else(|| {
                Error::Solver(format!(
                    "auxiliary function never drops below alpha e/(e+1) = {threshold}"
                ))
            })?;
            bisect_flip(hi / 2.0, hi, 200, below).1
        };
        Ok(Self { alpha, g, t_min })
    }

    pub fn frechet(alpha: f64) -> Result<Self> {
        Self::new(alpha, AuxFn::frechet(alpha)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn aux(&self) -> &AuxFn {
        &self.g
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    fn parts(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > self.t_min) {
            return Err(domain(format!("t = {t} must exceed t_min = {}", self.t_min)));
        }
        let gt = self.g.eval(t);
        if !(gt < self.alpha) {
            return Err(domain(format!("g({t}) = {gt} is not below alpha = {}", self.alpha)));
        }
        let base = self.alpha * E / gt - (E + 1.0);
        if !(base > 0.0) {
            return Err(domain(format!("rho_inv base {base} is not positive at t = {t}")));
        }
        Ok((base, 1.0 / (self.alpha - gt)))
    }

    /// `t * (alpha e / g(t) - (e+1))^{1/(alpha - g(t))}`; `inf` past `f64::MAX`.
    pub fn rho_inverse(&self, t: f64) -> Result<f64> {
        let (base, expo) = self.parts(t)?;
        let direct = t * base.powf(expo);
        if direct.is_finite() {
            Ok(direct)
        } else {
            Ok((t.ln() + expo * base.ln()).exp())
        }
    }

    /// `ln rho_inv(t)`, finite for every admissible `t`.
    pub fn ln_rho_inverse(&self, t: f64) -> Result<f64> {
        let (base, expo) = self.parts(t)?;
        Ok(t.ln() + expo * base.ln())
    }

    /// The `t > t_min` with `rho_inv(t) = x`.
    pub fn rho(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(domain(format!("rho needs a positive finite argument, got {x}")));
        }
        let target = x.ln();
        let eval = |t: f64| self.ln_rho_inverse(t).unwrap_or(f64::NAN);

        let mut lo = self.t_min * (1.0 + 1e-6);
        if lo == self.t_min {
            lo = next_up(self.t_min);
        }
        let mut shrink = 0;
        while !(eval(lo) <= target) {
            let next = self.t_min + 0.5 * (lo - self.t_min);
            shrink += 1;
            if next <= self.t_min || shrink > 200 {
                return Err(domain(format!(
                    "x = {x} lies below the range of rho_inv near t_min = {}",
                    self.t_min
                )));
            }
            lo = next;
        }
        let hi = expand_up(lo * 2.0, MAX_DOUBLINGS, |t| eval(t) >= target).ok_or_else(|| {
            Error::Solver(format!(
                "no upper bracket for rho({x}) after {MAX_DOUBLINGS} doublings from t = {}",
                lo * 2.0
            ))
        })?;
        let (lo, hi) = bisect_flip(lo, hi, 2200, |t| {
            let v = eval(t);
            v >= target || v.is_nan()
        });
        let (vlo, vhi) = (eval(lo), eval(hi));
        let (t, v) = if (vlo - target).abs() <= (vhi - target).abs() { (lo, vlo) } else { (hi, vhi) };
        let residual = (v - target).abs();
        let adjacent = hi <= next_up(next_up(lo));
        if residual > 1e-10 && !adjacent {
            return Err(Error::Solver(format!(
                "rho({x}): bracket [{lo}, {hi}] collapsed with relative residual {residual:e}"
            )));
        }
        Ok(t)
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Leading term `e^{-1/(2 alpha)} sqrt(x)` of `rho` for the Frechet auxiliary function.
pub fn frechet_rho_asymptotic(alpha: f64, x: f64) -> f64 {
    (-0.5 / alpha).exp() * x.sqrt()
}
