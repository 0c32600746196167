//! Max-convolution on `[0, 1]`: the Boolean operation, the n-fold powers of
//! the three calculi, and the isomorphism `X(u) = exp(1 - 1/u)` carrying the
//! Boolean semigroup onto `([0, 1], *)`.
//!
//! Powers accept real `n >= 1`. Internally everything runs on `(p, s)` pairs
//! (see [`crate::stable`]); the `UnitValue` functions are thin wrappers.

use std::fmt;

use crate::distributions::{Cdf, EvFamily, Kind};
use crate::error::{domain, Result};
use crate::stable::neg_ln;

/// A probability in `[0, 1]`. Out-of-range input is rejected, not clamped.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitValue(f64);

impl UnitValue {
    pub fn new(u: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&u) {
            Ok(Self(u))
        } else {
            Err(domain(format!("{u} is not in [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    fn pair(self) -> (f64, f64) {
        (self.0, 1.0 - self.0)
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<UnitValue> for f64 {
    fn from(u: UnitValue) -> f64 {
        u.0
    }
}

fn check_order(n: f64) -> Result<()> {
    if n >= 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("power order must be a finite real >= 1, got {n}")))
    }
}

/// `u ∪∨ v`: `(r^{-1} - 1) = (u^{-1} - 1) + (v^{-1} - 1)`, and `0` if either is `0`.
pub fn boolean_combine(u: UnitValue, v: UnitValue) -> UnitValue {
    if u.0 == 0.0 || v.0 == 0.0 {
        return UnitValue(0.0);
    }
    let odds = (1.0 - u.0) / u.0 + (1.0 - v.0) / v.0;
    UnitValue(1.0 / (1.0 + odds))
}

pub fn boolean_power_point(u: UnitValue, n: f64) -> Result<UnitValue> {
    check_order(n)?;
    let (p, s) = u.pair();
    Ok(UnitValue(boolean_power_ps(p, s, n).0))
}

pub fn free_power_point(u: UnitValue, n: f64) -> Result<UnitValue> {
    check_order(n)?;
    let (p, s) = u.pair();
    Ok(UnitValue(free_power_ps(p, s, n).0))
}

pub fn classical_power_point(u: UnitValue, n: f64) -> Result<UnitValue> {
    check_order(n)?;
    let (p, s) = u.pair();
    Ok(UnitValue(classical_power_ps(p, s, n).0))
}

pub fn power_point(kind: Kind, u: UnitValue, n: f64) -> Result<UnitValue> {
    match kind {
        Kind::Classical => classical_power_point(u, n),
        Kind::Free => free_power_point(u, n),
        Kind::Boolean => boolean_power_point(u, n),
    }
}

/// `X(u) = exp(1 - 1/u)`, with `X(0) = 0`. Underflow to `0` for tiny `u` is exact.
pub fn x_map(u: UnitValue) -> UnitValue {
    let (p, s) = u.pair();
    UnitValue(x_map_ps(p, s).0)
}

/// `X^{<-1>}(u) = 1 / (1 - ln u)`, with `X^{<-1>}(0) = 0`.
pub fn x_inv(u: UnitValue) -> UnitValue {
    let (p, s) = u.pair();
    UnitValue(x_inv_ps(p, s).0)
}

/// Boolean power `p / (n - (n-1) p)` written as `p / (1 + (n-1) s)`.
#[inline]
pub fn boolean_power_ps(p: f64, s: f64, n: f64) -> (f64, f64) {
    let den = 1.0 + (n - 1.0) * s;
    (p / den, n * s / den)
}

/// Free power `max{1 - n s, 0}`.
#[inline]
pub fn free_power_ps(_p: f64, s: f64, n: f64) -> (f64, f64) {
    let ns = n * s;
    if ns >= 1.0 {
        (0.0, 1.0)
    } else {
        (1.0 - ns, ns)
    }
}

/// Classical power `p^n` via `exp(n ln p)`.
#[inline]
pub fn classical_power_ps(p: f64, s: f64, n: f64) -> (f64, f64) {
    if p == 0.0 {
        return (0.0, 1.0);
    }
    let l = -n * neg_ln(p, s);
    (l.exp(), -l.exp_m1())
}

#[inline]
pub fn power_ps(kind: Kind, p: f64, s: f64, n: f64) -> (f64, f64) {
    match kind {
        Kind::Classical => classical_power_ps(p, s, n),
        Kind::Free => free_power_ps(p, s, n),
        Kind::Boolean => boolean_power_ps(p, s, n),
    }
}

#[inline]
pub fn x_map_ps(p: f64, s: f64) -> (f64, f64) {
    if p == 0.0 {
        return (0.0, 1.0);
    }
    let q = s / p;
    ((-q).exp(), -(-q).exp_m1())
}

#[inline]
pub fn x_inv_ps(p: f64, s: f64) -> (f64, f64) {
    if p == 0.0 {
        return (0.0, 1.0);
    }
    let l = neg_ln(p, s);
    (1.0 / (1.0 + l), l / (1.0 + l))
}

/// Lazily evaluated n-fold max-convolution power of a distribution function.
#[derive(Debug, Clone)]
pub struct PowerCdf<C> {
    base: C,
    n: f64,
    kind: Kind,
}

/// `F^{n}` in the chosen calculus, evaluated through `F`'s survival channel.
pub fn power_cdf<C: Cdf>(base: C, n: f64, kind: Kind) -> Result<PowerCdf<C>> {
    check_order(n)?;
    Ok(PowerCdf { base, n, kind })
}

impl<C: Cdf> PowerCdf<C> {
    pub fn order(&self) -> f64 {
        self.n
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn base(&self) -> &C {
        &self.base
    }
}

impl<C: Cdf> Cdf for PowerCdf<C> {
    fn cdf(&self, x: f64) -> f64 {
        self.eval_pair(x).0
    }

    fn survival(&self, x: f64) -> f64 {
        self.eval_pair(x).1
    }

    fn eval_pair(&self, x: f64) -> (f64, f64) {
        let (p, s) = self.base.eval_pair(x);
        power_ps(self.kind, p, s, self.n)
    }

    fn density(&self, x: f64) -> Option<f64> {
        let d = self.base.density(x)?;
        let (p, s) = self.base.eval_pair(x);
        let n = self.n;
        Some(match self.kind {
            Kind::Boolean => {
                let den = 1.0 + (n - 1.0) * s;
                n * d / (den * den)
            }
            Kind::Classical => {
                if p == 0.0 {
                    if n == 1.0 {
                        d
                    } else {
                        0.0
                    }
                } else {
                    n * d * classical_power_ps(p, s, n - 1.0).0
                }
            }
            Kind::Free => {
                if n * s < 1.0 {
                    n * d
                } else {
                    0.0
                }
            }
        })
    }

    fn support_lo(&self) -> f64 {
        self.base.support_lo()
    }

    fn quantile(&self, y: f64) -> Result<f64> {
        crate::distributions::check_level(y, "probability")?;
        self.quantile_levels(y, 1.0 - y)
    }

    fn quantile_upper(&self, s: f64) -> Result<f64> {
        crate::distributions::check_level(s, "survival level")?;
        self.quantile_levels(1.0 - s, s)
    }

    fn label(&self) -> String {
        format!("{}^({} {})", self.base.label(), self.kind, self.n)
    }
}

impl<C: Cdf> PowerCdf<C> {
    /// Pulls the target level back through the point power, then asks the base.
    fn quantile_levels(&self, y: f64, sy: f64) -> Result<f64> {
        let n = self.n;
        match self.kind {
            Kind::Boolean => {
                // u = n y / (1 + (n-1) y), 1 - u = (1 - y) / (1 + (n-1) y)
                let den = 1.0 + (n - 1.0) * y;
                let su = sy / den;
                if su < 0.5 {
                    self.base.quantile_upper(su)
                } else {
                    self.base.quantile((n * y / den).min(1.0))
                }
            }
            Kind::Classical => {
                if y == 0.0 {
                    return self.base.quantile(0.0);
                }
                let l = -neg_ln(y, sy) / n;
                let su = -l.exp_m1();
                if su < 0.5 {
                    self.base.quantile_upper(su)
                } else {
                    self.base.quantile(l.exp())
                }
            }
            Kind::Free => {
                if y == 0.0 {
                    return self.base.quantile(0.0);
                }
                self.base.quantile_upper(sy / n)
            }
        }
    }
}

/// `x -> X(F(x))`.
#[derive(Debug, Clone)]
pub struct XTransform<C>(pub C);

/// `x -> X^{<-1>}(F(x))`.
#[derive(Debug, Clone)]
pub struct XInvTransform<C>(pub C);

pub fn x_transform<C: Cdf>(f: C) -> XTransform<C> {
    XTransform(f)
}

pub fn x_inv_transform<C: Cdf>(f: C) -> XInvTransform<C> {
    XInvTransform(f)
}

impl<C: Cdf> Cdf for XTransform<C> {
    fn cdf(&self, x: f64) -> f64 {
        self.eval_pair(x).0
    }
    fn survival(&self, x: f64) -> f64 {
        self.eval_pair(x).1
    }
    fn eval_pair(&self, x: f64) -> (f64, f64) {
        let (p, s) = self.0.eval_pair(x);
        x_map_ps(p, s)
    }
    fn density(&self, x: f64) -> Option<f64> {
        let d = self.0.density(x)?;
        let (p, s) = self.0.eval_pair(x);
        if p == 0.0 {
            return Some(0.0);
        }
        Some(x_map_ps(p, s).0 * d / (p * p))
    }
    fn support_lo(&self) -> f64 {
        self.0.support_lo()
    }
    fn quantile(&self, y: f64) -> Result<f64> {
        crate::distributions::check_level(y, "probability")?;
        let (u, su) = x_inv_ps(y, 1.0 - y);
        if su < 0.5 {
            self.0.quantile_upper(su)
        } else {
            self.0.quantile(u)
        }
    }
    fn as_family(&self) -> Option<EvFamily> {
        // X carries Dagum(alpha) onto Frechet(alpha)
        match self.0.as_family() {
            Some(f) if f.kind() == Kind::Boolean => EvFamily::frechet(f.alpha()).ok(),
            _ => None,
        }
    }
    fn label(&self) -> String {
        format!("X({})", self.0.label())
    }
}

impl<C: Cdf> Cdf for XInvTransform<C> {
    fn cdf(&self, x: f64) -> f64 {
        self.eval_pair(x).0
    }
    fn survival(&self, x: f64) -> f64 {
        self.eval_pair(x).1
    }
    fn eval_pair(&self, x: f64) -> (f64, f64) {
        let (p, s) = self.0.eval_pair(x);
        x_inv_ps(p, s)
    }
    fn density(&self, x: f64) -> Option<f64> {
        let d = self.0.density(x)?;
        let (p, s) = self.0.eval_pair(x);
        if p == 0.0 {
            return Some(0.0);
        }
        let l = 1.0 + neg_ln(p, s);
        Some(d / p / (l * l))
    }
    fn support_lo(&self) -> f64 {
        self.0.support_lo()
    }
    fn quantile(&self, y: f64) -> Result<f64> {
        crate::distributions::check_level(y, "probability")?;
        let (u, su) = x_map_ps(y, 1.0 - y);
        if su < 0.5 {
            self.0.quantile_upper(su)
        } else {
            self.0.quantile(u)
        }
    }
    fn as_family(&self) -> Option<EvFamily> {
        match self.0.as_family() {
            Some(f) if f.kind() == Kind::Classical && f.alpha() > 0.0 => EvFamily::dagum(f.alpha()).ok(),
            _ => None,
        }
    }
    fn label(&self) -> String {
        format!("Xinv({})", self.0.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Scaled;
    use proptest::prelude::*;

    fn uv(u: f64) -> UnitValue {
        UnitValue::new(u).unwrap()
    }

    #[test]
    fn unit_value_rejects_out_of_range() {
        assert!(UnitValue::new(1.0000001).is_err());
        assert!(UnitValue::new(-1e-300).is_err());
        assert!(UnitValue::new(f64::NAN).is_err());
        assert!(UnitValue::new(0.0).is_ok());
    }

    #[test]
    fn combine_examples() {
        assert!((boolean_combine(uv(0.5), uv(0.5)).get() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(boolean_combine(uv(0.3), uv(0.0)).get(), 0.0);
        assert_eq!(boolean_combine(uv(0.0), uv(0.7)).get(), 0.0);
        assert!((boolean_combine(uv(0.37), uv(1.0)).get() - 0.37).abs() < 1e-16);
    }

    #[test]
    fn point_power_examples() {
        assert!((boolean_power_point(uv(0.5), 2.0).unwrap().get() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(
            boolean_power_point(uv(0.5), 2.0).unwrap(),
            boolean_combine(uv(0.5), uv(0.5))
        );
        assert!((free_power_point(uv(0.9), 3.0).unwrap().get() - 0.7).abs() < 1e-15);
        assert_eq!(free_power_point(uv(0.6), 3.0).unwrap().get(), 0.0);
        assert!((classical_power_point(uv(0.9), 3.0).unwrap().get() - 0.729).abs() < 1e-15);
        assert_eq!(classical_power_point(uv(0.0), 5.0).unwrap().get(), 0.0);
        for &u in &[0.0, 0.2, 0.5, 0.999, 1.0] {
            for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
                assert!((power_point(kind, uv(u), 1.0).unwrap().get() - u).abs() < 1e-16);
            }
        }
        assert!(boolean_power_point(uv(0.5), 0.5).is_err());
        assert!(free_power_point(uv(0.5), f64::INFINITY).is_err());
    }

    #[test]
    fn x_map_examples() {
        assert_eq!(x_map(uv(1.0)).get(), 1.0);
        assert_eq!(x_map(uv(0.0)).get(), 0.0);
        assert!((x_map(uv(0.5)).get() - (-1.0f64).exp()).abs() < 1e-16);
        assert!((x_inv(uv((-1.0f64).exp())).get() - 0.5).abs() < 1e-15);
        assert_eq!(x_inv(uv(1.0)).get(), 1.0);
        assert_eq!(x_inv(uv(0.0)).get(), 0.0);
        assert!((x_inv(x_map(uv(0.37))).get() - 0.37).abs() < 1e-14);
        // underflow of X near 0 is treated as exact
        assert_eq!(x_map(uv(1e-3)).get(), 0.0);
    }

    #[test]
    fn boolean_power_of_frechet_reduces_to_closed_form() {
        let frechet = EvFamily::frechet(1.0).unwrap();
        let n = 10.0;
        let pow = power_cdf(Scaled::new(frechet, n).unwrap(), n, Kind::Boolean).unwrap();
        // independent route: 1 / (1 + n (e^{x^{-1}/n} - 1)) at x = 1
        let want = 1.0 / (1.0 + n * ((0.1f64).exp() - 1.0));
        assert!((pow.cdf(1.0) - want).abs() < 1e-15);
        assert!((pow.cdf(1.0) - 0.487_398_511_143_423_65).abs() < 1e-15);
    }

    #[test]
    fn power_one_is_identity() {
        let f = EvFamily::dagum(1.3).unwrap();
        for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
            let p = power_cdf(f, 1.0, kind).unwrap();
            for i in 1..100 {
                let x = i as f64 * 0.1;
                assert!((p.cdf(x) - f.cdf(x)).abs() < 1e-15);
                assert!((p.survival(x) - f.survival(x)).abs() < 1e-15);
                assert!((p.density(x).unwrap() - f.density(x).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn power_density_matches_differences() {
        let f = EvFamily::frechet(1.5).unwrap();
        for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
            let p = power_cdf(f, 7.0, kind).unwrap();
            for i in 1..60 {
                let x = 0.5 * 1.1f64.powi(i);
                let h = x * 1e-5;
                let (lo, hi) = (p.cdf(x - h), p.cdf(x + h));
                if lo == 0.0 {
                    continue;
                }
                let fd = (hi - lo) / (2.0 * h);
                let d = p.density(x).unwrap();
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-12), "{kind} x={x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn power_quantile_inverts() {
        let f = EvFamily::frechet(2.0).unwrap();
        for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
            let p = power_cdf(f, 25.0, kind).unwrap();
            for &y in &[1e-6, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-6] {
                let x = p.quantile(y).unwrap();
                assert!((p.cdf(x) / y - 1.0).abs() < 1e-10, "{kind} y={y}");
                let x = p.quantile_upper(1.0 - y).unwrap();
                assert!((p.survival(x) / (1.0 - y) - 1.0).abs() < 1e-9, "{kind} upper y={y}");
            }
        }
    }

    #[test]
    fn x_transforms_carry_families() {
        for &alpha in &[0.5, 1.0, 3.0] {
            let dagum = EvFamily::dagum(alpha).unwrap();
            let frechet = EvFamily::frechet(alpha).unwrap();
            let xd = x_transform(dagum);
            let xf = x_inv_transform(frechet);
            for i in -40..40 {
                let x = 1.2f64.powi(i);
                assert!((xd.cdf(x) - frechet.cdf(x)).abs() < 1e-13);
                assert!((xd.survival(x) - frechet.survival(x)).abs() <= 1e-13 * frechet.survival(x).max(1e-3));
                if frechet.cdf(x) > 1e-300 {
                    assert!((xf.cdf(x) - dagum.cdf(x)).abs() < 1e-13);
                }
                assert!((xd.density(x).unwrap() - frechet.density(x).unwrap()).abs() < 1e-12);
                if frechet.cdf(x) > 1e-300 {
                    assert!((xf.density(x).unwrap() - dagum.density(x).unwrap()).abs() < 1e-12);
                }
            }
            assert_eq!(xd.as_family(), Some(frechet));
            assert_eq!(xf.as_family(), Some(dagum));
            let q = xd.quantile(0.25).unwrap();
            assert!((q / frechet.quantile(0.25).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(4000))]

        #[test]
        fn homomorphism(u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            let lhs = x_map(boolean_combine(uv(u), uv(v))).get();
            let rhs = x_map(uv(u)).get() * x_map(uv(v)).get();
            prop_assert!((lhs - rhs).abs() <= 1e-13);
        }

        #[test]
        fn composition_of_boolean_powers(u in 0.0f64..=1.0, m in 1.0f64..50.0, k in 1.0f64..50.0) {
            let twice = boolean_power_point(boolean_power_point(uv(u), m).unwrap(), k).unwrap().get();
            let once = boolean_power_point(uv(u), m * k).unwrap().get();
            prop_assert!((twice - once).abs() <= 1e-12);
        }

        #[test]
        fn powers_are_ordered_and_monotone(u in 0.0f64..=1.0, du in 0.0f64..0.5, n in 1.0f64..1e4, dn in 0.0f64..100.0) {
            let u2 = (u + du).min(1.0);
            for kind in [Kind::Classical, Kind::Free, Kind::Boolean] {
                let a = power_point(kind, uv(u), n).unwrap().get();
                prop_assert!(a <= power_point(kind, uv(u2), n).unwrap().get() + 1e-15);
                prop_assert!(power_point(kind, uv(u), n + dn).unwrap().get() <= a + 1e-15);
            }
            let f = free_power_point(uv(u), n).unwrap().get();
            let c = classical_power_point(uv(u), n).unwrap().get();
            let b = boolean_power_point(uv(u), n).unwrap().get();
            prop_assert!(f <= c + 1e-12 && c <= b + 1e-12);
        }
    }
}
