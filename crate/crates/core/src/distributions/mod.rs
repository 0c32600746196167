//! Evaluable distribution functions.
//!
//! Every [`Cdf`] exposes its value and its survival complement as separate
//! channels. Tail-sensitive code (max-convolution powers, von Mises
//! functionals, sup distances) reads the survival channel whenever the
//! probability is close to one.

mod family;
mod grid;

pub use family::{EvFamily, Kind};
pub use grid::GridCdf;

use std::sync::Arc;

use crate::error::Result;

/// A distribution function on the real line.
pub trait Cdf: Send + Sync {
    fn cdf(&self, x: f64) -> f64;

    /// `1 - F(x)`, computed without cancellation where the law allows it.
    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `(F(x), 1 - F(x))` in one evaluation.
    fn eval_pair(&self, x: f64) -> (f64, f64) {
        (self.cdf(x), self.survival(x))
    }

    fn density(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Left end of the support (0 for laws on `[0, inf)`).
    fn support_lo(&self) -> f64;

    /// Generalized inverse `inf { x : F(x) >= p }`.
    ///
    /// `p = 1` yields `f64::INFINITY` for laws with unbounded support.
    fn quantile(&self, p: f64) -> Result<f64>;

    /// Generalized inverse at level `1 - s`, for `s` known more accurately
    /// than `1 - s`.
    fn quantile_upper(&self, s: f64) -> Result<f64> {
        self.quantile(1.0 - s)
    }

    /// The parametric family this law belongs to, when it is one.
    fn as_family(&self) -> Option<EvFamily> {
        None
    }

    fn label(&self) -> String;
}

macro_rules! forward_cdf {
    ($($ty:ty),*) => {$(
        impl<T: Cdf + ?Sized> Cdf for $ty {
            fn cdf(&self, x: f64) -> f64 { (**self).cdf(x) }
            fn survival(&self, x: f64) -> f64 { (**self).survival(x) }
            fn eval_pair(&self, x: f64) -> (f64, f64) { (**self).eval_pair(x) }
            fn density(&self, x: f64) -> Option<f64> { (**self).density(x) }
            fn support_lo(&self) -> f64 { (**self).support_lo() }
            fn quantile(&self, p: f64) -> Result<f64> { (**self).quantile(p) }
            fn quantile_upper(&self, s: f64) -> Result<f64> { (**self).quantile_upper(s) }
            fn as_family(&self) -> Option<EvFamily> { (**self).as_family() }
            fn label(&self) -> String { (**self).label() }
        }
    )*};
}

forward_cdf!(&T, Box<T>, Arc<T>);

/// `x -> F(scale * x)`, the law of `X / scale`.
#[derive(Debug, Clone)]
pub struct Scaled<C> {
    inner: C,
    scale: f64,
}

impl<C: Cdf> Scaled<C> {
    pub fn new(inner: C, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(crate::Error::InvalidParameter(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { inner, scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: Cdf> Cdf for Scaled<C> {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(self.scale * x)
    }
    fn survival(&self, x: f64) -> f64 {
        self.inner.survival(self.scale * x)
    }
    fn eval_pair(&self, x: f64) -> (f64, f64) {
        self.inner.eval_pair(self.scale * x)
    }
    fn density(&self, x: f64) -> Option<f64> {
        self.inner.density(self.scale * x).map(|d| d * self.scale)
    }
    fn support_lo(&self) -> f64 {
        self.inner.support_lo() / self.scale
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.inner.quantile(p)? / self.scale)
    }
    fn quantile_upper(&self, s: f64) -> Result<f64> {
        Ok(self.inner.quantile_upper(s)? / self.scale)
    }
    fn label(&self) -> String {
        format!("{}(x*{})", self.inner.label(), self.scale)
    }
}

pub(crate) fn check_level(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(crate::error::domain(format!("{what} = {p} outside [0, 1]")))
    }
}
