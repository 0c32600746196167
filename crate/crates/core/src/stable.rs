//! Cancellation-free helpers shared by the distribution and functional layers.
//!
//! Probabilities are carried as `(p, s)` pairs where `s = 1 - p` was computed
//! independently by the source, so that tail values near `p = 1` keep their
//! relative accuracy.

/// `-ln p`, taking the survival channel when `p` is close to one.
#[inline]
pub fn neg_ln(p: f64, s: f64) -> f64 {
    if p > 0.5 {
        -(-s).ln_1p()
    } else {
        -p.ln()
    }
}

/// `-ln(1 - s) - s`, i.e. `r(u)` at `u = 1 - s`.
///
/// The power series `sum_{k>=2} s^k / k` is used for small `s`, where the
/// direct form loses all digits to cancellation.
pub fn log_excess(p: f64, s: f64) -> f64 {
    if s < 0.1 {
        let mut term = s;
        let mut sum = 0.0;
        for k in 2..64 {
            term *= s;
            let add = term / k as f64;
            sum += add;
            if add <= sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        neg_ln(p, s) - s
    }
}

/// `-ln(1 - s)`, accurate for small `s`.
#[inline]
pub fn neg_ln1m(s: f64) -> f64 {
    -(-s).ln_1p()
}
