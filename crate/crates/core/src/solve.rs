//! Bisection for monotone predicates.

/// Narrows `[lo, hi]` around the point where `pred` flips from `false` to
/// `true`, assuming `pred(lo) == false`, `pred(hi) == true` and a single
/// flip. Stops when the midpoint is no longer representable between the
/// ends or after `max_iter` halvings.
pub fn bisect_flip(mut lo: f64, mut hi: f64, max_iter: usize, mut pred: impl FnMut(f64) -> bool) -> (f64, f64) {
    for _ in 0..max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Doubles `start` until `pred` holds, up to `max_doublings` times.
pub fn expand_up(start: f64, max_doublings: usize, mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    let mut t = start;
    for _ in 0..=max_doublings {
        if pred(t) {
            return Some(t);
        }
        t *= 2.0;
        if !t.is_finite() {
            return None;
        }
    }
    None
}
