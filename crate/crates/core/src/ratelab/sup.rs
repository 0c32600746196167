//! Certified Kolmogorov distance between two non-decreasing functions.
//!
//! On a cell `[a, b]` both functions are trapped between their endpoint
//! values, so `sup |F - G| <= max(F(b) - G(a), G(b) - F(a), 0)` there.
//! Cells with the largest bound are split until the largest bound is within
//! `tol` of the largest sampled difference.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::distributions::Cdf;
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_MASS: f64 = 1e-8;
pub const DEFAULT_MAX_CELLS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupBracket {
    /// Largest `|F - G|` at a sampled point.
    pub lo: f64,
    /// Certified upper bound, tail closures included.
    pub hi: f64,
    pub witness_x: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    /// Bound on `(-inf, x_lo]`, zero when that side is not closed.
    pub tail_left: f64,
    /// Bound on `[x_hi, inf)`, zero when that side is not closed.
    pub tail_right: f64,
    pub cells_used: usize,
    /// Whether the interior gap reached `tol` within the cell budget.
    pub converged: bool,
}

impl SupBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn exact_zero(x_lo: f64, x_hi: f64) -> Self {
        Self {
            lo: 0.0,
            hi: 0.0,
            witness_x: x_lo,
            x_lo,
            x_hi,
            tail_left: 0.0,
            tail_right: 0.0,
            cells_used: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupOptions {
    pub tol: f64,
    /// Defaults to `G^{<-}(tail_mass)`.
    pub x_lo: Option<f64>,
    /// Defaults to `G^{<-}(1 - tail_mass)`.
    pub x_hi: Option<f64>,
    pub tail_mass: f64,
    pub close_left: bool,
    pub close_right: bool,
    pub initial_cells: usize,
    pub max_cells: usize,
}

impl SupOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            x_lo: None,
            x_hi: None,
            tail_mass: DEFAULT_TAIL_MASS,
            close_left: true,
            close_right: true,
            initial_cells: 64,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    pub fn interval(mut self, x_lo: f64, x_hi: f64) -> Self {
        self.x_lo = Some(x_lo);
        self.x_hi = Some(x_hi);
        self
    }

    pub fn closed(mut self, left: bool, right: bool) -> Self {
        self.close_left = left;
        self.close_right = right;
        self
    }
}

/// Bracket for `sup |F - G|` over `[x_lo, x_hi]`, without tail closure.
pub fn sup_distance<F, G>(f: &F, g: &G, x_lo: f64, x_hi: f64, tol: f64) -> Result<SupBracket>
where
    F: Cdf + ?Sized,
    G: Cdf + ?Sized,
{
    sup_distance_with(f, g, &SupOptions::new(tol).interval(x_lo, x_hi).closed(false, false))
}

/// Bracket for `sup |F - G|` over the whole line, closing both tails beyond
/// the `G` quantiles at the default tail mass.
pub fn sup_distance_closed<F, G>(f: &F, g: &G, tol: f64) -> Result<SupBracket>
where
    F: Cdf + ?Sized,
    G: Cdf + ?Sized,
{
    sup_distance_with(f, g, &SupOptions::new(tol))
}

pub fn sup_distance_with<F, G>(f: &F, g: &G, opts: &SupOptions) -> Result<SupBracket>
where
    F: Cdf + ?Sized,
    G: Cdf + ?Sized,
{
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    if !(opts.tail_mass > 0.0 && opts.tail_mass < 0.5) {
        return Err(Error::InvalidParameter(format!("tail mass {} outside (0, 0.5)", opts.tail_mass)));
    }
    let x_lo = match opts.x_lo {
        Some(x) => x,
        None => g.quantile(opts.tail_mass)?,
    };
    let x_hi = match opts.x_hi {
        Some(x) => x,
        None => g.quantile_upper(opts.tail_mass)?,
    };
    if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
        return Err(Error::InvalidParameter(format!("bad interval [{x_lo}, {x_hi}]")));
    }

    let same_family = matches!((f.as_family(), g.as_family()), (Some(a), Some(b)) if a == b);
    let same_object = std::ptr::eq((f as *const F).cast::<u8>(), (g as *const G).cast::<u8>());
    if same_family || same_object {
        return Ok(SupBracket::exact_zero(x_lo, x_hi));
    }

    let model = PairModel { f, g };
    let interior = refine(&model, x_lo, x_hi, opts.initial_cells, opts.tol, opts.max_cells)?;

    let mut out = SupBracket {
        lo: interior.lo,
        hi: interior.hi,
        witness_x: interior.witness,
        x_lo,
        x_hi,
        tail_left: 0.0,
        tail_right: 0.0,
        cells_used: interior.cells_used,
        converged: interior.converged,
    };
    // Both functions lie in [0, F(x_lo) v G(x_lo)] to the left of x_lo, and
    // in [1 - (S_F v S_G)(x_hi), 1] to the right of x_hi.
    if opts.close_left {
        out.tail_left = f.cdf(x_lo).max(g.cdf(x_lo));
        out.hi = out.hi.max(out.tail_left);
    }
    if opts.close_right {
        out.tail_right = f.survival(x_hi).max(g.survival(x_hi));
        out.hi = out.hi.max(out.tail_right);
    }
    Ok(out)
}

/// Bracket for `sup A(u) B(u)` over `[u_lo, u_hi]`, where `A >= 0` is
/// non-decreasing and `B >= 0` is non-increasing, so that `A(b) B(a)`
/// bounds a cell `[a, b]`. `cap` is an optional non-increasing bound used
/// where the product overflows.
pub fn sup_monotone_product(
    inc: impl Fn(f64) -> f64,
    dec: impl Fn(f64) -> f64,
    cap: impl Fn(f64) -> f64,
    u_lo: f64,
    u_hi: f64,
    tol: f64,
    max_cells: usize,
) -> Result<Refined> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if !(u_lo.is_finite() && u_hi.is_finite() && u_lo < u_hi) {
        return Err(Error::InvalidParameter(format!("bad interval [{u_lo}, {u_hi}]")));
    }
    refine(&ProductModel { inc, dec, cap }, u_lo, u_hi, 64, tol, max_cells)
}

/// Outcome of cell refinement on a finite interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub lo: f64,
    pub hi: f64,
    pub witness: f64,
    pub cells_used: usize,
    pub converged: bool,
}

trait CellModel {
    type Point: Copy;
    /// Sample at `x`, returning the point and the attained objective value.
    fn eval(&self, x: f64) -> Result<(Self::Point, f64)>;
    fn bound(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

struct PairModel<'a, F: ?Sized, G: ?Sized> {
    f: &'a F,
    g: &'a G,
}

type PairPoint = ((f64, f64), (f64, f64));

/// `U(b) - V(a)` for non-decreasing `U`, `V`, taken through the survival
/// channel when both values are close to one.
#[inline]
fn upper_minus(u_b: (f64, f64), v_a: (f64, f64)) -> f64 {
    if u_b.0 > 0.5 && v_a.0 > 0.5 {
        v_a.1 - u_b.1
    } else {
        u_b.0 - v_a.0
    }
}

impl<F: Cdf + ?Sized, G: Cdf + ?Sized> CellModel for PairModel<'_, F, G> {
    type Point = PairPoint;

    fn eval(&self, x: f64) -> Result<(PairPoint, f64)> {
        let f = self.f.eval_pair(x);
        let g = self.g.eval_pair(x);
        if [f.0, f.1, g.0, g.1].iter().any(|v| v.is_nan()) {
            return Err(Error::Solver(format!("distribution value is NaN at x = {x}")));
        }
        Ok(((f, g), upper_minus(f, g).abs()))
    }

    #[inline]
    fn bound(&self, a: &PairPoint, b: &PairPoint) -> f64 {
        upper_minus(b.0, a.1).max(upper_minus(b.1, a.0)).max(0.0)
    }
}

struct ProductModel<I, D, C> {
    inc: I,
    dec: D,
    cap: C,
}

impl<I, D, C> CellModel for ProductModel<I, D, C>
where
    I: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    /// `(A(u), B(u), cap(u))`
    type Point = (f64, f64, f64);

    fn eval(&self, u: f64) -> Result<((f64, f64, f64), f64)> {
        let (a, b, c) = ((self.inc)(u), (self.dec)(u), (self.cap)(u));
        if a.is_nan() || b.is_nan() || c.is_nan() || a < 0.0 || b < 0.0 {
            return Err(Error::Solver(format!("product factors ({a}, {b}) invalid at u = {u}")));
        }
        let v = a * b;
        Ok(((a, b, c), if v.is_nan() { 0.0 } else { v.min(c) }))
    }

    #[inline]
    fn bound(&self, a: &(f64, f64, f64), b: &(f64, f64, f64)) -> f64 {
        let p = b.0 * a.1;
        if p.is_nan() {
            a.2
        } else {
            p.min(a.2)
        }
    }
}

struct Cell<P> {
    a: (f64, P),
    b: (f64, P),
    bound: f64,
}

impl<P> PartialEq for Cell<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<P> Eq for Cell<P> {}
impl<P> PartialOrd for Cell<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<P> Ord for Cell<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound)
    }
}

fn refine<M: CellModel>(
    m: &M,
    x_lo: f64,
    x_hi: f64,
    initial_cells: usize,
    tol: f64,
    max_cells: usize,
) -> Result<Refined> {
    let mut lo = 0.0f64;
    let mut witness = x_lo;
    let sample = |x: f64, lo: &mut f64, witness: &mut f64| -> Result<(f64, M::Point)> {
        let (p, v) = m.eval(x)?;
        if v > *lo {
            *lo = v;
            *witness = x;
        }
        Ok((x, p))
    };

    let cells = initial_cells.max(1);
    let geometric = x_lo > 0.0;
    let mut pts = Vec::with_capacity(cells + 1);
    for i in 0..=cells {
        let t = i as f64 / cells as f64;
        let x = if i == cells {
            x_hi
        } else if geometric {
            x_lo * ((x_hi / x_lo).ln() * t).exp()
        } else {
            x_lo + (x_hi - x_lo) * t
        };
        pts.push(sample(x, &mut lo, &mut witness)?);
    }

    // Cells already within `tol` of the running lower bound are settled for
    // good, since the lower bound only grows.
    let mut settled = 0.0f64;
    let mut cells_used = 0usize;
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        let bound = m.bound(&w[0].1, &w[1].1);
        cells_used += 1;
        if bound <= lo + tol {
            settled = settled.max(bound);
        } else {
            heap.push(Cell { a: w[0], b: w[1], bound });
        }
    }

    loop {
        let top = heap.peek().map_or(0.0, |c| c.bound);
        let hi = top.max(settled);
        let done = |converged| Ok(Refined { lo, hi, witness, cells_used, converged });
        if hi - lo <= tol {
            return done(true);
        }
        if cells_used >= max_cells {
            return done(false);
        }
        let Some(cell) = heap.pop() else {
            return done(false);
        };
        let (a, b) = (cell.a.0, cell.b.0);
        let mid = if a > 0.0 { (a * b).sqrt() } else { a + 0.5 * (b - a) };
        if !(mid > a && mid < b) {
            settled = settled.max(cell.bound);
            continue;
        }
        let mp = sample(mid, &mut lo, &mut witness)?;
        for (l, r) in [(cell.a, mp), (mp, cell.b)] {
            let bound = m.bound(&l.1, &r.1);
            cells_used += 1;
            if bound <= lo + tol {
                settled = settled.max(bound);
            } else {
                heap.push(Cell { a: l, b: r, bound });
            }
        }
    }
}
