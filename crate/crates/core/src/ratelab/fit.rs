use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(ln n, ln sup)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of `ln sup` from the fitted line.
    pub residual: f64,
    pub rows_used: usize,
    /// `n` values dropped for a non-positive or non-finite sup.
    pub excluded: Vec<f64>,
}

pub const MIN_FIT_ROWS: usize = 4;

pub fn fit_rate(rows: &[(f64, f64)]) -> Result<RateFit> {
    let mut excluded = Vec::new();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|&(n, sup)| {
            if n > 0.0 && sup > 0.0 && sup.is_finite() && n.is_finite() {
                Some((n.ln(), sup.ln()))
            } else {
                excluded.push(n);
                None
            }
        })
        .collect();
    if pts.len() < MIN_FIT_ROWS {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least {MIN_FIT_ROWS} rows with positive sup, got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParameter("rate fit needs at least two distinct n".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, residual, rows_used: pts.len(), excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let rows: Vec<(f64, f64)> = [10.0, 100.0, 1e3, 1e4, 1e5].iter().map(|&n| (n, 3.0 / n)).collect();
        let f = fit_rate(&rows).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);

        let rows: Vec<(f64, f64)> = [2.0f64, 8.0, 32.0, 128.0].iter().map(|&n| (n, 5.0 / n.sqrt())).collect();
        assert!((fit_rate(&rows).unwrap().slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn excludes_nonpositive_rows() {
        let rows = [(1.0, 0.0), (2.0, 0.5), (4.0, 0.25), (8.0, 0.125), (16.0, 0.0625), (32.0, -1.0)];
        let f = fit_rate(&rows).unwrap();
        assert_eq!(f.excluded, vec![1.0, 32.0]);
        assert_eq!(f.rows_used, 4);
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(fit_rate(&rows[..4]).is_err());
    }
}
