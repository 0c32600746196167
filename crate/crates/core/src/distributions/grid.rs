use std::io::Read;
use std::path::Path;

use super::{check_level, Cdf};
use crate::error::{Error, Result};

/// Right-continuous step distribution function from tabulated `(x, p)` pairs.
///
/// `F(x) = probs[i]` for `knots[i] <= x < knots[i + 1]`, and `0` left of the
/// first knot. The table has no density, so it cannot enter the von Mises
/// functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCdf {
    knots: Vec<f64>,
    probs: Vec<f64>,
}

impl GridCdf {
    pub fn new(knots: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if knots.len() != probs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} knots but {} probabilities",
                knots.len(),
                probs.len()
            )));
        }
        if let Some(bad) = knots.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite knot {bad}")));
        }
        if let Some(w) = knots.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "knots must be strictly increasing: {} then {}",
                knots[w],
                knots[w + 1]
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!("probability {bad} outside [0, 1]")));
        }
        if let Some(w) = probs.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(format!(
                "probabilities must be non-decreasing: {} then {}",
                probs[w],
                probs[w + 1]
            )));
        }
        if *probs.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter("the last probability must be 1".into()));
        }
        Ok(Self { knots, probs })
    }

    /// Reads two-column `x,p` CSV. A leading non-numeric row is a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut knots = Vec::new();
        let mut probs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Parse(format!("row {}: expected two columns", line + 1)));
            }
            let x = record[0].parse::<f64>();
            let p = record[1].parse::<f64>();
            match (x, p) {
                (Ok(x), Ok(p)) => {
                    knots.push(x);
                    probs.push(p);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "row {}: cannot parse `{}`,`{}`",
                        line + 1,
                        &record[0],
                        &record[1]
                    )))
                }
            }
        }
        Self::new(knots, probs)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl Cdf for GridCdf {
    fn cdf(&self, x: f64) -> f64 {
        let idx = self.knots.partition_point(|&k| k <= x);
        if idx == 0 {
            0.0
        } else {
            self.probs[idx - 1]
        }
    }

    fn support_lo(&self) -> f64 {
        self.knots[0]
    }

    fn quantile(&self, y: f64) -> Result<f64> {
        check_level(y, "probability")?;
        let idx = self.probs.partition_point(|&p| p < y);
        Ok(self.knots[idx.min(self.knots.len() - 1)])
    }

    fn label(&self) -> String {
        format!("grid[{}]", self.knots.len())
    }
}
