//! Tabulated weights: `(r, log u(r))` pairs, linear in `log r` between nodes.

use crate::error::{Error, Result};

/// Upper bound on table size accepted from untrusted input.
pub const MAX_TABLE_POINTS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LogTable {
    /// Strictly increasing abscissae; only the first may be zero.
    r: Vec<f64>,
    log_u: Vec<f64>,
}

impl LogTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("custom table needs at least two points".into()));
        }
        if points.len() > MAX_TABLE_POINTS {
            return Err(Error::Config(format!("custom table has more than {MAX_TABLE_POINTS} points")));
        }
        let mut r = Vec::with_capacity(points.len());
        let mut log_u = Vec::with_capacity(points.len());
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Config(format!("custom table row {i} is not finite")));
            }
            if x < 0.0 || (x == 0.0 && i > 0) {
                return Err(Error::Config(format!("custom table row {i}: r must be positive")));
            }
            if let Some(&prev) = r.last() {
                if x <= prev {
                    return Err(Error::Config(format!("custom table row {i}: r not strictly increasing")));
                }
            }
            r.push(x);
            log_u.push(y);
        }
        Ok(LogTable { r, log_u })
    }

    /// Parse a text table: one `r, log_u` pair per line (comma or whitespace
    /// separated); blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty());
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Config(format!("line {}: expected two columns", lineno + 1)));
            };
            // a header row is allowed before any data
            let (Ok(x), Ok(y)) = (a.parse::<f64>(), b.parse::<f64>()) else {
                if points.is_empty() && a.parse::<f64>().is_err() && b.parse::<f64>().is_err() {
                    continue;
                }
                return Err(Error::Config(format!("line {}: not a number", lineno + 1)));
            };
            if points.len() >= MAX_TABLE_POINTS {
                return Err(Error::Config("custom table too long".into()));
            }
            points.push((x, y));
        }
        LogTable::new(points)
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().expect("non-empty")
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.r.iter().copied().zip(self.log_u.iter().copied())
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.log_u.windows(2).all(|w| w[1] >= w[0])
    }

    /// Interpolated `log u(r)`; linear in `r` on a leading `[0, r_1]` segment,
    /// linear in `log r` elsewhere.
    pub fn eval(&self, r: f64) -> Result<f64> {
        let (lo, hi) = (self.r_min(), self.r_max());
        if !(r >= lo && r <= hi) {
            return Err(Error::domain("custom table", r, lo, hi));
        }
        let i = match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => return Ok(self.log_u[i]),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.r[i], self.r[i + 1]);
        let (y0, y1) = (self.log_u[i], self.log_u[i + 1]);
        let w = if x0 == 0.0 {
            r / x1
        } else {
            (r / x0).ln() / (x1 / x0).ln()
        };
        Ok(y0 + w * (y1 - y0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_in_log_r() {
        let t = LogTable::new(vec![(1.0, 0.0), (100.0, 2.0)]).unwrap();
        assert!((t.eval(10.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(t.eval(100.0).unwrap(), 2.0);
        assert!(t.eval(101.0).is_err());
    }

    #[test]
    fn leading_zero_row_is_linear() {
        let t = LogTable::new(vec![(0.0, 0.0), (2.0, 1.0), (4.0, 3.0)]).unwrap();
        assert!((t.eval(1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unsorted_and_nonfinite() {
        assert!(LogTable::new(vec![(1.0, 0.0), (1.0, 2.0)]).is_err());
        assert!(LogTable::new(vec![(1.0, f64::NAN), (2.0, 2.0)]).is_err());
        assert!(LogTable::new(vec![(1.0, 0.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn parses_text_with_header_and_comments() {
        let text = "r,log_u\n# comment\n0 0\n1, 1\n\n4 2 # trailing\n";
        let t = LogTable::parse_text(text).unwrap();
        assert_eq!(t.points().count(), 3);
        assert!(LogTable::parse_text("1 2 3\n").is_err());
        assert!(LogTable::parse_text("1 x\n2 3\n").is_err());
    }
}
