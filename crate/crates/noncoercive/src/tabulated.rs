//! Coefficient fields tabulated in CSV files with columns `x,re,im` (one
//! space dimension) or `x,y,re,im` (two).
//!
//! One-dimensional tables are interpolated linearly and held constant past the
//! end points; two-dimensional tables use the nearest sample point, ties going
//! to the earlier row.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use noncoercive_core::problem::ScalarField;
use noncoercive_core::{Complex64, Point};

use crate::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    dim: usize,
    points: Vec<Point>,
    values: Vec<Complex64>,
}

impl FieldTable {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, ConfigError> {
        let bad = |msg: String| ConfigError::Invalid(format!("tabulated field: {msg}"));
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_owned).collect();
        let dim = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["x", "re", "im"] => 1,
            ["x", "y", "re", "im"] => 2,
            _ => return Err(bad(format!("unexpected header {header:?}"))),
        };
        let mut rows: Vec<(Point, Complex64)> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let nums = record
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| bad(format!("row {}: '{s}' is not a number", line + 1))))
                .collect::<Result<Vec<f64>, _>>()?;
            if nums.iter().any(|v| !v.is_finite()) {
                return Err(bad(format!("row {} has a non-finite entry", line + 1)));
            }
            let p = if dim == 1 { [nums[0], 0.0] } else { [nums[0], nums[1]] };
            rows.push((p, Complex64::new(nums[dim], nums[dim + 1])));
        }
        if rows.is_empty() {
            return Err(bad("no rows".into()));
        }
        if dim == 1 {
            rows.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
            if rows.windows(2).any(|w| w[0].0[0] == w[1].0[0]) {
                return Err(bad("repeated x".into()));
            }
        }
        let (points, values) = rows.into_iter().unzip();
        Ok(Self { dim, points, values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let file = std::fs::File::open(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: Point) -> Complex64 {
        if self.dim == 1 {
            let xs = &self.points;
            let i = xs.partition_point(|p| p[0] <= x[0]);
            if i == 0 {
                return self.values[0];
            }
            if i == xs.len() {
                return self.values[xs.len() - 1];
            }
            let (x0, x1) = (xs[i - 1][0], xs[i][0]);
            let t = (x[0] - x0) / (x1 - x0);
            self.values[i - 1] * (1.0 - t) + self.values[i] * t
        } else {
            let d2 = |p: &Point| (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
            let mut best = 0;
            for (i, p) in self.points.iter().enumerate() {
                if d2(p) < d2(&self.points[best]) {
                    best = i;
                }
            }
            self.values[best]
        }
    }

    pub fn into_field(self) -> ScalarField {
        let table = Arc::new(self);
        ScalarField::new(move |x| table.eval(x))
    }
}
