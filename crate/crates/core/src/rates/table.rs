use std::path::Path;

use crate::error::{Error, Result};

/// Piecewise-linear conductivity spectrum σ(ω) sampled on a strictly
/// increasing grid. Queries outside the grid clamp to the end values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductivityTable {
    omega: Vec<f64>,
    sigma: Vec<f64>,
}

impl ConductivityTable {
    pub fn new(omega: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if omega.len() != sigma.len() {
            return Err(Error::Table(format!(
                "column lengths differ: {} vs {}",
                omega.len(),
                sigma.len()
            )));
        }
        if omega.len() < 2 {
            return Err(Error::Table(format!(
                "need at least 2 rows, got {}",
                omega.len()
            )));
        }
        if let Some(i) = omega.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Table(format!(
                "frequency grid not strictly increasing at rows {} and {}",
                i + 1,
                i + 2
            )));
        }
        if let Some(i) = sigma.iter().position(|s| !(*s >= 0.0)) {
            return Err(Error::Table(format!(
                "negative conductivity {} at row {}",
                sigma[i],
                i + 1
            )));
        }
        Ok(Self { omega, sigma })
    }

    /// Parse the text format: two columns `omega_rad_per_s, sigma_S_per_m`,
    /// separated by a comma or whitespace; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut sigma = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let row = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    row,
                    message: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    row,
                    message: format!("not a number: {s:?}"),
                })
            };
            let w = parse(fields[0])?;
            let s = parse(fields[1])?;
            if !w.is_finite() || !s.is_finite() {
                return Err(Error::Parse { row, message: "non-finite value".into() });
            }
            if s < 0.0 {
                return Err(Error::Table(format!("negative conductivity {s} at row {row}")));
            }
            omega.push(w);
            sigma.push(s);
        }
        Self::new(omega, sigma)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Interpolated value and whether the query was clamped to the grid.
    pub fn eval_checked(&self, omega: f64) -> (f64, bool) {
        let n = self.omega.len();
        if omega <= self.omega[0] {
            return (self.sigma[0], omega < self.omega[0]);
        }
        if omega >= self.omega[n - 1] {
            return (self.sigma[n - 1], omega > self.omega[n - 1]);
        }
        let hi = self.omega.partition_point(|&w| w <= omega);
        let lo = hi - 1;
        let t = (omega - self.omega[lo]) / (self.omega[hi] - self.omega[lo]);
        (self.sigma[lo] + t * (self.sigma[hi] - self.sigma[lo]), false)
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let (v, clamped) = self.eval_checked(omega);
        if clamped {
            log::warn!(
                "conductivity queried at ω = {omega:.4e} outside table range [{:.4e}, {:.4e}]; clamped",
                self.omega[0],
                self.omega[self.omega.len() - 1]
            );
        }
        v
    }
}

/// Read a conductivity table from disk.
pub fn load_conductivity_table(path: impl AsRef<Path>) -> Result<ConductivityTable> {
    let text = std::fs::read_to_string(path.as_ref())?;
    ConductivityTable::parse(&text)
}
