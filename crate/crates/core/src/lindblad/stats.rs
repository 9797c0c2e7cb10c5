//! Per-mode effective temperatures extracted from a steady state.

use serde::Serialize;

use super::density::DensityOperator;
use super::fock::{FockTruncation, MODES};
use crate::error::{Error, Result};

/// Levels with population at or below this are left out of the fits.
pub const POPULATION_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeStatistics {
    pub omega: f64,
    pub mean_n: f64,
    pub populations: Vec<f64>,
    /// Temperature of the Bose-Einstein distribution with the same mean.
    pub t_fit: f64,
    /// ω / ln(p_n / p_{n+1}) for each usable gap; inverted gaps are NaN.
    pub gap_temperatures: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    /// From a p-weighted linear fit of ln p_n against n.
    pub slope_temperature: f64,
    pub inverted_gaps: usize,
}

impl ModeStatistics {
    pub fn range_width(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn is_thermal_within(&self, tol: f64) -> bool {
        self.inverted_gaps == 0 && self.range_width() <= tol
    }
}

pub fn mode_statistics(rho: &DensityOperator, trunc: &FockTruncation, mode: usize, omega: f64) -> Result<ModeStatistics> {
    if mode >= MODES {
        return Err(Error::Domain(format!("mode index {mode} out of range")));
    }
    statistics_from_populations(omega, &rho.mode_populations(trunc, mode))
}

pub fn statistics_from_populations(omega: f64, p: &[f64]) -> Result<ModeStatistics> {
    let usable = p.iter().take_while(|&&x| x > POPULATION_FLOOR).count();
    if usable == 0 {
        return Err(Error::Statistics("all levels below the population floor".into()));
    }
    if usable < 2 {
        return Err(Error::Statistics("fewer than two levels above the population floor".into()));
    }
    let mean_n: f64 = p.iter().enumerate().map(|(n, x)| n as f64 * x).sum();
    let t_fit = omega / (1.0 / mean_n).ln_1p();

    let mut gaps = Vec::with_capacity(usable - 1);
    let mut inverted = 0;
    for n in 0..usable - 1 {
        let ratio = p[n] / p[n + 1];
        if ratio <= 1.0 {
            inverted += 1;
            gaps.push(f64::NAN);
        } else {
            gaps.push(omega / ratio.ln());
        }
    }
    let finite = gaps.iter().copied().filter(|t| t.is_finite());
    let (t_min, t_max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    if !t_min.is_finite() {
        return Err(Error::Statistics("every usable gap is inverted".into()));
    }

    // weighted least squares for ln p_n = a + b n
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (n, &w) in p.iter().enumerate().take(usable) {
        let (x, y) = (n as f64, w.ln());
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    let slope_temperature = -omega / slope;

    Ok(ModeStatistics {
        omega,
        mean_n,
        populations: p.to_vec(),
        t_fit,
        gap_temperatures: gaps,
        t_min,
        t_max,
        slope_temperature,
        inverted_gaps: inverted,
    })
}
