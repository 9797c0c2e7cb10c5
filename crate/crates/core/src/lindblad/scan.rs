//! Steady states over a sequence of coupling strengths.

use serde::Serialize;

use super::fock::MODES;
use super::solver::{steady_state_with, InitialState, SolverOptions};
use super::stats::{mode_statistics, ModeStatistics};
use super::system::ThreeModeSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub g: f64,
    pub modes: [ModeStatistics; MODES],
    pub residual: f64,
    pub leakage: [f64; MODES],
}

impl ScanRow {
    /// Spread of the fitted temperatures across modes.
    pub fn spread(&self) -> f64 {
        let t = self.modes.iter().map(|m| m.t_fit);
        let (lo, hi) = t.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        hi - lo
    }
}

#[derive(Debug)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    /// First failing point; rows hold every point that succeeded.
    pub failure: Option<(f64, Error)>,
}

impl ScanOutcome {
    pub fn into_result(self) -> Result<Vec<ScanRow>> {
        match self.failure {
            Some((_, e)) => Err(e),
            None => Ok(self.rows),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub solver: SolverOptions,
    /// Start each solve from the previous steady state.
    pub warm_start: bool,
    /// Threads for cold-started scans; ignored when warm-starting.
    pub workers: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), warm_start: true, workers: 1 }
    }
}

fn solve_point(template: &ThreeModeSystem, g: f64, opts: &SolverOptions) -> Result<(ScanRow, super::DensityOperator)> {
    let sys = template.with_g(g);
    let ss = steady_state_with(&sys, opts)?;
    let omegas = sys.frequencies();
    let trunc = sys.truncation();
    let modes = [
        mode_statistics(&ss.rho, trunc, 0, omegas[0])?,
        mode_statistics(&ss.rho, trunc, 1, omegas[1])?,
        mode_statistics(&ss.rho, trunc, 2, omegas[2])?,
    ];
    Ok((ScanRow { g, modes, residual: ss.residual, leakage: ss.leakage }, ss.rho))
}

fn check_grid(g_values: &[f64]) -> Result<()> {
    if g_values.is_empty() {
        return Err(Error::Domain("empty g grid".into()));
    }
    if g_values.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::Domain("g values must be finite and non-negative".into()));
    }
    if g_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("g values must be strictly ascending".into()));
    }
    Ok(())
}

pub fn g_scan(template: &ThreeModeSystem, g_values: &[f64]) -> Result<ScanOutcome> {
    g_scan_with(template, g_values, &ScanOptions::default())
}

pub fn g_scan_with(template: &ThreeModeSystem, g_values: &[f64], opts: &ScanOptions) -> Result<ScanOutcome> {
    check_grid(g_values)?;
    if !opts.warm_start && opts.workers > 1 {
        return Ok(cold_parallel(template, g_values, opts));
    }
    let mut rows = Vec::with_capacity(g_values.len());
    let mut solver = opts.solver.clone();
    for &g in g_values {
        match solve_point(template, g, &solver) {
            Ok((row, rho)) => {
                log::info!("g = {g:.4e}: residual {:.2e}, spread {:.4e}", row.residual, row.spread());
                rows.push(row);
                if opts.warm_start {
                    solver.initial = InitialState::Given(rho);
                }
            }
            Err(e) => {
                log::warn!("g scan stopped at g = {g}: {e}");
                return Ok(ScanOutcome { rows, failure: Some((g, e)) });
            }
        }
    }
    Ok(ScanOutcome { rows, failure: None })
}

fn cold_parallel(template: &ThreeModeSystem, g_values: &[f64], opts: &ScanOptions) -> ScanOutcome {
    let chunk = g_values.len().div_ceil(opts.workers);
    let results: Vec<Result<ScanRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = g_values
            .chunks(chunk)
            .map(|gs| {
                s.spawn(move || {
                    gs.iter()
                        .map(|&g| solve_point(template, g, &opts.solver).map(|r| r.0))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let mut rows = Vec::new();
    for (g, r) in g_values.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => return ScanOutcome { rows, failure: Some((*g, e)) },
        }
    }
    ScanOutcome { rows, failure: None }
}
