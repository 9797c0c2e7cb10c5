//! Steady state of the three-mode system by time integration to the fixed
//! point, with an optional Krylov refinement of L(ρ) = 0.

use std::ops::ControlFlow;

use num_complex::Complex64;

use super::density::{DensityOperator, InvariantReport};
use super::fock::MODES;
use super::integrator::{integrate, IntegrationStats, StepControl};
use super::liouvillian::{Liouvillian, PairLayout};
use super::system::ThreeModeSystem;
use crate::error::{Error, Result};
use crate::steady::effective_temperature;

/// Largest acceptable population of the top level of each mode.
pub const LEAKAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum InitialState {
    /// Product of the g = 0 thermal states at each mode's effective
    /// temperature (truncated and renormalized).
    AnalyticProduct,
    MaximallyMixed,
    Given(DensityOperator),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Bound on ‖L(ρ)‖_F.
    pub tol_abs: f64,
    /// Bound on ‖L(ρ)‖_F / ‖ρ‖_F.
    pub tol_rel: f64,
    pub step: StepControl,
    /// Integration horizon; defaults to 200 / min_i(γ_e + γ_m).
    pub max_time: Option<f64>,
    /// Run GMRES on L(δ) = −L(ρ) when integration stops short of tolerance.
    pub refine: bool,
    /// With refinement on, integration hands over to GMRES once
    /// ‖L(ρ)‖_F falls below this.
    pub handoff: f64,
    pub initial: InitialState,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_abs: 1e-10,
            tol_rel: 1e-9,
            step: StepControl::default(),
            max_time: None,
            refine: true,
            handoff: 1e-6,
            initial: InitialState::AnalyticProduct,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityOperator,
    /// ‖L(ρ)‖_F, recomputed after the solve.
    pub residual: f64,
    pub relative_residual: f64,
    pub time: f64,
    pub integration: IntegrationStats,
    pub refined: bool,
    /// Population of the top level of each mode.
    pub leakage: [f64; MODES],
    pub invariants: InvariantReport,
    /// (t, ‖L(ρ)‖_F) samples taken during integration.
    pub history: Vec<(f64, f64)>,
}

impl SteadyState {
    pub fn leakage_ok(&self) -> bool {
        self.leakage.iter().all(|&p| p < LEAKAGE_TOL)
    }
}

/// Initial state used when none is given: the analytic g = 0 product state.
pub fn analytic_product_state(sys: &ThreeModeSystem) -> Result<DensityOperator> {
    let mut temps = [0.0; MODES];
    for (i, t) in temps.iter_mut().enumerate() {
        let [e, m] = sys.bath_pairs(i);
        // temperature from the summed rates, valid for any rate pairs
        let total = e + m;
        *t = if total.gamma_plus == 0.0 {
            f64::MIN_POSITIVE
        } else {
            sys.frequencies()[i] / (total.gamma_minus / total.gamma_plus).ln()
        };
    }
    if temps.contains(&f64::MIN_POSITIVE) {
        // a mode without gain relaxes to vacuum
        let trunc = sys.truncation();
        let mut pops: [Vec<f64>; MODES] = Default::default();
        for i in 0..MODES {
            pops[i] = if temps[i] == f64::MIN_POSITIVE {
                let mut p = vec![0.0; trunc.levels(i)];
                p[0] = 1.0;
                p
            } else {
                super::density::truncated_thermal(sys.frequencies()[i], temps[i], trunc.levels(i))?
            };
        }
        return DensityOperator::product_of_populations(trunc, &pops);
    }
    DensityOperator::thermal_product(sys.truncation(), sys.frequencies(), temps)
}

/// Effective temperatures of the three modes at g = 0.
pub fn analytic_temperatures(sys: &ThreeModeSystem, t_env: f64, t_mirror: f64) -> Result<[f64; MODES]> {
    let mut out = [0.0; MODES];
    for (i, t) in out.iter_mut().enumerate() {
        *t = effective_temperature(&sys.mode_spec(i)?, t_env, t_mirror)?.t_star;
    }
    Ok(out)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn steady_state(sys: &ThreeModeSystem) -> Result<SteadyState> {
    steady_state_with(sys, &SolverOptions::default())
}

pub fn steady_state_with(sys: &ThreeModeSystem, opts: &SolverOptions) -> Result<SteadyState> {
    sys.check_ergodic()?;
    let trunc = *sys.truncation();
    let dim = trunc.dim();
    let lv = Liouvillian::new(sys);
    let layout = PairLayout::weight_diagonal(&sys.weights());

    let rho0 = match &opts.initial {
        InitialState::AnalyticProduct => analytic_product_state(sys)?,
        InitialState::MaximallyMixed => DensityOperator::from_diagonal(&vec![1.0 / dim as f64; dim]),
        InitialState::Given(r) => r.clone(),
    };
    let mut y = layout.pack(&rho0)?;

    let min_rate = (0..MODES).map(|i| sys.total_rate(i)).fold(f64::INFINITY, f64::min);
    let max_time = opts.max_time.unwrap_or(200.0 / min_rate);

    let mut history = Vec::new();
    let mut next_sample = 0usize;
    let mut steps = 0usize;
    let mut converged = false;
    let stats = integrate(
        |x, out| lv.apply_packed(&layout, x, out),
        &mut y,
        0.0,
        max_time,
        &opts.step,
        |t, y, dy| {
            let res = norm(dy);
            if steps == next_sample {
                history.push((t, res));
                next_sample = (next_sample * 2).max(1);
            }
            steps += 1;
            if res < opts.tol_abs && res < opts.tol_rel * norm(y) {
                history.push((t, res));
                converged = true;
                ControlFlow::Break(())
            } else if opts.refine && res < opts.handoff {
                history.push((t, res));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        },
    );
    log::debug!(
        "integration: t = {:.3e}, {} steps ({} rejected), converged = {converged}",
        stats.t,
        stats.accepted,
        stats.rejected
    );

    let mut refined = false;
    let mut residual = finalize(&lv, &layout, &mut y);
    if !(residual.0 < opts.tol_abs && residual.1 < opts.tol_rel) && opts.refine {
        refined = true;
        for _ in 0..3 {
            let tol = opts.tol_abs.min(opts.tol_rel * norm(&y)) * 0.1;
            gmres_correct(&lv, &layout, &mut y, tol, 60, 50);
            residual = finalize(&lv, &layout, &mut y);
            history.push((stats.t, residual.0));
            if residual.0 < opts.tol_abs && residual.1 < opts.tol_rel {
                break;
            }
        }
    }
    if !(residual.0 < opts.tol_abs && residual.1 < opts.tol_rel) {
        return Err(Error::NotConverged {
            time: stats.t,
            residual: residual.0,
            history: history.iter().map(|h| h.1).collect(),
        });
    }

    let rho = layout.unpack(&y);
    let mut leakage = [0.0; MODES];
    for (i, l) in leakage.iter_mut().enumerate() {
        *l = rho.mode_populations(&trunc, i)[trunc.caps()[i]];
        if *l >= LEAKAGE_TOL {
            log::warn!(
                "mode {} top-level population {l:.3e} exceeds {LEAKAGE_TOL:e}; raise its cap",
                i + 1
            );
        }
    }
    let invariants = rho.check_invariants();
    if !invariants.ok() {
        log::warn!("steady state violates density-operator invariants: {invariants:?}");
    }
    Ok(SteadyState {
        rho,
        residual: residual.0,
        relative_residual: residual.1,
        time: stats.t,
        integration: stats,
        refined,
        leakage,
        invariants,
        history,
    })
}

/// Symmetrize, renormalize and return (‖L(ρ)‖_F, ‖L(ρ)‖_F/‖ρ‖_F).
fn finalize(lv: &Liouvillian, layout: &PairLayout, y: &mut [Complex64]) -> (f64, f64) {
    let mut rho = layout.unpack(y);
    rho.hermitize();
    rho.normalize_trace();
    let packed = layout.pack(&rho).expect("layout is closed under hermitization");
    y.copy_from_slice(&packed);
    let mut out = vec![Complex64::new(0.0, 0.0); y.len()];
    lv.apply_packed(layout, y, &mut out);
    let r = norm(&out);
    (r, r / norm(y))
}

/// Restarted GMRES for L(δ) = −L(y); updates y ← y + δ.
fn gmres_correct(lv: &Liouvillian, layout: &PairLayout, y: &mut [Complex64], tol: f64, restart: usize, max_cycles: usize) {
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let apply = |x: &[Complex64], out: &mut [Complex64]| lv.apply_packed(layout, x, out);
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };

    let mut ly = vec![zero; n];
    for _ in 0..max_cycles {
        apply(y, &mut ly);
        // residual of L(y + δ) = 0 at δ = 0
        let r: Vec<Complex64> = ly.iter().map(|z| -z).collect();
        let beta = norm(&r);
        if beta < tol {
            return;
        }
        let mut v: Vec<Vec<Complex64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![zero; restart]; restart + 1];
        let mut cs = vec![zero; restart];
        let mut sn = vec![zero; restart];
        let mut g = vec![zero; restart + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut k_used = 0;
        for j in 0..restart {
            let mut w = vec![zero; n];
            apply(&v[j], &mut w);
            for i in 0..=j {
                let hij = dot(&v[i], &w);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = Complex64::new(hn, 0.0);
            // apply previous rotations
            for i in 0..j {
                let t = cs[i].conj() * h[i][j] + sn[i].conj() * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let (a, b) = (h[j][j], h[j + 1][j]);
            let den = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if den == 0.0 {
                k_used = j;
                break;
            }
            cs[j] = a / den;
            sn[j] = b / den;
            h[j][j] = Complex64::new(den, 0.0);
            h[j + 1][j] = zero;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            k_used = j + 1;
            if g[j + 1].norm() < tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        // back substitution
        let mut coef = vec![zero; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for k in i + 1..k_used {
                s -= h[i][k] * coef[k];
            }
            coef[i] = s / h[i][i];
        }
        for (i, c) in coef.iter().enumerate() {
            for (yk, vk) in y.iter_mut().zip(&v[i]) {
                *yk += c * vk;
            }
        }
    }
}
