//! Dormand-Prince 5(4) integrator for autonomous complex linear systems.

use std::ops::ControlFlow;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step; `None` picks one from the initial derivative.
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-10, h0: None, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegrationStats {
    pub t: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// True when the step callback asked to stop before `t_end`.
    pub stopped_early: bool,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate y' = f(y) from `t0` toward `t_end`, updating `y` in place.
///
/// After every accepted step `on_step(t, y, f(y))` is called; returning
/// `ControlFlow::Break` ends the integration at that point. The derivative
/// handed to the callback is the first stage of the next step (FSAL), so
/// inspecting it costs nothing extra.
pub fn integrate<F, S>(
    mut f: F,
    y: &mut [Complex64],
    t0: f64,
    t_end: f64,
    ctl: &StepControl,
    mut on_step: S,
) -> IntegrationStats
where
    F: FnMut(&[Complex64], &mut [Complex64]),
    S: FnMut(f64, &[Complex64], &[Complex64]) -> ControlFlow<()>,
{
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k = vec![vec![zero; n]; 7];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut stats = IntegrationStats { t: t0, ..Default::default() };

    f(y, &mut k[0]);
    stats.evaluations += 1;
    if on_step(t0, y, &k[0]).is_break() {
        stats.stopped_early = true;
        return stats;
    }

    let mut h = ctl.h0.unwrap_or_else(|| initial_step(y, &k[0], ctl)).min(ctl.h_max);
    let mut t = t0;
    let mut fac_old = 1e-4f64;

    while t < t_end && stats.accepted + stats.rejected < ctl.max_steps {
        if t + h > t_end {
            h = t_end - t;
        }
        let stage = |tmp: &mut [Complex64], k: &[Vec<Complex64>], coeffs: &[(usize, f64)]| {
            for j in 0..n {
                let mut acc = y[j];
                for &(s, a) in coeffs {
                    acc += k[s][j] * (h * a);
                }
                tmp[j] = acc;
            }
        };
        stage(&mut tmp, &k, &[(0, A21)]);
        f(&tmp, &mut k[1]);
        stage(&mut tmp, &k, &[(0, A31), (1, A32)]);
        f(&tmp, &mut k[2]);
        stage(&mut tmp, &k, &[(0, A41), (1, A42), (2, A43)]);
        f(&tmp, &mut k[3]);
        stage(&mut tmp, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        f(&tmp, &mut k[4]);
        stage(&mut tmp, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
        f(&tmp, &mut k[5]);
        stage(&mut y_new, &k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
        f(&y_new, &mut k[6]);
        stats.evaluations += 6;

        let mut err2 = 0.0;
        for j in 0..n {
            let e = (k[0][j] * E1 + k[2][j] * E3 + k[3][j] * E4 + k[4][j] * E5 + k[5][j] * E6 + k[6][j] * E7) * h;
            let sc = ctl.atol + ctl.rtol * y[j].norm().max(y_new[j].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / n.max(1) as f64).sqrt();

        if err <= 1.0 {
            // PI step-size controller
            let fac = 0.9 * err.max(1e-10).powf(-0.17) * fac_old.powf(0.04);
            fac_old = err.max(1e-4);
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            stats.accepted += 1;
            stats.t = t;
            if on_step(t, y, &k[0]).is_break() {
                stats.stopped_early = true;
                return stats;
            }
            h = (h * fac.clamp(0.2, 10.0)).min(ctl.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            log::warn!("step size underflow at t = {t:.6e}");
            break;
        }
    }
    stats
}

fn initial_step(y: &[Complex64], dy: &[Complex64], ctl: &StepControl) -> f64 {
    let n = y.len().max(1) as f64;
    let (mut d0, mut d1) = (0.0, 0.0);
    for (a, b) in y.iter().zip(dy) {
        let sc = ctl.atol + ctl.rtol * a.norm();
        d0 += (a.norm() / sc).powi(2);
        d1 += (b.norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).min(1.0)
    }
}
