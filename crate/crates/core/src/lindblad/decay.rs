//! Relaxation of a displaced thermal state in the full master equation, used
//! to measure the decay rate of ⟨a⟩.

use std::ops::ControlFlow;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::density::{truncated_thermal, DensityOperator};
use super::fock::{build_mode_operators, FockTruncation};
use super::integrator::{integrate, StepControl};
use super::liouvillian::{Liouvillian, PairLayout};
use super::system::ThreeModeSystem;
use crate::bath::ModeSpec;
use crate::error::{Error, Result};
use crate::steady::effective_temperature;
use crate::wigner::coherence_decay_rate;

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    /// Slope of −ln|⟨a⟩(t)|.
    pub measured_rate: f64,
    /// (γ_e + γ_m)/2.
    pub amplitude_rate: f64,
    /// γ_e + γ_m.
    pub quoted_rate: f64,
    /// (t, |⟨a⟩|) at accepted integrator steps.
    pub samples: Vec<(f64, f64)>,
}

impl DecayFit {
    pub fn relative_error(&self) -> f64 {
        (self.measured_rate - self.amplitude_rate).abs() / self.amplitude_rate
    }
}

/// D(α) ρ_T D(α)† on `levels` levels; built on a larger space then cut and
/// renormalized.
pub fn displaced_thermal(omega: f64, temperature: f64, alpha: Complex64, levels: usize) -> Result<DMatrix<Complex64>> {
    let big = levels + 40;
    let p = truncated_thermal(omega, temperature, big)?;
    let mut gen = DMatrix::<Complex64>::zeros(big, big);
    for n in 1..big {
        let s = (n as f64).sqrt();
        // α a† − α* a
        gen[(n, n - 1)] += alpha * s;
        gen[(n - 1, n)] -= alpha.conj() * s;
    }
    let d = gen.exp();
    let thermal = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(big, p.iter().map(|&x| Complex64::new(x, 0.0))));
    let full = &d * thermal * d.adjoint();
    let mut cut = full.view((0, 0), (levels, levels)).into_owned();
    let tr: Complex64 = cut.trace();
    cut /= tr;
    Ok(cut)
}

/// Evolves a displaced thermal state of a single mode (the other two are
/// kept at their lowest two levels) for `span` amplitude lifetimes and fits
/// the decay of |⟨a⟩|.
pub fn measure_coherence_decay(
    mode: &ModeSpec,
    t_env: f64,
    t_mirror: f64,
    alpha: Complex64,
    cap: usize,
    span: f64,
) -> Result<DecayFit> {
    if alpha.norm() == 0.0 {
        return Err(Error::Domain("displacement must be nonzero".into()));
    }
    let trunc = FockTruncation::new([cap, 1, 1])?;
    let sys = ThreeModeSystem::flat(mode.frequency, t_env, t_mirror, mode.gamma_e, mode.gamma_m, 0.0, trunc)?;
    let t_star = effective_temperature(mode, t_env, t_mirror)?.t_star;
    let local = displaced_thermal(mode.frequency, t_star, alpha, cap + 1)?;

    let dim = trunc.dim();
    let stride = trunc.stride(0);
    let mut rho = DensityOperator::zeros(dim);
    // the spectator modes sit in their ground state
    for i in 0..=cap {
        for j in 0..=cap {
            rho.set(i * stride, j * stride, local[(i, j)]);
        }
    }
    let layout = PairLayout::full(dim);
    let lv = Liouvillian::new(&sys);
    let mut y = layout.pack(&rho)?;

    let a = &build_mode_operators(&trunc).annihilation[0];
    let amp = |x: &[Complex64]| -> f64 {
        // Tr(aρ) = Σ a_ij ρ_ji
        a.entries.iter().map(|&(i, j, v)| x[j * dim + i] * v).sum::<Complex64>().norm()
    };
    let expected = coherence_decay_rate(mode);
    let t_end = span / expected.amplitude_rate;
    let ctl = StepControl { h_max: 0.05 / expected.amplitude_rate, ..Default::default() };
    let mut samples = vec![(0.0, amp(&y))];
    integrate(
        |x, out| lv.apply_packed(&layout, x, out),
        &mut y,
        0.0,
        t_end,
        &ctl,
        |t, x, _| {
            samples.push((t, amp(x)));
            ControlFlow::Continue(())
        },
    );

    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 > 0.0).map(|&(t, v)| (t, v.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::Statistics("too few samples to fit the decay".into()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx).powi(2), b + (p.0 - mx) * (p.1 - my)));
    let slope = sxy / sxx;
    Ok(DecayFit {
        measured_rate: -slope,
        amplitude_rate: expected.amplitude_rate,
        quoted_rate: expected.quoted_rate,
        samples,
    })
}
