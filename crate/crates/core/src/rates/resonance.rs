use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mirror rate with a Lorentz-oscillator absorption line on top of a flat
/// background:
///
/// ```text
/// γ(ω) = γ_m (1 + f_res (ω²/τ²) / ((ω² − ω₀²)² + ω²/τ²))
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSpec {
    pub gamma_m: f64,
    pub omega_0: f64,
    /// Linewidth 1/τ.
    pub inv_tau: f64,
    pub f_res: f64,
}

impl ResonanceSpec {
    pub fn new(gamma_m: f64, omega_0: f64, inv_tau: f64, f_res: f64) -> Result<Self> {
        for (name, v) in [("gamma_m", gamma_m), ("omega_0", omega_0), ("inv_tau", inv_tau)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(f_res >= 0.0) || !f_res.is_finite() {
            return Err(Error::Domain(format!("f_res must be >= 0, got {f_res}")));
        }
        Ok(Self { gamma_m, omega_0, inv_tau, f_res })
    }

    /// Normalized line shape, equal to 1 at ω₀ and 0 at ω = 0.
    pub fn lorentzian(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let width = w2 * self.inv_tau * self.inv_tau;
        let detune = w2 - self.omega_0 * self.omega_0;
        if width == 0.0 {
            return 0.0;
        }
        width / (detune * detune + width)
    }

    /// Unchecked rate evaluation.
    pub fn rate(&self, omega: f64) -> f64 {
        self.gamma_m * (1.0 + self.f_res * self.lorentzian(omega))
    }

    /// Markovian treatment requires the rate to stay well below the
    /// linewidth of the structured bath.
    pub fn is_markovian_at(&self, omega: f64) -> bool {
        self.rate(omega) < self.inv_tau
    }
}

/// Structured mirror rate at `omega`; logs a warning when the rate reaches
/// the resonance linewidth.
pub fn resonant_mirror_rate(spec: &ResonanceSpec, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    let rate = spec.rate(omega);
    if rate >= spec.inv_tau {
        log::warn!(
            "mirror rate {rate:.4e} at ω = {omega:.4e} is not below the resonance width 1/τ = {:.4e}; \
             the Markovian rate description is unreliable here",
            spec.inv_tau
        );
    }
    Ok(rate)
}
