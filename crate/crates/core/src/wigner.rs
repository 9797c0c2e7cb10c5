//! Gaussian phase-space description of a single damped mode.
//!
//! A mode coupled to the two baths stays Gaussian, so its Wigner function is
//! fully described by a variance σ² and a mean amplitude. Nothing here is
//! discretized on a phase-space grid.

use num_complex::Complex64;
use serde::Serialize;

use crate::bath::ModeSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    /// σ² in W(α) ∝ exp(−|α − ᾱ|²/σ²); the vacuum has σ² = 1/2.
    pub variance: f64,
    #[serde(skip)]
    pub mean: Complex64,
}

impl GaussianState {
    pub fn new(variance: f64, mean: Complex64) -> Result<Self> {
        if !(variance >= 0.5) {
            return Err(Error::Domain(format!(
                "Wigner variance {variance} is below the vacuum value 1/2"
            )));
        }
        Ok(Self { variance, mean })
    }

    /// Thermal occupation σ² − 1/2.
    pub fn occupation(&self) -> f64 {
        self.variance - 0.5
    }

    /// Temperature of the thermal state with this variance,
    /// ω / ln(1 + 1/(σ² − 1/2)).
    pub fn temperature(&self, omega: f64) -> f64 {
        let n = self.occupation();
        if n <= 0.0 {
            return 0.0;
        }
        omega / (1.0 / n).ln_1p()
    }

    /// Wigner function value at α.
    pub fn wigner(&self, alpha: Complex64) -> f64 {
        let d = (alpha - self.mean).norm_sqr();
        (-d / self.variance).exp() / (std::f64::consts::PI * self.variance)
    }
}

/// Stationary solution of the two-bath Fokker-Planck equation,
/// σ² = 1/2 + Γ⁺/(Γ⁻ − Γ⁺), centred at the origin.
pub fn steady_variance(mode: &ModeSpec, t_env: f64, t_mirror: f64) -> Result<GaussianState> {
    let (pe, pm) = mode.pairs(t_env, t_mirror)?;
    let total = pe + pm;
    let net = total.gamma_minus - total.gamma_plus;
    if !(net > 0.0) {
        return Err(Error::Degenerate("Γ⁻ = Γ⁺: no damping toward a steady state".into()));
    }
    GaussianState::new(0.5 + total.gamma_plus / net, Complex64::new(0.0, 0.0))
}

/// Decay rates of the coherent amplitude ⟨a⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceDecay {
    /// |⟨a⟩| ∝ e^{−rate·t} with rate (Γ⁻ − Γ⁺)/2 = (γ_e + γ_m)/2, the drift
    /// coefficient of the Fokker-Planck equation.
    pub amplitude_rate: f64,
    /// γ_e + γ_m, the combined rate quoted for relaxation of the mode. It is
    /// twice the amplitude rate and matches the decay of populations and of
    /// |⟨a⟩|², not of ⟨a⟩.
    pub quoted_rate: f64,
}

pub fn coherence_decay_rate(mode: &ModeSpec) -> CoherenceDecay {
    let bare = mode.gamma_e + mode.gamma_m;
    CoherenceDecay { amplitude_rate: 0.5 * bare, quoted_rate: bare }
}

/// Time derivative of the mean amplitude, (−iω − (Γ⁻ − Γ⁺)/2)⟨a⟩.
pub fn amplitude_derivative(mode: &ModeSpec, mean: Complex64) -> Complex64 {
    let rate = coherence_decay_rate(mode).amplitude_rate;
    Complex64::new(-rate, -mode.frequency) * mean
}
