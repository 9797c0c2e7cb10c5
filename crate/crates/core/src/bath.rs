//! Bose statistics, detailed-balance rate pairs and the value types that
//! describe a mode and its two reservoirs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::ResonanceSpec;

/// Above this ω/T the occupation is returned as exactly zero.
pub const BOSE_CUTOFF: f64 = 700.0;

/// Bose-Einstein occupation n_B(ω, T) = 1/(e^{ω/T} − 1).
///
/// Uses `exp_m1` so the Rayleigh-Jeans end (ω ≪ T) keeps full precision,
/// and returns 0 beyond ω/T = 700 instead of underflowing.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be > 0, got {temperature}"
        )));
    }
    let x = omega / temperature;
    if x > BOSE_CUTOFF {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Loss and gain rates (γ⁻, γ⁺) of one mode-reservoir link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl RatePair {
    pub fn zero() -> Self {
        Self { gamma_minus: 0.0, gamma_plus: 0.0 }
    }

    /// Bare rate recovered from the pair: γ⁻ − γ⁺.
    pub fn bare(&self) -> f64 {
        self.gamma_minus - self.gamma_plus
    }
}

impl std::ops::Add for RatePair {
    type Output = RatePair;

    fn add(self, rhs: RatePair) -> RatePair {
        RatePair {
            gamma_minus: self.gamma_minus + rhs.gamma_minus,
            gamma_plus: self.gamma_plus + rhs.gamma_plus,
        }
    }
}

/// γ⁻ = γ(1 + n_B), γ⁺ = γ n_B for a bare rate γ at (ω, T).
pub fn rate_pair(gamma: f64, omega: f64, temperature: f64) -> Result<RatePair> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("bare rate must be >= 0, got {gamma}")));
    }
    let n = bose_einstein(omega, temperature)?;
    Ok(RatePair {
        gamma_minus: gamma * (1.0 + n),
        gamma_plus: gamma * n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReservoirLabel {
    /// Free-space electromagnetic environment.
    Environment,
    /// Mirror (or metal substrate) absorption.
    Mirror,
}

impl fmt::Display for ReservoirLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReservoirLabel::Environment => f.write_str("e"),
            ReservoirLabel::Mirror => f.write_str("m"),
        }
    }
}

/// Frequency dependence of a bare, temperature-independent coupling rate.
#[derive(Clone)]
pub enum RateModel {
    Constant(f64),
    /// Flat background with a Lorentz-oscillator absorption peak.
    Resonant(ResonanceSpec),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RateModel {
    pub fn rate(&self, omega: f64) -> f64 {
        match self {
            RateModel::Constant(g) => *g,
            RateModel::Resonant(spec) => spec.rate(omega),
            RateModel::Custom(f) => f(omega),
        }
    }
}

impl fmt::Debug for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateModel::Constant(g) => f.debug_tuple("Constant").field(g).finish(),
            RateModel::Resonant(s) => f.debug_tuple("Resonant").field(s).finish(),
            RateModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A thermal bath: its temperature and bare coupling rate γ(ω).
#[derive(Debug, Clone)]
pub struct ReservoirSpec {
    pub label: ReservoirLabel,
    pub temperature: f64,
    pub rate: RateModel,
}

impl ReservoirSpec {
    pub fn new(label: ReservoirLabel, temperature: f64, rate: RateModel) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::Domain(format!(
                "reservoir {label} temperature must be > 0, got {temperature}"
            )));
        }
        Ok(Self { label, temperature, rate })
    }

    /// Rate pair of this bath for a mode at `omega`.
    pub fn pair(&self, omega: f64) -> Result<RatePair> {
        let g = self.rate.rate(omega);
        if !(g >= 0.0) {
            return Err(Error::Domain(format!(
                "reservoir {} rate at ω = {omega} is negative ({g})",
                self.label
            )));
        }
        rate_pair(g, omega, self.temperature)
    }
}

/// One cavity mode: frequency and its bare rates into the environment and
/// the mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub frequency: f64,
    pub gamma_e: f64,
    pub gamma_m: f64,
}

impl ModeSpec {
    pub fn new(frequency: f64, gamma_e: f64, gamma_m: f64) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::Domain(format!(
                "mode frequency must be > 0, got {frequency}"
            )));
        }
        if !(gamma_e >= 0.0) || !(gamma_m >= 0.0) || !gamma_e.is_finite() || !gamma_m.is_finite() {
            return Err(Error::Domain(format!(
                "bare rates must be finite and >= 0, got γ_e = {gamma_e}, γ_m = {gamma_m}"
            )));
        }
        if gamma_e + gamma_m <= 0.0 {
            return Err(Error::Degenerate(
                "γ_e = γ_m = 0: no reservoir selects a steady state".into(),
            ));
        }
        Ok(Self { frequency, gamma_e, gamma_m })
    }

    /// Rate pairs (environment, mirror) at the given bath temperatures.
    pub fn pairs(&self, t_env: f64, t_mirror: f64) -> Result<(RatePair, RatePair)> {
        Ok((
            rate_pair(self.gamma_e, self.frequency, t_env)?,
            rate_pair(self.gamma_m, self.frequency, t_mirror)?,
        ))
    }
}
