//! Unit conventions.
//!
//! Steady-state math runs in natural units (ħ = k_B = 1) where every energy,
//! frequency, temperature and rate is a multiple of a reference temperature,
//! normally the environment temperature T_e. SI values (rad/s, K, s⁻¹) only
//! appear at the dissipation-rate boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity in F/m (CODATA 2018).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light in m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    /// Multiples of the declared reference temperature.
    Natural,
    /// rad/s for frequencies and rates, kelvin for temperatures.
    #[serde(rename = "si")]
    Si,
}

/// Whether a scale is an energy-like frequency or a temperature; only
/// matters for the SI leg of a conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Frequency,
    Temperature,
}

/// A strictly positive, finite energy scale with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyScale {
    value: f64,
    unit: Unit,
}

impl EnergyScale {
    pub fn new(value: f64, unit: Unit) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Domain(format!(
                "energy scale must be finite and > 0, got {value}"
            )));
        }
        Ok(Self { value, unit })
    }

    pub fn natural(value: f64) -> Result<Self> {
        Self::new(value, Unit::Natural)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }
}

/// Converter between SI and natural units anchored at a reference
/// temperature in kelvin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    reference_kelvin: f64,
}

impl UnitSystem {
    pub fn new(reference_kelvin: f64) -> Result<Self> {
        if !reference_kelvin.is_finite() || reference_kelvin <= 0.0 {
            return Err(Error::Domain(format!(
                "reference temperature must be finite and > 0 K, got {reference_kelvin}"
            )));
        }
        Ok(Self { reference_kelvin })
    }

    pub fn reference_kelvin(&self) -> f64 {
        self.reference_kelvin
    }

    /// Angular frequency (rad/s) that corresponds to one natural energy unit.
    pub fn natural_frequency_unit(&self) -> f64 {
        K_B * self.reference_kelvin / HBAR
    }

    /// Convert a scale to natural units.
    pub fn to_natural(&self, scale: EnergyScale, quantity: Quantity) -> EnergyScale {
        match scale.unit {
            Unit::Natural => scale,
            Unit::Si => {
                let v = match quantity {
                    Quantity::Frequency => scale.value / self.natural_frequency_unit(),
                    Quantity::Temperature => scale.value / self.reference_kelvin,
                };
                EnergyScale { value: v, unit: Unit::Natural }
            }
        }
    }

    /// Convert a scale to SI units.
    pub fn to_si(&self, scale: EnergyScale, quantity: Quantity) -> EnergyScale {
        match scale.unit {
            Unit::Si => scale,
            Unit::Natural => {
                let v = match quantity {
                    Quantity::Frequency => scale.value * self.natural_frequency_unit(),
                    Quantity::Temperature => scale.value * self.reference_kelvin,
                };
                EnergyScale { value: v, unit: Unit::Si }
            }
        }
    }

    /// SI rate (s⁻¹, treated as an angular frequency) in natural units.
    pub fn rate_to_natural(&self, rate_per_s: f64) -> f64 {
        rate_per_s / self.natural_frequency_unit()
    }

    pub fn rate_to_si(&self, rate: f64) -> f64 {
        rate * self.natural_frequency_unit()
    }
}
