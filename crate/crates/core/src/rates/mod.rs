//! Bare dissipation rates γ_m(ω) and γ_e(ω) from macroscopic cavity
//! parameters.
//!
//! Two precision levels are kept apart. Functions named `*_estimate` are
//! order-of-magnitude scaling laws with prefactor exactly 1. Functions named
//! `*_exact` carry the full prefactors of the leading-order Fresnel
//! calculation for a planar cavity with two identical mirrors.
//!
//! All functions here work in SI: frequencies and rates in rad/s (s⁻¹),
//! conductivities in S/m, lengths in m.

mod resonance;
mod table;

pub use resonance::{resonant_mirror_rate, ResonanceSpec};
pub use table::{load_conductivity_table, ConductivityTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{C_LIGHT, EPSILON_0};

/// Leading-order prefactor of the plasmon-to-free-space rate. It comes from
/// an approximate overlap integral and has no stated error bound.
pub const PLASMON_ENV_PREFACTOR: f64 = 1008.0;

/// Conductivity model σ(ω) in S/m.
#[derive(Debug, Clone, PartialEq)]
pub enum Conductivity {
    Constant(f64),
    /// σ_dc / (1 + ω²τ_D²).
    Drude { sigma_dc: f64, tau: f64 },
    Tabulated(ConductivityTable),
}

impl Conductivity {
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            Conductivity::Constant(s) => *s,
            Conductivity::Drude { sigma_dc, tau } => {
                let wt = omega * tau;
                sigma_dc / (1.0 + wt * wt)
            }
            Conductivity::Tabulated(t) => t.eval(omega),
        }
    }
}

/// Metal of the mirrors or of the plasmonic substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorMaterial {
    pub plasma_frequency: f64,
    pub conductivity: Conductivity,
}

impl MirrorMaterial {
    pub fn new(plasma_frequency: f64, conductivity: Conductivity) -> Result<Self> {
        if !(plasma_frequency > 0.0) || !plasma_frequency.is_finite() {
            return Err(Error::Domain(format!(
                "plasma frequency must be > 0, got {plasma_frequency}"
            )));
        }
        match &conductivity {
            Conductivity::Constant(s) if !(*s >= 0.0) => {
                return Err(Error::Domain(format!("conductivity must be >= 0, got {s}")))
            }
            Conductivity::Drude { sigma_dc, tau } if !(*sigma_dc >= 0.0) || !(*tau >= 0.0) => {
                return Err(Error::Domain(format!(
                    "Drude parameters must be >= 0, got σ_dc = {sigma_dc}, τ = {tau}"
                )))
            }
            _ => {}
        }
        Ok(Self { plasma_frequency, conductivity })
    }

    pub fn sigma(&self, omega: f64) -> f64 {
        self.conductivity.eval(omega)
    }

    /// Real part of the dielectric function, 1 − ω_p²/ω².
    pub fn epsilon_real(&self, omega: f64) -> f64 {
        1.0 - (self.plasma_frequency / omega).powi(2)
    }

    fn check_regime(&self, omega: f64) -> Result<()> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
        }
        if omega >= self.plasma_frequency / 3.0 {
            return Err(Error::Regime(format!(
                "ω < ω_p/3 violated: ω = {omega:.4e}, ω_p/3 = {:.4e}",
                self.plasma_frequency / 3.0
            )));
        }
        Ok(())
    }
}

/// Planar Fabry-Perot cavity of length L_c with mirrors of thickness d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FabryPerotGeometry {
    pub cavity_length: f64,
    pub mirror_thickness: f64,
}

/// Soft validity conditions of the planar-cavity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidityFlags {
    /// d < L_c / 10.
    pub thin_mirrors: bool,
    /// ω_p d / c > 1.
    pub high_finesse: bool,
    /// ω < ω_p / 3.
    pub below_plasma: bool,
}

impl ValidityFlags {
    pub fn all_ok(&self) -> bool {
        self.thin_mirrors && self.high_finesse && self.below_plasma
    }
}

impl FabryPerotGeometry {
    pub fn new(cavity_length: f64, mirror_thickness: f64) -> Result<Self> {
        if !(cavity_length > 0.0) || !(mirror_thickness > 0.0) {
            return Err(Error::Domain(format!(
                "lengths must be > 0, got L_c = {cavity_length}, d = {mirror_thickness}"
            )));
        }
        let geo = Self { cavity_length, mirror_thickness };
        if mirror_thickness >= cavity_length / 10.0 {
            log::warn!("mirror thickness {mirror_thickness:.3e} m is not ≪ cavity length {cavity_length:.3e} m");
        }
        Ok(geo)
    }

    /// Geometry whose fundamental is a given ω_c.
    pub fn from_fundamental(omega_c: f64, mirror_thickness: f64) -> Result<Self> {
        Self::new(std::f64::consts::PI * C_LIGHT / omega_c, mirror_thickness)
    }

    /// Fundamental frequency ω_c = πc/L_c.
    pub fn omega_c(&self) -> f64 {
        std::f64::consts::PI * C_LIGHT / self.cavity_length
    }

    /// Skin-depth parameter ω_p d / c.
    pub fn finesse_parameter(&self, mat: &MirrorMaterial) -> f64 {
        mat.plasma_frequency * self.mirror_thickness / C_LIGHT
    }

    pub fn validity(&self, mat: &MirrorMaterial, omega: f64) -> ValidityFlags {
        ValidityFlags {
            thin_mirrors: self.mirror_thickness < self.cavity_length / 10.0,
            high_finesse: self.finesse_parameter(mat) > 1.0,
            below_plasma: omega < mat.plasma_frequency / 3.0,
        }
    }

    fn warn_soft(&self, mat: &MirrorMaterial) {
        if self.finesse_parameter(mat) <= 1.0 {
            log::warn!(
                "ω_p d/c = {:.3} ≤ 1: mirrors are not thick compared to the skin depth",
                self.finesse_parameter(mat)
            );
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// TE
    S,
    /// TM
    P,
}

/// Planar-cavity mode label (m, q_x, polarization).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FPModeIndex {
    pub longitudinal: u32,
    /// Transverse wavevector q_x in rad/m.
    pub q_x: f64,
    pub polarization: Polarization,
}

impl FPModeIndex {
    pub fn new(longitudinal: u32, q_x: f64, polarization: Polarization) -> Result<Self> {
        if !q_x.is_finite() || q_x < 0.0 {
            return Err(Error::Domain(format!("q_x must be finite and >= 0, got {q_x}")));
        }
        if longitudinal == 0 && polarization == Polarization::S {
            return Err(Error::Domain("no TE mode exists at m = 0".into()));
        }
        if longitudinal == 0 && q_x == 0.0 {
            return Err(Error::Domain("mode (m = 0, q_x = 0) has zero frequency".into()));
        }
        Ok(Self { longitudinal, q_x, polarization })
    }

    /// ω_ν = sqrt(c²q_x² + (m ω_c)²).
    pub fn frequency(&self, geo: &FabryPerotGeometry) -> f64 {
        let mw = self.longitudinal as f64 * geo.omega_c();
        (C_LIGHT * self.q_x).hypot(mw)
    }

    /// m ω_c / ω_ν, the cosine of the internal incidence angle.
    fn normal_fraction(&self, geo: &FabryPerotGeometry) -> f64 {
        self.longitudinal as f64 * geo.omega_c() / self.frequency(geo)
    }
}

/// Scaling estimate of the mirror absorption rate,
/// (σ/ε₀)(ω/ω_p)²(ω_c/ω_p).
///
/// The same relation also appears written with an extra factor ½; the form
/// without it is used here.
pub fn fp_rate_mirror_estimate(mat: &MirrorMaterial, geo: &FabryPerotGeometry, omega: f64) -> Result<f64> {
    mat.check_regime(omega)?;
    geo.warn_soft(mat);
    let wp = mat.plasma_frequency;
    Ok(mat.sigma(omega) / EPSILON_0 * (omega / wp).powi(2) * (geo.omega_c() / wp))
}

/// Scaling estimate of the leakage rate through the mirrors into free space,
/// ω² ω_c (d/c)² e^{−2ω_p d/c}.
pub fn fp_rate_env_estimate(mat: &MirrorMaterial, geo: &FabryPerotGeometry, omega: f64) -> Result<f64> {
    mat.check_regime(omega)?;
    geo.warn_soft(mat);
    let d_over_c = geo.mirror_thickness / C_LIGHT;
    let kd = geo.finesse_parameter(mat);
    Ok(omega * omega * geo.omega_c() * d_over_c * d_over_c * (-2.0 * kd).exp())
}

/// Mirror absorption rate of planar-cavity mode `idx`, both mirrors included.
pub fn fp_rate_mirror_exact(mat: &MirrorMaterial, geo: &FabryPerotGeometry, idx: &FPModeIndex) -> Result<f64> {
    let omega = idx.frequency(geo);
    mat.check_regime(omega)?;
    geo.warn_soft(mat);
    let wp = mat.plasma_frequency;
    let p = mat.sigma(omega) / (std::f64::consts::PI * EPSILON_0)
        * (omega / wp).powi(2)
        * (geo.omega_c() / wp);
    Ok(match idx.polarization {
        Polarization::P => p,
        Polarization::S => p * idx.normal_fraction(geo),
    })
}

/// Free-space leakage rate of planar-cavity mode `idx`, both mirrors
/// included. TM modes at m = 0 have no transmitted wave and do not leak.
pub fn fp_rate_env_exact(mat: &MirrorMaterial, geo: &FabryPerotGeometry, idx: &FPModeIndex) -> Result<f64> {
    let omega = idx.frequency(geo);
    mat.check_regime(omega)?;
    let kd = geo.finesse_parameter(mat);
    if kd <= 1.0 {
        return Err(Error::Regime(format!("ω_p d/c > 1 violated: ω_p d/c = {kd:.4}")));
    }
    if idx.longitudinal == 0 {
        // only the p polarization exists at m = 0
        return Ok(0.0);
    }
    let d_over_c = geo.mirror_thickness / C_LIGHT;
    let base = omega * omega * geo.omega_c() / (2.0 * std::f64::consts::PI)
        * d_over_c
        * d_over_c
        * (-2.0 * kd).exp();
    let cos = idx.normal_fraction(geo);
    Ok(match idx.polarization {
        Polarization::S => base * cos.powi(3),
        Polarization::P => base / cos,
    })
}

/// γ_m / γ_e from the two scaling estimates. Geometry factors cancel, so the
/// only frequency dependence left is that of σ(ω).
pub fn fp_ratio(mat: &MirrorMaterial, geo: &FabryPerotGeometry, omega: f64) -> Result<f64> {
    Ok(fp_rate_mirror_estimate(mat, geo, omega)? / fp_rate_env_estimate(mat, geo, omega)?)
}

/// Plasmon absorption rate into the metal, σ/(2ε₀) (ω/ω_p)⁴.
pub fn plasmonic_rate_mirror(mat: &MirrorMaterial, omega: f64) -> Result<f64> {
    mat.check_regime(omega)?;
    Ok(mat.sigma(omega) / (2.0 * EPSILON_0) * (omega / mat.plasma_frequency).powi(4))
}

/// Plasmon radiation rate into free space, 1008 ω (σ/(ε₀ω_p))³ (ω/ω_p).
/// The formula is perturbative in the loss tangent σ/(ε₀ω); a warning is
/// logged when it is not below 1.
pub fn plasmonic_rate_env(mat: &MirrorMaterial, omega: f64) -> Result<f64> {
    mat.check_regime(omega)?;
    let sigma = mat.sigma(omega);
    let loss = sigma / (EPSILON_0 * omega);
    if loss >= 1.0 {
        log::warn!("loss tangent σ/(ε₀ω) = {loss:.4e} is not below 1; plasmon radiation rate is unreliable");
    }
    let wp = mat.plasma_frequency;
    Ok(PLASMON_ENV_PREFACTOR * omega * (sigma / (EPSILON_0 * wp)).powi(3) * (omega / wp))
}

/// Rates in units of the mode frequency, from dimensionless inputs only.
pub mod relative {
    use super::PLASMON_ENV_PREFACTOR;

    /// γ_m/ω for a planar cavity, with s = σ/(ε₀ω_p), x = ω/ω_p, c = ω_c/ω_p.
    pub fn fp_mirror_estimate(s: f64, x: f64, c: f64) -> f64 {
        s * x * c
    }

    /// γ_m/ω for a plasmon, with s = σ/(ε₀ω_p), x = ω/ω_p.
    pub fn plasmonic_mirror(s: f64, x: f64) -> f64 {
        0.5 * s * x.powi(3)
    }

    /// γ_e/ω for a plasmon, with s = σ/(ε₀ω_p), x = ω/ω_p.
    pub fn plasmonic_env(s: f64, x: f64) -> f64 {
        PLASMON_ENV_PREFACTOR * s.powi(3) * x
    }
}
