//! Run configuration: a TOML file with one table per command, overridden by
//! `key=value` pairs and command-line flags.

use std::path::{Path, PathBuf};

use cavitherm::lindblad::FockTruncation;
use cavitherm::rates::{
    load_conductivity_table, Conductivity, FPModeIndex, FabryPerotGeometry, MirrorMaterial, Polarization,
};
use cavitherm::rates::ResonanceSpec;
use cavitherm::units::C_LIGHT;
use cavitherm::Unit;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Resonance,
    Nonlinear,
    Rates,
    Check,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Resonance => "resonance",
            Command::Nonlinear => "nonlinear",
            Command::Rates => "rates",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `natural` or `si`; unset means natural, except for `rates`.
    pub units: Option<Unit>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub workers: usize,
    /// T_e in kelvin, used when reporting in SI units.
    pub reference_kelvin: f64,
    pub spectrum: SpectrumConfig,
    pub resonance: ResonanceConfig,
    pub nonlinear: NonlinearConfig,
    pub rates: RatesConfig,
    pub check: CheckConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            units: None,
            format: Format::Csv,
            out: None,
            seed: 0,
            workers: 1,
            reference_kelvin: 300.0,
            spectrum: SpectrumConfig::default(),
            resonance: ResonanceConfig::default(),
            nonlinear: NonlinearConfig::default(),
            rates: RatesConfig::default(),
            check: CheckConfig::default(),
        }
    }
}

/// Log-spaced grid with a fixed number of points per decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub per_decade: usize,
}

impl GridConfig {
    pub fn points(&self) -> Vec<f64> {
        cavitherm::steady::decade_grid(self.min, self.max, self.per_decade)
    }

    fn validate(&self, key: &str) -> Result<(), CliError> {
        if !(self.min > 0.0 && self.max > self.min && self.max.is_finite()) {
            return Err(invalid(key, format!("need 0 < min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.per_decade == 0 {
            return Err(invalid(&format!("{key}.per_decade"), "must be at least 1"));
        }
        if self.points().is_empty() {
            return Err(invalid(key, "grid has no points"));
        }
        Ok(())
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { min: 1e-2, max: 20.0, per_decade: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    /// T_m / T_e.
    pub t_mirror: f64,
    /// γ_e / γ_m values, one block of rows each.
    pub gamma_ratios: Vec<f64>,
    /// ω / T_e.
    pub grid: GridConfig,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { t_mirror: 0.5, gamma_ratios: vec![10.0, 3.0, 1.0, 0.3, 0.1], grid: GridConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceConfig {
    pub t_mirror: f64,
    /// Off-resonance mirror rate, in units of T_e.
    pub gamma_m: f64,
    /// Constant γ_e / γ_m values.
    pub gamma_ratios: Vec<f64>,
    pub omega_0: f64,
    pub inv_tau: f64,
    pub f_res: f64,
    pub grid: GridConfig,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self {
            t_mirror: 0.5,
            gamma_m: 1e-3,
            gamma_ratios: vec![10.0, 0.1],
            omega_0: 1.0,
            inv_tau: 0.1,
            f_res: 10.0,
            grid: GridConfig::default(),
        }
    }
}

impl ResonanceConfig {
    pub fn spec(&self) -> Result<ResonanceSpec, CliError> {
        ResonanceSpec::new(self.gamma_m, self.omega_0, self.inv_tau, self.f_res).map_err(|e| invalid("resonance", e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearConfig {
    /// ω₁ / T_e; the other modes sit at 2ω₁ and 4ω₁.
    pub omega1: f64,
    pub t_mirror: f64,
    /// Bare rates, the same for all three modes.
    pub gamma_e: f64,
    pub gamma_m: f64,
    pub caps: [usize; 3],
    /// Coupling grid in units of Γ₁ = γ_e + γ_m.
    pub g_over_gamma1: Vec<f64>,
    pub warm_start: bool,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            t_mirror: 0.5,
            gamma_e: 0.02,
            gamma_m: 0.02,
            caps: [14, 6, 3],
            g_over_gamma1: vec![0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0],
            warm_start: true,
            tol_abs: 1e-10,
            tol_rel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModelKind {
    FabryPerot,
    Plasmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ConductivityConfig {
    /// S/m.
    Constant(f64),
    Drude { sigma_dc: f64, tau: f64 },
    /// Two-column text file (ω in rad/s, σ in S/m).
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub m: u32,
    /// rad/m
    pub q_x: f64,
    pub polarization: Polarization,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub model: RateModelKind,
    /// rad/s
    pub plasma_frequency: f64,
    pub conductivity: ConductivityConfig,
    /// m
    pub cavity_length: f64,
    /// m
    pub mirror_thickness: f64,
    /// ω in rad/s.
    pub grid: GridConfig,
    /// Planar-cavity modes evaluated with the exact expressions.
    pub modes: Vec<ModeConfig>,
}

impl Default for RatesConfig {
    fn default() -> Self {
        let mode = |m, q_x, polarization| ModeConfig { m, q_x, polarization };
        Self {
            model: RateModelKind::FabryPerot,
            plasma_frequency: 1.37e16,
            conductivity: ConductivityConfig::Constant(4.1e7),
            // fundamental at 1e13 rad/s
            cavity_length: std::f64::consts::PI * C_LIGHT / 1e13,
            mirror_thickness: 1e-6,
            grid: GridConfig { min: 1e12, max: 1e15, per_decade: 10 },
            modes: vec![
                mode(1, 0.0, Polarization::S),
                mode(1, 0.0, Polarization::P),
                mode(1, 1e5, Polarization::S),
                mode(1, 1e5, Polarization::P),
                mode(0, 1e5, Polarization::P),
            ],
        }
    }
}

impl RatesConfig {
    pub fn material(&self) -> Result<MirrorMaterial, CliError> {
        let sigma = match &self.conductivity {
            ConductivityConfig::Constant(s) => Conductivity::Constant(*s),
            ConductivityConfig::Drude { sigma_dc, tau } => Conductivity::Drude { sigma_dc: *sigma_dc, tau: *tau },
            ConductivityConfig::Table(p) => Conductivity::Tabulated(
                load_conductivity_table(p).map_err(|e| invalid("rates.conductivity.table", e.to_string()))?,
            ),
        };
        MirrorMaterial::new(self.plasma_frequency, sigma).map_err(|e| invalid("rates.plasma_frequency", e.to_string()))
    }

    pub fn geometry(&self) -> Result<FabryPerotGeometry, CliError> {
        FabryPerotGeometry::new(self.cavity_length, self.mirror_thickness)
            .map_err(|e| invalid("rates.cavity_length", e.to_string()))
    }

    pub fn mode_indices(&self) -> Result<Vec<FPModeIndex>, CliError> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                FPModeIndex::new(m.m, m.q_x, m.polarization).map_err(|e| invalid(&format!("rates.modes[{i}]"), e.to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of every gain rate before the detailed-balance check.
    RateSign,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    /// Random draws per randomized check.
    pub draws: Option<usize>,
    pub inject_fault: Option<Fault>,
}

fn invalid(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), message: message.into() }
}

fn check_ratios(key: &str, ratios: &[f64]) -> Result<(), CliError> {
    if ratios.is_empty() {
        return Err(invalid(key, "list must not be empty"));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(invalid(key, format!("ratios must be finite and > 0, got {r}")));
    }
    Ok(())
}

impl RunConfig {
    /// Reads `path` (if any), applies `key=value` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                text.parse::<toml::Table>().map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn units_for(&self, command: Command) -> Unit {
        self.units.unwrap_or(if command == Command::Rates { Unit::Si } else { Unit::Natural })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.workers == 0 {
            return Err(invalid("workers", "must be at least 1"));
        }
        if !(self.reference_kelvin > 0.0 && self.reference_kelvin.is_finite()) {
            return Err(invalid("reference_kelvin", "must be finite and > 0"));
        }

        let s = &self.spectrum;
        if !(s.t_mirror > 0.0 && s.t_mirror <= 1.0) {
            return Err(invalid("spectrum.t_mirror", format!("T_m/T_e must lie in (0, 1], got {}", s.t_mirror)));
        }
        check_ratios("spectrum.gamma_ratios", &s.gamma_ratios)?;
        s.grid.validate("spectrum.grid")?;

        let r = &self.resonance;
        if !(r.t_mirror > 0.0 && r.t_mirror.is_finite()) {
            return Err(invalid("resonance.t_mirror", "must be finite and > 0"));
        }
        check_ratios("resonance.gamma_ratios", &r.gamma_ratios)?;
        r.spec()?;
        r.grid.validate("resonance.grid")?;

        let n = &self.nonlinear;
        if !(n.omega1 > 0.0 && n.omega1.is_finite()) {
            return Err(invalid("nonlinear.omega1", "must be finite and > 0"));
        }
        if !(n.t_mirror > 0.0 && n.t_mirror.is_finite()) {
            return Err(invalid("nonlinear.t_mirror", "must be finite and > 0"));
        }
        if !(n.gamma_e >= 0.0 && n.gamma_m >= 0.0 && n.gamma_e + n.gamma_m > 0.0) {
            return Err(invalid("nonlinear.gamma_e", "rates must be >= 0 with a positive sum"));
        }
        FockTruncation::new(n.caps).map_err(|e| invalid("nonlinear.caps", e.to_string()))?;
        if n.g_over_gamma1.is_empty() {
            return Err(invalid("nonlinear.g_over_gamma1", "list must not be empty"));
        }
        if n.g_over_gamma1.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(invalid("nonlinear.g_over_gamma1", "values must be finite and >= 0"));
        }
        if n.g_over_gamma1.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("nonlinear.g_over_gamma1", "values must be strictly ascending"));
        }
        if !(n.tol_abs > 0.0 && n.tol_rel > 0.0) {
            return Err(invalid("nonlinear.tol_abs", "tolerances must be > 0"));
        }

        let rc = &self.rates;
        match &rc.conductivity {
            ConductivityConfig::Constant(s) if s.is_nan() || *s < 0.0 => {
                return Err(invalid("rates.conductivity.constant", "σ must be >= 0"))
            }
            ConductivityConfig::Drude { sigma_dc, tau } if !(*sigma_dc >= 0.0 && *tau >= 0.0) => {
                return Err(invalid("rates.conductivity.drude", "σ_dc and τ must be >= 0"))
            }
            _ => {}
        }
        if !matches!(rc.conductivity, ConductivityConfig::Table(_)) {
            rc.material()?;
        }
        rc.geometry()?;
        rc.mode_indices()?;
        rc.grid.validate("rates.grid")?;

        if self.check.draws == Some(0) {
            return Err(invalid("check.draws", "must be at least 1"));
        }
        Ok(())
    }
}

/// Sets a dotted key in a TOML table. The value is read as TOML and falls
/// back to a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Parse(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Parse(format!("override `{spec}` has an empty key")));
    }
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));

    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Parse(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
