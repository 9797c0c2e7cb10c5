//! Closed-form steady state of non-interacting modes coupled to two baths.
//!
//! Each mode relaxes to a thermal state whose temperature T* is fixed by the
//! summed rates Γ± = γ±_e + γ±_m through detailed balance, Γ⁺/Γ⁻ = e^{−ω/T*}.

use serde::Serialize;

use crate::bath::{bose_einstein, rate_pair, ModeSpec, RateModel};
use crate::error::{Error, Result};

/// Diagnostic classification by ω / max(T_e, T_m). The thresholds are a
/// convenience, not a sharp physical boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Classical,
    Crossover,
    Quantum,
}

impl Regime {
    pub const CLASSICAL_BELOW: f64 = 0.1;
    pub const QUANTUM_ABOVE: f64 = 10.0;

    pub fn classify(omega: f64, t_env: f64, t_mirror: f64) -> Self {
        let x = omega / t_env.max(t_mirror);
        if x < Self::CLASSICAL_BELOW {
            Regime::Classical
        } else if x > Self::QUANTUM_ABOVE {
            Regime::Quantum
        } else {
            Regime::Crossover
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Classical => "classical",
            Regime::Crossover => "crossover",
            Regime::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyModeState {
    pub omega: f64,
    pub t_star: f64,
    pub n_ph: f64,
    /// Share of the total loss rate Γ⁻ carried by the environment.
    pub r_e_minus: f64,
    pub r_m_minus: f64,
    /// Total loss rate Γ⁻ = γ⁻_e + γ⁻_m.
    pub gamma_minus: f64,
    /// Total gain rate Γ⁺ = γ⁺_e + γ⁺_m.
    pub gamma_plus: f64,
    pub relax_rate: f64,
    pub regime: Regime,
}

/// Effective temperature and occupation of one mode.
///
/// `−ln(r⁻_e e^{−ω/T_e} + r⁻_m e^{−ω/T_m})` is evaluated as a log-sum-exp
/// with the dominant term factored out so ω/T up to the Bose cutoff stays
/// finite. The occupation is Γ⁺/(Γ⁻ − Γ⁺), which equals n_B(ω, T*).
pub fn effective_temperature(mode: &ModeSpec, t_env: f64, t_mirror: f64) -> Result<SteadyModeState> {
    check_temperatures(t_env, t_mirror)?;
    let omega = mode.frequency;
    let pe = rate_pair(mode.gamma_e, omega, t_env)?;
    let pm = rate_pair(mode.gamma_m, omega, t_mirror)?;
    let total = pe + pm;
    if total.gamma_minus <= 0.0 {
        return Err(Error::Degenerate("γ_e = γ_m = 0".into()));
    }
    let r_e = pe.gamma_minus / total.gamma_minus;
    let r_m = pm.gamma_minus / total.gamma_minus;

    let t_star = if pm.gamma_minus == 0.0 {
        t_env
    } else if pe.gamma_minus == 0.0 {
        t_mirror
    } else {
        let a = r_e.ln() - omega / t_env;
        let b = r_m.ln() - omega / t_mirror;
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        let log_sum = hi + (lo - hi).exp().ln_1p();
        omega / -log_sum
    };

    let bare = mode.gamma_e + mode.gamma_m;
    let n_ph = total.gamma_plus / bare;
    debug_assert!({
        let nb = bose_einstein(omega, t_star)?;
        nb == n_ph || ((nb - n_ph) / n_ph).abs() < 1e-9
    });

    Ok(SteadyModeState {
        omega,
        t_star,
        n_ph,
        r_e_minus: r_e,
        r_m_minus: r_m,
        gamma_minus: total.gamma_minus,
        gamma_plus: total.gamma_plus,
        relax_rate: relaxation_rate(mode),
        regime: Regime::classify(omega, t_env, t_mirror),
    })
}

/// Rate-weighted temperature average (γ_e T_e + γ_m T_m)/(γ_e + γ_m), the
/// ω ≪ T limit. Uses the bare rates.
pub fn t_star_classical_limit(mode: &ModeSpec, t_env: f64, t_mirror: f64) -> Result<f64> {
    check_temperatures(t_env, t_mirror)?;
    let total = mode.gamma_e + mode.gamma_m;
    if total <= 0.0 {
        return Err(Error::Degenerate("γ_e = γ_m = 0".into()));
    }
    Ok((mode.gamma_e * t_env + mode.gamma_m * t_mirror) / total)
}

/// ω ≫ T limit, T_h − (T_h²/ω) ln((γ_h + γ_c)/γ_h), where h labels the
/// hotter bath.
pub fn t_star_quantum_limit(mode: &ModeSpec, t_env: f64, t_mirror: f64) -> Result<f64> {
    check_temperatures(t_env, t_mirror)?;
    let (t_hot, g_hot) = if t_env >= t_mirror {
        (t_env, mode.gamma_e)
    } else {
        (t_mirror, mode.gamma_m)
    };
    if g_hot <= 0.0 {
        return Err(Error::Degenerate(
            "hotter bath is uncoupled; the quantum-limit expression diverges".into(),
        ));
    }
    let total = mode.gamma_e + mode.gamma_m;
    Ok(t_hot - t_hot * t_hot / mode.frequency * (total / g_hot).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupationLimits {
    /// (T*/T_e) n_B(ω, T_e), with T* from the classical limit.
    pub classical: f64,
    /// γ_e/(γ_e + γ_m) n_B(ω, T_e).
    pub quantum: f64,
}

pub fn occupation_limits(mode: &ModeSpec, t_env: f64, t_mirror: f64) -> Result<OccupationLimits> {
    let nb = bose_einstein(mode.frequency, t_env)?;
    let t_cl = t_star_classical_limit(mode, t_env, t_mirror)?;
    Ok(OccupationLimits {
        classical: t_cl / t_env * nb,
        quantum: mode.gamma_e / (mode.gamma_e + mode.gamma_m) * nb,
    })
}

/// Relaxation rate of the mode, γ_e + γ_m; independent of temperature.
pub fn relaxation_rate(mode: &ModeSpec) -> f64 {
    mode.gamma_e + mode.gamma_m
}

/// Two-bath configuration evaluated on a frequency grid.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub gamma_e: RateModel,
    pub gamma_m: RateModel,
    pub t_env: f64,
    pub t_mirror: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub points: Vec<SteadyModeState>,
    pub t_env: f64,
    pub t_mirror: f64,
}

/// `n` log-spaced points between `lo` and `hi`, inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Points 10^(k/per_decade) inside [lo, hi]; every power of ten in range is
/// hit exactly.
pub fn decade_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(per_decade >= 1 && lo > 0.0 && hi > lo);
    let d = per_decade as f64;
    let k0 = (lo.log10() * d - 1e-9).ceil() as i64;
    let k1 = (hi.log10() * d + 1e-9).floor() as i64;
    (k0..=k1)
        .map(|k| {
            let (q, r) = (k.div_euclid(per_decade as i64), k.rem_euclid(per_decade as i64));
            10f64.powi(q as i32) * 10f64.powf(r as f64 / d)
        })
        .collect()
}

/// Default sweep grid: 100 points per decade over ω/T_e ∈ [1e−2, 20].
pub fn default_grid() -> Vec<f64> {
    decade_grid(1e-2, 20.0, 100)
}

pub fn sweep(spec: &SweepSpec, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Domain("empty frequency grid".into()));
    }
    if grid[0] <= 0.0 {
        return Err(Error::Domain(format!("grid must be positive, got {}", grid[0])));
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!(
            "grid not strictly increasing at index {}",
            i + 1
        )));
    }
    let points = grid
        .iter()
        .map(|&w| {
            let mode = ModeSpec::new(w, spec.gamma_e.rate(w), spec.gamma_m.rate(w))?;
            effective_temperature(&mode, spec.t_env, spec.t_mirror)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        grid: grid.to_vec(),
        points,
        t_env: spec.t_env,
        t_mirror: spec.t_mirror,
    })
}

impl SweepResult {
    /// Grid index of the lowest effective temperature.
    pub fn argmin_t_star(&self) -> usize {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.t_star.total_cmp(&b.1.t_star))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Maximal grid intervals [ω_i, ω_j] over which the occupation grows with
    /// frequency (local population inversion).
    pub fn inversion_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..self.points.len().saturating_sub(1) {
            let rising = self.points[i + 1].n_ph > self.points[i].n_ph;
            match (rising, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push((self.grid[s], self.grid[i]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((self.grid[s], self.grid[self.grid.len() - 1]));
        }
        out
    }
}

fn check_temperatures(t_env: f64, t_mirror: f64) -> Result<()> {
    for (name, t) in [("T_e", t_env), ("T_m", t_mirror)] {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("{name} must be > 0, got {t}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::ResonanceSpec;
    use proptest::prelude::*;

    fn mode(w: f64, ge: f64, gm: f64) -> ModeSpec {
        ModeSpec::new(w, ge, gm).unwrap()
    }

    #[test]
    fn decade_grid_hits_powers_of_ten() {
        let g = default_grid();
        assert_eq!(g.len(), 331);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[100], 0.1);
        assert_eq!(g[200], 1.0);
        assert_eq!(g[300], 10.0);
        assert!(*g.last().unwrap() <= 20.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn three_mode_reference_temperatures() {
        // Independent evaluation of −ω/ln(Σ r_j e^{−ω/T_j}) in high precision
        // gives 0.76304, 0.79393, 0.85722.
        for (w, expect) in [(1.0, 0.763), (2.0, 0.794), (4.0, 0.857)] {
            let s = effective_temperature(&mode(w, 1.0, 1.0), 1.0, 0.5).unwrap();
            assert!((s.t_star - expect).abs() < 1e-3, "{w}: {}", s.t_star);
            assert!((s.r_e_minus + s.r_m_minus - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bath_is_exact() {
        for w in [1e-3, 0.5, 3.0, 300.0] {
            let s = effective_temperature(&mode(w, 2.0, 0.0), 1.0, 0.5).unwrap();
            assert_eq!(s.t_star, 1.0);
            let s = effective_temperature(&mode(w, 0.0, 2.0), 1.0, 0.5).unwrap();
            assert_eq!(s.t_star, 0.5);
        }
    }

    #[test]
    fn deep_quantum_stays_finite() {
        let s = effective_temperature(&mode(650.0, 1.0, 1.0), 1.0, 0.5).unwrap();
        assert!(s.t_star.is_finite() && s.t_star > 0.99 && s.t_star <= 1.0);
    }

    #[test]
    fn classical_limit_values() {
        assert_eq!(t_star_classical_limit(&mode(1.0, 1.0, 1.0), 1.0, 0.5).unwrap(), 0.75);
        assert_eq!(t_star_classical_limit(&mode(1.0, 1.0, 0.0), 1.0, 0.5).unwrap(), 1.0);
        let m = mode(0.005, 1.0, 1.0);
        let exact = effective_temperature(&m, 1.0, 0.5).unwrap().t_star;
        assert!((exact / 0.75 - 1.0).abs() < 5e-3);
    }

    #[test]
    fn quantum_limit_values() {
        let q = t_star_quantum_limit(&mode(20.0, 1.0, 1.0), 1.0, 0.5).unwrap();
        assert!((q - (1.0 - 2f64.ln() / 20.0)).abs() < 1e-15);
        assert!((q - 0.965).abs() < 1e-3);
        let exact = effective_temperature(&mode(20.0, 1.0, 1.0), 1.0, 0.5).unwrap().t_star;
        assert!((exact - q).abs() / q < 0.01);
        assert_eq!(t_star_quantum_limit(&mode(5.0, 1.0, 0.0), 1.0, 0.5).unwrap(), 1.0);
        let far = t_star_quantum_limit(&mode(1e12, 1.0, 1.0), 1.0, 0.5).unwrap();
        assert!((far - 1.0).abs() < 1e-11);
        // swapped temperatures use the hotter mirror
        let sw = t_star_quantum_limit(&mode(20.0, 1.0, 1.0), 0.5, 1.0).unwrap();
        assert_eq!(sw, q);
        assert!(matches!(
            t_star_quantum_limit(&mode(20.0, 0.0, 1.0), 1.0, 0.5),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn occupation_limit_values() {
        let m = mode(3.0, 1.0, 1.0);
        let nb = bose_einstein(3.0, 1.0).unwrap();
        assert!((occupation_limits(&m, 1.0, 0.5).unwrap().quantum - 0.5 * nb).abs() < 1e-15);
        let m = mode(1e-4, 1.0, 0.0);
        let cl = occupation_limits(&m, 1.0, 0.5).unwrap().classical;
        assert!((cl * 1e-4 - 1.0).abs() < 1e-4);
        let m = mode(20.0, 1.0, 1.0);
        let exact = effective_temperature(&m, 1.0, 0.5).unwrap().n_ph / bose_einstein(20.0, 1.0).unwrap();
        assert!((exact - 0.5).abs() / 0.5 < 0.1, "{exact}");
    }

    #[test]
    fn relaxation_rate_sums_bare_rates() {
        assert_eq!(relaxation_rate(&mode(1.0, 1.0, 2.0)), 3.0);
        assert_eq!(relaxation_rate(&mode(1.0, 1.5, 0.0)), 1.5);
        let a = effective_temperature(&mode(1.0, 1.0, 2.0), 1.0, 0.2).unwrap().relax_rate;
        let b = effective_temperature(&mode(1.0, 1.0, 2.0), 1.0, 0.9).unwrap().relax_rate;
        assert_eq!(a, b);
    }

    #[test]
    fn flat_sweep_low_frequency_intercept() {
        let spec = SweepSpec {
            gamma_e: RateModel::Constant(10.0),
            gamma_m: RateModel::Constant(1.0),
            t_env: 1.0,
            t_mirror: 0.5,
        };
        let res = sweep(&spec, &default_grid()).unwrap();
        assert_eq!(res.grid.len(), 331);
        assert!((res.points[0].t_star - 10.5 / 11.0).abs() < 2e-3);
    }

    #[test]
    fn resonance_sweep_dip_and_inversion() {
        let grid = default_grid();
        let run = |ratio: f64| {
            let spec = SweepSpec {
                gamma_e: RateModel::Constant(ratio * 1e-3),
                gamma_m: RateModel::Resonant(ResonanceSpec::new(1e-3, 1.0, 0.1, 10.0).unwrap()),
                t_env: 1.0,
                t_mirror: 0.5,
            };
            sweep(&spec, &grid).unwrap()
        };
        let strong = run(10.0);
        let i = strong.argmin_t_star();
        let step = grid[i + 1] - grid[i];
        assert!((grid[i] - 1.0).abs() <= step);
        let inv = strong.inversion_intervals();
        assert!(inv.iter().any(|&(a, b)| a <= 1.0 && b >= 1.0));
        assert!(run(0.1).inversion_intervals().is_empty());
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let spec = SweepSpec {
            gamma_e: RateModel::Constant(1.0),
            gamma_m: RateModel::Constant(1.0),
            t_env: 1.0,
            t_mirror: 0.5,
        };
        assert!(sweep(&spec, &[]).is_err());
        assert!(sweep(&spec, &[1.0, 1.0]).is_err());
        assert!(sweep(&spec, &[0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn bounded_by_bath_temperatures(
            w in 1e-4f64..100.0, ge in 1e-3f64..1e3, gm in 1e-3f64..1e3,
            te in 0.05f64..5.0, tm in 0.05f64..5.0,
        ) {
            let s = effective_temperature(&mode(w, ge, gm), te, tm).unwrap();
            let (lo, hi) = (te.min(tm), te.max(tm));
            prop_assert!(s.t_star >= lo * (1.0 - 1e-12) && s.t_star <= hi * (1.0 + 1e-12));
            prop_assert!((s.r_e_minus + s.r_m_minus - 1.0).abs() < 1e-12);
            let nb = bose_einstein(w, s.t_star).unwrap();
            prop_assert!((nb / s.n_ph - 1.0).abs() < 1e-10);
        }

        #[test]
        fn monotone_in_rate_ratio(w in 1e-2f64..20.0, k in 0.01f64..100.0, f in 1.01f64..3.0) {
            let a = effective_temperature(&mode(w, k, 1.0), 1.0, 0.5).unwrap().t_star;
            let b = effective_temperature(&mode(w, k * f, 1.0), 1.0, 0.5).unwrap().t_star;
            prop_assert!(b >= a * (1.0 - 1e-13));
        }
    }
}
