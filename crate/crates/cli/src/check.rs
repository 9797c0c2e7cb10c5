//! Self-check suite behind `cavitherm check`. Every randomized check draws
//! from its own stream derived from the run seed, so the report is a pure
//! function of the configuration.

use std::fmt::Write as _;

use cavitherm::bath::{bose_einstein, rate_pair, RatePair};
use cavitherm::lindblad::reference::dense_steady_state;
use cavitherm::lindblad::{
    apply_liouvillian, measure_coherence_decay, steady_state_with, DensityOperator, FockTruncation, InitialState,
    SolverOptions, ThreeModeSystem,
};
use cavitherm::steady::{t_star_classical_limit, t_star_quantum_limit};
use cavitherm::wigner::steady_variance;
use cavitherm::{effective_temperature, ModeSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Fault, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured deviation.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub seed: u64,
    pub draws: usize,
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = format!("cavitherm check: seed {}, {} draws\n", self.seed, self.draws);
        for r in &self.results {
            let _ = writeln!(
                s,
                "{} {:<40} measured {:.3e}  tol {:.1e}  {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.measured,
                r.tolerance,
                r.detail
            );
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        let _ = writeln!(s, "{} passed, {} failed", self.results.len() - failed, failed);
        s
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn result(name: &'static str, measured: f64, tolerance: f64, detail: impl Into<String>) -> CheckResult {
    // NaN fails
    CheckResult { name, passed: measured <= tolerance, measured, tolerance, detail: detail.into() }
}

/// Stationary distribution of a birth-death chain with rates n·loss (down)
/// and n·gain (up), by Grassmann-Taksar-Heyman elimination on the generator.
/// Subtraction-free, so tiny populations keep full relative accuracy.
pub fn birth_death_stationary(loss: f64, gain: f64, levels: usize) -> Vec<f64> {
    let mut q = DMatrix::<f64>::zeros(levels, levels);
    for n in 0..levels - 1 {
        q[(n, n + 1)] = gain * (n + 1) as f64;
        q[(n + 1, n)] = loss * (n + 1) as f64;
    }
    for k in (1..levels).rev() {
        let s: f64 = (0..k).map(|j| q[(k, j)]).sum();
        for i in 0..k {
            q[(i, k)] /= s;
        }
        for i in 0..k {
            let qik = q[(i, k)];
            for j in 0..k {
                if i != j {
                    q[(i, j)] += qik * q[(k, j)];
                }
            }
        }
    }
    let mut p = vec![0.0; levels];
    p[0] = 1.0;
    for k in 1..levels {
        p[k] = (0..k).map(|i| p[i] * q[(i, k)]).sum();
    }
    let z: f64 = p.iter().sum();
    p.iter().map(|x| x / z).collect()
}

fn detailed_balance(seed: u64, draws: usize, fault: Option<Fault>) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let omega = rng.gen_range(0.01..10.0);
        let t = rng.gen_range(0.05..5.0);
        let g = rng.gen_range(1e-3..1.0);
        let mut p: RatePair = rate_pair(g, omega, t)?;
        if fault == Some(Fault::RateSign) {
            p.gamma_plus = -p.gamma_plus;
        }
        let want = (-omega / t).exp();
        worst = worst.max(((p.gamma_plus / p.gamma_minus - want) / want).abs());
        worst = worst.max(((p.gamma_minus - p.gamma_plus - g) / g).abs());
    }
    Ok(result("bath.detailed_balance", worst, 1e-12, "γ⁺/γ⁻ = e^{−ω/T}, γ⁻ − γ⁺ = γ"))
}

fn bose_monotone(seed: u64, draws: usize) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 2);
    let mut violations = 0usize;
    for _ in 0..draws {
        let (w, t) = (rng.gen_range(0.01..10.0), rng.gen_range(0.1..5.0));
        let f = rng.gen_range(1.001..2.0);
        let n = bose_einstein(w, t)?;
        if !(bose_einstein(w * f, t)? < n && bose_einstein(w, t * f)? > n) {
            violations += 1;
        }
    }
    Ok(result("bath.bose_monotone", violations as f64, 0.0, "n_B falls with ω, rises with T"))
}

fn three_mode_temperatures() -> Result<CheckResult, CliError> {
    let want = [0.763, 0.794, 0.857];
    let mut worst: f64 = 0.0;
    for (i, w) in [1.0, 2.0, 4.0].iter().enumerate() {
        let t = effective_temperature(&ModeSpec::new(*w, 1.0, 1.0)?, 1.0, 0.5)?.t_star;
        worst = worst.max((t - want[i]).abs());
    }
    Ok(result("analytic.three_mode_temperatures", worst, 1e-3, "T*/T_e at ω = 1, 2, 4"))
}

fn limits(seed: u64, draws: usize) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 3);
    let (mut cl, mut qu): (f64, f64) = (0.0, 0.0);
    for _ in 0..draws {
        let ge = rng.gen_range(0.1..1.0);
        let gm = ge * 10f64.powf(rng.gen_range(-1.0..1.0));
        let low = ModeSpec::new(1e-3 * 0.5, ge, gm)?;
        cl = cl.max((effective_temperature(&low, 1.0, 0.5)?.t_star - t_star_classical_limit(&low, 1.0, 0.5)?).abs());
        let high = ModeSpec::new(30.0, ge, gm)?;
        qu = qu.max((effective_temperature(&high, 1.0, 0.5)?.t_star - t_star_quantum_limit(&high, 1.0, 0.5)?).abs());
    }
    // report the worse of the two relative to its own tolerance
    let measured = (cl / 1e-3).max(qu / 1e-2);
    Ok(result(
        "analytic.limits",
        measured,
        1.0,
        format!("classical {cl:.2e} (tol 1e-3), quantum {qu:.2e} (tol 1e-2), as fraction of tol"),
    ))
}

fn birth_death(seed: u64, draws: usize) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 4);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let omega = rng.gen_range(0.05..4.0);
        let (te, tm) = (rng.gen_range(0.5..2.0), rng.gen_range(0.1..2.0));
        let (ge, gm) = (rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0));
        let mode = ModeSpec::new(omega, ge, gm)?;
        let (pe, pm) = mode.pairs(te, tm)?;
        let p = birth_death_stationary(pe.gamma_minus + pm.gamma_minus, pe.gamma_plus + pm.gamma_plus, 200);
        let want = (-omega / effective_temperature(&mode, te, tm)?.t_star).exp();
        for n in 0..199 {
            if p[n + 1] < 1e-290 {
                break;
            }
            worst = worst.max((p[n + 1] / p[n] - want).abs() / want);
        }
    }
    Ok(result("analytic.birth_death_oracle", worst, 1e-8, "level ratios vs e^{−ω/T*}, N = 200"))
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let mut rho = DensityOperator::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            rho.set(r, c, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    rho.hermitize();
    rho.normalize_trace();
    rho
}

fn liouvillian_structure(seed: u64, draws: usize) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let g = rng.gen_range(0.0..0.5);
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, rng.gen_range(0.0..0.2), rng.gen_range(0.01..0.2), g, FockTruncation::new([3, 2, 1])?)?;
        let rho = random_state(&mut rng, sys.truncation().dim());
        let out = apply_liouvillian(&sys, &rho)?;
        worst = worst.max(out.trace().norm()).max(out.hermiticity_error());
    }
    Ok(result("lindblad.trace_and_hermiticity", worst, 1e-12, "Tr L(ρ) and L(ρ) − L(ρ)† on random ρ"))
}

fn weight_conservation() -> Result<CheckResult, CliError> {
    let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.02, 0.02, 1.0, FockTruncation::default())?;
    let w = sys.weights();
    let worst = sys
        .hamiltonian()
        .entries
        .iter()
        .map(|&(i, j, v)| ((w[i] as f64 - w[j] as f64) * v).abs())
        .fold(0.0, f64::max);
    Ok(result("lindblad.weight_conservation", worst, 1e-12, "‖[H, n₁ + 2n₂ + 4n₃]‖ at caps (14, 6, 3)"))
}

fn null_space_equivalence() -> Result<CheckResult, CliError> {
    let mut worst: f64 = 0.0;
    for g in [0.0, 0.05] {
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.05, 0.05, g, FockTruncation::new([3, 2, 1])?)?;
        let dense = dense_steady_state(&sys)?;
        for initial in [InitialState::AnalyticProduct, InitialState::MaximallyMixed] {
            let ss = steady_state_with(&sys, &SolverOptions { initial, ..Default::default() })?;
            worst = worst.max(ss.rho.trace_distance(&dense)?);
        }
    }
    Ok(result("lindblad.null_space_equivalence", worst, 1e-9, "trace distance to dense null space, caps (3, 2, 1)"))
}

fn wigner_occupation(seed: u64, draws: usize) -> Result<CheckResult, CliError> {
    let mut rng = rng_for(seed, 6);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let mode = ModeSpec::new(rng.gen_range(0.05..10.0), rng.gen_range(0.0..1.0), rng.gen_range(1e-3..1.0))?;
        let (te, tm) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let var = steady_variance(&mode, te, tm)?;
        let t = effective_temperature(&mode, te, tm)?.t_star;
        let n = 1.0 / (mode.frequency / t).exp_m1();
        worst = worst.max((var.occupation() - n).abs());
    }
    Ok(result("wigner.variance_occupation", worst, 1e-10, "|σ² − 1/2 − n_B(ω, T*)|"))
}

fn coherence_decay() -> Result<CheckResult, CliError> {
    let mode = ModeSpec::new(1.0, 0.02, 0.02)?;
    let fit = measure_coherence_decay(&mode, 1.0, 0.5, Complex64::new(1.2, 0.5), 18, 3.0)?;
    Ok(result(
        "wigner.coherence_decay",
        fit.relative_error(),
        0.05,
        format!("|⟨a⟩| rate {:.5} vs (γ_e + γ_m)/2 = {:.5}", fit.measured_rate, fit.amplitude_rate),
    ))
}

pub fn cmd_check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let seed = cfg.seed;
    let draws = cfg.check.draws.unwrap_or(100);
    let fault = cfg.check.inject_fault;
    let results = vec![
        detailed_balance(seed, draws, fault)?,
        bose_monotone(seed, draws)?,
        three_mode_temperatures()?,
        limits(seed, draws)?,
        birth_death(seed, (draws / 5).max(1))?,
        liouvillian_structure(seed, draws)?,
        weight_conservation()?,
        null_space_equivalence()?,
        wigner_occupation(seed, draws)?,
        coherence_decay()?,
    ];
    Ok(CheckReport { seed, draws, results })
}
