//! Experiment drivers. Each returns the dataset that `main` writes out.

use cavitherm::bath::bose_einstein;
use cavitherm::lindblad::{g_scan_with, FockTruncation, InitialState, ScanOptions, SolverOptions, ThreeModeSystem, MODES};
use cavitherm::rates::{
    fp_rate_env_estimate, fp_rate_env_exact, fp_rate_mirror_estimate, fp_rate_mirror_exact, plasmonic_rate_env,
    plasmonic_rate_mirror, Polarization,
};
use cavitherm::steady::{sweep, SweepResult};
use cavitherm::units::{Quantity, EPSILON_0};
use cavitherm::{EnergyScale, Error, RateModel, SweepSpec, Unit, UnitSystem};
use serde_json::json;

use crate::config::{Command, RateModelKind, RunConfig};
use crate::dataset::{Dataset, Value};
use crate::CliError;

/// A dataset plus the error that cut it short, if any.
#[derive(Debug)]
pub struct Output {
    pub dataset: Dataset,
    pub failure: Option<String>,
}

impl Output {
    fn complete(dataset: Dataset) -> Self {
        Self { dataset, failure: None }
    }
}

fn meta(cfg: &RunConfig, command: Command) -> serde_json::Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.as_str(),
        "units": cfg.units_for(command),
        "config": cfg,
    })
}

fn si_system(cfg: &RunConfig) -> Result<UnitSystem, CliError> {
    Ok(UnitSystem::new(cfg.reference_kelvin)?)
}

fn to_si(us: &UnitSystem, v: f64, q: Quantity) -> f64 {
    us.to_si(EnergyScale::natural(v).expect("natural-unit values are validated upstream"), q).value()
}

/// Sweeps run one per ratio; with more than one worker they are spread over
/// threads and reassembled in input order.
fn sweeps(specs: Vec<SweepSpec>, grid: &[f64], workers: usize) -> Result<Vec<SweepResult>, CliError> {
    if workers <= 1 || specs.len() <= 1 {
        return specs.iter().map(|s| sweep(s, grid).map_err(CliError::from)).collect();
    }
    let chunk = specs.len().div_ceil(workers);
    std::thread::scope(|sc| {
        let handles: Vec<_> = specs
            .chunks(chunk)
            .map(|c| sc.spawn(move || c.iter().map(|s| sweep(s, grid)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .map(|r| r.map_err(CliError::from))
            .collect()
    })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = &cfg.spectrum;
    let si = cfg.units_for(Command::Spectrum) == Unit::Si;
    let grid = c.grid.points();
    let specs = c
        .gamma_ratios
        .iter()
        .map(|&r| SweepSpec { gamma_e: RateModel::Constant(r), gamma_m: RateModel::Constant(1.0), t_env: 1.0, t_mirror: c.t_mirror })
        .collect();
    let results = sweeps(specs, &grid, cfg.workers)?;

    let mut cols = vec!["omega_over_Te", "gamma_ratio", "T_star_over_Te", "n_over_nB_Te", "regime"];
    if si {
        cols.extend(["omega_rad_s", "T_star_K"]);
    }
    let mut ds = Dataset::new(&cols);
    let us = si_system(cfg)?;
    for (ratio, res) in c.gamma_ratios.iter().zip(&results) {
        for (w, p) in grid.iter().zip(&res.points) {
            let nb = bose_einstein(*w, 1.0)?;
            let mut row: Vec<Value> =
                vec![(*w).into(), (*ratio).into(), p.t_star.into(), (p.n_ph / nb).into(), p.regime.as_str().into()];
            if si {
                row.push(to_si(&us, *w, Quantity::Frequency).into());
                row.push(to_si(&us, p.t_star, Quantity::Temperature).into());
            }
            ds.push(row);
        }
    }
    ds.meta = meta(cfg, Command::Spectrum);
    Ok(Output::complete(ds))
}

pub fn cmd_resonance(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = &cfg.resonance;
    let si = cfg.units_for(Command::Resonance) == Unit::Si;
    let spec = c.spec()?;
    let grid = c.grid.points();
    let specs = c
        .gamma_ratios
        .iter()
        .map(|&r| SweepSpec {
            gamma_e: RateModel::Constant(r * c.gamma_m),
            gamma_m: RateModel::Resonant(spec),
            t_env: 1.0,
            t_mirror: c.t_mirror,
        })
        .collect();
    let results = sweeps(specs, &grid, cfg.workers)?;

    let mut cols = vec![
        "omega_over_Te",
        "gamma_e_over_gamma_m_eff",
        "T_star_over_Te",
        "n_ph",
        "gamma_ratio",
        "in_inversion",
    ];
    if si {
        cols.extend(["omega_rad_s", "T_star_K"]);
    }
    let mut ds = Dataset::new(&cols);
    let us = si_system(cfg)?;
    let mut notes = Vec::new();
    for (ratio, res) in c.gamma_ratios.iter().zip(&results) {
        let intervals = res.inversion_intervals();
        let argmin = res.argmin_t_star();
        notes.push(json!({
            "gamma_ratio": ratio,
            "inversion": !intervals.is_empty(),
            "inversion_intervals": intervals,
            "t_star_min_at": grid[argmin],
        }));
        for (w, p) in grid.iter().zip(&res.points) {
            let gm = spec.rate(*w);
            let inside = intervals.iter().any(|&(a, b)| *w >= a && *w <= b);
            let mut row: Vec<Value> = vec![
                (*w).into(),
                (ratio * c.gamma_m / gm).into(),
                p.t_star.into(),
                p.n_ph.into(),
                (*ratio).into(),
                inside.into(),
            ];
            if si {
                row.push(to_si(&us, *w, Quantity::Frequency).into());
                row.push(to_si(&us, p.t_star, Quantity::Temperature).into());
            }
            ds.push(row);
        }
    }
    let mut m = meta(cfg, Command::Resonance);
    m["sweeps"] = json!(notes);
    ds.meta = m;
    Ok(Output::complete(ds))
}

pub const NONLINEAR_COLUMNS: [&str; 11] = [
    "g",
    "mode",
    "mean_n",
    "T_fit_over_Te",
    "T_min_over_Te",
    "T_max_over_Te",
    "residual",
    "leakage",
    "g_over_omega1",
    "inverted_gaps",
    "status",
];

pub fn cmd_nonlinear(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = &cfg.nonlinear;
    let trunc = FockTruncation::new(c.caps)?;
    let template = ThreeModeSystem::flat(c.omega1, 1.0, c.t_mirror, c.gamma_e, c.gamma_m, 0.0, trunc)?;
    let gamma1 = c.gamma_e + c.gamma_m;
    let gs: Vec<f64> = c.g_over_gamma1.iter().map(|x| x * gamma1).collect();
    let opts = ScanOptions {
        solver: SolverOptions { tol_abs: c.tol_abs, tol_rel: c.tol_rel, initial: InitialState::AnalyticProduct, ..Default::default() },
        warm_start: c.warm_start,
        workers: cfg.workers,
    };
    let outcome = g_scan_with(&template, &gs, &opts)?;

    let mut ds = Dataset::new(&NONLINEAR_COLUMNS);
    for (x, row) in c.g_over_gamma1.iter().zip(&outcome.rows) {
        for (i, s) in row.modes.iter().enumerate() {
            ds.push(vec![
                (*x).into(),
                (i + 1).into(),
                s.mean_n.into(),
                s.t_fit.into(),
                s.t_min.into(),
                s.t_max.into(),
                row.residual.into(),
                row.leakage[i].into(),
                (row.g / c.omega1).into(),
                s.inverted_gaps.into(),
                "ok".into(),
            ]);
        }
    }
    let failure = outcome.failure.map(|(g, e)| {
        let residual = match &e {
            Error::NotConverged { residual, .. } => *residual,
            _ => f64::NAN,
        };
        for i in 0..MODES {
            ds.push(vec![
                (g / gamma1).into(),
                (i + 1).into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                residual.into(),
                f64::NAN.into(),
                (g / c.omega1).into(),
                Value::Null,
                "failed".into(),
            ]);
        }
        format!("g/Γ₁ = {}: {e}", g / gamma1)
    });
    let mut m = meta(cfg, Command::Nonlinear);
    m["gamma1"] = json!(gamma1);
    if let Some(f) = &failure {
        m["failure"] = json!(f);
    }
    ds.meta = m;
    Ok(Output { dataset: ds, failure })
}

pub fn cmd_rates(cfg: &RunConfig) -> Result<Output, CliError> {
    if cfg.units_for(Command::Rates) != Unit::Si {
        return Err(CliError::Config { key: "units".into(), message: "the rates command works in SI units only".into() });
    }
    let c = &cfg.rates;
    let mat = c.material()?;
    let grid = c.grid.points();
    let q = |w: f64, gm: f64, ge: f64| w / (gm + ge);
    let ds = match c.model {
        RateModelKind::FabryPerot => {
            let geo = c.geometry()?;
            let mut ds = Dataset::new(&[
                "omega",
                "gamma_m",
                "gamma_e",
                "ratio",
                "Q_total",
                "thin_mirrors",
                "high_finesse",
                "below_plasma",
                "kind",
                "m",
                "q_x",
                "polarization",
            ]);
            for &w in &grid {
                let gm = fp_rate_mirror_estimate(&mat, &geo, w)?;
                let ge = fp_rate_env_estimate(&mat, &geo, w)?;
                let f = geo.validity(&mat, w);
                ds.push(vec![
                    w.into(),
                    gm.into(),
                    ge.into(),
                    (gm / ge).into(),
                    q(w, gm, ge).into(),
                    f.thin_mirrors.into(),
                    f.high_finesse.into(),
                    f.below_plasma.into(),
                    "estimate".into(),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                ]);
            }
            for idx in c.mode_indices()? {
                let w = idx.frequency(&geo);
                let gm = fp_rate_mirror_exact(&mat, &geo, &idx)?;
                let ge = fp_rate_env_exact(&mat, &geo, &idx)?;
                let f = geo.validity(&mat, w);
                let pol = match idx.polarization {
                    Polarization::S => "s",
                    Polarization::P => "p",
                };
                ds.push(vec![
                    w.into(),
                    gm.into(),
                    ge.into(),
                    (gm / ge).into(),
                    q(w, gm, ge).into(),
                    f.thin_mirrors.into(),
                    f.high_finesse.into(),
                    f.below_plasma.into(),
                    "exact".into(),
                    idx.longitudinal.into(),
                    idx.q_x.into(),
                    pol.into(),
                ]);
            }
            ds
        }
        RateModelKind::Plasmonic => {
            let mut ds =
                Dataset::new(&["omega", "gamma_m", "gamma_e", "ratio", "Q_total", "below_plasma", "small_loss_tangent"]);
            for &w in &grid {
                let gm = plasmonic_rate_mirror(&mat, w)?;
                let ge = plasmonic_rate_env(&mat, w)?;
                ds.push(vec![
                    w.into(),
                    gm.into(),
                    ge.into(),
                    (gm / ge).into(),
                    q(w, gm, ge).into(),
                    (w < mat.plasma_frequency / 3.0).into(),
                    (mat.sigma(w) / (EPSILON_0 * w) < 1.0).into(),
                ]);
            }
            ds
        }
    };
    let mut ds = ds;
    ds.meta = meta(cfg, Command::Rates);
    Ok(Output::complete(ds))
}
