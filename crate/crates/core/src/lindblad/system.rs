use serde::Serialize;

use super::fock::{FockTruncation, SparseOp, MODES};
use crate::bath::{rate_pair, ModeSpec, RatePair};
use crate::error::{Error, Result};

/// Frequency multiples of the cascade ν, 2ν, 4ν.
pub const FREQUENCY_RATIOS: [f64; MODES] = [1.0, 2.0, 4.0];

/// Three resonant modes at ω, 2ω, 4ω mixed by the cubic interaction
///
/// ```text
/// H = Σ ω_i a_i†a_i + g (a₂†a₁² + a₃†a₂² + h.c.)
/// ```
///
/// each damped by an environment and a mirror bath.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeModeSystem {
    omega1: f64,
    g: f64,
    /// Per mode: [environment, mirror].
    baths: [[RatePair; 2]; MODES],
    trunc: FockTruncation,
}

impl ThreeModeSystem {
    /// Build from bare rates and bath temperatures.
    pub fn new(
        omega1: f64,
        t_env: f64,
        t_mirror: f64,
        gamma_e: [f64; MODES],
        gamma_m: [f64; MODES],
        g: f64,
        trunc: FockTruncation,
    ) -> Result<Self> {
        if !(omega1 > 0.0) || !omega1.is_finite() {
            return Err(Error::Domain(format!("ω₁ must be > 0, got {omega1}")));
        }
        let mut baths = [[RatePair::zero(); 2]; MODES];
        for i in 0..MODES {
            let w = omega1 * FREQUENCY_RATIOS[i];
            baths[i] = [rate_pair(gamma_e[i], w, t_env)?, rate_pair(gamma_m[i], w, t_mirror)?];
        }
        Self::from_rate_pairs(omega1, g, baths, trunc)
    }

    /// Same flat bare rates γ_e, γ_m for all three modes.
    pub fn flat(omega1: f64, t_env: f64, t_mirror: f64, gamma_e: f64, gamma_m: f64, g: f64, trunc: FockTruncation) -> Result<Self> {
        Self::new(omega1, t_env, t_mirror, [gamma_e; MODES], [gamma_m; MODES], g, trunc)
    }

    /// Build from explicit loss/gain rates; these need not obey detailed
    /// balance at any temperature.
    pub fn from_rate_pairs(omega1: f64, g: f64, baths: [[RatePair; 2]; MODES], trunc: FockTruncation) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::Domain(format!("coupling g must be finite, got {g}")));
        }
        for (i, pair) in baths.iter().enumerate() {
            for p in pair {
                if !(p.gamma_minus >= 0.0) || !(p.gamma_plus >= 0.0) {
                    return Err(Error::Domain(format!(
                        "mode {} has a negative rate: {p:?}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { omega1, g, baths, trunc })
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..self.clone() }
    }

    pub fn with_truncation(&self, trunc: FockTruncation) -> Self {
        Self { trunc, ..self.clone() }
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn frequencies(&self) -> [f64; MODES] {
        FREQUENCY_RATIOS.map(|r| r * self.omega1)
    }

    pub fn bath_pairs(&self, mode: usize) -> [RatePair; 2] {
        self.baths[mode]
    }

    /// Summed loss and gain rates Γ∓ of each mode.
    pub fn total_pairs(&self) -> [RatePair; MODES] {
        self.baths.map(|[e, m]| e + m)
    }

    /// Bare rate γ_e + γ_m of a mode, which equals Γ⁻ − Γ⁺.
    pub fn total_rate(&self, mode: usize) -> f64 {
        let [e, m] = self.baths[mode];
        e.bare() + m.bare()
    }

    /// Each mode as an independent [`ModeSpec`] (γ_e, γ_m bare).
    pub fn mode_spec(&self, mode: usize) -> Result<ModeSpec> {
        let [e, m] = self.baths[mode];
        ModeSpec::new(self.frequencies()[mode], e.bare(), m.bare())
    }

    pub(crate) fn check_ergodic(&self) -> Result<()> {
        for (i, p) in self.total_pairs().iter().enumerate() {
            if p.gamma_minus <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "mode {} has no loss channel (Γ⁻ = 0)",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Diagonal energies Σ ω_i n_i of every basis state.
    pub fn energies(&self) -> Vec<f64> {
        let w = self.frequencies();
        (0..self.trunc.dim())
            .map(|r| {
                let occ = self.trunc.occupations(r);
                (0..MODES).map(|i| w[i] * occ[i] as f64).sum()
            })
            .collect()
    }

    /// Interaction g(a₂†a₁² + a₃†a₂² + h.c.) as a real symmetric matrix.
    pub fn interaction(&self) -> SparseOp {
        let t = &self.trunc;
        let caps = t.caps();
        let mut entries = Vec::new();
        if self.g != 0.0 {
            for r in 0..t.dim() {
                let occ = t.occupations(r);
                // two photons of mode `lo` merge into one of mode `lo + 1`
                for lo in 0..MODES - 1 {
                    let (n_lo, n_hi) = (occ[lo], occ[lo + 1]);
                    if n_lo >= 2 && n_hi < caps[lo + 1] {
                        let mut to = occ;
                        to[lo] -= 2;
                        to[lo + 1] += 1;
                        let amp = self.g * ((n_lo * (n_lo - 1) * (n_hi + 1)) as f64).sqrt();
                        let k = t.index(to);
                        entries.push((k, r, amp));
                        entries.push((r, k, amp));
                    }
                }
            }
        }
        SparseOp { dim: t.dim(), entries }
    }

    /// Full Hamiltonian including the diagonal free part.
    pub fn hamiltonian(&self) -> SparseOp {
        let mut h = self.interaction();
        for (r, e) in self.energies().into_iter().enumerate() {
            if e != 0.0 {
                h.entries.push((r, r, e));
            }
        }
        h
    }

    /// Excitation weight n₁ + 2n₂ + 4n₃ of each basis state; conserved by H.
    pub fn weights(&self) -> Vec<usize> {
        (0..self.trunc.dim())
            .map(|r| {
                let o = self.trunc.occupations(r);
                o[0] + 2 * o[1] + 4 * o[2]
            })
            .collect()
    }
}
