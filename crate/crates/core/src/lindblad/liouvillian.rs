//! Matrix-free action of the Lindblad generator
//!
//! ```text
//! L(ρ) = −i[H, ρ] + Σ_i Γ⁻_i D[a_i](ρ) + Γ⁺_i D[a_i†](ρ),
//! D[A](ρ) = AρA† − ½{A†A, ρ}
//! ```
//!
//! Every output element is gathered from at most a handful of input
//! elements, so the D²×D² superoperator is never formed. Elements are
//! addressed through a [`PairLayout`]: either all D² pairs (r, c), or only
//! pairs with equal excitation weight n₁ + 2n₂ + 4n₃. The weight-diagonal
//! subspace is invariant under L because H conserves the weight and each
//! jump shifts row and column weight by the same amount, and it contains
//! the steady state.

use num_complex::Complex64;

use super::density::DensityOperator;
use super::fock::MODES;
use super::system::ThreeModeSystem;
use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Addressing of the stored matrix elements of ρ.
#[derive(Debug, Clone)]
pub struct PairLayout {
    dim: usize,
    pairs: Vec<(u32, u32)>,
    /// (r, c) → position in `pairs`, or ABSENT.
    lookup: Vec<u32>,
}

impl PairLayout {
    pub fn full(dim: usize) -> Self {
        let pairs = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r as u32, c as u32)))
            .collect();
        let lookup = (0..(dim * dim) as u32).collect();
        Self { dim, pairs, lookup }
    }

    /// Pairs whose row and column share the same weight.
    pub fn weight_diagonal(weights: &[usize]) -> Self {
        let dim = weights.len();
        let mut pairs = Vec::new();
        let mut lookup = vec![ABSENT; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                if weights[r] == weights[c] {
                    lookup[r * dim + c] = pairs.len() as u32;
                    pairs.push((r as u32, c as u32));
                }
            }
        }
        Self { dim, pairs, lookup }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> u32 {
        self.lookup[r * self.dim + c]
    }

    /// Gather the stored elements of a full density matrix. Fails if ρ has
    /// weight off the layout.
    pub fn pack(&self, rho: &DensityOperator) -> Result<Vec<Complex64>> {
        if rho.dim() != self.dim {
            return Err(Error::Shape { expected: self.dim, actual: rho.dim() });
        }
        let d = rho.as_slice();
        for (k, &z) in d.iter().enumerate() {
            if self.lookup[k] == ABSENT && (z.re != 0.0 || z.im != 0.0) {
                return Err(Error::Domain(format!(
                    "element ({}, {}) lies outside the packed layout",
                    k / self.dim,
                    k % self.dim
                )));
            }
        }
        Ok(self.pairs.iter().map(|&(r, c)| d[r as usize * self.dim + c as usize]).collect())
    }

    pub fn unpack(&self, packed: &[Complex64]) -> DensityOperator {
        let mut rho = DensityOperator::zeros(self.dim);
        for (&(r, c), &z) in self.pairs.iter().zip(packed) {
            rho.set(r as usize, c as usize, z);
        }
        rho
    }

    /// Trace of a packed state.
    pub fn trace(&self, packed: &[Complex64]) -> Complex64 {
        self.pairs
            .iter()
            .zip(packed)
            .filter(|(p, _)| p.0 == p.1)
            .map(|(_, z)| *z)
            .sum()
    }
}

/// Precomputed per-state data for applying L to a [`ThreeModeSystem`].
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    caps: [usize; MODES],
    strides: [usize; MODES],
    occ: Vec<[u16; MODES]>,
    energy: Vec<f64>,
    /// ½ Σ_i (Γ⁻_i n_i + Γ⁺_i m_i) with m_i = n_i + 1 below the cap, 0 at it
    /// (the diagonal of a a† on the truncated ladder).
    half_loss: Vec<f64>,
    loss: [f64; MODES],
    gain: [f64; MODES],
    sqrt_n: Vec<f64>,
    /// CSR adjacency of the real symmetric interaction.
    h_start: Vec<usize>,
    h_col: Vec<u32>,
    h_val: Vec<f64>,
}

impl Liouvillian {
    pub fn new(sys: &ThreeModeSystem) -> Self {
        let trunc = sys.truncation();
        let dim = trunc.dim();
        let caps = trunc.caps();
        let strides = [trunc.stride(0), trunc.stride(1), trunc.stride(2)];
        let pairs = sys.total_pairs();
        let loss = pairs.map(|p| p.gamma_minus);
        let gain = pairs.map(|p| p.gamma_plus);
        let occ: Vec<[u16; MODES]> = (0..dim)
            .map(|r| trunc.occupations(r).map(|n| n as u16))
            .collect();
        let half_loss = occ
            .iter()
            .map(|o| {
                0.5 * (0..MODES)
                    .map(|i| {
                        let n = o[i] as usize;
                        let m = if n < caps[i] { n + 1 } else { 0 };
                        loss[i] * n as f64 + gain[i] * m as f64
                    })
                    .sum::<f64>()
            })
            .collect();
        let max_cap = *caps.iter().max().unwrap_or(&0);
        let sqrt_n = (0..=max_cap + 1).map(|n| (n as f64).sqrt()).collect();

        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in sys.interaction().entries {
            rows[r].push((c as u32, v));
        }
        let mut h_start = Vec::with_capacity(dim + 1);
        let mut h_col = Vec::new();
        let mut h_val = Vec::new();
        h_start.push(0);
        for row in rows {
            for (c, v) in row {
                h_col.push(c);
                h_val.push(v);
            }
            h_start.push(h_col.len());
        }

        Self {
            dim,
            caps,
            strides,
            occ,
            energy: sys.energies(),
            half_loss,
            loss,
            gain,
            sqrt_n,
            h_start,
            h_col,
            h_val,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// out = L(x) for x packed in `layout`.
    pub fn apply_packed(&self, layout: &PairLayout, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(layout.dim, self.dim);
        debug_assert_eq!(x.len(), layout.len());
        debug_assert_eq!(out.len(), layout.len());
        for (p, &(r, c)) in layout.pairs.iter().enumerate() {
            out[p] = self.element(layout, x, r as usize, c as usize, x[p]);
        }
    }

    #[inline]
    fn element(&self, layout: &PairLayout, x: &[Complex64], r: usize, c: usize, x_rc: Complex64) -> Complex64 {
        let diag = Complex64::new(
            -(self.half_loss[r] + self.half_loss[c]),
            -(self.energy[r] - self.energy[c]),
        );
        let mut acc = diag * x_rc;

        let (or, oc) = (&self.occ[r], &self.occ[c]);
        for i in 0..MODES {
            let (nr, nc) = (or[i] as usize, oc[i] as usize);
            let s = self.strides[i];
            // Γ⁻ a ρ a†: pulls from (n_r+1, n_c+1)
            if self.loss[i] != 0.0 && nr < self.caps[i] && nc < self.caps[i] {
                let q = layout.at(r + s, c + s);
                if q != ABSENT {
                    acc += x[q as usize] * (self.loss[i] * self.sqrt_n[nr + 1] * self.sqrt_n[nc + 1]);
                }
            }
            // Γ⁺ a† ρ a: pulls from (n_r−1, n_c−1)
            if self.gain[i] != 0.0 && nr > 0 && nc > 0 {
                let q = layout.at(r - s, c - s);
                if q != ABSENT {
                    acc += x[q as usize] * (self.gain[i] * self.sqrt_n[nr] * self.sqrt_n[nc]);
                }
            }
        }

        // −i (H_int ρ − ρ H_int), H_int real symmetric
        let mut comm = Complex64::new(0.0, 0.0);
        for k in self.h_start[r]..self.h_start[r + 1] {
            let q = layout.at(self.h_col[k] as usize, c);
            if q != ABSENT {
                comm += x[q as usize] * self.h_val[k];
            }
        }
        for k in self.h_start[c]..self.h_start[c + 1] {
            let q = layout.at(r, self.h_col[k] as usize);
            if q != ABSENT {
                comm -= x[q as usize] * self.h_val[k];
            }
        }
        acc - I * comm
    }
}

/// dρ/dt for a full density matrix.
pub fn apply_liouvillian(sys: &ThreeModeSystem, rho: &DensityOperator) -> Result<DensityOperator> {
    let dim = sys.truncation().dim();
    if rho.dim() != dim {
        return Err(Error::Shape { expected: dim, actual: rho.dim() });
    }
    let lv = Liouvillian::new(sys);
    let layout = PairLayout::full(dim);
    let mut out = DensityOperator::zeros(dim);
    lv.apply_packed(&layout, rho.as_slice(), out.as_mut_slice());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::RatePair;
    use crate::lindblad::fock::FockTruncation;
    use crate::lindblad::reference::dense_liouvillian;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
        // ρ = AA†/Tr(AA†)
        let a = nalgebra::DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityOperator::from_dense(&(m / tr)).unwrap()
    }

    fn small_system(g: f64) -> ThreeModeSystem {
        ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.07, 0.05, g, FockTruncation::new([3, 2, 1]).unwrap()).unwrap()
    }

    #[test]
    fn matches_materialized_superoperator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sys = small_system(0.3);
        let dense = dense_liouvillian(&sys);
        let dim = sys.truncation().dim();
        for _ in 0..5 {
            let rho = random_state(dim, &mut rng);
            let v = DVector::from_row_slice(rho.as_slice());
            let expected = &dense * v;
            let got = apply_liouvillian(&sys, &rho).unwrap();
            let err: f64 = got
                .as_slice()
                .iter()
                .zip(expected.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn trace_preserving_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sys = small_system(0.5);
        for _ in 0..100 {
            let rho = random_state(sys.truncation().dim(), &mut rng);
            let d = apply_liouvillian(&sys, &rho).unwrap();
            assert!(d.trace().norm() < 1e-12);
            assert!(d.hermiticity_error() < 1e-12);
        }
    }

    #[test]
    fn thermal_product_is_fixed_point_at_zero_coupling() {
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.05, 0.05, 0.0, FockTruncation::default()).unwrap();
        let temps: Vec<f64> = (0..MODES)
            .map(|i| crate::steady::effective_temperature(&sys.mode_spec(i).unwrap(), 1.0, 0.5).unwrap().t_star)
            .collect();
        let rho = DensityOperator::thermal_product(sys.truncation(), sys.frequencies(), [temps[0], temps[1], temps[2]]).unwrap();
        let d = apply_liouvillian(&sys, &rho).unwrap();
        assert!(d.frobenius_norm() < 1e-10 * rho.frobenius_norm(), "{}", d.frobenius_norm());
    }

    #[test]
    fn vacuum_is_dark_for_pure_loss() {
        let loss = RatePair { gamma_minus: 0.1, gamma_plus: 0.0 };
        let sys = ThreeModeSystem::from_rate_pairs(1.0, 0.0, [[loss, loss]; 3], FockTruncation::new([4, 2, 1]).unwrap()).unwrap();
        let mut p = vec![0.0; sys.truncation().dim()];
        p[0] = 1.0;
        let d = apply_liouvillian(&sys, &DensityOperator::from_diagonal(&p)).unwrap();
        assert_eq!(d.frobenius_norm(), 0.0);
    }

    #[test]
    fn weight_layout_agrees_with_full() {
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.05, 0.05, 0.4, FockTruncation::new([6, 3, 2]).unwrap()).unwrap();
        let lv = Liouvillian::new(&sys);
        let w = sys.weights();
        let layout = PairLayout::weight_diagonal(&w);
        assert!(layout.len() < sys.truncation().dim().pow(2) / 4);
        // weight-diagonal random Hermitian input
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dim = sys.truncation().dim();
        let mut rho = DensityOperator::zeros(dim);
        for r in 0..dim {
            for c in r..dim {
                if w[r] == w[c] {
                    let z = if r == c {
                        Complex64::new(rng.gen_range(0.0..1.0), 0.0)
                    } else {
                        Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))
                    };
                    rho.set(r, c, z);
                    rho.set(c, r, z.conj());
                }
            }
        }
        let full = apply_liouvillian(&sys, &rho).unwrap();
        let packed = layout.pack(&rho).unwrap();
        let mut out = vec![Complex64::new(0.0, 0.0); layout.len()];
        lv.apply_packed(&layout, &packed, &mut out);
        let back = layout.unpack(&out);
        let diff: f64 = back
            .as_slice()
            .iter()
            .zip(full.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15, "{diff}");
        assert!(layout.pack(&DensityOperator::from_dense(&nalgebra::DMatrix::from_element(dim, dim, Complex64::new(1.0, 0.0))).unwrap()).is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let sys = small_system(0.0);
        assert!(matches!(
            apply_liouvillian(&sys, &DensityOperator::zeros(5)),
            Err(Error::Shape { .. })
        ));
    }
}
