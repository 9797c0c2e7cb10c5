//! Truncated three-mode Fock space and its ladder operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MODES: usize = 3;

/// Photon-number caps (m₁, m₂, m₃); mode i keeps levels 0..=m_i.
///
/// Basis states are ordered with mode 1 most significant, so the index of
/// |n₁ n₂ n₃⟩ is n₁(m₂+1)(m₃+1) + n₂(m₃+1) + n₃, matching a₁ ⊗ 1 ⊗ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockTruncation {
    caps: [usize; MODES],
}

impl FockTruncation {
    /// Caps used for the three-mode cascade at ω, 2ω, 4ω.
    pub const DEFAULT_CAPS: [usize; MODES] = [14, 6, 3];

    pub fn new(caps: [usize; MODES]) -> Result<Self> {
        if caps.iter().any(|&m| m < 1) {
            return Err(Error::Domain(format!("every cap must be >= 1, got {caps:?}")));
        }
        Ok(Self { caps })
    }

    pub fn caps(&self) -> [usize; MODES] {
        self.caps
    }

    pub fn levels(&self, mode: usize) -> usize {
        self.caps[mode] + 1
    }

    pub fn dim(&self) -> usize {
        self.caps.iter().map(|m| m + 1).product()
    }

    /// Index offset of one photon in `mode`.
    pub fn stride(&self, mode: usize) -> usize {
        self.caps[mode + 1..].iter().map(|m| m + 1).product()
    }

    pub fn occupations(&self, index: usize) -> [usize; MODES] {
        let mut out = [0; MODES];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (index / self.stride(i)) % self.levels(i);
        }
        out
    }

    pub fn index(&self, occ: [usize; MODES]) -> usize {
        (0..MODES).map(|i| occ[i] * self.stride(i)).sum()
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self { caps: Self::DEFAULT_CAPS }
    }
}

/// Real sparse matrix in coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.0 == row && e.1 == col)
            .map(|e| e.2)
            .sum()
    }

    pub fn transpose(&self) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += Complex64::new(v, 0.0);
        }
        m
    }
}

/// Ladder and number operators of the three modes on the product space.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub annihilation: [SparseOp; MODES],
    pub creation: [SparseOp; MODES],
    pub number: [SparseOp; MODES],
}

/// a_i|…n_i…⟩ = √n_i |…n_i−1…⟩, with identities on the other modes.
pub fn build_mode_operators(trunc: &FockTruncation) -> ModeOperators {
    let dim = trunc.dim();
    let build = |mode: usize| {
        let stride = trunc.stride(mode);
        let mut a = Vec::new();
        let mut n = Vec::new();
        for col in 0..dim {
            let k = trunc.occupations(col)[mode];
            if k > 0 {
                a.push((col - stride, col, (k as f64).sqrt()));
                n.push((col, col, k as f64));
            }
        }
        let a = SparseOp { dim, entries: a };
        let adag = a.transpose();
        (a, adag, SparseOp { dim, entries: n })
    };
    let [m0, m1, m2] = [build(0), build(1), build(2)];
    ModeOperators {
        annihilation: [m0.0, m1.0, m2.0],
        creation: [m0.1, m1.1, m2.1],
        number: [m0.2, m1.2, m2.2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let t = FockTruncation::new([14, 6, 3]).unwrap();
        assert_eq!(t.dim(), 420);
        for i in 0..t.dim() {
            assert_eq!(t.index(t.occupations(i)), i);
        }
        assert_eq!(t.occupations(t.index([3, 5, 2])), [3, 5, 2]);
        assert!(FockTruncation::new([0, 1, 1]).is_err());
    }

    #[test]
    fn two_level_ladder() {
        let t = FockTruncation::new([1, 1, 1]).unwrap();
        let ops = build_mode_operators(&t);
        let a = ops.annihilation[2].to_dense();
        // mode 3 is the fastest index, so its 2×2 block sits at the top left
        assert_eq!(a[(0, 1)].re, 1.0);
        assert_eq!(a[(1, 0)].re, 0.0);
        assert_eq!(a[(0, 0)].re, 0.0);
        let n = ops.number[0].to_dense();
        assert_eq!(n[(0, 0)].re, 0.0);
        assert_eq!(n[(t.index([1, 0, 0]), t.index([1, 0, 0]))].re, 1.0);
    }

    #[test]
    fn nonzero_count_at_default_caps() {
        let ops = build_mode_operators(&FockTruncation::default());
        assert_eq!(ops.annihilation[0].dim, 420);
        assert_eq!(ops.annihilation[0].nnz(), 14 * 7 * 4);
        assert_eq!(ops.annihilation[1].nnz(), 15 * 6 * 4);
        assert_eq!(ops.annihilation[2].nnz(), 15 * 7 * 3);
    }

    #[test]
    fn commutator_is_identity_below_cap() {
        let t = FockTruncation::new([4, 3, 2]).unwrap();
        let ops = build_mode_operators(&t);
        for i in 0..MODES {
            let a = ops.annihilation[i].to_dense();
            let ad = ops.creation[i].to_dense();
            let comm = &a * &ad - &ad * &a;
            let n = ops.number[i].to_dense();
            assert!((&ad * &a - n).norm() < 1e-12);
            for r in 0..t.dim() {
                let occ = t.occupations(r)[i];
                let expected = if occ == t.caps()[i] { -(occ as f64) } else { 1.0 };
                assert!((comm[(r, r)].re - expected).abs() < 1e-12);
            }
        }
    }
}
