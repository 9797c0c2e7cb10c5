use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fock::{FockTruncation, SparseOp, MODES};
use crate::bath::bose_einstein;
use crate::error::{Error, Result};

/// Density matrix ρ stored row-major as a flat vector of length D².
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    data: Vec<Complex64>,
}

/// Measured deviations from the density-operator axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGENVALUE_FLOOR: f64 = -1e-8;

    pub fn ok(&self) -> bool {
        self.hermiticity_error < Self::HERMITICITY_TOL
            && self.trace_error < Self::TRACE_TOL
            && self.min_eigenvalue >= Self::EIGENVALUE_FLOOR
    }
}

impl DensityOperator {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Shape { expected: dim * dim, actual: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn from_diagonal(p: &[f64]) -> Self {
        let mut rho = Self::zeros(p.len());
        for (i, &v) in p.iter().enumerate() {
            rho.data[i * p.len() + i] = Complex64::new(v, 0.0);
        }
        rho
    }

    /// Product of diagonal single-mode states given by their populations.
    pub fn product_of_populations(trunc: &FockTruncation, pops: &[Vec<f64>; MODES]) -> Result<Self> {
        for (i, p) in pops.iter().enumerate() {
            if p.len() != trunc.levels(i) {
                return Err(Error::Shape { expected: trunc.levels(i), actual: p.len() });
            }
        }
        let diag: Vec<f64> = (0..trunc.dim())
            .map(|r| {
                let o = trunc.occupations(r);
                (0..MODES).map(|i| pops[i][o[i]]).product()
            })
            .collect();
        Ok(Self::from_diagonal(&diag))
    }

    /// Product of thermal states, each truncated at its cap and renormalized.
    /// On a truncated ladder this is the exact stationary state of
    /// detailed-balanced birth-death dynamics.
    pub fn thermal_product(trunc: &FockTruncation, omegas: [f64; MODES], temps: [f64; MODES]) -> Result<Self> {
        let mut pops: [Vec<f64>; MODES] = Default::default();
        for i in 0..MODES {
            pops[i] = truncated_thermal(omegas[i], temps[i], trunc.levels(i))?;
        }
        Self::product_of_populations(trunc, &pops)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |ρ_rc − ρ_cr*|
    pub fn hermiticity_error(&self) -> f64 {
        let mut err = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                err = err.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        err
    }

    /// Replace ρ with (ρ + ρ†)/2.
    pub fn hermitize(&mut self) {
        for r in 0..self.dim {
            for c in r..self.dim {
                let v = 0.5 * (self.get(r, c) + self.get(c, r).conj());
                self.set(r, c, v);
                self.set(c, r, v.conj());
            }
        }
    }

    pub fn normalize_trace(&mut self) {
        let t = self.trace().re;
        if t != 0.0 {
            for z in &mut self.data {
                *z /= t;
            }
        }
    }

    /// Tr(Aρ) for a real sparse operator A.
    pub fn expectation(&self, op: &SparseOp) -> Complex64 {
        op.entries.iter().map(|&(r, c, v)| self.get(c, r) * v).sum()
    }

    /// Diagonal of the reduced density matrix of one mode.
    pub fn mode_populations(&self, trunc: &FockTruncation, mode: usize) -> Vec<f64> {
        let mut p = vec![0.0; trunc.levels(mode)];
        for r in 0..self.dim {
            p[trunc.occupations(r)[mode]] += self.get(r, r).re;
        }
        p
    }

    pub fn mean_occupation(&self, trunc: &FockTruncation, mode: usize) -> f64 {
        self.mode_populations(trunc, mode)
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape { expected: m.nrows(), actual: m.ncols() });
        }
        let dim = m.nrows();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(m[(r, c)]);
            }
        }
        Ok(Self { dim, data })
    }

    /// Eigenvalues of the Hermitian part, computed block by block over the
    /// connected components of the sparsity pattern.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.data)
    }

    pub fn check_invariants(&self) -> InvariantReport {
        let eig = self.eigenvalues();
        InvariantReport {
            hermiticity_error: self.hermiticity_error(),
            trace_error: (self.trace() - 1.0).norm(),
            min_eigenvalue: eig.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// ½‖ρ − σ‖₁
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Shape { expected: self.dim, actual: other.dim });
        }
        let diff: Vec<Complex64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(0.5 * hermitian_eigenvalues(self.dim, &diff).iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Text dump, one `row,col,re,im` line per nonzero element.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let z = self.get(r, c);
                if z.re != 0.0 || z.im != 0.0 {
                    writeln!(w, "{r},{c},{},{}", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Normalized populations e^{−nω/T}(1 − e^{−ω/T}) on levels 0..levels.
pub fn truncated_thermal(omega: f64, temperature: f64, levels: usize) -> Result<Vec<f64>> {
    // validates ω and T
    bose_einstein(omega, temperature)?;
    let q = (-omega / temperature).exp();
    let mut p: Vec<f64> = (0..levels).map(|n| q.powi(n as i32)).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    Ok(p)
}

fn hermitian_eigenvalues(dim: usize, data: &[Complex64]) -> Vec<f64> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in 0..dim {
        for c in r + 1..dim {
            let z = data[r * dim + c];
            let zt = data[c * dim + r];
            if z.re != 0.0 || z.im != 0.0 || zt.re != 0.0 || zt.im != 0.0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..dim {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut out = Vec::with_capacity(dim);
    for idx in groups.values() {
        if idx.len() == 1 {
            out.push(data[idx[0] * dim + idx[0]].re);
            continue;
        }
        let n = idx.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let a = data[idx[i] * dim + idx[j]];
            let b = data[idx[j] * dim + idx[i]].conj();
            0.5 * (a + b)
        });
        out.extend(m.symmetric_eigenvalues().iter().copied());
    }
    out
}
