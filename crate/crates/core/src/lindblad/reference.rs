//! Dense reference implementation for small truncations.
//!
//! Builds the D²×D² superoperator explicitly from Kronecker products of dense
//! ladder matrices and finds its null vector by a direct solve. It shares no
//! code with the matrix-free path beyond the system description, and serves
//! as an oracle for it. Memory grows as D⁴; keep D below ~40.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityOperator;
use super::fock::{build_mode_operators, MODES};
use super::system::ThreeModeSystem;
use crate::error::{Error, Result};

/// Largest Hilbert-space dimension accepted by the dense routines.
pub const MAX_DENSE_DIM: usize = 64;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Superoperator acting on row-major vec(ρ): vec(AρB) = (A ⊗ Bᵀ) vec(ρ).
pub fn dense_liouvillian(sys: &ThreeModeSystem) -> DMatrix<Complex64> {
    let dim = sys.truncation().dim();
    let ops = build_mode_operators(sys.truncation());
    let id = DMatrix::<Complex64>::identity(dim, dim);

    // H from operator products, independent of ThreeModeSystem::interaction
    let a: Vec<DMatrix<Complex64>> = ops.annihilation.iter().map(|o| o.to_dense()).collect();
    let ad: Vec<DMatrix<Complex64>> = ops.creation.iter().map(|o| o.to_dense()).collect();
    let w = sys.frequencies();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..MODES {
        h += &ad[i] * &a[i] * c(w[i]);
    }
    let cubic = &ad[1] * &a[0] * &a[0] + &ad[2] * &a[1] * &a[1];
    h += (&cubic + cubic.adjoint()) * c(sys.g());

    let minus_i = Complex64::new(0.0, -1.0);
    let mut l = (h.kronecker(&id) - id.kronecker(&h.transpose())) * minus_i;
    let totals = sys.total_pairs();
    for i in 0..MODES {
        for (jump, rate) in [(&a[i], totals[i].gamma_minus), (&ad[i], totals[i].gamma_plus)] {
            if rate == 0.0 {
                continue;
            }
            let jd = jump.adjoint();
            let jdj = &jd * jump;
            let dissipator = jump.kronecker(&jd.transpose())
                - (jdj.kronecker(&id) + id.kronecker(&jdj.transpose())) * c(0.5);
            l += dissipator * c(rate);
        }
    }
    l
}

/// Steady state from the null space of the dense superoperator, with the
/// (0,0) equation replaced by the trace condition.
pub fn dense_steady_state(sys: &ThreeModeSystem) -> Result<DensityOperator> {
    let dim = sys.truncation().dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::Domain(format!(
            "dense reference limited to D <= {MAX_DENSE_DIM}, got {dim}"
        )));
    }
    sys.check_ergodic()?;
    let mut l = dense_liouvillian(sys);
    for k in 0..dim * dim {
        l[(0, k)] = c(0.0);
    }
    for i in 0..dim {
        l[(0, i * dim + i)] = c(1.0);
    }
    let mut rhs = DVector::<Complex64>::zeros(dim * dim);
    rhs[0] = c(1.0);
    let v = l
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("superoperator null space is not one-dimensional".into()))?;
    let mut rho = DensityOperator::new(dim, v.iter().copied().collect())?;
    rho.hermitize();
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::fock::FockTruncation;

    #[test]
    fn zero_coupling_gives_truncated_thermal_product() {
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.05, 0.05, 0.0, FockTruncation::new([3, 2, 1]).unwrap()).unwrap();
        let rho = dense_steady_state(&sys).unwrap();
        let temps: Vec<f64> = (0..MODES)
            .map(|i| crate::steady::effective_temperature(&sys.mode_spec(i).unwrap(), 1.0, 0.5).unwrap().t_star)
            .collect();
        let expected = DensityOperator::thermal_product(sys.truncation(), sys.frequencies(), [temps[0], temps[1], temps[2]]).unwrap();
        assert!(rho.trace_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn refuses_large_dimensions() {
        let sys = ThreeModeSystem::flat(1.0, 1.0, 0.5, 0.05, 0.05, 0.0, FockTruncation::default()).unwrap();
        assert!(dense_steady_state(&sys).is_err());
    }
}
