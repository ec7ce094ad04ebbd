use super::{linear_solve, RealMatrix};
use crate::cov::CovMatrix;
use crate::error::{Error, Result};

/// Solves `A V + V Aᵀ + D = 0` for an n×n drift matrix by vectorization.
///
/// `(A ⊗ I + I ⊗ A) vec(V) = −vec(D)` is a dense n²×n² system; the solution
/// is symmetrized before returning. The caller is responsible for checking
/// that `A` is strictly stable; a drift matrix on the stability boundary
/// surfaces as [`Error::SingularMatrix`].
pub fn solve_lyapunov_general(a: &RealMatrix, d: &RealMatrix) -> Result<RealMatrix> {
    if !a.is_square() || a.dims() != d.dims() {
        return Err(Error::DimensionMismatch(format!(
            "Lyapunov equation needs square A and D of equal size, got {:?} and {:?}",
            a.dims(),
            d.dims()
        )));
    }
    let n = a.rows();
    let eye = RealMatrix::identity(n);
    let op = a.kron(&eye).add(&eye.kron(a))?;
    let rhs: Vec<f64> = d.as_slice().iter().map(|x| -x).collect();
    let vec_v = linear_solve(&op, &rhs)?;
    Ok(RealMatrix::new(n, n, vec_v)?.symmetrized())
}

/// Steady-state covariance of a 4×4 drift/diffusion pair.
pub fn solve_lyapunov(a: &RealMatrix, d: &RealMatrix) -> Result<CovMatrix> {
    if a.dims() != (4, 4) {
        return Err(Error::DimensionMismatch(format!(
            "expected a 4×4 drift matrix, got {:?}",
            a.dims()
        )));
    }
    CovMatrix::new(solve_lyapunov_general(a, d)?)
}

/// `A V + V Aᵀ + D`, which vanishes at the steady state.
pub fn lyapunov_residual(a: &RealMatrix, v: &RealMatrix, d: &RealMatrix) -> Result<RealMatrix> {
    let av = a.matmul(v)?;
    av.add(&av.transpose())?.add(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_diagonal_case() {
        let kappa = 0.3;
        let d = 0.8;
        let a = RealMatrix::identity(4).scale(-kappa);
        let dm = RealMatrix::identity(4).scale(d);
        let v = solve_lyapunov(&a, &dm).unwrap();
        let expected = RealMatrix::identity(4).scale(d / (2.0 * kappa));
        assert!(v.as_matrix().sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn decoupled_rotating_mode_thermalizes() {
        let (kappa, omega, n) = (0.2, 1.3, 2.5);
        let a = RealMatrix::from_array([
            [-kappa, omega, 0.0, 0.0],
            [-omega, -kappa, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        let dd = kappa * (2.0 * n + 1.0);
        let d = RealMatrix::from_diag(&[dd, dd, 1.0, 1.0]).unwrap();
        let v = solve_lyapunov(&a, &d).unwrap();
        let block = v.a_block();
        assert!((block[(0, 0)] - (n + 0.5)).abs() < 1e-12);
        assert!((block[(1, 1)] - (n + 0.5)).abs() < 1e-12);
        assert!(block[(0, 1)].abs() < 1e-12);
        let r = lyapunov_residual(&a, v.as_matrix(), &d).unwrap();
        assert!(r.norm_inf() <= 1e-10 * d.norm_inf());
    }

    #[test]
    fn marginal_drift_is_singular() {
        // Undamped oscillator: λ = ±i, so λ_i + λ_j = 0 for a conjugate pair.
        let a = RealMatrix::from_array([[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let d = RealMatrix::identity(2);
        assert!(matches!(
            solve_lyapunov_general(&a, &d),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn rejects_wrong_shapes() {
        let a = RealMatrix::identity(3);
        assert!(solve_lyapunov(&a, &RealMatrix::identity(3)).is_err());
        assert!(solve_lyapunov_general(&a, &RealMatrix::identity(4)).is_err());
    }
}
