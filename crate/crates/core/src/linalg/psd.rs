use super::solve::cofactor_det;
use super::RealMatrix;

/// Positive-semidefiniteness test for a symmetric matrix.
///
/// Up to 4×4 every principal minor (not only the leading ones, which would
/// accept e.g. `diag(0, −1)`) must be at least `−tol`; minors are evaluated
/// by exact cofactor expansion. Larger matrices fall back to the smallest
/// Jacobi eigenvalue. A matrix that is not symmetric within `tol` fails.
pub fn is_symmetric_psd(m: &RealMatrix, tol: f64) -> bool {
    if !m.is_square() || m.max_asymmetry() > tol {
        return false;
    }
    let n = m.rows();
    if n > 4 {
        return symmetric_eigenvalues(m)
            .iter()
            .all(|&ev| ev >= -tol);
    }
    let s = m.symmetrized();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        cofactor_det(&s, &idx, &idx) >= -tol
    })
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let n = m.rows();
    let mut a = m.symmetrized();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = a.diagonal();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_psd() {
        assert!(is_symmetric_psd(&RealMatrix::identity(4).scale(0.5), 1e-12));
    }

    #[test]
    fn negative_eigenvalue_fails() {
        let m = RealMatrix::from_diag(&[1.0, 1.0, 1.0, -0.01]).unwrap();
        assert!(!is_symmetric_psd(&m, 1e-12));
    }

    #[test]
    fn non_leading_minor_is_checked() {
        let m = RealMatrix::from_diag(&[0.0, -1.0]).unwrap();
        assert!(!is_symmetric_psd(&m, 1e-12));
    }

    #[test]
    fn singular_psd_passes() {
        let m = RealMatrix::from_array([[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(is_symmetric_psd(&m, 1e-12));
    }

    #[test]
    fn asymmetric_fails() {
        let m = RealMatrix::from_array([[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(!is_symmetric_psd(&m, 1e-12));
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let m = RealMatrix::from_array([[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        let mut big = RealMatrix::identity(6);
        big[(0, 5)] = 2.0;
        big[(5, 0)] = 2.0;
        let ev = symmetric_eigenvalues(&big);
        assert!((ev[0] + 1.0).abs() < 1e-13 && (ev[5] - 3.0).abs() < 1e-13);
        assert!(!is_symmetric_psd(&big, 1e-10));
    }
}
