use super::{RealMatrix, PIVOT_TOL};
use crate::error::{Error, Result};

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
///
/// The pivot is the entry of largest magnitude in the current column; ties go
/// to the lowest row index. A pivot below `1e-14·‖M‖∞` is reported as
/// [`Error::SingularMatrix`].
pub fn linear_solve(m: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "linear_solve needs a square matrix, got {:?}",
            m.dims()
        )));
    }
    let n = m.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, expected {n}",
            b.len()
        )));
    }
    let threshold = PIVOT_TOL * m.norm_inf();

    let mut a = m.as_slice().to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 || best < threshold {
            return Err(Error::SingularMatrix {
                pivot: best,
                threshold,
            });
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for j in col + 1..n {
                a[row * n + j] -= f * a[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Determinant of a square matrix.
///
/// Up to 4×4 this is a cofactor expansion (no pivoting decisions); larger
/// matrices go through LU with partial pivoting.
pub fn determinant(m: &RealMatrix) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n <= 4 {
        let idx: Vec<usize> = (0..n).collect();
        return cofactor_det(m, &idx, &idx);
    }
    let mut a = m.as_slice().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .partial_cmp(&a[s * n + col].abs())
                    .unwrap()
                    .then(s.cmp(&r))
            })
            .unwrap();
        let p = a[piv * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            for j in col..n {
                a[row * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

pub(crate) fn cofactor_det(m: &RealMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])],
        _ => {
            let r0 = rows[0];
            let rest = &rows[1..];
            let mut sign = 1.0;
            let mut acc = 0.0;
            for (k, &c) in cols.iter().enumerate() {
                let entry = m[(r0, c)];
                if entry != 0.0 {
                    let minor_cols: Vec<usize> = cols
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &j)| j)
                        .collect();
                    acc += sign * entry * cofactor_det(m, rest, &minor_cols);
                }
                sign = -sign;
            }
            acc
        }
    }
}
