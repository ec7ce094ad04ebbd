use super::{RealMatrix, PSD_TOL};

/// Monic quartic `λ⁴ + c3 λ³ + c2 λ² + c1 λ + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl QuarticCoeffs {
    pub fn new(c3: f64, c2: f64, c1: f64, c0: f64) -> Self {
        Self { c0, c1, c2, c3 }
    }

    /// Leading coefficient; always one.
    pub const fn c4(&self) -> f64 {
        1.0
    }

    /// Coefficients from the leading term down: `[c4, c3, c2, c1, c0]`.
    pub fn descending(&self) -> [f64; 5] {
        [1.0, self.c3, self.c2, self.c1, self.c0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        (((x + self.c3) * x + self.c2) * x + self.c1) * x + self.c0
    }
}

/// Coefficients of `det(λI − A)` in ascending powers (the last one is 1),
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &RealMatrix) -> Vec<f64> {
    assert!(a.is_square(), "characteristic polynomial of a non-square matrix");
    let n = a.rows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = RealMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        let am = a * &next;
        coeffs[n - k] = -am.trace() / k as f64;
        m = next;
    }
    coeffs
}

pub fn characteristic_quartic(a: &RealMatrix) -> QuarticCoeffs {
    assert_eq!(a.dims(), (4, 4), "characteristic_quartic needs a 4×4 matrix");
    let c = characteristic_polynomial(a);
    QuarticCoeffs::new(c[3], c[2], c[1], c[0])
}

/// Routh–Hurwitz test: true iff every root has strictly negative real part.
///
/// Coefficients and the Hurwitz determinants must all exceed `1e-12`, so
/// marginal cases count as unstable.
pub fn routh_hurwitz_stable(q: &QuarticCoeffs) -> bool {
    hurwitz_positive(q, PSD_TOL)
}

fn hurwitz_positive(q: &QuarticCoeffs, tol: f64) -> bool {
    let QuarticCoeffs { c0, c1, c2, c3 } = *q;
    if [c0, c1, c2, c3].iter().any(|c| !c.is_finite() || *c <= tol) {
        return false;
    }
    let h2 = c3 * c2 - c1;
    let h3 = c1 * h2 - c3 * c3 * c0;
    h2 > tol && h3 > tol
}

/// Distance of the spectrum from the imaginary axis, `−max Re λ(A)`, found by
/// bisecting on the largest shift `σ` for which `A + σI` is still stable.
/// `None` when `A` itself is not stable. The shifted matrices are tested
/// with strict signs, since an absolute slack would stop the search well
/// short of a repeated root.
pub fn stability_margin(a: &RealMatrix) -> Option<f64> {
    let stable_with_shift = |sigma: f64| {
        let mut shifted = a.clone();
        for i in 0..4 {
            shifted[(i, i)] += sigma;
        }
        hurwitz_positive(&characteristic_quartic(&shifted), 0.0)
    };
    if !routh_hurwitz_stable(&characteristic_quartic(a)) {
        return None;
    }
    let mut lo = 0.0;
    let mut hi = a.norm_inf();
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if stable_with_shift(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}
