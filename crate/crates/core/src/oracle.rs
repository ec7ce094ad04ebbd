//! Time-domain check of the steady state: integrate
//! `dV/dt = AV + VAᵀ + D` with fixed-step RK4 until it has settled.

use crate::cov::CovMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{stability_margin, RealMatrix};

/// Norm beyond which the integration is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e12;

type Mat4 = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct OdeConfig {
    pub dt: f64,
    pub t_max: f64,
    pub v0: CovMatrix,
}

impl OdeConfig {
    /// `dt = 0.01/max|A_ij|`, `t_max = 50/margin`, starting from vacuum.
    pub fn for_drift(a: &RealMatrix) -> Result<Self> {
        let margin = stability_margin(a).ok_or(Error::Unstable)?;
        Ok(Self {
            dt: 0.01 / a.max_abs(),
            t_max: 50.0 / margin,
            v0: CovMatrix::vacuum(),
        })
    }

    pub fn validate(&self, a: &RealMatrix) -> Result<()> {
        let margin = stability_margin(a).ok_or(Error::Unstable)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        let dt_max = 0.01 / a.max_abs();
        if self.dt > dt_max * (1.0 + 1e-12) {
            return Err(invalid("dt", format!("{} exceeds 0.01/max|A| = {dt_max}", self.dt)));
        }
        if !self.t_max.is_finite() || self.t_max < 10.0 / margin * (1.0 - 1e-12) {
            return Err(invalid(
                "t_max",
                format!("{} is shorter than 10/margin = {}", self.t_max, 10.0 / margin),
            ));
        }
        Ok(())
    }
}

/// `V(t_max)` of the covariance ODE under fixed-step RK4.
///
/// The RK4 step is affine in `V`, so the step map is tabulated once and the
/// `n`-fold iterate is composed by repeated squaring. The result is the same
/// fixed-step trajectory as [`integrate_steps`] up to rounding, at
/// logarithmic cost in the number of steps.
pub fn integrate_covariance(a: &RealMatrix, d: &RealMatrix, cfg: &OdeConfig) -> Result<CovMatrix> {
    let (a4, d4) = (to_mat4(a, "drift")?, to_mat4(d, "diffusion")?);
    cfg.validate(a)?;
    let (h, n) = step_plan(cfg.dt, cfg.t_max);

    let mut map = step_map(&a4, &d4, h);
    let mut v = to_vec17(&to_mat4(cfg.v0.as_matrix(), "v0")?);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            v = apply(&map, &v);
            check_bounded(&v)?;
        }
        k >>= 1;
        if k > 0 {
            map = compose(&map, &map);
        }
    }
    finish(&v)
}

/// Plain RK4 loop, `n` steps of size `h` from `v0`.
pub fn integrate_steps(a: &RealMatrix, d: &RealMatrix, v0: &RealMatrix, h: f64, n: u64) -> Result<CovMatrix> {
    let (a4, d4) = (to_mat4(a, "drift")?, to_mat4(d, "diffusion")?);
    let mut v = to_mat4(v0, "v0")?;
    for _ in 0..n {
        v = rk4_step(&a4, &d4, &v, h);
        let norm = v.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        if norm.is_nan() || norm > DIVERGENCE_BOUND {
            return Err(Error::Diverged(norm));
        }
    }
    let flat: Vec<f64> = v.iter().flatten().copied().collect();
    CovMatrix::new(RealMatrix::new(4, 4, flat)?)
}

/// Number of steps covering `t_max` with steps no longer than `dt`.
fn step_plan(dt: f64, t_max: f64) -> (f64, u64) {
    let n = ((t_max / dt) * (1.0 - 1e-12)).ceil().max(1.0) as u64;
    (t_max / n as f64, n)
}

fn rhs(a: &Mat4, d: &Mat4, v: &Mat4) -> Mat4 {
    let mut av = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            av[i][j] = (0..4).map(|k| a[i][k] * v[k][j]).sum();
        }
    }
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = av[i][j] + av[j][i] + d[i][j];
        }
    }
    out
}

fn axpy(v: &Mat4, h: f64, k: &Mat4) -> Mat4 {
    let mut out = *v;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += h * k[i][j];
        }
    }
    out
}

#[allow(clippy::needless_range_loop)]
fn rk4_step(a: &Mat4, d: &Mat4, v: &Mat4, h: f64) -> Mat4 {
    let k1 = rhs(a, d, v);
    let k2 = rhs(a, d, &axpy(v, h / 2.0, &k1));
    let k3 = rhs(a, d, &axpy(v, h / 2.0, &k2));
    let k4 = rhs(a, d, &axpy(v, h, &k3));
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = v[i][j] + h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
        }
    }
    for i in 0..4 {
        for j in 0..i {
            let s = 0.5 * (out[i][j] + out[j][i]);
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    out
}

// Affine maps on vec V are stored as 17×17 matrices acting on (vec V, 1).
type Affine = Vec<[f64; 17]>;

fn step_map(a: &Mat4, d: &Mat4, h: f64) -> Affine {
    let zero = [[0.0; 4]; 4];
    let offset = to_vec17(&rk4_step(a, d, &zero, h));
    let mut m = vec![[0.0; 17]; 17];
    for col in 0..16 {
        let mut e = zero;
        e[col / 4][col % 4] = 1.0;
        // The homogeneous part is linear; drop the affine offset.
        let image = to_vec17(&rk4_step(a, &zero, &e, h));
        for row in 0..16 {
            m[row][col] = image[row];
        }
    }
    for row in 0..16 {
        m[row][16] = offset[row];
    }
    m[16][16] = 1.0;
    m
}

fn compose(x: &Affine, y: &Affine) -> Affine {
    let mut out = vec![[0.0; 17]; 17];
    for i in 0..17 {
        for k in 0..17 {
            let xik = x[i][k];
            if xik == 0.0 {
                continue;
            }
            for j in 0..17 {
                out[i][j] += xik * y[k][j];
            }
        }
    }
    out
}

fn apply(m: &Affine, v: &[f64; 17]) -> [f64; 17] {
    let mut out = [0.0; 17];
    for i in 0..17 {
        out[i] = (0..17).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

fn to_vec17(m: &Mat4) -> [f64; 17] {
    let mut out = [0.0; 17];
    for i in 0..4 {
        for j in 0..4 {
            out[4 * i + j] = m[i][j];
        }
    }
    out[16] = 1.0;
    out
}

fn check_bounded(v: &[f64; 17]) -> Result<()> {
    let norm = (0..4)
        .map(|i| v[4 * i..4 * i + 4].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm <= DIVERGENCE_BOUND {
        Ok(())
    } else {
        Err(Error::Diverged(norm))
    }
}

fn finish(v: &[f64; 17]) -> Result<CovMatrix> {
    let m = RealMatrix::new(4, 4, v[..16].to_vec())?;
    CovMatrix::new(m.symmetrized())
}

fn to_mat4(m: &RealMatrix, what: &str) -> Result<Mat4> {
    if m.dims() != (4, 4) {
        return Err(Error::DimensionMismatch(format!("{what} must be 4×4, got {:?}", m.dims())));
    }
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        row.copy_from_slice(m.row(i));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_lyapunov;
    use crate::model::{FeedbackParams, SystemMatrices};
    use std::f64::consts::PI;

    fn max_diff(x: &RealMatrix, y: &RealMatrix) -> f64 {
        x.sub(y).unwrap().max_abs()
    }

    #[test]
    fn scalar_decay_closed_form() {
        let a = RealMatrix::identity(4).scale(-1.0);
        let d = RealMatrix::identity(4).scale(2.0);
        let cfg = OdeConfig {
            dt: 0.01,
            t_max: 10.0,
            v0: CovMatrix::new(RealMatrix::zeros(4, 4)).unwrap(),
        };
        let v = integrate_covariance(&a, &d, &cfg).unwrap();
        let exact = 1.0 - (-20.0f64).exp();
        assert!(max_diff(v.as_matrix(), &RealMatrix::identity(4).scale(exact)) <= 1e-8);
    }

    #[test]
    fn decoupled_thermal_modes_relax_to_bath() {
        let p = FeedbackParams::new(1.3, 0.3, 0.2, 0.0).with_baths(2.0, 5.0);
        let sys = SystemMatrices::build(&p).unwrap();
        let cfg = OdeConfig::for_drift(&sys.drift).unwrap();
        let v = integrate_covariance(&sys.drift, &sys.diffusion, &cfg).unwrap();
        let want = CovMatrix::thermal(2.0, 5.0).unwrap();
        assert!(max_diff(v.as_matrix(), want.as_matrix()) <= 1e-9);
    }

    #[test]
    fn resonant_feedback_matches_lyapunov() {
        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.05).with_feedback(0.9, PI);
        let sys = SystemMatrices::build(&p).unwrap();
        let cfg = OdeConfig {
            dt: 1e-3,
            t_max: 200.0,
            v0: CovMatrix::vacuum(),
        };
        let ode = integrate_covariance(&sys.drift, &sys.diffusion, &cfg).unwrap();
        let lyap = solve_lyapunov(&sys.drift, &sys.diffusion).unwrap();
        assert!(max_diff(ode.as_matrix(), lyap.as_matrix()) <= 1e-6);
        assert!(ode.get(0, 2).abs() + ode.get(0, 3).abs() > 1e-4, "cross block should be populated");
    }

    #[test]
    fn squaring_reproduces_plain_stepping() {
        let p = FeedbackParams::new(0.8, 0.2, 0.3, 0.1).with_feedback(0.4, 2.0).with_baths(1.0, 3.0);
        let sys = SystemMatrices::build(&p).unwrap();
        let cfg = OdeConfig::for_drift(&sys.drift).unwrap();
        let (h, n) = step_plan(cfg.dt, cfg.t_max);
        let fast = integrate_covariance(&sys.drift, &sys.diffusion, &cfg).unwrap();
        let slow = integrate_steps(&sys.drift, &sys.diffusion, cfg.v0.as_matrix(), h, n).unwrap();
        assert!(max_diff(fast.as_matrix(), slow.as_matrix()) <= 1e-11);
    }

    #[test]
    fn fourth_order_convergence() {
        // Two damped rotating modes: e^{At} is a scaled rotation, so V(t) is
        // known exactly from the stationary solution.
        let (k, w) = (0.3, 1.7);
        let a = RealMatrix::from_array([
            [-k, w, 0.0, 0.0],
            [-w, -k, 0.0, 0.0],
            [0.0, 0.0, -k, w],
            [0.0, 0.0, -w, -k],
        ])
        .unwrap();
        let d = RealMatrix::from_diag(&[0.6, 0.6, 1.8, 1.8]).unwrap();
        let v_inf = solve_lyapunov(&a, &d).unwrap();
        let v0 = RealMatrix::from_array([
            [2.0, 0.3, 0.1, 0.0],
            [0.3, 1.0, 0.0, 0.2],
            [0.1, 0.0, 0.5, 0.0],
            [0.0, 0.2, 0.0, 0.7],
        ])
        .unwrap();
        let t = 2.0;
        let (c, s) = ((w * t).cos(), (w * t).sin());
        let rot = RealMatrix::from_array([
            [c, s, 0.0, 0.0],
            [-s, c, 0.0, 0.0],
            [0.0, 0.0, c, s],
            [0.0, 0.0, -s, c],
        ])
        .unwrap()
        .scale((-k * t).exp());
        let transient = rot.matmul(&v0.sub(v_inf.as_matrix()).unwrap()).unwrap().matmul(&rot.transpose()).unwrap();
        let exact = v_inf.as_matrix().add(&transient).unwrap();

        let defect = |n: u64| {
            let v = integrate_steps(&a, &d, &v0, t / n as f64, n).unwrap();
            max_diff(v.as_matrix(), &exact)
        };
        let (coarse, fine) = (defect(10), defect(20));
        let ratio = coarse / fine;
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn config_validation() {
        let a = RealMatrix::identity(4).scale(-2.0);
        let d = RealMatrix::identity(4);
        let mut cfg = OdeConfig::for_drift(&a).unwrap();
        assert_eq!(cfg.dt, 0.005);
        assert!((cfg.t_max - 25.0).abs() < 1e-6);
        cfg.dt = 0.1;
        assert!(matches!(integrate_covariance(&a, &d, &cfg), Err(Error::InvalidParameter { name: "dt", .. })));
        cfg.dt = 0.005;
        cfg.t_max = 1.0;
        assert!(matches!(integrate_covariance(&a, &d, &cfg), Err(Error::InvalidParameter { name: "t_max", .. })));
        assert!(matches!(OdeConfig::for_drift(&RealMatrix::identity(4)), Err(Error::Unstable)));
    }

    #[test]
    fn plain_stepping_detects_divergence() {
        let a = RealMatrix::identity(4);
        let d = RealMatrix::identity(4);
        let r = integrate_steps(&a, &d, &RealMatrix::identity(4), 0.1, 10_000);
        assert!(matches!(r, Err(Error::Diverged(_))));
    }
}
