//! Two coupled oscillators with coherent feedback on mode a.
//!
//! Mode a sees its own output re-injected through a beam splitter of
//! amplitude reflectivity `tau` and phase `theta`, which renormalizes its
//! decay rate and frequency and reshapes its bath noise. Mode c couples to an
//! ordinary thermal bath. Units are ħ = k_B = 1 with every rate measured in
//! units of the reference frequency `omega_c`.

use std::f64::consts::PI;

use crate::cov::CovMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{characteristic_quartic, routh_hurwitz_stable, solve_lyapunov, RealMatrix};

/// Physical inputs of the feedback model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    /// Bare frequency of mode a.
    pub omega_a: f64,
    /// Frequency of mode c (the normalization reference, 1 in presets).
    pub omega_c: f64,
    /// Bare decay rate of mode a, before feedback.
    pub kappa_a: f64,
    pub kappa_c: f64,
    /// Coupling constant of the `−g(a + a†)(c + c†)` interaction.
    pub g: f64,
    /// Beam-splitter amplitude reflectivity, in `[0, 1)`.
    pub tau: f64,
    /// Feedback phase.
    pub theta: f64,
    /// Thermal occupation of the bath of mode a.
    pub n_a: f64,
    pub n_c: f64,
}

impl FeedbackParams {
    /// Resonant-reference model without feedback (`tau = 0`, `theta = π`) and
    /// vacuum baths.
    pub fn new(omega_a: f64, kappa_a: f64, kappa_c: f64, g: f64) -> Self {
        Self {
            omega_a,
            omega_c: 1.0,
            kappa_a,
            kappa_c,
            g,
            tau: 0.0,
            theta: PI,
            n_a: 0.0,
            n_c: 0.0,
        }
    }

    pub fn with_feedback(mut self, tau: f64, theta: f64) -> Self {
        self.tau = tau;
        self.theta = theta;
        self
    }

    pub fn with_baths(mut self, n_a: f64, n_c: f64) -> Self {
        self.n_a = n_a;
        self.n_c = n_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("kappa_a", self.kappa_a),
            ("kappa_c", self.kappa_c),
            ("g", self.g),
            ("tau", self.tau),
            ("theta", self.theta),
            ("n_a", self.n_a),
            ("n_c", self.n_c),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        if self.omega_c <= 0.0 {
            return Err(invalid("omega_c", "must be positive"));
        }
        if self.kappa_a <= 0.0 {
            return Err(invalid("kappa_a", "must be positive"));
        }
        if self.kappa_c <= 0.0 {
            return Err(invalid("kappa_c", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(invalid("tau", format!("reflectivity must lie in [0, 1), got {}", self.tau)));
        }
        if self.n_a < 0.0 {
            return Err(invalid("n_a", "occupation must be non-negative"));
        }
        if self.n_c < 0.0 {
            return Err(invalid("n_c", "occupation must be non-negative"));
        }
        Ok(())
    }

    /// Beam-splitter transmission `ξ = √(1 − τ²)`.
    pub fn transmission(&self) -> f64 {
        (1.0 - self.tau * self.tau).sqrt()
    }
}

/// Bare decay rate that yields the dressed rate `kappa_fb` once feedback with
/// `(tau, theta)` is applied.
pub fn bare_decay_for(kappa_fb: f64, tau: f64, theta: f64) -> Result<f64> {
    let factor = 1.0 - 2.0 * tau * theta.cos();
    if factor <= 0.0 {
        return Err(invalid(
            "kappa_fb",
            format!("feedback with tau = {tau}, theta = {theta} cannot produce a positive decay"),
        ));
    }
    Ok(kappa_fb / factor)
}

/// Feedback-renormalized quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `κ_a (1 − 2τ cos θ)`; negative values mean the loop pumps mode a.
    pub kappa_fb: f64,
    /// `ω_a − 2κ_a τ sin θ`.
    pub omega_fb: f64,
    /// Diffusion prefactor `κ_a (1 − τ²) |1 − τ e^{iθ}|²`, never negative.
    pub k_a_diff: f64,
    /// Quadrature coupling `G = 2g`.
    pub g_big: f64,
}

pub fn derive_params(p: &FeedbackParams) -> DerivedParams {
    let (tau, theta, kappa) = (p.tau, p.theta, p.kappa_a);
    let loop_gain = 1.0 - 2.0 * tau * theta.cos() + tau * tau;
    DerivedParams {
        kappa_fb: kappa * (1.0 - 2.0 * tau * theta.cos()),
        omega_fb: p.omega_a - 2.0 * kappa * tau * theta.sin(),
        k_a_diff: kappa * (1.0 - tau * tau) * loop_gain,
        g_big: 2.0 * p.g,
    }
}

pub fn build_drift(p: &FeedbackParams, d: &DerivedParams) -> RealMatrix {
    let (k, w, g) = (d.kappa_fb, d.omega_fb, d.g_big);
    let (kc, wc) = (p.kappa_c, p.omega_c);
    RealMatrix::from_array([
        [-k, w, 0.0, 0.0],
        [-w, -k, g, 0.0],
        [0.0, 0.0, -kc, wc],
        [g, 0.0, -wc, -kc],
    ])
    .expect("drift entries are finite for validated parameters")
}

pub fn build_diffusion(p: &FeedbackParams, d: &DerivedParams) -> RealMatrix {
    let da = d.k_a_diff * (2.0 * p.n_a + 1.0);
    let dc = p.kappa_c * (2.0 * p.n_c + 1.0);
    RealMatrix::from_diag(&[da, da, dc, dc]).expect("diffusion entries are finite for validated parameters")
}

/// Drift and diffusion matrices of the quadrature dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub drift: RealMatrix,
    pub diffusion: RealMatrix,
}

impl SystemMatrices {
    pub fn build(p: &FeedbackParams) -> Result<Self> {
        p.validate()?;
        let d = derive_params(p);
        Ok(Self {
            drift: build_drift(p, &d),
            diffusion: build_diffusion(p, &d),
        })
    }
}

/// Strict stability of a drift matrix produced by [`build_drift`].
pub fn check_stability(drift: &RealMatrix) -> bool {
    let (kappa_fb, kappa_c) = (-drift[(0, 0)], -drift[(2, 2)]);
    if kappa_fb <= 0.0 || kappa_c <= 0.0 {
        return false;
    }
    routh_hurwitz_stable(&characteristic_quartic(drift))
}

/// Stationary covariance matrix.
pub fn steady_state(p: &FeedbackParams) -> Result<CovMatrix> {
    let sys = SystemMatrices::build(p)?;
    if !check_stability(&sys.drift) {
        return Err(Error::Unstable);
    }
    solve_lyapunov(&sys.drift, &sys.diffusion)
}

/// Bose–Einstein occupation `1/(e^{Ω/T} − 1)`; zero for `T ≤ 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (omega / temperature).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn feedback_off_leaves_parameters_alone() {
        let p = FeedbackParams::new(1.3, 0.2, 0.5, 0.05);
        let d = derive_params(&p);
        assert_eq!(d.kappa_fb, 0.2);
        assert_eq!(d.omega_fb, 1.3);
        assert_eq!(d.k_a_diff, 0.2);
        assert_eq!(d.g_big, 0.1);
    }

    #[test]
    fn derived_at_strong_negative_feedback() {
        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.05).with_feedback(0.9, PI);
        let d = derive_params(&p);
        assert_relative_eq!(d.kappa_fb, 0.56, epsilon = 1e-15);
        assert_relative_eq!(d.omega_fb, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.k_a_diff, 0.13718, epsilon = 1e-15);
    }

    #[test]
    fn derived_at_quarter_turn() {
        let p = FeedbackParams::new(2.0, 1.0, 0.2, 0.05).with_feedback(0.5, FRAC_PI_2);
        let d = derive_params(&p);
        assert_relative_eq!(d.kappa_fb, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.omega_fb, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.k_a_diff, 0.9375, epsilon = 1e-15);
    }

    #[test]
    fn drift_layout() {
        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.05);
        let a = build_drift(&p, &derive_params(&p));
        let expected = RealMatrix::from_array([
            [-0.2, 1.0, 0.0, 0.0],
            [-1.0, -0.2, 0.1, 0.0],
            [0.0, 0.0, -0.2, 1.0],
            [0.1, 0.0, -1.0, -0.2],
        ])
        .unwrap();
        assert_eq!(a, expected);

        let fb = p.with_feedback(0.9, PI);
        let a = build_drift(&fb, &derive_params(&fb));
        assert_relative_eq!(a[(0, 0)], -0.56, epsilon = 1e-15);
        assert_relative_eq!(a[(1, 1)], -0.56, epsilon = 1e-15);
        assert_relative_eq!(a[(0, 1)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(a[(1, 0)], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn uncoupled_drift_is_block_diagonal() {
        let p = FeedbackParams::new(1.4, 0.2, 0.3, 0.0);
        let a = build_drift(&p, &derive_params(&p));
        assert!(a.submatrix(&[0, 1], &[2, 3]).max_abs() == 0.0);
        assert!(a.submatrix(&[2, 3], &[0, 1]).max_abs() == 0.0);
    }

    #[test]
    fn diffusion_entries() {
        let p = FeedbackParams::new(1.0, 0.2, 0.3, 0.05);
        let d = build_diffusion(&p, &derive_params(&p));
        assert_eq!(d.diagonal(), vec![0.2, 0.2, 0.3, 0.3]);

        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.05).with_feedback(0.9, PI);
        let d = build_diffusion(&p, &derive_params(&p));
        assert_relative_eq!(d[(0, 0)], 0.13718, epsilon = 1e-15);
        assert_relative_eq!(d[(1, 1)], 0.13718, epsilon = 1e-15);

        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.05).with_baths(0.0, 100.0);
        let d = build_diffusion(&p, &derive_params(&p));
        assert_relative_eq!(d[(2, 2)], 40.2, epsilon = 1e-12);
        assert_relative_eq!(d[(3, 3)], 40.2, epsilon = 1e-12);
    }

    #[test]
    fn stability_checks() {
        let p = FeedbackParams::new(1.0, 0.2, 0.3, 0.0);
        assert!(check_stability(&SystemMatrices::build(&p).unwrap().drift));

        // κ_fb = κ_a (1 − 1.2) < 0
        let p = FeedbackParams::new(1.0, 0.2, 0.3, 0.05).with_feedback(0.6, 0.0);
        assert!(derive_params(&p).kappa_fb < 0.0);
        assert!(!check_stability(&SystemMatrices::build(&p).unwrap().drift));
        assert_eq!(steady_state(&p), Err(Error::Unstable));
    }

    #[test]
    fn local_equilibrium_without_coupling() {
        let p = FeedbackParams::new(1.7, 0.2, 0.4, 0.0).with_baths(2.0, 5.0);
        let v = steady_state(&p).unwrap();
        let expected = RealMatrix::from_diag(&[2.5, 2.5, 5.5, 5.5]).unwrap();
        assert!(v.as_matrix().sub(&expected).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn feedback_squeezes_uncoupled_mode_below_vacuum() {
        let p = FeedbackParams::new(1.0, 0.2, 0.2, 0.0).with_feedback(0.9, PI);
        let v = steady_state(&p).unwrap();
        let expected = 0.13718 / (2.0 * 0.56);
        assert_relative_eq!(expected, 0.12248, epsilon = 1e-5);
        let a = v.a_block();
        assert_relative_eq!(a[(0, 0)], expected, epsilon = 1e-13);
        assert_relative_eq!(a[(1, 1)], expected, epsilon = 1e-13);
        assert!(a[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let base = FeedbackParams::new(1.0, 0.2, 0.2, 0.05);
        assert!(base.with_feedback(1.0, PI).validate().is_err());
        assert!(base.with_feedback(-0.1, PI).validate().is_err());
        assert!(base.with_baths(-1.0, 0.0).validate().is_err());
        assert!(FeedbackParams { kappa_c: 0.0, ..base }.validate().is_err());
        assert!(FeedbackParams { omega_a: f64::NAN, ..base }.validate().is_err());
        assert!(steady_state(&FeedbackParams { kappa_a: -0.1, ..base }).is_err());
    }

    #[test]
    fn dressed_decay_inverts() {
        let k = bare_decay_for(0.2, 0.9, PI).unwrap();
        assert_relative_eq!(k, 0.2 / 2.8, epsilon = 1e-16);
        let p = FeedbackParams::new(1.0, k, 0.2, 0.05).with_feedback(0.9, PI);
        assert_relative_eq!(derive_params(&p).kappa_fb, 0.2, epsilon = 1e-15);
        assert!(bare_decay_for(0.2, 0.6, 0.0).is_err());
    }

    #[test]
    fn bose_einstein_occupation() {
        assert_eq!(thermal_occupation(1.0, 0.0), 0.0);
        assert_eq!(thermal_occupation(1.0, 1e-6), 0.0);
        assert_relative_eq!(thermal_occupation(std::f64::consts::LN_2, 1.0), 1.0, epsilon = 1e-15);
        // High-temperature series 1/x − 1/2 + x/12 − x³/720.
        let x: f64 = 0.01;
        let series = 1.0 / x - 0.5 + x / 12.0 - x.powi(3) / 720.0;
        assert_relative_eq!(thermal_occupation(0.01, 1.0), series, max_relative = 1e-12);
        assert_relative_eq!(thermal_occupation(0.01, 1.0), 99.500833, epsilon = 1e-6);
    }
}
