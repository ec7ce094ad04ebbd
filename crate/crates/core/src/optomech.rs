//! Fabry–Pérot optomechanics with coherent feedback on the cavity.
//!
//! The driven cavity is reduced to its classical mean field, and the
//! fluctuations around it map onto [`FeedbackParams`]: the cavity plays
//! mode a (frequency = effective detuning, decay = feedback-dressed rate)
//! and the mirror plays mode c (frequency `omega_m`, damping `gamma_m`).
//! Frequencies are in units of `omega_m`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::FeedbackParams;

/// How the pump strength is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    /// Drive amplitude `E` directly.
    Amplitude(f64),
    /// Laser power and frequency, `E = √(2Pκ_a/ω₀)`.
    Laser { power: f64, frequency: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptoParams {
    pub omega_m: f64,
    /// Mechanical damping; becomes `kappa_c` of the generic model.
    pub gamma_m: f64,
    /// Bare cavity decay rate.
    pub kappa_a: f64,
    /// Bare detuning of the cavity from the pump.
    pub delta_0: f64,
    /// Single-photon optomechanical coupling.
    pub g0: f64,
    pub drive: Drive,
    pub tau: f64,
    pub theta: f64,
    pub n_a: f64,
    pub n_c: f64,
    /// Scale the drive by the beam-splitter transmission ξ (on by default).
    pub attenuate_drive: bool,
}

impl OptoParams {
    pub fn new(kappa_a: f64, gamma_m: f64, delta_0: f64, g0: f64, drive: Drive) -> Self {
        Self {
            omega_m: 1.0,
            gamma_m,
            kappa_a,
            delta_0,
            g0,
            drive,
            tau: 0.0,
            theta: PI,
            n_a: 0.0,
            n_c: 0.0,
            attenuate_drive: true,
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
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(invalid("omega_m", "must be positive"));
        }
        if !(self.gamma_m > 0.0 && self.gamma_m.is_finite()) {
            return Err(invalid("gamma_m", "must be positive"));
        }
        if !(self.kappa_a > 0.0 && self.kappa_a.is_finite()) {
            return Err(invalid("kappa_a", "must be positive"));
        }
        if !self.delta_0.is_finite() || !self.theta.is_finite() {
            return Err(invalid("delta_0", "detuning and phase must be finite"));
        }
        if !(self.g0 >= 0.0 && self.g0.is_finite()) {
            return Err(invalid("g0", "must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(invalid("tau", format!("reflectivity must lie in [0, 1), got {}", self.tau)));
        }
        if !(self.n_a >= 0.0 && self.n_c >= 0.0) {
            return Err(invalid("n_a", "occupations must be non-negative"));
        }
        match self.drive {
            Drive::Amplitude(e) if !(e >= 0.0 && e.is_finite()) => {
                Err(invalid("drive", "amplitude must be non-negative"))
            }
            Drive::Laser { power, frequency } if !(power >= 0.0 && frequency > 0.0) => {
                Err(invalid("drive", "laser power must be non-negative and frequency positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn drive_amplitude(&self) -> f64 {
        match self.drive {
            Drive::Amplitude(e) => e,
            Drive::Laser { power, frequency } => (2.0 * power * self.kappa_a / frequency).sqrt(),
        }
    }

    /// Amplitude that actually enters the cavity.
    pub fn effective_drive(&self) -> f64 {
        let e = self.drive_amplitude();
        if self.attenuate_drive {
            e * (1.0 - self.tau * self.tau).sqrt()
        } else {
            e
        }
    }

    pub fn kappa_fb(&self) -> f64 {
        self.kappa_a * (1.0 - 2.0 * self.tau * self.theta.cos())
    }

    /// Detuning including the feedback shift, before the radiation-pressure
    /// shift.
    pub fn delta_fb(&self) -> f64 {
        self.delta_0 - 2.0 * self.kappa_a * self.tau * self.theta.sin()
    }

    /// Radiation-pressure detuning shift per photon,
    /// `χ = 2g₀²ω_m/(ω_m² + γ_m²)`.
    pub fn dispersive_shift(&self) -> f64 {
        2.0 * self.g0 * self.g0 * self.omega_m / (self.omega_m * self.omega_m + self.gamma_m * self.gamma_m)
    }
}

/// One solution of the mean-field equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptoSteadyState {
    pub a_s: Complex64,
    pub c_s: Complex64,
    pub n_photon: f64,
    /// Effective detuning `Δ'_fb = Δ_fb − g₀(c_s + c_s*)`.
    pub delta_eff: f64,
    /// Position in the ascending list of roots.
    pub branch: usize,
    /// Positive slope of the photon-number response and positive damping.
    pub stable: bool,
}

/// All mean-field solutions, ascending in photon number.
///
/// Eliminating `c_s` leaves `n (κ_fb² + (Δ_fb − χn)²) = E²` for
/// `n = |a_s|²`, solved in closed form and then polished by Newton steps.
pub fn mean_field_steady_state(p: &OptoParams) -> Result<Vec<OptoSteadyState>> {
    p.validate()?;
    let kappa = p.kappa_fb();
    let delta = p.delta_fb();
    let chi = p.dispersive_shift();
    let e = p.effective_drive();

    let f = |n: f64| n * (kappa * kappa + (delta - chi * n).powi(2)) - e * e;
    let df = |n: f64| 3.0 * chi * chi * n * n - 4.0 * delta * chi * n + kappa * kappa + delta * delta;

    let mut roots = if chi == 0.0 {
        let denom = kappa * kappa + delta * delta;
        if denom == 0.0 {
            return Err(Error::NoPhysicalRoot);
        }
        vec![e * e / denom]
    } else {
        let c2 = chi * chi;
        real_cubic_roots(-2.0 * delta * chi / c2, (kappa * kappa + delta * delta) / c2, -e * e / c2)
    };

    for n in roots.iter_mut() {
        for _ in 0..8 {
            let slope = df(*n);
            if slope == 0.0 {
                break;
            }
            let step = f(*n) / slope;
            if !step.is_finite() {
                break;
            }
            *n -= step;
            if step.abs() <= 1e-16 * n.abs().max(1.0) {
                break;
            }
        }
    }
    roots.retain(|n| *n >= -1e-12 * e.max(1.0));
    if roots.is_empty() {
        return Err(Error::NoPhysicalRoot);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let i = Complex64::i();
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(branch, n)| {
            let n = n.max(0.0);
            let delta_eff = delta - chi * n;
            let a_s = Complex64::new(e, 0.0) / Complex64::new(kappa, delta_eff);
            let c_s = i * p.g0 * n / Complex64::new(p.gamma_m, p.omega_m);
            OptoSteadyState {
                a_s,
                c_s,
                n_photon: n,
                delta_eff,
                branch,
                stable: kappa > 0.0 && df(n) > 0.0,
            }
        })
        .collect())
}

/// Real roots of `x³ + b x² + c x + d` (with multiplicity), ascending.
fn real_cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let scale = (half_q * half_q).max(third_p.abs().powi(3));
    let tol = 1e-12 * scale;

    let mut roots = if disc > tol {
        let s = disc.sqrt();
        vec![(-half_q + s).cbrt() + (-half_q - s).cbrt() - shift]
    } else if third_p.abs() <= f64::EPSILON * (1.0 + shift.abs()) && half_q.abs() <= f64::EPSILON {
        vec![-shift; 3]
    } else if disc >= -tol {
        // Double root at −q/(2·p/3)·… : u = cbrt(−q/2), roots 2u and −u (twice).
        let u = (-half_q).cbrt();
        vec![2.0 * u - shift, -u - shift, -u - shift]
    } else {
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| 2.0 * r * (phi - 2.0 * PI * k as f64 / 3.0).cos() - shift)
            .collect()
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Magnitudes of the two mean-field equations evaluated at `s`:
/// `−(iΔ_fb + κ_fb)a + ig₀a(c + c*) + E` and `−(iω_m + γ_m)c + ig₀|a|²`.
pub fn mean_field_residual(p: &OptoParams, s: &OptoSteadyState) -> (f64, f64) {
    let i = Complex64::i();
    let a = s.a_s;
    let c = s.c_s;
    let r_cavity = -(i * p.delta_fb() + p.kappa_fb()) * a
        + i * p.g0 * a * (c + c.conj())
        + p.effective_drive();
    let r_mirror = -(i * p.omega_m + p.gamma_m) * c + i * p.g0 * a.norm_sqr();
    (r_cavity.norm(), r_mirror.norm())
}

/// Lowest stable branch, or the requested branch index.
pub fn select_branch(states: &[OptoSteadyState], branch: Option<usize>) -> Option<&OptoSteadyState> {
    match branch {
        Some(k) => states.get(k),
        None => states.iter().find(|s| s.stable),
    }
}

/// Generic-model parameters of the fluctuations around a mean-field state.
///
/// `omega_a` is chosen so that the feedback-shifted frequency of the generic
/// model equals the effective detuning `Δ'_fb`; the coupling is the
/// light-enhanced `g = g₀|a_s|`.
pub fn map_to_generic(p: &OptoParams, s: &OptoSteadyState) -> Result<FeedbackParams> {
    if !s.stable {
        return Err(Error::UnstableBranch(s.branch));
    }
    let omega_a = s.delta_eff + 2.0 * p.kappa_a * p.tau * p.theta.sin();
    Ok(generic(p, omega_a, p.g0 * s.a_s.norm()))
}

/// Generic-model parameters when the light-enhanced coupling `g` is given
/// directly and the radiation-pressure detuning shift is neglected, so the
/// cavity frequency is the bare detuning `delta_0`.
pub fn direct_coupling(p: &OptoParams, g: f64) -> FeedbackParams {
    generic(p, p.delta_0, g)
}

fn generic(p: &OptoParams, omega_a: f64, g: f64) -> FeedbackParams {
    FeedbackParams {
        omega_a,
        omega_c: p.omega_m,
        kappa_a: p.kappa_a,
        kappa_c: p.gamma_m,
        g,
        tau: p.tau,
        theta: p.theta,
        n_a: p.n_a,
        n_c: p.n_c,
    }
}
