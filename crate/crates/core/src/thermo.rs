//! Information-thermodynamic functionals of a stationary two-mode Gaussian
//! state: entropy production and its per-mode split, Wigner entropy, mutual
//! information, logarithmic negativity and a physicality check.
//!
//! All logarithms are natural, so entropies and correlations are in nats.

use crate::cov::CovMatrix;
use crate::error::{Error, Result};
use crate::linalg::{determinant, is_symmetric_psd, RealMatrix};
use crate::model::{check_stability, derive_params, DerivedParams, FeedbackParams, SystemMatrices};

const DIFFUSION_FLOOR: f64 = 1e-14;
const NU_DISCRIMINANT_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-10;

/// Time-reversal signature of `(X, Y, X, Y)`: positions even, momenta odd.
const PARITY: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// `(A + E A Eᵀ)/2`, the part of the drift that is even under time reversal.
pub fn irreversible_drift(a: &RealMatrix) -> RealMatrix {
    parity_split(a, 1.0)
}

/// `(A − E A Eᵀ)/2`.
pub fn reversible_drift(a: &RealMatrix) -> RealMatrix {
    parity_split(a, -1.0)
}

fn parity_split(a: &RealMatrix, sign: f64) -> RealMatrix {
    assert_eq!(a.dims(), (4, 4), "parity split needs a 4×4 drift matrix");
    let mut out = RealMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let flipped = PARITY[i] * PARITY[j] * a[(i, j)];
            out[(i, j)] = 0.5 * (a[(i, j)] + sign * flipped);
        }
    }
    out
}

/// Two-mode symplectic form, `[[0, 1], [−1, 0]]` on each mode.
pub fn symplectic_form() -> RealMatrix {
    let mut w = RealMatrix::zeros(4, 4);
    for k in [0, 2] {
        w[(k, k + 1)] = 1.0;
        w[(k + 1, k)] = -1.0;
    }
    w
}

fn checked_diffusion(d: &RealMatrix) -> Result<Vec<f64>> {
    let diag = d.diagonal();
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, x)| **x <= DIFFUSION_FLOOR) {
        return Err(Error::DegenerateDiffusion { index, value });
    }
    Ok(diag)
}

/// Stationary entropy production `tr A_irr + 2 tr(A_irrᵀ D⁻¹ A_irr V)` for a
/// diagonal diffusion matrix.
pub fn entropy_production_trace(a_irr: &RealMatrix, d: &RealMatrix, v: &CovMatrix) -> Result<f64> {
    let diag = checked_diffusion(d)?;
    let mut d_inv_a = a_irr.clone();
    for i in 0..4 {
        for j in 0..4 {
            d_inv_a[(i, j)] /= diag[i];
        }
    }
    let kernel = &(&a_irr.transpose() * &d_inv_a) * v.as_matrix();
    Ok(a_irr.trace() + 2.0 * kernel.trace())
}

/// Entropy production split into the contributions of mode a and mode c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyProduction {
    pub pi_s: f64,
    pub mu_a: f64,
    pub mu_c: f64,
}

/// Closed form of the stationary entropy production for the feedback model:
///
/// `μ_a = 2κ_fb[(κ_fb/K_a)(V₁₁+V₂₂)/(2N_a+1) − 1]`,
/// `μ_c = 2κ_c[(V₃₃+V₄₄)/(2N_c+1) − 1]`.
pub fn entropy_production_explicit(
    p: &FeedbackParams,
    d: &DerivedParams,
    v: &CovMatrix,
) -> Result<EntropyProduction> {
    let da = d.k_a_diff * (2.0 * p.n_a + 1.0);
    if da <= DIFFUSION_FLOOR {
        return Err(Error::DegenerateDiffusion { index: 0, value: da });
    }
    let dc = p.kappa_c * (2.0 * p.n_c + 1.0);
    if dc <= DIFFUSION_FLOOR {
        return Err(Error::DegenerateDiffusion { index: 2, value: dc });
    }
    let sum_a = v.get(0, 0) + v.get(1, 1);
    let sum_c = v.get(2, 2) + v.get(3, 3);
    let mu_a = 2.0 * d.kappa_fb * ((d.kappa_fb / d.k_a_diff) * sum_a / (2.0 * p.n_a + 1.0) - 1.0);
    let mu_c = 2.0 * p.kappa_c * (sum_c / (2.0 * p.n_c + 1.0) - 1.0);
    Ok(EntropyProduction {
        pi_s: mu_a + mu_c,
        mu_a,
        mu_c,
    })
}

/// Occupation form `2κ_k[(N_{k,s} + ½)/(N_k + ½) − 1]` of a mode's
/// contribution. Coincides with the closed form only without feedback.
pub fn occupation_mu(kappa_k: f64, n_k_s: f64, n_k: f64) -> f64 {
    2.0 * kappa_k * ((n_k_s + 0.5) / (n_k + 0.5) - 1.0)
}

/// Mean excitation numbers `(⟨a†a⟩, ⟨c†c⟩)`. Not clamped: sub-vacuum blocks
/// give negative values.
pub fn mode_occupations(v: &CovMatrix) -> (f64, f64) {
    (
        0.5 * (v.get(0, 0) + v.get(1, 1) - 1.0),
        0.5 * (v.get(2, 2) + v.get(3, 3) - 1.0),
    )
}

/// Gaussian Wigner (Rényi-2) entropy `½ ln det M`.
pub fn wigner_entropy(m: &RealMatrix) -> Result<f64> {
    let det = determinant(m);
    if det <= 0.0 {
        return Err(Error::NonPositiveDeterminant(det));
    }
    Ok(0.5 * det.ln())
}

/// `−½ ln(det V / (det V_a det V_c))`.
pub fn mutual_information(v: &CovMatrix) -> Result<f64> {
    let s_ac = wigner_entropy(v.as_matrix())?;
    let s_a = wigner_entropy(&v.a_block())?;
    let s_c = wigner_entropy(&v.c_block())?;
    Ok(s_a + s_c - s_ac)
}

/// Logarithmic negativity and the smallest symplectic eigenvalue of the
/// partially transposed state, returned as `(E_N, ν⁻)`.
pub fn log_negativity(v: &CovMatrix) -> Result<(f64, f64)> {
    let det_v = determinant(v.as_matrix());
    let delta = determinant(&v.a_block()) + determinant(&v.c_block())
        - 2.0 * determinant(&v.cross_block());
    let mut disc = delta * delta - 4.0 * det_v;
    if disc < 0.0 {
        if disc < -NU_DISCRIMINANT_TOL * (delta * delta).max(1.0) {
            return Err(Error::ComplexSymplecticEigenvalue(disc));
        }
        disc = 0.0;
    }
    let mut radicand = 0.5 * (delta - disc.sqrt());
    if radicand < 0.0 {
        if radicand < -NU_DISCRIMINANT_TOL * delta.abs().max(1.0) {
            return Err(Error::ComplexSymplecticEigenvalue(radicand));
        }
        radicand = 0.0;
    }
    let nu_minus = radicand.sqrt();
    let e_n = (-(2.0 * nu_minus).ln()).max(0.0);
    Ok((e_n, nu_minus))
}

/// Whether `V + iΩ/2 ⪰ 0`, tested on the real embedding
/// `[[V, −Ω/2], [Ω/2, V]]`.
pub fn physicality_flag(v: &CovMatrix) -> bool {
    let w = symplectic_form();
    let mut big = RealMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            big[(i, j)] = v.get(i, j);
            big[(i + 4, j + 4)] = v.get(i, j);
            big[(i, j + 4)] = -0.5 * w[(i, j)];
            big[(i + 4, j)] = 0.5 * w[(i, j)];
        }
    }
    is_symmetric_psd(&big, PHYSICALITY_TOL)
}

/// Everything the sweeps report about one stationary state.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoReport {
    pub pi_s: f64,
    pub mu_a: f64,
    pub mu_c: f64,
    /// Entropy flux; `−pi_s` at stationarity.
    pub phi_s: f64,
    pub mutual_info: f64,
    pub log_neg: f64,
    pub nu_minus: f64,
    pub n_a_s: f64,
    pub n_c_s: f64,
    /// `V + iΩ/2 ⪰ 0`.
    pub physical: bool,
    pub covariance: CovMatrix,
}

/// Solves the steady state and evaluates every functional on it.
pub fn analyze(p: &FeedbackParams) -> Result<ThermoReport> {
    let sys = SystemMatrices::build(p)?;
    if !check_stability(&sys.drift) {
        return Err(Error::Unstable);
    }
    let v = crate::linalg::solve_lyapunov(&sys.drift, &sys.diffusion)?;
    report_for(p, v)
}

/// Evaluates the functionals on a given stationary covariance matrix.
pub fn report_for(p: &FeedbackParams, v: CovMatrix) -> Result<ThermoReport> {
    let d = derive_params(p);
    let ep = entropy_production_explicit(p, &d, &v)?;
    let mutual_info = mutual_information(&v)?;
    let (log_neg, nu_minus) = log_negativity(&v)?;
    let (n_a_s, n_c_s) = mode_occupations(&v);
    Ok(ThermoReport {
        pi_s: ep.pi_s,
        mu_a: ep.mu_a,
        mu_c: ep.mu_c,
        phi_s: -ep.pi_s,
        mutual_info,
        log_neg,
        nu_minus,
        n_a_s,
        n_c_s,
        physical: physicality_flag(&v),
        covariance: v,
    })
}
