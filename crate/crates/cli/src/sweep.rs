use entroflux_core::linalg::solve_lyapunov;
use entroflux_core::model::{bare_decay_for, check_stability, FeedbackParams, SystemMatrices};
use entroflux_core::optomech::{direct_coupling, map_to_generic, mean_field_steady_state, select_branch};
use entroflux_core::thermo::report_for;
use entroflux_core::{integrate_covariance, Error, OdeConfig, OptoParams, ThermoReport};
use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::scenario::{Coupling, Model, Scenario, SweepVar};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ENTROFLUX_THREADS";

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` reads `ENTROFLUX_THREADS`, then uses all cores.
    pub threads: Option<usize>,
    /// Re-derive each stable point by time integration.
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok {
        report: Box<ThermoReport>,
        /// `‖V_ODE − V‖_∞` when the oracle ran.
        oracle_gap: Option<f64>,
    },
    Unstable,
    /// The point could not be evaluated. `stable` is known when the failure
    /// happened after the stability test.
    Failed { stable: Option<bool>, error: Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub x: f64,
    pub outcome: Outcome,
}

impl ResultRow {
    pub fn report(&self) -> Option<&ThermoReport> {
        match &self.outcome {
            Outcome::Ok { report, .. } => Some(report),
            _ => None,
        }
    }

    pub fn stable(&self) -> Option<bool> {
        match &self.outcome {
            Outcome::Ok { .. } => Some(true),
            Outcome::Unstable => Some(false),
            Outcome::Failed { stable, .. } => *stable,
        }
    }
}

/// Evaluates every grid point; rows come back in ascending sweep order
/// whatever the thread count.
pub fn run_sweep(s: &Scenario, opts: &RunOptions) -> Vec<ResultRow> {
    let grid = s.sweep.grid();
    let threads = opts
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .unwrap_or(0);
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        grid.par_iter()
            .map(|&x| ResultRow {
                x,
                outcome: evaluate(&s.model, s.sweep.var, x, opts.oracle),
            })
            .collect()
    })
}

/// Generic-model parameters at one grid point, or the outcome that ends
/// the evaluation early.
pub fn point_params(model: &Model, var: SweepVar, x: f64) -> Result<FeedbackParams, Outcome> {
    let failed = |error| Outcome::Failed { stable: None, error };
    match model {
        Model::Generic { params, kappa_fb } => {
            let mut p = *params;
            match var {
                SweepVar::OmegaA => p.omega_a = x,
                SweepVar::NA => p.n_a = x,
                SweepVar::NC => p.n_c = x,
                SweepVar::Tau => p.tau = x,
                SweepVar::Theta => p.theta = x,
                SweepVar::G => p.g = x,
                SweepVar::Delta0 => unreachable!("rejected by the config parser"),
            }
            if let Some(k) = kappa_fb {
                p.kappa_a = bare_decay_for(*k, p.tau, p.theta).map_err(failed)?;
            }
            Ok(p)
        }
        Model::Optomech { params, coupling } => {
            let mut p: OptoParams = *params;
            let mut g = match coupling {
                Coupling::Direct(g) => Some(*g),
                Coupling::MeanField { .. } => None,
            };
            match var {
                SweepVar::Delta0 => p.delta_0 = x,
                SweepVar::NA => p.n_a = x,
                SweepVar::NC => p.n_c = x,
                SweepVar::Tau => p.tau = x,
                SweepVar::Theta => p.theta = x,
                SweepVar::G => g = Some(x),
                SweepVar::OmegaA => unreachable!("rejected by the config parser"),
            }
            match (coupling, g) {
                (Coupling::Direct(_), Some(g)) => Ok(direct_coupling(&p, g)),
                (Coupling::MeanField { branch }, _) => {
                    let states = mean_field_steady_state(&p).map_err(failed)?;
                    match (select_branch(&states, *branch), branch) {
                        (Some(st), _) => map_to_generic(&p, st).map_err(|_| Outcome::Unstable),
                        (None, None) => Err(Outcome::Unstable),
                        (None, Some(b)) => Err(failed(Error::InvalidParameter {
                            name: "branch",
                            reason: format!("only {} mean-field roots at this point, asked for {b}", states.len()),
                        })),
                    }
                }
                (Coupling::Direct(_), None) => unreachable!(),
            }
        }
    }
}

fn evaluate(model: &Model, var: SweepVar, x: f64, oracle: bool) -> Outcome {
    let p = match point_params(model, var, x) {
        Ok(p) => p,
        Err(outcome) => return outcome,
    };
    let sys = match SystemMatrices::build(&p) {
        Ok(sys) => sys,
        Err(error) => return Outcome::Failed { stable: None, error },
    };
    if !check_stability(&sys.drift) {
        return Outcome::Unstable;
    }
    let failed = |error| Outcome::Failed {
        stable: Some(true),
        error,
    };
    let v = match solve_lyapunov(&sys.drift, &sys.diffusion) {
        Ok(v) => v,
        Err(e) => return failed(e),
    };
    let oracle_gap = if oracle {
        let ode = OdeConfig::for_drift(&sys.drift).and_then(|cfg| integrate_covariance(&sys.drift, &sys.diffusion, &cfg));
        match ode {
            Ok(ode) => Some(
                ode.as_matrix()
                    .sub(v.as_matrix())
                    .expect("both 4×4")
                    .max_abs(),
            ),
            Err(e) => return failed(e),
        }
    } else {
        None
    };
    match report_for(&p, v) {
        Ok(report) => Outcome::Ok {
            report: Box::new(report),
            oracle_gap,
        },
        Err(e) => failed(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, preset};

    #[test]
    fn rows_are_ordered_and_complete() {
        let s = parse_config("sweep = omega_a 0 2 0.25").unwrap();
        let rows = run_sweep(&s, &RunOptions { threads: Some(3), oracle: false });
        let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(rows.iter().all(|r| r.report().is_some()));
    }

    #[test]
    fn unstable_points_are_data() {
        // θ = 0 with strong feedback turns the dressed decay negative.
        let s = parse_config("tau = 0.9\ntheta = 0\nsweep = omega_a 0 1 0.5").unwrap();
        let rows = run_sweep(&s, &RunOptions::default());
        assert!(rows.iter().all(|r| r.outcome == Outcome::Unstable && r.stable() == Some(false)));
    }

    #[test]
    fn dressed_decay_is_held_fixed() {
        let s = preset("fig4").unwrap();
        let Model::Generic { params, .. } = s.model else { panic!() };
        let model = Model::Generic { params, kappa_fb: Some(0.2) };
        let p = point_params(&model, SweepVar::Tau, 0.5).unwrap();
        assert!((p.kappa_a * (1.0 + 2.0 * 0.5) - 0.2).abs() < 1e-15);
        let model = Model::Generic {
            params: FeedbackParams { theta: 0.0, ..params },
            kappa_fb: Some(0.2),
        };
        assert!(matches!(point_params(&model, SweepVar::Tau, 0.6), Err(Outcome::Failed { .. })));
    }

    #[test]
    fn oracle_agrees_on_small_sweep() {
        let s = parse_config("preset = fig6\nsweep = delta_0 -2 2 0.5").unwrap();
        let rows = run_sweep(&s, &RunOptions { threads: Some(2), oracle: true });
        for r in &rows {
            let Outcome::Ok { oracle_gap: Some(gap), .. } = r.outcome else { panic!("{r:?}") };
            assert!(gap <= 1e-6, "Δ = {}: {gap:e}", r.x);
        }
    }

    #[test]
    fn mean_field_sweep_runs() {
        let s = parse_config("kind = optomech\ng0 = 1e-4\ndrive = 100\ntau = 0.5\nn_c = 10\nsweep = delta_0 0.5 1.5 0.25").unwrap();
        let rows = run_sweep(&s, &RunOptions::default());
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.report().is_some()), "{rows:?}");
    }
}
