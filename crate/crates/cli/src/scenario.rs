use std::fmt;

use entroflux_core::model::FeedbackParams;
use entroflux_core::OptoParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Generic,
    Optomech,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Generic => "generic",
            Kind::Optomech => "optomech",
        }
    }
}

/// How the optomechanical fluctuations are coupled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// Light-enhanced coupling given directly; the detuning is not shifted by
    /// radiation pressure.
    Direct(f64),
    /// Coupling from the mean-field solution for `g0` and the drive.
    MeanField { branch: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Generic {
        params: FeedbackParams,
        /// When set, `kappa_a` is recomputed at every point so that the
        /// feedback-dressed decay stays at this value.
        kappa_fb: Option<f64>,
    },
    Optomech {
        params: OptoParams,
        coupling: Coupling,
    },
}

impl Model {
    pub fn kind(&self) -> Kind {
        match self {
            Model::Generic { .. } => Kind::Generic,
            Model::Optomech { .. } => Kind::Optomech,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    OmegaA,
    NA,
    NC,
    Tau,
    Theta,
    G,
    Delta0,
}

impl SweepVar {
    pub const ALL: [SweepVar; 7] = [
        SweepVar::OmegaA,
        SweepVar::NA,
        SweepVar::NC,
        SweepVar::Tau,
        SweepVar::Theta,
        SweepVar::G,
        SweepVar::Delta0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVar::OmegaA => "omega_a",
            SweepVar::NA => "n_a",
            SweepVar::NC => "n_c",
            SweepVar::Tau => "tau",
            SweepVar::Theta => "theta",
            SweepVar::G => "g",
            SweepVar::Delta0 => "delta_0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn applies_to(self, kind: Kind) -> bool {
        match self {
            SweepVar::OmegaA => kind == Kind::Generic,
            SweepVar::Delta0 => kind == Kind::Optomech,
            _ => true,
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// Grid points `start + i·step` up to `stop` (inclusive within rounding).
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    PiS,
    MuA,
    MuC,
    MutualInfo,
    LogNeg,
    NuMinus,
    NAS,
    NCS,
    Stable,
    Physical,
}

impl Output {
    pub const ALL: [Output; 10] = [
        Output::PiS,
        Output::MuA,
        Output::MuC,
        Output::MutualInfo,
        Output::LogNeg,
        Output::NuMinus,
        Output::NAS,
        Output::NCS,
        Output::Stable,
        Output::Physical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::PiS => "pi_s",
            Output::MuA => "mu_a",
            Output::MuC => "mu_c",
            Output::MutualInfo => "mutual_info",
            Output::LogNeg => "log_neg",
            Output::NuMinus => "nu_minus",
            Output::NAS => "n_a_s",
            Output::NCS => "n_c_s",
            Output::Stable => "stable",
            Output::Physical => "physical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Output::Stable | Output::Physical)
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: Model,
    pub sweep: Sweep,
    /// Output columns in order. Always contains [`Output::Stable`].
    pub outputs: Vec<Output>,
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        self.model.kind()
    }
}
