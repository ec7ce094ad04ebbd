//! Built-in scenarios, written in the config-file syntax.

pub const NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

const FIG1: &str = "\
# Frequency sweep with strong feedback, ground-state baths.
# Equal loss rates after feedback renormalization: kappa_fb = kappa_c.
kind = generic
kappa_fb = 0.2
kappa_c = 0.2
g = 0.05
tau = 0.9
theta = pi
n_a = 0
n_c = 0
sweep = omega_a 0 5 0.01
";

const FIG2: &str = "\
# Frequency sweep at weak coupling with a warm bath on c.
kind = generic
kappa_fb = 0.2
kappa_c = 0.2
g = 0.005
tau = 0.9
theta = pi
n_a = 0
n_c = 10
sweep = omega_a 0 5 0.01
";

const FIG3: &str = "\
# Bath imbalance at resonance. N_c is held at 100 so n_a/100 is the ratio
# N_a/N_c and a unit step is 0.01 in the ratio.
kind = generic
omega_a = 1
kappa_a = 0.2
kappa_c = 0.5
g = 0.025
tau = 0.1
theta = pi
n_a = 0
n_c = 100
sweep = n_a 0 300 1
";

const FIG4: &str = "\
# Reflectivity sweep at resonance, ground-state baths.
kind = generic
omega_a = 1
kappa_a = 0.2
kappa_c = 0.2
g = 0.05
theta = pi
n_a = 0
n_c = 0
sweep = tau 0 0.95 0.01
";

const FIG5: &str = "\
# Entropy production against correlations, frequency sweep.
kind = generic
kappa_a = 0.2
kappa_c = 0.2
g = 0.05
tau = 0.85
theta = pi
n_a = 0
n_c = 0
sweep = omega_a 0 5 0.01
";

const FIG6: &str = "\
# Optomechanical detuning sweep, light-enhanced coupling given directly.
kind = optomech
kappa_a = 0.2
gamma_m = 0.001
g = 0.005
tau = 0.9
theta = pi
n_a = 0
n_c = 1000
sweep = delta_0 -2 2 0.01
";

const FIG7: &str = "\
# Optomechanical detuning sweep at stronger coupling and a cold mirror.
kind = optomech
kappa_a = 0.5
gamma_m = 0.01
g = 0.05
tau = 0.9
theta = pi
n_a = 0
n_c = 10
sweep = delta_0 -2 2 0.01
";

pub fn text(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => FIG1,
        "fig2" => FIG2,
        "fig3" => FIG3,
        "fig4" => FIG4,
        "fig5" => FIG5,
        "fig6" => FIG6,
        "fig7" => FIG7,
        _ => return None,
    })
}
