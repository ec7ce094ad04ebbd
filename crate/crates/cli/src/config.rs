//! `key = value` scenario files.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use entroflux_core::model::FeedbackParams;
use entroflux_core::{Drive, OptoParams};
use thiserror::Error;

use crate::presets;
use crate::scenario::{Coupling, Kind, Model, Output, Scenario, Sweep, SweepVar};

/// Upper bound on grid size, to catch a mistyped step.
const MAX_POINTS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {key}: {msg}")]
pub struct ConfigError {
    /// 1-based line number, 0 when the problem is a missing key.
    pub line: usize,
    pub key: String,
    pub msg: String,
}

fn err(line: usize, key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

const COMMON_KEYS: &[&str] = &["kind", "preset", "tau", "theta", "n_a", "n_c", "sweep", "outputs"];
const GENERIC_KEYS: &[&str] = &["omega_a", "kappa_a", "kappa_fb", "kappa_c", "g"];
const OPTOMECH_KEYS: &[&str] = &[
    "kappa_a",
    "gamma_m",
    "delta_0",
    "g",
    "g0",
    "drive",
    "laser_power",
    "laser_frequency",
    "attenuate_drive",
    "branch",
];

/// Keys that replace each other when a config overrides a preset.
const ALTERNATIVES: &[(&str, &str)] = &[
    ("kappa_a", "kappa_fb"),
    ("g", "g0"),
    ("drive", "laser_power"),
    ("drive", "laser_frequency"),
];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Entries = BTreeMap<String, Entry>;

fn lex(text: &str) -> Result<Entries, ConfigError> {
    let mut out = Entries::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line, content, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err(line, "", "missing key"));
        }
        if value.is_empty() {
            return Err(err(line, key, "missing value"));
        }
        if let Some(prev) = out.get(key) {
            return Err(err(line, key, format!("duplicate key (first set on line {})", prev.line)));
        }
        out.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(out)
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let mut entries = lex(text)?;
    if let Some(preset) = entries.remove("preset") {
        let body = presets::text(&preset.value).ok_or_else(|| {
            err(
                preset.line,
                "preset",
                format!("unknown preset `{}` (known: {})", preset.value, presets::NAMES.join(", ")),
            )
        })?;
        let mut merged = lex(body).expect("built-in presets parse");
        for entry in merged.values_mut() {
            entry.line = preset.line;
        }
        for (key, entry) in entries {
            for (x, y) in ALTERNATIVES {
                if key == *x {
                    merged.remove(*y);
                } else if key == *y {
                    merged.remove(*x);
                }
            }
            merged.insert(key, entry);
        }
        entries = merged;
    }
    Fields::new(entries)?.build()
}

/// Scenario of a built-in preset.
pub fn preset(name: &str) -> Option<Scenario> {
    presets::text(name).map(|t| parse_config(t).expect("built-in presets are valid"))
}

struct Fields {
    entries: Entries,
    kind: Kind,
}

impl Fields {
    fn new(entries: Entries) -> Result<Self, ConfigError> {
        let kind = match entries.get("kind") {
            None => Kind::Generic,
            Some(e) => match e.value.as_str() {
                "generic" => Kind::Generic,
                "optomech" => Kind::Optomech,
                other => {
                    return Err(err(e.line, "kind", format!("expected `generic` or `optomech`, got `{other}`")))
                }
            },
        };
        let specific = match kind {
            Kind::Generic => GENERIC_KEYS,
            Kind::Optomech => OPTOMECH_KEYS,
        };
        for (key, e) in &entries {
            if !COMMON_KEYS.contains(&key.as_str()) && !specific.contains(&key.as_str()) {
                return Err(err(e.line, key, format!("unknown key for kind `{}`", kind.name())));
            }
        }
        for (x, y) in ALTERNATIVES {
            if let (Some(_), Some(e)) = (entries.get(*x), entries.get(*y)) {
                return Err(err(e.line, y, format!("conflicts with `{x}`")));
            }
        }
        Ok(Self { entries, kind })
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn number(&self, key: &str, default: Option<f64>, check: Check) -> Result<f64, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return default.ok_or_else(|| err(0, key, "required key is missing"));
        };
        let x = if key == "theta" {
            parse_angle(&e.value)
        } else {
            parse_number(&e.value)
        }
        .ok_or_else(|| err(e.line, key, format!("`{}` is not a finite number", e.value)))?;
        check.apply(x).map_err(|msg| err(e.line, key, msg))?;
        Ok(x)
    }

    fn optional(&self, key: &str, check: Check) -> Result<Option<f64>, ConfigError> {
        if self.entries.contains_key(key) {
            self.number(key, None, check).map(Some)
        } else {
            Ok(None)
        }
    }

    fn build(self) -> Result<Scenario, ConfigError> {
        let tau = self.number("tau", Some(0.0), Check::Reflectivity)?;
        let theta = self.number("theta", Some(PI), Check::Finite)?;
        let n_a = self.number("n_a", Some(0.0), Check::NonNegative)?;
        let n_c = self.number("n_c", Some(0.0), Check::NonNegative)?;

        let model = match self.kind {
            Kind::Generic => {
                let omega_a = self.number("omega_a", Some(1.0), Check::Finite)?;
                let kappa_c = self.number("kappa_c", Some(0.2), Check::Positive)?;
                let g = self.number("g", Some(0.05), Check::Finite)?;
                let kappa_fb = self.optional("kappa_fb", Check::Positive)?;
                let kappa_a = match kappa_fb {
                    // Placeholder; replaced at every grid point.
                    Some(k) => k,
                    None => self.number("kappa_a", Some(0.2), Check::Positive)?,
                };
                let params = FeedbackParams::new(omega_a, kappa_a, kappa_c, g)
                    .with_feedback(tau, theta)
                    .with_baths(n_a, n_c);
                Model::Generic { params, kappa_fb }
            }
            Kind::Optomech => {
                let kappa_a = self.number("kappa_a", Some(0.2), Check::Positive)?;
                let gamma_m = self.number("gamma_m", Some(1e-3), Check::Positive)?;
                let delta_0 = self.number("delta_0", Some(1.0), Check::Finite)?;
                let g0 = self.optional("g0", Check::NonNegative)?;
                let drive = match (
                    self.optional("drive", Check::NonNegative)?,
                    self.optional("laser_power", Check::NonNegative)?,
                    self.optional("laser_frequency", Check::Positive)?,
                ) {
                    (Some(e), _, _) => Drive::Amplitude(e),
                    (None, Some(power), Some(frequency)) => Drive::Laser { power, frequency },
                    (None, None, None) => Drive::Amplitude(0.0),
                    (None, Some(_), None) => return Err(err(self.line("laser_power"), "laser_frequency", "required with `laser_power`")),
                    (None, None, Some(_)) => return Err(err(self.line("laser_frequency"), "laser_power", "required with `laser_frequency`")),
                };
                let attenuate = match self.entries.get("attenuate_drive") {
                    None => true,
                    Some(e) => e
                        .value
                        .parse::<bool>()
                        .map_err(|_| err(e.line, "attenuate_drive", "expected `true` or `false`"))?,
                };
                let branch = match self.entries.get("branch") {
                    None => None,
                    Some(e) => Some(
                        e.value
                            .parse::<usize>()
                            .map_err(|_| err(e.line, "branch", "expected a root index 0, 1 or 2"))?,
                    ),
                };
                let coupling = match g0 {
                    Some(_) => Coupling::MeanField { branch },
                    None => {
                        for key in ["drive", "laser_power", "attenuate_drive", "branch"] {
                            if self.entries.contains_key(key) {
                                return Err(err(self.line(key), key, "only meaningful together with `g0`"));
                            }
                        }
                        Coupling::Direct(self.number("g", Some(0.005), Check::Finite)?)
                    }
                };
                let mut params = OptoParams::new(kappa_a, gamma_m, delta_0, g0.unwrap_or(0.0), drive)
                    .with_feedback(tau, theta)
                    .with_baths(n_a, n_c);
                params.attenuate_drive = attenuate;
                Model::Optomech { params, coupling }
            }
        };

        let sweep = self.sweep()?;
        if sweep.var == SweepVar::G && matches!(model, Model::Optomech { coupling: Coupling::MeanField { .. }, .. }) {
            return Err(err(self.line("sweep"), "sweep", "`g` follows from `g0` and the drive; sweep `g0` is not supported"));
        }
        let outputs = self.outputs()?;
        Ok(Scenario { model, sweep, outputs })
    }

    fn sweep(&self) -> Result<Sweep, ConfigError> {
        let e = self.entries.get("sweep").ok_or_else(|| err(0, "sweep", "required key is missing"))?;
        let bad = |msg: String| err(e.line, "sweep", msg);
        let parts: Vec<&str> = e.value.split_whitespace().collect();
        let [var, start, stop, step] = parts[..] else {
            return Err(bad("expected `<variable> <start> <stop> <step>`".into()));
        };
        let var = SweepVar::parse(var).ok_or_else(|| bad(format!("`{var}` cannot be swept")))?;
        if !var.applies_to(self.kind) {
            return Err(bad(format!("`{var}` cannot be swept for kind `{}`", self.kind.name())));
        }
        let parse = |s: &str| {
            if var == SweepVar::Theta { parse_angle(s) } else { parse_number(s) }
                .ok_or_else(|| bad(format!("`{s}` is not a finite number")))
        };
        let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
        if step <= 0.0 {
            return Err(bad("step must be positive".into()));
        }
        if start >= stop {
            return Err(bad("start must be below stop".into()));
        }
        if (stop - start) / step > MAX_POINTS {
            return Err(bad(format!("more than {MAX_POINTS:e} grid points")));
        }
        let range_check = match var {
            SweepVar::Tau => Check::Reflectivity,
            SweepVar::NA | SweepVar::NC => Check::NonNegative,
            _ => Check::Finite,
        };
        for x in [start, stop] {
            range_check.apply(x).map_err(&bad)?;
        }
        Ok(Sweep { var, start, stop, step })
    }

    fn outputs(&self) -> Result<Vec<Output>, ConfigError> {
        let Some(e) = self.entries.get("outputs") else {
            return Ok(Output::ALL.to_vec());
        };
        let mut out = Vec::new();
        for name in e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let o = Output::parse(name).ok_or_else(|| err(e.line, "outputs", format!("unknown output `{name}`")))?;
            if out.contains(&o) {
                return Err(err(e.line, "outputs", format!("`{name}` listed twice")));
            }
            out.push(o);
        }
        if !out.contains(&Output::Stable) {
            out.push(Output::Stable);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy)]
enum Check {
    Finite,
    Positive,
    NonNegative,
    Reflectivity,
}

impl Check {
    fn apply(self, x: f64) -> Result<(), String> {
        match self {
            Check::Finite => Ok(()),
            Check::Positive if x > 0.0 => Ok(()),
            Check::Positive => Err(format!("must be positive, got {x}")),
            Check::NonNegative if x >= 0.0 => Ok(()),
            Check::NonNegative => Err(format!("must be non-negative, got {x}")),
            Check::Reflectivity if (0.0..1.0).contains(&x) => Ok(()),
            Check::Reflectivity => Err(format!("reflectivity must lie in [0, 1), got {x}")),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Plain number or a multiple of pi: `pi`, `-pi/2`, `3*pi/4`, `0.5pi`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let Some(at) = s.find("pi") else {
        return parse_number(&s);
    };
    let (coef, rest) = (&s[..at], &s[at + 2..]);
    let coef = match coef.strip_suffix('*').unwrap_or(coef) {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => parse_number(c)?,
    };
    let den = match rest {
        "" => 1.0,
        r => parse_number(r.strip_prefix('/')?).filter(|d| *d != 0.0)?,
    };
    Some(coef * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_generic_config() {
        let s = parse_config("kind = generic\nomega_a = 1.0\nsweep = omega_a 0.0 5.0 0.01").unwrap();
        assert_eq!(s.kind(), Kind::Generic);
        assert_eq!(s.sweep.var, SweepVar::OmegaA);
        assert_eq!(s.sweep.grid().len(), 501);
        let Model::Generic { params, kappa_fb } = s.model else { panic!() };
        assert_eq!((params.tau, params.theta, params.n_a, params.n_c), (0.0, PI, 0.0, 0.0));
        assert_eq!(kappa_fb, None);
        assert_eq!(s.outputs, Output::ALL.to_vec());
    }

    #[test]
    fn reflectivity_out_of_range() {
        let e = parse_config("tau = 1.5\nsweep = omega_a 0 5 0.01").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (1, "tau"));
    }

    #[test]
    fn unknown_duplicate_and_malformed_keys() {
        let e = parse_config("sweep = omega_a 0 1 0.1\nfoo = 1").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (2, "foo"));
        let e = parse_config("g = 1\n# comment\ng = 2\nsweep = omega_a 0 1 0.1").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (3, "g"));
        let e = parse_config("sweep = omega_a 0 1 0.1\njust words").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_config("omega_a = 1").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (0, "sweep"));
        let e = parse_config("kind = optomech\nomega_a = 1\nsweep = delta_0 -1 1 0.1").unwrap_err();
        assert_eq!(e.key, "omega_a");
        let e = parse_config("kappa_a = 0.1\nkappa_fb = 0.2\nsweep = tau 0 0.5 0.1").unwrap_err();
        assert_eq!(e.key, "kappa_fb");
    }

    #[test]
    fn sweep_validation() {
        for bad in [
            "sweep = omega_a 5 0 0.1",
            "sweep = omega_a 0 5 0",
            "sweep = omega_a 0 5",
            "sweep = kappa_a 0 1 0.1",
            "sweep = delta_0 0 1 0.1",
            "sweep = tau 0 1.2 0.1",
            "sweep = n_a -1 1 0.1",
            "sweep = omega_a 0 1 1e-9",
        ] {
            let e = parse_config(bad).unwrap_err();
            assert_eq!(e.key, "sweep", "{bad}");
        }
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("-pi/2"), Some(-PI / 2.0));
        assert_eq!(parse_angle("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle("0.5 pi"), Some(0.5 * PI));
        assert_eq!(parse_angle("1.25"), Some(1.25));
        assert_eq!(parse_angle("pi/0"), None);
        assert_eq!(parse_angle("pie"), None);
        let s = parse_config("sweep = theta 0 2pi pi/100").unwrap();
        assert_eq!(s.sweep.grid().len(), 201);
    }

    #[test]
    fn presets_match_captions() {
        for name in presets::NAMES {
            assert!(preset(name).is_some(), "{name}");
        }
        let s = preset("fig1").unwrap();
        let Model::Generic { params, kappa_fb } = s.model else { panic!() };
        assert_eq!(kappa_fb, Some(0.2));
        assert_eq!((params.kappa_c, 2.0 * params.g, params.tau, params.theta), (0.2, 0.1, 0.9, PI));
        assert_eq!(s.sweep, Sweep { var: SweepVar::OmegaA, start: 0.0, stop: 5.0, step: 0.01 });

        let s = preset("fig3").unwrap();
        let Model::Generic { params, .. } = s.model else { panic!() };
        assert_eq!((params.kappa_a, params.kappa_c, params.tau, params.n_c), (0.2, 0.5, 0.1, 100.0));
        assert_eq!(s.sweep.grid().len(), 301);

        let s = preset("fig6").unwrap();
        let Model::Optomech { params, coupling } = s.model else { panic!() };
        assert_eq!(coupling, Coupling::Direct(0.005));
        assert_eq!((params.kappa_a, params.gamma_m, params.n_c, params.tau), (0.2, 1e-3, 1e3, 0.9));
        assert_eq!(s.sweep.grid().len(), 401);
    }

    #[test]
    fn preset_overrides() {
        let s = parse_config("preset = fig1\nkappa_a = 0.2\nn_c = 100\noutputs = pi_s, mu_a").unwrap();
        let Model::Generic { params, kappa_fb } = s.model else { panic!() };
        assert_eq!((kappa_fb, params.kappa_a, params.n_c), (None, 0.2, 100.0));
        assert_eq!(s.outputs, vec![Output::PiS, Output::MuA, Output::Stable]);
        let e = parse_config("preset = fig9").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (1, "preset"));
    }

    #[test]
    fn optomech_mean_field_config() {
        let s = parse_config(
            "kind = optomech\ng0 = 1e-4\nlaser_power = 2\nlaser_frequency = 4\nattenuate_drive = false\nbranch = 0\nsweep = delta_0 -2 2 0.1",
        )
        .unwrap();
        let Model::Optomech { params, coupling } = s.model else { panic!() };
        assert_eq!(coupling, Coupling::MeanField { branch: Some(0) });
        assert_eq!(params.drive, Drive::Laser { power: 2.0, frequency: 4.0 });
        assert!(!params.attenuate_drive);
        assert!(parse_config("kind = optomech\ng0 = 1e-4\nsweep = g 0 1 0.1").is_err());
        assert!(parse_config("kind = optomech\ndrive = 3\nsweep = delta_0 -2 2 0.1").is_err());
        assert!(parse_config("kind = optomech\ng0 = 1\nlaser_power = 2\nsweep = delta_0 -2 2 0.1").is_err());
    }
}
