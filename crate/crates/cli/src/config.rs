//! Plain-text scenario configuration.
//!
//! ```text
//! scenario = gaussian-free
//! [physical]
//! sigma0 = 1.5
//! [numerics]
//! t_final = 2
//! [toggles]
//! convergence_levels = 1, 2, 4
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing `scenario` key")]
    MissingScenario,
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    GaussianFree,
    GaussianBoosted,
    HarmonicCoherent,
    RouthDemo,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        Self::GaussianFree,
        Self::GaussianBoosted,
        Self::HarmonicCoherent,
        Self::RouthDemo,
        Self::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GaussianFree => "gaussian-free",
            Self::GaussianBoosted => "gaussian-boosted",
            Self::HarmonicCoherent => "harmonic-coherent",
            Self::RouthDemo => "routh-demo",
            Self::Custom => "custom",
        }
    }

    /// Physical keys a scenario accepts.
    fn physical_keys(self) -> &'static [&'static str] {
        match self {
            Self::GaussianFree => &["hbar", "mass", "sigma0", "x0"],
            Self::GaussianBoosted => &["hbar", "mass", "sigma0", "x0", "p0"],
            Self::HarmonicCoherent => &["hbar", "mass", "omega", "x0", "p0"],
            Self::RouthDemo => &["r0", "angular_momentum"],
            Self::Custom => &["hbar", "mass", "sigma0", "x0", "p0", "omega"],
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
            format!("unknown scenario `{s}` (expected one of {})", names.join(", "))
        })
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Verlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physical {
    pub hbar: f64,
    pub mass: f64,
    pub sigma0: f64,
    pub x0: f64,
    pub p0: f64,
    /// Trap frequency; zero means no external potential.
    pub omega: f64,
    pub r0: f64,
    pub angular_momentum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub n_labels: usize,
    /// Eulerian grid points; chosen to match the label spacing when absent.
    pub m_grid: Option<usize>,
    pub dt: f64,
    pub t_final: f64,
    pub output_stride: usize,
    /// Eulerian domain half-width around the packet; chosen when absent.
    pub half_width: Option<f64>,
    /// Threshold applied to errors against closed forms in the report.
    pub tolerance: f64,
    pub integrator: Integrator,
    /// Inertia regularization coefficient; scaled to the narrowest width
    /// when absent.
    pub inertia: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Toggles {
    pub run_reference: bool,
    pub run_concealed: bool,
    pub convergence_levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub physical: Physical,
    pub numerics: Numerics,
    pub toggles: Toggles,
}

impl ScenarioConfig {
    /// Validated defaults for a scenario.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let mut cfg = Self::raw_defaults(scenario);
        cfg.validate().expect("built-in defaults are valid");
        cfg
    }

    fn raw_defaults(scenario: ScenarioKind) -> Self {
        let harmonic = scenario == ScenarioKind::HarmonicCoherent;
        let physical = Physical {
            hbar: 1.0,
            mass: 1.0,
            sigma0: 1.0,
            x0: if harmonic { 1.0 } else { 0.0 },
            p0: if scenario == ScenarioKind::GaussianBoosted {
                10.0
            } else {
                0.0
            },
            omega: if harmonic || scenario == ScenarioKind::Custom {
                1.0
            } else {
                0.0
            },
            r0: 1.0,
            angular_momentum: 1.0,
        };
        let numerics = Numerics {
            n_labels: 512,
            m_grid: None,
            // one trap period in a whole number of steps
            dt: if harmonic {
                2.0 * std::f64::consts::PI / 6400.0
            } else {
                1e-3
            },
            t_final: match scenario {
                ScenarioKind::RouthDemo => 1.0,
                ScenarioKind::HarmonicCoherent => 2.0 * std::f64::consts::PI,
                _ => 2.0,
            },
            output_stride: 100,
            half_width: None,
            tolerance: 1e-4,
            integrator: Integrator::Rk4,
            inertia: None,
        };
        let toggles = Toggles {
            run_reference: true,
            run_concealed: true,
            convergence_levels: vec![1, 2, 4],
        };
        Self {
            scenario,
            physical,
            numerics,
            toggles,
        }
    }

    fn validate(&mut self) -> Result<(), ConfigError> {
        let p = &mut self.physical;
        let n = &self.numerics;
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    key,
                    reason: format!("must be positive, got {v}"),
                })
            }
        };
        let finite = |key: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid {
                    key,
                    reason: format!("must be finite, got {v}"),
                })
            }
        };
        positive("hbar", p.hbar)?;
        positive("mass", p.mass)?;
        positive("sigma0", p.sigma0)?;
        positive("r0", p.r0)?;
        finite("x0", p.x0)?;
        finite("p0", p.p0)?;
        finite("angular_momentum", p.angular_momentum)?;
        if !(p.omega >= 0.0 && p.omega.is_finite()) {
            return Err(ConfigError::Invalid {
                key: "omega",
                reason: format!("must be non-negative, got {}", p.omega),
            });
        }
        if self.scenario == ScenarioKind::HarmonicCoherent {
            positive("omega", p.omega)?;
            p.sigma0 = (p.hbar / (2.0 * p.mass * p.omega)).sqrt();
        }
        positive("dt", n.dt)?;
        positive("tolerance", n.tolerance)?;
        if !(n.t_final >= 0.0 && n.t_final.is_finite()) {
            return Err(ConfigError::Invalid {
                key: "t_final",
                reason: format!("must be non-negative, got {}", n.t_final),
            });
        }
        if let Some(hw) = n.half_width {
            positive("half_width", hw)?;
        }
        if let Some(c) = n.inertia {
            positive("inertia", c)?;
        }
        let counts = [
            ("n_labels", Some(n.n_labels)),
            ("m_grid", n.m_grid),
            ("output_stride", Some(n.output_stride)),
        ];
        for (key, v) in counts {
            if v == Some(0) {
                return Err(ConfigError::Invalid {
                    key,
                    reason: "must be positive".into(),
                });
            }
        }
        let levels = &self.toggles.convergence_levels;
        if levels.is_empty() || levels.contains(&0) {
            return Err(ConfigError::Invalid {
                key: "convergence_levels",
                reason: "need a non-empty list of positive refinement factors".into(),
            });
        }
        Ok(())
    }

    /// Largest packet width reached during the run.
    pub fn max_width(&self) -> f64 {
        let p = &self.physical;
        let t = self.numerics.t_final;
        if p.omega > 0.0 {
            // width oscillates between σ₀ and ħ/(2mωσ₀)
            let s = if t * p.omega >= std::f64::consts::FRAC_PI_2 {
                p.hbar / (2.0 * p.mass * p.omega * p.sigma0)
            } else {
                let (c, s) = ((p.omega * t).cos(), (p.omega * t).sin());
                let other = p.hbar / (2.0 * p.mass * p.omega * p.sigma0);
                (p.sigma0 * p.sigma0 * c * c + other * other * s * s).sqrt()
            };
            s.max(p.sigma0)
        } else {
            concealed_core::analytic::spreading_width(p.sigma0, p.hbar, p.mass, t)
        }
    }

    /// Smallest packet width reached during the run.
    pub fn min_width(&self) -> f64 {
        let p = &self.physical;
        if p.omega > 0.0 {
            let other = p.hbar / (2.0 * p.mass * p.omega * p.sigma0);
            let t = self.numerics.t_final;
            let s = if t * p.omega >= std::f64::consts::FRAC_PI_2 {
                other
            } else {
                let (c, s) = ((p.omega * t).cos(), (p.omega * t).sin());
                (p.sigma0 * p.sigma0 * c * c + other * other * s * s).sqrt()
            };
            s.min(p.sigma0)
        } else {
            p.sigma0
        }
    }

    /// Inertia coefficient for the label solver. Compression by a factor
    /// `J` stiffens the discrete quantum force like `1/J²`.
    pub fn effective_inertia(&self) -> f64 {
        self.numerics.inertia.unwrap_or_else(|| {
            let j = self.min_width() / self.physical.sigma0;
            0.5 / (j * j)
        })
    }

    /// Distance the packet center can wander from its starting point.
    pub fn excursion(&self) -> f64 {
        let p = &self.physical;
        if p.omega > 0.0 {
            let amp = (p.x0 * p.x0 + (p.p0 / (p.mass * p.omega)).powi(2)).sqrt();
            p.x0.abs() + amp
        } else {
            0.0
        }
    }

    /// Eulerian half-width actually used and, when the configured value was
    /// too small, a warning saying so.
    pub fn effective_half_width(&self) -> (f64, Option<String>) {
        let needed = 6.0 * self.max_width() + self.excursion();
        match self.numerics.half_width {
            None => (10.0 * self.max_width() + self.excursion(), None),
            Some(hw) if hw >= needed => (hw, None),
            Some(hw) => (
                needed,
                Some(format!(
                    "half_width {hw} is below 6 sigma(t_final) plus the center excursion; widened to {needed:.6}"
                )),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Physical,
    Numerics,
    Toggles,
}

impl Section {
    fn of_key(key: &str) -> Option<Section> {
        Some(match key {
            "scenario" => Section::Top,
            "hbar" | "mass" | "sigma0" | "x0" | "p0" | "omega" | "r0" | "angular_momentum" => Section::Physical,
            "n_labels" | "m_grid" | "dt" | "t_final" | "output_stride" | "half_width" | "tolerance" | "integrator"
            | "inertia" => Section::Numerics,
            "run_reference" | "run_concealed" | "convergence_levels" => Section::Toggles,
            _ => return None,
        })
    }

    fn header(self) -> &'static str {
        match self {
            Section::Top => "the top of the file",
            Section::Physical => "[physical]",
            Section::Numerics => "[numerics]",
            Section::Toggles => "[toggles]",
        }
    }
}

fn number(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| at(line, format!("`{key}` expects a number, got `{value}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(at(line, format!("`{key}` must be finite, got `{value}`")))
    }
}

fn count(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| at(line, format!("`{key}` expects a non-negative integer, got `{value}`")))
}

fn switch(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(at(line, format!("`{key}` expects on/off, got `{value}`"))),
    }
}

/// Parses and validates a configuration, filling in scenario defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut section = Section::Top;
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    let mut scenario: Option<ScenarioKind> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "physical" => Section::Physical,
                "numerics" => Section::Numerics,
                "toggles" => Section::Toggles,
                other => return Err(at(line, format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| at(line, format!("expected `key = value`, got `{body}`")))?;
        let home = Section::of_key(key).ok_or_else(|| at(line, format!("unknown key `{key}`")))?;
        if home != section {
            return Err(at(line, format!("key `{key}` belongs in {}", home.header())));
        }
        if entries.iter().any(|(_, k, _)| *k == key) {
            return Err(at(line, format!("duplicate key `{key}`")));
        }
        if key == "scenario" {
            scenario = Some(value.parse().map_err(|e: String| at(line, e))?);
        }
        entries.push((line, key, value));
    }

    let kind = scenario.ok_or(ConfigError::MissingScenario)?;
    let mut cfg = ScenarioConfig::raw_defaults(kind);
    for (line, key, value) in entries {
        if Section::of_key(key) == Some(Section::Physical) && !kind.physical_keys().contains(&key) {
            return Err(at(line, format!("key `{key}` does not apply to scenario {kind}")));
        }
        let p = &mut cfg.physical;
        let n = &mut cfg.numerics;
        let t = &mut cfg.toggles;
        match key {
            "scenario" => {}
            "hbar" => p.hbar = number(line, key, value)?,
            "mass" => p.mass = number(line, key, value)?,
            "sigma0" => p.sigma0 = number(line, key, value)?,
            "x0" => p.x0 = number(line, key, value)?,
            "p0" => p.p0 = number(line, key, value)?,
            "omega" => p.omega = number(line, key, value)?,
            "r0" => p.r0 = number(line, key, value)?,
            "angular_momentum" => p.angular_momentum = number(line, key, value)?,
            "n_labels" => n.n_labels = count(line, key, value)?,
            "m_grid" => n.m_grid = Some(count(line, key, value)?),
            "dt" => n.dt = number(line, key, value)?,
            "t_final" => n.t_final = number(line, key, value)?,
            "output_stride" => n.output_stride = count(line, key, value)?,
            "half_width" => n.half_width = Some(number(line, key, value)?),
            "tolerance" => n.tolerance = number(line, key, value)?,
            "inertia" => n.inertia = Some(number(line, key, value)?),
            "integrator" => {
                n.integrator = match value {
                    "rk4" => Integrator::Rk4,
                    "verlet" => Integrator::Verlet,
                    _ => return Err(at(line, format!("`integrator` expects rk4 or verlet, got `{value}`"))),
                }
            }
            "run_reference" => t.run_reference = switch(line, key, value)?,
            "run_concealed" => t.run_concealed = switch(line, key, value)?,
            "convergence_levels" => {
                t.convergence_levels = value
                    .split(',')
                    .map(|s| count(line, key, s.trim()))
                    .collect::<Result<_, _>>()?
            }
            _ => unreachable!("key `{key}` passed the section table"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
