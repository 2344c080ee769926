//! Lockstep runs of the label fluid and the wavefunction reference.

use std::fmt;
use std::fs::File;
use std::path::Path;

use concealed_core::analytic::{CoherentState, FreeGaussian};
use concealed_core::coupled::{Coupled, ReferenceSpec};
use concealed_core::{EnergyReport, ExternalPotential, GridSpec, InitialProfile, PhysicalParams};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::routh_demo;
use crate::{CliError, Sink};

/// Grid and step sizes a metric was computed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub n_labels: usize,
    pub m_grid: Option<usize>,
    pub dt: f64,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} ", self.n_labels)?;
        match self.m_grid {
            Some(m) => write!(f, "M={m} ")?,
            None => write!(f, "M=- ")?,
        }
        write!(f, "dt={:e}", self.dt)
    }
}

/// Comparison metrics at one instant. Absent entries did not apply.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub t: f64,
    /// Sup over labels of `|q − q_exact|`.
    pub trajectory_error: Option<f64>,
    /// Sup over labels of `|(Q − Q₀) − (Q − Q₀)_exact|`.
    pub concealed_error: Option<f64>,
    /// L² gap between mapped label density and `|ψ|²`.
    pub density_l2: Option<f64>,
    /// Largest relative change of the total energy so far.
    pub energy_drift: f64,
    /// Largest pairwise gap between the energy totals.
    pub energy_disagreement: Option<f64>,
    /// Relative deviation of `J·W` along trajectories from its initial value.
    pub continuity_error: Option<f64>,
    /// Relative gap between continuity and mapped concealed velocities.
    pub concealed_velocity_gap: Option<f64>,
    pub norm_error: Option<f64>,
}

/// Outcome of a run, complete or not.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: ScenarioKind,
    pub resolution: Resolution,
    pub t_final: f64,
    pub steps_planned: usize,
    pub steps_done: usize,
    pub failure: Option<String>,
    pub metrics: Metrics,
    pub tolerance: f64,
    pub warnings: Vec<String>,
    /// Extra `name = value` lines specific to a scenario.
    pub notes: Vec<(String, String)>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let res = self.resolution;
        s += &format!("scenario = {}\n", self.scenario);
        s += &format!("resolution = {res}\n");
        s += &format!("t_final = {}\n", self.t_final);
        match &self.failure {
            None => {
                s += &format!(
                    "status = completed {} of {} steps\n",
                    self.steps_done, self.steps_planned
                )
            }
            Some(e) => s += &format!("status = FAILED at step {}: {e}\n", self.steps_done + 1),
        }
        for w in &self.warnings {
            s += &format!("warning = {w}\n");
        }
        let m = &self.metrics;
        s += &format!("\n# metrics at t = {} [{res}]\n", m.t);
        let tol = self.tolerance;
        let judged = |v: Option<f64>| match v {
            Some(v) if v <= tol => format!("{v:.6e} (within tolerance {tol:e})"),
            Some(v) => format!("{v:.6e} (EXCEEDS tolerance {tol:e})"),
            None => "n/a".into(),
        };
        let plain = |v: Option<f64>| v.map_or("n/a".into(), |v| format!("{v:.6e}"));
        s += &format!("trajectory_sup_error = {}\n", judged(m.trajectory_error));
        s += &format!("concealed_sup_error = {}\n", judged(m.concealed_error));
        s += &format!("density_l2 = {}\n", plain(m.density_l2));
        s += &format!("energy_drift = {:.6e}\n", m.energy_drift);
        s += &format!("energy_disagreement = {}\n", plain(m.energy_disagreement));
        s += &format!("continuity_error = {}\n", plain(m.continuity_error));
        s += &format!("concealed_velocity_gap = {}\n", plain(m.concealed_velocity_gap));
        s += &format!("norm_error = {}\n", plain(m.norm_error));
        for (k, v) in &self.notes {
            s += &format!("{k} = {v}\n");
        }
        s
    }
}

enum Exact {
    Free(FreeGaussian<f64>),
    Coherent(CoherentState<f64>),
}

impl Exact {
    fn of(cfg: &ScenarioConfig) -> Option<Self> {
        let p = &cfg.physical;
        if cfg.scenario == ScenarioKind::HarmonicCoherent {
            return Some(Exact::Coherent(CoherentState {
                x0: p.x0,
                p0: p.p0,
                omega: p.omega,
                hbar: p.hbar,
                mass: p.mass,
            }));
        }
        (p.omega == 0.0).then_some(Exact::Free(FreeGaussian {
            center: p.x0,
            sigma0: p.sigma0,
            momentum: p.p0,
            hbar: p.hbar,
            mass: p.mass,
        }))
    }

    fn trajectory(&self, a: f64, t: f64) -> f64 {
        match self {
            Exact::Free(g) => g.trajectory(a, t),
            Exact::Coherent(c) => c.trajectory(a, t),
        }
    }

    fn concealed_displacement(&self, a: f64, t: f64) -> f64 {
        match self {
            Exact::Free(g) => g.concealed_displacement(a, t),
            Exact::Coherent(c) => c.concealed_displacement(a, t),
        }
    }
}

/// Config with the Eulerian grid fixed, plus any warnings raised doing so.
pub fn resolve(cfg: &ScenarioConfig) -> (ScenarioConfig, Vec<String>) {
    let mut out = cfg.clone();
    let mut warnings = Vec::new();
    if cfg.scenario == ScenarioKind::RouthDemo {
        return (out, warnings);
    }
    let (hw, warning) = cfg.effective_half_width();
    warnings.extend(warning);
    out.numerics.half_width = Some(hw);
    if out.numerics.m_grid.is_none() {
        let p = &cfg.physical;
        let (lo, hi) = profile(cfg).support(GridSpec::default().density_floor);
        let da = (hi - lo) / (cfg.numerics.n_labels.max(2) - 1) as f64;
        // resolve the carrier wave of a moving packet as well as the labels
        let dx = if p.p0 != 0.0 {
            da.min(0.05 * p.hbar / p.p0.abs())
        } else {
            da
        };
        let drift = if p.omega > 0.0 {
            0.0
        } else {
            (p.p0 / p.mass * cfg.numerics.t_final).abs()
        };
        let span = 2.0 * hw + drift;
        out.numerics.m_grid = Some((span / dx).ceil() as usize + 1);
    }
    let steps = (cfg.numerics.t_final / cfg.numerics.dt).round();
    if (steps * cfg.numerics.dt - cfg.numerics.t_final).abs() > 1e-9 * cfg.numerics.t_final.max(1.0) {
        warnings.push(format!(
            "t_final {} is not a whole number of steps; stopping at {}",
            cfg.numerics.t_final,
            steps * cfg.numerics.dt
        ));
    }
    (out, warnings)
}

fn profile(cfg: &ScenarioConfig) -> InitialProfile {
    let p = &cfg.physical;
    InitialProfile::gaussian(p.x0, p.sigma0, p.p0)
}

fn nan_or(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

struct Writers {
    traj: csv::Writer<File>,
    energy: csv::Writer<File>,
    euler: csv::Writer<File>,
}

impl Writers {
    fn create(dir: &Path) -> Result<Self, CliError> {
        let open = |name: &str, header: &[&str]| -> Result<csv::Writer<File>, CliError> {
            let path = dir.join(name);
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::output(&path, e))?;
            w.write_record(header).map_err(|e| CliError::output(&path, e))?;
            Ok(w)
        };
        Ok(Self {
            traj: open("trajectories.csv", &["t", "a", "q", "qdot", "J", "u", "Q", "Qdot"])?,
            energy: open(
                "energy.csv",
                &[
                    "t",
                    "T_visible",
                    "T_concealed",
                    "V_external",
                    "H_lagrangian",
                    "H_eulerian",
                    "H_operator",
                    "H_metric",
                ],
            )?,
            euler: open(
                "eulerian.csv",
                &[
                    "t",
                    "x",
                    "rho_qlag",
                    "rho_psi",
                    "v",
                    "V_concealed_lagrangian",
                    "V_concealed_continuity",
                ],
            )?,
        })
    }

    fn flush(&mut self) -> Result<(), CliError> {
        for w in [&mut self.traj, &mut self.energy, &mut self.euler] {
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        Ok(())
    }
}

fn row(w: &mut csv::Writer<File>, values: &[f64]) -> Result<(), CliError> {
    w.write_record(values.iter().map(|v| crate::num(*v)))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn snapshot(run: &Coupled<f64>, e: &EnergyReport, concealed: bool, w: &mut Writers) -> Result<(), CliError> {
    let lag = &run.lag;
    let (traj, conc) = (&lag.traj, &lag.conc);
    let t = traj.t;
    let qdot_conc = conc.velocity(traj);
    for (k, &a) in lag.fluid.grid.a.iter().enumerate() {
        let (big_q, big_qdot) = if concealed {
            (conc.q[k], qdot_conc[k])
        } else {
            (f64::NAN, f64::NAN)
        };
        row(
            &mut w.traj,
            &[t, a, traj.q[k], traj.qdot[k], traj.jac[k], traj.u[k], big_q, big_qdot],
        )?;
    }
    row(
        &mut w.energy,
        &[
            t,
            e.t_visible,
            e.t_concealed,
            e.v_external,
            e.h_lagrangian,
            nan_or(e.h_eulerian),
            nan_or(e.h_operator),
            e.h_metric,
        ],
    )?;
    if let Some(r) = &run.reference {
        let f = &r.fields;
        let mapped = match run.mapped() {
            Some(Ok(m)) => Some(m),
            _ => None,
        };
        let continuity = r.continuity.as_ref().map(|c| c.velocity(f));
        for i in 0..f.len() {
            let lag_rho = mapped.as_ref().and_then(|m| m.rho[i]);
            let lag_v = if concealed {
                mapped.as_ref().and_then(|m| m.concealed_velocity[i])
            } else {
                None
            };
            let cont_v = continuity.as_ref().and_then(|c| c[i]);
            let v = if f.valid[i] { f.v[i] } else { f64::NAN };
            row(
                &mut w.euler,
                &[t, f.x[i], nan_or(lag_rho), f.rho[i], v, nan_or(lag_v), nan_or(cont_v)],
            )?;
        }
    }
    Ok(())
}

fn measure(run: &Coupled<f64>, exact: Option<&Exact>, e: &EnergyReport, h0: f64, drift: f64) -> Metrics {
    let lag = &run.lag;
    let t = lag.traj.t;
    let grid = &lag.fluid.grid;
    let sup = |f: &dyn Fn(usize, f64) -> f64| {
        grid.a
            .iter()
            .enumerate()
            .map(|(k, &a)| f(k, a).abs())
            .fold(0.0, f64::max)
    };
    let trajectory_error = exact.map(|x| sup(&|k, a| lag.traj.q[k] - x.trajectory(a, t)));
    let concealed_error = exact.map(|x| sup(&|k, a| lag.conc.q[k] - lag.conc.q0[k] - x.concealed_displacement(a, t)));
    let scale = if h0.abs() > 0.0 { h0.abs() } else { 1.0 };
    let flatten = |v: Option<concealed_core::Result<f64>>| v.and_then(|r| r.ok());
    Metrics {
        t,
        trajectory_error,
        concealed_error,
        density_l2: flatten(run.density_l2()),
        energy_drift: drift.max((e.h_lagrangian - h0).abs() / scale),
        energy_disagreement: run.reference.as_ref().map(|_| e.max_disagreement()),
        continuity_error: run.continuity_invariance_error(),
        concealed_velocity_gap: flatten(run.concealed_velocity_discrepancy()),
        norm_error: run.reference.as_ref().map(|r| (r.fields.norm() - 1.0).abs()),
    }
}

/// Runs a resolved config. Setup problems are errors; a failure while
/// stepping is recorded in the returned report.
pub fn simulate(cfg: &ScenarioConfig, out_dir: Option<&Path>, sink: &mut Sink) -> Result<RunReport, CliError> {
    if cfg.scenario == ScenarioKind::RouthDemo {
        return routh_demo::simulate(cfg, out_dir, sink);
    }
    let (cfg, warnings) = resolve(cfg);
    for w in &warnings {
        sink.warn(w);
    }
    let p = &cfg.physical;
    let n = &cfg.numerics;
    let params = PhysicalParams {
        hbar: p.hbar,
        mass: p.mass,
        dt: n.dt,
        t_final: n.t_final,
        external_potential: if p.omega > 0.0 {
            ExternalPotential::harmonic(p.mass, p.omega, 0.0)
        } else {
            ExternalPotential::None
        },
    };
    let reference = cfg.toggles.run_reference.then(|| ReferenceSpec {
        m_points: n.m_grid.expect("resolved"),
        half_width: n.half_width.expect("resolved"),
        continuity: cfg.toggles.run_concealed,
    });
    let grid = GridSpec {
        inertia_regularization: cfg.effective_inertia(),
        ..GridSpec::with_labels(n.n_labels)
    };
    let mut run = Coupled::new(params, &grid, &profile(&cfg), reference).map_err(CliError::Setup)?;
    let resolution = Resolution {
        n_labels: n.n_labels,
        m_grid: run.reference.as_ref().map(|r| r.fields.len()),
        dt: n.dt,
    };
    let exact = Exact::of(&cfg);
    let mut writers = out_dir.map(Writers::create).transpose()?;
    let concealed = cfg.toggles.run_concealed;

    let e0 = run.energy();
    let h0 = e0.h_lagrangian;
    if let Some(w) = &mut writers {
        snapshot(&run, &e0, concealed, w)?;
    }
    let mut metrics = measure(&run, exact.as_ref(), &e0, h0, 0.0);
    let initial_ratio = e0.t_concealed / e0.t_visible;
    let steps = params.n_steps();
    let mut failure = None;
    let mut done = 0;
    for step in 1..=steps {
        if let Err(e) = run.step() {
            failure = Some(e.to_string());
            break;
        }
        done = step;
        if step % n.output_stride == 0 || step == steps {
            let e = run.energy();
            if let Some(w) = &mut writers {
                snapshot(&run, &e, concealed, w)?;
            }
            metrics = measure(&run, exact.as_ref(), &e, h0, metrics.energy_drift);
            if !(metrics.energy_drift.is_finite()) {
                failure = Some(format!("energy became non-finite at t = {}", metrics.t));
                break;
            }
        }
    }
    if let Some(w) = &mut writers {
        w.flush()?;
    }

    let lag = &run.lag;
    let masked = lag.conc.masked.iter().filter(|&&m| m).count();
    let mut notes = vec![
        ("initial_energy".to_string(), format!("{h0:.12e}")),
        (
            "initial_concealed_to_visible_ratio".to_string(),
            format!("{initial_ratio:.6e}"),
        ),
        (
            "masked_labels".to_string(),
            format!("{masked} of {}", lag.fluid.grid.len()),
        ),
    ];
    if let Some(r) = &run.reference {
        let invalid = r.fields.valid.iter().filter(|&&v| !v).count();
        notes.push((
            "masked_grid_length".into(),
            format!("{:.6e}", invalid as f64 * r.fields.dx),
        ));
        notes.push((
            "domain".into(),
            format!("[{}, {}]", r.fields.x[0], r.fields.x[r.fields.len() - 1]),
        ));
    }
    Ok(RunReport {
        scenario: cfg.scenario,
        resolution,
        t_final: n.t_final,
        steps_planned: steps,
        steps_done: done,
        failure,
        metrics,
        tolerance: n.tolerance,
        warnings,
        notes,
    })
}
