//! Planar free particle in polar coordinates, integrated with and without
//! its ignorable angle.

use std::path::Path;

use concealed_core::analytic::PolarFreeMotion;
use concealed_core::integrate::Scheme;
use concealed_core::routh::{integrate_full, integrate_reduced, reconstruct_concealed, reduce, PolarFreeParticle};
use concealed_core::DiscreteState;

use crate::config::{Integrator, ScenarioConfig};
use crate::run::{Metrics, Resolution, RunReport};
use crate::{CliError, Sink};

pub fn simulate(cfg: &ScenarioConfig, out_dir: Option<&Path>, _sink: &mut Sink) -> Result<RunReport, CliError> {
    let p = &cfg.physical;
    let n = &cfg.numerics;
    let exact = PolarFreeMotion {
        r0: p.r0,
        angular_momentum: p.angular_momentum,
    };
    let s0 = DiscreteState {
        q: vec![p.r0],
        qdot: vec![0.0],
        conc: vec![0.0],
        conc_dot: vec![p.angular_momentum / (p.r0 * p.r0)],
        t: 0.0,
    };
    let scheme = match n.integrator {
        Integrator::Rk4 => Scheme::Rk4,
        Integrator::Verlet => Scheme::VelocityVerlet,
    };
    let steps = (n.t_final / n.dt).round() as usize;
    let resolution = Resolution {
        n_labels: 1,
        m_grid: None,
        dt: n.dt,
    };
    let mut report = RunReport {
        scenario: cfg.scenario,
        resolution,
        t_final: n.t_final,
        steps_planned: steps,
        steps_done: 0,
        failure: None,
        metrics: Metrics::default(),
        tolerance: n.tolerance,
        warnings: Vec::new(),
        notes: Vec::new(),
    };

    let red = reduce(PolarFreeParticle, &s0).map_err(CliError::Setup)?;
    let solve = || -> concealed_core::Result<_> {
        let full = integrate_full(&PolarFreeParticle, &s0, n.dt, steps, scheme)?;
        let reduced = integrate_reduced(&red, &s0.q, &s0.qdot, 0.0, n.dt, steps, scheme)?;
        let path: Vec<(f64, Vec<f64>)> = reduced.iter().map(|s| (s.t, s.x.clone())).collect();
        let conc = reconstruct_concealed(&red, &path, &s0.conc)?;
        Ok((full, reduced, conc))
    };
    let (full, reduced, conc) = match solve() {
        Ok(v) => v,
        Err(e) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    report.steps_done = steps;

    let energy = |x: &[f64], v: &[f64]| 0.5 * v[0] * v[0] + 0.5 * x[0] * x[0] * v[1] * v[1];
    let e0 = energy(&full[0].x, &full[0].v);
    let (mut agree, mut q_err, mut th_err, mut th_red_err, mut drift, mut p_drift) =
        (0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    let mut rows = Vec::new();
    for (i, (f, r)) in full.iter().zip(&reduced).enumerate() {
        let t = f.t;
        let (q_exact, th_exact) = (exact.radius(t), exact.angle(t));
        agree = agree.max((f.x[0] - r.x[0]).abs());
        q_err = q_err.max((f.x[0] - q_exact).abs());
        th_err = th_err.max((f.x[1] - s0.conc[0] - th_exact).abs());
        th_red_err = th_red_err.max((conc.conc[i][0] - s0.conc[0] - th_exact).abs());
        drift = drift.max((energy(&f.x, &f.v) - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
        p_drift = p_drift.max((f.x[0] * f.x[0] * f.v[1] - red.momentum[0]).abs());
        if i % n.output_stride == 0 || i == steps {
            rows.push([t, f.x[0], r.x[0], q_exact, f.x[1], conc.conc[i][0], th_exact]);
        }
    }
    if let Some(dir) = out_dir {
        let path = dir.join("routh.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::output(&path, e))?;
        let header = ["t", "q_full", "q_reduced", "q_exact", "Q_full", "Q_reduced", "Q_exact"];
        w.write_record(header).map_err(|e| CliError::output(&path, e))?;
        for r in &rows {
            w.write_record(r.iter().map(|v| crate::num(*v)))
                .map_err(|e| CliError::output(&path, e))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    report.metrics = Metrics {
        t: full.last().map_or(0.0, |s| s.t),
        trajectory_error: Some(q_err),
        concealed_error: Some(th_err),
        energy_drift: drift,
        ..Metrics::default()
    };
    report.notes = vec![
        ("full_vs_reduced_sup".into(), format!("{agree:.6e}")),
        ("reduced_concealed_sup_error".into(), format!("{th_red_err:.6e}")),
        ("concealed_momentum_drift".into(), format!("{p_drift:.6e}")),
        ("concealed_momentum".into(), format!("{:.12e}", red.momentum[0])),
        (
            "final_Q_minus_Q0".into(),
            format!(
                "{:.12e} (arctan law {:.12e})",
                full.last().map_or(0.0, |s| s.x[1]) - s0.conc[0],
                exact.angle(n.t_final)
            ),
        ),
    ];
    Ok(report)
}
