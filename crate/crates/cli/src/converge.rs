//! Refinement studies: the same scenario at several resolutions, with
//! observed orders from successive error ratios.

use std::path::Path;

use crate::config::ScenarioConfig;
use crate::run::{resolve, simulate, Metrics, Resolution, RunReport};
use crate::{CliError, Sink};

/// Config at refinement factor `k`: label spacing, grid spacing and time
/// step all divided by `k`, with the output stride kept at the same times.
pub fn refine(cfg: &ScenarioConfig, k: usize) -> ScenarioConfig {
    let mut out = cfg.clone();
    let n = &mut out.numerics;
    n.n_labels = (n.n_labels - 1) * k + 1;
    n.m_grid = n.m_grid.map(|m| (m - 1) * k + 1);
    n.dt /= k as f64;
    n.output_stride *= k;
    out
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub levels: Vec<usize>,
    pub reports: Vec<RunReport>,
}

type Column = (&'static str, fn(&Metrics) -> Option<f64>);

const COLUMNS: [Column; 6] = [
    ("trajectory_error", |m| m.trajectory_error),
    ("density_l2", |m| m.density_l2),
    ("energy_drift", |m| Some(m.energy_drift)),
    ("concealed_error", |m| m.concealed_error),
    ("continuity_error", |m| m.continuity_error),
    ("concealed_velocity_gap", |m| m.concealed_velocity_gap),
];

fn order(coarse: Option<f64>, fine: Option<f64>, ratio: f64) -> Option<f64> {
    match (coarse, fine) {
        (Some(c), Some(f)) if c > 0.0 && f > 0.0 => Some((c / f).ln() / ratio.ln()),
        _ => None,
    }
}

impl ConvergenceTable {
    pub fn failed(&self) -> Option<&RunReport> {
        self.reports.iter().find(|r| r.failed())
    }

    /// Observed order of each column between consecutive levels.
    pub fn orders(&self) -> Vec<(&'static str, Vec<Option<f64>>)> {
        COLUMNS
            .iter()
            .map(|(name, get)| {
                let orders = self
                    .reports
                    .windows(2)
                    .zip(self.levels.windows(2))
                    .map(|(r, k)| order(get(&r[0].metrics), get(&r[1].metrics), k[1] as f64 / k[0] as f64))
                    .collect();
                (*name, orders)
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4e}"));
        let mut s = String::new();
        if let Some(r) = self.reports.first() {
            s += &format!("scenario = {}\nt_final = {}\n", r.scenario, r.t_final);
        }
        s += "\n# errors per level\n";
        s += &format!("{:<6} {:<30}", "level", "resolution");
        for (name, _) in COLUMNS {
            s += &format!(" {name:>22}");
        }
        s += "\n";
        for (k, r) in self.levels.iter().zip(&self.reports) {
            s += &format!("{:<6} {:<30}", format!("x{k}"), r.resolution.to_string());
            for (_, get) in COLUMNS {
                s += &format!(" {:>22}", fmt(get(&r.metrics)));
            }
            if let Some(e) = &r.failure {
                s += &format!("  FAILED: {e}");
            }
            s += "\n";
        }
        s += "\n# observed orders between consecutive levels\n";
        for (name, orders) in self.orders() {
            let cells: Vec<String> = orders
                .iter()
                .map(|o| o.map_or("n/a".into(), |o| format!("{o:.3}")))
                .collect();
            s += &format!("{name:<24} {}\n", cells.join("  "));
        }
        s
    }

    fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::output(path, e))?;
        let mut header = vec!["level", "n_labels", "m_grid", "dt"];
        header.extend(COLUMNS.iter().map(|(n, _)| *n));
        w.write_record(&header).map_err(|e| CliError::output(path, e))?;
        for (k, r) in self.levels.iter().zip(&self.reports) {
            let Resolution { n_labels, m_grid, dt } = r.resolution;
            let mut rec = vec![
                k.to_string(),
                n_labels.to_string(),
                m_grid.map_or("NaN".into(), |m| m.to_string()),
                crate::num(dt),
            ];
            rec.extend(
                COLUMNS
                    .iter()
                    .map(|(_, get)| crate::num(get(&r.metrics).unwrap_or(f64::NAN))),
            );
            w.write_record(&rec).map_err(|e| CliError::output(path, e))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Runs every refinement level, each on its own thread.
pub fn converge(cfg: &ScenarioConfig, out_dir: Option<&Path>, sink: &mut Sink) -> Result<ConvergenceTable, CliError> {
    let (base, warnings) = resolve(cfg);
    for w in &warnings {
        sink.warn(w);
    }
    let levels = cfg.toggles.convergence_levels.clone();
    let quiet = Sink { quiet: true };
    let results: Vec<Result<RunReport, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&k| {
                let level = refine(&base, k);
                scope.spawn(move || simulate(&level, None, &mut quiet.clone()))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("refinement thread panicked"))
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let table = ConvergenceTable { levels, reports };
    if let Some(dir) = out_dir {
        table.write_csv(&dir.join("convergence.csv"))?;
        let path = dir.join("report.txt");
        std::fs::write(&path, table.render()).map_err(|e| CliError::output(&path, e))?;
    }
    Ok(table)
}
