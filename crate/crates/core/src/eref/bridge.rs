use crate::error::{Error, Result};
use crate::qlag::{LabelGrid, TrajectoryField};
use crate::scalar::Real;

use super::{cubic_uniform, EulerianFields};

/// Label fields carried to fixed points `x`; `None` outside the span of
/// the trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedFields<T> {
    pub label: Vec<Option<T>>,
    pub rho: Vec<Option<T>>,
    pub concealed_velocity: Vec<Option<T>>,
}

/// Inverts `q(a) = x` and maps `ρ = ρ₀/J` and `V = Q̇/J` onto `x`.
pub fn lagrangian_to_eulerian<T: Real>(
    grid: &LabelGrid<T>,
    traj: &TrajectoryField<T>,
    concealed_velocity: &[T],
    x: &[T],
) -> Result<MappedFields<T>> {
    let q = &traj.q;
    let n = q.len();
    if let Some(k) = (1..n).find(|&k| !(q[k] > q[k - 1])) {
        return Err(Error::TrajectoryCrossing {
            label: k,
            value: (q[k] - q[k - 1]).as_f64(),
        });
    }
    let log_rho: Vec<T> = (0..n).map(|k| grid.log_rho0[k] - traj.jac[k].ln()).collect();
    let v: Vec<T> = (0..n).map(|k| concealed_velocity[k] / traj.jac[k]).collect();
    let one = T::one();
    let at = |f: &[T], r: T| cubic_uniform(f, T::zero(), one, r, |_| true);

    let mut out = MappedFields {
        label: Vec::with_capacity(x.len()),
        rho: Vec::with_capacity(x.len()),
        concealed_velocity: Vec::with_capacity(x.len()),
    };
    for &xi in x {
        let r = if xi < q[0] || xi > q[n - 1] {
            None
        } else {
            let k = q.partition_point(|&qk| qk <= xi).clamp(1, n - 1) - 1;
            Some(invert_cell(q, k, xi))
        };
        out.label.push(r.map(|r| grid.a[0] + r * grid.da));
        out.rho.push(r.and_then(|r| at(&log_rho, r)).map(|l| l.exp()));
        out.concealed_velocity.push(r.and_then(|r| at(&v, r)));
    }
    Ok(out)
}

/// Fractional label index `r ∈ [k, k+1]` with `q(r) = x`, by bisection on
/// the local cubic.
fn invert_cell<T: Real>(q: &[T], k: usize, x: T) -> T {
    let f = |r: T| cubic_uniform(q, T::zero(), T::one(), r, |_| true).unwrap_or(x) - x;
    let (mut lo, mut hi) = (T::from_usize_lossy(k), T::from_usize_lossy(k + 1));
    let mut f_lo = f(lo);
    if f_lo == T::zero() {
        return lo;
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    T::lit(0.5) * (lo + hi)
}

/// Eulerian velocity snapshots on a fixed grid.
#[derive(Debug, Clone, Default)]
pub struct VelocityHistory<T> {
    pub x0: T,
    pub dx: T,
    pub times: Vec<T>,
    pub v: Vec<Vec<T>>,
    pub valid: Vec<Vec<bool>>,
}

impl<T: Real> VelocityHistory<T> {
    pub fn new(x0: T, dx: T) -> Self {
        Self {
            x0,
            dx,
            times: vec![],
            v: vec![],
            valid: vec![],
        }
    }

    pub fn push(&mut self, fields: &EulerianFields<T>) {
        self.times.push(fields.t);
        self.v.push(fields.v.clone());
        self.valid.push(fields.valid.clone());
    }

    fn sample(&self, n: usize, x: T) -> Option<T> {
        let ok = &self.valid[n];
        cubic_uniform(&self.v[n], self.x0, self.dx, x, |k| ok[k])
    }
}

/// Integral curves of a velocity history.
#[derive(Debug, Clone)]
pub struct TraceBundle<T> {
    pub t: Vec<T>,
    /// `paths[i][n]` is label `i` at `t[n]`.
    pub paths: Vec<Vec<T>>,
    /// Labels that left the resolved part of the grid.
    pub escaped: Vec<bool>,
}

/// RK4 on `dq/dt = v(q,t)`, cubic in `x` and linear in `t`.
pub fn advect_trace<T: Real>(history: &VelocityHistory<T>, labels: &[T]) -> TraceBundle<T> {
    let steps = history.times.len();
    let mut paths = Vec::with_capacity(labels.len());
    let mut escaped = vec![false; labels.len()];
    let half = T::lit(0.5);
    for (i, &a) in labels.iter().enumerate() {
        let mut path = Vec::with_capacity(steps);
        let mut q = a;
        path.push(q);
        for n in 0..steps.saturating_sub(1) {
            let h = history.times[n + 1] - history.times[n];
            let at = |x: T, s: T| -> Option<T> {
                let v0 = history.sample(n, x)?;
                let v1 = history.sample(n + 1, x)?;
                Some(v0 + s * (v1 - v0))
            };
            let step = (|| {
                let k1 = at(q, T::zero())?;
                let k2 = at(q + half * h * k1, half)?;
                let k3 = at(q + half * h * k2, half)?;
                let k4 = at(q + h * k3, T::one())?;
                Some(q + h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4))
            })();
            match step {
                Some(next) if !escaped[i] => q = next,
                _ => escaped[i] = true,
            }
            path.push(q);
        }
        paths.push(path);
    }
    TraceBundle {
        t: history.times.clone(),
        paths,
        escaped,
    }
}
