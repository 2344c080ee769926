//! Fixed-step integrators for second-order systems `ẍ = a(x, ẋ)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Velocity-Verlet. For velocity-dependent accelerations the new
    /// acceleration is evaluated at the Euler-predicted velocity, which keeps
    /// second order.
    VelocityVerlet,
    /// Classical fourth-order Runge–Kutta on the first-order form.
    Rk4,
}

/// One sample of an integrated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub x: Vec<T>,
    pub v: Vec<T>,
}

fn check_finite<T: Real>(step: usize, xs: &[T], vs: &[T]) -> Result<()> {
    if let Some(index) = xs.iter().chain(vs).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step, index });
    }
    Ok(())
}

/// Integrates `n_steps` fixed steps from `(x0, v0)` at `t0` and returns all
/// `n_steps + 1` samples including the initial one.
pub fn integrate<T, F>(
    mut accel: F,
    x0: &[T],
    v0: &[T],
    t0: T,
    dt: T,
    n_steps: usize,
    scheme: Scheme,
) -> Result<Vec<Sample<T>>>
where
    T: Real,
    F: FnMut(&[T], &[T]) -> Result<Vec<T>>,
{
    if !(dt > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    if x0.len() != v0.len() {
        return Err(Error::DimensionMismatch {
            context: "velocity vector",
            expected: x0.len(),
            got: v0.len(),
        });
    }
    check_finite(0, x0, v0)?;
    let n = x0.len();
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    out.push(Sample {
        t: t0,
        x: x.clone(),
        v: v.clone(),
    });

    let mut a = match scheme {
        Scheme::VelocityVerlet => accel(&x, &v)?,
        Scheme::Rk4 => Vec::new(),
    };

    for step in 1..=n_steps {
        match scheme {
            Scheme::VelocityVerlet => {
                let mut v_pred = vec![T::zero(); n];
                for i in 0..n {
                    x[i] += dt * v[i] + half * dt * dt * a[i];
                    v_pred[i] = v[i] + dt * a[i];
                }
                let a_new = accel(&x, &v_pred)?;
                for i in 0..n {
                    v[i] += half * dt * (a[i] + a_new[i]);
                }
                a = a_new;
            }
            Scheme::Rk4 => {
                let k1v = accel(&x, &v)?;
                let k1x = v.clone();
                let (x2, v2) = offset(&x, &v, &k1x, &k1v, half * dt);
                let k2v = accel(&x2, &v2)?;
                let k2x = v2;
                let (x3, v3) = offset(&x, &v, &k2x, &k2v, half * dt);
                let k3v = accel(&x3, &v3)?;
                let k3x = v3;
                let (x4, v4) = offset(&x, &v, &k3x, &k3v, dt);
                let k4v = accel(&x4, &v4)?;
                let k4x = v4;
                let sixth = dt / T::lit(6.0);
                let two = T::lit(2.0);
                for i in 0..n {
                    x[i] += sixth * (k1x[i] + two * k2x[i] + two * k3x[i] + k4x[i]);
                    v[i] += sixth * (k1v[i] + two * k2v[i] + two * k3v[i] + k4v[i]);
                }
            }
        }
        check_finite(step, &x, &v)?;
        out.push(Sample {
            t: t0 + dt * T::from_usize_lossy(step),
            x: x.clone(),
            v: v.clone(),
        });
    }
    Ok(out)
}

fn offset<T: Real>(x: &[T], v: &[T], dx: &[T], dv: &[T], h: T) -> (Vec<T>, Vec<T>) {
    (
        x.iter().zip(dx).map(|(a, b)| *a + h * *b).collect(),
        v.iter().zip(dv).map(|(a, b)| *a + h * *b).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_motion_is_exact_for_both_schemes() {
        for scheme in [Scheme::VelocityVerlet, Scheme::Rk4] {
            let path = integrate(
                |x: &[f64], _| Ok(vec![0.0; x.len()]),
                &[0.0],
                &[1.0],
                0.0,
                0.1,
                10,
                scheme,
            )
            .unwrap();
            let last = path.last().unwrap();
            assert!((last.x[0] - 1.0).abs() < 1e-14, "{scheme:?}");
            assert!((last.t - 1.0).abs() < 1e-14);
            assert_eq!(path.len(), 11);
        }
    }

    #[test]
    fn harmonic_oscillator_orders() {
        // x'' = -x, x(0)=1: x(1) = cos 1
        let err = |scheme, n: usize| {
            let dt = 1.0 / n as f64;
            let p = integrate(|x: &[f64], _| Ok(vec![-x[0]]), &[1.0], &[0.0], 0.0, dt, n, scheme).unwrap();
            (p.last().unwrap().x[0] - 1f64.cos()).abs()
        };
        let r_verlet = err(Scheme::VelocityVerlet, 50) / err(Scheme::VelocityVerlet, 100);
        let r_rk4 = err(Scheme::Rk4, 50) / err(Scheme::Rk4, 100);
        assert!((r_verlet - 4.0).abs() < 0.2, "{r_verlet}");
        assert!((r_rk4 - 16.0).abs() < 1.0, "{r_rk4}");
    }

    #[test]
    fn damped_oscillator_verlet_is_second_order() {
        // velocity-dependent: x'' = -x - 0.3 x'
        let run = |n: usize| {
            let dt = 2.0 / n as f64;
            integrate(
                |x: &[f64], v: &[f64]| Ok(vec![-x[0] - 0.3 * v[0]]),
                &[1.0],
                &[0.0],
                0.0,
                dt,
                n,
                Scheme::VelocityVerlet,
            )
            .unwrap()
            .last()
            .unwrap()
            .x[0]
        };
        let (a, b, c) = (run(100), run(200), run(400));
        let order = ((a - b) / (b - c)).log2();
        assert!((order - 2.0).abs() < 0.1, "{order}");
    }

    #[test]
    fn rejects_nonpositive_dt_and_reports_nonfinite_step() {
        assert!(integrate(|_: &[f64], _| Ok(vec![0.0]), &[0.0], &[0.0], 0.0, 0.0, 1, Scheme::Rk4).is_err());
        let err = integrate(
            |x: &[f64], _| Ok(vec![if x[0] > 0.25 { f64::NAN } else { 0.0 }]),
            &[0.0],
            &[1.0],
            0.0,
            0.1,
            10,
            Scheme::Rk4,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { step: 3, .. }), "{err:?}");
    }
}
