use crate::error::{Error, Result};
use crate::qlag::concealed::regularized_ratio;
use crate::scalar::Real;

use super::EulerianFields;

/// `|u| ≤ U_MASK·max|u|` hides `V = W u²`.
const U_MASK: f64 = 1e-6;
const MAX_COURANT: f64 = 0.9;

/// Transported density `W = V/u²` of the concealed Eulerian velocity `V`.
#[derive(Debug, Clone)]
pub struct ConcealedEulerian<T> {
    pub w: Vec<T>,
    pub t: T,
}

/// Face averages of `v`; zero where either neighbour is unresolved.
fn face_velocities<T: Real>(fields: &EulerianFields<T>) -> Vec<T> {
    (0..fields.len() - 1)
        .map(|i| {
            if fields.valid[i] && fields.valid[i + 1] {
                T::lit(0.5) * (fields.v[i] + fields.v[i + 1])
            } else {
                T::zero()
            }
        })
        .collect()
}

fn courant<T: Real>(face_v: &[T], dx: T, dt: T) -> T {
    dt * face_v.iter().fold(T::zero(), |m, v| m.max(v.abs())) / dx
}

impl<T: Real> ConcealedEulerian<T> {
    /// `W(x,0) = Q̇₀(x)/u₀(x)² = (ħ/2m)/u₀(x)`, interpolated across zeros of `u₀`.
    pub fn new(fields: &EulerianFields<T>) -> Self {
        let (w, _) = regularized_ratio(fields.hbar(), fields.mass(), &fields.u);
        Self { w, t: fields.t }
    }

    /// One donor-cell step of `∂ₜW + ∂ₓ(W v) = 0` with the velocity of `fields`.
    pub fn step(&mut self, fields: &EulerianFields<T>, dt: T) -> Result<()> {
        let face_v = face_velocities(fields);
        let courant = courant(&face_v, fields.dx, dt);
        if courant > T::lit(MAX_COURANT) {
            return Err(Error::Cfl {
                courant: courant.as_f64(),
            });
        }
        self.donor_cell(&face_v, fields.dx, dt);
        Ok(())
    }

    /// Advances by `dt` in as many equal substeps as the Courant limit
    /// needs, holding the velocity of `fields` fixed. Returns the count.
    pub fn advance(&mut self, fields: &EulerianFields<T>, dt: T) -> Result<usize> {
        let face_v = face_velocities(fields);
        let c = courant(&face_v, fields.dx, dt);
        let subs = (c / T::lit(MAX_COURANT)).ceil().to_usize().unwrap_or(0).max(1);
        if subs > 1_000_000 {
            return Err(Error::Cfl { courant: c.as_f64() });
        }
        let h = dt / T::from_usize_lossy(subs);
        for _ in 0..subs {
            self.donor_cell(&face_v, fields.dx, h);
        }
        Ok(subs)
    }

    fn donor_cell(&mut self, face_v: &[T], dx: T, dt: T) {
        let n = self.w.len();
        let flux: Vec<T> = face_v
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v > T::zero() {
                    v * self.w[i]
                } else {
                    v * self.w[i + 1]
                }
            })
            .collect();
        let r = dt / dx;
        for i in 0..n {
            let right = if i + 1 < n { flux[i] } else { T::zero() };
            let left = if i > 0 { flux[i - 1] } else { T::zero() };
            self.w[i] -= r * (right - left);
        }
        self.t += dt;
    }

    /// `V = W u²` where `u` is resolved; `None` elsewhere.
    pub fn velocity(&self, fields: &EulerianFields<T>) -> Vec<Option<T>> {
        let peak = (0..fields.len())
            .filter(|&k| fields.valid[k])
            .fold(T::zero(), |m, k| m.max(fields.u[k].abs()));
        (0..fields.len())
            .map(|k| {
                let u = fields.u[k];
                (fields.valid[k] && u.abs() > T::lit(U_MASK) * peak).then(|| self.w[k] * u * u)
            })
            .collect()
    }
}
