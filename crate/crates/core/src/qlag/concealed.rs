use crate::scalar::Real;

use super::{QuantumFluid, TrajectoryField};

/// Labels with `|u₀| ≤ MASK·max|u₀|` get an interpolated ratio.
const MASK: f64 = 1e-6;

/// Concealed companion flow, carried on the same labels as the visible one.
#[derive(Debug, Clone)]
pub struct ConcealedField<T> {
    pub q0: Vec<T>,
    /// `Q̇₀ = (ħ/2m) u₀`.
    pub qdot0: Vec<T>,
    /// `P = m ρ₀ Q̇₀`, fixed for the whole run.
    pub momentum: Vec<T>,
    /// `I(a,t) = ∫₀ᵗ u² dt'`.
    pub integral: Vec<T>,
    pub q: Vec<T>,
    /// `R = Q̇₀ / u₀²`, interpolated where `u₀` vanishes.
    pub ratio: Vec<T>,
    /// Labels whose ratio was interpolated.
    pub masked: Vec<bool>,
    u_sq: Vec<T>,
}

/// `Q̇₀ = (ħ/2m) u₀`.
pub fn initial_concealed_velocity<T: Real>(hbar: T, mass: T, u0: &[T]) -> Vec<T> {
    let s = hbar / (T::lit(2.0) * mass);
    u0.iter().map(|&u| s * u).collect()
}

/// `P = m ρ₀ Q̇₀`.
pub fn concealed_momenta<T: Real>(mass: T, rho0: &[T], qdot0: &[T]) -> Vec<T> {
    rho0.iter().zip(qdot0).map(|(&r, &v)| mass * r * v).collect()
}

pub(crate) fn regularized_ratio<T: Real>(hbar: T, mass: T, u0: &[T]) -> (Vec<T>, Vec<bool>) {
    let s = hbar / (T::lit(2.0) * mass);
    let peak = u0.iter().fold(T::zero(), |m, u| m.max(u.abs()));
    let masked: Vec<bool> = u0
        .iter()
        .map(|u| !(peak > T::zero()) || u.abs() <= T::lit(MASK) * peak)
        .collect();
    let mut ratio: Vec<T> = u0
        .iter()
        .zip(&masked)
        .map(|(&u, &m)| if m { T::zero() } else { s / u })
        .collect();
    let n = u0.len();
    let mut k = 0;
    while k < n {
        if !masked[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && masked[k] {
            k += 1;
        }
        let left = start.checked_sub(1);
        let right = (k < n).then_some(k);
        for j in start..k {
            ratio[j] = match (left, right) {
                (Some(l), Some(r)) => {
                    let f = T::from_usize_lossy(j - l) / T::from_usize_lossy(r - l);
                    ratio[l] + f * (ratio[r] - ratio[l])
                }
                (Some(l), None) => ratio[l],
                (None, Some(r)) => ratio[r],
                (None, None) => T::zero(),
            };
        }
    }
    (ratio, masked)
}

impl<T: Real> ConcealedField<T> {
    /// Initial concealed flow with `Q₀(a) = a`.
    pub fn new(fluid: &QuantumFluid<T>, traj: &TrajectoryField<T>) -> Self {
        let p = &fluid.params;
        let qdot0 = initial_concealed_velocity(p.hbar, p.mass, &traj.u0);
        let momentum = concealed_momenta(p.mass, &fluid.grid.rho0_concealed, &qdot0);
        let (ratio, masked) = regularized_ratio(p.hbar, p.mass, &traj.u0);
        let q0 = fluid.grid.a.clone();
        Self {
            q: q0.clone(),
            q0,
            qdot0,
            momentum,
            integral: vec![T::zero(); traj.u.len()],
            ratio,
            masked,
            u_sq: traj.u.iter().map(|&u| u * u).collect(),
        }
    }

    /// Replaces the initial concealed positions, keeping the accumulated
    /// displacement.
    pub fn with_origin(mut self, q0: Vec<T>) -> Self {
        assert_eq!(q0.len(), self.q0.len());
        for ((q, &old), &new) in self.q.iter_mut().zip(&self.q0).zip(&q0) {
            *q = new + (*q - old);
        }
        self.q0 = q0;
        self
    }

    /// Accumulates `I` by the trapezoid rule and sets `Q = Q₀ + R I`.
    pub fn advance(&mut self, traj: &TrajectoryField<T>, dt: T) {
        let half = T::lit(0.5) * dt;
        for k in 0..self.q.len() {
            let u2 = traj.u[k] * traj.u[k];
            self.integral[k] += half * (self.u_sq[k] + u2);
            self.u_sq[k] = u2;
            self.q[k] = self.q0[k] + self.ratio[k] * self.integral[k];
        }
    }

    /// `Q̇ = R u²`.
    pub fn velocity(&self, traj: &TrajectoryField<T>) -> Vec<T> {
        self.ratio.iter().zip(&traj.u).map(|(&r, &u)| r * u * u).collect()
    }

    /// `m ρ₀ (u₀²/u²) Q̇`, which should reproduce `P`.
    pub fn momentum_check(&self, fluid: &QuantumFluid<T>, traj: &TrajectoryField<T>) -> Vec<T> {
        let m = fluid.params.mass;
        let qdot = self.velocity(traj);
        (0..qdot.len())
            .map(|k| {
                let u2 = traj.u[k] * traj.u[k];
                if u2 > T::zero() {
                    m * fluid.grid.rho0_concealed[k] * traj.u0[k] * traj.u0[k] / u2 * qdot[k]
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}
