//! Lagrangian-picture quantum fluid in one dimension.
//!
//! Labels `a` carry the visible trajectories `q(a,t)`. The motion follows
//! from the discrete Lagrangian
//! `Σ w [½ m q̇² − (ħ²/8m) u² − V(q)]` on the label grid, whose force is
//! the exact gradient of the discrete quantum potential energy. The
//! companion concealed flow `Q(a,t)` is recovered by quadrature.

pub(crate) mod concealed;
mod grid;

pub use concealed::{concealed_momenta, initial_concealed_velocity, ConcealedField};
pub use grid::LabelGrid;

use grid::Extension;

use crate::error::{Error, Result};
use crate::profile::{ExternalPotential, InitialProfile};
use crate::scalar::Real;

/// Physical constants and time stepping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub hbar: T,
    pub mass: T,
    pub dt: T,
    pub t_final: T,
    pub external_potential: ExternalPotential<T>,
}

impl<T: Real> PhysicalParams<T> {
    /// `ħ = m = 1`, free motion.
    pub fn natural(dt: T, t_final: T) -> Self {
        Self {
            hbar: T::one(),
            mass: T::one(),
            dt,
            t_final,
            external_potential: ExternalPotential::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        positive("dt", self.dt)?;
        if !(self.t_final >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("must be non-negative, got {}", self.t_final),
            });
        }
        Ok(())
    }

    /// Number of whole steps needed to reach `t_final`.
    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// Discretization of the label domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub n_labels: usize,
    /// Labels are retained where `ρ₀ ≥ density_floor·max ρ₀`.
    pub density_floor: T,
    /// Ghost labels extend the grid down to `ghost_floor·max ρ₀`.
    pub ghost_floor: T,
    /// Optional cap on the retained half-width around the profile center.
    pub half_width: Option<T>,
    /// `c` in the inertia length `h² = c ħ dt / m`; zero disables it.
    pub inertia_regularization: T,
    pub stencil_accuracy: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn with_labels(n_labels: usize) -> Self {
        Self {
            n_labels,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = self.stencil_accuracy + 2;
        if self.n_labels < min {
            return Err(Error::InvalidParameter {
                name: "n_labels",
                reason: format!("need at least {min} labels, got {}", self.n_labels),
            });
        }
        if !(self.density_floor > T::zero() && self.density_floor < T::one()) {
            return Err(Error::InvalidParameter {
                name: "density_floor",
                reason: format!("must lie in (0, 1), got {}", self.density_floor),
            });
        }
        if !(self.ghost_floor > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "ghost_floor",
                reason: format!("must be positive, got {}", self.ghost_floor),
            });
        }
        if !(self.inertia_regularization >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "inertia_regularization",
                reason: format!("must be non-negative, got {}", self.inertia_regularization),
            });
        }
        if let Some(hw) = self.half_width {
            if !(hw > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "half_width",
                    reason: format!("must be positive, got {hw}"),
                });
            }
        }
        Ok(())
    }
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            n_labels: 1024,
            density_floor: T::lit(1e-8),
            ghost_floor: T::lit(1e-32),
            half_width: None,
            inertia_regularization: T::lit(0.5),
            stencil_accuracy: 8,
        }
    }
}

/// Visible trajectories and their derived fields, one entry per label.
#[derive(Debug, Clone)]
pub struct TrajectoryField<T> {
    pub q: Vec<T>,
    pub qdot: Vec<T>,
    pub jac: Vec<T>,
    pub u: Vec<T>,
    pub u0: Vec<T>,
    pub t: T,
    pub step: usize,
    accel: Vec<T>,
}

impl<T: Real> TrajectoryField<T> {
    pub fn acceleration(&self) -> &[T] {
        &self.accel
    }

    /// Reverses all velocities in place.
    pub fn reverse(&mut self) {
        self.qdot.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Values of the visible Lagrangian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedLagrangian<T> {
    pub t_visible: T,
    pub u_quantum: T,
    pub value: T,
}

/// Quantum-to-classical velocity ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct Classicality<T> {
    /// `(ħ/2m)|u| / max(|q̇|, floor)` per label.
    pub ratio: Vec<T>,
    /// `U_quantum / T_visible`; infinite when nothing moves.
    pub energy_ratio: T,
}

/// Result of a force evaluation on a configuration.
struct Evaluation<T> {
    accel: Vec<T>,
    jac: Vec<T>,
    u: Vec<T>,
}

/// Label-grid solver holding the operators shared by every step.
#[derive(Debug, Clone)]
pub struct QuantumFluid<T> {
    pub params: PhysicalParams<T>,
    pub grid: LabelGrid<T>,
    ext: Extension<T>,
}

/// Everything produced by [`init_scenario`].
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub fluid: QuantumFluid<T>,
    pub traj: TrajectoryField<T>,
    pub conc: ConcealedField<T>,
}

/// Sets up labels, trajectories and the concealed flow for an initial state.
pub fn init_scenario<T: Real>(
    params: PhysicalParams<T>,
    spec: &GridSpec<T>,
    profile: &InitialProfile<T>,
) -> Result<Scenario<T>> {
    params.validate()?;
    let (grid, ext) = grid::build(&params, spec, profile)?;
    let fluid = QuantumFluid { params, grid, ext };
    let traj = fluid.initial_trajectories(profile)?;
    let conc = ConcealedField::new(&fluid, &traj);
    Ok(Scenario { fluid, traj, conc })
}

impl<T: Real> QuantumFluid<T> {
    fn quantum_coefficient(&self) -> T {
        self.params.hbar * self.params.hbar / (T::lit(8.0) * self.params.mass)
    }

    fn initial_trajectories(&self, profile: &InitialProfile<T>) -> Result<TrajectoryField<T>> {
        let q = self.grid.a.clone();
        let qdot = q.iter().map(|&x| profile.velocity(x, self.params.mass)).collect();
        let g = self.ext.d1.apply(&self.ext.log_rho0);
        let mut u0 = self.ext.retained(&g).to_vec();
        // Stencil round-off on a flat density is not a gradient.
        let scale = self
            .ext
            .log_rho0
            .iter()
            .fold(T::zero(), |m, l| m.max(l.abs()))
            .max(T::one());
        let noise = T::lit(100.0) * T::epsilon() * scale / self.grid.da;
        u0.iter_mut().filter(|x| x.abs() < noise).for_each(|x| *x = T::zero());

        let eval = self.evaluate(&q)?;
        Ok(TrajectoryField {
            q,
            qdot,
            jac: eval.jac,
            u: u0.clone(),
            u0,
            t: T::zero(),
            step: 0,
            accel: eval.accel,
        })
    }

    /// `J` and `u` on the extended grid.
    fn kinematics(&self, qe: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let d = &self.ext.d1;
        let jac = d.apply(qe);
        if let Some(e) = jac.iter().position(|j| !(*j > T::zero())) {
            return Err(Error::TrajectoryCrossing {
                label: self.ext.label_of(e),
                value: jac[e].as_f64(),
            });
        }
        let ell: Vec<T> = self.ext.log_rho0.iter().zip(&jac).map(|(&l, &j)| l - j.ln()).collect();
        let g = d.apply(&ell);
        let u = g.iter().zip(&jac).map(|(&g, &j)| g / j).collect();
        Ok((jac, u))
    }

    fn evaluate(&self, q: &[T]) -> Result<Evaluation<T>> {
        let ext = &self.ext;
        let d = &ext.d1;
        let qe = ext.extend(q);
        let (jac, u) = self.kinematics(&qe)?;
        let c = self.quantum_coefficient();
        let ne = qe.len();

        // Reverse sweep of U = c Σ w u² through u = D(ℓ₀ − ln J)/J, J = D q.
        let mut g_bar = vec![T::zero(); ne];
        let mut j_bar = vec![T::zero(); ne];
        for e in 0..ne {
            let u_bar = T::lit(2.0) * c * ext.weights[e] * u[e];
            g_bar[e] = u_bar / jac[e];
            j_bar[e] = -u_bar * u[e] / jac[e];
        }
        let ell_bar = d.apply_transpose(&g_bar);
        for e in 0..ne {
            j_bar[e] -= ell_bar[e] / jac[e];
        }
        let mut q_bar = d.apply_transpose(&j_bar);
        let v = &self.params.external_potential;
        if !v.is_none() {
            for e in 0..ne {
                q_bar[e] += ext.weights[e] * v.gradient(qe[e]);
            }
        }

        let mut accel = ext.restrict(&q_bar);
        accel.iter_mut().for_each(|x| *x = -*x);
        ext.inertia.solve_in_place(&mut accel);
        Ok(Evaluation {
            accel,
            jac: ext.retained(&jac).to_vec(),
            u: ext.retained(&u).to_vec(),
        })
    }

    /// Refreshes `J = ∂q/∂a` and `u = (1/J) ∂_a(log ρ₀ − log J)`.
    pub fn jacobian_and_u(&self, traj: &mut TrajectoryField<T>) -> Result<()> {
        let (jac, u) = self.kinematics(&self.ext.extend(&traj.q))?;
        traj.jac = self.ext.retained(&jac).to_vec();
        traj.u = self.ext.retained(&u).to_vec();
        Ok(())
    }

    /// Force per label driving the visible motion, `m q̈`.
    pub fn quantum_force(&self, traj: &TrajectoryField<T>) -> Result<Vec<T>> {
        let m = self.params.mass;
        Ok(self.evaluate(&traj.q)?.accel.into_iter().map(|a| m * a).collect())
    }

    /// Pointwise `−∂(Q_B + V)/∂q = (ħ²/4m)(u_xx + u u_x) − V'(q)` from nested
    /// stencils. Not used for stepping.
    pub fn bohm_force_direct(&self, traj: &TrajectoryField<T>) -> Result<Vec<T>> {
        let qe = self.ext.extend(&traj.q);
        let (jac, u) = self.kinematics(&qe)?;
        let d = &self.ext.d1;
        let ux: Vec<T> = d.apply(&u).iter().zip(&jac).map(|(&g, &j)| g / j).collect();
        let uxx: Vec<T> = d.apply(&ux).iter().zip(&jac).map(|(&g, &j)| g / j).collect();
        let c = self.params.hbar * self.params.hbar / (T::lit(4.0) * self.params.mass);
        let v = &self.params.external_potential;
        let f: Vec<T> = (0..qe.len())
            .map(|e| c * (uxx[e] + u[e] * ux[e]) - v.gradient(qe[e]))
            .collect();
        Ok(self.ext.retained(&f).to_vec())
    }

    /// One velocity-Verlet step; `J` and `u` are refreshed afterwards.
    pub fn step_visible(&self, traj: &mut TrajectoryField<T>) -> Result<()> {
        let dt = self.params.dt;
        let half = T::lit(0.5) * dt;
        for k in 0..traj.q.len() {
            traj.qdot[k] += half * traj.accel[k];
            traj.q[k] += dt * traj.qdot[k];
        }
        let eval = self.evaluate(&traj.q)?;
        if let Some(k) = eval.accel.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite {
                step: traj.step + 1,
                index: k,
            });
        }
        for k in 0..traj.q.len() {
            traj.qdot[k] += half * eval.accel[k];
        }
        traj.accel = eval.accel;
        traj.jac = eval.jac;
        traj.u = eval.u;
        traj.step += 1;
        traj.t = T::from_usize_lossy(traj.step) * dt;
        Ok(())
    }

    /// Advances trajectories and the concealed flow together by one step.
    pub fn step(&self, traj: &mut TrajectoryField<T>, conc: &mut ConcealedField<T>) -> Result<()> {
        self.step_visible(traj)?;
        conc.advance(traj, self.params.dt);
        Ok(())
    }

    /// `ρ₀/J` on the trajectories.
    pub fn mapped_density(&self, traj: &TrajectoryField<T>) -> Vec<T> {
        self.grid.rho0.iter().zip(&traj.jac).map(|(&r, &j)| r / j).collect()
    }

    /// `Σ w (ħ²/8m) u²`.
    pub fn quantum_potential_energy(&self, traj: &TrajectoryField<T>) -> T {
        let c = self.quantum_coefficient();
        self.grid.integrate(|k| c * traj.u[k] * traj.u[k])
    }

    /// `Σ w ½ m q̇²`.
    pub fn visible_kinetic_energy(&self, traj: &TrajectoryField<T>) -> T {
        let hm = T::lit(0.5) * self.params.mass;
        self.grid.integrate(|k| hm * traj.qdot[k] * traj.qdot[k])
    }

    /// `Σ w V(q)`.
    pub fn external_energy(&self, traj: &TrajectoryField<T>) -> T {
        let v = &self.params.external_potential;
        self.grid.integrate(|k| v.value(traj.q[k]))
    }

    pub fn modified_lagrangian_value(&self, traj: &TrajectoryField<T>) -> ModifiedLagrangian<T> {
        let t_visible = self.visible_kinetic_energy(traj);
        let u_quantum = self.quantum_potential_energy(traj);
        ModifiedLagrangian {
            t_visible,
            u_quantum,
            value: t_visible - u_quantum,
        }
    }

    pub fn classicality(&self, traj: &TrajectoryField<T>, velocity_floor: T) -> Classicality<T> {
        let s = self.params.hbar / (T::lit(2.0) * self.params.mass);
        let ratio = traj
            .u
            .iter()
            .zip(&traj.qdot)
            .map(|(&u, &v)| s * u.abs() / v.abs().max(velocity_floor))
            .collect();
        let l = self.modified_lagrangian_value(traj);
        let energy_ratio = if l.t_visible > T::zero() {
            l.u_quantum / l.t_visible
        } else {
            T::infinity()
        };
        Classicality { ratio, energy_ratio }
    }

    /// Number of ghost labels on the left and right.
    pub fn ghost_counts(&self) -> (usize, usize) {
        (self.ext.n_left, self.ext.len() - self.ext.n_left - self.ext.n)
    }
}

#[cfg(test)]
mod tests;
