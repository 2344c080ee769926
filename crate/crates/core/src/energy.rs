//! Energy bookkeeping in the Lagrangian, Eulerian and operator pictures.

use num_complex::Complex;

use crate::eref::EulerianFields;
use crate::profile::ExternalPotential;
use crate::qlag::{ConcealedField, QuantumFluid, TrajectoryField};
use crate::scalar::Real;

/// Energies at one instant. The Eulerian and operator values exist only
/// when a wavefunction is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    pub t: T,
    pub t_visible: T,
    pub t_concealed: T,
    pub v_external: T,
    pub h_lagrangian: T,
    pub h_eulerian: Option<T>,
    pub h_operator: Option<T>,
    pub h_metric: T,
}

impl<T: Real> EnergyReport<T> {
    pub fn new(fluid: &QuantumFluid<T>, traj: &TrajectoryField<T>, conc: &ConcealedField<T>) -> Self {
        let (t_visible, t_concealed) = energy_lagrangian(fluid, traj, conc);
        let v_external = fluid.external_energy(traj);
        Self {
            t: traj.t,
            t_visible,
            t_concealed,
            v_external,
            h_lagrangian: t_visible + t_concealed + v_external,
            h_eulerian: None,
            h_operator: None,
            h_metric: energy_metric(fluid, traj, conc) + v_external,
        }
    }

    /// Adds the wavefunction-based totals.
    pub fn with_reference(mut self, fields: &EulerianFields<T>, potential: &ExternalPotential<T>) -> Self {
        self.h_eulerian = Some(energy_eulerian(fields, potential));
        self.h_operator = Some(energy_operator(fields, potential).value);
        self
    }

    /// Largest pairwise difference among the available totals.
    pub fn max_disagreement(&self) -> T {
        let h: Vec<T> = [
            Some(self.h_lagrangian),
            self.h_eulerian,
            self.h_operator,
            Some(self.h_metric),
        ]
        .into_iter()
        .flatten()
        .collect();
        let mut worst = T::zero();
        for i in 0..h.len() {
            for j in 0..i {
                worst = worst.max((h[i] - h[j]).abs());
            }
        }
        worst
    }
}

/// `(Σ w ½ m q̇², Σ w ½ m (u₀²/u²) Q̇²)`, the second written as
/// `Σ w ½ m u₀² R² u²` so that zeros of `u` contribute their limit.
pub fn energy_lagrangian<T: Real>(
    fluid: &QuantumFluid<T>,
    traj: &TrajectoryField<T>,
    conc: &ConcealedField<T>,
) -> (T, T) {
    let hm = T::lit(0.5) * fluid.params.mass;
    let g = &fluid.grid;
    let t_vis = g.integrate(|k| hm * traj.qdot[k] * traj.qdot[k]);
    let t_conc = g.integrate(|k| {
        let r = conc.ratio[k] * traj.u0[k] * traj.u[k];
        hm * r * r
    });
    (t_vis, t_conc)
}

/// `Σ w ½ m ξ̇ᵀ g ξ̇` with `ξ̇ = (q̇, Q̇)` and `g = diag(1, u₀²/u²)`.
pub fn energy_metric<T: Real>(fluid: &QuantumFluid<T>, traj: &TrajectoryField<T>, conc: &ConcealedField<T>) -> T {
    let qdot_c = conc.velocity(traj);
    let hm = T::lit(0.5) * fluid.params.mass;
    fluid.grid.integrate(|k| {
        let u2 = traj.u[k] * traj.u[k];
        let metric = [
            [T::one(), T::zero()],
            [
                T::zero(),
                if u2 > T::zero() {
                    traj.u0[k] * traj.u0[k] / u2
                } else {
                    T::zero()
                },
            ],
        ];
        let xi = [traj.qdot[k], qdot_c[k]];
        let mut s = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                s += xi[i] * metric[i][j] * xi[j];
            }
        }
        hm * s
    })
}

/// `∫ [½ m ρ v² + (ħ²/8m) ρ u² + ρ V] dx`, with `ρv² = j²/ρ`.
pub fn energy_eulerian<T: Real>(fields: &EulerianFields<T>, potential: &ExternalPotential<T>) -> T {
    let (hbar, m) = (fields.hbar(), fields.mass());
    let c = hbar * hbar / (T::lit(8.0) * m);
    let half_m = T::lit(0.5) * m;
    let sum: T = (0..fields.len())
        .map(|k| {
            let rho = fields.rho[k];
            let dynamic = if fields.valid[k] {
                half_m * fields.current[k] * fields.current[k] / rho + c * rho * fields.u[k] * fields.u[k]
            } else {
                T::zero()
            };
            dynamic + rho * potential.value(fields.x[k])
        })
        .sum();
    sum * fields.dx
}

/// `⟨ψ|H|ψ⟩` in integrated-by-parts form, with the second-derivative form
/// kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorEnergy<T> {
    /// `(ħ²/2m) ∫|ψ_x|² + ∫ V|ψ|²`.
    pub value: T,
    /// `∫ ψ* (−(ħ²/2m)ψ_xx + Vψ)`; its imaginary part measures round-off.
    pub second_derivative_form: Complex<T>,
}

pub fn energy_operator<T: Real>(fields: &EulerianFields<T>, potential: &ExternalPotential<T>) -> OperatorEnergy<T> {
    let (hbar, m) = (fields.hbar(), fields.mass());
    let c = hbar * hbar / (T::lit(2.0) * m);
    let n = fields.len();
    let psi = &fields.psi;
    let v: Vec<T> = fields.x.iter().map(|&x| potential.value(x)).collect();
    let dpsi = fields.psi_x();
    let pot: T = (0..n).map(|k| v[k] * psi[k].norm_sqr()).sum::<T>() * fields.dx;
    let kin: T = dpsi.iter().map(|d| d.norm_sqr()).sum::<T>() * fields.dx;

    let inv = T::one() / (fields.dx * fields.dx);
    let mut second = Complex::new(T::zero(), T::zero());
    for k in 1..n - 1 {
        let lap = (psi[k - 1] + psi[k + 1] - psi[k] * T::lit(2.0)) * inv;
        second += psi[k].conj() * (lap * (-c) + psi[k] * v[k]);
    }
    OperatorEnergy {
        value: c * kin + pot,
        second_derivative_form: second * fields.dx,
    }
}
