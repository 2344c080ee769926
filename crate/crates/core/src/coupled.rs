//! Lockstep driver: label fluid, Schrödinger reference and concealed
//! continuity advanced with one shared time step.

use crate::energy::EnergyReport;
use crate::eref::{lagrangian_to_eulerian, ConcealedEulerian, CrankNicolson, EulerianFields, MappedFields};
use crate::error::{Error, Result};
use crate::profile::InitialProfile;
use crate::qlag::{init_scenario, GridSpec, PhysicalParams, Scenario};
use crate::scalar::Real;

/// Eulerian grid settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec<T> {
    pub m_points: usize,
    /// Margin added on both sides of the span swept by the packet center.
    pub half_width: T,
    pub continuity: bool,
}

#[derive(Debug, Clone)]
pub struct Reference<T> {
    pub fields: EulerianFields<T>,
    pub cn: CrankNicolson<T>,
    pub continuity: Option<ConcealedEulerian<T>>,
}

#[derive(Debug, Clone)]
pub struct Coupled<T> {
    pub lag: Scenario<T>,
    pub reference: Option<Reference<T>>,
}

impl<T: Real> Coupled<T> {
    pub fn new(
        params: PhysicalParams<T>,
        grid: &GridSpec<T>,
        profile: &InitialProfile<T>,
        reference: Option<ReferenceSpec<T>>,
    ) -> Result<Self> {
        let lag = init_scenario(params, grid, profile)?;
        let reference = match reference {
            None => None,
            Some(spec) => {
                if spec.m_points < 16 {
                    return Err(Error::InvalidParameter {
                        name: "m_grid",
                        reason: format!("need at least 16 grid points, got {}", spec.m_points),
                    });
                }
                let c = profile.center();
                let drift = profile.velocity(c, params.mass) * params.t_final;
                let (lo, hi) = (c.min(c + drift) - spec.half_width, c.max(c + drift) + spec.half_width);
                let fields = EulerianFields::new(lo, hi, spec.m_points, profile, params.hbar, params.mass)?;
                let cn = CrankNicolson::new(&fields, &params.external_potential, params.dt)?;
                let continuity = spec.continuity.then(|| ConcealedEulerian::new(&fields));
                Some(Reference { fields, cn, continuity })
            }
        };
        Ok(Self { lag, reference })
    }

    pub fn t(&self) -> T {
        self.lag.traj.t
    }

    pub fn step(&mut self) -> Result<()> {
        let lag = &mut self.lag;
        lag.fluid.step(&mut lag.traj, &mut lag.conc)?;
        if let Some(r) = &mut self.reference {
            if let Some(w) = &mut r.continuity {
                w.advance(&r.fields, r.cn.dt())?;
            }
            r.cn.step(&mut r.fields)?;
        }
        Ok(())
    }

    pub fn energy(&self) -> EnergyReport<T> {
        let lag = &self.lag;
        let report = EnergyReport::new(&lag.fluid, &lag.traj, &lag.conc);
        match &self.reference {
            Some(r) => report.with_reference(&r.fields, &lag.fluid.params.external_potential),
            None => report,
        }
    }

    /// Label fields mapped onto the Eulerian grid.
    pub fn mapped(&self) -> Option<Result<MappedFields<T>>> {
        let r = self.reference.as_ref()?;
        let lag = &self.lag;
        let qdot = lag.conc.velocity(&lag.traj);
        Some(lagrangian_to_eulerian(&lag.fluid.grid, &lag.traj, &qdot, &r.fields.x))
    }
}

impl<T: Real> Coupled<T> {
    /// `‖ρ₀/J − |ψ|²‖₂` over grid points covered by the trajectories.
    pub fn density_l2(&self) -> Option<Result<T>> {
        let r = self.reference.as_ref()?;
        Some(self.mapped()?.map(|m| {
            let s: T = m
                .rho
                .iter()
                .zip(&r.fields.rho)
                .filter_map(|(a, &b)| a.map(|a| (a - b) * (a - b)))
                .sum();
            (s * r.fields.dx).sqrt()
        }))
    }

    /// Relative `ρ₀`-weighted L² deviation of `u₀² J W(q(a,t))` from `Q̇₀(a)`,
    /// i.e. of `J·W` from its initial value along each trajectory.
    pub fn continuity_invariance_error(&self) -> Option<T> {
        let r = self.reference.as_ref()?;
        let w = r.continuity.as_ref()?;
        let lag = &self.lag;
        let (x0, dx) = (r.fields.x[0], r.fields.dx);
        let (mut num, mut den) = (T::zero(), T::zero());
        for k in 0..lag.traj.q.len() {
            let Some(wk) = crate::eref::cubic_uniform(&w.w, x0, dx, lag.traj.q[k], |_| true) else {
                continue;
            };
            let u0 = lag.traj.u0[k];
            let target = lag.conc.qdot0[k];
            let d = u0 * u0 * lag.traj.jac[k] * wk - target;
            let weight = lag.fluid.grid.weights[k];
            num += weight * d * d;
            den += weight * target * target;
        }
        (den > T::zero()).then(|| (num / den).sqrt())
    }

    /// Relative L² gap between `V` from the continuity solve and `V` mapped
    /// from the labels, over points where both exist.
    pub fn concealed_velocity_discrepancy(&self) -> Option<Result<T>> {
        let r = self.reference.as_ref()?;
        let w = r.continuity.as_ref()?;
        let from_w = w.velocity(&r.fields);
        Some(self.mapped()?.map(|m| {
            let (mut num, mut den) = (T::zero(), T::zero());
            for (a, b) in from_w.iter().zip(&m.concealed_velocity) {
                if let (Some(a), Some(b)) = (a, b) {
                    num += (*a - *b) * (*a - *b);
                    den += *b * *b;
                }
            }
            if den > T::zero() {
                (num / den).sqrt()
            } else {
                T::zero()
            }
        }))
    }
}
