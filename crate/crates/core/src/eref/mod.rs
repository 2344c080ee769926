//! Eulerian reference: Crank–Nicolson Schrödinger solver, polar fields,
//! the concealed continuity equation and the bridge from label fields.

mod bridge;
mod continuity;
mod interp;
mod schrodinger;

pub use bridge::{advect_trace, lagrangian_to_eulerian, MappedFields, TraceBundle, VelocityHistory};
pub use continuity::ConcealedEulerian;
pub use interp::cubic_uniform;
pub use schrodinger::CrankNicolson;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::profile::InitialProfile;
use crate::scalar::Real;
use crate::stencil::DerivativeOperator;

/// Points with `ρ < RHO_MASK·max ρ` carry no velocity or log-gradient.
pub const RHO_MASK: f64 = 1e-14;

/// Wavefunction and its polar fields on a uniform grid with zero walls.
#[derive(Debug, Clone)]
pub struct EulerianFields<T> {
    pub x: Vec<T>,
    pub dx: T,
    pub psi: Vec<Complex<T>>,
    pub rho: Vec<T>,
    /// Probability current `j = (ħ/m) Im(ψ* ψ_x)`.
    pub current: Vec<T>,
    pub v: Vec<T>,
    pub u: Vec<T>,
    /// Whether `v` and `u` are meaningful at each point.
    pub valid: Vec<bool>,
    pub t: T,
    hbar: T,
    mass: T,
    d1: DerivativeOperator<T>,
}

impl<T: Real> EulerianFields<T> {
    /// Samples `profile` on `m_points` points spanning `[x_min, x_max]`.
    pub fn new(x_min: T, x_max: T, m_points: usize, profile: &InitialProfile<T>, hbar: T, mass: T) -> Result<Self> {
        profile.validate()?;
        if !(x_max > x_min) {
            return Err(Error::InvalidParameter {
                name: "domain",
                reason: format!("empty grid [{x_min}, {x_max}]"),
            });
        }
        let dx = (x_max - x_min) / T::from_usize_lossy(m_points.max(2) - 1);
        let d1 = DerivativeOperator::new(m_points, dx, 1, 8)?;
        let x: Vec<T> = (0..m_points).map(|k| x_min + T::from_usize_lossy(k) * dx).collect();
        let mut psi: Vec<Complex<T>> = x.iter().map(|&x| profile.psi(x, hbar, mass)).collect();
        let peak = psi.iter().fold(T::zero(), |m, p| m.max(p.norm_sqr()));
        let edge = psi[0].norm_sqr().max(psi[m_points - 1].norm_sqr());
        if edge > T::lit(1e-3) * peak {
            return Err(Error::DomainTooSmall {
                ratio: (edge / peak).as_f64(),
            });
        }
        psi[0] = Complex::new(T::zero(), T::zero());
        psi[m_points - 1] = Complex::new(T::zero(), T::zero());
        let mut f = Self {
            x,
            dx,
            psi,
            rho: vec![],
            current: vec![],
            v: vec![],
            u: vec![],
            valid: vec![],
            t: T::zero(),
            hbar,
            mass,
            d1,
        };
        let norm = f.norm();
        if !((norm - T::one()).abs() <= T::lit(1e-6)) {
            return Err(Error::NotNormalized {
                integral: norm.as_f64(),
            });
        }
        f.polar_fields();
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    /// `Σ |ψ|² dx` (the walls vanish, so this is also the trapezoid rule).
    pub fn norm(&self) -> T {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<T>() * self.dx
    }

    /// `∂ψ/∂x` by the 8th-order stencil.
    pub fn psi_x(&self) -> Vec<Complex<T>> {
        let re: Vec<T> = self.psi.iter().map(|p| p.re).collect();
        let im: Vec<T> = self.psi.iter().map(|p| p.im).collect();
        let (dre, dim) = (self.d1.apply(&re), self.d1.apply(&im));
        dre.into_iter().zip(dim).map(|(r, i)| Complex::new(r, i)).collect()
    }

    /// Refreshes `ρ = |ψ|²`, `v = j/ρ` and `u = ∂ log ρ/∂x`.
    pub fn polar_fields(&mut self) {
        let n = self.len();
        self.rho = self.psi.iter().map(|p| p.norm_sqr()).collect();
        let peak = self.rho.iter().fold(T::zero(), |m, &r| m.max(r));
        let floor = T::lit(RHO_MASK) * peak;
        self.valid = self.rho.iter().map(|&r| r >= floor && r > T::zero()).collect();
        let dpsi = self.psi_x();
        let s = self.hbar / self.mass;
        self.current = (0..n).map(|k| s * (self.psi[k].conj() * dpsi[k]).im).collect();
        let tiny = T::min_positive_value();
        let log_rho: Vec<T> = self.rho.iter().map(|&r| r.max(tiny).ln()).collect();
        let g = self.d1.apply(&log_rho);
        self.v = vec![T::zero(); n];
        self.u = vec![T::zero(); n];
        for (k, &gk) in g.iter().enumerate() {
            if self.valid[k] {
                self.v[k] = self.current[k] / self.rho[k];
                self.u[k] = gk;
            }
        }
    }

    /// Phase `S` recovered by integrating `m v` from the density peak.
    pub fn phase(&self) -> Vec<T> {
        let n = self.len();
        let k0 = (0..n).fold(0, |b, k| if self.rho[k] > self.rho[b] { k } else { b });
        let mut s = vec![T::zero(); n];
        let h = T::lit(0.5) * self.mass * self.dx;
        for k in k0 + 1..n {
            s[k] = s[k - 1] + h * (self.v[k] + self.v[k - 1]);
        }
        for k in (0..k0).rev() {
            s[k] = s[k + 1] - h * (self.v[k] + self.v[k + 1]);
        }
        s
    }

    /// Index of the grid cell containing `x`, if inside the grid.
    pub fn locate(&self, x: T) -> Option<usize> {
        let r = (x - self.x[0]) / self.dx;
        if !(r >= T::zero()) {
            return None;
        }
        let k = r.floor().to_usize()?;
        (k + 1 < self.len()).then_some(k)
    }
}
