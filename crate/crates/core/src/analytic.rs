//! Closed-form solutions used as references for the numerical solvers.

use crate::scalar::Real;

/// Width of a free Gaussian: `σ(t) = σ₀√(1 + (ħt/2mσ₀²)²)`.
pub fn spreading_width<T: Real>(sigma0: T, hbar: T, mass: T, t: T) -> T {
    let beta = hbar / (T::lit(2.0) * mass * sigma0 * sigma0);
    sigma0 * (T::one() + beta * beta * t * t).sqrt()
}

/// `dσ/dt` for the free Gaussian.
pub fn spreading_rate<T: Real>(sigma0: T, hbar: T, mass: T, t: T) -> T {
    let beta = hbar / (T::lit(2.0) * mass * sigma0 * sigma0);
    sigma0 * beta * beta * t / (T::one() + beta * beta * t * t).sqrt()
}

/// Free Gaussian packet with initial center `center`, width `sigma0` and
/// momentum `momentum`.
#[derive(Debug, Clone, Copy)]
pub struct FreeGaussian<T> {
    pub center: T,
    pub sigma0: T,
    pub momentum: T,
    pub hbar: T,
    pub mass: T,
}

impl<T: Real> FreeGaussian<T> {
    pub fn width(&self, t: T) -> T {
        spreading_width(self.sigma0, self.hbar, self.mass, t)
    }

    fn beta(&self) -> T {
        self.hbar / (T::lit(2.0) * self.mass * self.sigma0 * self.sigma0)
    }

    fn center_at(&self, t: T) -> T {
        self.center + self.momentum / self.mass * t
    }

    /// `q(a,t) = c + pt/m + (a − c)σ(t)/σ₀`.
    pub fn trajectory(&self, a: T, t: T) -> T {
        self.center_at(t) + (a - self.center) * self.width(t) / self.sigma0
    }

    pub fn density(&self, x: T, t: T) -> T {
        let s = self.width(t);
        let z = (x - self.center_at(t)) / s;
        (-T::lit(0.5) * z * z).exp() / (s * (T::lit(2.0) * T::PI()).sqrt())
    }

    /// Eulerian velocity field `v(x,t) = p/m + (x − c(t))σ̇/σ`.
    pub fn velocity(&self, x: T, t: T) -> T {
        let s = self.width(t);
        let sd = spreading_rate(self.sigma0, self.hbar, self.mass, t);
        self.momentum / self.mass + (x - self.center_at(t)) * sd / s
    }

    /// Log-density gradient on a trajectory: `u = −(a − c)/(σ₀σ(t))`.
    pub fn log_density_gradient(&self, a: T, t: T) -> T {
        -(a - self.center) / (self.sigma0 * self.width(t))
    }

    /// `Q(a,t) − Q₀(a) = −(a − c)·arctan(ħt/2mσ₀²)` with `Q̇₀ = (ħ/2m)u₀`.
    pub fn concealed_displacement(&self, a: T, t: T) -> T {
        -(a - self.center) * (self.beta() * t).atan()
    }

    /// Mean kinetic energy `p²/2m + ħ²/8mσ₀²`.
    pub fn energy(&self) -> T {
        self.momentum * self.momentum / (T::lit(2.0) * self.mass)
            + self.hbar * self.hbar / (T::lit(8.0) * self.mass * self.sigma0 * self.sigma0)
    }
}

/// Coherent state of a harmonic trap centred at the origin.
#[derive(Debug, Clone, Copy)]
pub struct CoherentState<T> {
    pub x0: T,
    pub p0: T,
    pub omega: T,
    pub hbar: T,
    pub mass: T,
}

impl<T: Real> CoherentState<T> {
    /// Shape-preserving width `σ₀² = ħ/2mω`.
    pub fn sigma0(&self) -> T {
        (self.hbar / (T::lit(2.0) * self.mass * self.omega)).sqrt()
    }

    pub fn center(&self, t: T) -> T {
        let w = self.omega;
        self.x0 * (w * t).cos() + self.p0 / (self.mass * w) * (w * t).sin()
    }

    pub fn center_velocity(&self, t: T) -> T {
        let w = self.omega;
        -self.x0 * w * (w * t).sin() + self.p0 / self.mass * (w * t).cos()
    }

    /// Rigid translation: `q(a,t) = a − x₀ + x_c(t)`.
    pub fn trajectory(&self, a: T, t: T) -> T {
        a - self.x0 + self.center(t)
    }

    pub fn density(&self, x: T, t: T) -> T {
        let s = self.sigma0();
        let z = (x - self.center(t)) / s;
        (-T::lit(0.5) * z * z).exp() / (s * (T::lit(2.0) * T::PI()).sqrt())
    }

    /// `Q − Q₀ = Q̇₀ t` since `u` is constant along trajectories.
    pub fn concealed_displacement(&self, a: T, t: T) -> T {
        let s2 = self.sigma0() * self.sigma0();
        -self.hbar / (T::lit(2.0) * self.mass) * (a - self.x0) / s2 * t
    }

    /// Total energy `p₀²/2m + ½mω²x₀² + ħω/2`.
    pub fn energy(&self) -> T {
        let half = T::lit(0.5);
        self.p0 * self.p0 / (T::lit(2.0) * self.mass)
            + half * self.mass * self.omega * self.omega * self.x0 * self.x0
            + half * self.hbar * self.omega
    }
}

/// Free particle in the plane in polar form, starting at radius `r0` with
/// zero radial velocity and angular momentum `p`: `r(t) = √(r0² + p²t²/r0²)`.
#[derive(Debug, Clone, Copy)]
pub struct PolarFreeMotion<T> {
    pub r0: T,
    pub angular_momentum: T,
}

impl<T: Real> PolarFreeMotion<T> {
    pub fn radius(&self, t: T) -> T {
        let v = self.angular_momentum / self.r0;
        (self.r0 * self.r0 + v * v * t * t).sqrt()
    }

    /// `θ(t) − θ₀ = arctan(p t / r0²)`.
    pub fn angle(&self, t: T) -> T {
        (self.angular_momentum * t / (self.r0 * self.r0)).atan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let g = FreeGaussian {
            center: 0.0,
            sigma0: 1.0,
            momentum: 0.0,
            hbar: 1.0,
            mass: 1.0,
        };
        assert!((g.trajectory(1.0, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.concealed_displacement(1.0, 2.0) + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((g.density(0.0, 2.0) - 0.2820947917738782).abs() < 1e-12);
        assert!((g.energy() - 0.125).abs() < 1e-15);

        let c = CoherentState {
            x0: 1.0f64,
            p0: 0.0,
            omega: 1.0,
            hbar: 1.0,
            mass: 1.0,
        };
        assert!((c.sigma0().powi(2) - 0.5).abs() < 1e-15);
        assert!((c.trajectory(1.0, std::f64::consts::PI) + 1.0).abs() < 1e-15);
        assert!((c.concealed_displacement(1.5, 2.0) + 1.0).abs() < 1e-15);

        let p = PolarFreeMotion {
            r0: 1.0f64,
            angular_momentum: 1.0,
        };
        assert!((p.radius(1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.angle(1.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn velocity_field_is_time_derivative_of_trajectory() {
        let g = FreeGaussian {
            center: 0.5,
            sigma0: 0.8,
            momentum: 1.5,
            hbar: 1.0,
            mass: 2.0,
        };
        let (a, t, h) = (1.3f64, 0.7, 1e-5);
        let fd = (g.trajectory(a, t + h) - g.trajectory(a, t - h)) / (2.0 * h);
        assert!((fd - g.velocity(g.trajectory(a, t), t)).abs() < 1e-9);
    }
}
