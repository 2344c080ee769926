//! Initial states shared by the Lagrangian and Eulerian solvers.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Initial wavefunction, described by its density and velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialProfile<T> {
    /// `ψ₀ = (2πσ²)^(-1/4) exp(−(x−c)²/4σ² + i p x/ħ)`.
    Gaussian { center: T, sigma: T, momentum: T },
    /// Flat density on `[lo, hi]` moving rigidly with `velocity`.
    Uniform { lo: T, hi: T, velocity: T },
}

impl<T: Real> InitialProfile<T> {
    pub fn gaussian(center: T, sigma: T, momentum: T) -> Self {
        Self::Gaussian {
            center,
            sigma,
            momentum,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gaussian {
                sigma,
                center,
                momentum,
            } => {
                if !(sigma > T::zero()) || !sigma.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "sigma0",
                        reason: format!("must be positive, got {sigma}"),
                    });
                }
                if !center.is_finite() || !momentum.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "profile",
                        reason: "non-finite center or momentum".into(),
                    });
                }
            }
            Self::Uniform { lo, hi, .. } => {
                if !(hi > lo) {
                    return Err(Error::InvalidParameter {
                        name: "profile",
                        reason: format!("empty uniform support [{lo}, {hi}]"),
                    });
                }
            }
        }
        Ok(())
    }

    /// `log ρ₀(x)`; `-inf` outside a compact support.
    pub fn log_density(&self, x: T) -> T {
        match *self {
            Self::Gaussian { center, sigma, .. } => {
                let z = (x - center) / sigma;
                -T::lit(0.5) * z * z - T::lit(0.5) * (T::lit(2.0) * T::PI() * sigma * sigma).ln()
            }
            Self::Uniform { lo, hi, .. } => {
                if x >= lo && x <= hi {
                    -(hi - lo).ln()
                } else {
                    T::neg_infinity()
                }
            }
        }
    }

    pub fn density(&self, x: T) -> T {
        self.log_density(x).exp()
    }

    pub fn max_density(&self) -> T {
        match *self {
            Self::Gaussian { center, .. } => self.density(center),
            Self::Uniform { lo, hi, .. } => T::one() / (hi - lo),
        }
    }

    /// Initial velocity field `v₀(x)`.
    pub fn velocity(&self, _x: T, mass: T) -> T {
        match *self {
            Self::Gaussian { momentum, .. } => momentum / mass,
            Self::Uniform { velocity, .. } => velocity,
        }
    }

    /// Initial wavefunction value.
    pub fn psi(&self, x: T, hbar: T, mass: T) -> Complex<T> {
        let amp = (T::lit(0.5) * self.log_density(x)).exp();
        let phase = mass * self.velocity(x, mass) * x / hbar;
        Complex::from_polar(amp, phase)
    }

    /// Interval where `ρ₀ ≥ rel_floor·max ρ₀`.
    pub fn support(&self, rel_floor: T) -> (T, T) {
        match *self {
            Self::Gaussian { center, sigma, .. } => {
                let r = sigma * (T::lit(2.0) * (T::one() / rel_floor).ln()).sqrt();
                (center - r, center + r)
            }
            Self::Uniform { lo, hi, .. } => (lo, hi),
        }
    }

    /// Whether the density vanishes identically outside [`Self::support`].
    pub fn is_compact(&self) -> bool {
        matches!(self, Self::Uniform { .. })
    }

    pub fn center(&self) -> T {
        match *self {
            Self::Gaussian { center, .. } => center,
            Self::Uniform { lo, hi, .. } => T::lit(0.5) * (lo + hi),
        }
    }
}

/// External scalar potential `V(x)` in energy units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ExternalPotential<T> {
    #[default]
    None,
    /// `V = ½ k (x − c)²`.
    Harmonic { stiffness: T, center: T },
}

impl<T: Real> ExternalPotential<T> {
    /// Harmonic trap of angular frequency `omega` for particles of mass `mass`.
    pub fn harmonic(mass: T, omega: T, center: T) -> Self {
        Self::Harmonic {
            stiffness: mass * omega * omega,
            center,
        }
    }

    pub fn value(&self, x: T) -> T {
        match *self {
            Self::None => T::zero(),
            Self::Harmonic { stiffness, center } => T::lit(0.5) * stiffness * (x - center) * (x - center),
        }
    }

    pub fn gradient(&self, x: T) -> T {
        match *self {
            Self::None => T::zero(),
            Self::Harmonic { stiffness, center } => stiffness * (x - center),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Self::None)
    }
}
