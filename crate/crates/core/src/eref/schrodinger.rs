use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::profile::ExternalPotential;
use crate::scalar::Real;

use super::EulerianFields;

/// Crank–Nicolson propagator `(1 + iτH/2ħ) ψⁿ⁺¹ = (1 − iτH/2ħ) ψⁿ` with
/// `H = −(ħ²/2m)∂ₓ² + V` and zero Dirichlet walls.
#[derive(Debug, Clone)]
pub struct CrankNicolson<T> {
    dt: T,
    solver: Tridiagonal<T>,
    /// Explicit half: `rhs_i = d_i ψ_i + o (ψ_{i-1} + ψ_{i+1})`.
    rhs_diag: Vec<Complex<T>>,
    rhs_off: Complex<T>,
}

impl<T: Real> CrankNicolson<T> {
    pub fn new(fields: &EulerianFields<T>, potential: &ExternalPotential<T>, dt: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        let (hbar, mass, dx) = (fields.hbar(), fields.mass(), fields.dx);
        let n = fields.len() - 2;
        let kin = hbar * hbar / (T::lit(2.0) * mass * dx * dx);
        // i τ / 2ħ
        let s = Complex::new(T::zero(), dt / (T::lit(2.0) * hbar));
        let one = Complex::new(T::one(), T::zero());
        let h_diag: Vec<Complex<T>> = fields.x[1..=n]
            .iter()
            .map(|&x| Complex::new(T::lit(2.0) * kin + potential.value(x), T::zero()))
            .collect();
        let h_off = Complex::new(-kin, T::zero());
        let diag: Vec<Complex<T>> = h_diag.iter().map(|&h| one + s * h).collect();
        let off = vec![s * h_off; n];
        let solver = Tridiagonal::factor(&off, &diag, &off)?;
        Ok(Self {
            dt,
            solver,
            rhs_diag: h_diag.iter().map(|&h| one - s * h).collect(),
            rhs_off: -(s * h_off),
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Advances `ψ` by one step and refreshes the polar fields.
    pub fn step(&self, fields: &mut EulerianFields<T>) -> Result<()> {
        let psi = &fields.psi;
        let n = psi.len() - 2;
        let mut rhs: Vec<Complex<T>> = (0..n)
            .map(|i| self.rhs_diag[i] * psi[i + 1] + self.rhs_off * (psi[i] + psi[i + 2]))
            .collect();
        self.solver.solve_in_place(&mut rhs);
        if let Some(i) = rhs.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SolverBreakdown { row: i });
        }
        fields.psi[1..=n].copy_from_slice(&rhs);
        fields.t += self.dt;
        fields.polar_fields();
        Ok(())
    }
}
