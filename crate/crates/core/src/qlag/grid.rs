//! Label grid, ghost extension and the discrete mass matrix.

use crate::error::{Error, Result};
use crate::linalg::{BandedCholesky, BandedSpd};
use crate::profile::InitialProfile;
use crate::scalar::Real;
use crate::stencil::DerivativeOperator;

use super::{GridSpec, PhysicalParams};

/// Order of the linear extrapolation used for ghost labels.
const GHOST_LEVER: usize = 2;

/// Enlargement of the inertia length `h²` beside an edge without ghosts.
const EDGE_STIFFENING: f64 = 64.0;

/// Uniform label grid over the retained part of the initial density.
#[derive(Debug, Clone)]
pub struct LabelGrid<T> {
    pub a: Vec<T>,
    pub da: T,
    pub rho0: Vec<T>,
    /// Reference density of the concealed fluid, equal to `rho0`.
    pub rho0_concealed: Vec<T>,
    pub log_rho0: Vec<T>,
    /// Trapezoid weights `ρ₀·da` (halved at the ends).
    pub weights: Vec<T>,
}

impl<T: Real> LabelGrid<T> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `Σ ρ₀ da` by the trapezoid rule.
    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Weighted sum `Σ w f`.
    pub fn integrate(&self, f: impl Fn(usize) -> T) -> T {
        self.weights.iter().enumerate().map(|(k, &w)| w * f(k)).sum()
    }
}

/// Label grid padded with slaved ghost labels reaching into the density tail.
///
/// Ghost positions are linear extrapolations of the outermost labels, so
/// the extended configuration is `q_ext = E q`.
#[derive(Debug, Clone)]
pub(crate) struct Extension<T> {
    pub n_left: usize,
    pub n: usize,
    pub a: Vec<T>,
    pub log_rho0: Vec<T>,
    pub weights: Vec<T>,
    pub d1: DerivativeOperator<T>,
    pub inertia: BandedCholesky<T>,
}

impl<T: Real> Extension<T> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    fn ghost_coefficients(&self, e: usize) -> [(usize, T); 2] {
        ghost_coefficients(self.n_left, self.n, e)
    }

    fn is_ghost(&self, e: usize) -> bool {
        e < self.n_left || e >= self.n_left + self.n
    }

    /// `E q`.
    pub fn extend(&self, q: &[T]) -> Vec<T> {
        (0..self.len())
            .map(|e| {
                if self.is_ghost(e) {
                    self.ghost_coefficients(e).iter().map(|&(k, c)| c * q[k]).sum()
                } else {
                    q[e - self.n_left]
                }
            })
            .collect()
    }

    /// `Eᵀ g`.
    pub fn restrict(&self, g: &[T]) -> Vec<T> {
        let mut out = g[self.n_left..self.n_left + self.n].to_vec();
        for e in (0..self.n_left).chain(self.n_left + self.n..self.len()) {
            for (k, c) in self.ghost_coefficients(e) {
                out[k] += c * g[e];
            }
        }
        out
    }

    /// Maps an extended index to the nearest retained label.
    pub fn label_of(&self, e: usize) -> usize {
        e.saturating_sub(self.n_left).min(self.n - 1)
    }

    pub fn retained<'a>(&self, f: &'a [T]) -> &'a [T] {
        &f[self.n_left..self.n_left + self.n]
    }
}

fn ghost_coefficients<T: Real>(n_left: usize, n: usize, e: usize) -> [(usize, T); 2] {
    let p = GHOST_LEVER;
    let pf = T::from_usize_lossy(p);
    if e < n_left {
        let d = -T::from_usize_lossy(n_left - e) / pf;
        [(0, T::one() - d), (p, d)]
    } else {
        let d = T::from_usize_lossy(e - n_left - n + 1) / pf;
        [(n - 1, T::one() + d), (n - 1 - p, -d)]
    }
}

fn coefficients<T: Real>(n_left: usize, n: usize, e: usize) -> Vec<(usize, T)> {
    if e < n_left || e >= n_left + n {
        ghost_coefficients(n_left, n, e).to_vec()
    } else {
        vec![(e - n_left, T::one())]
    }
}

pub(crate) fn build<T: Real>(
    params: &PhysicalParams<T>,
    spec: &GridSpec<T>,
    profile: &InitialProfile<T>,
) -> Result<(LabelGrid<T>, Extension<T>)> {
    profile.validate()?;
    spec.validate()?;
    let n = spec.n_labels;
    let (mut lo, mut hi) = profile.support(spec.density_floor);
    if let Some(hw) = spec.half_width {
        let c = profile.center();
        lo = lo.max(c - hw);
        hi = hi.min(c + hw);
    }
    let peak = profile.max_density();
    if !profile.is_compact() {
        let ratio = profile.density(lo).max(profile.density(hi)) / peak;
        if ratio > T::lit(1e-3) {
            return Err(Error::DomainTooSmall { ratio: ratio.as_f64() });
        }
    }
    let da = (hi - lo) / T::from_usize_lossy(n - 1);
    let a: Vec<T> = (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + T::from_usize_lossy(k) * da
            }
        })
        .collect();
    let log_rho0: Vec<T> = a.iter().map(|&x| profile.log_density(x)).collect();
    let rho0: Vec<T> = log_rho0.iter().map(|l| l.exp()).collect();
    if let Some(k) = rho0.iter().position(|r| !(*r > T::zero()) || !r.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "profile",
            reason: format!("initial density is not positive at label {k}"),
        });
    }
    let mut weights: Vec<T> = rho0.iter().map(|&r| r * da).collect();
    weights[0] *= T::lit(0.5);
    weights[n - 1] *= T::lit(0.5);
    let mass: T = weights.iter().copied().sum();
    if !((mass - T::one()).abs() <= T::lit(1e-6)) {
        return Err(Error::NotNormalized {
            integral: mass.as_f64(),
        });
    }
    let grid = LabelGrid {
        a,
        da,
        rho0: rho0.clone(),
        rho0_concealed: rho0,
        log_rho0,
        weights,
    };

    let (n_left, n_right) = if profile.is_compact() || spec.ghost_floor >= spec.density_floor {
        (0, 0)
    } else {
        let (glo, ghi) = profile.support(spec.ghost_floor);
        let count = |gap: T| (gap / da).ceil().max(T::zero()).to_usize().unwrap_or(0);
        (count(lo - glo), count(ghi - hi))
    };
    let a_ext: Vec<T> = (0..n_left + n + n_right)
        .map(|e| {
            if e < n_left {
                lo - T::from_usize_lossy(n_left - e) * da
            } else if e < n_left + n {
                grid.a[e - n_left]
            } else {
                hi + T::from_usize_lossy(e - n_left - n + 1) * da
            }
        })
        .collect();
    let ne = a_ext.len();
    let log_ext: Vec<T> = a_ext.iter().map(|&x| profile.log_density(x)).collect();
    let mut w_ext: Vec<T> = log_ext.iter().map(|l| l.exp() * da).collect();
    w_ext[0] *= T::lit(0.5);
    w_ext[ne - 1] *= T::lit(0.5);
    let d1 = DerivativeOperator::new(ne, da, 1, spec.stencil_accuracy)?;

    let h2 = spec.inertia_regularization * params.hbar * params.dt / params.mass;
    let hard_edges = (n_left == 0, n_right == 0);
    let inertia = mass_matrix(
        n_left,
        n,
        &w_ext,
        h2,
        da,
        params.mass,
        hard_edges,
        spec.stencil_accuracy,
    )
    .factor("mass matrix")?;
    let ext = Extension {
        n_left,
        n,
        a: a_ext,
        log_rho0: log_ext,
        weights: w_ext,
        d1,
        inertia,
    };
    Ok((grid, ext))
}

/// `m Eᵀ (W + h⁴ ΔᵀWΔ) E`, with `Δ` the second difference.
///
/// Next to an edge without ghosts the one-sided stencils stiffen the
/// quantum force, so the inertia length is enlarged over the first
/// `edge_rows` rows.
#[allow(clippy::too_many_arguments)]
fn mass_matrix<T: Real>(
    n_left: usize,
    n: usize,
    weights: &[T],
    h2: T,
    da: T,
    mass: T,
    hard_edges: (bool, bool),
    edge_rows: usize,
) -> BandedSpd<T> {
    let ne = weights.len();
    let mut me = BandedSpd::zeros(ne, 2);
    for (e, &w) in weights.iter().enumerate() {
        me.add_sym(e, e, w);
    }
    let s = h2 * h2 / da.powi(4);
    let lap = [T::one(), -T::lit(2.0), T::one()];
    if s > T::zero() {
        for (r, &w) in weights.iter().enumerate() {
            // End rows reuse the neighbouring one-sided difference.
            let start = r.clamp(1, ne - 2) - 1;
            let near_edge = (hard_edges.0 && r < edge_rows) || (hard_edges.1 && r + edge_rows >= ne);
            let stiff = if near_edge {
                T::lit(EDGE_STIFFENING * EDGE_STIFFENING)
            } else {
                T::one()
            };
            let wr = s * stiff * w;
            for i in 0..3 {
                for j in 0..=i {
                    me.add_sym(start + i, start + j, wr * lap[i] * lap[j]);
                }
            }
        }
    }
    let mut m = BandedSpd::zeros(n, 2);
    for e in 0..ne {
        let ce = coefficients(n_left, n, e);
        for f in e.saturating_sub(2)..(e + 3).min(ne) {
            let v = me.get(e, f);
            if v == T::zero() {
                continue;
            }
            for &(f_k, cf) in &coefficients::<T>(n_left, n, f) {
                for &(e_k, c) in &ce {
                    if e_k >= f_k {
                        m.add_sym(e_k, f_k, mass * c * v * cf);
                    }
                }
            }
        }
    }
    m
}
