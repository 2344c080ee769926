//! Routh reduction of pure-kinetic discrete systems with ignorable coordinates.
//!
//! A system with Lagrangian `L = ½ q̇ᵀB(q)q̇ + ½ Q̇ᵀA(q)Q̇` has conserved
//! concealed momenta `P = A(q)Q̇`. Eliminating `Q̇` in favour of `P` gives the
//! Routhian `L′ = ½ q̇ᵀB(q)q̇ − ½ PᵀA⁻¹(q)P`, whose visible dynamics coincide
//! with those of `L`: the concealed kinetic energy acts on `q` as a potential.

use crate::error::{Error, Result};
use crate::integrate::{integrate, Sample, Scheme};
use crate::linalg::SquareMatrix;
use crate::scalar::Real;

/// Step for central differences of the metric: `ε^(1/3)·max(1, |q|)`.
pub fn fd_step<T: Real>(q: T) -> T {
    T::epsilon().cbrt() * T::one().max(q.abs())
}

fn central_difference<T: Real>(q: &[T], k: usize, f: impl Fn(&[T]) -> SquareMatrix<T>) -> SquareMatrix<T> {
    let h = fd_step(q[k]);
    let mut qp = q.to_vec();
    let mut qm = q.to_vec();
    qp[k] += h;
    qm[k] -= h;
    // use the representable step
    let span = qp[k] - qm[k];
    f(&qp).sub(&f(&qm)).scale(T::one() / span)
}

/// Pure-kinetic Lagrangian with visible coordinates `q` and cyclic concealed
/// coordinates `Q`.
pub trait KineticSystem<T: Real> {
    fn n_visible(&self) -> usize;
    fn n_concealed(&self) -> usize;
    /// `B(q)`, symmetric positive-definite.
    fn visible_metric(&self, q: &[T]) -> SquareMatrix<T>;
    /// `A(q)`, symmetric positive-definite.
    fn concealed_metric(&self, q: &[T]) -> SquareMatrix<T>;

    /// `∂B/∂q_k`. Defaults to central differences.
    fn visible_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        central_difference(q, k, |x| self.visible_metric(x))
    }

    /// `∂A/∂q_k`. Defaults to central differences.
    fn concealed_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        central_difference(q, k, |x| self.concealed_metric(x))
    }
}

impl<T: Real, S: KineticSystem<T> + ?Sized> KineticSystem<T> for &S {
    fn n_visible(&self) -> usize {
        (**self).n_visible()
    }
    fn n_concealed(&self) -> usize {
        (**self).n_concealed()
    }
    fn visible_metric(&self, q: &[T]) -> SquareMatrix<T> {
        (**self).visible_metric(q)
    }
    fn concealed_metric(&self, q: &[T]) -> SquareMatrix<T> {
        (**self).concealed_metric(q)
    }
    fn visible_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        (**self).visible_metric_derivative(q, k)
    }
    fn concealed_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        (**self).concealed_metric_derivative(q, k)
    }
}

type MetricFn<T> = Box<dyn Fn(&[T]) -> SquareMatrix<T> + Send + Sync>;
type MetricDerivFn<T> = Box<dyn Fn(&[T], usize) -> SquareMatrix<T> + Send + Sync>;

/// A [`KineticSystem`] assembled from closures.
pub struct ClosureSystem<T> {
    n_visible: usize,
    n_concealed: usize,
    b: MetricFn<T>,
    a: MetricFn<T>,
    db: Option<MetricDerivFn<T>>,
    da: Option<MetricDerivFn<T>>,
}

impl<T: Real> ClosureSystem<T> {
    pub fn new(
        n_visible: usize,
        n_concealed: usize,
        b: impl Fn(&[T]) -> SquareMatrix<T> + Send + Sync + 'static,
        a: impl Fn(&[T]) -> SquareMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n_visible,
            n_concealed,
            b: Box::new(b),
            a: Box::new(a),
            db: None,
            da: None,
        }
    }

    pub fn with_visible_derivative(
        mut self,
        db: impl Fn(&[T], usize) -> SquareMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        self.db = Some(Box::new(db));
        self
    }

    pub fn with_concealed_derivative(
        mut self,
        da: impl Fn(&[T], usize) -> SquareMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        self.da = Some(Box::new(da));
        self
    }
}

impl<T: Real> KineticSystem<T> for ClosureSystem<T> {
    fn n_visible(&self) -> usize {
        self.n_visible
    }
    fn n_concealed(&self) -> usize {
        self.n_concealed
    }
    fn visible_metric(&self, q: &[T]) -> SquareMatrix<T> {
        (self.b)(q)
    }
    fn concealed_metric(&self, q: &[T]) -> SquareMatrix<T> {
        (self.a)(q)
    }
    fn visible_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        match &self.db {
            Some(f) => f(q, k),
            None => central_difference(q, k, |x| self.visible_metric(x)),
        }
    }
    fn concealed_metric_derivative(&self, q: &[T], k: usize) -> SquareMatrix<T> {
        match &self.da {
            Some(f) => f(q, k),
            None => central_difference(q, k, |x| self.concealed_metric(x)),
        }
    }
}

/// Free particle in the plane written in polar coordinates: `B = 1`,
/// `A = r²`, with the angle as the concealed coordinate.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolarFreeParticle;

impl<T: Real> KineticSystem<T> for PolarFreeParticle {
    fn n_visible(&self) -> usize {
        1
    }
    fn n_concealed(&self) -> usize {
        1
    }
    fn visible_metric(&self, _q: &[T]) -> SquareMatrix<T> {
        SquareMatrix::identity(1)
    }
    fn concealed_metric(&self, q: &[T]) -> SquareMatrix<T> {
        SquareMatrix::from_fn(1, |_, _| q[0] * q[0])
    }
    fn visible_metric_derivative(&self, _q: &[T], _k: usize) -> SquareMatrix<T> {
        SquareMatrix::zeros(1)
    }
    fn concealed_metric_derivative(&self, q: &[T], _k: usize) -> SquareMatrix<T> {
        SquareMatrix::from_fn(1, |_, _| T::lit(2.0) * q[0])
    }
}

/// Full state of a discrete system.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState<T> {
    pub q: Vec<T>,
    pub qdot: Vec<T>,
    /// Concealed coordinates `Q`.
    pub conc: Vec<T>,
    /// Concealed velocities `Q̇`.
    pub conc_dot: Vec<T>,
    pub t: T,
}

impl<T: Real> DiscreteState<T> {
    pub fn check_dims<S: KineticSystem<T> + ?Sized>(&self, sys: &S) -> Result<()> {
        let checks = [
            ("q", sys.n_visible(), self.q.len()),
            ("qdot", sys.n_visible(), self.qdot.len()),
            ("Q", sys.n_concealed(), self.conc.len()),
            ("Qdot", sys.n_concealed(), self.conc_dot.len()),
        ];
        for (context, expected, got) in checks {
            if expected != got {
                return Err(Error::DimensionMismatch { context, expected, got });
            }
        }
        Ok(())
    }
}

/// Checks symmetry and positive-definiteness of `A` and `B` at the given sample points.
pub fn validate_metrics<T: Real, S: KineticSystem<T> + ?Sized>(sys: &S, samples: &[Vec<T>]) -> Result<()> {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    for (i, q) in samples.iter().enumerate() {
        if q.len() != sys.n_visible() {
            return Err(Error::DimensionMismatch {
                context: "sample point",
                expected: sys.n_visible(),
                got: q.len(),
            });
        }
        for (which, m) in [("B", sys.visible_metric(q)), ("A", sys.concealed_metric(q))] {
            if !m.is_symmetric(tol) || m.cholesky(which).is_err() {
                return Err(Error::NotPositiveDefinite { which, sample: i });
            }
        }
    }
    Ok(())
}

/// Right-hand side of `B q̈ = ½ q̇ᵀ∂_kB q̇ + ½ Wᵀ∂_kA W − Σ_j (∂_jB q̇)_k q̇_j`,
/// with `W` the concealed velocity.
fn visible_force<T: Real, S: KineticSystem<T> + ?Sized>(
    sys: &S,
    q: &[T],
    qdot: &[T],
    conc_dot: &[T],
) -> (Vec<T>, Vec<SquareMatrix<T>>, Vec<SquareMatrix<T>>) {
    let n = sys.n_visible();
    let half = T::lit(0.5);
    let db: Vec<_> = (0..n).map(|k| sys.visible_metric_derivative(q, k)).collect();
    let da: Vec<_> = (0..n).map(|k| sys.concealed_metric_derivative(q, k)).collect();
    let mut rhs = vec![T::zero(); n];
    for k in 0..n {
        rhs[k] = half * db[k].bilinear(qdot, qdot) + half * da[k].bilinear(conc_dot, conc_dot);
    }
    for (j, dbj) in db.iter().enumerate() {
        let col = dbj.mul_vec(qdot);
        for k in 0..n {
            rhs[k] -= col[k] * qdot[j];
        }
    }
    (rhs, db, da)
}

/// Euler–Lagrange accelerations `(q̈, Q̈)` of the full Lagrangian.
pub fn full_accelerations<T: Real, S: KineticSystem<T> + ?Sized>(
    sys: &S,
    s: &DiscreteState<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    s.check_dims(sys)?;
    let (rhs, _, da) = visible_force(sys, &s.q, &s.qdot, &s.conc_dot);
    let qdd = sys.visible_metric(&s.q).cholesky("B")?.solve(&rhs);

    // A Q̈ = −(Σ_j q̇_j ∂_jA) Q̇
    let c = sys.n_concealed();
    let mut adot = SquareMatrix::zeros(c);
    for (j, daj) in da.iter().enumerate() {
        adot = adot.add(&daj.scale(s.qdot[j]));
    }
    let rhs_q: Vec<T> = adot.mul_vec(&s.conc_dot).into_iter().map(|v| -v).collect();
    let cdd = sys.concealed_metric(&s.q).cholesky("A")?.solve(&rhs_q);
    Ok((qdd, cdd))
}

/// System with the concealed velocities eliminated in favour of constant momenta.
#[derive(Debug, Clone)]
pub struct ReducedSystem<S, T> {
    pub base: S,
    /// `P = A(q₀)·Q̇₀`, fixed at construction.
    pub momentum: Vec<T>,
}

/// Builds the reduced system from initial data: `P = A(q₀)Q̇₀`.
pub fn reduce<T: Real, S: KineticSystem<T>>(sys: S, s0: &DiscreteState<T>) -> Result<ReducedSystem<S, T>> {
    s0.check_dims(&sys)?;
    let a = sys.concealed_metric(&s0.q);
    // a degenerate A(q₀) leaves some concealed freedoms without momentum; reject it
    a.cholesky("A")?;
    let momentum = a.mul_vec(&s0.conc_dot);
    Ok(ReducedSystem { base: sys, momentum })
}

impl<T: Real, S: KineticSystem<T>> ReducedSystem<S, T> {
    /// `Q̇ = A⁻¹(q)P`.
    pub fn concealed_velocity(&self, q: &[T]) -> Result<Vec<T>> {
        Ok(self.base.concealed_metric(q).cholesky("A")?.solve(&self.momentum))
    }

    /// Emergent potential `V_q = ½PᵀA⁻¹(q)P`.
    pub fn emergent_potential(&self, q: &[T]) -> Result<T> {
        let w = self.concealed_velocity(q)?;
        Ok(T::lit(0.5) * dot(&self.momentum, &w))
    }

    /// Concealed kinetic energy `½Q̇ᵀA(q)Q̇` evaluated at `Q̇ = A⁻¹P`.
    pub fn concealed_kinetic(&self, q: &[T]) -> Result<T> {
        let w = self.concealed_velocity(q)?;
        Ok(T::lit(0.5) * self.base.concealed_metric(q).bilinear(&w, &w))
    }

    /// Routhian `L′(q, q̇) = ½q̇ᵀBq̇ − ½PᵀA⁻¹P`.
    pub fn lagrangian(&self, q: &[T], qdot: &[T]) -> Result<T> {
        let t = T::lit(0.5) * self.base.visible_metric(q).bilinear(qdot, qdot);
        Ok(t - self.emergent_potential(q)?)
    }

    /// Euler–Lagrange accelerations of the Routhian.
    pub fn accelerations(&self, q: &[T], qdot: &[T]) -> Result<Vec<T>> {
        if q.len() != self.base.n_visible() || qdot.len() != self.base.n_visible() {
            return Err(Error::DimensionMismatch {
                context: "reduced state",
                expected: self.base.n_visible(),
                got: q.len().min(qdot.len()),
            });
        }
        let w = self.concealed_velocity(q)?;
        let (rhs, _, _) = visible_force(&self.base, q, qdot, &w);
        Ok(self.base.visible_metric(q).cholesky("B")?.solve(&rhs))
    }
}

/// Free-function form of [`ReducedSystem::accelerations`].
pub fn reduced_accelerations<T: Real, S: KineticSystem<T>>(
    red: &ReducedSystem<S, T>,
    q: &[T],
    qdot: &[T],
) -> Result<Vec<T>> {
    red.accelerations(q, qdot)
}

/// Concealed motion recovered from a visible path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcealedPath<T> {
    pub t: Vec<T>,
    pub conc_dot: Vec<Vec<T>>,
    pub conc: Vec<Vec<T>>,
}

/// Rebuilds `Q̇(t) = A⁻¹(q(t))P` and `Q(t) = Q₀ + ∫Q̇` (cumulative trapezoid)
/// along a visible path given as `(t, q)` pairs on a uniform mesh.
pub fn reconstruct_concealed<T: Real, S: KineticSystem<T>>(
    red: &ReducedSystem<S, T>,
    q_path: &[(T, Vec<T>)],
    conc0: &[T],
) -> Result<ConcealedPath<T>> {
    let c = red.base.n_concealed();
    if conc0.len() != c {
        return Err(Error::DimensionMismatch {
            context: "Q0",
            expected: c,
            got: conc0.len(),
        });
    }
    let mut out = ConcealedPath {
        t: Vec::with_capacity(q_path.len()),
        conc_dot: Vec::with_capacity(q_path.len()),
        conc: Vec::with_capacity(q_path.len()),
    };
    let half = T::lit(0.5);
    for (i, (t, q)) in q_path.iter().enumerate() {
        let w = red.concealed_velocity(q)?;
        let next = if i == 0 {
            conc0.to_vec()
        } else {
            let dt = *t - out.t[i - 1];
            out.conc[i - 1]
                .iter()
                .zip(&out.conc_dot[i - 1])
                .zip(&w)
                .map(|((x, a), b)| *x + half * dt * (*a + *b))
                .collect()
        };
        out.t.push(*t);
        out.conc_dot.push(w);
        out.conc.push(next);
    }
    Ok(out)
}

/// Integrates the full system; each sample packs `x = (q, Q)`, `v = (q̇, Q̇)`.
pub fn integrate_full<T: Real, S: KineticSystem<T> + ?Sized>(
    sys: &S,
    s0: &DiscreteState<T>,
    dt: T,
    n_steps: usize,
    scheme: Scheme,
) -> Result<Vec<Sample<T>>> {
    s0.check_dims(sys)?;
    let n = sys.n_visible();
    let x0: Vec<T> = s0.q.iter().chain(&s0.conc).copied().collect();
    let v0: Vec<T> = s0.qdot.iter().chain(&s0.conc_dot).copied().collect();
    let t0 = s0.t;
    integrate(
        |x, v| {
            let state = DiscreteState {
                q: x[..n].to_vec(),
                qdot: v[..n].to_vec(),
                conc: x[n..].to_vec(),
                conc_dot: v[n..].to_vec(),
                t: t0,
            };
            let (qdd, cdd) = full_accelerations(sys, &state)?;
            Ok(qdd.into_iter().chain(cdd).collect())
        },
        &x0,
        &v0,
        t0,
        dt,
        n_steps,
        scheme,
    )
}

/// Integrates the reduced (visible-only) system.
pub fn integrate_reduced<T: Real, S: KineticSystem<T>>(
    red: &ReducedSystem<S, T>,
    q0: &[T],
    qdot0: &[T],
    t0: T,
    dt: T,
    n_steps: usize,
    scheme: Scheme,
) -> Result<Vec<Sample<T>>> {
    integrate(|x, v| red.accelerations(x, v), q0, qdot0, t0, dt, n_steps, scheme)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}
