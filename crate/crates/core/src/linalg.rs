//! Small dense and banded linear algebra used by the solvers.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "row {i} has wrong length");
            rows[i][j]
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        x.iter()
            .zip(self.mul_vec(y))
            .fold(T::zero(), |acc, (a, b)| acc + *a * b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| *v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        let scale = self.max_abs().max(T::min_positive_value());
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= rel_tol * scale))
    }

    /// Cholesky factorization; `which` names the matrix in the error.
    pub fn cholesky(&self, which: &'static str) -> Result<Cholesky<T>> {
        let n = self.n;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::SingularMatrix { which });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }
}

/// Lower-triangular Cholesky factor `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[i * n + k] * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.l[k * n + i] * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }

    pub fn inverse(&self) -> SquareMatrix<T> {
        let n = self.n;
        let mut inv = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        inv
    }
}

/// Pre-factored complex tridiagonal system (Thomas algorithm).
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    lower: Vec<Complex<T>>,
    upper_mod: Vec<Complex<T>>,
    inv_pivot: Vec<Complex<T>>,
}

impl<T: Real> Tridiagonal<T> {
    /// `lower[i]` multiplies `x[i-1]` in row `i` (entry 0 unused), `upper[i]`
    /// multiplies `x[i+1]` (last entry unused).
    pub fn factor(lower: &[Complex<T>], diag: &[Complex<T>], upper: &[Complex<T>]) -> Result<Self> {
        let n = diag.len();
        assert!(lower.len() == n && upper.len() == n);
        let mut upper_mod = vec![Complex::new(T::zero(), T::zero()); n];
        let mut inv_pivot = vec![Complex::new(T::zero(), T::zero()); n];
        let tiny = T::epsilon() * T::epsilon();
        for i in 0..n {
            let pivot = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i] * upper_mod[i - 1]
            };
            if pivot.norm_sqr() <= tiny || !pivot.re.is_finite() || !pivot.im.is_finite() {
                return Err(Error::SolverBreakdown { row: i });
            }
            inv_pivot[i] = Complex::new(T::one(), T::zero()) / pivot;
            upper_mod[i] = upper[i] * inv_pivot[i];
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper_mod,
            inv_pivot,
        })
    }

    pub fn solve_in_place(&self, rhs: &mut [Complex<T>]) {
        let n = rhs.len();
        assert_eq!(n, self.inv_pivot.len());
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.upper_mod[i] * next;
        }
    }
}

/// Symmetric positive-definite band matrix with half-bandwidth `k`, stored
/// as the lower band: `band[i][d] = M[i][i-d]`.
#[derive(Debug, Clone)]
pub struct BandedSpd<T> {
    n: usize,
    k: usize,
    band: Vec<Vec<T>>,
}

impl<T: Real> BandedSpd<T> {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            band: vec![vec![T::zero(); k + 1]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` to `M[i][j]` and, off the diagonal, to `M[j][i]`.
    pub fn add_sym(&mut self, i: usize, j: usize, v: T) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        assert!(d <= self.k, "entry ({i},{j}) outside band {}", self.k);
        self.band[r][d] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        if d > self.k {
            T::zero()
        } else {
            self.band[r][d]
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            y[i] += self.band[i][0] * x[i];
            for d in 1..=self.k.min(i) {
                let v = self.band[i][d];
                y[i] += v * x[i - d];
                y[i - d] += v * x[i];
            }
        }
        y
    }

    /// Band Cholesky factorization.
    pub fn factor(&self, which: &'static str) -> Result<BandedCholesky<T>> {
        let (n, k) = (self.n, self.k);
        // l[i][d] = L[i][i-d]
        let mut l = vec![vec![T::zero(); k + 1]; n];
        for i in 0..n {
            for d in (0..=k.min(i)).rev() {
                let j = i - d;
                let mut s = self.band[i][d];
                // Σ_m L[i][m] L[j][m] over m in [max(i,j)-k .. j)
                let lo = i.saturating_sub(k);
                for m in lo..j {
                    s -= l[i][i - m] * l[j][j - m];
                }
                if d == 0 {
                    if !(s > T::zero()) || !s.is_finite() {
                        return Err(Error::SingularMatrix { which });
                    }
                    l[i][0] = s.sqrt();
                } else {
                    l[i][d] = s / l[j][0];
                }
            }
        }
        Ok(BandedCholesky { n, k, l })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky<T> {
    n: usize,
    k: usize,
    l: Vec<Vec<T>>,
}

impl<T: Real> BandedCholesky<T> {
    pub fn solve_in_place(&self, b: &mut [T]) {
        let (n, k) = (self.n, self.k);
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for d in 1..=k.min(i) {
                s -= self.l[i][d] * b[i - d];
            }
            b[i] = s / self.l[i][0];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for d in 1..=k.min(n - 1 - i) {
                s -= self.l[i + d][d] * b[i + d];
            }
            b[i] = s / self.l[i][0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let m = SquareMatrix::<f64>::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]]);
        let c = m.cholesky("M").unwrap();
        let x: Vec<f64> = c.solve(&[1.0, 2.0, 3.0]);
        let b = m.mul_vec(&x);
        for (bi, ei) in b.iter().zip([1.0, 2.0, 3.0]) {
            assert!((bi - ei).abs() < 1e-13);
        }
        let inv = c.inverse();
        let id = SquareMatrix::<f64>::from_fn(3, |i, j| (0..3).map(|k| m.get(i, k) * inv.get(k, j)).sum());
        assert!(id.sub(&SquareMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_singular_and_names_matrix() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(m.cholesky("A").unwrap_err(), Error::SingularMatrix { which: "A" });
        let z = SquareMatrix::<f64>::zeros(1);
        assert!(z.cholesky("B").is_err());
    }

    #[test]
    fn thomas_matches_dense() {
        let n = 6;
        let c = |re: f64, im: f64| Complex::new(re, im);
        let lower: Vec<_> = (0..n).map(|i| c(-1.0, 0.1 * i as f64)).collect();
        let upper: Vec<_> = (0..n).map(|i| c(-1.0, -0.05 * i as f64)).collect();
        let diag: Vec<_> = (0..n).map(|i| c(4.0, 0.3 + i as f64 * 0.01)).collect();
        let x_true: Vec<_> = (0..n).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let mut rhs: Vec<_> = (0..n)
            .map(|i| {
                let mut s = diag[i] * x_true[i];
                if i > 0 {
                    s += lower[i] * x_true[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * x_true[i + 1];
                }
                s
            })
            .collect();
        Tridiagonal::factor(&lower, &diag, &upper)
            .unwrap()
            .solve_in_place(&mut rhs);
        for (a, b) in rhs.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn banded_cholesky_solves(diag in proptest::collection::vec(5.0f64..8.0, 12),
                                  off1 in proptest::collection::vec(-1.0f64..1.0, 12),
                                  off2 in proptest::collection::vec(-1.0f64..1.0, 12),
                                  b in proptest::collection::vec(-3.0f64..3.0, 12)) {
            let n = 12;
            let mut m = BandedSpd::zeros(n, 2);
            for i in 0..n {
                m.add_sym(i, i, diag[i]);
                if i >= 1 { m.add_sym(i, i - 1, off1[i]); }
                if i >= 2 { m.add_sym(i, i - 2, off2[i]); }
            }
            let f = m.factor("M").unwrap();
            let mut x = b.clone();
            f.solve_in_place(&mut x);
            let r = m.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).abs() < 1e-11);
            }
        }
    }
}
