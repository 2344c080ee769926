//! Finite-difference derivative operators on uniform grids.
//!
//! Interior rows use centered stencils; the first and last rows fall back to
//! one-sided windows of matching formal order. Weights come from Fornberg's
//! recursion evaluated in `f64` and are then cast to the working scalar.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finite-difference weights for the `deriv`-th derivative at `x0` using the
/// nodes `xs` (Fornberg 1988).
pub fn fornberg_weights(x0: f64, xs: &[f64], deriv: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0_f64; deriv + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[deriv]).collect()
}

#[derive(Debug, Clone)]
struct Row<T> {
    start: usize,
    weights: Vec<T>,
}

/// Derivative operator `D` of a given order and accuracy on `n` uniform points.
#[derive(Debug, Clone)]
pub struct DerivativeOperator<T> {
    n: usize,
    half: usize,
    interior: Vec<T>,
    left: Vec<Row<T>>,
    right: Vec<Row<T>>,
}

impl<T: Real> DerivativeOperator<T> {
    /// `accuracy` must be even; interior stencils are centered with
    /// `accuracy + 1` points.
    pub fn new(n: usize, h: T, deriv: usize, accuracy: usize) -> Result<Self> {
        if accuracy == 0 || !accuracy.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "accuracy",
                reason: format!("must be a positive even number, got {accuracy}"),
            });
        }
        let half = accuracy / 2;
        let boundary_width = accuracy + deriv;
        if n < boundary_width.max(2 * half + 1) {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("{n} points cannot host a stencil of width {boundary_width}"),
            });
        }
        let scale = T::one() / h.powi(deriv as i32);
        let cast = |w: Vec<f64>| -> Vec<T> { w.into_iter().map(|x| T::lit(x) * scale).collect() };

        let offsets: Vec<f64> = (0..=2 * half).map(|k| k as f64 - half as f64).collect();
        let interior = cast(fornberg_weights(0.0, &offsets, deriv));

        let window = |i: usize| -> Row<T> {
            let start = i.saturating_sub(half).min(n - boundary_width);
            let xs: Vec<f64> = (start..start + boundary_width).map(|k| k as f64).collect();
            Row {
                start,
                weights: cast(fornberg_weights(i as f64, &xs, deriv)),
            }
        };
        let left = (0..half).map(window).collect();
        let right = (n - half..n).map(window).collect();
        Ok(Self {
            n,
            half,
            interior,
            left,
            right,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `out = D f`.
    pub fn apply_into(&self, f: &[T], out: &mut [T]) {
        assert_eq!(f.len(), self.n);
        assert_eq!(out.len(), self.n);
        let h = self.half;
        for (i, row) in self.left.iter().enumerate() {
            out[i] = dot(&row.weights, &f[row.start..]);
        }
        for i in h..self.n - h {
            out[i] = dot(&self.interior, &f[i - h..]);
        }
        for (k, row) in self.right.iter().enumerate() {
            out[self.n - h + k] = dot(&row.weights, &f[row.start..]);
        }
    }

    pub fn apply(&self, f: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        self.apply_into(f, &mut out);
        out
    }

    /// `out = Dᵀ g`.
    pub fn apply_transpose_into(&self, g: &[T], out: &mut [T]) {
        assert_eq!(g.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.iter_mut().for_each(|x| *x = T::zero());
        let h = self.half;
        for (i, row) in self.left.iter().enumerate() {
            scatter(&row.weights, g[i], &mut out[row.start..]);
        }
        for i in h..self.n - h {
            scatter(&self.interior, g[i], &mut out[i - h..]);
        }
        for (k, row) in self.right.iter().enumerate() {
            scatter(&row.weights, g[self.n - h + k], &mut out[row.start..]);
        }
    }

    pub fn apply_transpose(&self, g: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        self.apply_transpose_into(g, &mut out);
        out
    }

    /// Evaluates row `i` of `D f` only.
    pub fn apply_at(&self, f: &[T], i: usize) -> T {
        let h = self.half;
        if i < h {
            let row = &self.left[i];
            dot(&row.weights, &f[row.start..])
        } else if i >= self.n - h {
            let row = &self.right[i - (self.n - h)];
            dot(&row.weights, &f[row.start..])
        } else {
            dot(&self.interior, &f[i - h..])
        }
    }
}

#[inline]
fn dot<T: Real>(w: &[T], f: &[T]) -> T {
    w.iter().zip(f).fold(T::zero(), |acc, (a, b)| acc + *a * *b)
}

#[inline]
fn scatter<T: Real>(w: &[T], g: T, out: &mut [T]) {
    for (o, a) in out.iter_mut().zip(w) {
        *o += *a * g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 2.0).abs() < 1e-15);
        // 8th-order first derivative: 4/5 for the nearest neighbour
        let xs: Vec<f64> = (-4..=4).map(f64::from).collect();
        let w = fornberg_weights(0.0, &xs, 1);
        assert!((w[5] - 0.8).abs() < 1e-14);
        assert!((w[8] + 1.0 / 280.0).abs() < 1e-15);
    }

    #[test]
    fn exact_on_degree_eight_polynomials() {
        let n = 30;
        let h = 0.1_f64;
        let d = DerivativeOperator::new(n, h, 1, 8).unwrap();
        let x: Vec<f64> = (0..n).map(|i| -1.3 + i as f64 * h).collect();
        let f: Vec<f64> = x.iter().map(|x| x.powi(8) - 3.0 * x.powi(3)).collect();
        let df = d.apply(&f);
        for (xi, di) in x.iter().zip(&df) {
            let exact = 8.0 * xi.powi(7) - 9.0 * xi * xi;
            assert!((di - exact).abs() < 1e-8, "{xi}: {di} vs {exact}");
        }
    }

    #[test]
    fn eighth_order_convergence_on_sine() {
        let err = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let d = DerivativeOperator::new(n, h, 1, 8).unwrap();
            let f: Vec<f64> = (0..n).map(|i| (1.7 * (i as f64 * h)).sin()).collect();
            d.apply(&f)
                .iter()
                .enumerate()
                .map(|(i, v)| (v - 1.7 * (1.7 * i as f64 * h).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        // one-sided rows keep formal order 8 but with larger constants
        assert!(ratio > 150.0, "ratio {ratio}");
    }

    #[test]
    fn second_derivative_operator() {
        let n = 25;
        let h = 0.2_f64;
        let d2 = DerivativeOperator::new(n, h, 2, 8).unwrap();
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(4)).collect();
        for (i, v) in d2.apply(&f).iter().enumerate() {
            let x = i as f64 * h;
            assert!((v - 12.0 * x * x).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(DerivativeOperator::<f64>::new(5, 0.1, 1, 8).is_err());
        assert!(DerivativeOperator::<f64>::new(50, 0.1, 1, 3).is_err());
    }

    proptest! {
        #[test]
        fn transpose_is_adjoint(
            f in proptest::collection::vec(-1.0f64..1.0, 20),
            g in proptest::collection::vec(-1.0f64..1.0, 20),
        ) {
            let d = DerivativeOperator::new(20, 0.3, 1, 8).unwrap();
            let lhs: f64 = d.apply(&f).iter().zip(&g).map(|(a, b)| a * b).sum();
            let rhs: f64 = f.iter().zip(d.apply_transpose(&g)).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
