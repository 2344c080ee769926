use crate::scalar::Real;

/// Four-point Lagrange interpolation of samples on `x0 + k·dx`. Returns
/// `None` outside the grid or when a stencil point fails `ok`.
pub fn cubic_uniform<T: Real>(values: &[T], x0: T, dx: T, x: T, ok: impl Fn(usize) -> bool) -> Option<T> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let r = (x - x0) / dx;
    if !(r >= T::zero()) || r > T::from_usize_lossy(n - 1) {
        return None;
    }
    let k = r.floor().to_usize()?.min(n - 2);
    let start = k.saturating_sub(1).min(n - 4);
    if !(start..start + 4).all(&ok) {
        return None;
    }
    let s = r - T::from_usize_lossy(start);
    let nodes = [T::zero(), T::one(), T::lit(2.0), T::lit(3.0)];
    let mut acc = T::zero();
    for i in 0..4 {
        let mut l = T::one();
        for j in 0..4 {
            if i != j {
                l *= (s - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        acc += l * values[start + i];
    }
    Some(acc)
}
