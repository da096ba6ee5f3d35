//! Small dense vector helpers.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `alpha * x + beta * y`.
pub fn axpby(alpha: f64, x: &[f64], beta: f64, y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| alpha * a + beta * b).collect()
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `||a - b|| / ||b||`, or `None` when `b` is zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> Option<f64> {
    let denom = norm(b);
    if denom == 0.0 {
        return None;
    }
    Some(norm(&axpby(1.0, a, -1.0, b)) / denom)
}
