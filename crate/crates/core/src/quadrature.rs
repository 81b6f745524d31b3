//! Uniform-grid quadrature and finite-difference helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

/// Composite Simpson over `values` sampled with spacing `h`; needs an odd
/// number of samples (even number of intervals).
pub fn simpson<T>(values: &[T], h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut odd = values[1];
    let mut even = values[2] * 0.0;
    for i in (3..n - 1).step_by(2) {
        odd = odd + values[i];
    }
    for i in (2..n - 1).step_by(2) {
        even = even + values[i];
    }
    (values[0] + values[n - 1] + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Simpson on every second sample (half the resolution).
pub fn simpson_coarse<T>(values: &[T], h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    debug_assert!((n - 1) % 4 == 0);
    let m = (n - 1) / 2;
    let mut odd = values[2];
    let mut even = values[0] * 0.0;
    for k in (3..m).step_by(2) {
        odd = odd + values[2 * k];
    }
    for k in (2..m).step_by(2) {
        even = even + values[2 * k];
    }
    (values[0] + values[n - 1] + odd * 4.0 + even * 2.0) * (2.0 * h / 3.0)
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * (values[0] + values[n - 1]) + inner)
        }
    }
}

/// Running trapezoid integral starting at zero on the first sample.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for i in 1..values.len() {
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    }
    out
}

/// Running trapezoid integral that vanishes at `anchor` and proceeds outward
/// in both directions (negative on the left of the anchor for positive data).
pub fn cumulative_trapezoid_from(values: &[f64], h: f64, anchor: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for i in anchor + 1..values.len() {
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] - 0.5 * h * (values[i] + values[i + 1]);
    }
    out
}

/// Second-order derivative at sample `i`: centered in the interior,
/// three-point one-sided at the ends.
pub fn derivative_at(values: &[f64], h: f64, i: usize) -> f64 {
    let n = values.len();
    if n < 3 {
        return if n == 2 { (values[1] - values[0]) / h } else { 0.0 };
    }
    if i == 0 {
        (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
    } else {
        (values[i + 1] - values[i - 1]) / (2.0 * h)
    }
}

pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    (0..values.len()).map(|i| derivative_at(values, h, i)).collect()
}
