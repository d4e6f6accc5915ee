//! Fourth-order first derivative on a uniform grid and the matching
//! endpoint-corrected trapezoid rule.

use std::ops::{Add, Mul, Sub};

/// Values the stencils can act on: reals and complex numbers.
pub trait GridValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl GridValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl GridValue for num_complex::Complex64 {
    fn zero() -> Self {
        num_complex::Complex64::new(0.0, 0.0)
    }
}

// one-sided closures at the first two nodes
const EDGE0: [f64; 6] = [-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -5.0 / 4.0, 1.0 / 5.0];
const EDGE1: [f64; 5] = [-3.0 / 12.0, -10.0 / 12.0, 18.0 / 12.0, -6.0 / 12.0, 1.0 / 12.0];

/// Smallest grid the closures fit on.
pub const MIN_NODES: usize = 8;

/// `out = d f / dx`, interior by the five-point centred formula.
pub fn diff<E: GridValue>(f: &[E], h: f64, out: &mut [E]) {
    let n = f.len();
    assert!(n >= MIN_NODES && out.len() == n);
    let inv = 1.0 / h;
    let c = inv / 12.0;
    for i in 2..n - 2 {
        out[i] = ((f[i + 1] - f[i - 1]) * 8.0 - (f[i + 2] - f[i - 2])) * c;
    }
    let dot =
        |w: &[f64], at: &dyn Fn(usize) -> E| w.iter().enumerate().fold(E::zero(), |acc, (k, &wk)| acc + at(k) * wk);
    out[0] = dot(&EDGE0, &|k| f[k]) * inv;
    out[1] = dot(&EDGE1, &|k| f[k]) * inv;
    out[n - 1] = dot(&EDGE0, &|k| f[n - 1 - k]) * -inv;
    out[n - 2] = dot(&EDGE1, &|k| f[n - 1 - k]) * -inv;
}

pub fn diffed<E: GridValue>(f: &[E], h: f64) -> Vec<E> {
    let mut out = vec![E::zero(); f.len()];
    diff(f, h, &mut out);
    out
}

/// Derivative at the left end only.
pub fn diff_first<E: GridValue>(f: &[E], h: f64) -> E {
    EDGE0.iter().enumerate().fold(E::zero(), |acc, (k, &w)| acc + f[k] * w) * (1.0 / h)
}

/// Derivative at the right end only.
pub fn diff_last<E: GridValue>(f: &[E], h: f64) -> E {
    let n = f.len();
    EDGE0.iter().enumerate().fold(E::zero(), |acc, (k, &w)| acc + f[n - 1 - k] * w) * (-1.0 / h)
}

/// Trapezoid rule with the `h^2/12` end correction, end slopes taken from
/// the one-sided closures.
pub fn integrate(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    let sum: f64 = f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]);
    h * sum - h * h / 12.0 * (diff_last(f, h) - diff_first(f, h))
}
