//! Small numerical helpers shared across modules.

use num_complex::Complex64;
use std::ops::Add;

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (tree) summation with a fixed split pattern, so the rounding
/// of a reduction depends only on the input length.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n` without materialising the terms.
pub fn pairwise_sum_by<T, F>(n: usize, f: &F) -> T
where
    T: Copy + Add<Output = T> + Default,
    F: Fn(usize) -> T,
{
    fn go<T, F>(lo: usize, hi: usize, f: &F) -> T
    where
        T: Copy + Add<Output = T> + Default,
        F: Fn(usize) -> T,
    {
        if hi - lo <= PAIRWISE_BLOCK {
            return (lo..hi).fold(T::default(), |acc, i| acc + f(i));
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Wrap `x` into the half-open principal interval `[-period/2, period/2)`.
#[inline]
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    let y = x - period * (x / period).round();
    if y >= period / 2.0 {
        y - period
    } else if y < -period / 2.0 {
        y + period
    } else {
        y
    }
}
