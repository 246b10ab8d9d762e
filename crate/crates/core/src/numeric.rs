//! Floating-point helpers: stable reductions, logarithms of big numbers and
//! circle quadrature.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::arith::Rational;

/// Pairwise (tree) summation. The reduction order depends only on the slice
/// length, so results are reproducible whatever produced the terms.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "ln of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return big_to_f64(n).ln();
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    big_to_f64(&top).ln() + shift as f64 * std::f64::consts::LN_2
}

fn big_to_f64(n: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}

pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

/// `ln |q|` for a nonzero rational, accurate even when `q` is huge or tiny.
pub fn ln_abs_rational(q: &Rational) -> f64 {
    assert!(!q.is_zero(), "ln of zero");
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(x) = q.to_f64() {
        if x.is_finite() && (x != 0.0 || q.is_zero()) {
            return x;
        }
    }
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs_rational(q).exp()
}

/// Nodes `R e^{iθ_k}`, `θ_k = 2πk/n`, of the periodic trapezoid rule.
pub fn circle_nodes(radius: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Mean of `g` over the circle of the given radius with the periodic trapezoid
/// rule. Node values are computed in parallel and reduced pairwise in node order.
pub fn circle_mean<F>(radius: f64, nodes: usize, g: F) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let values: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|k| {
            g(Complex64::from_polar(
                radius,
                2.0 * PI * k as f64 / nodes as f64,
            ))
        })
        .collect();
    pairwise_sum(&values) / nodes as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-13);
    }

    #[test]
    fn ln_of_huge_integer() {
        let n = BigInt::from(10).pow(500);
        assert!((ln_abs_bigint(&n) - 500.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn circle_mean_of_log_modulus_is_log_radius() {
        let m = circle_mean(3.0, 64, |z| z.norm().ln());
        assert!((m - 3f64.ln()).abs() < 1e-14);
    }
}
