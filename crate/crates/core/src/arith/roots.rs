//! Root localisation: Yun's squarefree decomposition gives exact
//! multiplicities, Aberth–Ehrlich finds the roots of each squarefree factor,
//! Newton polishes them, and rational reconstruction recovers roots that are
//! exactly Gaussian rationals.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use super::gaussian::GaussianRational as G;
use super::poly::Poly;
use super::rational::Rational;
use crate::error::{arg, Error, Result};

const MAX_ITER: usize = 2000;
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_RECON_DEN: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRoot {
    pub location: Complex64,
    pub multiplicity: u32,
    /// Set when the root is a Gaussian rational that divides the polynomial exactly.
    pub exact: Option<G>,
}

/// All complex roots of a nonzero polynomial with exact multiplicities.
pub fn roots(poly: &Poly) -> Result<Vec<ComplexRoot>> {
    if poly.is_zero() {
        return arg("roots of the zero polynomial");
    }
    let mut out = Vec::new();
    for (k, factor) in poly.squarefree_decomposition().iter().enumerate() {
        for (location, exact) in squarefree_roots(factor)? {
            out.push(ComplexRoot {
                location,
                multiplicity: k as u32 + 1,
                exact,
            });
        }
    }
    out.sort_by(|a, b| cmp_complex(a.location, b.location));
    Ok(out)
}

fn cmp_complex(a: Complex64, b: Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn abs_horner(coeffs: &[Complex64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn squarefree_roots(g: &Poly) -> Result<Vec<(Complex64, Option<G>)>> {
    let g = g.monic();
    let mut out = Vec::new();
    let mut rest = g.clone();
    if rest.trailing_zeros() > 0 {
        out.push((Complex64::zero(), Some(G::zero())));
        rest = rest.div_rem(&Poly::z()).0;
    }
    match rest.degree() {
        Some(0) | None => return Ok(out),
        Some(1) => {
            let r = -&rest.coeffs()[0];
            out.push((r.to_complex(), Some(r)));
            return Ok(out);
        }
        _ => {}
    }
    let coeffs = rest.to_complex_coeffs();
    let mut zs = aberth(&coeffs)?;
    for z in zs.iter_mut() {
        *z = newton_polish(&coeffs, *z);
        let (p, _) = horner(&coeffs, *z);
        let scale = abs_horner(&coeffs, z.norm());
        if p.norm() > RESIDUAL_TOL * scale {
            return Err(Error::NumericalGuard(format!(
                "root {z} of {rest} did not polish (residual {:.3e})",
                p.norm() / scale
            )));
        }
    }
    if rest.coeffs().iter().all(G::is_real) {
        pair_conjugates(&mut zs);
    }
    for z in zs {
        let exact = reconstruct(z).filter(|c| rest.eval(c).is_zero());
        let loc = exact.as_ref().map_or(z, G::to_complex);
        out.push((loc, exact));
    }
    Ok(out)
}

/// Simultaneous Aberth–Ehrlich iteration on a monic squarefree polynomial.
fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    // Fujiwara bound on the root moduli.
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let mut c = coeffs[n - k].norm();
        if k == n {
            c /= 2.0;
        }
        bound = bound.max(c.powf(1.0 / k as f64));
    }
    let center = -coeffs[n - 1] / n as f64;
    let radius = (2.0 * bound).max(f64::MIN_POSITIVE);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|k| center + Complex64::from_polar(radius * 0.5, 2.0 * PI * k as f64 / n as f64 + 0.7))
        .collect();
    for _ in 0..MAX_ITER {
        let mut converged = true;
        for k in 0..n {
            let (p, dp) = horner(coeffs, zs[k]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (zs[k] - zs[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            zs[k] -= step;
            if step.norm() > 1e-15 * (1.0 + zs[k].norm()) {
                converged = false;
            }
        }
        if converged {
            return Ok(zs);
        }
    }
    // Accept the iterate if the residuals are already small; the caller checks.
    if zs.iter().all(|z| z.is_finite()) {
        Ok(zs)
    } else {
        Err(Error::NumericalGuard("Aberth iteration diverged".into()))
    }
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = horner(coeffs, z).0.norm();
    for _ in 0..8 {
        let (p, dp) = horner(coeffs, z);
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let cand = z - p / dp;
        let r = horner(coeffs, cand).0.norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = cand;
    }
    z
}

/// For real-coefficient inputs: snap unpartnered near-real roots onto the
/// axis and make conjugate pairs exact conjugates.
fn pair_conjugates(zs: &mut [Complex64]) {
    let n = zs.len();
    let mut paired = vec![false; n];
    for k in 0..n {
        if paired[k] || zs[k].im <= 0.0 {
            continue;
        }
        let target = zs[k].conj();
        let partner = (0..n)
            .filter(|&j| j != k && !paired[j] && zs[j].im <= 0.0)
            .min_by(|&a, &b| (zs[a] - target).norm().total_cmp(&(zs[b] - target).norm()));
        if let Some(j) = partner {
            if (zs[j] - target).norm() <= 1e-6 * (1.0 + target.norm()) {
                let mid = (zs[k] + zs[j].conj()) / 2.0;
                zs[k] = mid;
                zs[j] = mid.conj();
                paired[k] = true;
                paired[j] = true;
            }
        }
    }
    for k in 0..n {
        if !paired[k] {
            zs[k].im = 0.0;
        }
    }
}

/// Best rational approximation with bounded denominator (continued fractions).
fn approx_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_RECON_DEN {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if (x - h1 as f64 / k1 as f64).abs() <= 1e-12 * (1.0 + x.abs()) || frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

fn reconstruct(z: Complex64) -> Option<G> {
    Some(G::new(approx_rational(z.re)?, approx_rational(z.im)?))
}
