//! Places and their pseudo-absolute values.
//!
//! A place is an evaluation rule `f ↦ |f|_ω ∈ [0, +∞]`. Over ℚ and ℚ(√d) these
//! are genuine absolute values. On the field of meromorphic functions of a
//! closed disc, interior points give the non-archimedean `e^{-ord(f, z)}`,
//! which is infinite at poles and zero at zeros, and boundary points give
//! `|f(z)|`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::factor::{is_prime_u64, is_squarefree, legendre};
use crate::arith::{
    int_valuation, parse_gaussian, parse_rational, rational_to_string, roots, GaussianRational,
    QuadraticElement, Rational, RationalFunction,
};
use crate::error::{arg, Error, Result};
use crate::numeric::{ln_abs_rational, rational_to_f64};

/// Distance from a boundary sampling point below which a zero or pole makes
/// evaluation an error rather than a huge or tiny number.
pub const BOUNDARY_CLEARANCE: f64 = 1e-8;

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasePlace {
    Finite(u64),
    Infinite,
}

impl fmt::Display for BasePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePlace::Finite(p) => write!(f, "p={p}"),
            BasePlace::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Place {
    RationalFinite(u64),
    RationalInfinite,
    /// Place of ℚ(√d) above `base`; `index` tells apart the places above a split
    /// prime (index 0 sends √d to the root `s` with `s mod p` smallest, or
    /// `s ≡ 1 mod 4` for p = 2) or the two real embeddings (index 0 is `+√d`).
    Quadratic {
        d: i64,
        base: BasePlace,
        index: u8,
    },
    NevanlinnaInterior {
        z: GaussianRational,
        radius: Rational,
    },
    NevanlinnaBoundary {
        radius: Rational,
        theta: f64,
    },
}

/// Which kind of field element a place evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldElement {
    Rational(Rational),
    Quadratic(QuadraticElement),
    Meromorphic(RationalFunction),
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Quadratic(x) => x.is_zero(),
            FieldElement::Meromorphic(f) => f.is_zero(),
        }
    }
}

impl From<Rational> for FieldElement {
    fn from(q: Rational) -> Self {
        FieldElement::Rational(q)
    }
}

impl From<QuadraticElement> for FieldElement {
    fn from(x: QuadraticElement) -> Self {
        FieldElement::Quadratic(x)
    }
}

impl From<RationalFunction> for FieldElement {
    fn from(f: RationalFunction) -> Self {
        FieldElement::Meromorphic(f)
    }
}

/// A value in `[0, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PavValue(pub f64);

impl PavValue {
    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn ln(self) -> f64 {
        self.0.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaceKind {
    Archimedean,
    NonArchimedean,
}

/// How a rational prime (or the infinite place) behaves in ℚ(√d).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
    /// Infinite place, `d > 0`.
    Real,
    /// Infinite place, `d < 0`.
    Complex,
}

impl Place {
    pub fn nevanlinna_interior(z: GaussianRational, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return arg("disc radius must be positive");
        }
        if z.norm_sqr() >= &radius * &radius {
            return arg(format!("interior point {z} is not inside |z| < {radius}"));
        }
        Ok(Place::NevanlinnaInterior { z, radius })
    }

    pub fn quadratic(d: i64, base: BasePlace, index: u8) -> Result<Self> {
        let count = split_rational_place(d, base)?.len();
        if index as usize >= count {
            return arg(format!(
                "index {index} out of range: {count} place(s) above {base}"
            ));
        }
        Ok(Place::Quadratic { d, base, index })
    }

    pub fn classify(&self) -> PlaceKind {
        match self {
            Place::RationalInfinite
            | Place::NevanlinnaBoundary { .. }
            | Place::Quadratic {
                base: BasePlace::Infinite,
                ..
            } => PlaceKind::Archimedean,
            _ => PlaceKind::NonArchimedean,
        }
    }

    pub fn is_archimedean(&self) -> bool {
        self.classify() == PlaceKind::Archimedean
    }

    /// Canonical report key, e.g. `p=5`, `inf`, `quad(d=-1,p=5,#0)`, `nev-int(z=1/2, R=1)`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::RationalFinite(p) => write!(f, "p={p}"),
            Place::RationalInfinite => f.write_str("inf"),
            Place::Quadratic { d, base, index } => write!(f, "quad(d={d},{base},#{index})"),
            Place::NevanlinnaInterior { z, radius } => {
                write!(f, "nev-int(z={z}, R={})", rational_to_string(radius))
            }
            Place::NevanlinnaBoundary { radius, .. } => {
                write!(f, "nev-bnd(R={})", rational_to_string(radius))
            }
        }
    }
}

/// Parses the report keys produced by `Display`. Boundary keys parse with θ = 0.
pub fn parse_place(s: &str) -> Result<Place> {
    let t = s.trim();
    let bad = || Error::Parse(format!("unrecognised place key {s:?}"));
    if t == "inf" {
        return Ok(Place::RationalInfinite);
    }
    if let Some(p) = t.strip_prefix("p=") {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        if !is_prime_u64(p) {
            return arg(format!("{p} is not prime"));
        }
        return Ok(Place::RationalFinite(p));
    }
    if let Some(body) = t.strip_prefix("quad(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let d: i64 = parts[0]
            .strip_prefix("d=")
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let base = match parse_place(parts[1])? {
            Place::RationalFinite(p) => BasePlace::Finite(p),
            Place::RationalInfinite => BasePlace::Infinite,
            _ => return Err(bad()),
        };
        let index: u8 = parts[2]
            .strip_prefix('#')
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        return Place::quadratic(d, base, index);
    }
    if let Some(body) = t.strip_prefix("nev-int(").and_then(|r| r.strip_suffix(')')) {
        let (z, r) = body.rsplit_once(',').ok_or_else(bad)?;
        let z = parse_gaussian(z.trim().strip_prefix("z=").ok_or_else(bad)?)?;
        let r = parse_rational(r.trim().strip_prefix("R=").ok_or_else(bad)?)?;
        return Place::nevanlinna_interior(z, r);
    }
    if let Some(body) = t.strip_prefix("nev-bnd(").and_then(|r| r.strip_suffix(')')) {
        let r = parse_rational(body.trim().strip_prefix("R=").ok_or_else(bad)?)?;
        if !r.is_positive() {
            return arg("disc radius must be positive");
        }
        return Ok(Place::NevanlinnaBoundary {
            radius: r,
            theta: 0.0,
        });
    }
    Err(bad())
}

fn mismatch<T>(place: &Place, f: &FieldElement) -> Result<T> {
    arg(format!("place {place} cannot evaluate {f:?}"))
}

/// `log |f|_ω` in `[-∞, +∞]`.
pub fn log_pav_eval(place: &Place, f: &FieldElement) -> Result<f64> {
    match (place, f) {
        (Place::RationalFinite(p), FieldElement::Rational(q)) => {
            if q.is_zero() {
                return Ok(f64::NEG_INFINITY);
            }
            let v = int_valuation(q.numer(), *p) - int_valuation(q.denom(), *p);
            Ok(-(v as f64) * (*p as f64).ln())
        }
        (Place::RationalInfinite, FieldElement::Rational(q)) => Ok(if q.is_zero() {
            f64::NEG_INFINITY
        } else {
            ln_abs_rational(q)
        }),
        (Place::Quadratic { d, base, index }, FieldElement::Quadratic(x)) if x.d == *d => {
            quadratic_log_abs(*d, *base, *index, x)
        }
        (Place::Quadratic { d, .. }, FieldElement::Rational(q)) => {
            let x = QuadraticElement::from_rational(*d, q.clone());
            log_pav_eval(place, &FieldElement::Quadratic(x))
        }
        (Place::NevanlinnaInterior { z, .. }, FieldElement::Meromorphic(g)) => {
            if g.is_zero() {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(-(g.ord_at(z)? as f64))
        }
        (Place::NevanlinnaBoundary { radius, theta }, FieldElement::Meromorphic(g)) => {
            boundary_log_abs(radius, *theta, g)
        }
        _ => mismatch(place, f),
    }
}

/// `|f|_ω`.
pub fn pav_eval(place: &Place, f: &FieldElement) -> Result<PavValue> {
    Ok(PavValue(log_pav_eval(place, f)?.exp()))
}

/// Membership in the finiteness ring `{|f|_ω < ∞}`.
pub fn is_finite(place: &Place, f: &FieldElement) -> Result<bool> {
    Ok(log_pav_eval(place, f)? < f64::INFINITY)
}

/// Membership in the kernel `{|f|_ω = 0}`.
pub fn in_kernel(place: &Place, f: &FieldElement) -> Result<bool> {
    Ok(log_pav_eval(place, f)? == f64::NEG_INFINITY)
}

/// The exact point `R e^{iθ}` when θ is a multiple of π/2.
fn exact_axis_point(radius: &Rational, theta: f64) -> Option<GaussianRational> {
    let t = theta.rem_euclid(2.0 * PI);
    let quarter = (t / FRAC_PI_2).round();
    if (t - quarter * FRAC_PI_2).abs() > 1e-15 {
        return None;
    }
    let r = radius.clone();
    let zero = Rational::zero();
    Some(match quarter as i64 % 4 {
        0 => GaussianRational::new(r, zero),
        1 => GaussianRational::new(zero, r),
        2 => GaussianRational::new(-r, zero),
        _ => GaussianRational::new(zero, -r),
    })
}

fn boundary_log_abs(radius: &Rational, theta: f64, g: &RationalFunction) -> Result<f64> {
    if g.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    if let Some(pt) = exact_axis_point(radius, theta) {
        if g.denom().eval(&pt).is_zero() {
            return Ok(f64::INFINITY);
        }
        if g.numer().eval(&pt).is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
    }
    let z = Complex64::from_polar(rational_to_f64(radius), theta);
    for poly in [g.numer(), g.denom()] {
        for root in roots(poly)? {
            let dist = (root.location - z).norm();
            if dist < BOUNDARY_CLEARANCE {
                return Err(Error::NumericalGuard(format!(
                    "zero or pole at {} lies {dist:.2e} from the sampling point {z}",
                    root.location
                )));
            }
        }
    }
    Ok(g.log_abs_at(z))
}

/// Places of ℚ(√d) above a place of ℚ with their extension weights
/// `[L_x : ℚ_ω] / [L : ℚ]`, which sum to 1.
pub fn split_rational_place(d: i64, base: BasePlace) -> Result<Vec<(Place, Rational)>> {
    let kind = splitting(d, base)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let place = |index| Place::Quadratic { d, base, index };
    Ok(match kind {
        Splitting::Split | Splitting::Real => vec![(place(0), half.clone()), (place(1), half)],
        Splitting::Inert | Splitting::Ramified | Splitting::Complex => {
            vec![(place(0), Rational::one())]
        }
    })
}

fn check_d(d: i64) -> Result<()> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return arg(format!(
            "d = {d} must be a squarefree integer other than 0 and 1"
        ));
    }
    Ok(())
}

/// Splitting behaviour through the Kronecker symbol, with the ramified primes
/// read off from the discriminant (`d` if `d ≡ 1 mod 4`, else `4d`).
pub fn splitting(d: i64, base: BasePlace) -> Result<Splitting> {
    check_d(d)?;
    Ok(match base {
        BasePlace::Infinite => {
            if d > 0 {
                Splitting::Real
            } else {
                Splitting::Complex
            }
        }
        BasePlace::Finite(2) => match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        },
        BasePlace::Finite(p) => {
            if !is_prime_u64(p) {
                return arg(format!("{p} is not prime"));
            }
            match legendre(d, p) {
                0 => Splitting::Ramified,
                1 => Splitting::Split,
                _ => Splitting::Inert,
            }
        }
    })
}

fn modpow(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.mod_floor(m).modpow(e, m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// A square root of `d` modulo `p^k` on the branch selected by `index`.
fn sqrt_mod_prime_power(d: i64, p: u64, k: u32, index: u8) -> BigInt {
    let dp = BigInt::from(d);
    if p == 2 {
        // d ≡ 1 mod 8: s ≡ 1 mod 4 is index 0; lifting s ↦ s + 2^{m-1} preserves s mod 4.
        let target = k + 1;
        let mut s = BigInt::one();
        let mut m = 3u32;
        while m < target {
            let modulus = BigInt::one() << (m + 1);
            if (&s * &s - &dp).mod_floor(&modulus) != BigInt::zero() {
                s += BigInt::one() << (m - 1);
            }
            m += 1;
        }
        if index == 1 {
            s = -s;
        }
        return s.mod_floor(&(BigInt::one() << k.max(1)));
    }
    let pb = BigInt::from(p);
    let dm = dp.mod_floor(&pb);
    let mut s0 = tonelli(&dm, &pb);
    let other = (&pb - &s0).mod_floor(&pb);
    if other < s0 {
        s0 = other;
    }
    if index == 1 {
        s0 = (&pb - &s0).mod_floor(&pb);
    }
    let mut s = s0;
    let mut modulus = pb.clone();
    for _ in 1..k {
        modulus *= &pb;
        let f = (&s * &s - &dp).mod_floor(&modulus);
        let df = (BigInt::from(2) * &s).mod_floor(&modulus);
        s = (&s - f * mod_inverse(&df, &modulus)).mod_floor(&modulus);
    }
    s
}

fn tonelli(n: &BigInt, p: &BigInt) -> BigInt {
    let one = BigInt::one();
    let two = BigInt::from(2);
    if n.is_zero() {
        return BigInt::zero();
    }
    let pm1 = p - &one;
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q /= &two;
        s += 1;
    }
    let mut z = two.clone();
    while modpow(&z, &(&pm1 / &two), p) != pm1 {
        z += &one;
    }
    let mut m = s;
    let mut c = modpow(&z, &q, p);
    let mut t = modpow(n, &q, p);
    let mut r = modpow(n, &((&q + &one) / &two), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = modpow(&c, &(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    r
}

fn quadratic_log_abs(d: i64, base: BasePlace, index: u8, x: &QuadraticElement) -> Result<f64> {
    if x.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    let norm = x.norm();
    match splitting(d, base)? {
        Splitting::Complex => Ok(0.5 * ln_abs_rational(&norm)),
        Splitting::Real => {
            let sd = (d as f64).sqrt();
            let (a, b) = (rational_to_f64(&x.a), rational_to_f64(&x.b));
            let plus = a + b * sd;
            let minus = a - b * sd;
            let (mine, other) = if index == 0 {
                (plus, minus)
            } else {
                (minus, plus)
            };
            // The larger conjugate is accurate; recover the smaller through the norm.
            if mine.abs() >= other.abs() {
                Ok(mine.abs().ln())
            } else {
                Ok(ln_abs_rational(&norm) - other.abs().ln())
            }
        }
        Splitting::Inert | Splitting::Ramified => {
            let BasePlace::Finite(p) = base else {
                unreachable!()
            };
            let v = int_valuation(norm.numer(), p) - int_valuation(norm.denom(), p);
            Ok(-0.5 * v as f64 * (p as f64).ln())
        }
        Splitting::Split => {
            let BasePlace::Finite(p) = base else {
                unreachable!()
            };
            let den = x.a.denom().lcm(x.b.denom());
            let big_a = x.a.numer() * (&den / x.a.denom());
            let big_b = x.b.numer() * (&den / x.b.denom());
            let int_norm = &big_a * &big_a - BigInt::from(d) * &big_b * &big_b;
            let k = int_valuation(&int_norm, p) as u32 + 1;
            let s = sqrt_mod_prime_power(d, p, k, index);
            let modulus = BigInt::from(p).pow(k);
            let image = (&big_a + &big_b * s).mod_floor(&modulus);
            debug_assert!(!image.is_zero());
            let v = int_valuation(&image, p) - int_valuation(&den, p);
            Ok(-(v as f64) * (p as f64).ln())
        }
    }
}
