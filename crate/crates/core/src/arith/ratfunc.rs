use std::fmt;

use num_complex::Complex64;

use super::gaussian::GaussianRational as G;
use super::poly::Poly;
use crate::error::{arg, Result};

/// Quotient of coprime polynomials over ℚ(i) with monic denominator.
/// Zero is `0 / 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Canonicalises `num / den`; errors on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return arg("rational function with zero denominator");
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lc = den.leading().unwrap().clone();
        if !lc.is_one() {
            let inv = lc.inv().unwrap();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: G) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::constant(G::one())
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Constant value if the function is constant.
    pub fn as_constant(&self) -> Option<G> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(self.num.coeffs().first().cloned().unwrap_or_else(G::zero))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::new(num, self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return arg("inverse of the zero function");
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Self {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Value at a point as a complex double; `∞` (modulus) at a pole.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// `log |f(z)|`, computed as the difference of the logs of numerator and
    /// denominator so that near-poles do not overflow.
    pub fn log_abs_at(&self, z: Complex64) -> f64 {
        self.num.eval_complex(z).norm().ln() - self.den.eval_complex(z).norm().ln()
    }

    /// `ord(f, z0)`: multiplicity of `z0` in the numerator minus that in the denominator.
    pub fn ord_at(&self, z0: &G) -> Result<i64> {
        if self.is_zero() {
            return arg("order of the zero function");
        }
        let (a, _) = self.num.root_multiplicity(z0);
        let (b, _) = self.den.root_multiplicity(z0);
        Ok(a as i64 - b as i64)
    }

    /// First nonzero coefficient of the Laurent expansion at `z0`.
    pub fn laurent_leading(&self, z0: &G) -> Result<G> {
        if self.is_zero() {
            return arg("Laurent expansion of the zero function");
        }
        let (_, n) = self.num.root_multiplicity(z0);
        let (_, d) = self.den.root_multiplicity(z0);
        Ok(&n.eval(z0) / &d.eval(z0))
    }

    pub fn ord_and_leading(&self, z0: &G) -> Result<(i64, G)> {
        Ok((self.ord_at(z0)?, self.laurent_leading(z0)?))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
