use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{rational_to_string, Rational};
use crate::error::{arg, Result};

/// Element `a + b√d` of ℚ(√d), `d` squarefree and different from 0, 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticElement {
    pub d: i64,
    pub a: Rational,
    pub b: Rational,
}

impl QuadraticElement {
    pub fn new(d: i64, a: Rational, b: Rational) -> Self {
        Self { d, a, b }
    }

    pub fn from_rational(d: i64, a: Rational) -> Self {
        Self {
            d,
            a,
            b: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn dq(&self) -> Rational {
        Rational::from_integer(self.d.into())
    }

    /// `N(a + b√d) = a² − d b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - self.dq() * &self.b * &self.b
    }

    pub fn conj(&self) -> Self {
        Self {
            d: self.d,
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.d != o.d {
            return arg(format!("mixing ℚ(√{}) and ℚ(√{})", self.d, o.d));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self {
            d: self.d,
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self {
            d: self.d,
            a: &self.a * &o.a + self.dq() * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return arg("inverse of zero");
        }
        let n = self.norm();
        Ok(Self {
            d: self.d,
            a: &self.a / &n,
            b: -(&self.b / &n),
        })
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{sign}{}*sqrt({})",
            rational_to_string(&self.a),
            rational_to_string(&self.b.abs()),
            self.d
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn e(d: i64, a: &str, b: &str) -> QuadraticElement {
        QuadraticElement::new(d, parse_rational(a).unwrap(), parse_rational(b).unwrap())
    }

    #[test]
    fn norm_is_multiplicative() {
        let x = e(5, "1/2", "1/2");
        let y = e(5, "3", "-7/3");
        assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
        assert_eq!(x.norm(), parse_rational("-1").unwrap());
        assert_eq!(x.mul(&x.inv().unwrap()).unwrap(), e(5, "1", "0"));
        assert!(x.add(&e(-1, "1", "1")).is_err());
    }
}
