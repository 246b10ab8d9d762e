use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::factor::is_prime_u64;
use crate::error::{arg, Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// p-adic valuation with `+∞` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub(crate) fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(q)`; `|q|_p = p^{-v_p(q)}`.
pub fn padic_valuation(q: &Rational, p: u64) -> Result<Valuation> {
    if !is_prime_u64(p) {
        return arg(format!("{p} is not prime"));
    }
    if q.is_zero() {
        return Ok(Valuation::Infinite);
    }
    Ok(Valuation::Finite(
        int_valuation(q.numer(), p) - int_valuation(q.denom(), p),
    ))
}

/// Parses `"a"`, `"a/b"` or a decimal `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((a, b)) = t.split_once('/') {
        let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_part = Rational::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        let mag = Rational::from_integer(int_part.abs()) + frac_part;
        return Ok(if negative { -mag } else { mag });
    }
    BigInt::from_str(t)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// `"a/b"`, or `"a"` for integers.
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&q("6/5"), 2).unwrap(), Valuation::Finite(1));
        assert_eq!(
            padic_valuation(&q("6/5"), 5).unwrap(),
            Valuation::Finite(-1)
        );
        assert_eq!(padic_valuation(&q("0"), 7).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn non_prime_is_rejected() {
        assert!(matches!(
            padic_valuation(&q("3"), 6),
            Err(Error::Argument(_))
        ));
        assert!(padic_valuation(&q("3"), 1).is_err());
    }

    #[test]
    fn literals() {
        assert_eq!(q("4/6"), Rational::new(2.into(), 3.into()));
        assert_eq!(q("-1.25"), Rational::new((-5).into(), 4.into()));
        assert_eq!(q("-0.5"), Rational::new((-1).into(), 2.into()));
        assert_eq!(q(" 7 "), Rational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(rational_to_string(&q("10/4")), "5/2");
        assert_eq!(rational_to_string(&q("-3")), "-3");
    }
}
