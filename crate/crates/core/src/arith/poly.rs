use std::fmt;

use num_complex::Complex64;

use super::gaussian::GaussianRational as G;

/// Univariate polynomial over ℚ(i), coefficients from low to high degree.
/// Trailing zero coefficients are never stored; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<G>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<G>) -> Self {
        while coeffs.last().is_some_and(G::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: G) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(G::one())
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Self::new(vec![G::zero(), G::one()])
    }

    /// `z - a`.
    pub fn linear(a: &G) -> Self {
        Self::new(vec![-a, G::one()])
    }

    pub fn coeffs(&self) -> &[G] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&G> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &G) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Scaled to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = G::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![G::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![G::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * dj);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &G::from_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, z: &G) -> G {
        self.coeffs
            .iter()
            .rev()
            .fold(G::zero(), |acc, c| &(&acc * z) + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(G::to_complex).collect()
    }

    /// Multiplicity of `a` as a root, by repeated exact synthetic division,
    /// together with the cofactor. Panics on the zero polynomial.
    pub fn root_multiplicity(&self, a: &G) -> (u32, Self) {
        assert!(!self.is_zero(), "multiplicity in the zero polynomial");
        let lin = Self::linear(a);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return (m, p);
            }
            p = q;
            m += 1;
        }
    }

    /// Yun's squarefree decomposition: monic `g_1, g_2, ...` with
    /// `monic(self) = ∏ g_k^k`, each `g_k` squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        assert!(!self.is_zero(), "squarefree decomposition of zero");
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        if a.is_zero() {
            a = Self::one();
        }
        let mut b = f.div_rem(&a).0;
        let mut c = fp.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        while !b.is_constant() {
            let g = b.gcd(&d);
            b = b.div_rem(&g).0;
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
            out.push(g);
        }
        out
    }

    /// Exponent of the largest power of `z` dividing the polynomial.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coef = if c.is_real() {
                c.to_string()
            } else {
                format!("({c})")
            };
            match k {
                0 => f.write_str(&coef)?,
                1 => write!(f, "({coef})*z")?,
                _ => write!(f, "({coef})*z^{k}")?,
            }
        }
        Ok(())
    }
}
