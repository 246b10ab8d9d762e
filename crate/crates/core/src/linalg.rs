//! Exact linear algebra over ℚ and ℤ for small matrices.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;
use crate::numeric::rational_to_f64;

/// Dense row-major matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// From row vectors; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn from_zmatrix(z: &ZMatrix) -> Self {
        Self {
            rows: z.rows,
            cols: z.cols,
            data: z.data.iter().cloned().map(Rational::from_integer).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out[(i, j)] += a * &o[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[Rational]) -> Rational {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out[(i * o.rows + k, j * o.cols + l)] = &self[(i, j)] * &o[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let pivot = a[(c, c)].clone();
            det *= &pivot;
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let factor = &a[(r, c)] / &pivot;
                for k in c..n {
                    let sub = &factor * &a[(c, k)];
                    a[(r, k)] -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let pivot_inv = a[(c, c)].recip();
            for k in 0..n {
                a[(c, k)] *= &pivot_inv;
                inv[(c, k)] *= &pivot_inv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let factor = a[(r, c)].clone();
                for k in 0..n {
                    let s1 = &factor * &a[(c, k)];
                    a[(r, k)] -= s1;
                    let s2 = &factor * &inv[(c, k)];
                    inv[(r, k)] -= s2;
                }
            }
        }
        Some(inv)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Exact symmetric elimination: positive definite iff every pivot is positive.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut a = self.clone();
        for c in 0..n {
            let pivot = a[(c, c)].clone();
            if !pivot.is_positive() {
                return false;
            }
            for r in c + 1..n {
                let factor = &a[(r, c)] / &pivot;
                for k in c..n {
                    let sub = &factor * &a[(c, k)];
                    a[(r, k)] -= sub;
                }
            }
        }
        true
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Self {
        let mut a = self.clone();
        let mut lead = 0;
        for c in 0..self.cols {
            let Some(p) = (lead..self.rows).find(|&r| !a[(r, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, lead);
            let inv = a[(lead, c)].recip();
            for k in 0..self.cols {
                a[(lead, k)] *= &inv;
            }
            for r in 0..self.rows {
                if r != lead && !a[(r, c)].is_zero() {
                    let f = a[(r, c)].clone();
                    for k in 0..self.cols {
                        let s = &f * &a[(lead, k)];
                        a[(r, k)] -= s;
                    }
                }
            }
            lead += 1;
            if lead == self.rows {
                break;
            }
        }
        a
    }

    pub fn rank(&self) -> usize {
        let r = self.rref();
        (0..r.rows)
            .filter(|&i| r.row(i).iter().any(|x| !x.is_zero()))
            .count()
    }

    /// Basis of the right null space as columns.
    pub fn nullspace(&self) -> Self {
        let r = self.rref();
        let mut pivots = Vec::new();
        for i in 0..r.rows {
            if let Some(c) = (0..r.cols).find(|&c| !r[(i, c)].is_zero()) {
                pivots.push(c);
            }
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                out[(p, k)] = -r[(i, f)].clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rational_to_f64(&self[(i, j)]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(crate::arith::rational_to_string)
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `n`).
    pub fn from_columns(n: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_int_columns(cols: &[&[i64]]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        let v: Vec<Vec<BigInt>> = cols
            .iter()
            .map(|c| c.iter().map(|&x| x.into()).collect())
            .collect();
        Self::from_columns(n, &v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                for j in 0..o.cols {
                    let p = &self[(i, k)] * &o[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (b, &j) in cols.iter().enumerate() {
                out[(i, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Columns of `self` followed by the columns of `o`.
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        let mut cols = self.columns();
        cols.extend(o.columns());
        Self::from_columns(self.rows, &cols)
    }

    /// Unimodular `V` with `V·self = H` in row echelon form (integer row operations).
    pub fn unimodular_echelon(&self) -> (Self, Self) {
        let mut h = self.clone();
        let mut v = Self::identity(self.rows);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            for i in r + 1..self.rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let a = h[(r, c)].clone();
                let b = h[(i, c)].clone();
                let e = a.extended_gcd(&b);
                let (x, y, g) = (e.x, e.y, e.gcd);
                let (p, q) = (-(&b / &g), &a / &g);
                for m in [&mut h, &mut v] {
                    for k in 0..m.cols {
                        let top = &x * &m[(r, k)] + &y * &m[(i, k)];
                        let bot = &p * &m[(r, k)] + &q * &m[(i, k)];
                        m[(r, k)] = top;
                        m[(i, k)] = bot;
                    }
                }
            }
            if !h[(r, c)].is_zero() {
                if h[(r, c)].is_negative() {
                    for m in [&mut h, &mut v] {
                        for k in 0..m.cols {
                            m[(r, k)] = -m[(r, k)].clone();
                        }
                    }
                }
                r += 1;
            }
        }
        (v, h)
    }

    pub fn rank(&self) -> usize {
        let (_, h) = self.unimodular_echelon();
        (0..h.rows)
            .filter(|&i| (0..h.cols).any(|j| !h[(i, j)].is_zero()))
            .count()
    }

    /// For a full-column-rank matrix: the gcd of its maximal minors, the basis of
    /// the saturation `span_ℚ ∩ ℤⁿ`, and a complement completing it to a basis of ℤⁿ.
    pub fn saturation(&self) -> Option<Saturation> {
        let k = self.cols;
        let (v, h) = self.unimodular_echelon();
        let mut index = BigInt::one();
        for i in 0..k {
            if i >= h.rows || h[(i, i)].is_zero() {
                return None;
            }
            index *= &h[(i, i)];
        }
        let u = QMatrix::from_zmatrix(&v).inverse().expect("unimodular");
        let u = ZMatrix::try_from_q(&u).expect("unimodular inverse is integral");
        let basis = u.select_columns(&(0..k).collect::<Vec<_>>());
        let complement = u.select_columns(&(k..self.rows).collect::<Vec<_>>());
        Some(Saturation {
            minor_gcd: index.abs(),
            basis,
            complement,
        })
    }

    pub fn try_from_q(q: &QMatrix) -> Option<Self> {
        let mut out = Self::zeros(q.rows(), q.cols());
        for i in 0..q.rows() {
            for j in 0..q.cols() {
                if !q[(i, j)].is_integer() {
                    return None;
                }
                out[(i, j)] = q[(i, j)].to_integer();
            }
        }
        Some(out)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Canonical form of the ℚ-span of the columns: the reduced row echelon form of
    /// the transpose with each row scaled to a primitive integer vector.
    pub fn span_key(&self) -> Vec<Vec<BigInt>> {
        let r = QMatrix::from_zmatrix(&self.transpose()).rref();
        let mut out = Vec::new();
        for i in 0..r.rows() {
            let row = r.row(i);
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            out.push(primitive(row));
        }
        out
    }
}

/// Clears denominators and content of a nonzero rational vector.
pub fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Positive content `gcd(numerators) / lcm(denominators)` of a nonzero vector,
/// so that `Σ_p log max_i |v_i|_p = -log content(v)`.
pub fn content(v: &[Rational]) -> Rational {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let num = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer()));
    Rational::new(num, den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Saturation {
    pub minor_gcd: BigInt,
    pub basis: ZMatrix,
    pub complement: ZMatrix,
}

impl std::ops::Index<(usize, usize)> for ZMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}
