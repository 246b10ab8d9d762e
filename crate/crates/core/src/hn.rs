//! Slopes and Harder–Narasimhan flags.
//!
//! Diagonal families split as orthogonal sums of their coordinate lines, so
//! their flags come from sorting line degrees. Lattice bundles are handled by
//! enumerating saturated sublattices spanned by short integer vectors; every
//! answer on that path is relative to the enumeration bound.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::Rational;
use crate::bundle::{
    degree, dual_bundle, quotient, Bundle, DiagonalPNF, LatticeHermitianBundle, SubspaceBasis,
};
use crate::error::{arg, Error, Result};
use crate::linalg::{QMatrix, ZMatrix};
use crate::numeric::ln_abs_rational;

/// Line degrees closer than this are treated as equal on the split path.
pub const SPLIT_TIE_TOLERANCE: f64 = 1e-12;

/// Upper limit on (subspace, vector) pairs examined while enumerating one dimension.
const MAX_WORK: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    ExactSplit,
    /// Relative to all subspaces spanned by vectors of sup-norm at most the bound.
    Enumerated(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    pub bound: u32,
    pub max_dim: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self {
            bound: 3,
            max_dim: 6,
        }
    }
}

impl EnumConfig {
    pub fn new(bound: u32, max_dim: usize) -> Result<Self> {
        let c = Self { bound, max_dim };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound == 0 {
            return arg("enumeration bound must be at least 1");
        }
        if self.max_dim == 0 || self.max_dim > 6 {
            return arg("max_dim must lie in 1..=6");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    /// Strictly nested saturated subspaces ending at the whole space.
    pub steps: Vec<SubspaceBasis>,
    /// Slope of each subquotient `E_i / E_{i-1}`.
    pub slopes: Vec<f64>,
    pub certification: Certification,
}

impl Flag {
    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(SubspaceBasis::dim).collect()
    }

    /// Degrees of the subquotients.
    pub fn subquotient_degrees(&self) -> Vec<f64> {
        let mut prev = 0;
        self.steps
            .iter()
            .zip(&self.slopes)
            .map(|(s, mu)| {
                let r = s.dim() - prev;
                prev = s.dim();
                mu * r as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuMax {
    pub value: f64,
    /// The greatest subspace reaching `value`.
    pub subspace: SubspaceBasis,
    pub certification: Certification,
}

pub fn slope(b: &Bundle) -> Result<f64> {
    let r = b.rank();
    if r == 0 {
        return arg("slope of a rank-zero bundle");
    }
    Ok(degree(b)? / r as f64)
}

/// A saturated sublattice, keyed by its primitive Plücker vector, with
/// `det(Bᵀ G B)` for a basis `B`, which fixes its degree.
#[derive(Debug, Clone)]
struct Candidate {
    key: Vec<i64>,
    spanning: Vec<Vec<i64>>,
    gram_det: Rational,
}

impl Candidate {
    fn dim(&self) -> usize {
        self.spanning.len()
    }

    fn degree(&self) -> f64 {
        -0.5 * ln_abs_rational(&self.gram_det)
    }

    fn slope(&self) -> f64 {
        self.degree() / self.dim() as f64
    }

    fn basis(&self) -> ZMatrix {
        let n = self.spanning[0].len();
        let cols: Vec<Vec<BigInt>> = self
            .spanning
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        ZMatrix::from_columns(n, &cols)
            .saturation()
            .expect("independent")
            .basis
    }
}

/// Exact slope comparison: `μ(a) > μ(b)` iff `det_a^{k_b} < det_b^{k_a}`.
fn cmp_slope(a: &Candidate, b: &Candidate) -> Ordering {
    let lhs = pow(&a.gram_det, b.dim());
    let rhs = pow(&b.gram_det, a.dim());
    rhs.cmp(&lhs)
}

fn pow(q: &Rational, e: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e {
        out *= q;
    }
    out
}

/// Row subsets of each size as bitmasks, in increasing order, and the
/// position of each mask within its size class.
struct Subsets {
    by_size: Vec<Vec<u32>>,
    position: Vec<usize>,
}

impl Subsets {
    fn new(n: usize) -> Self {
        let mut by_size = vec![Vec::new(); n + 1];
        for m in 0u32..(1 << n) {
            by_size[m.count_ones() as usize].push(m);
        }
        let mut position = vec![0; 1 << n];
        for masks in &by_size {
            for (i, &m) in masks.iter().enumerate() {
                position[m as usize] = i;
            }
        }
        Self { by_size, position }
    }
}

/// Plücker vector of `[B | v]` from that of `B`, by expansion along `v`.
fn plucker_extend(sub: &Subsets, p: &[i64], k: usize, v: &[i64]) -> Vec<i64> {
    sub.by_size[k + 1]
        .iter()
        .map(|&mask| {
            let mut acc = 0i64;
            let mut t = 0;
            for (j, &vj) in v.iter().enumerate() {
                if mask & (1 << j) == 0 {
                    continue;
                }
                if vj != 0 {
                    let minor = p[sub.position[(mask & !(1 << j)) as usize]];
                    let sign = if (k + t) % 2 == 0 { 1 } else { -1 };
                    acc += sign * vj * minor;
                }
                t += 1;
            }
            acc
        })
        .collect()
}

/// Divide by the content and make the first nonzero entry positive.
fn normalize(p: &mut [i64]) -> bool {
    let g = p.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    if g == 0 {
        return false;
    }
    let first = p.iter().find(|x| **x != 0).copied().unwrap_or(1);
    let g = if first < 0 { -g } else { g };
    for x in p.iter_mut() {
        *x /= g;
    }
    true
}

/// `k`-th compound of an integer matrix: all `k × k` minors.
fn compound(sub: &Subsets, gi: &QMatrix, k: usize) -> Vec<Vec<BigInt>> {
    let masks = &sub.by_size[k];
    let idx = |m: u32| -> Vec<usize> { (0..gi.rows()).filter(|j| m & (1 << j) != 0).collect() };
    masks
        .iter()
        .map(|&a| {
            masks
                .iter()
                .map(|&b| gi.select(&idx(a), &idx(b)).det().to_integer())
                .collect()
        })
        .collect()
}

/// Gram determinant of a Plücker vector: `pᵀ Λᵏ(G) p`.
struct GramDet {
    compounds: Vec<Vec<Vec<BigInt>>>,
    den_pows: Vec<BigInt>,
}

impl GramDet {
    fn new(sub: &Subsets, gram: &QMatrix) -> Self {
        let n = gram.rows();
        let mut den = BigInt::one();
        for i in 0..n {
            for j in 0..n {
                den = num_integer::lcm(den, gram[(i, j)].denom().clone());
            }
        }
        let gi = gram.scale(&Rational::from_integer(den.clone()));
        let mut den_pows = vec![BigInt::one()];
        for k in 1..=n {
            den_pows.push(&den_pows[k - 1] * &den);
        }
        let compounds = (0..=n)
            .map(|k| {
                if k == 0 {
                    Vec::new()
                } else {
                    compound(sub, &gi, k)
                }
            })
            .collect();
        Self {
            compounds,
            den_pows,
        }
    }

    fn eval(&self, k: usize, p: &[i64]) -> Rational {
        let c = &self.compounds[k];
        let mut acc = BigInt::zero();
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0 {
                continue;
            }
            let mut row = BigInt::zero();
            for (j, &pj) in p.iter().enumerate() {
                if pj != 0 {
                    row += &c[i][j] * pj;
                }
            }
            acc += row * pi;
        }
        Rational::new(acc, self.den_pows[k].clone())
    }
}

/// Primitive vectors with entries in `[-B, B]`, one per sign class.
fn short_vectors(n: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = bound as i64;
    let side = (2 * b + 1) as usize;
    let total = side.pow(n as u32);
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push((idx % side) as i64 - b);
            idx /= side;
        }
        match v.iter().find(|x| **x != 0) {
            Some(x) if *x > 0 => {}
            _ => continue,
        }
        if v.iter().fold(0i64, |g, x| num_integer::gcd(g, *x)) != 1 {
            continue;
        }
        out.push(v);
    }
    out
}

/// All saturated subspaces spanned by short vectors, of every dimension.
fn enumerate(gram: &QMatrix, bound: u32) -> Result<Vec<Candidate>> {
    let n = gram.rows();
    let sub = Subsets::new(n);
    let dets = GramDet::new(&sub, gram);
    let vectors = short_vectors(n, bound);
    let mut level: Vec<(Vec<i64>, Vec<Vec<i64>>)> = vectors
        .iter()
        .map(|v| (v.clone(), vec![v.clone()]))
        .collect();
    let mut out = Vec::new();
    for k in 1..=n {
        let cands: Vec<Candidate> = level
            .par_iter()
            .map(|(key, spanning)| Candidate {
                gram_det: dets.eval(k, key),
                key: key.clone(),
                spanning: spanning.clone(),
            })
            .collect();
        out.extend(cands);
        if k == n {
            break;
        }
        if k + 1 == n {
            // The only saturated sublattice of full rank is the lattice itself.
            let spanning: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| (i == j) as i64).collect())
                .collect();
            out.push(Candidate {
                gram_det: gram.det(),
                key: vec![1],
                spanning,
            });
            break;
        }
        if level.len().saturating_mul(vectors.len()) > MAX_WORK {
            return Err(Error::Unsupported(format!(
                "enumeration would examine more than {MAX_WORK} extensions; lower the bound"
            )));
        }
        let found: Vec<(Vec<i64>, usize, usize)> = level
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, (key, _))| {
                let sub = &sub;
                vectors.iter().enumerate().filter_map(move |(j, v)| {
                    let mut p = plucker_extend(sub, key, k, v);
                    normalize(&mut p).then_some((p, i, j))
                })
            })
            .collect();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (p, i, j) in found {
            if !seen.contains(&p) {
                seen.insert(p.clone());
                let mut s = level[i].1.clone();
                s.push(vectors[j].clone());
                next.push((p, s));
            }
        }
        next.sort();
        level = next;
    }
    Ok(out)
}

/// Plücker key of independent integer columns.
fn plucker_key(sub: &Subsets, cols: &[Vec<i64>]) -> Vec<i64> {
    let mut p = vec![1i64];
    for (k, v) in cols.iter().enumerate() {
        p = plucker_extend(sub, &p, k, v);
    }
    normalize(&mut p);
    p
}

fn to_i64_columns(m: &ZMatrix) -> Result<Vec<Vec<i64>>> {
    m.columns()
        .iter()
        .map(|c| {
            c.iter()
                .map(|x| {
                    i64::try_from(x)
                        .map_err(|_| Error::Unsupported("basis entries overflow".into()))
                })
                .collect()
        })
        .collect()
}

fn lattice_gram_checked(b: &LatticeHermitianBundle, cfg: &EnumConfig) -> Result<QMatrix> {
    cfg.validate()?;
    if b.rank() > cfg.max_dim {
        return Err(Error::Unsupported(format!(
            "rank {} exceeds the enumeration limit {}",
            b.rank(),
            cfg.max_dim
        )));
    }
    Ok(b.lattice_gram())
}

/// Maximal slope over enumerated subspaces and the greatest maximizer.
fn hermitian_mu_max(gram: &QMatrix, bound: u32) -> Result<Candidate> {
    let all = enumerate(gram, bound)?;
    let best = all
        .iter()
        .max_by(|a, b| cmp_slope(a, b).then_with(|| b.key.cmp(&a.key)))
        .expect("the whole space is always enumerated");
    let maximizers: Vec<&Candidate> = all
        .iter()
        .filter(|c| cmp_slope(c, best) == Ordering::Equal)
        .collect();
    let n = gram.rows();
    let cols: Vec<Vec<BigInt>> = maximizers
        .iter()
        .flat_map(|c| {
            c.spanning
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
        })
        .collect();
    let span = ZMatrix::from_columns(n, &ZMatrix::from_columns(n, &cols).span_key());
    let basis = span.saturation().expect("independent").basis;
    let spanning = to_i64_columns(&basis)?;
    let sub = Subsets::new(n);
    let key = plucker_key(&sub, &spanning);
    let sum = Candidate {
        gram_det: GramDet::new(&sub, gram).eval(spanning.len(), &key),
        key,
        spanning,
    };
    if cmp_slope(&sum, best) == Ordering::Equal {
        return Ok(sum);
    }
    // Enumeration artifacts only: fall back to the largest maximizer.
    let largest = maximizers
        .iter()
        .copied()
        .max_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| b.key.cmp(&a.key)))
        .expect("nonempty");
    Ok(largest.clone())
}

fn split_groups(d: &DiagonalPNF) -> Result<Vec<(f64, Vec<usize>)>> {
    let degs = d.line_degrees()?;
    let mut order: Vec<usize> = (0..degs.len()).collect();
    order.sort_by(|&i, &j| degs[j].total_cmp(&degs[i]).then(i.cmp(&j)));
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some((mu, idx)) if (*mu - degs[i]).abs() <= SPLIT_TIE_TOLERANCE * (1.0 + mu.abs()) => {
                idx.push(i)
            }
            _ => groups.push((degs[i], vec![i])),
        }
    }
    Ok(groups)
}

fn coordinate_subspace(n: usize, idx: &[usize]) -> SubspaceBasis {
    let mut idx = idx.to_vec();
    idx.sort_unstable();
    let cols: Vec<Vec<BigInt>> = idx
        .iter()
        .map(|&i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    SubspaceBasis::new(ZMatrix::from_columns(n, &cols)).expect("coordinate vectors")
}

fn to_subspace(m: ZMatrix) -> SubspaceBasis {
    SubspaceBasis::new(m).expect("saturated full-rank basis")
}

/// `μ_max` with the subspace reaching it.
pub fn mu_max_enum(b: &Bundle, cfg: &EnumConfig) -> Result<MuMax> {
    match b {
        Bundle::Diagonal(d) => {
            let groups = split_groups(d)?;
            let (mu, idx) = &groups[0];
            Ok(MuMax {
                value: *mu,
                subspace: coordinate_subspace(d.rank(), idx),
                certification: Certification::ExactSplit,
            })
        }
        Bundle::Hermitian(h) => {
            let gram = lattice_gram_checked(h, cfg)?;
            let c = hermitian_mu_max(&gram, cfg.bound)?;
            Ok(MuMax {
                value: c.slope(),
                subspace: to_subspace(c.basis()),
                certification: Certification::Enumerated(cfg.bound),
            })
        }
    }
}

pub fn destabilizer(b: &Bundle, cfg: &EnumConfig) -> Result<SubspaceBasis> {
    Ok(mu_max_enum(b, cfg)?.subspace)
}

/// `μ_min(E) = -μ_max(E^∨)`, computed for lattice bundles and split families.
pub fn mu_min(b: &Bundle, cfg: &EnumConfig) -> Result<f64> {
    Ok(-mu_max_enum(&dual_bundle(b), cfg)?.value)
}

pub fn hn_flag(b: &Bundle, cfg: &EnumConfig) -> Result<Flag> {
    match b {
        Bundle::Diagonal(d) => {
            let groups = split_groups(d)?;
            let mut idx = Vec::new();
            let mut steps = Vec::new();
            let mut slopes = Vec::new();
            for (mu, g) in groups {
                idx.extend(g);
                steps.push(coordinate_subspace(d.rank(), &idx));
                slopes.push(mu);
            }
            Ok(Flag {
                steps,
                slopes,
                certification: Certification::ExactSplit,
            })
        }
        Bundle::Hermitian(h) => {
            lattice_gram_checked(h, cfg)?;
            let n = h.rank();
            let mut current = h.in_lattice_coordinates();
            // Columns lifting quotient coordinates to the ambient lattice.
            let mut lift = ZMatrix::identity(n);
            let mut below: Vec<Vec<BigInt>> = Vec::new();
            let mut steps = Vec::new();
            let mut slopes = Vec::new();
            loop {
                let c = hermitian_mu_max(current.gram(), cfg.bound)?;
                slopes.push(c.slope());
                let basis = c.basis();
                let lifted = lift.mul(&basis);
                below.extend(lifted.columns());
                steps.push(to_subspace(ZMatrix::from_columns(n, &below)));
                if below.len() == n {
                    break;
                }
                let q = quotient(&current, &to_subspace(basis))?;
                lift = lift.mul(&q.complement);
                current = q.bundle;
            }
            Ok(Flag {
                steps,
                slopes,
                certification: Certification::Enumerated(cfg.bound),
            })
        }
    }
}

/// `sup_F deg(F)` over subspaces including zero.
pub fn positive_degree(b: &Bundle, cfg: &EnumConfig) -> Result<f64> {
    match b {
        Bundle::Diagonal(d) => Ok(d.line_degrees()?.into_iter().filter(|x| *x > 0.0).sum()),
        Bundle::Hermitian(h) => {
            let gram = lattice_gram_checked(h, cfg)?;
            let best = enumerate(&gram, cfg.bound)?
                .into_iter()
                .map(|c| c.gram_det)
                .min()
                .expect("nonempty");
            Ok(f64::max(0.0, -0.5 * ln_abs_rational(&best)))
        }
    }
}

/// Enumerated subspaces with the maximal slope, for checking that the
/// destabilizer contains each of them.
pub fn enumerated_maximizers(
    b: &LatticeHermitianBundle,
    cfg: &EnumConfig,
) -> Result<Vec<SubspaceBasis>> {
    let gram = lattice_gram_checked(b, cfg)?;
    let all = enumerate(&gram, cfg.bound)?;
    let best = all.iter().max_by(|a, b| cmp_slope(a, b)).expect("nonempty");
    Ok(all
        .iter()
        .filter(|c| cmp_slope(c, best) == Ordering::Equal)
        .map(|c| to_subspace(c.basis()))
        .collect())
}

/// Whether every column of `inner` lies in the ℚ-span of `outer`.
pub fn contains(outer: &SubspaceBasis, inner: &SubspaceBasis) -> bool {
    let n = outer.ambient_dim();
    let mut cols = outer.matrix().columns();
    cols.extend(inner.matrix().columns());
    ZMatrix::from_columns(n, &cols).rank() == outer.dim()
}
