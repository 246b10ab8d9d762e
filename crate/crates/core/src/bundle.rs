//! Pseudo-norm families on `Kⁿ` and their Arakelov degrees.
//!
//! Two shapes are representable:
//!
//! * [`DiagonalPNF`]: the standard basis is orthogonal at every place, with
//!   `‖e_i‖_ω = e^{λ_i(ω)}`. Non-archimedean places combine coordinates by max;
//!   archimedean places by max or by ℓ².
//! * [`LatticeHermitianBundle`]: over ℚ, the lattice `M·ℤⁿ` gives the norm at
//!   every prime and a positive definite Gram matrix `G` gives the ℓ² norm at
//!   the real place.
//!
//! The degree is `-∫ log‖e_1 ∧ ... ∧ e_n‖_ω ν(dω)`, which is
//! `-Σ_i ∫ λ_i dν` for diagonal families and `-½ log det(Mᵀ G M)` for lattices.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::arith::{GaussianRational, Rational, RationalFunction};
use crate::curve::{AdelicCurve, CurveKind};
use crate::error::{arg, Error, Result};
use crate::linalg::{content, QMatrix, ZMatrix};
use crate::numeric::{ln_abs_bigint, ln_abs_rational, pairwise_sum};
use crate::pav::{log_pav_eval, FieldElement, Place};

/// How coordinates combine at archimedean places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArchShape {
    Max,
    L2,
}

/// The log-weight `λ_i(ω) = log ‖e_i‖_ω` of one basis vector.
#[derive(Debug, Clone, PartialEq)]
pub enum LogWeight {
    /// Number-field curves: finitely many places with nonzero weight.
    Discrete(Vec<(Place, f64)>),
    /// Disc curves: `‖e_i‖_ω = |g|_ω`, times `e^{arch_log_scale}` on the circle.
    Gauge {
        gauge: RationalFunction,
        arch_log_scale: f64,
    },
}

impl LogWeight {
    pub fn zero() -> Self {
        LogWeight::Discrete(Vec::new())
    }

    /// Weight `c` at a single place.
    pub fn at_place(place: Place, c: f64) -> Self {
        LogWeight::Discrete(vec![(place, c)])
    }

    fn neg(&self) -> Self {
        match self {
            LogWeight::Discrete(v) => {
                LogWeight::Discrete(v.iter().map(|(p, c)| (p.clone(), -c)).collect())
            }
            LogWeight::Gauge {
                gauge,
                arch_log_scale,
            } => LogWeight::Gauge {
                gauge: gauge.inv().expect("gauges are nonzero"),
                arch_log_scale: -arch_log_scale,
            },
        }
    }

    fn add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (LogWeight::Discrete(a), LogWeight::Discrete(b)) => {
                let mut out: Vec<(Place, f64)> = a.clone();
                for (p, c) in b {
                    match out.iter_mut().find(|(q, _)| q == p) {
                        Some(e) => e.1 += c,
                        None => out.push((p.clone(), *c)),
                    }
                }
                Ok(LogWeight::Discrete(out))
            }
            (
                LogWeight::Gauge {
                    gauge: g,
                    arch_log_scale: s,
                },
                LogWeight::Gauge {
                    gauge: h,
                    arch_log_scale: t,
                },
            ) => Ok(LogWeight::Gauge {
                gauge: g.mul(h),
                arch_log_scale: s + t,
            }),
            _ => arg("cannot combine discrete and gauge weights"),
        }
    }

    /// `λ(ω)`.
    pub fn value_at(&self, place: &Place) -> Result<f64> {
        match self {
            LogWeight::Discrete(v) => {
                Ok(v.iter().filter(|(p, _)| p == place).map(|(_, c)| c).sum())
            }
            LogWeight::Gauge {
                gauge,
                arch_log_scale,
            } => {
                let l = log_pav_eval(place, &FieldElement::Meromorphic(gauge.clone()))?;
                Ok(if place.is_archimedean() {
                    l + arch_log_scale
                } else {
                    l
                })
            }
        }
    }

    fn shifted_at_arch(&self, curve: &AdelicCurve, c: f64) -> Self {
        match self {
            LogWeight::Discrete(v) => {
                let mut w = LogWeight::Discrete(v.clone());
                for (pl, _) in curve.archimedean_places() {
                    w = w.add(&LogWeight::at_place(pl, c)).expect("discrete");
                }
                w
            }
            LogWeight::Gauge {
                gauge,
                arch_log_scale,
            } => LogWeight::Gauge {
                gauge: gauge.clone(),
                arch_log_scale: arch_log_scale + c,
            },
        }
    }
}

/// Diagonal pseudo-norm family on the standard basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPNF {
    curve: AdelicCurve,
    weights: Vec<LogWeight>,
    shape: ArchShape,
}

impl DiagonalPNF {
    pub fn new(curve: AdelicCurve, weights: Vec<LogWeight>, shape: ArchShape) -> Result<Self> {
        if weights.is_empty() {
            return arg("bundle rank must be positive");
        }
        for w in &weights {
            match (&curve.kind, w) {
                (
                    CurveKind::Nevanlinna { .. },
                    LogWeight::Gauge {
                        gauge,
                        arch_log_scale,
                    },
                ) => {
                    if gauge.is_zero() || !arch_log_scale.is_finite() {
                        return arg("gauge must be nonzero with a finite scale");
                    }
                }
                (CurveKind::Nevanlinna { .. }, LogWeight::Discrete(v)) if v.is_empty() => {}
                (CurveKind::Rational | CurveKind::Quadratic { .. }, LogWeight::Discrete(v)) => {
                    for (p, c) in v {
                        curve.place_mass(p)?;
                        if !c.is_finite() {
                            return arg(format!("weight at {p} must be finite"));
                        }
                    }
                }
                _ => return arg("weight kind does not match the curve"),
            }
        }
        let weights = match curve.kind {
            CurveKind::Nevanlinna { .. } => weights
                .into_iter()
                .map(|w| match w {
                    LogWeight::Discrete(_) => LogWeight::Gauge {
                        gauge: RationalFunction::one(),
                        arch_log_scale: 0.0,
                    },
                    g => g,
                })
                .collect(),
            _ => weights,
        };
        Ok(Self {
            curve,
            weights,
            shape,
        })
    }

    /// All basis vectors of norm 1 everywhere.
    pub fn standard(curve: AdelicCurve, rank: usize, shape: ArchShape) -> Result<Self> {
        Self::new(curve, vec![LogWeight::zero(); rank], shape)
    }

    /// Rank-`n` family over ℚ whose only nonzero weights sit at the real place.
    pub fn archimedean(weights: &[f64], shape: ArchShape) -> Result<Self> {
        Self::new(
            AdelicCurve::rational(),
            weights
                .iter()
                .map(|&c| LogWeight::at_place(Place::RationalInfinite, c))
                .collect(),
            shape,
        )
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn curve(&self) -> &AdelicCurve {
        &self.curve
    }

    pub fn weights(&self) -> &[LogWeight] {
        &self.weights
    }

    pub fn shape(&self) -> ArchShape {
        self.shape
    }

    fn weight_integral(&self, w: &LogWeight) -> Result<f64> {
        match w {
            LogWeight::Discrete(v) => {
                let terms: Vec<f64> = v
                    .iter()
                    .map(|(p, c)| Ok(self.curve.place_mass(p)? * c))
                    .collect::<Result<_>>()?;
                Ok(pairwise_sum(&terms))
            }
            LogWeight::Gauge {
                gauge,
                arch_log_scale,
            } => {
                let d = self
                    .curve
                    .defect(&FieldElement::Meromorphic(gauge.clone()))?;
                Ok(d.total + arch_log_scale)
            }
        }
    }

    /// Degrees `-∫ λ_i dν` of the coordinate lines.
    pub fn line_degrees(&self) -> Result<Vec<f64>> {
        self.weights
            .iter()
            .map(|w| Ok(-self.weight_integral(w)?))
            .collect()
    }

    /// Restriction to the span of the given coordinates.
    pub fn sub_bundle(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.rank()) {
            return arg("coordinate index out of range");
        }
        Self::new(
            self.curve.clone(),
            indices.iter().map(|&i| self.weights[i].clone()).collect(),
            self.shape,
        )
    }

    /// Every norm multiplied by `e^c` at each archimedean place.
    pub fn rescale_archimedean(&self, c: f64) -> Self {
        Self {
            curve: self.curve.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| w.shifted_at_arch(&self.curve, c))
                .collect(),
            shape: self.shape,
        }
    }

    /// Places carrying a nonzero weight (number-field curves only).
    pub fn weighted_places(&self) -> Vec<Place> {
        let mut out: Vec<Place> = Vec::new();
        for w in &self.weights {
            if let LogWeight::Discrete(v) = w {
                for (p, _) in v {
                    if !out.contains(p) {
                        out.push(p.clone());
                    }
                }
            }
        }
        out
    }

    /// `log ‖s‖_ω` given the coordinate log-values `log|s_i|_ω + λ_i(ω)`.
    fn combine(&self, place: &Place, logs: &[f64]) -> f64 {
        combine_logs(self.shape, place.is_archimedean(), logs)
    }

    /// `log ‖s‖_ω` at a single place.
    pub fn log_norm_at(&self, place: &Place, s: &[FieldElement]) -> Result<f64> {
        check_vector(s, self.rank())?;
        let mut logs = Vec::with_capacity(s.len());
        for (x, w) in s.iter().zip(&self.weights) {
            if x.is_zero() {
                continue;
            }
            logs.push(log_pav_eval(place, x)? + w.value_at(place)?);
        }
        Ok(self.combine(place, &logs))
    }
}

fn combine_logs(shape: ArchShape, archimedean: bool, logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !archimedean || shape == ArchShape::Max || !max.is_finite() {
        return max;
    }
    let s: f64 = logs.iter().map(|l| (2.0 * (l - max)).exp()).sum();
    max + 0.5 * s.ln()
}

fn check_vector(s: &[FieldElement], rank: usize) -> Result<()> {
    if s.len() != rank {
        return arg(format!(
            "vector of length {} in a rank-{rank} bundle",
            s.len()
        ));
    }
    if s.iter().all(FieldElement::is_zero) {
        return arg("zero vector");
    }
    Ok(())
}

/// Euclidean lattice `(M·ℤⁿ, G)` over ℚ.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHermitianBundle {
    lattice_basis: QMatrix,
    gram: QMatrix,
}

impl LatticeHermitianBundle {
    pub fn new(lattice_basis: QMatrix, gram: QMatrix) -> Result<Self> {
        let n = lattice_basis.rows();
        if n == 0 || !lattice_basis.is_square() || gram.rows() != n || !gram.is_square() {
            return arg("lattice basis and Gram matrix must be square of the same positive size");
        }
        if lattice_basis.det().is_zero() {
            return Err(Error::Infeasible("lattice basis is singular".into()));
        }
        if !gram.is_positive_definite() {
            return Err(Error::Infeasible(
                "Gram matrix is not symmetric positive definite".into(),
            ));
        }
        Ok(Self {
            lattice_basis,
            gram,
        })
    }

    /// `(ℤⁿ, I)`.
    pub fn standard(n: usize) -> Self {
        Self {
            lattice_basis: QMatrix::identity(n),
            gram: QMatrix::identity(n),
        }
    }

    /// `(ℤⁿ, G)`.
    pub fn with_gram(gram: QMatrix) -> Result<Self> {
        Self::new(QMatrix::identity(gram.rows()), gram)
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn lattice_basis(&self) -> &QMatrix {
        &self.lattice_basis
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    /// Gram matrix of the lattice basis, `Mᵀ G M`.
    pub fn lattice_gram(&self) -> QMatrix {
        self.lattice_basis
            .transpose()
            .mul(&self.gram)
            .mul(&self.lattice_basis)
    }

    /// The isometric bundle `(ℤⁿ, MᵀGM)`, written in lattice coordinates.
    pub fn in_lattice_coordinates(&self) -> Self {
        Self {
            lattice_basis: QMatrix::identity(self.rank()),
            gram: self.lattice_gram(),
        }
    }

    /// Gram scaled by `q > 0`: every archimedean norm multiplied by `√q`.
    pub fn rescale(&self, q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return arg("scale must be positive");
        }
        Ok(Self {
            lattice_basis: self.lattice_basis.clone(),
            gram: self.gram.scale(q),
        })
    }

    fn same_lattice(&self, o: &Self) -> bool {
        let Some(inv) = self.lattice_basis.inverse() else {
            return false;
        };
        let t = inv.mul(&o.lattice_basis);
        ZMatrix::try_from_q(&t).is_some() && t.det().abs().is_one()
    }

    /// `-∫ log‖s‖ dν = log content(M⁻¹ s) − ½ log(sᵀ G s)`.
    pub fn degree_of_vector(&self, s: &[Rational]) -> Result<f64> {
        if s.len() != self.rank() {
            return arg("vector length does not match the rank");
        }
        if s.iter().all(Zero::is_zero) {
            return arg("zero vector");
        }
        let y = self.lattice_basis.inverse().expect("validated").mul_vec(s);
        Ok(ln_abs_rational(&content(&y)) - 0.5 * ln_abs_rational(&self.gram.quadratic_form(s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bundle {
    Diagonal(DiagonalPNF),
    Hermitian(LatticeHermitianBundle),
}

impl Bundle {
    pub fn rank(&self) -> usize {
        match self {
            Bundle::Diagonal(b) => b.rank(),
            Bundle::Hermitian(b) => b.rank(),
        }
    }
}

impl From<DiagonalPNF> for Bundle {
    fn from(b: DiagonalPNF) -> Self {
        Bundle::Diagonal(b)
    }
}

impl From<LatticeHermitianBundle> for Bundle {
    fn from(b: LatticeHermitianBundle) -> Self {
        Bundle::Hermitian(b)
    }
}

/// Integer basis of a subspace, in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    matrix: ZMatrix,
    saturated: bool,
}

impl SubspaceBasis {
    pub fn new(matrix: ZMatrix) -> Result<Self> {
        if matrix.cols() == 0 {
            return arg("subspace basis must have at least one vector");
        }
        let sat = matrix
            .saturation()
            .ok_or_else(|| Error::Argument("subspace basis is rank deficient".into()))?;
        Ok(Self {
            saturated: sat.minor_gcd.is_one(),
            matrix,
        })
    }

    pub fn from_int_columns(cols: &[&[i64]]) -> Result<Self> {
        Self::new(ZMatrix::from_int_columns(cols))
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ZMatrix {
        &self.matrix
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Basis of `span_ℚ(B) ∩ ℤⁿ`.
    pub fn saturate(&self) -> Self {
        if self.saturated {
            return self.clone();
        }
        let sat = self.matrix.saturation().expect("full rank");
        Self {
            matrix: sat.basis,
            saturated: true,
        }
    }

    /// Canonical form of the span, equal for bases of the same saturated lattice.
    pub fn span_key(&self) -> Vec<Vec<BigInt>> {
        self.matrix.span_key()
    }

    pub fn same_span(&self, o: &Self) -> bool {
        self.span_key() == o.span_key()
    }

    pub fn full(n: usize) -> Self {
        Self {
            matrix: ZMatrix::identity(n),
            saturated: true,
        }
    }
}

/// Dual family: `λ ↦ -λ`; lattices `(M, G) ↦ (M^{-T}, G^{-1})`.
pub fn dual_bundle(b: &Bundle) -> Bundle {
    match b {
        Bundle::Diagonal(d) => Bundle::Diagonal(DiagonalPNF {
            curve: d.curve.clone(),
            weights: d.weights.iter().map(LogWeight::neg).collect(),
            shape: d.shape,
        }),
        Bundle::Hermitian(h) => Bundle::Hermitian(LatticeHermitianBundle {
            lattice_basis: h.lattice_basis.transpose().inverse().expect("validated"),
            gram: h.gram.inverse().expect("validated"),
        }),
    }
}

/// Tensor product on the Kronecker-ordered basis `e_i ⊗ f_j ↦ i·m + j`.
/// Diagonal weights add; the archimedean shape is ℓ² when both factors are ℓ²
/// and max otherwise.
pub fn tensor_bundle(a: &Bundle, b: &Bundle) -> Result<Bundle> {
    match (a, b) {
        (Bundle::Diagonal(x), Bundle::Diagonal(y)) => {
            if x.curve != y.curve {
                return arg("tensor product of families on different curves");
            }
            let mut weights = Vec::with_capacity(x.rank() * y.rank());
            for wx in &x.weights {
                for wy in &y.weights {
                    weights.push(wx.add(wy)?);
                }
            }
            let shape = if x.shape == ArchShape::L2 && y.shape == ArchShape::L2 {
                ArchShape::L2
            } else {
                ArchShape::Max
            };
            Ok(Bundle::Diagonal(DiagonalPNF {
                curve: x.curve.clone(),
                weights,
                shape,
            }))
        }
        (Bundle::Hermitian(x), Bundle::Hermitian(y)) => {
            Ok(Bundle::Hermitian(LatticeHermitianBundle {
                lattice_basis: x.lattice_basis.kron(&y.lattice_basis),
                gram: x.gram.kron(&y.gram),
            }))
        }
        _ => Err(Error::Unsupported(
            "tensor product of a diagonal and a lattice bundle".into(),
        )),
    }
}

/// Top exterior power, a rank-one bundle.
pub fn det_bundle(b: &Bundle) -> Result<Bundle> {
    match b {
        Bundle::Diagonal(d) => {
            let mut w = d.weights[0].clone();
            for x in &d.weights[1..] {
                w = w.add(x)?;
            }
            Ok(Bundle::Diagonal(DiagonalPNF {
                curve: d.curve.clone(),
                weights: vec![w],
                shape: d.shape,
            }))
        }
        Bundle::Hermitian(h) => Ok(Bundle::Hermitian(LatticeHermitianBundle {
            lattice_basis: QMatrix::diagonal(&[h.lattice_basis.det()]),
            gram: QMatrix::diagonal(&[h.gram.det()]),
        })),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    /// The sub-bundle in coordinates of `basis`.
    pub bundle: LatticeHermitianBundle,
    /// Saturated basis in lattice coordinates of the ambient bundle.
    pub basis: SubspaceBasis,
    /// Whether the input basis had to be saturated.
    pub auto_saturated: bool,
}

fn check_ambient(b: &LatticeHermitianBundle, sub: &SubspaceBasis) -> Result<()> {
    if sub.ambient_dim() != b.rank() {
        return arg(format!(
            "subspace lives in dimension {} but the bundle has rank {}",
            sub.ambient_dim(),
            b.rank()
        ));
    }
    Ok(())
}

pub fn restrict(b: &LatticeHermitianBundle, sub: &SubspaceBasis) -> Result<Restriction> {
    check_ambient(b, sub)?;
    let basis = sub.saturate();
    let s = QMatrix::from_zmatrix(basis.matrix());
    let gram = s.transpose().mul(&b.lattice_gram()).mul(&s);
    Ok(Restriction {
        bundle: LatticeHermitianBundle::with_gram(gram)?,
        basis,
        auto_saturated: !sub.is_saturated(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    /// `E/F` in coordinates of `complement`, with the quotient ℓ² norm.
    pub bundle: LatticeHermitianBundle,
    pub sub: SubspaceBasis,
    /// Columns completing `sub` to a basis of the ambient lattice; quotient
    /// coordinate `y` lifts to `complement · y`.
    pub complement: ZMatrix,
    pub auto_saturated: bool,
}

/// Quotient by a subspace: the Gram matrix is the Schur complement of the
/// subspace block after a unimodular change of basis adapted to it.
pub fn quotient(b: &LatticeHermitianBundle, sub: &SubspaceBasis) -> Result<Quotient> {
    check_ambient(b, sub)?;
    let n = b.rank();
    let k = sub.dim();
    if k == n {
        return arg("quotient by the whole space has rank zero");
    }
    let sat = sub.matrix().saturation().expect("full rank");
    let u = QMatrix::from_zmatrix(&sat.basis.hstack(&sat.complement));
    let g = u.transpose().mul(&b.lattice_gram()).mul(&u);
    let s_idx: Vec<usize> = (0..k).collect();
    let c_idx: Vec<usize> = (k..n).collect();
    let a = g.select(&s_idx, &s_idx);
    let bm = g.select(&s_idx, &c_idx);
    let d = g.select(&c_idx, &c_idx);
    let schur = {
        let corr = bm.transpose().mul(&a.inverse().expect("definite")).mul(&bm);
        let mut out = d.clone();
        for i in 0..n - k {
            for j in 0..n - k {
                out[(i, j)] = &d[(i, j)] - &corr[(i, j)];
            }
        }
        out
    };
    Ok(Quotient {
        bundle: LatticeHermitianBundle::with_gram(schur)?,
        sub: SubspaceBasis {
            matrix: sat.basis,
            saturated: true,
        },
        complement: sat.complement,
        auto_saturated: !sub.is_saturated(),
    })
}

/// Arakelov degree `-∫ log‖e_1 ∧ ... ∧ e_n‖_det dν`.
pub fn degree(b: &Bundle) -> Result<f64> {
    match b {
        Bundle::Diagonal(d) => Ok(pairwise_sum(&d.line_degrees()?)),
        Bundle::Hermitian(h) => Ok(-0.5 * ln_abs_rational(&h.lattice_gram().det())),
    }
}

/// `deg(s) = -∫ log‖s‖_ω ν(dω)` for a nonzero vector.
pub fn degree_element(b: &Bundle, s: &[FieldElement]) -> Result<f64> {
    match b {
        Bundle::Hermitian(h) => {
            let v: Vec<Rational> = s
                .iter()
                .map(|x| match x {
                    FieldElement::Rational(q) => Ok(q.clone()),
                    _ => arg("lattice bundles live over ℚ"),
                })
                .collect::<Result<_>>()?;
            h.degree_of_vector(&v)
        }
        Bundle::Diagonal(d) => {
            check_vector(s, d.rank())?;
            match &d.curve.kind {
                CurveKind::Nevanlinna { .. } => nevanlinna_degree_element(d, s),
                _ => number_field_degree_element(d, s),
            }
        }
    }
}

fn number_field_degree_element(d: &DiagonalPNF, s: &[FieldElement]) -> Result<f64> {
    let mut places = d.weighted_places();
    for x in s.iter().filter(|x| !x.is_zero()) {
        for sp in d.curve.support_places(x)? {
            if !places.contains(&sp.place) {
                places.push(sp.place);
            }
        }
    }
    for (pl, _) in d.curve.archimedean_places() {
        if !places.contains(&pl) {
            places.push(pl);
        }
    }
    let terms: Vec<f64> = places
        .iter()
        .map(|pl| Ok(d.curve.place_mass(pl)? * d.log_norm_at(pl, s)?))
        .collect::<Result<_>>()?;
    Ok(-pairwise_sum(&terms))
}

/// Interior points where some `h_i` has a zero or pole, with `ord(h_i, z)`.
struct InteriorDivisors {
    points: Vec<(Complex64, Option<GaussianRational>)>,
    /// `ords[i][k] = ord(h_i, points[k])`.
    ords: Vec<Vec<i64>>,
}

fn interior_divisors(
    curve: &AdelicCurve,
    hs: &[Option<RationalFunction>],
) -> Result<InteriorDivisors> {
    let mut points: Vec<(Complex64, Option<GaussianRational>)> = Vec::new();
    let mut entries: Vec<Vec<(usize, i64)>> = Vec::new();
    for h in hs {
        let mut mine = Vec::new();
        if let Some(h) = h {
            for (loc, mult, exact, is_zero) in curve.located_roots(&[h.numer(), h.denom()])? {
                let k = match points.iter().position(|(p, e)| match (e, &exact) {
                    (Some(a), Some(b)) => a == b,
                    _ => (p - loc).norm() <= 1e-9 * (1.0 + loc.norm()),
                }) {
                    Some(k) => k,
                    None => {
                        points.push((loc, exact.clone()));
                        points.len() - 1
                    }
                };
                let sign = if is_zero { 1 } else { -1 };
                mine.push((k, sign * mult as i64));
            }
        }
        entries.push(mine);
    }
    let ords = entries
        .iter()
        .map(|e| {
            let mut row = vec![0i64; points.len()];
            for &(k, o) in e {
                row[k] += o;
            }
            row
        })
        .collect();
    Ok(InteriorDivisors { points, ords })
}

fn gauge_parts(w: &LogWeight) -> (RationalFunction, f64) {
    match w {
        LogWeight::Gauge {
            gauge,
            arch_log_scale,
        } => (gauge.clone(), *arch_log_scale),
        LogWeight::Discrete(_) => (RationalFunction::one(), 0.0),
    }
}

fn nevanlinna_degree_element(d: &DiagonalPNF, s: &[FieldElement]) -> Result<f64> {
    let mut hs = Vec::with_capacity(s.len());
    let mut scales = Vec::with_capacity(s.len());
    for (x, w) in s.iter().zip(&d.weights) {
        let FieldElement::Meromorphic(f) = x else {
            return arg("disc bundles take meromorphic coordinates");
        };
        let (g, c) = gauge_parts(w);
        hs.push(if f.is_zero() { None } else { Some(f.mul(&g)) });
        scales.push(c);
    }
    let div = interior_divisors(&d.curve, &hs)?;
    let mut terms = Vec::with_capacity(div.points.len());
    for (k, (loc, _)) in div.points.iter().enumerate() {
        let best = (0..hs.len())
            .filter(|&i| hs[i].is_some())
            .map(|i| -div.ords[i][k])
            .max()
            .expect("nonzero vector");
        terms.push(d.curve.interior_weight(*loc).unwrap() * best as f64);
    }
    let interior = pairwise_sum(&terms);
    let shape = d.shape;
    let boundary = d.curve.boundary_mean(|z| {
        let logs: Vec<f64> = hs
            .iter()
            .zip(&scales)
            .filter_map(|(h, c)| h.as_ref().map(|h| h.log_abs_at(z) + c))
            .collect();
        combine_logs(shape, true, &logs)
    })?;
    Ok(-(interior + boundary))
}

/// Exact pieces of `deg(F) = log gcd(minors of B) − ½ log det(Bᵀ G' B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSubspaceDegree {
    pub minor_gcd: BigInt,
    pub gram_det: Rational,
}

impl ExactSubspaceDegree {
    pub fn value(&self) -> f64 {
        ln_abs_bigint(&self.minor_gcd) - 0.5 * ln_abs_rational(&self.gram_det)
    }

    /// `gcd² / det`, so that the slope over `k` dimensions is `ln(ratio) / (2k)`.
    pub fn ratio(&self) -> Rational {
        Rational::from_integer(&self.minor_gcd * &self.minor_gcd) / &self.gram_det
    }
}

pub fn subspace_degree_exact(
    b: &LatticeHermitianBundle,
    basis: &ZMatrix,
) -> Result<ExactSubspaceDegree> {
    if basis.rows() != b.rank() {
        return arg("subspace basis has the wrong ambient dimension");
    }
    let sat = basis
        .saturation()
        .ok_or_else(|| Error::Argument("subspace basis is rank deficient".into()))?;
    let bq = QMatrix::from_zmatrix(basis);
    let gram_det = bq.transpose().mul(&b.lattice_gram()).mul(&bq).det();
    Ok(ExactSubspaceDegree {
        minor_gcd: sat.minor_gcd,
        gram_det,
    })
}

/// Degree of the saturated sub-bundle spanned by the columns of `sub`.
pub fn subspace_degree(b: &LatticeHermitianBundle, sub: &SubspaceBasis) -> Result<f64> {
    Ok(subspace_degree_exact(b, sub.matrix())?.value())
}

fn hermitian_arch_distance(a: &LatticeHermitianBundle, b: &LatticeHermitianBundle) -> Result<f64> {
    if a.rank() != b.rank() {
        return arg("rank mismatch");
    }
    if !a.same_lattice(b) {
        return Err(Error::Unsupported(
            "local distance between different lattices".into(),
        ));
    }
    let ga = a.gram.to_f64();
    let gb = b.gram.to_f64();
    let chol = ga
        .cholesky()
        .ok_or_else(|| Error::Infeasible("Gram not definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Infeasible("singular factor".into()))?;
    let c = &linv * gb * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    Ok(0.5
        * eig
            .eigenvalues
            .iter()
            .map(|l| l.ln().abs())
            .fold(0.0, f64::max))
}

fn check_diagonal_pair(a: &DiagonalPNF, b: &DiagonalPNF) -> Result<()> {
    if a.curve != b.curve || a.rank() != b.rank() {
        return arg("families must share curve and rank");
    }
    if a.shape != b.shape {
        return Err(Error::Unsupported(
            "local distance between max and ℓ² archimedean shapes".into(),
        ));
    }
    Ok(())
}

/// `d_ω(ξ₁, ξ₂) = sup_{s≠0} |log‖s‖_{1,ω} − log‖s‖_{2,ω}|`.
pub fn local_distance(a: &Bundle, b: &Bundle, place: &Place) -> Result<f64> {
    match (a, b) {
        (Bundle::Diagonal(x), Bundle::Diagonal(y)) => {
            check_diagonal_pair(x, y)?;
            let mut d: f64 = 0.0;
            for (wx, wy) in x.weights.iter().zip(&y.weights) {
                d = d.max((wx.value_at(place)? - wy.value_at(place)?).abs());
            }
            Ok(d)
        }
        (Bundle::Hermitian(x), Bundle::Hermitian(y)) => {
            let arch = hermitian_arch_distance(x, y)?;
            match place {
                Place::RationalInfinite => Ok(arch),
                Place::RationalFinite(_) => Ok(0.0),
                _ => arg(format!("{place} is not a place of ℚ")),
            }
        }
        _ => Err(Error::Unsupported(
            "local distance between a diagonal and a lattice family".into(),
        )),
    }
}

/// `∫ d_ω(ξ₁, ξ₂) ν(dω)`.
pub fn distance_integral(a: &Bundle, b: &Bundle) -> Result<f64> {
    match (a, b) {
        (Bundle::Diagonal(x), Bundle::Diagonal(y)) => {
            check_diagonal_pair(x, y)?;
            match x.curve.kind {
                CurveKind::Nevanlinna { .. } => nevanlinna_distance(x, y),
                _ => {
                    let mut places = x.weighted_places();
                    for p in y.weighted_places() {
                        if !places.contains(&p) {
                            places.push(p);
                        }
                    }
                    let terms: Vec<f64> = places
                        .iter()
                        .map(|p| Ok(x.curve.place_mass(p)? * local_distance(a, b, p)?))
                        .collect::<Result<_>>()?;
                    Ok(pairwise_sum(&terms))
                }
            }
        }
        (Bundle::Hermitian(x), Bundle::Hermitian(y)) => hermitian_arch_distance(x, y),
        _ => Err(Error::Unsupported(
            "local distance between a diagonal and a lattice family".into(),
        )),
    }
}

fn nevanlinna_distance(x: &DiagonalPNF, y: &DiagonalPNF) -> Result<f64> {
    let mut ratios = Vec::new();
    let mut scales = Vec::new();
    for (wx, wy) in x.weights.iter().zip(&y.weights) {
        let (gx, cx) = gauge_parts(wx);
        let (gy, cy) = gauge_parts(wy);
        ratios.push(Some(gx.div(&gy)?));
        scales.push(cx - cy);
    }
    let div = interior_divisors(&x.curve, &ratios)?;
    let terms: Vec<f64> = div
        .points
        .iter()
        .enumerate()
        .map(|(k, (loc, _))| {
            let m = div.ords.iter().map(|row| row[k].abs()).max().unwrap_or(0);
            x.curve.interior_weight(*loc).unwrap() * m as f64
        })
        .collect();
    let boundary = x.curve.boundary_mean(|z| {
        ratios
            .iter()
            .zip(&scales)
            .map(|(r, c)| (r.as_ref().unwrap().log_abs_at(z) + c).abs())
            .fold(0.0, f64::max)
    })?;
    Ok(pairwise_sum(&terms) + boundary)
}

/// Record that a family is dominated: the model family it is compared with and
/// the (finite) integral of the local distance to it.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceWitness {
    pub model: &'static str,
    pub distance_integral: f64,
}

pub fn dominance_witness(b: &Bundle) -> Result<DominanceWitness> {
    match b {
        Bundle::Diagonal(d) => {
            let model =
                Bundle::Diagonal(DiagonalPNF::standard(d.curve.clone(), d.rank(), d.shape)?);
            Ok(DominanceWitness {
                model: "standard diagonal family",
                distance_integral: distance_integral(b, &model)?,
            })
        }
        Bundle::Hermitian(h) => {
            let model = Bundle::Hermitian(LatticeHermitianBundle::new(
                h.lattice_basis.clone(),
                QMatrix::identity(h.rank()),
            )?);
            Ok(DominanceWitness {
                model: "same lattice with identity Gram",
                distance_integral: distance_integral(b, &model)?,
            })
        }
    }
}

/// Per-place summary used by reports: which places carry weight in a diagonal family.
pub fn weight_table(d: &DiagonalPNF) -> BTreeMap<String, Vec<f64>> {
    let mut out = BTreeMap::new();
    for p in d.weighted_places() {
        let row = d
            .weights
            .iter()
            .map(|w| w.value_at(&p).unwrap_or(0.0))
            .collect();
        out.insert(p.key(), row);
    }
    out
}

/// `(ℤⁿ, diag(q_i))`: the lattice form of a diagonal family over ℚ whose only
/// weights are `λ_i = ½ log q_i` at the real place.
pub fn gram_of_squared_norms(squared_norms: &[Rational]) -> Result<LatticeHermitianBundle> {
    LatticeHermitianBundle::with_gram(QMatrix::diagonal(squared_norms))
}
