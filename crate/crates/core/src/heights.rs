//! Heights of points and the Nevanlinna functions of a meromorphic function
//! on discs.
//!
//! Counting and proximity follow the classical definitions. For the
//! first-main-theorem check the proximity is taken with respect to the max
//! metric on `O(1)` over `ℙ¹`, for which the change of target is an exact
//! identity:
//!
//! ```text
//! m̃(r, a) = mean log max(1, |f|) − mean log |f − a|      (a finite)
//! m̃(r, ∞) = mean log max(1, |f|)
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{parse_gaussian, GaussianRational, Poly, Rational, RationalFunction};
use crate::bundle::{
    distance_integral, tensor_bundle, ArchShape, Bundle, DiagonalPNF, LatticeHermitianBundle,
};
use crate::curve::{AdelicCurve, CurveKind, IntegrationConfig};
use crate::error::{arg, Error, Result};
use crate::numeric::{ln_abs_rational, pairwise_sum};
use crate::pav::{log_pav_eval, FieldElement};

/// `T` below this makes `m / T` meaningless; such rows are skipped.
pub const DEFECT_MIN_T: f64 = 1e-6;

/// Homogeneous coordinates of a point of `ℙⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        if coords.len() < 2 {
            return arg("a projective point needs at least two coordinates");
        }
        if coords.iter().all(FieldElement::is_zero) {
            return arg("all coordinates are zero");
        }
        Ok(Self { coords })
    }

    pub fn rational(coords: &[Rational]) -> Result<Self> {
        Self::new(coords.iter().cloned().map(FieldElement::Rational).collect())
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::rational(
            &coords
                .iter()
                .map(|&x| Rational::from_integer(x.into()))
                .collect::<Vec<_>>(),
        )
    }

    pub fn holomorphic(coords: &[RationalFunction]) -> Result<Self> {
        Self::new(
            coords
                .iter()
                .cloned()
                .map(FieldElement::Meromorphic)
                .collect(),
        )
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Index of the first nonzero coordinate.
    pub fn first_nonzero(&self) -> usize {
        self.coords
            .iter()
            .position(|x| !x.is_zero())
            .expect("validated")
    }

    /// Segre image in `ℙ^{(n+1)(m+1)-1}`, coordinates `x_i y_j` at `i·(m+1) + j`.
    pub fn segre(&self, o: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coords.len() * o.coords.len());
        for x in &self.coords {
            for y in &o.coords {
                out.push(mul_elements(x, y)?);
            }
        }
        Self::new(out)
    }

    /// Coordinates as coprime polynomials, and whether anything had to be cleared.
    pub fn reduced_polynomials(&self) -> Result<(Vec<Poly>, bool)> {
        let fs: Vec<&RationalFunction> = self
            .coords
            .iter()
            .map(|x| match x {
                FieldElement::Meromorphic(f) => Ok(f),
                _ => arg("expected meromorphic coordinates"),
            })
            .collect::<Result<_>>()?;
        let mut lcm = Poly::one();
        for f in &fs {
            let g = lcm.gcd(f.denom());
            lcm = lcm.mul(&f.denom().div_rem(&g).0);
        }
        let polys: Vec<Poly> = fs
            .iter()
            .map(|f| f.numer().mul(&lcm.div_rem(f.denom()).0))
            .collect();
        let mut g = Poly::zero();
        for p in &polys {
            g = if g.is_zero() { p.monic() } else { g.gcd(p) };
        }
        let reduced = !lcm.is_constant() || !g.is_constant();
        Ok((polys.iter().map(|p| p.div_rem(&g).0).collect(), reduced))
    }
}

fn mul_elements(x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    use FieldElement::*;
    Ok(match (x, y) {
        (Rational(a), Rational(b)) => Rational(a * b),
        (Quadratic(a), Quadratic(b)) => Quadratic(a.mul(b)?),
        (Quadratic(a), Rational(b)) | (Rational(b), Quadratic(a)) => Quadratic(a.mul(
            &crate::arith::QuadraticElement::from_rational(a.d, b.clone()),
        )?),
        (Meromorphic(a), Meromorphic(b)) => Meromorphic(a.mul(b)),
        _ => return arg("coordinates from different fields"),
    })
}

/// Fubini–Study metric on `O(1)` induced by a norm family on `K^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FSMetricSpec {
    pub ambient: Bundle,
}

impl FSMetricSpec {
    pub fn new(ambient: Bundle) -> Self {
        Self { ambient }
    }

    /// Standard diagonal metric on `ℙⁿ` over the given curve.
    pub fn standard(curve: AdelicCurve, n: usize, shape: ArchShape) -> Result<Self> {
        Ok(Self {
            ambient: DiagonalPNF::standard(curve, n + 1, shape)?.into(),
        })
    }

    /// Metric on `O(m)` through the `m`-fold tensor power of the ambient.
    pub fn tensor(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            ambient: tensor_bundle(&self.ambient, &o.ambient)?,
        })
    }
}

/// `h(P) = ∫ [log‖x‖_ω − log|x_j|_ω] ν(dω)` on a proper curve.
pub fn fs_height(curve: &AdelicCurve, spec: &FSMetricSpec, p: &ProjectivePoint) -> Result<f64> {
    if !curve.is_proper() {
        return arg("heights of points need a proper curve");
    }
    if spec.ambient.rank() != p.coords.len() {
        return arg(format!(
            "ambient rank {} does not match a point with {} coordinates",
            spec.ambient.rank(),
            p.coords.len()
        ));
    }
    let j = p.first_nonzero();
    match &spec.ambient {
        Bundle::Hermitian(h) => {
            if curve.kind != CurveKind::Rational {
                return Err(Error::Unsupported(
                    "lattice metrics are defined over ℚ only".into(),
                ));
            }
            let x: Vec<Rational> = p
                .coords
                .iter()
                .map(|c| match c {
                    FieldElement::Rational(q) => Ok(q.clone()),
                    _ => arg("lattice metrics take rational points"),
                })
                .collect::<Result<_>>()?;
            lattice_height(h, &x)
        }
        Bundle::Diagonal(d) => {
            if d.curve() != curve {
                return arg("metric and point live on different curves");
            }
            let mut places = d.weighted_places();
            for x in p.coords.iter().filter(|x| !x.is_zero()) {
                for sp in curve.support_places(x)? {
                    if !places.contains(&sp.place) {
                        places.push(sp.place);
                    }
                }
            }
            for (pl, _) in curve.archimedean_places() {
                if !places.contains(&pl) {
                    places.push(pl);
                }
            }
            let terms: Vec<f64> = places
                .iter()
                .map(|pl| {
                    let local = d.log_norm_at(pl, &p.coords)? - log_pav_eval(pl, &p.coords[j])?;
                    Ok(curve.place_mass(pl)? * local)
                })
                .collect::<Result<_>>()?;
            Ok(pairwise_sum(&terms))
        }
    }
}

fn lattice_height(h: &LatticeHermitianBundle, x: &[Rational]) -> Result<f64> {
    Ok(-h.degree_of_vector(x)?)
}

/// A target value `a ∈ ℙ¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    Finite(GaussianRational),
    Infinity,
}

impl Target {
    pub fn zero() -> Self {
        Target::Finite(GaussianRational::zero())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Finite(a) => write!(f, "{a}"),
            Target::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Target::Infinity),
            t => Ok(Target::Finite(parse_gaussian(t)?)),
        }
    }
}

fn disc(r: &Rational, cfg: &IntegrationConfig) -> Result<AdelicCurve> {
    AdelicCurve::nevanlinna(r.clone())?.with_integration(cfg.clone())
}

/// `f − a`, or `None` for `a = ∞`.
fn shifted(f: &RationalFunction, a: &Target) -> Result<Option<RationalFunction>> {
    match a {
        Target::Infinity => Ok(None),
        Target::Finite(a) => {
            let g = f.sub(&RationalFunction::constant(a.clone()));
            if g.is_zero() {
                return arg(format!("f is identically {a}"));
            }
            Ok(Some(g))
        }
    }
}

/// Points of `f = a` in the disc (poles for `a = ∞`), after checking that no
/// zero or pole of `f − a` is near the circle.
fn a_points(
    curve: &AdelicCurve,
    f: &RationalFunction,
    a: &Target,
) -> Result<Vec<(Complex64, u32)>> {
    let (num, den) = match shifted(f, a)? {
        Some(g) => (g.numer().clone(), g.denom().clone()),
        None => (f.denom().clone(), f.numer().clone()),
    };
    Ok(curve
        .located_roots(&[&num, &den])?
        .into_iter()
        .filter(|r| r.3)
        .map(|(z, m, _, _)| (z, m))
        .collect())
}

/// `N(r, a)`, truncated at multiplicity `k` when given.
pub fn counting_n(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    truncation: Option<u32>,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    counting_on(&curve, f, a, truncation)
}

fn counting_on(
    curve: &AdelicCurve,
    f: &RationalFunction,
    a: &Target,
    truncation: Option<u32>,
) -> Result<f64> {
    let terms: Vec<f64> = a_points(curve, f, a)?
        .into_iter()
        .map(|(z, m)| truncation.map_or(m, |k| m.min(k)) as f64 * curve.interior_weight(z).unwrap())
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `Σ mult · log(r / max(1, |z|))`, the form `∫₁^r n(t) dt / t`; agrees with
/// [`counting_n`] when no `a`-points lie in `0 < |z| ≤ 1`.
pub fn counting_integral_form(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    let rf = curve.radius_f64().unwrap();
    let terms: Vec<f64> = a_points(&curve, f, a)?
        .into_iter()
        .map(|(z, m)| m as f64 * (rf / z.norm().max(1.0)).ln().max(0.0))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Classical proximity: mean of `log⁺|f|` (`a = ∞`) or `log⁺ 1/|f − a|`.
pub fn proximity_m(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    proximity_on(&curve, f, a)
}

fn proximity_on(curve: &AdelicCurve, f: &RationalFunction, a: &Target) -> Result<f64> {
    a_points(curve, f, a)?;
    match shifted(f, a)? {
        None => curve.boundary_mean(|z| f.log_abs_at(z).max(0.0)),
        Some(g) => curve.boundary_mean(|z| (-g.log_abs_at(z)).max(0.0)),
    }
}

/// Proximity for the max metric on `O(1)`.
pub fn metrized_proximity(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    metrized_proximity_on(&curve, f, a)
}

fn metrized_proximity_on(curve: &AdelicCurve, f: &RationalFunction, a: &Target) -> Result<f64> {
    a_points(curve, f, a)?;
    let g = shifted(f, a)?;
    // f's own zeros and poles must also clear the circle for the max term.
    curve.located_roots(&[f.numer(), f.denom()])?;
    let base = curve.boundary_mean(|z| f.log_abs_at(z).max(0.0))?;
    match g {
        None => Ok(base),
        Some(g) => Ok(base - curve.boundary_mean(|z| g.log_abs_at(z))?),
    }
}

/// `T(r, f; a) = m(r, a) + N(r, a)`.
pub fn characteristic_t(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    Ok(proximity_on(&curve, f, a)? + counting_on(&curve, f, a, None)?)
}

/// `m̃(r, a) + N(r, a)`.
pub fn metrized_characteristic(
    f: &RationalFunction,
    a: &Target,
    r: &Rational,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let curve = disc(r, cfg)?;
    Ok(metrized_proximity_on(&curve, f, a)? + counting_on(&curve, f, a, None)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRow {
    pub target: Target,
    pub radius: Rational,
    pub n: f64,
    pub n_truncated: f64,
    pub m: f64,
    pub t: f64,
    pub fs_height: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicReport {
    pub rows: Vec<CharacteristicRow>,
    /// `(target, radius, message)` for rows that hit a guard.
    pub failures: Vec<(Target, Rational, String)>,
}

/// `N`, `N_k`, `m`, `T` for each target and radius. With `shape` set, also
/// the height of `[1 : f]` for that archimedean shape and its gap to `T(r, ∞)`.
pub fn characteristic_table(
    f: &RationalFunction,
    targets: &[Target],
    radii: &[Rational],
    truncation: u32,
    shape: Option<ArchShape>,
    cfg: &IntegrationConfig,
) -> Result<CharacteristicReport> {
    if truncation == 0 {
        return arg("truncation level must be at least 1");
    }
    let mut radii = radii.to_vec();
    radii.sort();
    radii.dedup();
    let jobs: Vec<(&Target, &Rational)> = targets
        .iter()
        .flat_map(|t| radii.iter().map(move |r| (t, r)))
        .collect();
    let point = ProjectivePoint::holomorphic(&[RationalFunction::one(), f.clone()])?;
    let results: Vec<Result<CharacteristicRow>> = jobs
        .par_iter()
        .map(|&(a, r)| {
            let curve = disc(r, cfg)?;
            let n = counting_on(&curve, f, a, None)?;
            let n_truncated = counting_on(&curve, f, a, Some(truncation))?;
            let m = proximity_on(&curve, f, a)?;
            let (fs_height, gap) = match shape {
                Some(s) => {
                    let c = cartan_fs_height(&point, s, r, None, cfg)?;
                    (Some(c.value), c.gap)
                }
                None => (None, None),
            };
            Ok(CharacteristicRow {
                target: a.clone(),
                radius: r.clone(),
                n,
                n_truncated,
                m,
                t: m + n,
                fs_height,
                gap,
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for ((a, r), res) in jobs.into_iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e @ Error::NumericalGuard(_)) => {
                failures.push((a.clone(), r.clone(), e.to_string()))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CharacteristicReport { rows, failures })
}

/// Height of a holomorphic curve `[f₀ : ... : f_n]` over the disc of radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanHeight {
    pub radius: Rational,
    pub value: f64,
    /// Coordinate `j` whose defect is subtracted.
    pub coordinate: usize,
    /// Whether the coordinates had to be cleared of denominators or common factors.
    pub reduced: bool,
    /// For `ℙ¹`: `T(R, f₁/f₀)` at `∞`, and `value − T`.
    pub characteristic: Option<f64>,
    pub gap: Option<f64>,
    /// For `ℙ¹`: the bound `|gap| ≤ ½ log 2 · [ℓ²] + |log|c(f_j)| − log|c(f₀)||`.
    pub gap_bound: Option<f64>,
}

fn ln_abs_g(c: &GaussianRational) -> f64 {
    0.5 * ln_abs_rational(&c.norm_sqr())
}

pub fn cartan_fs_height(
    p: &ProjectivePoint,
    shape: ArchShape,
    r: &Rational,
    coordinate: Option<usize>,
    cfg: &IntegrationConfig,
) -> Result<CartanHeight> {
    let curve = disc(r, cfg)?;
    let (polys, reduced) = p.reduced_polynomials()?;
    let j = match coordinate {
        Some(j) if j < polys.len() && !polys[j].is_zero() => j,
        Some(_) => return arg("chosen coordinate is zero or out of range"),
        None => polys
            .iter()
            .position(|q| !q.is_zero())
            .expect("nonzero point"),
    };
    let nonzero: Vec<&Poly> = polys.iter().filter(|q| !q.is_zero()).collect();
    // Interior: −min_i ord(f_i, z) at each zero of any coordinate.
    let located = curve.located_roots(&nonzero)?;
    let mut seen: Vec<Complex64> = Vec::new();
    let mut interior = Vec::new();
    for (z, _, exact, _) in &located {
        if seen
            .iter()
            .any(|w| (w - z).norm() <= 1e-9 * (1.0 + z.norm()))
        {
            continue;
        }
        seen.push(*z);
        let min_ord = nonzero
            .iter()
            .map(|q| match exact {
                Some(e) => q.root_multiplicity(e).0 as i64,
                None => located
                    .iter()
                    .filter(|(w, _, _, _)| (w - z).norm() <= 1e-9 * (1.0 + z.norm()))
                    .filter(|_| q.eval_complex(*z).norm() <= 1e-9 * poly_scale(q, *z))
                    .map(|(_, m, _, _)| *m as i64)
                    .next()
                    .unwrap_or(0),
            })
            .min()
            .unwrap_or(0);
        if min_ord != 0 {
            interior.push(-(min_ord as f64) * curve.interior_weight(*z).unwrap());
        }
    }
    let boundary = curve.boundary_mean(|z| {
        let logs: Vec<f64> = nonzero
            .iter()
            .map(|q| q.eval_complex(z).norm().ln())
            .collect();
        combine(shape, &logs)
    })?;
    let leading = |q: &Poly| -> Result<f64> {
        Ok(ln_abs_g(
            &RationalFunction::from_poly(q.clone()).laurent_leading(&GaussianRational::zero())?,
        ))
    };
    let d_j = leading(&polys[j])?;
    let value = pairwise_sum(&interior) + boundary - d_j;
    let (characteristic, gap, gap_bound) = if polys.len() == 2 && !polys[0].is_zero() {
        let f = RationalFunction::new(polys[1].clone(), polys[0].clone())?;
        let t = proximity_on(&curve, &f, &Target::Infinity)?
            + counting_on(&curve, &f, &Target::Infinity, None)?;
        let shape_term = if shape == ArchShape::L2 {
            0.5 * 2f64.ln()
        } else {
            0.0
        };
        let bound = shape_term + (d_j - leading(&polys[0])?).abs();
        (Some(t), Some(value - t), Some(bound))
    } else {
        (None, None, None)
    };
    Ok(CartanHeight {
        radius: r.clone(),
        value,
        coordinate: j,
        reduced,
        characteristic,
        gap,
        gap_bound,
    })
}

fn poly_scale(q: &Poly, z: Complex64) -> f64 {
    let r = z.norm().max(1.0);
    q.to_complex_coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * r.powi(k as i32))
        .sum()
}

fn combine(shape: ArchShape, logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match shape {
        ArchShape::Max => max,
        ArchShape::L2 => {
            max + 0.5
                * logs
                    .iter()
                    .map(|l| (2.0 * (l - max)).exp())
                    .sum::<f64>()
                    .ln()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FmtRow {
    pub radius: Rational,
    /// `T̃(R, a₁) − T̃(R, a₂)` for the max metric.
    pub difference: Result<f64>,
    /// `log |c((f − a₂)/(f − a₁), 0)|`, with `f − ∞` read as 1.
    pub reference: f64,
    pub gap: Option<f64>,
}

/// First main theorem: the change of target moves the characteristic by the
/// log of the leading coefficient at 0, at every radius.
pub fn fmt_section_gap(
    f: &RationalFunction,
    a1: &Target,
    a2: &Target,
    radii: &[Rational],
    cfg: &IntegrationConfig,
) -> Result<Vec<FmtRow>> {
    let section = |a: &Target| -> Result<RationalFunction> {
        Ok(shifted(f, a)?.unwrap_or_else(RationalFunction::one))
    };
    let s1 = section(a1)?;
    let s2 = section(a2)?;
    let reference = ln_abs_g(&s2.div(&s1)?.laurent_leading(&GaussianRational::zero())?);
    let mut radii = radii.to_vec();
    radii.sort();
    Ok(radii
        .par_iter()
        .map(|r| {
            let difference = (|| {
                let curve = disc(r, cfg)?;
                let t1 = metrized_proximity_on(&curve, f, a1)? + counting_on(&curve, f, a1, None)?;
                let t2 = metrized_proximity_on(&curve, f, a2)? + counting_on(&curve, f, a2, None)?;
                Ok(t1 - t2)
            })();
            let gap = difference.as_ref().ok().map(|d| d - reference);
            FmtRow {
                radius: r.clone(),
                difference,
                reference,
                gap,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectRow {
    pub radius: Rational,
    pub m: f64,
    pub t: f64,
    /// `None` when `T` is below [`DEFECT_MIN_T`].
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectEstimate {
    pub target: Target,
    pub rows: Vec<DefectRow>,
    /// Ratio at the largest radius with a usable `T`.
    pub limit: Option<f64>,
}

/// `m(r, a) / T(r, f)` along a radius grid.
pub fn defect_estimate(
    f: &RationalFunction,
    a: &Target,
    radii: &[Rational],
    cfg: &IntegrationConfig,
) -> Result<DefectEstimate> {
    if f.as_constant().is_some() {
        return arg("defects of a constant function");
    }
    let mut radii = radii.to_vec();
    radii.sort();
    let rows: Vec<DefectRow> = radii
        .par_iter()
        .map(|r| {
            let curve = disc(r, cfg)?;
            let m = proximity_on(&curve, f, a)?;
            let t = proximity_on(&curve, f, &Target::Infinity)?
                + counting_on(&curve, f, &Target::Infinity, None)?;
            let ratio = (t >= DEFECT_MIN_T).then(|| m / t);
            Ok(DefectRow {
                radius: r.clone(),
                m,
                t,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    let limit = rows.iter().rev().find_map(|r| r.ratio);
    Ok(DefectEstimate {
        target: a.clone(),
        rows,
        limit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub h1: f64,
    pub h2: f64,
    /// Height for the tensor metric on `O(m₁ + m₂)` at the Segre image.
    pub combined: f64,
    pub expected: f64,
    pub residual: f64,
    /// `∫ d(spec₁, spec₂) dν` when the two metrics are comparable.
    pub distance: Option<f64>,
    pub bound_holds: Option<bool>,
}

fn tensor_power(
    spec1: &FSMetricSpec,
    spec2: &FSMetricSpec,
    m1: u32,
    m2: u32,
) -> Result<FSMetricSpec> {
    let mut out: Option<FSMetricSpec> = None;
    for s in std::iter::repeat_n(spec1, m1 as usize).chain(std::iter::repeat_n(spec2, m2 as usize))
    {
        out = Some(match out {
            None => s.clone(),
            Some(acc) => acc.tensor(s)?,
        });
    }
    out.ok_or_else(|| Error::Argument("m₁ + m₂ must be positive".into()))
}

fn segre_power(p: &ProjectivePoint, m: u32) -> Result<ProjectivePoint> {
    let mut out = p.clone();
    for _ in 1..m {
        out = out.segre(p)?;
    }
    Ok(out)
}

/// Checks `h_{m₁L₁ + m₂L₂}(P) = m₁ h₁(P) + m₂ h₂(P)` and `|h₁ − h₂| ≤ ∫ d(φ₁, φ₂)`.
pub fn height_additivity_check(
    curve: &AdelicCurve,
    spec1: &FSMetricSpec,
    spec2: &FSMetricSpec,
    p: &ProjectivePoint,
    m1: u32,
    m2: u32,
) -> Result<AdditivityReport> {
    let h1 = fs_height(curve, spec1, p)?;
    let h2 = fs_height(curve, spec2, p)?;
    let combined_spec = tensor_power(spec1, spec2, m1, m2)?;
    let point = segre_power(p, m1 + m2)?;
    let combined = fs_height(curve, &combined_spec, &point)?;
    let expected = m1 as f64 * h1 + m2 as f64 * h2;
    let distance = match distance_integral(&spec1.ambient, &spec2.ambient) {
        Ok(d) => Some(d),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let bound_holds = distance.map(|d| (h1 - h2).abs() <= d + 1e-12 * (1.0 + d));
    Ok(AdditivityReport {
        h1,
        h2,
        combined,
        expected,
        residual: combined - expected,
        distance,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;
    use crate::linalg::QMatrix;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn f(s: &str) -> RationalFunction {
        s.parse().unwrap()
    }

    fn cfg() -> IntegrationConfig {
        IntegrationConfig::default()
    }

    #[test]
    fn fs_height_examples() {
        let c = AdelicCurve::rational();
        let l2 = FSMetricSpec::standard(c.clone(), 1, ArchShape::L2).unwrap();
        let mx = FSMetricSpec::standard(c.clone(), 1, ArchShape::Max).unwrap();
        let p = ProjectivePoint::from_ints(&[3, 4]).unwrap();
        assert!((fs_height(&c, &l2, &p).unwrap() - 5f64.ln()).abs() < 1e-14);
        assert!((fs_height(&c, &mx, &p).unwrap() - 4f64.ln()).abs() < 1e-14);
        assert_eq!(
            fs_height(&c, &l2, &ProjectivePoint::from_ints(&[1, 0]).unwrap()).unwrap(),
            0.0
        );
        let scaled = ProjectivePoint::rational(&[q("9/7"), q("12/7")]).unwrap();
        assert!((fs_height(&c, &l2, &scaled).unwrap() - 5f64.ln()).abs() < 1e-13);
        let herm = FSMetricSpec::new(LatticeHermitianBundle::standard(2).into());
        assert!((fs_height(&c, &herm, &scaled).unwrap() - 5f64.ln()).abs() < 1e-14);
        assert!(ProjectivePoint::from_ints(&[0, 0]).is_err());
    }

    #[test]
    fn counting_examples() {
        let inf = Target::Infinity;
        assert_eq!(
            counting_n(&f("z"), &inf, &q("10"), None, &cfg()).unwrap(),
            0.0
        );
        assert!(
            (counting_n(&f("1/z"), &inf, &q("7"), None, &cfg()).unwrap() - 7f64.ln()).abs() < 1e-15
        );
        let n1 = counting_n(&f("(z-1)^2"), &Target::zero(), &q("10"), Some(1), &cfg()).unwrap();
        assert!((n1 - 10f64.ln()).abs() < 1e-15);
        let n = counting_n(&f("(z-1)^2"), &Target::zero(), &q("10"), None, &cfg()).unwrap();
        assert!((n - 2.0 * 10f64.ln()).abs() < 1e-15);
        assert!(counting_n(&f("z"), &Target::zero(), &q("0"), None, &cfg()).is_err());
        let g = f("(z-3)(z-1/2)");
        let a = counting_n(&g, &Target::zero(), &q("5"), None, &cfg()).unwrap();
        let b = counting_integral_form(&g, &Target::zero(), &q("5"), &cfg()).unwrap();
        assert!((a - b - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn proximity_and_characteristic() {
        let inf = Target::Infinity;
        assert!((proximity_m(&f("z"), &inf, &q("10"), &cfg()).unwrap() - 10f64.ln()).abs() < 1e-12);
        assert!(proximity_m(&f("z"), &inf, &q("1/2"), &cfg()).unwrap().abs() < 1e-15);
        assert!(
            proximity_m(&f("1/z"), &inf, &q("10"), &cfg())
                .unwrap()
                .abs()
                < 1e-15
        );
        for r in ["1", "3", "17/2"] {
            let lr = q(r).to_string().parse::<f64>().unwrap_or(8.5).ln();
            let t1 = characteristic_t(&f("z"), &inf, &q(r), &cfg()).unwrap();
            let t2 = characteristic_t(&f("1/z"), &inf, &q(r), &cfg()).unwrap();
            let t0 = characteristic_t(&f("z"), &Target::zero(), &q(r), &cfg()).unwrap();
            assert!(
                (t1 - lr).abs() < 1e-12 && (t2 - lr).abs() < 1e-12 && (t0 - t1).abs() < 1e-12,
                "{r}"
            );
        }
    }

    #[test]
    fn guard_on_circle() {
        let r = characteristic_t(&f("z-1"), &Target::zero(), &q("1"), &cfg());
        assert!(matches!(r, Err(Error::NumericalGuard(_))));
    }

    #[test]
    fn fmt_examples() {
        let radii = [q("1"), q("2"), q("5")];
        for row in
            fmt_section_gap(&f("z"), &Target::zero(), &Target::Infinity, &radii, &cfg()).unwrap()
        {
            assert_eq!(row.reference, 0.0);
            assert!(row.gap.unwrap().abs() < 1e-12);
        }
        for row in fmt_section_gap(
            &f("2z"),
            &Target::zero(),
            &Target::Infinity,
            &radii[1..],
            &cfg(),
        )
        .unwrap()
        {
            assert!((row.reference + 2f64.ln()).abs() < 1e-15);
            assert!(row.gap.unwrap().abs() < 1e-12);
        }
        for row in fmt_section_gap(
            &f("z"),
            &Target::Infinity,
            &Target::Infinity,
            &radii,
            &cfg(),
        )
        .unwrap()
        {
            assert_eq!(row.difference.unwrap(), 0.0);
        }
        let g = f("(z^2+3)/(z-1/2)");
        let rows = fmt_section_gap(
            &g,
            &Target::Finite(parse_gaussian("1+i").unwrap()),
            &Target::Finite(parse_gaussian("-2").unwrap()),
            &[q("3"), q("4")],
            &cfg(),
        )
        .unwrap();
        for row in rows {
            assert!(row.gap.unwrap().abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn cartan_examples() {
        let one_z = ProjectivePoint::holomorphic(&[RationalFunction::one(), f("z")]).unwrap();
        for r in ["1/2", "2", "9"] {
            let rr: f64 = crate::numeric::rational_to_f64(&q(r));
            let h = cartan_fs_height(&one_z, ArchShape::Max, &q(r), None, &cfg()).unwrap();
            assert!((h.value - rr.ln().max(0.0)).abs() < 1e-12);
            assert!(h.gap.unwrap().abs() < 1e-12);
            let h = cartan_fs_height(&one_z, ArchShape::L2, &q(r), None, &cfg()).unwrap();
            assert!((h.value - 0.5 * (1.0 + rr * rr).ln()).abs() < 1e-12);
            assert!(h.gap.unwrap().abs() <= h.gap_bound.unwrap() + 1e-12);
        }
        let c = ProjectivePoint::holomorphic(&[RationalFunction::one(), RationalFunction::one()])
            .unwrap();
        assert!(
            cartan_fs_height(&c, ArchShape::Max, &q("3"), None, &cfg())
                .unwrap()
                .value
                .abs()
                < 1e-15
        );
        let common = ProjectivePoint::holomorphic(&[f("z-1/3"), f("z(z-1/3)")]).unwrap();
        let h = cartan_fs_height(&common, ArchShape::Max, &q("2"), None, &cfg()).unwrap();
        assert!(h.reduced);
        assert!((h.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn defect_examples() {
        let big = [q("10"), q("100"), q("1000")];
        let d = defect_estimate(&f("z^2"), &Target::Infinity, &big, &cfg()).unwrap();
        assert!((d.limit.unwrap() - 1.0).abs() < 1e-3);
        let d = defect_estimate(
            &f("z"),
            &Target::Finite(GaussianRational::one()),
            &big,
            &cfg(),
        )
        .unwrap();
        assert!(d.limit.unwrap().abs() < 1e-3);
        let d = defect_estimate(&f("z"), &Target::Infinity, &[q("1/2"), q("10")], &cfg()).unwrap();
        assert!(d.rows[0].ratio.is_none());
    }

    #[test]
    fn additivity_examples() {
        let c = AdelicCurve::rational();
        let l2 = FSMetricSpec::standard(c.clone(), 1, ArchShape::L2).unwrap();
        let p = ProjectivePoint::from_ints(&[3, 4]).unwrap();
        let r = height_additivity_check(&c, &l2, &l2, &p, 1, 1).unwrap();
        assert!((r.combined - 2.0 * 5f64.ln()).abs() < 1e-13);
        let a = FSMetricSpec::new(LatticeHermitianBundle::standard(2).into());
        let b = FSMetricSpec::new(
            LatticeHermitianBundle::with_gram(QMatrix::diagonal(&[q("4"), q("1")]))
                .unwrap()
                .into(),
        );
        for pt in [[1, 0], [0, 1], [3, -7], [12, 5]] {
            let r = height_additivity_check(
                &c,
                &a,
                &b,
                &ProjectivePoint::from_ints(&pt).unwrap(),
                2,
                1,
            )
            .unwrap();
            assert!(r.residual.abs() < 1e-12);
            assert_eq!(r.bound_holds, Some(true));
        }
    }
}
