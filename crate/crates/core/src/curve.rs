//! Adelic curves as measure spaces of places, and their defects
//! `d(f) = ∫ log|f|_ω ν(dω)`.
//!
//! * [`CurveKind::Rational`]: every prime with mass 1 plus the real place.
//! * [`CurveKind::Quadratic`]: places of ℚ(√d) weighted by `[L_x : ℚ_p] / 2`.
//! * [`CurveKind::Nevanlinna`]: points of the open disc `|z| < R` with mass
//!   `log(R/|z|)` (`log R` at the origin) and the circle `|z| = R` with its
//!   normalised Lebesgue measure, integrated by the periodic trapezoid rule.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::arith::factor::factor;
use crate::arith::{
    rational_to_string, roots, GaussianRational, Poly, QuadraticElement, Rational, RationalFunction,
};
use crate::error::{arg, Error, Result};
use crate::numeric::{circle_mean, ln_abs_rational, pairwise_sum, rational_to_f64};
use crate::pav::{log_pav_eval, split_rational_place, BasePlace, FieldElement, Place};

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    /// Trapezoid nodes on the boundary circle; a power of two, at least 16.
    pub nodes: usize,
    /// Minimum distance between a zero or pole and the boundary circle.
    pub clearance: f64,
    pub tolerance: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            nodes: 4096,
            clearance: 1e-8,
            tolerance: 1e-8,
        }
    }
}

impl IntegrationConfig {
    pub fn new(nodes: usize, clearance: f64, tolerance: f64) -> Result<Self> {
        let cfg = Self {
            nodes,
            clearance,
            tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 || !self.nodes.is_power_of_two() {
            return arg(format!(
                "nodes = {} must be a power of two ≥ 16",
                self.nodes
            ));
        }
        if !(self.clearance > 0.0) || !(self.tolerance > 0.0) {
            return arg("clearance and tolerance must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    Rational,
    Quadratic { d: i64 },
    Nevanlinna { radius: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdelicCurve {
    pub kind: CurveKind,
    pub integration: IntegrationConfig,
}

/// A point of the discrete part of the curve carrying `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPoint {
    pub place: Place,
    pub weight: f64,
    /// `log |f|_ω`.
    pub log_abs: f64,
    /// False when the place is the decimal rounding of a numerically located root.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub discrete_part: f64,
    pub boundary_part: f64,
    pub total: f64,
    pub reference: Option<f64>,
    pub gap: Option<f64>,
}

impl DefectReport {
    fn new(discrete_part: f64, boundary_part: f64, reference: Option<f64>) -> Self {
        let total = discrete_part + boundary_part;
        Self {
            discrete_part,
            boundary_part,
            total,
            reference,
            gap: reference.map(|r| total - r),
        }
    }
}

impl AdelicCurve {
    pub fn rational() -> Self {
        Self {
            kind: CurveKind::Rational,
            integration: IntegrationConfig::default(),
        }
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        split_rational_place(d, BasePlace::Infinite)?;
        Ok(Self {
            kind: CurveKind::Quadratic { d },
            integration: IntegrationConfig::default(),
        })
    }

    pub fn nevanlinna(radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return arg("disc radius must be positive");
        }
        Ok(Self {
            kind: CurveKind::Nevanlinna { radius },
            integration: IntegrationConfig::default(),
        })
    }

    pub fn with_integration(mut self, cfg: IntegrationConfig) -> Result<Self> {
        cfg.validate()?;
        self.integration = cfg;
        Ok(self)
    }

    /// Proper curves satisfy the product formula `d(f) = 0`.
    pub fn is_proper(&self) -> bool {
        !matches!(self.kind, CurveKind::Nevanlinna { .. })
    }

    pub fn radius(&self) -> Option<&Rational> {
        match &self.kind {
            CurveKind::Nevanlinna { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn radius_f64(&self) -> Option<f64> {
        self.radius().map(rational_to_f64)
    }

    /// Archimedean places of a number-field curve with their masses.
    pub fn archimedean_places(&self) -> Vec<(Place, f64)> {
        match &self.kind {
            CurveKind::Rational => vec![(Place::RationalInfinite, 1.0)],
            CurveKind::Quadratic { d } => split_rational_place(*d, BasePlace::Infinite)
                .expect("validated at construction")
                .into_iter()
                .map(|(p, w)| (p, rational_to_f64(&w)))
                .collect(),
            CurveKind::Nevanlinna { .. } => Vec::new(),
        }
    }

    /// Finite places of a number-field curve lying over the given primes.
    pub fn places_over(&self, primes: &[u64]) -> Vec<(Place, f64)> {
        let mut out = Vec::new();
        for &p in primes {
            match &self.kind {
                CurveKind::Rational => out.push((Place::RationalFinite(p), 1.0)),
                CurveKind::Quadratic { d } => {
                    for (pl, w) in split_rational_place(*d, BasePlace::Finite(p)).expect("valid d")
                    {
                        out.push((pl, rational_to_f64(&w)));
                    }
                }
                CurveKind::Nevanlinna { .. } => {}
            }
        }
        out
    }

    /// Mass of a discrete place of a number-field curve.
    pub fn place_mass(&self, place: &Place) -> Result<f64> {
        match (&self.kind, place) {
            (CurveKind::Rational, Place::RationalFinite(_) | Place::RationalInfinite) => Ok(1.0),
            (CurveKind::Quadratic { d }, Place::Quadratic { d: e, base, index }) if d == e => {
                let split = split_rational_place(*d, *base)?;
                split
                    .get(*index as usize)
                    .map(|(_, w)| rational_to_f64(w))
                    .ok_or_else(|| Error::Argument(format!("no place {place} on this curve")))
            }
            _ => arg(format!("place {place} does not belong to {:?}", self.kind)),
        }
    }

    /// Mass `ν({z})` of an interior point of the disc.
    pub fn interior_weight(&self, z: Complex64) -> Option<f64> {
        let r = self.radius_f64()?;
        Some(if z.norm() == 0.0 {
            r.ln()
        } else {
            (r / z.norm()).ln()
        })
    }

    /// Mean of `g` over the boundary circle (normalised Lebesgue measure).
    pub fn boundary_mean<F>(&self, g: F) -> Result<f64>
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        let r = self
            .radius_f64()
            .ok_or_else(|| Error::Argument("only disc curves have a boundary circle".into()))?;
        Ok(circle_mean(r, self.integration.nodes, g))
    }

    /// Roots of the given polynomials, failing if any lies within the clearance
    /// of the boundary circle. Exact roots on the circle are detected exactly.
    pub fn located_roots(
        &self,
        polys: &[&Poly],
    ) -> Result<Vec<(Complex64, u32, Option<GaussianRational>, bool)>> {
        let radius = self
            .radius()
            .ok_or_else(|| Error::Argument("only disc curves locate roots".into()))?;
        let r = rational_to_f64(radius);
        let r2 = radius * radius;
        let mut out = Vec::new();
        for (k, poly) in polys.iter().enumerate() {
            for root in roots(poly)? {
                let on_circle = match &root.exact {
                    Some(e) => e.norm_sqr() == r2,
                    None => false,
                };
                let dist = (root.location.norm() - r).abs();
                if on_circle || dist < self.integration.clearance {
                    return Err(Error::NumericalGuard(format!(
                        "zero/pole at {} is {dist:.2e} from the circle |z| = {}; perturb R",
                        root.location,
                        rational_to_string(radius)
                    )));
                }
                let inside = match &root.exact {
                    Some(e) => e.norm_sqr() < r2,
                    None => root.location.norm() < r,
                };
                if inside {
                    out.push((root.location, root.multiplicity, root.exact, k == 0));
                }
            }
        }
        Ok(out)
    }

    /// Discrete places where `log |f|_ω ≠ 0`, with their masses.
    pub fn support_places(&self, f: &FieldElement) -> Result<Vec<SupportPoint>> {
        if f.is_zero() {
            return arg("support of the zero element");
        }
        match (&self.kind, f) {
            (CurveKind::Rational, FieldElement::Rational(q)) => {
                let primes = primes_of(&[q.numer().clone(), q.denom().clone()])?;
                self.finite_support(&primes, f)
            }
            (CurveKind::Quadratic { d }, FieldElement::Rational(q)) => {
                let x = QuadraticElement::from_rational(*d, q.clone());
                self.support_places(&FieldElement::Quadratic(x))
            }
            (CurveKind::Quadratic { d }, FieldElement::Quadratic(x)) if x.d == *d => {
                let (big_a, big_b, den) = integral_parts(x);
                let int_norm = &big_a * &big_a - BigInt::from(*d) * &big_b * &big_b;
                let primes = primes_of(&[int_norm, den])?;
                self.finite_support(&primes, f)
            }
            (CurveKind::Nevanlinna { radius }, FieldElement::Meromorphic(g)) => {
                let mut out = Vec::new();
                for (loc, mult, exact, is_zero) in self.located_roots(&[g.numer(), g.denom()])? {
                    let (z, is_exact) = match exact {
                        Some(e) => (e, true),
                        None => (decimal_point(loc), false),
                    };
                    let sign = if is_zero { -1.0 } else { 1.0 };
                    out.push(SupportPoint {
                        place: Place::NevanlinnaInterior {
                            z,
                            radius: radius.clone(),
                        },
                        weight: self.interior_weight(loc).unwrap(),
                        log_abs: sign * mult as f64,
                        exact: is_exact,
                    });
                }
                Ok(out)
            }
            _ => arg(format!(
                "element {f:?} does not belong to the field of {:?}",
                self.kind
            )),
        }
    }

    fn finite_support(&self, primes: &[u64], f: &FieldElement) -> Result<Vec<SupportPoint>> {
        let mut out = Vec::new();
        for (place, weight) in self.places_over(primes) {
            let log_abs = log_pav_eval(&place, f)?;
            if log_abs != 0.0 {
                out.push(SupportPoint {
                    place,
                    weight,
                    log_abs,
                    exact: true,
                });
            }
        }
        Ok(out)
    }

    /// `d(f) = ∫ log|f|_ω ν(dω)` split into the discrete (finite places / disc
    /// interior) and archimedean (infinite places / circle) parts.
    pub fn defect(&self, f: &FieldElement) -> Result<DefectReport> {
        let support = self.support_places(f)?;
        let terms: Vec<f64> = support.iter().map(|s| s.weight * s.log_abs).collect();
        let discrete = pairwise_sum(&terms);
        match (&self.kind, f) {
            (CurveKind::Nevanlinna { .. }, FieldElement::Meromorphic(g)) => {
                let boundary = self.boundary_mean(|z| g.log_abs_at(z))?;
                let c = g.laurent_leading(&GaussianRational::zero())?;
                let reference = 0.5 * ln_abs_rational(&c.norm_sqr());
                Ok(DefectReport::new(discrete, boundary, Some(reference)))
            }
            _ => {
                let arch: Vec<f64> = self
                    .archimedean_places()
                    .iter()
                    .map(|(pl, w)| Ok(w * log_pav_eval(pl, f)?))
                    .collect::<Result<_>>()?;
                Ok(DefectReport::new(discrete, pairwise_sum(&arch), Some(0.0)))
            }
        }
    }
}

fn decimal_point(z: Complex64) -> GaussianRational {
    let scale = 1_000_000_000_000i64;
    let part = |x: f64| {
        Rational::new(
            BigInt::from((x * scale as f64).round() as i64),
            BigInt::from(scale),
        )
    };
    GaussianRational::new(part(z.re), part(z.im))
}

/// `x = (A + B√d) / D` with integers `A, B, D`.
pub(crate) fn integral_parts(x: &QuadraticElement) -> (BigInt, BigInt, BigInt) {
    let den = x.a.denom().lcm(x.b.denom());
    let big_a = x.a.numer() * (&den / x.a.denom());
    let big_b = x.b.numer() * (&den / x.b.denom());
    (big_a, big_b, den)
}

/// Distinct primes dividing any of the nonzero integers.
pub(crate) fn primes_of(ns: &[BigInt]) -> Result<Vec<u64>> {
    let mut primes = std::collections::BTreeSet::new();
    for n in ns {
        if n.is_zero() {
            continue;
        }
        for (p, _) in factor(n.magnitude())? {
            primes.insert(p);
        }
    }
    Ok(primes.into_iter().collect())
}

/// Symbolic product formula over ℚ: coefficient of `log p` in `d(q)`, summing
/// the archimedean `log|q| = Σ e_p log p` against the finite `-e_p log p`.
/// Every coefficient vanishes.
pub fn symbolic_rational_defect(q: &Rational) -> Result<BTreeMap<u64, i64>> {
    if q.is_zero() {
        return arg("defect of zero");
    }
    let mut coeffs = BTreeMap::new();
    for (n, sign) in [(q.numer(), 1i64), (q.denom(), -1i64)] {
        for (p, e) in factor(n.magnitude())? {
            let exponent = sign * e as i64;
            // archimedean contribution
            *coeffs.entry(p).or_insert(0) += exponent;
            // finite place p: log|q|_p = -v_p(q) log p
            *coeffs.entry(p).or_insert(0) -= exponent;
        }
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(coeffs)
}

/// Defect of `x ∈ ℚ(√d)` with the norm cross-check `d_L(x) = ½ d_ℚ(N(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticDefect {
    pub total: f64,
    pub norm_defect_half: f64,
    pub local_terms: Vec<(Place, f64, f64)>,
}

pub fn defect_quadratic(x: &QuadraticElement) -> Result<QuadraticDefect> {
    if x.is_zero() {
        return arg("defect of zero");
    }
    let curve = AdelicCurve::quadratic(x.d)?;
    let f = FieldElement::Quadratic(x.clone());
    let mut local_terms: Vec<(Place, f64, f64)> = curve
        .support_places(&f)?
        .into_iter()
        .map(|s| (s.place, s.weight, s.log_abs))
        .collect();
    for (pl, w) in curve.archimedean_places() {
        let l = log_pav_eval(&pl, &f)?;
        local_terms.push((pl, w, l));
    }
    let terms: Vec<f64> = local_terms.iter().map(|(_, w, l)| w * l).collect();
    let norm_defect = AdelicCurve::rational().defect(&FieldElement::Rational(x.norm()))?;
    Ok(QuadraticDefect {
        total: pairwise_sum(&terms),
        norm_defect_half: 0.5 * norm_defect.total,
        local_terms,
    })
}

/// One row of the radius family table.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub radius: Rational,
    pub result: Result<DefectReport>,
}

/// `R ↦ d_{S_R}(f)` over a grid of radii. By Jensen every row equals
/// `log |c(f, 0)|`, which witnesses asymptotic properness up to `O(1)`.
/// Rows failing the clearance guard carry their error; rows are in grid order.
pub fn family_defect(
    f: &RationalFunction,
    radii: &[Rational],
    cfg: &IntegrationConfig,
) -> Vec<FamilyRow> {
    radii
        .par_iter()
        .map(|r| {
            let result = AdelicCurve::nevanlinna(r.clone())
                .and_then(|c| c.with_integration(cfg.clone()))
                .and_then(|c| c.defect(&FieldElement::Meromorphic(f.clone())));
            FamilyRow {
                radius: r.clone(),
                result,
            }
        })
        .collect()
}
