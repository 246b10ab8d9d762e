//! Dispatch of a validated descriptor to the library.

use adelic::arith::factor::is_prime_u64;
use adelic::arith::{
    parse_rational, parse_rational_function, rational_to_string, QuadraticElement, Rational,
    RationalFunction,
};
use adelic::bundle::{
    degree, degree_element, subspace_degree, subspace_degree_exact, ArchShape, Bundle, DiagonalPNF,
    LatticeHermitianBundle, LogWeight, SubspaceBasis,
};
use adelic::curve::{
    defect_quadratic, family_defect, symbolic_rational_defect, AdelicCurve, CurveKind,
    IntegrationConfig,
};
use adelic::heights::{
    cartan_fs_height, characteristic_table, counting_n, fs_height, height_additivity_check,
    proximity_m, FSMetricSpec, ProjectivePoint, Target,
};
use adelic::hn::{hn_flag, Certification, EnumConfig};
use adelic::linalg::QMatrix;
use adelic::pav::{
    parse_place, split_rational_place, splitting, BasePlace, FieldElement, Splitting,
};
use adelic::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::descriptor::{
    BundleSpec, Command, CurveName, Descriptor, MetricSpec, NumText, Shape, ValueSpec, WeightSpec,
};
use crate::output::{num, opt_num, Report, Table};
use crate::CliError;

type Res<T> = Result<T, CliError>;

const DEFAULT_NODES: usize = 4096;
const DEFAULT_CLEARANCE: f64 = 1e-8;
const DEFAULT_TOLERANCE: f64 = 1e-8;
const DEFAULT_ENUM_BOUND: u32 = 3;
const MAX_ENUM_DIM: usize = 6;

struct Out {
    results: Value,
    table: Option<Table>,
    warnings: Vec<String>,
    partial: Option<CliError>,
}

impl Out {
    fn plain(results: Value) -> Self {
        Self {
            results,
            table: None,
            warnings: Vec::new(),
            partial: None,
        }
    }
}

pub fn run(d: &Descriptor) -> Res<Report> {
    let curve = build_curve(d)?;
    let out = match d.command {
        Command::CheckProduct => check_product(d, &curve)?,
        Command::Jensen => jensen(d, &curve)?,
        Command::Degree => degree_cmd(d, &curve)?,
        Command::Hn => hn_cmd(d, &curve)?,
        Command::Height => height(d, &curve)?,
        Command::Nevanlinna => nevanlinna(d, &curve)?,
        Command::FamilyHeight => family_height(d, &curve)?,
        Command::SplitPlaces => split_places(d, &curve)?,
    };
    Ok(Report {
        descriptor: d.clone(),
        results: out.results,
        table: out.table,
        warnings: out.warnings,
        partial: out.partial,
    })
}

fn rat(t: &NumText) -> Res<Rational> {
    Ok(parse_rational(&t.text())?)
}

fn build_curve(d: &Descriptor) -> Res<AdelicCurve> {
    let c = &d.curve;
    let base = match c.curve {
        CurveName::Rational => AdelicCurve::rational(),
        CurveName::Quadratic => AdelicCurve::quadratic(c.d.expect("validated"))?,
        CurveName::Nevanlinna => {
            AdelicCurve::nevanlinna(rat(c.radius.as_ref().expect("validated"))?)?
        }
    };
    let cfg = IntegrationConfig::new(
        c.nodes.unwrap_or(DEFAULT_NODES),
        c.clearance.unwrap_or(DEFAULT_CLEARANCE),
        DEFAULT_TOLERANCE,
    )?;
    Ok(base.with_integration(cfg)?)
}

fn element(curve: &AdelicCurve, v: &ValueSpec) -> Res<FieldElement> {
    Ok(match (&curve.kind, v) {
        (CurveKind::Rational, ValueSpec::Single(t)) => FieldElement::Rational(rat(t)?),
        (CurveKind::Quadratic { d }, ValueSpec::Single(t)) => {
            FieldElement::Quadratic(QuadraticElement::from_rational(*d, rat(t)?))
        }
        (CurveKind::Quadratic { d }, ValueSpec::Pair([a, b])) => {
            FieldElement::Quadratic(QuadraticElement::new(*d, rat(a)?, rat(b)?))
        }
        (CurveKind::Nevanlinna { .. }, ValueSpec::Single(t)) => {
            FieldElement::Meromorphic(function(&t.text())?)
        }
        (_, ValueSpec::Pair(_)) => {
            return Err(CliError::Schema(
                "value: pairs a + b√d need a quadratic curve".into(),
            ))
        }
    })
}

fn function(s: &str) -> Res<RationalFunction> {
    Ok(parse_rational_function(s)?)
}

fn element_text(e: &FieldElement) -> String {
    match e {
        FieldElement::Rational(q) => rational_to_string(q),
        FieldElement::Quadratic(x) => x.to_string(),
        FieldElement::Meromorphic(f) => f.to_string(),
    }
}

fn shape_of(s: Option<Shape>, default: ArchShape) -> ArchShape {
    s.map_or(default, ArchShape::from)
}

fn shape_name(s: ArchShape) -> &'static str {
    match s {
        ArchShape::L2 => "l2",
        ArchShape::Max => "max",
    }
}

fn q_matrix(rows: &[Vec<NumText>], what: &str) -> Res<QMatrix> {
    let parsed: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(rat).collect())
        .collect::<Res<_>>()?;
    QMatrix::from_rows(parsed)
        .ok_or_else(|| CliError::Schema(format!("bundle.{what}: rows have unequal lengths")))
}

fn build_bundle(spec: &BundleSpec, curve: &AdelicCurve, default_shape: ArchShape) -> Res<Bundle> {
    match spec {
        BundleSpec::Diagonal {
            shape,
            weights,
            arch_scales,
        } => {
            if let Some(s) = arch_scales {
                if s.len() != weights.len() {
                    return Err(CliError::Schema(
                        "bundle.arch_scales: one entry per weight expected".into(),
                    ));
                }
            }
            let ws = weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    Ok(match w {
                        WeightSpec::Places(m) => LogWeight::Discrete(
                            m.iter()
                                .map(|(k, c)| Ok((parse_place(k)?, *c)))
                                .collect::<Res<_>>()?,
                        ),
                        WeightSpec::Gauge(g) => LogWeight::Gauge {
                            gauge: function(g)?,
                            arch_log_scale: arch_scales.as_ref().map_or(0.0, |s| s[i]),
                        },
                    })
                })
                .collect::<Res<Vec<_>>>()?;
            Ok(DiagonalPNF::new(curve.clone(), ws, shape_of(*shape, default_shape))?.into())
        }
        BundleSpec::LatticeHermitian { lattice, gram } => {
            if curve.kind != CurveKind::Rational {
                return Err(Error::Unsupported(
                    "lattice-hermitian bundles live over the rational curve".into(),
                )
                .into());
            }
            let g = q_matrix(gram, "gram")?;
            let m = match lattice {
                Some(l) => q_matrix(l, "lattice")?,
                None => QMatrix::identity(g.rows()),
            };
            Ok(LatticeHermitianBundle::new(m, g)?.into())
        }
    }
}

fn int_value(s: String) -> Value {
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

fn basis_rows(b: &SubspaceBasis) -> Value {
    let full;
    let b = if b.dim() == b.ambient_dim() {
        full = SubspaceBasis::full(b.dim());
        &full
    } else {
        b
    };
    Value::Array(
        b.matrix()
            .columns()
            .into_iter()
            .map(|c| Value::Array(c.into_iter().map(|x| int_value(x.to_string())).collect()))
            .collect(),
    )
}

fn guard_hint(e: Error) -> CliError {
    match e {
        Error::NumericalGuard(m) if !m.contains("perturb") => Error::NumericalGuard(format!(
            "{m}; perturb R slightly (e.g. by a factor 1001/1000) so that no zero or pole lies on the circle"
        ))
        .into(),
        e => e.into(),
    }
}

fn check_product(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let value = match (&d.value, &d.function) {
        (Some(v), _) => element(curve, v)?,
        (None, Some(f)) if matches!(curve.kind, CurveKind::Nevanlinna { .. }) => {
            FieldElement::Meromorphic(function(f)?)
        }
        _ => {
            return Err(CliError::Schema(
                "value: required by command check-product".into(),
            ))
        }
    };
    if value.is_zero() {
        return Err(Error::Argument("the product formula needs a nonzero value".into()).into());
    }
    let terms = |t: Vec<(String, f64, f64)>| -> Value {
        Value::Array(
            t.into_iter()
                .map(|(p, w, l)| json!({"place": p, "weight": num(w), "log_abs": num(l)}))
                .collect(),
        )
    };
    Ok(match &value {
        FieldElement::Rational(q) => {
            let exact = symbolic_rational_defect(q)?.is_empty();
            let rep = curve.defect(&value)?;
            let mut t: Vec<(String, f64, f64)> = curve
                .support_places(&value)?
                .into_iter()
                .map(|s| (s.place.key(), s.weight, s.log_abs))
                .collect();
            for (pl, w) in curve.archimedean_places() {
                t.push((pl.key(), w, adelic::pav::log_pav_eval(&pl, &value)?));
            }
            Out::plain(json!({
                "total": num(if exact { 0.0 } else { rep.total }),
                "exact": exact,
                "numeric_total": num(rep.total),
                "terms": terms(t),
            }))
        }
        FieldElement::Quadratic(x) => {
            let rep = defect_quadratic(x)?;
            let exact = symbolic_rational_defect(&x.norm())?.is_empty();
            let t = rep
                .local_terms
                .into_iter()
                .map(|(p, w, l)| (p.key(), w, l))
                .collect();
            Out::plain(json!({
                "total": num(if exact { 0.0 } else { rep.total }),
                "exact": exact,
                "numeric_total": num(rep.total),
                "norm_defect_half": num(rep.norm_defect_half),
                "terms": terms(t),
            }))
        }
        FieldElement::Meromorphic(_) => {
            let rep = curve.defect(&value).map_err(guard_hint)?;
            let mut out = Out::plain(json!({
                "total": num(rep.total),
                "exact": false,
                "reference": opt_num(rep.reference),
                "gap": opt_num(rep.gap),
            }));
            out.warnings
                .push("disc curves are not proper: the total is log|c(f,0)|, not 0".into());
            out
        }
    })
}

fn radii(d: &Descriptor) -> Res<Vec<Rational>> {
    d.radii
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(rat)
        .collect()
}

fn jensen(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let f = function(d.function.as_deref().expect("validated"))?;
    if f.is_zero() {
        return Err(Error::Argument("jensen needs a nonzero function".into()).into());
    }
    if d.radii.is_none() {
        let rep = curve
            .defect(&FieldElement::Meromorphic(f))
            .map_err(guard_hint)?;
        return Ok(Out::plain(json!({
            "total": num(rep.total),
            "reference": opt_num(rep.reference),
            "gap": opt_num(rep.gap),
            "discrete_part": num(rep.discrete_part),
            "boundary_part": num(rep.boundary_part),
        })));
    }
    let rows = family_defect(&f, &radii(d)?, &curve.integration);
    let mut out = Out::plain(Value::Null);
    let mut json_rows = Vec::new();
    let mut table = Vec::new();
    for row in rows {
        let r = rational_to_string(&row.radius);
        match row.result {
            Ok(rep) => {
                let cells = [
                    num(rep.total),
                    opt_num(rep.reference),
                    opt_num(rep.gap),
                    num(rep.discrete_part),
                    num(rep.boundary_part),
                ];
                json_rows.push(json!({
                    "r": r, "total": cells[0], "reference": cells[1], "gap": cells[2],
                    "discrete_part": cells[3], "boundary_part": cells[4],
                }));
                table.push(std::iter::once(Value::String(r)).chain(cells).collect());
            }
            Err(e @ Error::NumericalGuard(_)) => {
                out.warnings.push(format!("r = {r}: {e}"));
                out.partial.get_or_insert(guard_hint(e));
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.results = json!({ "rows": json_rows });
    out.table = Some(Table {
        header: [
            "r",
            "total",
            "reference",
            "gap",
            "discrete_part",
            "boundary_part",
        ]
        .map(String::from)
        .to_vec(),
        rows: table,
    });
    Ok(out)
}

fn degree_cmd(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let b = build_bundle(
        d.bundle.as_ref().expect("validated"),
        curve,
        shape_of(d.shape, ArchShape::L2),
    )?;
    let deg = degree(&b)?;
    let rank = b.rank();
    let mut res = json!({"rank": rank, "degree": num(deg), "slope": num(deg / rank as f64)});
    if let Some(el) = &d.element {
        let s: Vec<FieldElement> = el
            .iter()
            .map(|v| match &b {
                Bundle::Hermitian(_) => element(&AdelicCurve::rational(), v),
                Bundle::Diagonal(_) => element(curve, v),
            })
            .collect::<Res<_>>()?;
        res["element"] = Value::Array(s.iter().map(|e| Value::String(element_text(e))).collect());
        res["element_degree"] = num(degree_element(&b, &s)?);
    }
    if let Some(cols) = &d.subspace {
        let Bundle::Hermitian(h) = &b else {
            return Err(Error::Unsupported(
                "subspace degrees need a lattice-hermitian bundle".into(),
            )
            .into());
        };
        let refs: Vec<&[i64]> = cols.iter().map(Vec::as_slice).collect();
        let sub = SubspaceBasis::from_int_columns(&refs)?;
        let exact = subspace_degree_exact(h, sub.matrix())?;
        res["subspace"] = json!({
            "dim": sub.dim(),
            "saturated": sub.is_saturated(),
            "degree": num(subspace_degree(h, &sub)?),
            "minor_gcd": int_value(exact.minor_gcd.to_string()),
            "gram_det": rational_to_string(&exact.gram_det),
            "spanned_degree": num(exact.value()),
        });
    }
    Ok(Out::plain(res))
}

fn hn_cmd(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let b = build_bundle(
        d.bundle.as_ref().expect("validated"),
        curve,
        shape_of(d.shape, ArchShape::L2),
    )?;
    let cfg = EnumConfig::new(d.enum_bound.unwrap_or(DEFAULT_ENUM_BOUND), MAX_ENUM_DIM)?;
    let flag = hn_flag(&b, &cfg)?;
    let certification = match flag.certification {
        Certification::ExactSplit => json!("exact-split"),
        Certification::Enumerated(bound) => json!({ "enumerated": bound }),
    };
    Ok(Out::plain(json!({
        "steps": flag.steps.iter().map(basis_rows).collect::<Vec<_>>(),
        "dims": flag.dims(),
        "slopes": flag.slopes.iter().copied().map(num).collect::<Vec<_>>(),
        "certification": certification,
    })))
}

fn point(d: &Descriptor, curve: &AdelicCurve) -> Res<ProjectivePoint> {
    let coords = d
        .point
        .as_ref()
        .expect("validated")
        .iter()
        .map(|v| element(curve, v))
        .collect::<Res<Vec<_>>>()?;
    Ok(ProjectivePoint::new(coords)?)
}

fn metric(
    spec: Option<&MetricSpec>,
    d: &Descriptor,
    curve: &AdelicCurve,
    n: usize,
) -> Res<(FSMetricSpec, String)> {
    let default = shape_of(d.shape, ArchShape::L2);
    Ok(match spec {
        None => (
            FSMetricSpec::standard(curve.clone(), n, default)?,
            shape_name(default).into(),
        ),
        Some(MetricSpec::Standard(s)) => {
            let s = ArchShape::from(*s);
            (
                FSMetricSpec::standard(curve.clone(), n, s)?,
                shape_name(s).into(),
            )
        }
        Some(MetricSpec::Bundle(b)) => {
            let name = match b {
                BundleSpec::Diagonal { .. } => "diagonal",
                BundleSpec::LatticeHermitian { .. } => "lattice-hermitian",
            };
            (
                FSMetricSpec::new(build_bundle(b, curve, default)?),
                name.into(),
            )
        }
    })
}

fn height(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let p = point(d, curve)?;
    let text: Vec<String> = p.coords().iter().map(element_text).collect();
    if let CurveKind::Nevanlinna { radius } = &curve.kind {
        let shape = match &d.metric {
            None => shape_of(d.shape, ArchShape::L2),
            Some(MetricSpec::Standard(s)) => (*s).into(),
            Some(MetricSpec::Bundle(_)) => {
                return Err(Error::Unsupported(
                    "heights over a disc use the standard metrics".into(),
                )
                .into())
            }
        };
        if d.second_metric.is_some() {
            return Err(
                Error::Unsupported("additivity checks need a number-field curve".into()).into(),
            );
        }
        let c =
            cartan_fs_height(&p, shape, radius, None, &curve.integration).map_err(guard_hint)?;
        return Ok(Out::plain(json!({
            "point": text,
            "metric": shape_name(shape),
            "value": num(c.value),
            "radius": rational_to_string(&c.radius),
            "coordinate": c.coordinate,
            "reduced": c.reduced,
            "characteristic": opt_num(c.characteristic),
            "gap": opt_num(c.gap),
            "gap_bound": opt_num(c.gap_bound),
        })));
    }
    let n = p.dim();
    let (spec, name) = metric(d.metric.as_ref(), d, curve, n)?;
    let mut res =
        json!({"point": text, "metric": name, "value": num(fs_height(curve, &spec, &p)?)});
    let mut warnings = Vec::new();
    if let Some(second) = &d.second_metric {
        let (spec2, name2) = metric(Some(second), d, curve, n)?;
        let (m1, m2) = match d.multiplicities.as_deref() {
            Some([a, b]) => (*a, *b),
            _ => (1, 1),
        };
        let a = height_additivity_check(curve, &spec, &spec2, &p, m1, m2)?;
        let mixed = match (&spec.ambient, &spec2.ambient) {
            (Bundle::Diagonal(x), Bundle::Diagonal(y)) => x.shape() != y.shape(),
            _ => false,
        };
        if mixed && m1 > 0 && m2 > 0 {
            warnings.push("mixed archimedean shapes: the tensor metric is max-shaped, so combined differs from expected".into());
        }
        res["additivity"] = json!({
            "second_metric": name2,
            "multiplicities": [m1, m2],
            "h1": num(a.h1),
            "h2": num(a.h2),
            "combined": num(a.combined),
            "expected": num(a.expected),
            "residual": num(a.residual),
            "distance": opt_num(a.distance),
            "bound_holds": a.bound_holds,
        });
    }
    let mut out = Out::plain(res);
    out.warnings = warnings;
    Ok(out)
}

const GRID_HEADER: [&str; 7] = ["r", "N", "N_k", "m", "T", "fs_height", "gap"];

fn grid_table(with_target: bool, rows: Vec<(String, [Value; 7])>) -> (Value, Table) {
    let mut header: Vec<String> = GRID_HEADER.map(String::from).to_vec();
    if with_target {
        header.insert(0, "target".into());
    }
    let json_rows = rows
        .iter()
        .map(|(t, cells)| {
            let mut o = serde_json::Map::new();
            o.insert("target".into(), Value::String(t.clone()));
            for (h, c) in GRID_HEADER.iter().zip(cells) {
                o.insert((*h).into(), c.clone());
            }
            Value::Object(o)
        })
        .collect();
    let rows = rows
        .into_iter()
        .map(|(t, cells)| {
            let mut r: Vec<Value> = cells.to_vec();
            if with_target {
                r.insert(0, Value::String(t));
            }
            r
        })
        .collect();
    (
        json!({ "rows": Value::Array(json_rows) }),
        Table { header, rows },
    )
}

fn nevanlinna(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let f = function(d.function.as_deref().expect("validated"))?;
    let targets: Vec<Target> = match &d.targets {
        Some(t) => t.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?,
        None => vec![Target::Infinity],
    };
    if targets.is_empty() {
        return Err(CliError::Schema(
            "targets: at least one target expected".into(),
        ));
    }
    let shape = shape_of(d.shape, ArchShape::Max);
    let rep = characteristic_table(
        &f,
        &targets,
        &radii(d)?,
        d.truncation.unwrap_or(1),
        Some(shape),
        &curve.integration,
    )?;
    let rows = rep
        .rows
        .into_iter()
        .map(|r| {
            (
                r.target.to_string(),
                [
                    Value::String(rational_to_string(&r.radius)),
                    num(r.n),
                    num(r.n_truncated),
                    num(r.m),
                    num(r.t),
                    opt_num(r.fs_height),
                    opt_num(r.gap),
                ],
            )
        })
        .collect();
    let (results, table) = grid_table(targets.len() > 1, rows);
    let mut out = Out {
        results,
        table: Some(table),
        warnings: Vec::new(),
        partial: None,
    };
    for (a, r, msg) in rep.failures {
        out.warnings
            .push(format!("target {a}, r = {}: {msg}", rational_to_string(&r)));
        out.partial
            .get_or_insert_with(|| Error::NumericalGuard(msg).into());
    }
    Ok(out)
}

fn family_height(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let p = point(d, curve)?;
    let shape = shape_of(d.shape, ArchShape::Max);
    let k = d.truncation.unwrap_or(1);
    if k == 0 {
        return Err(Error::Argument("truncation level must be at least 1".into()).into());
    }
    let f = match p.coords() {
        [FieldElement::Meromorphic(a), FieldElement::Meromorphic(b)] if !a.is_zero() => {
            Some(b.div(a)?)
        }
        _ => None,
    };
    let cfg = &curve.integration;
    let radii = radii(d)?;
    let inf = Target::Infinity;
    let computed: Vec<Result<[Value; 7], Error>> = radii
        .par_iter()
        .map(|r| {
            let h = cartan_fs_height(&p, shape, r, None, cfg)?;
            let (n, nk, m) = match &f {
                Some(f) => (
                    Some(counting_n(f, &inf, r, None, cfg)?),
                    Some(counting_n(f, &inf, r, Some(k), cfg)?),
                    Some(proximity_m(f, &inf, r, cfg)?),
                ),
                None => (None, None, None),
            };
            let t = n.zip(m).map(|(n, m)| n + m);
            Ok([
                Value::String(rational_to_string(r)),
                opt_num(n),
                opt_num(nk),
                opt_num(m),
                opt_num(t),
                num(h.value),
                opt_num(h.gap),
            ])
        })
        .collect();
    let mut rows = Vec::new();
    let mut out = Out::plain(Value::Null);
    for (r, c) in radii.iter().zip(computed) {
        match c {
            Ok(cells) => rows.push(("inf".to_string(), cells)),
            Err(e @ Error::NumericalGuard(_)) => {
                out.warnings
                    .push(format!("r = {}: {e}", rational_to_string(r)));
                out.partial.get_or_insert(guard_hint(e));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if f.is_none() {
        out.warnings
            .push("N, N_k, m, T and gap are reported for points [f0 : f1] only".into());
    }
    let (results, table) = grid_table(false, rows);
    out.results = results;
    out.table = Some(table);
    Ok(out)
}

fn split_places(d: &Descriptor, curve: &AdelicCurve) -> Res<Out> {
    let CurveKind::Quadratic { d: disc } = curve.kind else {
        unreachable!("validated")
    };
    let mut bases = Vec::new();
    for &p in d.primes.as_deref().unwrap_or_default() {
        if !is_prime_u64(p) {
            return Err(Error::Argument(format!("{p} is not prime")).into());
        }
        bases.push(BasePlace::Finite(p));
    }
    bases.push(BasePlace::Infinite);
    let mut json_bases = Vec::new();
    let mut rows = Vec::new();
    for base in bases {
        let kind = match splitting(disc, base)? {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
            Splitting::Real => "real",
            Splitting::Complex => "complex",
        };
        let places = split_rational_place(disc, base)?;
        let sum = places
            .iter()
            .fold(Rational::from_integer(0.into()), |acc, (_, w)| acc + w);
        let mut list = Vec::new();
        for (pl, w) in &places {
            let w = rational_to_string(w);
            rows.push(vec![
                json!(base.to_string()),
                json!(kind),
                json!(pl.key()),
                json!(w),
            ]);
            list.push(json!({"place": pl.key(), "weight": w}));
        }
        json_bases.push(json!({
            "base": base.to_string(),
            "splitting": kind,
            "places": list,
            "weight_sum": rational_to_string(&sum),
        }));
    }
    let mut out = Out::plain(json!({ "d": disc, "bases": json_bases }));
    out.table = Some(Table {
        header: ["base", "splitting", "place", "weight"]
            .map(String::from)
            .to_vec(),
        rows,
    });
    Ok(out)
}
