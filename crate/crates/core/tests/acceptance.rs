//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use adelic::arith::{
    factor::primes_up_to, roots, GaussianRational, QuadraticElement, Rational, RationalFunction,
};
use adelic::bundle::{
    degree, degree_element, dual_bundle, gram_of_squared_norms, tensor_bundle, ArchShape, Bundle,
    DiagonalPNF, LatticeHermitianBundle, LogWeight,
};
use adelic::curve::{defect_quadratic, symbolic_rational_defect, AdelicCurve, IntegrationConfig};
use adelic::heights::{
    cartan_fs_height, characteristic_t, defect_estimate, fmt_section_gap, height_additivity_check,
    FSMetricSpec, ProjectivePoint, Target,
};
use adelic::hn::{hn_flag, EnumConfig, Flag};
use adelic::linalg::QMatrix;
use adelic::pav::{split_rational_place, BasePlace, FieldElement, Place};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ensure_time(start: Instant, limit: f64) -> Result<f64, String> {
    let t = start.elapsed().as_secs_f64();
    check(t < limit, || format!("took {t:.2} s, limit {limit} s"))?;
    Ok(t)
}

fn product_formula() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let curve = AdelicCurve::rational();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut n = 0;
        while n == 0 {
            n = rng.gen_range(-1_000_000i64..=1_000_000);
        }
        let q = rat(n, rng.gen_range(1..=1_000_000));
        let sym = symbolic_rational_defect(&q).map_err(|e| e.to_string())?;
        check(sym.is_empty(), || {
            format!("symbolic defect of {q} is {sym:?}")
        })?;
        let d = curve
            .defect(&FieldElement::Rational(q.clone()))
            .map_err(|e| e.to_string())?
            .total;
        worst = worst.max(d.abs());
    }
    check(worst < 1e-10, || format!("max |defect| {worst:e}"))?;
    let t = ensure_time(start, 1.0)?;
    Ok(format!(
        "1000 rationals, symbolic defect 0, max |defect| {worst:.1e}, {t:.2} s"
    ))
}

/// A random Gaussian rational with denominator 100 whose modulus stays at
/// least `clearance · R` away from every radius in `radii`.
fn clear_point(rng: &mut ChaCha8Rng, span: i64, radii: &[f64], clearance: f64) -> GaussianRational {
    loop {
        let z = GaussianRational::new(
            rat(rng.gen_range(-span..=span), 100),
            rat(rng.gen_range(-span..=span), 100),
        );
        let m = z.to_complex().norm();
        if radii
            .iter()
            .all(|r| (m - r).abs() >= clearance * r.max(1.0))
        {
            return z;
        }
    }
}

fn product_of_linears(
    rng: &mut ChaCha8Rng,
    k: usize,
    span: i64,
    radii: &[f64],
    clearance: f64,
) -> RationalFunction {
    let mut f = RationalFunction::one();
    for _ in 0..k {
        let a = clear_point(rng, span, radii, clearance);
        f = f.mul(&RationalFunction::z().sub(&RationalFunction::constant(a)));
    }
    f
}

fn random_jensen_instance(rng: &mut ChaCha8Rng, radius: f64) -> RationalFunction {
    let k_num = rng.gen_range(1..=6);
    let k_den = rng.gen_range(0..=6 - k_num);
    let c = GaussianRational::new(
        rat(rng.gen_range(1..=9), rng.gen_range(1..=9)),
        rat(rng.gen_range(-3..=3), 4),
    );
    let num = product_of_linears(rng, k_num, 300, &[radius], 1e-2);
    let den = product_of_linears(rng, k_den, 300, &[radius], 1e-2);
    num.div(&den).unwrap().mul(&RationalFunction::constant(c))
}

fn jensen() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let radii = [rat(1, 1), rat(3, 2)];
    let instances: Vec<(Rational, RationalFunction)> = (0..50)
        .map(|i| {
            let r = radii[i % 2].clone();
            let f = random_jensen_instance(&mut rng, adelic::numeric::rational_to_f64(&r));
            (r, f)
        })
        .collect();
    let max_gap = |nodes: usize| -> Result<f64, String> {
        let cfg = IntegrationConfig::new(nodes, 1e-8, 1e-8).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for (r, f) in &instances {
            let c = AdelicCurve::nevanlinna(r.clone())
                .unwrap()
                .with_integration(cfg.clone())
                .unwrap();
            let rep = c
                .defect(&FieldElement::Meromorphic(f.clone()))
                .map_err(|e| format!("{f} at R={r}: {e}"))?;
            worst = worst.max(rep.gap.unwrap().abs());
        }
        Ok(worst)
    };
    let at_4096 = max_gap(4096)?;
    check(at_4096 < 1e-8, || {
        format!("max gap {at_4096:e} at 4096 nodes")
    })?;
    // Finest level still above roundoff, so that the doubling ratio is observable.
    let mut base = 4096;
    let mut g_base = at_4096;
    while g_base <= 1e-11 && base > 16 {
        base /= 2;
        g_base = max_gap(base)?;
    }
    let g_double = max_gap(2 * base)?;
    let ratio = g_base / g_double.max(f64::MIN_POSITIVE);
    check(ratio >= 4.0, || {
        format!(
            "doubling {base}->{} shrinks max gap only {ratio:.2}x",
            2 * base
        )
    })?;
    let t = ensure_time(start, 5.0)?;
    Ok(format!(
        "50 functions, max gap {at_4096:.1e} at 4096 nodes; {base}->{} nodes: {g_base:.1e} -> {g_double:.1e} \
         ({ratio:.1e}x), {t:.2} s",
        2 * base
    ))
}

fn extension_weights() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut places = 0;
    for d in [-1i64, -3, 5, -5] {
        for p in primes_up_to(100) {
            let parts = split_rational_place(d, BasePlace::Finite(p)).map_err(|e| e.to_string())?;
            places += parts.len();
            let total: Rational = parts.iter().map(|(_, w)| w.clone()).sum();
            check(total.is_one(), || {
                format!("weights over p={p} in Q(sqrt {d}) sum to {total}")
            })?;
        }
        for _ in 0..20 {
            let mut a = rat(0, 1);
            let mut b = rat(0, 1);
            while a.is_zero() && b.is_zero() {
                a = rat(rng.gen_range(-1000..=1000), rng.gen_range(1..=1000));
                b = rat(rng.gen_range(-1000..=1000), rng.gen_range(1..=1000));
            }
            let x = QuadraticElement::new(d, a, b);
            let dq = defect_quadratic(&x).map_err(|e| e.to_string())?.total;
            worst = worst.max(dq.abs());
        }
    }
    check(worst < 1e-10, || format!("max |defect| {worst:e}"))?;
    Ok(format!("{places} places over p <= 100 with exact unit weight sums, 80 elements max |defect| {worst:.1e}"))
}

fn random_gram(rng: &mut ChaCha8Rng, n: usize) -> QMatrix {
    loop {
        let mut g = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rat(rng.gen_range(-2..=2), 1);
                g[(i, j)] = x.clone();
                g[(j, i)] = x;
            }
        }
        if g.is_positive_definite() {
            return g;
        }
    }
}

fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> LatticeHermitianBundle {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-2..=2), 1)).collect())
            .collect();
        let m = QMatrix::from_rows(rows).unwrap();
        if let Ok(b) = LatticeHermitianBundle::new(m, random_gram(rng, n)) {
            return b;
        }
    }
}

fn random_diagonal(rng: &mut ChaCha8Rng, n: usize) -> DiagonalPNF {
    let places = [
        Place::RationalInfinite,
        Place::RationalFinite(2),
        Place::RationalFinite(5),
    ];
    let weights = (0..n)
        .map(|_| {
            let mut w = Vec::new();
            for p in &places {
                if rng.gen_bool(0.5) {
                    w.push((p.clone(), rng.gen_range(-3.0..3.0)));
                }
            }
            LogWeight::Discrete(w)
        })
        .collect();
    let shape = if rng.gen_bool(0.5) {
        ArchShape::L2
    } else {
        ArchShape::Max
    };
    DiagonalPNF::new(AdelicCurve::rational(), weights, shape).unwrap()
}

fn degree_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (a, b): (Bundle, Bundle) = if i % 2 == 0 {
            (
                random_diagonal(&mut rng, n).into(),
                random_diagonal(&mut rng, m).into(),
            )
        } else {
            (
                random_lattice(&mut rng, n).into(),
                random_lattice(&mut rng, m).into(),
            )
        };
        let da = degree(&a).unwrap();
        let db = degree(&b).unwrap();
        worst = worst.max((degree(&dual_bundle(&a)).unwrap() + da).abs());
        let t = degree(&tensor_bundle(&a, &b).unwrap()).unwrap();
        worst = worst.max((t - (m as f64 * da + n as f64 * db)).abs());
    }
    check(worst < 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!(
        "100 diagonal + 100 lattice bundles, max residual {worst:.1e}"
    ))
}

fn strictly_decreasing(f: &Flag) -> bool {
    f.slopes.windows(2).all(|w| w[0] > w[1])
}

/// Coordinate flag from sorting integer degrees.
fn sorted_flag(degs: &[i64]) -> (Vec<Vec<usize>>, Vec<f64>) {
    let mut distinct: Vec<i64> = degs.to_vec();
    distinct.sort_unstable_by(|a, b| b.cmp(a));
    distinct.dedup();
    let steps = distinct
        .iter()
        .map(|d| (0..degs.len()).filter(|&i| degs[i] >= *d).collect())
        .collect();
    (steps, distinct.iter().map(|&d| d as f64).collect())
}

fn hn() -> Outcome {
    let start = Instant::now();
    let cfg = EnumConfig::new(4, 6).unwrap();
    let mut diag_count = 0;
    for rank in 1..=5u32 {
        for code in 0..7usize.pow(rank) {
            let mut c = code;
            let degs: Vec<i64> = (0..rank)
                .map(|_| {
                    let d = (c % 7) as i64 - 3;
                    c /= 7;
                    d
                })
                .collect();
            let w: Vec<f64> = degs.iter().map(|&d| -(d as f64)).collect();
            let b: Bundle = DiagonalPNF::archimedean(&w, ArchShape::L2).unwrap().into();
            let flag = hn_flag(&b, &cfg).unwrap();
            let (steps, slopes) = sorted_flag(&degs);
            check(strictly_decreasing(&flag) && flag.slopes == slopes, || {
                format!("slopes {:?} for {degs:?}", flag.slopes)
            })?;
            for (s, idx) in flag.steps.iter().zip(&steps) {
                let cols = s.matrix().columns();
                let got: Vec<usize> = cols
                    .iter()
                    .map(|c| c.iter().position(|x| !x.is_zero()).unwrap())
                    .collect();
                check(&got == idx, || {
                    format!("step {got:?} vs {idx:?} for {degs:?}")
                })?;
            }
            diag_count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let b: Bundle = random_lattice(&mut rng, n).into();
        let flag = hn_flag(&b, &cfg).map_err(|e| e.to_string())?;
        check(strictly_decreasing(&flag), || {
            format!("slopes not decreasing: {:?}", flag.slopes)
        })?;
        let total: f64 = flag.subquotient_degrees().iter().sum();
        worst = worst.max((total - degree(&b).unwrap()).abs());
    }
    check(worst < 1e-10, || {
        format!("subquotient degrees miss deg(E) by {worst:e}")
    })?;
    // Diagonal families embedded as lattices with Gram entries e^{2λ}.
    let squares = [rat(1, 4), rat(1, 1), rat(4, 1)];
    let mut embedded = 0;
    for n in 1..=3u32 {
        for code in 0..3usize.pow(n) {
            let mut c = code;
            let norms: Vec<Rational> = (0..n)
                .map(|_| {
                    let q = squares[c % 3].clone();
                    c /= 3;
                    q
                })
                .collect();
            let lambdas: Vec<f64> = norms
                .iter()
                .map(|q| 0.5 * adelic::numeric::rational_to_f64(q).ln())
                .collect();
            let split = hn_flag(
                &DiagonalPNF::archimedean(&lambdas, ArchShape::L2)
                    .unwrap()
                    .into(),
                &cfg,
            )
            .unwrap();
            let enumd = hn_flag(&gram_of_squared_norms(&norms).unwrap().into(), &cfg).unwrap();
            let same = split.dims() == enumd.dims()
                && split
                    .steps
                    .iter()
                    .zip(&enumd.steps)
                    .all(|(a, b)| a.same_span(b))
                && split
                    .slopes
                    .iter()
                    .zip(&enumd.slopes)
                    .all(|(a, b)| (a - b).abs() < 1e-12);
            check(same, || {
                format!("split and enumerated flags differ for Gram {norms:?}")
            })?;
            embedded += 1;
        }
    }
    let t = ensure_time(start, 30.0)?;
    Ok(format!(
        "{diag_count} diagonal flags exact, 50 lattice flags (B = 4) max degree residual {worst:.1e}, \
         {embedded} embedded instances agree, {t:.2} s"
    ))
}

fn rescaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = EnumConfig::new(3, 6).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let d = random_diagonal(&mut rng, n);
        let c = rng.gen_range(-2.0..2.0);
        let f = hn_flag(&d.clone().into(), &cfg).unwrap();
        let g = hn_flag(&d.rescale_archimedean(c).into(), &cfg).unwrap();
        check(f.steps == g.steps, || {
            "diagonal flag moved under rescaling".into()
        })?;
        for (x, y) in f.slopes.iter().zip(&g.slopes) {
            worst = worst.max((y - (x - c)).abs());
        }
    }
    for _ in 0..20 {
        let n = rng.gen_range(1..=3);
        let b = random_lattice(&mut rng, n);
        let k = rng.gen_range(1..=5);
        let q = rat(k * k, 1);
        let c = (k as f64).ln();
        let f = hn_flag(&b.clone().into(), &cfg).unwrap();
        let g = hn_flag(&b.rescale(&q).unwrap().into(), &cfg).unwrap();
        check(
            f.dims() == g.dims() && f.steps.iter().zip(&g.steps).all(|(a, b)| a.same_span(b)),
            || "lattice flag moved under rescaling".into(),
        )?;
        for (x, y) in f.slopes.iter().zip(&g.slopes) {
            worst = worst.max((y - (x - c)).abs());
        }
    }
    check(worst < 1e-12, || format!("slope shift off by {worst:e}"))?;
    Ok(format!(
        "20 diagonal + 20 lattice instances, slope shift residual {worst:.1e}, flags unchanged"
    ))
}

fn heights() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let curve = AdelicCurve::rational();
    let l2 = FSMetricSpec::standard(curve.clone(), 1, ArchShape::L2).unwrap();
    let identity = FSMetricSpec::new(LatticeHermitianBundle::standard(2).into());
    let skewed = FSMetricSpec::new(
        LatticeHermitianBundle::with_gram(QMatrix::diagonal(&[rat(4, 1), rat(1, 1)]))
            .unwrap()
            .into(),
    );
    let mut worst: f64 = 0.0;
    let mut bound_slack = f64::INFINITY;
    let mut distance = 0.0;
    for _ in 0..100 {
        let mut x = [0i64, 0];
        while x == [0, 0] {
            x = [rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000)];
        }
        let p = ProjectivePoint::from_ints(&x).unwrap();
        for m in 1..=4 {
            for spec in [&l2, &skewed] {
                let r = height_additivity_check(&curve, spec, spec, &p, m, 0)
                    .map_err(|e| e.to_string())?;
                worst = worst.max(r.residual.abs());
            }
        }
        let r = height_additivity_check(&curve, &identity, &skewed, &p, 1, 1)
            .map_err(|e| e.to_string())?;
        distance = r.distance.unwrap();
        check(r.bound_holds == Some(true), || {
            format!("|h1 - h2| exceeds the distance at {x:?}")
        })?;
        bound_slack = bound_slack.min(distance - (r.h1 - r.h2).abs());
    }
    check(worst < 1e-10, || format!("max |h_O(m) - m h| {worst:e}"))?;
    check((distance - 2f64.ln()).abs() < 1e-12, || {
        format!("distance integral {distance}")
    })?;
    Ok(format!(
        "100 points, m <= 4: max residual {worst:.1e}; |h1 - h2| <= log 2 with min slack {bound_slack:.1e}"
    ))
}

fn random_target(rng: &mut ChaCha8Rng) -> Target {
    if rng.gen_bool(0.3) {
        Target::Infinity
    } else {
        Target::Finite(GaussianRational::new(
            rat(rng.gen_range(-8..=8), 2),
            rat(rng.gen_range(-8..=8), 2),
        ))
    }
}

/// Zeros of `f − a` (or poles for `a = ∞`) and the poles of `f` clear every circle.
fn clears(f: &RationalFunction, a: &Target, radii: &[f64]) -> bool {
    let mut polys = vec![f.numer().clone(), f.denom().clone()];
    if let Target::Finite(a) = a {
        let g = f.sub(&RationalFunction::constant(a.clone()));
        if g.is_zero() || g.numer().is_constant() && g.denom().is_constant() {
            return false;
        }
        polys.push(g.numer().clone());
    }
    polys.iter().all(|p| match roots(p) {
        Ok(rs) => rs.iter().all(|r| {
            radii
                .iter()
                .all(|rr| (r.location.norm() - rr).abs() >= 1e-2 * rr)
        }),
        Err(_) => false,
    })
}

fn nevanlinna_fmt() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = IntegrationConfig::default();
    let grid: Vec<Rational> = (1..=7).map(|k| rat(1 << k, 1)).collect();
    let grid_f: Vec<f64> = grid.iter().map(adelic::numeric::rational_to_f64).collect();
    let mut worst_fmt: f64 = 0.0;
    let mut worst_cartan_excess = f64::NEG_INFINITY;
    let mut instances = 0;
    while instances < 20 {
        let k_num = rng.gen_range(1..=3);
        let k_den = rng.gen_range(0..=2);
        let f = product_of_linears(&mut rng, k_num, 20_000, &grid_f, 1e-2)
            .div(&product_of_linears(&mut rng, k_den, 20_000, &grid_f, 1e-2))
            .unwrap()
            .mul(&RationalFunction::constant(GaussianRational::new(
                rat(rng.gen_range(1..=5), 2),
                rat(0, 1),
            )));
        if f.as_constant().is_some() {
            continue;
        }
        let (a1, a2) = (random_target(&mut rng), random_target(&mut rng));
        if !clears(&f, &a1, &grid_f) || !clears(&f, &a2, &grid_f) {
            continue;
        }
        for row in fmt_section_gap(&f, &a1, &a2, &grid, &cfg).map_err(|e| e.to_string())? {
            let gap = row
                .gap
                .ok_or_else(|| format!("{f}, {a1} vs {a2} at R={}: guard", row.radius))?;
            worst_fmt = worst_fmt.max(gap.abs());
        }
        if f.denom().is_constant() || clears(&f, &Target::Infinity, &grid_f) {
            let p = ProjectivePoint::holomorphic(&[RationalFunction::one(), f.clone()]).unwrap();
            for r in &grid {
                for shape in [ArchShape::Max, ArchShape::L2] {
                    let h =
                        cartan_fs_height(&p, shape, r, None, &cfg).map_err(|e| e.to_string())?;
                    worst_cartan_excess =
                        worst_cartan_excess.max(h.gap.unwrap().abs() - h.gap_bound.unwrap());
                }
            }
        }
        instances += 1;
    }
    check(worst_fmt < 1e-6, || {
        format!("section-change gap {worst_fmt:e}")
    })?;
    check(worst_cartan_excess <= 1e-9, || {
        format!("height gap exceeds its bound by {worst_cartan_excess:e}")
    })?;
    let z2: RationalFunction = "z^2".parse().unwrap();
    let table = defect_estimate(
        &z2,
        &Target::Infinity,
        &[rat(10, 1), rat(100, 1), rat(1000, 1)],
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let limit = table.limit.unwrap();
    check((limit - 1.0).abs() < 1e-3, || {
        format!("defect ratio of z^2 at inf is {limit}")
    })?;
    Ok(format!(
        "20 functions over R = 2..128: max |gap| {worst_fmt:.1e}; height gap within bound (max excess \
         {worst_cartan_excess:.1e}); m/T for z^2 at inf reaches {limit:.6}"
    ))
}

fn family_degree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = IntegrationConfig::default();
    let radii = [rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1), rat(8, 1)];
    let radii_f: Vec<f64> = radii.iter().map(adelic::numeric::rational_to_f64).collect();
    let mut worst: f64 = 0.0;
    let mut residual_vs_t: f64 = 0.0;
    for _ in 0..10 {
        let (k_num, k_den) = (rng.gen_range(1..=3), rng.gen_range(0..=2));
        let f = product_of_linears(&mut rng, k_num, 1000, &radii_f, 1e-2)
            .div(&product_of_linears(&mut rng, k_den, 1000, &radii_f, 1e-2))
            .unwrap();
        let c = f.laurent_leading(&GaussianRational::zero()).unwrap();
        let log_c = 0.5 * adelic::numeric::ln_abs_rational(&c.norm_sqr());
        let scale = rng.gen_range(-1.0..1.0);
        for r in &radii {
            let curve = AdelicCurve::nevanlinna(r.clone())
                .unwrap()
                .with_integration(cfg.clone())
                .unwrap();
            let weight = LogWeight::Gauge {
                gauge: RationalFunction::one(),
                arch_log_scale: scale,
            };
            let b: Bundle = DiagonalPNF::new(curve, vec![weight], ArchShape::L2)
                .unwrap()
                .into();
            let d = degree_element(&b, &[FieldElement::Meromorphic(f.clone())])
                .map_err(|e| e.to_string())?;
            worst = worst.max((d - (-log_c - scale)).abs());
            let t = characteristic_t(&f, &Target::Infinity, r, &cfg).map_err(|e| e.to_string())?;
            residual_vs_t = residual_vs_t.max((d - (t - scale)).abs());
        }
    }
    check(worst < 1e-6, || {
        format!("deg(f e) misses -log|c(f,0)| - log||e|| by {worst:e}")
    })?;
    Ok(format!(
        "10 functions x 5 radii: max |deg - (-log|c| - log||e||)| {worst:.1e}; \
         residual against T(R,f) - log||e|| (reported, not asserted) up to {residual_vs_t:.3}"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("product formula over Q", product_formula),
        ("Jensen defect on discs", jensen),
        ("quadratic extension weights", extension_weights),
        ("degree identities", degree_identities),
        ("Harder-Narasimhan flags", hn),
        ("rescaling", rescaling),
        ("heights of rational points", heights),
        ("first main theorem", nevanlinna_fmt),
        ("family degree", family_degree),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
