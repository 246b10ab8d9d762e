use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adelic_cli::descriptor::{CurveName, NumText};
use adelic_cli::output::num;
use adelic_cli::{emit, emit_descriptor, parse_descriptor, run, CliError, Format};
use serde_json::Value;

fn corpus() -> Vec<(PathBuf, Format)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("descriptors");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let f = if p.extension().unwrap() == "json" {
                Format::Json
            } else {
                Format::Toml
            };
            (p, f)
        })
        .collect()
}

fn bin(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_adelic"));
    c.args(args);
    match threads {
        Some(t) => c.env("ADELIC_THREADS", t),
        None => c.env_remove("ADELIC_THREADS"),
    };
    c.output().unwrap()
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adelic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn results(text: &str, format: Format) -> Value {
    let d = parse_descriptor(text, format).unwrap();
    let out = emit(&run(&d).unwrap(), false).unwrap();
    serde_json::from_str::<Value>(&out).unwrap()["results"].clone()
}

#[test]
fn minimal_check_product_is_valid() {
    let d = parse_descriptor(
        r#"{"command":"check-product","curve":{"curve":"rational"},"value":"6/5"}"#,
        Format::Json,
    )
    .unwrap();
    assert_eq!(d.curve.curve, CurveName::Rational);
}

#[test]
fn unknown_key_is_named() {
    let e = parse_descriptor(
        r#"{"command":"check-product","curv":{"curve":"rational"},"value":"6/5"}"#,
        Format::Json,
    )
    .unwrap_err();
    assert!(e.to_string().contains("curv"), "{e}");
    assert_eq!(e.exit_code(), 2);
    let e = parse_descriptor(
        r#"{"command":"check-product","curve":{"curve":"rational","nodez":3},"value":"6/5"}"#,
        Format::Json,
    )
    .unwrap_err();
    assert!(e.to_string().starts_with("curve.nodez: "), "{e}");
}

#[test]
fn nevanlinna_curve_block() {
    let d = parse_descriptor(
        "command = \"jensen\"\nfunction = \"z\"\n[curve]\ncurve = \"nevanlinna\"\nR = \"2\"\nnodes = 4096\n",
        Format::Toml,
    )
    .unwrap();
    assert_eq!(d.curve.radius, Some(NumText::Text("2".into())));
    assert_eq!(d.curve.nodes, Some(4096));
    assert!(run(&d).is_ok());
}

#[test]
fn schema_errors() {
    let bad = [
        r#"{"command":"jensen","curve":{"curve":"rational"},"function":"z"}"#,
        r#"{"command":"check-product","curve":{"curve":"quadratic"},"value":"1"}"#,
        r#"{"command":"hn","curve":{"curve":"rational"}}"#,
        r#"{"command":"nevanlinna","curve":{"curve":"nevanlinna","R":"1"},"function":"z"}"#,
        r#"{"command":"split-places","curve":{"curve":"rational"},"primes":[2]}"#,
        r#"{"command":"degre","curve":{"curve":"rational"}}"#,
        r#"{"command":"check-product","curve":{"curve":"rational"},"value":"6/5""#,
    ];
    for text in bad {
        let e = parse_descriptor(text, Format::Json).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text}: {e}");
    }
    let d = parse_descriptor(
        r#"{"command":"check-product","curve":{"curve":"rational"},"value":"6/0"}"#,
        Format::Json,
    )
    .unwrap();
    assert_eq!(run(&d).unwrap_err().exit_code(), 2);
}

#[test]
fn check_product_exact() {
    let r = results(
        r#"{"command":"check-product","curve":{"curve":"rational"},"value":"6/5"}"#,
        Format::Json,
    );
    assert_eq!(r["total"], Value::from(0.0));
    assert_eq!(r["exact"], Value::Bool(true));
    let r = results(
        r#"{"command":"check-product","curve":{"curve":"quadratic","d":5},"value":["1","7"]}"#,
        Format::Json,
    );
    assert_eq!(r["exact"], Value::Bool(true));
    assert!(r["numeric_total"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn jensen_example() {
    let r = results(
        "command = \"jensen\"\nfunction = \"(z-1)/(z-3)\"\n[curve]\ncurve = \"nevanlinna\"\nR = \"2\"\n",
        Format::Toml,
    );
    let l3 = -(3f64.ln());
    assert!((r["total"].as_f64().unwrap() - l3).abs() < 1e-12);
    assert!((r["reference"].as_f64().unwrap() - l3).abs() < 1e-12);
    assert!(r["gap"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn exit_codes() {
    let ok = write_tmp(
        "ok.json",
        r#"{"command":"check-product","curve":{"curve":"rational"},"value":"6/5"}"#,
    );
    let o = bin(&["--in", ok.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "check-product");
    assert_eq!(v["results"]["total"], Value::from(0.0));

    let circle = write_tmp(
        "circle.toml",
        "command = \"jensen\"\nfunction = \"z-2\"\n[curve]\ncurve = \"nevanlinna\"\nR = \"2\"\n",
    );
    let o = bin(&["--in", circle.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("perturb R"));

    let indefinite = write_tmp(
        "indef.toml",
        "command = \"hn\"\n[curve]\ncurve = \"rational\"\n[bundle]\nkind = \"lattice-hermitian\"\ngram = [[\"1\",\"2\"],[\"2\",\"1\"]]\n",
    );
    assert_eq!(
        bin(&["--in", indefinite.to_str().unwrap()], None)
            .status
            .code(),
        Some(4)
    );

    let unknown = write_tmp(
        "unknown.json",
        r#"{"command":"check-product","curv":{"curve":"rational"},"value":"6/5"}"#,
    );
    let o = bin(&["--in", unknown.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("curv"));

    assert_eq!(
        bin(&["--in", ok.to_str().unwrap()], Some("zero"))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&["--in", ok.to_str().unwrap(), "--csv"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&["--in", "/nonexistent/x.json"], None).status.code(),
        Some(2)
    );
    let noext = write_tmp("descriptor", "{}");
    assert_eq!(
        bin(&["--in", noext.to_str().unwrap()], None).status.code(),
        Some(2)
    );
}

#[test]
fn partial_grid_keeps_good_rows() {
    let p = write_tmp(
        "partial.toml",
        "command = \"nevanlinna\"\nfunction = \"1/(z-1)\"\nradii = [\"1/2\", \"1\", \"2\"]\n[curve]\ncurve = \"nevanlinna\"\nR = \"1\"\n",
    );
    let o = bin(&["--in", p.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,N,N_k,m,T,fs_height,gap");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1/2,") && lines[2].starts_with("2,"));
}

#[test]
fn csv_header_and_target_column() {
    let d = parse_descriptor(
        "command = \"nevanlinna\"\nfunction = \"z^2\"\nradii = [\"2\"]\n[curve]\ncurve = \"nevanlinna\"\nR = \"1\"\n",
        Format::Toml,
    )
    .unwrap();
    let csv = emit(&run(&d).unwrap(), true).unwrap();
    assert!(csv.starts_with("r,N,N_k,m,T,fs_height,gap\n2,"));
    let row: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .skip(1)
        .map(|c| c.parse().unwrap())
        .collect();
    // T(2, ∞) = m = 2 log 2 for z², with the max-shaped height equal to it.
    assert!((row[3] - 2.0 * 2f64.ln()).abs() < 1e-12);
    assert!((row[4] - row[3]).abs() < 1e-12 && row[5].abs() < 1e-12);

    let (p, f) = corpus()
        .into_iter()
        .find(|(p, _)| p.ends_with("nevanlinna_table.toml"))
        .unwrap();
    let d = parse_descriptor(&std::fs::read_to_string(p).unwrap(), f).unwrap();
    let csv = emit(&run(&d).unwrap(), true).unwrap();
    assert!(csv.starts_with("target,r,N,N_k,m,T,fs_height,gap\ninf,1,"));
}

#[test]
fn hn_output_shape() {
    let r = results(
        r#"{"command":"hn","curve":{"curve":"rational"},"bundle":{"kind":"lattice-hermitian","gram":[["4","0"],["0","1"]]}}"#,
        Format::Json,
    );
    assert_eq!(r["certification"], serde_json::json!({"enumerated": 3}));
    assert_eq!(r["steps"], serde_json::json!([[[0, 1]], [[1, 0], [0, 1]]]));
    let r = results(
        r#"{"command":"hn","curve":{"curve":"rational"},"bundle":{"kind":"diagonal","weights":[{"inf":1.0},{"inf":2.0}]}}"#,
        Format::Json,
    );
    assert_eq!(r["certification"], "exact-split");
    assert_eq!(r["slopes"], serde_json::json!([-1.0, -2.0]));
}

#[test]
fn height_example() {
    let r = results(
        r#"{"command":"height","curve":{"curve":"rational"},"point":["3","4"]}"#,
        Format::Json,
    );
    assert_eq!(r["metric"], "l2");
    assert!((r["value"].as_f64().unwrap() - 5f64.ln()).abs() < 1e-14);
    let r = results(
        r#"{"command":"height","curve":{"curve":"rational"},"point":["3","4"],"second_metric":"l2","multiplicities":[2,3]}"#,
        Format::Json,
    );
    assert!(r["additivity"]["residual"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn floats_have_fifteen_digits() {
    assert_eq!(num(0.1 + 0.2), Value::from(0.3));
    assert_eq!(num(-0.0), Value::from(0.0));
    assert_eq!(num(f64::INFINITY), Value::from("inf"));
    assert_eq!(num(std::f64::consts::PI).to_string(), "3.14159265358979");
}

#[test]
fn round_trip_corpus() {
    for (p, f) in corpus() {
        let d = parse_descriptor(&std::fs::read_to_string(&p).unwrap(), f).unwrap();
        for g in [Format::Json, Format::Toml] {
            let text = emit_descriptor(&d, g).unwrap();
            let back = parse_descriptor(&text, g)
                .unwrap_or_else(|e| panic!("{}: {e}\n{text}", p.display()));
            assert_eq!(back, d, "{}", p.display());
        }
    }
}

#[test]
fn corpus_runs_and_is_deterministic() {
    for (p, _) in corpus() {
        let path = p.to_str().unwrap();
        let a = bin(&["--in", path], Some("1"));
        let b = bin(&["--in", path], Some("4"));
        let c = bin(&["--in", path], None);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{path}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{path}");
        assert_eq!(a.stdout, c.stdout, "{path}");
    }
}

#[test]
fn out_flag_writes_file() {
    let (p, _) = corpus()
        .into_iter()
        .find(|(p, _)| p.ends_with("split_places.toml"))
        .unwrap();
    let target = write_tmp("split.json", "");
    let o = bin(
        &[
            "--in",
            p.to_str().unwrap(),
            "--out",
            target.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    for base in v["results"]["bases"].as_array().unwrap() {
        assert_eq!(base["weight_sum"], "1");
    }
    let csv = bin(&["--in", p.to_str().unwrap(), "--csv"], None);
    assert!(String::from_utf8(csv.stdout)
        .unwrap()
        .starts_with("base,splitting,place,weight\np=2,ramified,"));
}

#[test]
fn errors_map_to_codes() {
    use adelic::Error as E;
    assert_eq!(
        CliError::from(E::NumericalGuard(String::new())).exit_code(),
        3
    );
    assert_eq!(CliError::from(E::Infeasible(String::new())).exit_code(), 4);
    assert_eq!(CliError::from(E::Unsupported(String::new())).exit_code(), 4);
    assert_eq!(CliError::from(E::Argument(String::new())).exit_code(), 4);
    assert_eq!(CliError::from(E::Parse(String::new())).exit_code(), 2);
}
