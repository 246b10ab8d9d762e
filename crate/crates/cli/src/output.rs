//! Report assembly and serialization.

use serde_json::{Map, Value};

use crate::descriptor::Descriptor;
use crate::CliError;

/// A results table: header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub descriptor: Descriptor,
    pub results: Value,
    pub table: Option<Table>,
    pub warnings: Vec<String>,
    /// Set when the computation finished only partly (some grid rows tripped a guard).
    pub partial: Option<CliError>,
}

/// Float rounded to 15 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(
            if x.is_nan() {
                "nan"
            } else if x > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .into(),
        );
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float");
    Value::from(if r == 0.0 { 0.0 } else { r })
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Rounds every float inside a JSON value.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(report: &Report, csv: bool) -> Result<String, CliError> {
    if csv {
        let table = report.table.as_ref().ok_or_else(|| {
            CliError::Schema(format!(
                "command {} has no tabular output",
                report.descriptor.command.name()
            ))
        })?;
        let mut out = table.header.join(",");
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.iter().map(cell).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        return Ok(out);
    }
    let mut m = Map::new();
    m.insert(
        "command".into(),
        Value::from(report.descriptor.command.name()),
    );
    let inputs =
        serde_json::to_value(&report.descriptor).map_err(|e| CliError::Schema(e.to_string()))?;
    m.insert("inputs".into(), round_floats(inputs));
    m.insert("results".into(), round_floats(report.results.clone()));
    m.insert("warnings".into(), Value::from(report.warnings.clone()));
    m.insert(
        "version".into(),
        Value::from(concat!("adelic ", env!("CARGO_PKG_VERSION"))),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(m))
        .map_err(|e| CliError::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
