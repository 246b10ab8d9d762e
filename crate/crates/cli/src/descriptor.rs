//! Problem descriptors: the TOML/JSON input schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckProduct,
    Jensen,
    Degree,
    Hn,
    Height,
    Nevanlinna,
    FamilyHeight,
    SplitPlaces,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckProduct => "check-product",
            Command::Jensen => "jensen",
            Command::Degree => "degree",
            Command::Hn => "hn",
            Command::Height => "height",
            Command::Nevanlinna => "nevanlinna",
            Command::FamilyHeight => "family-height",
            Command::SplitPlaces => "split-places",
        }
    }

    /// Commands whose natural output is a radius grid.
    pub fn is_grid(self) -> bool {
        matches!(self, Command::Nevanlinna | Command::FamilyHeight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveName {
    Rational,
    Quadratic,
    Nevanlinna,
}

/// A number given either as a TOML/JSON integer or as text such as `"3/2"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    Int(i64),
    Text(String),
}

impl NumText {
    pub fn text(&self) -> String {
        match self {
            NumText::Int(n) => n.to_string(),
            NumText::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub curve: CurveName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<NumText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
}

/// A field element: a rational or function as text, or `[a, b]` for `a + b√d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Single(NumText),
    Pair([NumText; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    L2,
    Max,
}

impl From<Shape> for adelic::bundle::ArchShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::L2 => adelic::bundle::ArchShape::L2,
            Shape::Max => adelic::bundle::ArchShape::Max,
        }
    }
}

/// Log-weight of one basis vector: `{place-key: weight}` on number fields, or
/// a gauge function on discs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Places(BTreeMap<String, f64>),
    Gauge(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BundleSpec {
    Diagonal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<Shape>,
        weights: Vec<WeightSpec>,
        /// Extra `log` scale on the circle for each gauge weight.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arch_scales: Option<Vec<f64>>,
    },
    LatticeHermitian {
        /// Row-major lattice basis; identity when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lattice: Option<Vec<Vec<NumText>>>,
        gram: Vec<Vec<NumText>>,
    },
}

/// Either a standard metric of the given shape or an explicit ambient bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Standard(Shape),
    Bundle(BundleSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub command: Command,
    pub curve: CurveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ValueSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSpec>,
    /// Vector for `degree`: entries are field elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<Vec<ValueSpec>>,
    /// Integer basis vectors of a subspace for `degree` on lattice bundles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<ValueSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_metric: Option<MetricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<NumText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "toml" => Ok(Format::Toml),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}, expected toml or json")),
        }
    }
}

pub fn parse_descriptor(text: &str, format: Format) -> Result<Descriptor, CliError> {
    let value: serde_json::Value = match format {
        Format::Json => serde_json::from_str(text)
            .map_err(|e| CliError::Schema(format!("invalid JSON: {e}")))?,
        Format::Toml => {
            let t: toml::Table =
                toml::from_str(text).map_err(|e| CliError::Schema(format!("invalid TOML: {e}")))?;
            serde_json::to_value(t).map_err(|e| CliError::Schema(e.to_string()))?
        }
    };
    let d: Descriptor = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::Schema(e.inner().to_string())
        } else {
            CliError::Schema(format!("{path}: {}", e.inner()))
        }
    })?;
    validate(&d)?;
    Ok(d)
}

fn require<T>(field: &Option<T>, name: &str, cmd: Command) -> Result<(), CliError> {
    if field.is_none() {
        return Err(CliError::Schema(format!(
            "{name}: required by command {}",
            cmd.name()
        )));
    }
    Ok(())
}

/// Structural checks that need no arithmetic.
fn validate(d: &Descriptor) -> Result<(), CliError> {
    let c = &d.curve;
    match c.curve {
        CurveName::Quadratic if c.d.is_none() => {
            return Err(CliError::Schema("curve.d: required for quadratic".into()))
        }
        CurveName::Nevanlinna if c.radius.is_none() => {
            return Err(CliError::Schema("curve.R: required for nevanlinna".into()))
        }
        _ => {}
    }
    if c.d.is_some() && c.curve != CurveName::Quadratic {
        return Err(CliError::Schema(
            "curve.d: only quadratic curves take d".into(),
        ));
    }
    if c.radius.is_some() && c.curve != CurveName::Nevanlinna {
        return Err(CliError::Schema(
            "curve.R: only nevanlinna curves take R".into(),
        ));
    }
    let cmd = d.command;
    match cmd {
        Command::CheckProduct => require(&d.value, "value", cmd)?,
        Command::Jensen => require(&d.function, "function", cmd)?,
        Command::Degree | Command::Hn => require(&d.bundle, "bundle", cmd)?,
        Command::Height => require(&d.point, "point", cmd)?,
        Command::Nevanlinna => {
            require(&d.function, "function", cmd)?;
            require(&d.radii, "radii", cmd)?;
        }
        Command::FamilyHeight => {
            require(&d.point, "point", cmd)?;
            require(&d.radii, "radii", cmd)?;
        }
        Command::SplitPlaces => require(&d.primes, "primes", cmd)?,
    }
    let disc_only = matches!(
        cmd,
        Command::Jensen | Command::Nevanlinna | Command::FamilyHeight
    );
    if disc_only && c.curve != CurveName::Nevanlinna {
        return Err(CliError::Schema(format!(
            "curve.curve: command {} needs a nevanlinna curve",
            cmd.name()
        )));
    }
    if cmd == Command::SplitPlaces && c.curve != CurveName::Quadratic {
        return Err(CliError::Schema(
            "curve.curve: split-places needs a quadratic curve".into(),
        ));
    }
    if let Some(m) = &d.multiplicities {
        if m.len() != 2 {
            return Err(CliError::Schema("multiplicities: expected [m1, m2]".into()));
        }
    }
    Ok(())
}

/// Serialize a descriptor back to text in the given format.
pub fn emit_descriptor(d: &Descriptor, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            serde_json::to_string_pretty(d).map_err(|e| CliError::Schema(e.to_string()))
        }
        Format::Toml => toml::to_string(d).map_err(|e| CliError::Schema(e.to_string())),
    }
}
