//! JSON system definitions.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::target_variables;
use crate::symexpr::{parse_expr, Expr};
use crate::symgen::{apply_rescaling, FlowSpec, Integrator};
use crate::vcalc::{DomainBox, IntegrableSystem, Tolerances, VectorField};

/// The file format, field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub dimension: usize,
    pub variables: Vec<String>,
    pub vector_field: Vec<String>,
    pub integrals: Vec<String>,
    pub hamiltonian: String,
    pub nu: String,
    pub domain: Vec<[f64; 2]>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub kernel_elements: Vec<KernelSpec>,
    #[serde(default)]
    pub rescaling: Option<String>,
    #[serde(default)]
    pub flow: Option<FlowDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Matrix(Vec<Vec<f64>>),
    Expressions(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDocument {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    /// Local tolerance for `rk45`, fixed step for `rk4`.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_epsilon() -> f64 {
    FlowSpec::default().epsilon
}

fn default_horizon() -> f64 {
    FlowSpec::default().horizon
}

fn default_integrator() -> Integrator {
    Integrator::Rk45
}

fn default_tol() -> f64 {
    FlowSpec::default().tol
}

impl FlowDocument {
    pub fn to_spec(&self) -> FlowSpec {
        let base = FlowSpec::default();
        match self.integrator {
            Integrator::Rk4 => FlowSpec {
                integrator: Integrator::Rk4,
                step: self.tol,
                tol: base.tol,
                horizon: self.horizon,
                epsilon: self.epsilon,
            },
            Integrator::Rk45 => FlowSpec {
                integrator: Integrator::Rk45,
                step: base.step,
                tol: self.tol,
                horizon: self.horizon,
                epsilon: self.epsilon,
            },
        }
    }
}

/// A kernel element as loaded: a matrix, or components in `u1..un`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelInput {
    Matrix(Vec<Vec<f64>>),
    Field(VectorField),
}

/// A validated document with its system built; the rescaling, if any, is
/// already applied.
#[derive(Debug, Clone)]
pub struct SystemDocument {
    pub name: String,
    pub raw: RawDocument,
    pub system: IntegrableSystem,
    pub kernels: Vec<KernelInput>,
    pub flow: FlowSpec,
    pub samples: usize,
    pub rescaling: Option<Expr>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_field(text: &str, vars: &[String], field: String) -> Result<Expr> {
    parse_expr(text, vars).map_err(|source| Error::ExpressionSyntax { field, source })
}

pub fn load_system(path: &Path) -> Result<SystemDocument> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.display().to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into());
    SystemDocument::from_json(&text, &name)
}

impl SystemDocument {
    pub fn from_json(text: &str, name: &str) -> Result<SystemDocument> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            // serde reports a missing field on the enclosing object
            let message = inner.to_string();
            let path = match missing_field(&message) {
                Some(field) if path == "." => field.to_string(),
                Some(field) => format!("{path}.{field}"),
                None => path,
            };
            schema(path, message)
        })?;
        SystemDocument::from_raw(raw, name)
    }

    pub fn from_raw(raw: RawDocument, name: &str) -> Result<SystemDocument> {
        let n = raw.dimension;
        if n < 2 {
            return Err(schema("dimension", format!("must be at least 2, got {n}")));
        }
        let counts = [
            ("variables", raw.variables.len(), n),
            ("vector_field", raw.vector_field.len(), n),
            ("integrals", raw.integrals.len(), n - 2),
            ("domain", raw.domain.len(), n),
        ];
        for (field, got, want) in counts {
            if got != want {
                return Err(schema(
                    field,
                    format!("expected {want} entries for dimension {n}, got {got}"),
                ));
            }
        }
        let vars = raw.variables.clone();
        for (i, v) in vars.iter().enumerate() {
            let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || vars[..i].contains(v) {
                return Err(schema(
                    format!("variables[{i}]"),
                    format!("invalid or repeated name `{v}`"),
                ));
            }
        }
        if raw.samples == 0 {
            return Err(schema("samples", "must be at least 1"));
        }
        for (i, [lo, hi]) in raw.domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(schema(
                    format!("domain[{i}]"),
                    format!("need lo < hi, got [{lo}, {hi}]"),
                ));
            }
        }
        let components = raw
            .vector_field
            .iter()
            .enumerate()
            .map(|(i, s)| parse_field(s, &vars, format!("vector_field[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let casimirs = raw
            .integrals
            .iter()
            .enumerate()
            .map(|(i, s)| parse_field(s, &vars, format!("integrals[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let hamiltonian = parse_field(&raw.hamiltonian, &vars, "hamiltonian".into())?;
        let nu = parse_field(&raw.nu, &vars, "nu".into())?;
        let rescaling = raw
            .rescaling
            .as_deref()
            .map(|s| parse_field(s, &vars, "rescaling".into()))
            .transpose()?;

        let mut tolerances = Tolerances::default();
        for (k, v) in &raw.tolerances {
            tolerances
                .set(k, *v)
                .map_err(|e| schema(format!("tolerances.{k}"), e.to_string()))?;
        }

        let u_vars = target_variables(n);
        let mut kernels = Vec::with_capacity(raw.kernel_elements.len());
        for (i, k) in raw.kernel_elements.iter().enumerate() {
            match k {
                KernelSpec::Matrix(rows) => {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(schema(
                            format!("kernel_elements[{i}].matrix"),
                            format!("expected a {n}x{n} matrix"),
                        ));
                    }
                    kernels.push(KernelInput::Matrix(rows.clone()));
                }
                KernelSpec::Expressions(exprs) => {
                    if exprs.len() != n {
                        return Err(schema(
                            format!("kernel_elements[{i}].expressions"),
                            format!("expected {n} components in {}", u_vars.join(", ")),
                        ));
                    }
                    let comps = exprs
                        .iter()
                        .enumerate()
                        .map(|(j, s)| parse_field(s, &u_vars, format!("kernel_elements[{i}].expressions[{j}]")))
                        .collect::<Result<Vec<_>>>()?;
                    kernels.push(KernelInput::Field(VectorField::new(comps, u_vars.clone())?));
                }
            }
        }
        if kernels.is_empty() {
            let identity = (0..n)
                .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
                .collect();
            kernels.push(KernelInput::Matrix(identity));
        }

        let flow = raw.flow.as_ref().map(FlowDocument::to_spec).unwrap_or_default();
        flow.validate().map_err(|e| schema("flow", e.to_string()))?;

        let domain = DomainBox::new(raw.domain.iter().map(|[lo, hi]| (*lo, *hi)).collect())?;
        let field = VectorField::new(components, vars)?;
        let mut system = IntegrableSystem::new(field, casimirs, hamiltonian, nu, domain)?
            .with_name(name)
            .with_seed(raw.seed)
            .with_tolerances(tolerances);
        if let Some(m) = &rescaling {
            system = apply_rescaling(&system, m)?;
        }
        Ok(SystemDocument {
            name: name.to_string(),
            samples: raw.samples,
            raw,
            system,
            kernels,
            flow,
            rescaling,
        })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALING: &str = r#"{
        "dimension": 2,
        "variables": ["x1", "x2"],
        "vector_field": ["x1", "x2"],
        "integrals": [],
        "hamiltonian": "x2/x1",
        "nu": "x1^2",
        "domain": [[0.5, 2.0], [-1.0, 1.0]],
        "samples": 100,
        "seed": 7
    }"#;

    #[test]
    fn minimal_document() {
        let doc = SystemDocument::from_json(SCALING, "scaling2d").unwrap();
        assert_eq!(doc.dim(), 2);
        assert_eq!(doc.system.name(), "scaling2d");
        assert_eq!(doc.system.seed(), 7);
        assert_eq!(
            doc.kernels,
            vec![KernelInput::Matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]])]
        );
        assert_eq!(doc.flow, FlowSpec::default());
    }

    #[test]
    fn missing_nu_names_the_field() {
        let text = SCALING.replace(r#""nu": "x1^2","#, "");
        match SystemDocument::from_json(&text, "s").unwrap_err() {
            Error::SchemaError { path, message } => {
                assert_eq!(path, "nu");
                assert!(message.contains("nu"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn type_errors_carry_the_path() {
        let text = SCALING.replace("[0.5, 2.0]", r#"[0.5, "two"]"#);
        match SystemDocument::from_json(&text, "s").unwrap_err() {
            Error::SchemaError { path, .. } => assert_eq!(path, "domain[0][1]"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = SCALING.replace(r#""seed": 7"#, r#""seed": 7, "colour": 1"#);
        assert!(matches!(
            SystemDocument::from_json(&text, "s"),
            Err(Error::SchemaError { .. })
        ));
    }

    #[test]
    fn malformed_expression_reports_offset() {
        let text = SCALING.replace(r#""hamiltonian": "x2/x1""#, r#""hamiltonian": "x1+*2""#);
        match SystemDocument::from_json(&text, "s").unwrap_err() {
            Error::ExpressionSyntax { field, source } => {
                assert_eq!(field, "hamiltonian");
                assert_eq!(source.offset, 3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn count_and_interval_validation() {
        let text = SCALING.replace(r#""integrals": []"#, r#""integrals": ["x1"]"#);
        assert!(matches!(
            SystemDocument::from_json(&text, "s"),
            Err(Error::SchemaError { path, .. }) if path == "integrals"
        ));
        let text = SCALING.replace("[0.5, 2.0]", "[2.0, 0.5]");
        assert!(matches!(
            SystemDocument::from_json(&text, "s"),
            Err(Error::SchemaError { path, .. }) if path == "domain[0]"
        ));
        let text = SCALING.replace(r#""seed": 7"#, r#""seed": 7, "tolerances": {"speed": 1.0}"#);
        assert!(matches!(
            SystemDocument::from_json(&text, "s"),
            Err(Error::SchemaError { path, .. }) if path == "tolerances.speed"
        ));
    }

    #[test]
    fn kernel_elements_and_flow() {
        let text = SCALING.replace(
            r#""seed": 7"#,
            r#""seed": 7,
               "kernel_elements": [{"matrix": [[0, 0], [1, 0]]}, {"expressions": ["u1", "u2*u1/u1"]}],
               "flow": {"epsilon": 0.05, "horizon": 2.0, "integrator": "rk4", "tol": 0.001}"#,
        );
        let doc = SystemDocument::from_json(&text, "s").unwrap();
        assert_eq!(doc.kernels.len(), 2);
        assert!(matches!(&doc.kernels[1], KernelInput::Field(f) if f.vars() == ["u1", "u2"]));
        assert_eq!(doc.flow.integrator, Integrator::Rk4);
        assert_eq!(doc.flow.step, 0.001);
        assert_eq!(doc.flow.epsilon, 0.05);

        let bad = SCALING.replace(r#""seed": 7"#, r#""seed": 7, "kernel_elements": [{"matrix": [[1]]}]"#);
        assert!(matches!(
            SystemDocument::from_json(&bad, "s"),
            Err(Error::SchemaError { path, .. }) if path == "kernel_elements[0].matrix"
        ));
    }

    #[test]
    fn rescaling_of_scaling_gives_quadratic() {
        let text = SCALING.replace(r#""seed": 7"#, r#""seed": 7, "rescaling": "x1""#);
        let doc = SystemDocument::from_json(&text, "s").unwrap();
        let vars = doc.system.vars().to_vec();
        let p = |s: &str| parse_expr(s, &vars).unwrap();
        assert_eq!(doc.system.field().components(), &[p("x1^2"), p("x1*x2")]);
        assert_eq!(doc.system.nu(), &p("x1^3"));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_system(Path::new("/nonexistent/system.json")),
            Err(Error::FileNotFound(_))
        ));
    }
}
