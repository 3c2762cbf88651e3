use std::collections::BTreeMap;

use serde::Serialize;

use super::field::VectorField;
use crate::error::{Error, Result};
use crate::symexpr::Expr;

/// Closed box `[lo_i, hi_i]` used as the sampling window inside the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainBox {
    bounds: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<DomainBox> {
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidSystem(format!(
                    "domain interval {i} must satisfy lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(DomainBox { bounds })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<DomainBox> {
        DomainBox::new(vec![(lo, hi); n])
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(v, &(lo, hi))| lo <= *v && *v <= hi)
    }
}

/// Named numerical thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Rejection threshold for `|ν|`.
    pub nu: f64,
    /// Rejection threshold for the degeneracy product (relative).
    pub oset: f64,
    /// Rejection threshold for `|det DΦ|`.
    pub det: f64,
    /// Minimum normalized `(n-1)`-minor of the integrals' Jacobian.
    pub rank: f64,
    pub conservation: f64,
    pub realization: f64,
    pub linearization: f64,
    /// Bound on `[X~, Y~]` for kernel elements.
    pub kernel: f64,
    /// Bound on `‖[X,Y] - μX‖∞ / (1 + ‖X‖∞)` for a valid certificate.
    pub symmetry: f64,
    /// Bound on the integral drift along a mapped orbit.
    pub orbit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            nu: 1e-8,
            oset: 1e-8,
            det: 1e-8,
            rank: 1e-8,
            conservation: 1e-9,
            realization: 1e-9,
            linearization: 1e-8,
            kernel: 1e-10,
            symmetry: 1e-6,
            orbit: 1e-6,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 10] = [
        "nu",
        "oset",
        "det",
        "rank",
        "conservation",
        "realization",
        "linearization",
        "kernel",
        "symmetry",
        "orbit",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "nu" => &mut self.nu,
            "oset" => &mut self.oset,
            "det" => &mut self.det,
            "rank" => &mut self.rank,
            "conservation" => &mut self.conservation,
            "realization" => &mut self.realization,
            "linearization" => &mut self.linearization,
            "kernel" => &mut self.kernel,
            "symmetry" => &mut self.symmetry,
            "orbit" => &mut self.orbit,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSystem(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::UnknownTolerance(name.to_string()))?;
        *slot = value;
        Ok(())
    }

    pub fn apply_overrides(&mut self, overrides: &BTreeMap<String, f64>) -> Result<()> {
        overrides.iter().try_for_each(|(k, v)| self.set(k, *v))
    }
}

/// One problem instance: a vector field with `n - 1` first integrals
/// `C_1, …, C_{n-2}, H` and a rescaling `ν`.
#[derive(Debug, Clone)]
pub struct IntegrableSystem {
    name: String,
    field: VectorField,
    casimirs: Vec<Expr>,
    hamiltonian: Expr,
    nu: Expr,
    domain: DomainBox,
    tolerances: Tolerances,
    seed: u64,
}

impl IntegrableSystem {
    pub fn new(
        field: VectorField,
        casimirs: Vec<Expr>,
        hamiltonian: Expr,
        nu: Expr,
        domain: DomainBox,
    ) -> Result<IntegrableSystem> {
        let n = field.dim();
        if n < 2 {
            return Err(Error::InvalidSystem(format!("dimension must be at least 2, got {n}")));
        }
        if casimirs.len() != n - 2 {
            return Err(Error::InvalidSystem(format!(
                "a {n}-dimensional system needs {} Casimirs, got {}",
                n - 2,
                casimirs.len()
            )));
        }
        if domain.dim() != n {
            return Err(Error::InvalidSystem(format!(
                "domain has {} intervals for {n} variables",
                domain.dim()
            )));
        }
        let vars = field.vars();
        for (label, e) in casimirs
            .iter()
            .map(|c| ("integral", c))
            .chain([("hamiltonian", &hamiltonian), ("nu", &nu)])
        {
            if let Some(v) = e.free_vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(Error::InvalidSystem(format!(
                    "{label} `{e}` uses unknown variable `{v}`"
                )));
            }
        }
        Ok(IntegrableSystem {
            name: String::from("system"),
            field,
            casimirs,
            hamiltonian,
            nu,
            domain,
            tolerances: Tolerances::default(),
            seed: 0,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn vars(&self) -> &[String] {
        self.field.vars()
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn casimirs(&self) -> &[Expr] {
        &self.casimirs
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    pub fn nu(&self) -> &Expr {
        &self.nu
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn tolerances_mut(&mut self) -> &mut Tolerances {
        &mut self.tolerances
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `C_1, …, C_{n-2}, H` in order.
    pub fn integrals(&self) -> Vec<Expr> {
        let mut out = self.casimirs.clone();
        out.push(self.hamiltonian.clone());
        out
    }

    pub(crate) fn replace_dynamics(&self, field: VectorField, nu: Expr) -> IntegrableSystem {
        IntegrableSystem {
            field,
            nu,
            ..self.clone()
        }
    }
}
