use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linearize::target_variables;
use crate::symexpr::{sum, Expr};
use crate::vcalc::{lie_bracket, VectorField};

/// Seed of the fixed verification sample in `[0.5, 2]^n`.
pub const KERNEL_SEED: u64 = 0x6b65_726e;
pub const KERNEL_POINTS: usize = 200;

/// `X~ = Σ u_i ∂/∂u_i`.
pub fn euler_field(n: usize) -> VectorField {
    let vars = target_variables(n);
    let components = vars.iter().map(Expr::var).collect();
    VectorField::new(components, vars).expect("coordinates are their own variables")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    /// `Y~(u) = A u`.
    Linear(Vec<Vec<f64>>),
    /// User-supplied components, expected homogeneous of degree one.
    Expressions(Vec<String>),
}

/// A vector field in the chart coordinates commuting with the Euler field.
#[derive(Debug, Clone)]
pub struct KernelElement {
    pub form: KernelForm,
    pub field: VectorField,
    /// Largest `‖[X~, Y~]‖∞` observed; exactly zero when the bracket vanished
    /// symbolically.
    pub residual: f64,
    pub symbolic_zero: bool,
}

impl KernelElement {
    /// Accepts a u-coordinate field if its bracket with the Euler field stays
    /// within `tolerance` on the verification sample.
    pub fn from_field(field: VectorField, tolerance: f64) -> Result<KernelElement> {
        let n = field.dim();
        if field.vars() != target_variables(n).as_slice() {
            return Err(Error::VariableMismatch {
                left: field.vars().to_vec(),
                right: target_variables(n),
            });
        }
        let bracket = lie_bracket(&euler_field(n), &field)?;
        let symbolic_zero = bracket.is_zero();
        let residual = if symbolic_zero { 0.0 } else { sup_residual(&bracket) };
        if !(residual <= tolerance) {
            return Err(Error::KernelRejected { residual, tolerance });
        }
        let form = KernelForm::Expressions(field.components().iter().map(ToString::to_string).collect());
        Ok(KernelElement {
            form,
            field,
            residual,
            symbolic_zero,
        })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }
}

fn sup_residual(bracket: &VectorField) -> f64 {
    let n = bracket.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(KERNEL_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..KERNEL_POINTS {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        match bracket.eval_at(&u) {
            Ok(v) => {
                let norm = v.iter().fold(0.0, |m: f64, c| m.max(c.abs()));
                worst = worst.max(if norm.is_nan() { f64::INFINITY } else { norm });
            }
            Err(_) => return f64::INFINITY,
        }
    }
    worst
}

/// Largest `‖[X~, Y~](u)‖∞` over the seeded verification points.
pub fn kernel_verify(field: &VectorField) -> Result<f64> {
    let bracket = lie_bracket(&euler_field(field.dim()), field)?;
    Ok(sup_residual(&bracket))
}

/// The linear kernel element `Y~(u) = A u`. Its bracket with the Euler field
/// must vanish identically after simplification.
pub fn kernel_linear(matrix: &[Vec<f64>], n: usize) -> Result<KernelElement> {
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: matrix.len(),
            cols,
        });
    }
    if let Some(bad) = matrix.iter().flatten().find(|v| !v.is_finite()) {
        return Err(Error::InvalidField(format!("non-finite kernel entry {bad}")));
    }
    let vars = target_variables(n);
    let components = matrix
        .iter()
        .map(|row| sum(row.iter().zip(&vars).map(|(a, v)| Expr::constant(*a) * Expr::var(v))))
        .collect();
    let field = VectorField::new(components, vars)?;
    let bracket = lie_bracket(&euler_field(n), &field)?;
    let symbolic_zero = bracket.is_zero();
    let residual = if symbolic_zero { 0.0 } else { sup_residual(&bracket) };
    Ok(KernelElement {
        form: KernelForm::Linear(matrix.to_vec()),
        field,
        residual,
        symbolic_zero,
    })
}
