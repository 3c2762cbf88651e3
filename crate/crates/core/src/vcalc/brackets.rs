use super::det::det_symbolic;
use super::field::{jacobian_matrix, VectorField};
use super::system::IntegrableSystem;
use crate::error::{Error, Result};
use crate::symexpr::{simplify, sum, Expr};

/// Divergence with respect to the standard volume form: `Σ ∂X_i/∂x_i`.
pub fn divergence(x: &VectorField) -> Expr {
    sum(x.components().iter().zip(x.vars()).map(|(c, v)| c.diff(v)))
}

/// `X(f) = Σ X_i ∂f/∂x_i`.
pub fn directional_derivative(x: &VectorField, f: &Expr) -> Expr {
    sum(x.components().iter().zip(x.vars()).map(|(c, v)| c * &f.diff(v)))
}

/// `[X, Y]` with the convention `[X,Y](f) = X(Y(f)) - Y(X(f))`, i.e.
/// component `k` is `X(Y_k) - Y(X_k)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    if x.vars() != y.vars() {
        return Err(Error::VariableMismatch {
            left: x.vars().to_vec(),
            right: y.vars().to_vec(),
        });
    }
    let components = x
        .components()
        .iter()
        .zip(y.components())
        .map(|(xk, yk)| {
            let forward = directional_derivative(x, yk);
            let backward = directional_derivative(y, xk);
            simplify(&(forward - backward))
        })
        .collect();
    VectorField::new(components, x.vars().to_vec())
}

/// Canonical Nambu bracket `{f_1, …, f_n} = ∂(f_1, …, f_n)/∂(x_1, …, x_n)`.
pub fn nambu_bracket(fs: &[Expr], vars: &[String]) -> Result<Expr> {
    if fs.len() != vars.len() {
        return Err(Error::ArityMismatch {
            expected: vars.len(),
            got: fs.len(),
        });
    }
    det_symbolic(&jacobian_matrix(fs, vars))
}

/// `{f, g} = ν · {C_1, …, C_{n-2}, f, g}`.
pub fn poisson_bracket(sys: &IntegrableSystem, f: &Expr, g: &Expr) -> Result<Expr> {
    let mut fs = sys.casimirs().to_vec();
    fs.push(f.clone());
    fs.push(g.clone());
    let nambu = nambu_bracket(&fs, sys.vars())?;
    Ok(simplify(&(sys.nu() * &nambu)))
}

/// Component `i` is `{x_i, H}`; reconstructs `X` when the realization holds.
pub fn hamiltonian_vector_field(sys: &IntegrableSystem) -> Result<VectorField> {
    let components = sys
        .vars()
        .iter()
        .map(|v| poisson_bracket(sys, &Expr::var(v), sys.hamiltonian()))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(components, sys.vars().to_vec())
}
