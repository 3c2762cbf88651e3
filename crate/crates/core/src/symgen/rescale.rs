use crate::error::{Error, Result};
use crate::symexpr::{simplify, Expr};
use crate::vcalc::IntegrableSystem;

/// `X' = m X`, `ν' = m ν`. The integrals are unchanged, so `X'` stays
/// Hamilton-Poisson with the rescaled bracket, while `div X'` picks up
/// `⟨∇m, X⟩`.
pub fn apply_rescaling(sys: &IntegrableSystem, m: &Expr) -> Result<IntegrableSystem> {
    if let Some(bad) = m.free_vars().into_iter().find(|v| !sys.vars().contains(v)) {
        return Err(Error::InvalidSystem(format!("rescaling uses unknown variable {bad}")));
    }
    if m.is_zero() {
        return Err(Error::InvalidSystem("rescaling factor is identically zero".into()));
    }
    let field = sys.field().scaled(m)?;
    let nu = simplify(&(m.clone() * sys.nu().clone()));
    Ok(sys.replace_dynamics(field, nu))
}
