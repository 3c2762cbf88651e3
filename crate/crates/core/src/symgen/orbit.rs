use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::certify::SymmetryCertificate;
use super::field::{PointField, SymbolicField};
use super::flow::{flow, FlowSpec};
use crate::error::Result;
use crate::symexpr::{sum, Expr};
use crate::vcalc::{IntegrableSystem, VectorField};

/// Number of intervals the orbit of `X` is cut into.
pub const ORBIT_INTERVALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub x0: Vec<f64>,
    pub epsilon: f64,
    pub horizon: f64,
    pub samples: usize,
    /// Level-set drift of the mapped orbit, largest over the integrals.
    pub drift: f64,
    pub per_integral: Vec<f64>,
    /// Same measure on the unmapped orbit; integrator error only.
    pub base_drift: f64,
}

fn drift_of(integrals: &[Expr], vars: &[String], path: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(integrals.len());
    for f in integrals {
        let f0 = f.eval_at(vars, &path[0])?;
        let mut worst: f64 = 0.0;
        for p in &path[1..] {
            let d = (f.eval_at(vars, p)? - f0).abs() / (1.0 + f0.abs());
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
        out.push(worst);
    }
    Ok(out)
}

/// Samples the `X`-orbit through `x0` at `ORBIT_INTERVALS + 1` times in
/// `[0, horizon]`, pushes every sample by the time-`ε` flow of `y` and
/// measures how far the integrals wander along the image. A symmetry maps
/// orbits onto orbits, so the image stays on one level set.
pub fn orbit_drift(
    sys: &IntegrableSystem,
    x_field: &dyn PointField,
    y: &dyn PointField,
    x0: &[f64],
    spec: &FlowSpec,
) -> Result<OrbitReport> {
    spec.validate()?;
    let dt = spec.horizon / ORBIT_INTERVALS as f64;
    let mut orbit = vec![x0.to_vec()];
    for _ in 0..ORBIT_INTERVALS {
        let next = flow(x_field, orbit.last().expect("nonempty"), dt, spec, None)?;
        orbit.push(next);
    }
    let mapped = orbit
        .iter()
        .map(|m| flow(y, m, spec.epsilon, spec, None))
        .collect::<Result<Vec<_>>>()?;
    let integrals = sys.integrals();
    let per_integral = drift_of(&integrals, sys.vars(), &mapped)?;
    let base = drift_of(&integrals, sys.vars(), &orbit)?;
    Ok(OrbitReport {
        x0: x0.to_vec(),
        epsilon: spec.epsilon,
        horizon: spec.horizon,
        samples: orbit.len(),
        drift: per_integral.iter().copied().fold(0.0, f64::max),
        per_integral,
        base_drift: base.into_iter().fold(0.0, f64::max),
    })
}

/// [`orbit_drift`] for a certificate, started at its anchor point.
pub fn orbit_permutation_check(
    sys: &IntegrableSystem,
    cert: &SymmetryCertificate,
    spec: &FlowSpec,
) -> Result<OrbitReport> {
    let x_field = SymbolicField::new(sys.field().clone());
    orbit_drift(sys, &x_field, &cert.field, &cert.anchor, spec)
}

/// A field with seeded coefficients in `[-1, 1]` on every monomial of degree
/// one and two; generically not a symmetry of anything.
pub fn random_quadratic_field(vars: &[String], seed: u64) -> SymbolicField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = vars.len();
    let components = (0..n)
        .map(|_| {
            let mut terms = Vec::new();
            for i in 0..n {
                terms.push(Expr::constant(rng.gen_range(-1.0..1.0)) * Expr::var(&vars[i]));
                for j in i..n {
                    let c = Expr::constant(rng.gen_range(-1.0..1.0));
                    terms.push(c * Expr::var(&vars[i]) * Expr::var(&vars[j]));
                }
            }
            sum(terms)
        })
        .collect();
    SymbolicField::new(VectorField::new(components, vars.to_vec()).expect("variables match"))
}
