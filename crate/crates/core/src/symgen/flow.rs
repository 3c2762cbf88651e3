use serde::{Deserialize, Serialize};

use super::field::PointField;
use crate::error::{Error, Result};
use crate::vcalc::DomainBox;

const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSpec {
    pub integrator: Integrator,
    /// Fixed step for `rk4`; initial step guess for `rk45`.
    pub step: f64,
    /// Local error tolerance for `rk45`.
    pub tol: f64,
    pub horizon: f64,
    pub epsilon: f64,
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec {
            integrator: Integrator::Rk45,
            step: 1e-2,
            tol: 1e-10,
            horizon: 1.0,
            epsilon: 0.1,
        }
    }
}

impl FlowSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("step", self.step),
            ("tol", self.tol),
            ("horizon", self.horizon),
            ("epsilon", self.epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidPlan(format!("flow {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

fn eval_checked(field: &dyn PointField, x: &[f64], t: f64, bounds: Option<&DomainBox>) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) || bounds.is_some_and(|b| !b.contains(x)) {
        return Err(Error::DomainExit { t });
    }
    match field.eval(x) {
        Ok(v) if v.iter().all(|c| c.is_finite()) => Ok(v),
        Ok(_) | Err(Error::Eval(_)) => Err(Error::DomainExit { t }),
        Err(e) => Err(e),
    }
}

fn axpy(x: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = x.to_vec();
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += h * c * ki;
        }
    }
    out
}

/// Time-`t` flow of `field` from `x0`; `t` may be negative.
pub fn flow(
    field: &dyn PointField,
    x0: &[f64],
    t: f64,
    spec: &FlowSpec,
    bounds: Option<&DomainBox>,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if t == 0.0 {
        return Ok(x0.to_vec());
    }
    match spec.integrator {
        Integrator::Rk4 => rk4(field, x0, t, spec.step, bounds),
        Integrator::Rk45 => rk45(field, x0, t, spec, bounds),
    }
}

fn rk4(field: &dyn PointField, x0: &[f64], t: f64, step: f64, bounds: Option<&DomainBox>) -> Result<Vec<f64>> {
    let steps = (t.abs() / step).ceil().max(1.0) as usize;
    if steps > MAX_STEPS {
        return Err(Error::StepFailure { t: 0.0 });
    }
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    for s in 0..steps {
        let ts = s as f64 * h;
        let k1 = eval_checked(field, &x, ts, bounds)?;
        let k2 = eval_checked(field, &axpy(&x, h, &[(0.5, &k1)]), ts, bounds)?;
        let k3 = eval_checked(field, &axpy(&x, h, &[(0.5, &k2)]), ts, bounds)?;
        let k4 = eval_checked(field, &axpy(&x, h, &[(1.0, &k3)]), ts, bounds)?;
        x = axpy(
            &x,
            h,
            &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
        );
    }
    if x.iter().any(|v| !v.is_finite()) || bounds.is_some_and(|b| !b.contains(&x)) {
        return Err(Error::DomainExit { t });
    }
    Ok(x)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk45(field: &dyn PointField, x0: &[f64], t: f64, spec: &FlowSpec, bounds: Option<&DomainBox>) -> Result<Vec<f64>> {
    let dir = t.signum();
    let total = t.abs();
    let mut x = x0.to_vec();
    let mut elapsed = 0.0;
    let mut h = spec.step.min(total);
    let mut k1 = eval_checked(field, &x, 0.0, bounds)?;
    for _ in 0..MAX_STEPS {
        let floor = 1e-14 * total.max(1.0);
        let remaining = total - elapsed;
        // rounding in the accumulated time can leave a sliver below the floor
        if remaining <= floor {
            return Ok(x);
        }
        h = h.min(remaining);
        if h < floor {
            return Err(Error::StepFailure { t: dir * elapsed });
        }
        let hs = dir * h;
        let ts = dir * elapsed;
        let mut k: Vec<Vec<f64>> = vec![k1.clone()];
        let mut stage_failed = false;
        for s in 1..7 {
            let terms: Vec<(f64, &[f64])> = (0..s).map(|j| (A[s][j], k[j].as_slice())).collect();
            let xs = axpy(&x, hs, &terms);
            match eval_checked(field, &xs, ts + C[s] * hs, None) {
                Ok(v) => k.push(v),
                Err(Error::DomainExit { .. }) => {
                    stage_failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if stage_failed {
            // a trial stage left the domain of the expressions; retry smaller
            h *= 0.25;
            continue;
        }
        let high = axpy(&x, hs, &(0..7).map(|j| (B5[j], k[j].as_slice())).collect::<Vec<_>>());
        let low = axpy(&x, hs, &(0..7).map(|j| (B4[j], k[j].as_slice())).collect::<Vec<_>>());
        let mut err_sq = 0.0;
        for i in 0..x.len() {
            let sc = spec.tol + spec.tol * x[i].abs().max(high[i].abs());
            err_sq += ((high[i] - low[i]) / sc).powi(2);
        }
        let err = (err_sq / x.len() as f64).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            elapsed += h;
            if bounds.is_some_and(|b| !b.contains(&high)) {
                return Err(Error::DomainExit { t: dir * elapsed });
            }
            x = high;
            // first-same-as-last: the seventh stage is the field at the new point
            k1 = k.pop().expect("seven stages");
            if elapsed >= total {
                return Ok(x);
            }
        }
        h *= factor;
    }
    Err(Error::StepFailure { t: dir * elapsed })
}
