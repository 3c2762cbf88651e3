//! Seeded rejection sampling of admissible points: `ν ≠ 0`, the degeneracy
//! product nonzero and the chart nonsingular.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::chart::{build_chart, LinearizingChart};
use super::oset::OsetCondition;
use crate::error::{Error, Result};
use crate::symexpr::{Point, MACHINE_ZERO};
use crate::vcalc::{DomainBox, IntegrableSystem};

/// Draw budget per requested point.
pub const DRAWS_PER_POINT: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    pub domain: DomainBox,
    pub delta_nu: f64,
    pub delta_oset: f64,
    pub delta_det: f64,
}

impl SamplePlan {
    pub fn for_system(sys: &IntegrableSystem, count: usize) -> SamplePlan {
        let tol = sys.tolerances();
        SamplePlan {
            count,
            seed: sys.seed(),
            domain: sys.domain().clone(),
            delta_nu: tol.nu,
            delta_oset: tol.oset,
            delta_det: tol.det,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> SamplePlan {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidPlan("sample count must be at least 1".into()));
        }
        for (name, v) in [
            ("delta_nu", self.delta_nu),
            ("delta_oset", self.delta_oset),
            ("delta_det", self.delta_det),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidPlan(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SampleStats {
    pub requested: usize,
    pub draws: usize,
    pub accepted: usize,
    pub rejected_nu: usize,
    pub rejected_oset: usize,
    pub rejected_det: usize,
    pub rejected_eval: usize,
}

impl SampleStats {
    pub fn rejected(&self) -> usize {
        self.rejected_nu + self.rejected_oset + self.rejected_det + self.rejected_eval
    }

    pub fn rejection_fraction(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            self.rejected() as f64 / self.draws as f64
        }
    }

    fn exhausted(&self) -> Error {
        Error::AdmissibilityExhausted {
            requested: self.requested,
            accepted: self.accepted,
            draws: self.draws,
            rejected_nu: self.rejected_nu,
            rejected_oset: self.rejected_oset,
            rejected_det: self.rejected_det,
            rejected_eval: self.rejected_eval,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub stats: SampleStats,
}

fn uniform(rng: &mut ChaCha8Rng, domain: &DomainBox) -> Vec<f64> {
    domain
        .bounds()
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
        .collect()
}

enum Verdict {
    Accept,
    RejectNu,
    RejectOset,
    RejectDet,
    RejectEval,
}

fn classify(
    sys: &IntegrableSystem,
    oset: &OsetCondition,
    chart: &LinearizingChart,
    plan: &SamplePlan,
    x: &[f64],
) -> Verdict {
    let nu = match sys.nu().eval_at(sys.vars(), x) {
        Ok(v) => v,
        Err(_) => return Verdict::RejectEval,
    };
    if !(nu.abs() > plan.delta_nu) {
        return Verdict::RejectNu;
    }
    match oset.evaluate(x) {
        Ok(v) if v.is_degenerate(plan.delta_oset) => return Verdict::RejectOset,
        Ok(_) => {}
        Err(_) => return Verdict::RejectEval,
    }
    match chart.jacobian_det_at(x) {
        Ok(d) if d.abs() > plan.delta_det => Verdict::Accept,
        Ok(_) => Verdict::RejectDet,
        Err(_) => Verdict::RejectEval,
    }
}

/// Exactly `plan.count` admissible points, or `AdmissibilityExhausted` once
/// `100 · count` draws fail to produce them.
pub fn sample_admissible(sys: &IntegrableSystem, plan: &SamplePlan) -> Result<SampleSet> {
    let chart = build_chart(sys)?;
    let oset = OsetCondition::new(sys)?;
    sample_admissible_with(sys, &oset, &chart, plan)
}

pub fn sample_admissible_with(
    sys: &IntegrableSystem,
    oset: &OsetCondition,
    chart: &LinearizingChart,
    plan: &SamplePlan,
) -> Result<SampleSet> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut stats = SampleStats {
        requested: plan.count,
        ..SampleStats::default()
    };
    let mut points = Vec::with_capacity(plan.count);
    let vars: std::sync::Arc<[String]> = sys.vars().to_vec().into();
    let budget = DRAWS_PER_POINT * plan.count;
    while points.len() < plan.count && stats.draws < budget {
        let x = uniform(&mut rng, &plan.domain);
        stats.draws += 1;
        match classify(sys, oset, chart, plan, &x) {
            Verdict::Accept => points.push(Point::new(vars.clone(), x)?),
            Verdict::RejectNu => stats.rejected_nu += 1,
            Verdict::RejectOset => stats.rejected_oset += 1,
            Verdict::RejectDet => stats.rejected_det += 1,
            Verdict::RejectEval => stats.rejected_eval += 1,
        }
    }
    stats.accepted = points.len();
    if points.len() < plan.count {
        return Err(stats.exhausted());
    }
    Ok(SampleSet { points, stats })
}

/// Uniform points filtered only by `|ν| > δ_ν`, for checks that do not need
/// the chart. May return fewer than `plan.count` points.
pub fn sample_uniform(sys: &IntegrableSystem, plan: &SamplePlan) -> Result<SampleSet> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut stats = SampleStats {
        requested: plan.count,
        ..SampleStats::default()
    };
    let mut points = Vec::with_capacity(plan.count);
    let vars: std::sync::Arc<[String]> = sys.vars().to_vec().into();
    while points.len() < plan.count && stats.draws < DRAWS_PER_POINT * plan.count {
        let x = uniform(&mut rng, &plan.domain);
        stats.draws += 1;
        match sys.nu().eval_at(sys.vars(), &x) {
            Ok(nu) if nu.abs() > plan.delta_nu.max(MACHINE_ZERO) => points.push(Point::new(vars.clone(), x)?),
            Ok(_) => stats.rejected_nu += 1,
            Err(_) => stats.rejected_eval += 1,
        }
    }
    stats.accepted = points.len();
    Ok(SampleSet { points, stats })
}
