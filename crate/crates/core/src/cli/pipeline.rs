use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::document::{KernelInput, SystemDocument};
use super::report::{RunReport, StageReport, Verdict};
use crate::error::{Error, Result};
use crate::linearize::{
    build_chart, linearization_check, sample_admissible_with, sample_uniform, LinearizingChart, OsetCondition,
    SamplePlan, SampleStats,
};
use crate::symexpr::Point;
use crate::symgen::{
    kernel_linear, orbit_permutation_check, symmetry_certificate, KernelElement, PointField, SymmetryCertificate,
};
use crate::vcalc::{conservation_check, independence_check, realization_check, IntegrableSystem, ResidualReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Linearize,
    Symmetrize,
    DemoFlow,
    All,
}

impl Command {
    fn runs_checks(self) -> bool {
        matches!(self, Command::Check | Command::All)
    }

    fn runs_linearization(self) -> bool {
        matches!(self, Command::Linearize | Command::All)
    }

    fn runs_certificates(self) -> bool {
        matches!(self, Command::Symmetrize | Command::DemoFlow | Command::All)
    }

    fn runs_orbits(self) -> bool {
        matches!(self, Command::DemoFlow | Command::All)
    }
}

/// Command-line overrides of document settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl SystemDocument {
    pub fn apply_options(&mut self, options: &RunOptions) -> Result<()> {
        if let Some(seed) = options.seed {
            self.system = self.system.clone().with_seed(seed);
        }
        if let Some(samples) = options.samples {
            if samples == 0 {
                return Err(Error::InvalidPlan("sample count must be at least 1".into()));
            }
            self.samples = samples;
        }
        self.system.tolerances_mut().apply_overrides(&options.tolerances)
    }
}

fn error_stage(e: &Error) -> StageReport {
    let verdict = match e {
        Error::AdmissibilityExhausted { .. } | Error::DegeneratePoint { .. } => Verdict::Degenerate,
        _ => Verdict::Fail,
    };
    StageReport {
        numeric_failure: e.is_numeric(),
        ..StageReport::new(
            verdict,
            f64::INFINITY,
            f64::INFINITY,
            0,
            json!({ "error": e.to_string() }),
        )
    }
}

fn residual_stage(report: &ResidualReport, tolerance: f64, mut details: Value) -> StageReport {
    let verdict = if report.within(tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    details["tolerance"] = json!(tolerance);
    details["worst_point"] = json!(report.worst);
    details["failed_evaluations"] = json!(report.failures);
    StageReport::new(verdict, report.max, report.mean, report.count, details)
}

fn degeneracy_cause(sys: &IntegrableSystem, oset: &OsetCondition, stats: &SampleStats) -> (String, Option<String>) {
    if oset.divergence().is_zero() {
        return (
            "div X ≡ 0".into(),
            Some(
                "the degeneracy product vanishes identically; supply a \"rescaling\" m so that div(m X) \
                 is not identically zero"
                    .into(),
            ),
        );
    }
    if sys.nu().free_vars().is_empty() {
        return (
            "nu is constant, so d(1/nu) ≡ 0".into(),
            Some("choose a non-constant rescaling nu".into()),
        );
    }
    if oset.bracket().is_zero() {
        return ("the Jacobian of (1/nu, C, H) vanishes identically".into(), None);
    }
    let counts = [
        (stats.rejected_nu, "nu vanishes on the sampled domain"),
        (
            stats.rejected_oset,
            "the degeneracy product vanishes on the sampled domain",
        ),
        (
            stats.rejected_det,
            "the chart Jacobian is singular on the sampled domain",
        ),
        (
            stats.rejected_eval,
            "the expressions fail to evaluate on the sampled domain",
        ),
    ];
    let (_, cause) = counts.iter().max_by_key(|(c, _)| *c).expect("nonempty");
    ((*cause).into(), None)
}

fn stats_json(stats: &SampleStats) -> Value {
    json!({
        "requested": stats.requested,
        "draws": stats.draws,
        "accepted": stats.accepted,
        "rejected_nu": stats.rejected_nu,
        "rejected_oset": stats.rejected_oset,
        "rejected_det": stats.rejected_det,
        "rejected_eval": stats.rejected_eval,
        "rejection_fraction": stats.rejection_fraction(),
    })
}

fn build_kernel(input: &KernelInput, n: usize, tolerance: f64) -> Result<KernelElement> {
    match input {
        KernelInput::Matrix(rows) => {
            let k = kernel_linear(rows, n)?;
            if !(k.residual <= tolerance) {
                return Err(Error::KernelRejected {
                    residual: k.residual,
                    tolerance,
                });
            }
            Ok(k)
        }
        KernelInput::Field(f) => KernelElement::from_field(f.clone(), tolerance),
    }
}

fn certificate_stage(cert: &SymmetryCertificate) -> StageReport {
    let symbolic_y = cert
        .field
        .symbolic()
        .and_then(|r| r.ok())
        .map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>());
    let y_at_anchor = cert.y_at(&cert.anchor).ok();
    let mu_at_anchor = cert.mu_at(&cert.anchor).ok();
    let details = json!({
        "kernel": cert.kernel.form,
        "kernel_residual": cert.kernel.residual,
        "kernel_exact": cert.kernel.symbolic_zero,
        "valid": cert.valid,
        "tolerance": cert.tolerance,
        "seed": cert.seed,
        "mu": {
            "min": cert.report.mu_min,
            "max": cert.report.mu_max,
            "mean": cert.report.mu_mean,
        },
        "fd_agreement": cert.report.fd_agreement,
        "anchor": cert.anchor,
        "y_at_anchor": y_at_anchor,
        "mu_at_anchor": mu_at_anchor,
        "symbolic_y": symbolic_y,
        "worst_point": cert.report.residual.worst,
    });
    let verdict = if cert.valid { Verdict::Pass } else { Verdict::Fail };
    let r = &cert.report.residual;
    StageReport::new(verdict, r.max, r.mean, r.count, details)
}

struct Runner<'a> {
    doc: &'a SystemDocument,
    command: Command,
    report: RunReport,
}

impl Runner<'_> {
    /// Records a stage; returns false when `all` must stop here.
    fn push(&mut self, name: impl Into<String>, stage: StageReport) -> bool {
        let pass = stage.verdict == Verdict::Pass;
        self.report.push(name, stage);
        pass || self.command != Command::All
    }

    fn checks(&mut self, points: &[Point]) -> bool {
        let doc = self.doc;
        let sys = &doc.system;
        let tol = sys.tolerances().clone();

        let per = conservation_check(sys, points);
        let mut names: Vec<String> = (1..=sys.casimirs().len()).map(|i| format!("C{i}")).collect();
        names.push("H".into());
        let mut total = ResidualReport::default();
        let mut per_json = Vec::new();
        for ((name, expr), r) in names.iter().zip(sys.integrals()).zip(&per) {
            total.merge(r);
            per_json.push(json!({ "integral": name, "expression": expr.to_string(), "max": r.max, "mean": r.mean }));
        }
        let mut stage = residual_stage(&total, tol.conservation, json!({ "integrals": per_json }));
        stage.points = points.len();
        if !self.push("conservation", stage) {
            return false;
        }

        let mut dependent = 0usize;
        let mut min_ratio = f64::INFINITY;
        let mut residuals = ResidualReport::default();
        for p in points {
            match independence_check(sys, p) {
                Ok(ind) => {
                    min_ratio = min_ratio.min(ind.minor_ratio);
                    if !ind.independent {
                        dependent += 1;
                    }
                    residuals.push(if ind.independent { 0.0 } else { 1.0 }, p.coords());
                }
                Err(_) => residuals.push(f64::INFINITY, p.coords()),
            }
        }
        let mut stage = residual_stage(
            &residuals,
            0.0,
            json!({ "dependent_points": dependent, "min_minor_ratio": min_ratio, "rank_tolerance": tol.rank }),
        );
        stage.details.as_object_mut().expect("object").remove("tolerance");
        if !self.push("independence", stage) {
            return false;
        }

        let stage = match realization_check(sys, points) {
            Ok(r) => residual_stage(&r, tol.realization, json!({})),
            Err(e) => error_stage(&e),
        };
        self.push("realization", stage)
    }

    fn run(mut self) -> RunReport {
        let sys = self.doc.system.clone();
        let plan = SamplePlan::for_system(&sys, self.doc.samples);
        let prepared = build_chart(&sys).and_then(|c| Ok((c, OsetCondition::new(&sys)?)));
        let (chart, oset) = match prepared {
            Ok(v) => v,
            Err(e) => {
                self.report.push("admissibility", error_stage(&e));
                return self.report;
            }
        };

        let (points, admissibility, admissible) = self.sample(&sys, &chart, &oset, &plan);

        if self.command.runs_checks() && !self.checks(&points) {
            return self.report;
        }
        if !self.push("admissibility", admissibility) || !admissible {
            return self.report;
        }

        if self.command.runs_linearization() {
            let stage = match linearization_check(&sys, &chart, &points) {
                Ok(r) => residual_stage(&r, sys.tolerances().linearization, json!({})),
                Err(e) => error_stage(&e),
            };
            if !self.push("linearization", stage) {
                return self.report;
            }
        }

        if !self.command.runs_certificates() {
            return self.report;
        }
        let mut certificates = Vec::new();
        for (i, input) in self.doc.kernels.iter().enumerate() {
            let outcome = build_kernel(input, sys.dim(), sys.tolerances().kernel)
                .and_then(|k| symmetry_certificate(&sys, &chart, &k, &plan));
            let stage = match &outcome {
                Ok(cert) => certificate_stage(cert),
                Err(e) => error_stage(e),
            };
            if !self.push(format!("certificate_{i}"), stage) {
                return self.report;
            }
            if let Ok(cert) = outcome {
                certificates.push((i, cert));
            }
        }

        if !self.command.runs_orbits() {
            return self.report;
        }
        for (i, cert) in certificates.iter().filter(|(_, c)| c.valid) {
            let spec = &self.doc.flow;
            let stage = match orbit_permutation_check(&sys, cert, spec) {
                Ok(o) => {
                    let tolerance = sys.tolerances().orbit;
                    let verdict = if o.drift <= tolerance {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    };
                    let details = json!({
                        "tolerance": tolerance,
                        "x0": o.x0,
                        "epsilon": o.epsilon,
                        "horizon": o.horizon,
                        "integrator": spec.integrator,
                        "per_integral": o.per_integral,
                        "base_drift": o.base_drift,
                        "dimension": cert.field.dim(),
                    });
                    StageReport::new(verdict, o.drift, o.drift, o.samples, details)
                }
                Err(e) => error_stage(&e),
            };
            if !self.push(format!("orbit_{i}"), stage) {
                return self.report;
            }
        }
        self.report
    }

    /// Admissible points, or uniform ones filtered on `ν` when the admissible
    /// set is exhausted so that the hypothesis checks still have input.
    fn sample(
        &self,
        sys: &IntegrableSystem,
        chart: &LinearizingChart,
        oset: &OsetCondition,
        plan: &SamplePlan,
    ) -> (Vec<Point>, StageReport, bool) {
        match sample_admissible_with(sys, oset, chart, plan) {
            Ok(set) => {
                let mut details = stats_json(&set.stats);
                let fraction = set.stats.rejection_fraction();
                if fraction > 0.0 {
                    details["note"] = json!(
                        "some draws were rejected; the fraction is reported without deciding whether the \
                         degeneracy set has measure zero"
                    );
                }
                let stage = StageReport::new(Verdict::Pass, fraction, fraction, set.points.len(), details);
                (set.points, stage, true)
            }
            Err(Error::AdmissibilityExhausted {
                requested,
                accepted,
                draws,
                rejected_nu,
                rejected_oset,
                rejected_det,
                rejected_eval,
            }) => {
                let stats = SampleStats {
                    requested,
                    accepted,
                    draws,
                    rejected_nu,
                    rejected_oset,
                    rejected_det,
                    rejected_eval,
                };
                let (cause, note) = degeneracy_cause(sys, oset, &stats);
                let mut details = stats_json(&stats);
                details["cause"] = json!(cause);
                if let Some(note) = note {
                    details["note"] = json!(note);
                }
                let fraction = stats.rejection_fraction();
                let stage = StageReport::new(Verdict::Degenerate, fraction, fraction, accepted, details);
                let fallback = sample_uniform(sys, plan).map(|s| s.points).unwrap_or_default();
                (fallback, stage, false)
            }
            Err(e) => (Vec::new(), error_stage(&e), false),
        }
    }
}

pub fn run_pipeline(doc: &SystemDocument, command: Command) -> RunReport {
    Runner {
        doc,
        command,
        report: RunReport::new(doc.name.clone(), doc.system.seed()),
    }
    .run()
}
