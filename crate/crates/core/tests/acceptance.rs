//! End-to-end acceptance checks. Each criterion prints one line; the process
//! exits nonzero if any of them fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command as Process, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bundled, corpus, mu_in_chart_coordinates, random_matrix, system_path, vars};
use integrasym::cli::{run_pipeline, Command};
use integrasym::linearize::{build_chart, linearization_check, sample_admissible, SamplePlan};
use integrasym::symexpr::{parse_expr, Point};
use integrasym::symgen::{
    kernel_linear, orbit_drift, orbit_permutation_check, random_quadratic_field, symmetry_certificate, FlowSpec,
    Integrator, Perturbed, SymbolicField,
};
use integrasym::vcalc::{hamiltonian_vector_field, poisson_bracket, DomainBox, IntegrableSystem, VectorField};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn points(sys: &IntegrableSystem, count: usize) -> Vec<Point> {
    sample_admissible(sys, &SamplePlan::for_system(sys, count))
        .expect("admissible sample")
        .points
}

/// Closed forms for the two planar systems: `X`, `∂X`, `Φ`, `DΦ`, `div X`.
struct Planar {
    k: f64,
}

impl Planar {
    // scaling2d is k = 0 (X = (x1, x2), ν = x1^2); quadratic2d is k = 1
    // (X = x1·(x1, x2), ν = x1^3). Both have H = x2/x1.
    fn field(&self, x: &[f64]) -> [f64; 2] {
        let m = x[0].powf(self.k);
        [m * x[0], m * x[1]]
    }

    fn div(&self, x: &[f64]) -> f64 {
        (self.k + 2.0) * x[0].powf(self.k)
    }

    fn phi(&self, x: &[f64]) -> [f64; 2] {
        let p = self.k + 2.0;
        [x[0].powf(-p), x[1] * x[0].powf(-p - 1.0)]
    }

    fn dphi(&self, x: &[f64]) -> [[f64; 2]; 2] {
        let p = self.k + 2.0;
        [
            [-p * x[0].powf(-p - 1.0), 0.0],
            [-(p + 1.0) * x[1] * x[0].powf(-p - 2.0), x[0].powf(-p - 1.0)],
        ]
    }
}

fn criterion_1() -> Outcome {
    let mut lines = Vec::new();
    for (name, k) in [("scaling2d", 0.0), ("quadratic2d", 1.0)] {
        let start = Instant::now();
        let sys = bundled(name).system;
        let oracle = Planar { k };
        let xh = hamiltonian_vector_field(&sys).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for p in points(&sys, 1000) {
            let got = xh.eval_at(p.coords()).map_err(|e| e.to_string())?;
            let want = oracle.field(p.coords());
            for i in 0..2 {
                worst = worst.max((got[i] - want[i]).abs() / (1.0 + want[i].abs()));
            }
        }
        let elapsed = start.elapsed();
        ensure(worst <= 1e-9, || format!("{name}: residual {worst:e}"))?;
        ensure(elapsed < Duration::from_secs(5), || format!("{name}: took {elapsed:?}"))?;
        lines.push(format!("{name} max {worst:.1e} in {:.2}s", elapsed.as_secs_f64()));
    }
    Ok(lines.join(", "))
}

fn criterion_2() -> Outcome {
    let v = vars(3);
    let p = |s: &str| parse_expr(s, &v).unwrap();
    let casimir = p("x1^2 + x2*x3");
    let h = p("x1*x2 + x3^2/2");
    let nu = p("1 + x1^2");
    let domain = DomainBox::cube(3, -1.0, 1.0).unwrap();
    let draft = IntegrableSystem::new(
        VectorField::zero(v.clone()),
        vec![casimir.clone()],
        h.clone(),
        nu.clone(),
        domain.clone(),
    )
    .map_err(|e| e.to_string())?;
    let field = hamiltonian_vector_field(&draft).map_err(|e| e.to_string())?;
    let sys = IntegrableSystem::new(field, vec![casimir.clone()], h, nu, domain).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    // the same Casimir written differently, so the determinant has to cancel
    // numerically instead of through a repeated row
    let rewritten = p("x3*x2 + x1*x1");
    let mut worst: f64 = 0.0;
    for g in corpus(17, 10, &v) {
        for bracket in [
            poisson_bracket(&sys, &casimir, &g).map_err(|e| e.to_string())?,
            poisson_bracket(&sys, &g, &casimir).map_err(|e| e.to_string())?,
            poisson_bracket(&sys, &rewritten, &g).map_err(|e| e.to_string())?,
        ] {
            for x in &pts {
                worst = worst.max(bracket.eval_at(&v, x).map_err(|e| e.to_string())?.abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max |{{C, g}}| = {worst:e}"))?;
    Ok(format!("max |{{C, g}}| = {worst:e} over 10 functions x 1000 points"))
}

fn criterion_3() -> Outcome {
    let mut lines = Vec::new();
    for (name, k) in [("scaling2d", 0.0), ("quadratic2d", 1.0)] {
        let sys = bundled(name).system;
        let chart = build_chart(&sys).map_err(|e| e.to_string())?;
        let pts = points(&sys, 1000);
        let library = linearization_check(&sys, &chart, &pts).map_err(|e| e.to_string())?;
        let o = Planar { k };
        let mut oracle: f64 = 0.0;
        for p in &pts {
            let x = p.coords();
            let (f, d, phi, j) = (o.field(x), o.div(x), o.phi(x), o.dphi(x));
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for i in 0..2 {
                let t = j[i][0] * f[0] + j[i][1] * f[1];
                num = num.max((t + d * phi[i]).abs());
                den = den.max((d * phi[i]).abs());
            }
            oracle = oracle.max(num / (1.0 + den));
        }
        ensure(library.within(1e-8) && oracle <= 1e-8, || {
            format!("{name}: library {:e}, closed form {oracle:e}", library.max)
        })?;
        lines.push(format!("{name} {:.1e}/{oracle:.1e}", library.max));
    }
    Ok(format!("library/closed-form residuals: {}", lines.join(", ")))
}

fn criterion_4() -> Outcome {
    let sys = bundled("quadratic2d").system;
    let chart = build_chart(&sys).map_err(|e| e.to_string())?;
    let k = kernel_linear(&[vec![1.0, 0.0], vec![0.0, 0.0]], 2).map_err(|e| e.to_string())?;
    let plan = SamplePlan::for_system(&sys, 1000);
    let cert = symmetry_certificate(&sys, &chart, &k, &plan).map_err(|e| e.to_string())?;
    let mut y_err: f64 = 0.0;
    let mut mu_err: f64 = 0.0;
    for p in points(&sys, 1000) {
        let x = p.coords();
        let y = cert.y_at(x).map_err(|e| e.to_string())?;
        y_err = y_err
            .max((y[0] + x[0] / 3.0).abs())
            .max((y[1] + 4.0 * x[1] / 3.0).abs());
        mu_err = mu_err.max((cert.mu_at(x).map_err(|e| e.to_string())? - 1.0 / 3.0).abs());
    }
    mu_err = mu_err
        .max((cert.report.mu_min - 1.0 / 3.0).abs())
        .max((cert.report.mu_max - 1.0 / 3.0).abs());
    ensure(y_err <= 1e-10 && mu_err <= 1e-10, || {
        format!("Y error {y_err:e}, mu error {mu_err:e}")
    })?;
    Ok(format!("Y error {y_err:.1e}, mu error {mu_err:.1e} at 1000 points"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for name in ["scaling2d", "quadratic2d", "rigidbody3d_rescaled"] {
        let sys = bundled(name).system;
        let n = sys.dim();
        let chart = build_chart(&sys).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for trial in 0..20 {
            let a = random_matrix(&mut rng, n);
            let k = kernel_linear(&a, n).map_err(|e| e.to_string())?;
            let plan = SamplePlan::for_system(&sys, 500).with_seed(1000 + trial);
            let cert = symmetry_certificate(&sys, &chart, &k, &plan).map_err(|e| e.to_string())?;
            ensure(cert.valid && cert.report.residual.count == 500, || {
                format!("{name} trial {trial}: residual {:e}", cert.report.residual.max)
            })?;
            worst = worst.max(cert.report.residual.max);
        }
        lines.push(format!("{name} {worst:.1e}"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "60 certificates, worst {} in {:.2}s",
        lines.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn criterion_6() -> Outcome {
    let sys = bundled("quadratic2d").system;
    let chart = build_chart(&sys).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut matrices = vec![vec![vec![1.0, 0.0], vec![0.0, 0.0]]];
    matrices.extend((0..4).map(|_| random_matrix(&mut rng, 2)));
    for a in &matrices {
        let k = kernel_linear(a, 2).map_err(|e| e.to_string())?;
        let cert =
            symmetry_certificate(&sys, &chart, &k, &SamplePlan::for_system(&sys, 20)).map_err(|e| e.to_string())?;
        for p in points(&sys, 100).iter().take(100 / matrices.len()) {
            let mu_x = cert.mu_at(p.coords()).map_err(|e| e.to_string())?;
            let mu_u = mu_in_chart_coordinates(&sys, &chart, &k.field, p);
            worst = worst.max((mu_x - mu_u).abs() / (1.0 + mu_x.abs()));
        }
    }
    ensure(worst <= 1e-6, || format!("relative gap {worst:e}"))?;
    Ok(format!(
        "relative gap {worst:.1e} at 100 points, {} kernel matrices",
        matrices.len()
    ))
}

fn criterion_7() -> Outcome {
    let v = vars(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for e in corpus(71, 200, &v) {
        for _ in 0..5 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            for (j, name) in v.iter().enumerate() {
                let exact = e.diff(name).eval_at(&v, &x).map_err(|err| format!("{e}: {err}"))?;
                let hstep = 1e-5 * (1.0 + x[j].abs());
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += hstep;
                xm[j] -= hstep;
                let fd = (e.eval_at(&v, &xp).unwrap() - e.eval_at(&v, &xm).unwrap()) / (2.0 * hstep);
                let rel = (exact - fd).abs() / (1.0 + exact.abs());
                ensure(rel <= 1e-6, || format!("d/d{name} of {e} at {x:?}: {exact} vs {fd}"))?;
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} partial derivatives, worst relative gap {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let sys = bundled("quadratic2d").system;
    let chart = build_chart(&sys).map_err(|e| e.to_string())?;
    let k = kernel_linear(&[vec![1.0, 0.0], vec![0.0, 0.0]], 2).map_err(|e| e.to_string())?;
    let cert = symmetry_certificate(&sys, &chart, &k, &SamplePlan::for_system(&sys, 100)).map_err(|e| e.to_string())?;
    let spec = FlowSpec {
        integrator: Integrator::Rk45,
        tol: 1e-10,
        horizon: 1.0,
        epsilon: 0.1,
        ..FlowSpec::default()
    };
    let good = orbit_permutation_check(&sys, &cert, &spec).map_err(|e| e.to_string())?;
    ensure(good.drift <= 1e-6, || format!("symmetry drift {:e}", good.drift))?;

    let noise = random_quadratic_field(sys.vars(), 8);
    let corrupted = Perturbed {
        base: &cert.field,
        perturbation: &noise,
        scale: 1.0,
    };
    let x_field = SymbolicField::new(sys.field().clone());
    let bad = orbit_drift(&sys, &x_field, &corrupted, &cert.anchor, &spec).map_err(|e| e.to_string())?;
    ensure(bad.drift > 1e-3, || format!("corrupted drift only {:e}", bad.drift))?;

    // closed-form H = x2/x1 on the mapped points, independent of the report
    let mut h_gap: f64 = 0.0;
    let mut x = cert.anchor.clone();
    let h0 = {
        let m = integrasym::symgen::flow(&cert.field, &x, spec.epsilon, &spec, None).map_err(|e| e.to_string())?;
        m[1] / m[0]
    };
    for _ in 0..20 {
        x = integrasym::symgen::flow(&x_field, &x, spec.horizon / 20.0, &spec, None).map_err(|e| e.to_string())?;
        let m = integrasym::symgen::flow(&cert.field, &x, spec.epsilon, &spec, None).map_err(|e| e.to_string())?;
        h_gap = h_gap.max((m[1] / m[0] - h0).abs() / (1.0 + h0.abs()));
    }
    ensure(h_gap <= 1e-6, || format!("closed-form H drift {h_gap:e}"))?;
    Ok(format!(
        "symmetry drift {:.1e} (closed form {h_gap:.1e}), corrupted {:.1e}",
        good.drift, bad.drift
    ))
}

fn run_binary(args: &[&str]) -> (Option<i32>, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_integrasym"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = dir.path().join("rigid.json");
    let input = system_path("rigidbody3d");
    let (code, stderr) = run_binary(&[
        "check",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    ensure(code == Some(2), || format!("exit code {code:?}; stderr: {stderr}"))?;
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let verdict = &json["verdicts"]["admissibility"];
    let cause = json["stages"]["admissibility"]["details"]["cause"]
        .as_str()
        .unwrap_or_default();
    ensure(verdict == "DEGENERATE" && cause.contains("div X ≡ 0"), || {
        format!("verdict {verdict}, cause {cause:?}")
    })?;
    Ok(format!("exit 2, admissibility {verdict}, cause {cause:?}"))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut texts = Vec::new();
    for name in ["scaling2d", "quadratic2d", "rigidbody3d_rescaled"] {
        let input = system_path(name);
        for run in 0..2 {
            let out = dir.path().join(format!("{name}-{run}.json"));
            let (code, stderr) = run_binary(&[
                "all",
                "--input",
                input.to_str().unwrap(),
                "--output",
                out.to_str().unwrap(),
                "--seed",
                "424242",
            ]);
            ensure(code == Some(0), || format!("{name}: exit {code:?}: {stderr}"))?;
            texts.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        let a = run_pipeline(&bundled(name), Command::All)
            .to_json()
            .map_err(|e| e.to_string())?;
        let b = run_pipeline(&bundled(name), Command::All)
            .to_json()
            .map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name}: in-process reports differ"))?;
    }
    for pair in texts.chunks(2) {
        ensure(pair[0] == pair[1], || "binary reports differ".to_string())?;
    }
    ensure(texts[0] != texts[2], || {
        "distinct systems gave identical reports".into()
    })?;
    Ok(format!("{} report pairs byte-identical", texts.len() / 2 + 3))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("realization", criterion_1),
        ("casimir annihilation", criterion_2),
        ("linearization identity", criterion_3),
        ("exact mu reproduction", criterion_4),
        ("symmetry certification", criterion_5),
        ("mu cross-consistency", criterion_6),
        ("derivative oracle", criterion_7),
        ("trajectory permutation", criterion_8),
        ("degenerate path", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
