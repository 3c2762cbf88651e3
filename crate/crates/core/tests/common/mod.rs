#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use integrasym::cli::{load_system, SystemDocument};
use integrasym::linearize::{chart_invert, LinearizingChart};
use integrasym::symexpr::{Expr, Point};
use integrasym::vcalc::{divergence, IntegrableSystem, VectorField};

pub fn system_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("systems")
        .join(format!("{name}.json"))
}

pub fn bundled(name: &str) -> SystemDocument {
    load_system(&system_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Random expression that evaluates everywhere: logarithms and roots only see
/// arguments bounded away from zero and divisions only positive denominators.
pub fn random_expr(rng: &mut ChaCha8Rng, vars: &[String], depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::var(&vars[rng.gen_range(0..vars.len())])
        } else {
            Expr::constant((rng.gen_range(-30..=30) as f64) / 10.0)
        };
    }
    let a = random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..10) {
        0 | 1 => a + random_expr(rng, vars, depth - 1),
        2 => a - random_expr(rng, vars, depth - 1),
        3 | 4 => a * random_expr(rng, vars, depth - 1),
        5 => {
            let b = random_expr(rng, vars, depth - 1);
            a / (Expr::one() + Expr::powi(b, 2))
        }
        6 => Expr::sin(a),
        7 => Expr::cos(a),
        8 => Expr::ln(Expr::one() + Expr::powi(a, 2)),
        _ => match rng.gen_range(0..3) {
            0 => Expr::powi(a, rng.gen_range(2..=3)),
            1 => Expr::sqrt(Expr::constant(2.0) + Expr::sin(a)),
            _ => Expr::exp(Expr::sin(a)),
        },
    }
}

pub fn corpus(seed: u64, count: usize, vars: &[String]) -> Vec<Expr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_expr(&mut rng, vars, 4)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

/// `μ` computed entirely in chart coordinates: `h(u) = div X(Φ⁻¹(u))` and
/// `−Y~(h)/h` with the directional derivative taken by central differences.
/// `x` is the base point and the starting guess for every inversion.
pub fn mu_in_chart_coordinates(
    sys: &IntegrableSystem,
    chart: &LinearizingChart,
    kernel: &VectorField,
    x: &Point,
) -> f64 {
    let div = divergence(sys.field());
    let h = |u: &[f64]| -> f64 {
        let target = Point::new(chart.target_vars().to_vec(), u.to_vec()).unwrap();
        let xu = chart_invert(chart, &target, x).expect("chart inversion");
        div.eval(&xu).unwrap()
    };
    let u0 = chart.apply_at(x.coords()).unwrap();
    let ybar = kernel.eval_at(&u0).unwrap();
    let norm = ybar.iter().map(|v| v * v).sum::<f64>().sqrt();
    let umax = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // derivative along the unit direction, rescaled by ‖Y~‖
    let step = 1e-5 * (1.0 + umax);
    let dir: Vec<f64> = ybar.iter().map(|v| v / norm.max(f64::MIN_POSITIVE)).collect();
    let shifted = |s: f64| -> Vec<f64> { u0.iter().zip(&dir).map(|(u, d)| u + s * d).collect() };
    let derivative = if norm == 0.0 {
        0.0
    } else {
        norm * (h(&shifted(step)) - h(&shifted(-step))) / (2.0 * step)
    };
    -derivative / h(&u0)
}
