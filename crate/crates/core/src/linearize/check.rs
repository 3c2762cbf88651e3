use nalgebra::DVector;

use super::chart::LinearizingChart;
use crate::error::Result;
use crate::symexpr::Point;
use crate::vcalc::{divergence, IntegrableSystem, ResidualReport};

/// Pointwise form of the linearization: along `X`, `du/dt = DΦ·X` must equal
/// `-div(X)·u`, which is `du/ds = u` for `ds = -div(X) dt`.
///
/// Residual: `‖DΦ X + div(X) Φ‖∞ / (1 + ‖div(X) Φ‖∞)`.
pub fn linearization_check(
    sys: &IntegrableSystem,
    chart: &LinearizingChart,
    points: &[Point],
) -> Result<ResidualReport> {
    let div = divergence(sys.field());
    let mut report = ResidualReport::default();
    for p in points {
        let residual = (|| -> Result<f64> {
            let x = p.coords();
            let jac = chart.jacobian_at(x)?;
            let field = DVector::from_vec(sys.field().eval_at(x)?);
            let phi = chart.apply_at(x)?;
            let d = div.eval_at(sys.vars(), x)?;
            let transported = jac * field;
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for (t, u) in transported.iter().zip(&phi) {
                num = num.max((t + d * u).abs());
                den = den.max((d * u).abs());
            }
            Ok(num / (1.0 + den))
        })();
        report.push_result(residual, p.coords());
    }
    Ok(report)
}

/// `ds/dt = -div(X)`.
pub fn new_time_factor(sys: &IntegrableSystem, x: &Point) -> Result<f64> {
    Ok(-divergence(sys.field()).eval(x)?)
}
