//! The linearizing chart `Φ = (1/ν, C_1/ν, …, C_{n-2}/ν, H/ν)`, the
//! nondegeneracy condition that makes it valid, admissible-point sampling and
//! the pointwise linearization identity.

mod chart;
mod check;
mod oset;
mod sampling;

pub use chart::{
    build_chart, chart_apply, chart_invert, chart_invert_with, target_variables, InvertOptions, LinearizingChart,
};
pub use check::{linearization_check, new_time_factor};
pub use oset::{oset_value, OsetCondition, OsetValue};
pub use sampling::{
    sample_admissible, sample_admissible_with, sample_uniform, SamplePlan, SampleSet, SampleStats, DRAWS_PER_POINT,
};
