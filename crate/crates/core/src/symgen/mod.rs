//! Symmetries from the linearized picture: kernel elements of the Euler
//! field, their pullbacks through the chart, the factor `μ` and the checks
//! that certify `[X, Y] = μ X`.

mod certify;
mod field;
mod flow;
mod kernel;
mod mu;
mod orbit;
mod pullback;
mod rescale;

pub use certify::{symmetry_certificate, symmetry_check, SymmetryCertificate, SymmetryReport};
pub use field::{fd_jacobian, fd_step, Perturbed, PointField, ScalarField, SymbolicField};
pub use flow::{flow, FlowSpec, Integrator};
pub use kernel::{euler_field, kernel_linear, kernel_verify, KernelElement, KernelForm, KERNEL_POINTS, KERNEL_SEED};
pub use mu::{mu_factor, BoundMu, MuFactor};
pub use orbit::{orbit_drift, orbit_permutation_check, random_quadratic_field, OrbitReport, ORBIT_INTERVALS};
pub use pullback::{pullback_field, PulledBackField, SYMBOLIC_LIMIT};
pub use rescale::apply_rescaling;
