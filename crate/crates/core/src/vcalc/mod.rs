//! Vector-field calculus: Jacobians, determinants, divergence, Lie brackets,
//! the rescaled Nambu-Poisson bracket and the Hamilton-Poisson realization.

mod brackets;
mod checks;
mod det;
mod field;
mod system;

pub use brackets::{
    directional_derivative, divergence, hamiltonian_vector_field, lie_bracket, nambu_bracket, poisson_bracket,
};
pub use checks::{conservation_check, independence_check, realization_check, Independence, ResidualReport};
pub use det::{det_numeric, det_symbolic, COFACTOR_LIMIT};
pub use field::{jacobian_matrix, ExprMatrix, VectorField};
pub use system::{DomainBox, IntegrableSystem, Tolerances};
