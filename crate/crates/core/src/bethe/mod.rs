//! Real-root Bethe Ansatz states of the alternating chain: logarithmic
//! equations, Newton solver, energy and momentum, hole excitations.

mod holes;
pub mod kernels;
mod solver;

pub use holes::{hole_rapidity, hole_scan, solve_hole_state, vacancies, HoleSample};
pub use kernels::KernelFunctions;
pub use solver::{
    counting_function, counting_residual, energy_momentum, jacobian, lattice_energy,
    product_form_residual, reference_energy, root_density, solve, solve_ground_state,
    vacancy_bound, SolverOptions,
};

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// A set of real rapidities with their quantum numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub params: ModelParams,
    /// Ascending.
    pub roots: Vec<f64>,
    /// One per root, in the same order; integers for odd `M`, half-odd integers for even `M`.
    pub quantum_numbers: Vec<f64>,
    /// Vacated quantum numbers inside the allowed window.
    pub holes: Vec<f64>,
    /// Max absolute defect of the logarithmic equations.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Defect norm after each Newton step.
    pub defect_history: Vec<f64>,
}

impl BetheState {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn min_gap(&self) -> f64 {
        self.roots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}
