//! Scattering phases of the alternating chain on their continuous odd branches.

use serde::{Deserialize, Serialize};

/// Bare phase `phi(t) = 2 atan(tanh t / tan(eta/2))`, odd, `phi(+-inf) = +-(pi - eta)`.
pub fn phi(t: f64, eta: f64) -> f64 {
    2.0 * (t.tanh() / (eta / 2.0).tan()).atan()
}

/// `phi'(t) = sin eta / (sh^2 t + sin^2(eta/2))`.
pub fn phi_prime(t: f64, eta: f64) -> f64 {
    eta.sin() / (t.sinh().powi(2) + (eta / 2.0).sin().powi(2))
}

/// Two-root phase `Theta(t) = 2 atan(tanh t / tan eta)`, odd, asymptotes `+-(pi - 2 eta)`.
pub fn theta_kernel(t: f64, eta: f64) -> f64 {
    2.0 * (t.tanh() / eta.tan()).atan()
}

/// `Theta'(t) = sin(2 eta) / (sh^2 t + sin^2 eta)`.
pub fn theta_kernel_prime(t: f64, eta: f64) -> f64 {
    (2.0 * eta).sin() / (t.sinh().powi(2) + eta.sin().powi(2))
}

/// The four kernel functions bound to one anisotropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelFunctions {
    pub eta: f64,
}

impl KernelFunctions {
    pub fn new(eta: f64) -> Self {
        Self { eta }
    }

    pub fn phi(&self, t: f64) -> f64 {
        phi(t, self.eta)
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        phi_prime(t, self.eta)
    }

    pub fn theta(&self, t: f64) -> f64 {
        theta_kernel(t, self.eta)
    }

    pub fn theta_prime(&self, t: f64) -> f64 {
        theta_kernel_prime(t, self.eta)
    }

    /// Two-sublattice driving phase `phi(t) + phi(t - shift)`.
    pub fn driving(&self, t: f64, shift: f64) -> f64 {
        self.phi(t) + self.phi(t - shift)
    }

    pub fn driving_prime(&self, t: f64, shift: f64) -> f64 {
        self.phi_prime(t) + self.phi_prime(t - shift)
    }
}
