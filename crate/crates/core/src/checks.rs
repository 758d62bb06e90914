//! Invariant suites shared by the command line `check` and the acceptance
//! tests. Each returns the worst residual against a fixed tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bethe::{lattice_energy, solve, vacancies, SolverOptions};
use crate::error::Result;
use crate::exec::Execution;
use crate::params::ModelParams;
use crate::spectra::{diagonalize, eigenpairs, match_into, DiagMode};
use crate::vertex::{
    decoupled_shift, decoupled_twists, extract_first_order, hamiltonian_h0, hamiltonian_logderiv,
    is_matched_hop, reconcile, transfer_matrix_with, twisted_xxz, yang_baxter_residual, C64,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl SuiteResult {
    pub fn new(name: &str, residual: f64, tolerance: f64, cases: usize) -> Self {
        Self {
            name: name.to_string(),
            passed: residual.is_finite() && residual <= tolerance && cases > 0,
            residual,
            tolerance,
            cases,
        }
    }
}

pub const YBE_TOL: f64 = 1e-11;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const RECONCILE_TOL: f64 = 1e-9;
pub const DECOUPLED_SPECTRUM_TOL: f64 = 1e-10;
pub const DECOUPLED_LIMIT_TOL: f64 = 1e-4;
pub const FIRST_ORDER_TOL: f64 = 1e-6;
pub const BETHE_ED_TOL: f64 = 1e-8;

/// Yang-Baxter residual on `samples` random `(t1, t2, eta)` triples.
pub fn yang_baxter_suite(samples: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t1 = rng.random_range(-3.0..3.0);
        let t2 = rng.random_range(-3.0..3.0);
        let eta = rng.random_range(0.05..std::f64::consts::PI - 0.05);
        worst = worst.max(yang_baxter_residual(t1, t2, eta));
    }
    SuiteResult::new("yang_baxter", worst, YBE_TOL, samples)
}

/// `||[Z(t), Z(t')]||` in every sector, `pairs` random pairs per sector.
pub fn commutation_suite(
    eta: f64,
    theta: f64,
    sites: usize,
    pairs: usize,
    seed: u64,
    exec: Execution,
) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 0..=sites {
        let p = ModelParams::new(eta, theta, sites, m)?;
        for _ in 0..pairs {
            let t1 = rng.random_range(-1.0..1.0);
            let t2 = rng.random_range(-1.0..1.0);
            let a = transfer_matrix_with(t1, &p, exec)?;
            let b = transfer_matrix_with(t2, &p, exec)?;
            worst = worst.max(a.commutator_norm(&b));
            cases += 1;
        }
    }
    Ok(SuiteResult::new(
        "transfer_commutation",
        worst,
        COMMUTATOR_TOL,
        cases,
    ))
}

/// Affine fit between the local and log-derivative Hamiltonians on a grid.
pub fn reconciliation_suite(
    sites: &[usize],
    etas: &[f64],
    thetas: &[f64],
    exec: Execution,
) -> Result<SuiteResult> {
    let mut points = Vec::new();
    for &l in sites {
        for &eta in etas {
            for &theta in thetas {
                points.push(ModelParams::half_filled(eta, theta, l)?);
            }
        }
    }
    let fits = exec.map(&points, reconcile);
    let mut worst: f64 = 0.0;
    for f in fits {
        worst = worst.max(f?.residual);
    }
    Ok(SuiteResult::new(
        "hamiltonian_reconciliation",
        worst,
        RECONCILE_TOL,
        points.len(),
    ))
}

/// Spectrum of the decoupled Hamiltonian against the union of twisted XXZ
/// spectra of the two sublattice chains, in every sector.
pub fn decoupled_spectrum_suite(eta: f64, sites: usize) -> Result<SuiteResult> {
    let half = sites / 2;
    let mut worst: f64 = 0.0;
    for m in 0..=sites {
        let p = ModelParams::new(eta, 0.0, sites, m)?;
        let got = diagonalize(&hamiltonian_h0(&p)?, &p, DiagMode::Full)?.eigenvalues;
        let mut union = Vec::with_capacity(got.len());
        for n_even in 0..=m.min(half) {
            let n_odd = m - n_even;
            if n_odd > half {
                continue;
            }
            let (phi_even, phi_odd) = decoupled_twists(eta, sites, n_even, n_odd);
            let e1 = eigenpairs(&twisted_xxz(half, n_even, p.delta(), phi_even)?)?.0;
            let e2 = eigenpairs(&twisted_xxz(half, n_odd, p.delta(), phi_odd)?)?.0;
            for a in &e1 {
                for b in &e2 {
                    union.push(a + b);
                }
            }
        }
        union.sort_by(f64::total_cmp);
        if union.len() != got.len() {
            return Ok(SuiteResult::new(
                "decoupled_spectrum",
                f64::INFINITY,
                DECOUPLED_SPECTRUM_TOL,
                m + 1,
            ));
        }
        for (a, b) in union.iter().zip(&got) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(SuiteResult::new(
        "decoupled_spectrum",
        worst,
        DECOUPLED_SPECTRUM_TOL,
        sites + 1,
    ))
}

/// `||H(theta) - shift - H0|| / ||H0||` at half filling.
pub fn decoupled_limit_suite(eta: f64, theta: f64, sites: usize) -> Result<SuiteResult> {
    let p = ModelParams::half_filled(eta, theta, sites)?;
    let h = hamiltonian_logderiv(&p)?;
    let h0 = hamiltonian_h0(&p)?;
    let one = C64::new(1.0, 0.0);
    let shifted = h.combine(
        one,
        &h,
        C64::new(0.0, 0.0),
        C64::new(-decoupled_shift(&p), 0.0),
    );
    let rel = shifted.distance(&h0) / h0.frobenius_norm();
    Ok(SuiteResult::new(
        "decoupled_limit",
        rel,
        DECOUPLED_LIMIT_TOL,
        1,
    ))
}

/// Extracted first-order coefficient against `2 sin^2 eta` on matched hops.
pub fn first_order_suite(eta: f64, sites: usize) -> Result<SuiteResult> {
    let amp = 2.0 * eta.sin().powi(2);
    let p = ModelParams::half_filled(eta, 0.0, sites)?;
    let v = extract_first_order(&p, 10.0, 12.0)?;
    let b = v.basis().clone();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (r, c, x) in v.triplets(1e-7) {
        let diff = b.state(r) ^ b.state(c);
        if diff == 0 {
            continue;
        }
        let lo = diff.trailing_zeros() as usize;
        let hi = 63 - diff.leading_zeros() as usize;
        let a = if hi - lo == 1 { lo } else { hi };
        if is_matched_hop(b.state(c), a, sites) {
            worst = worst.max((x - C64::new(amp, 0.0)).norm() / amp);
            cases += 1;
        }
    }
    Ok(SuiteResult::new(
        "first_order_interaction",
        worst,
        FIRST_ORDER_TOL,
        cases,
    ))
}

fn combinations(pool: &[f64], k: usize) -> Vec<Vec<f64>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..pool.len() {
        if pool.len() - i < k {
            break;
        }
        for mut rest in combinations(&pool[i + 1..], k - 1) {
            rest.insert(0, pool[i]);
            out.push(rest);
        }
    }
    out
}

/// Every converged real-root state with all admissible quantum-number
/// choices must appear in the exact spectrum.
pub fn bethe_ed_suite(
    eta: f64,
    theta: f64,
    sites: usize,
    sectors: &[usize],
    exec: Execution,
) -> Result<SuiteResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &m in sectors {
        let p = ModelParams::new(eta, theta, sites, m)?;
        let spec = diagonalize(&hamiltonian_logderiv(&p)?, &p, DiagMode::Full)?;
        let choices = combinations(&vacancies(&p, m), m);
        let energies: Vec<f64> = exec
            .map(&choices, |qn| {
                solve(&p, qn, &[], &SolverOptions::default()).and_then(|s| lattice_energy(&s))
            })
            .into_iter()
            .filter_map(|e| e.ok())
            .collect();
        if energies.is_empty() {
            continue;
        }
        let rep = match_into(&energies, &spec.eigenvalues, BETHE_ED_TOL)?;
        worst = worst.max(rep.max_deviation);
        cases += energies.len();
    }
    Ok(SuiteResult::new(
        "bethe_vs_exact",
        worst,
        BETHE_ED_TOL,
        cases,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        let pool: Vec<f64> = (0..6).map(f64::from).collect();
        assert_eq!(combinations(&pool, 3).len(), 20);
        assert_eq!(combinations(&pool, 0).len(), 1);
        assert!(combinations(&pool, 7).is_empty());
    }
}
