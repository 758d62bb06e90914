use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use super::kernels::KernelFunctions;
use super::BetheState;
use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Roots closer than this abort the solve.
    pub collision_gap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 200,
            max_halvings: 8,
            collision_gap: 1e-10,
        }
    }
}

/// Defects `(L/2)[phi(t_a) + phi(t_a - theta)] - 2 pi J_a - sum_{g != a} Theta(t_a - t_g)`.
pub fn counting_residual(params: &ModelParams, roots: &[f64], quantum_numbers: &[f64]) -> Vec<f64> {
    let k = KernelFunctions::new(params.eta);
    let half = params.sites as f64 / 2.0;
    roots
        .iter()
        .zip(quantum_numbers)
        .map(|(&ta, &j)| {
            let scatter: f64 = roots.iter().map(|&tg| k.theta(ta - tg)).sum();
            half * k.driving(ta, params.theta) - 2.0 * PI * j - scatter
        })
        .collect()
}

/// Analytic Jacobian of [`counting_residual`].
pub fn jacobian(params: &ModelParams, roots: &[f64]) -> DMatrix<f64> {
    let k = KernelFunctions::new(params.eta);
    let half = params.sites as f64 / 2.0;
    let m = roots.len();
    let mut jac = DMatrix::zeros(m, m);
    for a in 0..m {
        let mut diag = half * k.driving_prime(roots[a], params.theta);
        for b in 0..m {
            if a != b {
                let tp = k.theta_prime(roots[a] - roots[b]);
                diag -= tp;
                jac[(a, b)] = tp;
            }
        }
        jac[(a, a)] = diag;
    }
    jac
}

/// Counting function `z(t) = [(L/2)(phi(t) + phi(t - theta)) - sum_g Theta(t - t_g)] / 2 pi`;
/// roots satisfy `z(t_a) = J_a`.
pub fn counting_function(params: &ModelParams, roots: &[f64], t: f64) -> f64 {
    let k = KernelFunctions::new(params.eta);
    let scatter: f64 = roots.iter().map(|&tg| k.theta(t - tg)).sum();
    (params.sites as f64 / 2.0 * k.driving(t, params.theta) - scatter) / (2.0 * PI)
}

/// Largest allowed `|J|` plus one half-step: vacancies satisfy
/// `|J| < [L (pi - eta) - (M - 1)(pi - 2 eta)] / 2 pi`.
pub fn vacancy_bound(params: &ModelParams, m: usize) -> f64 {
    let l = params.sites as f64;
    (l * (PI - params.eta) - (m as f64 - 1.0) * (PI - 2.0 * params.eta)) / (2.0 * PI)
}

/// Relative defect of the product form
/// `[sh(t - i eta/2) sh(t - theta - i eta/2)]^{L/2} / [..+..]^{L/2} = prod sh(t_a - t_b - i eta) / sh(t_a - t_b + i eta)`
/// (the branch signs of the two phases cancel).
pub fn product_form_residual(params: &ModelParams, roots: &[f64]) -> f64 {
    let (eta, theta) = (params.eta, params.theta);
    let half = (params.sites / 2) as i32;
    let mut worst: f64 = 0.0;
    for &ta in roots {
        let z = |x: f64, s: f64| Complex64::new(x, s).sinh();
        let lhs = ((z(ta, -eta / 2.0) * z(ta - theta, -eta / 2.0))
            / (z(ta, eta / 2.0) * z(ta - theta, eta / 2.0)))
        .powi(half);
        let mut rhs = Complex64::new(1.0, 0.0);
        for &tb in roots {
            if tb != ta {
                rhs *= z(ta - tb, -eta) / z(ta - tb, eta);
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

fn check_quantum_numbers(params: &ModelParams, qn: &[f64]) -> Result<()> {
    let m = qn.len();
    let bound = vacancy_bound(params, m);
    for &j in qn {
        let twice = 2.0 * j + m as f64 - 1.0;
        if (twice - twice.round()).abs() > 1e-9 || (twice.round() as i64) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "J = {j} is not in Z + (M - 1)/2 for M = {m}"
            )));
        }
        if j.abs() >= bound - 1e-9 {
            return Err(Error::InvalidQuantumNumbers(format!(
                "|J| = {} outside the vacancy window |J| < {bound:.4}",
                j.abs()
            )));
        }
    }
    let mut sorted = qn.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] < 0.5) {
        return Err(Error::InvalidQuantumNumbers(
            "repeated quantum number".into(),
        ));
    }
    Ok(())
}

/// Rapidity at which the smooth ground-state counting function
/// `L int_{-inf}^t R` equals `target`.
fn density_quantile(params: &ModelParams, target: f64) -> f64 {
    let c = PI / params.eta;
    let n = |t: f64| {
        params.sites as f64 / 2.0 / PI
            * ((c * t).exp().atan() + (c * (t - params.theta)).exp().atan())
    };
    let (mut lo, mut hi) = (
        -60.0 * params.eta / PI,
        params.theta + 60.0 * params.eta / PI,
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if n(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Initial guess: quantiles of the continuum density, with the window
/// spanned by `quantum_numbers` and `holes` mapped onto `(0, L/2)`.
fn initial_guess(params: &ModelParams, qn: &[f64], holes: &[f64]) -> Vec<f64> {
    let jmax = qn.iter().chain(holes).fold(0.0f64, |a, &j| a.max(j.abs()));
    let width = 2.0 * jmax + 1.0;
    qn.iter()
        .map(|&j| density_quantile(params, (j + jmax + 0.5) / width * params.sites as f64 / 2.0))
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Solve the logarithmic equations for given quantum numbers (any order;
/// the returned state is sorted).
pub fn solve(
    params: &ModelParams,
    quantum_numbers: &[f64],
    holes: &[f64],
    opts: &SolverOptions,
) -> Result<BetheState> {
    params.validate()?;
    let mut qn = quantum_numbers.to_vec();
    qn.sort_by(f64::total_cmp);
    check_quantum_numbers(params, &qn)?;
    let m = qn.len();
    let mut roots = initial_guess(params, &qn, holes);
    let mut defect = counting_residual(params, &roots, &qn);
    let mut norm = max_abs(&defect);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > opts.tol && iterations < opts.max_iterations && m > 0 {
        iterations += 1;
        let jac = jacobian(params, &roots);
        let rhs = DVector::from_vec(defect.clone());
        let step = jac.lu().solve(&rhs).ok_or(Error::BetheNonConvergence {
            iterations,
            defect: norm,
        })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = roots
                .iter()
                .zip(step.iter())
                .map(|(t, s)| t - lambda * s)
                .collect();
            let d = counting_residual(params, &trial, &qn);
            let n = max_abs(&d);
            if n.is_finite() && n < norm {
                accepted = Some((trial, d, n));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, d, n)) => {
                roots = trial;
                defect = d;
                norm = n;
                history.push(n);
            }
            // No decrease: the defect sits at roundoff level.
            None => break,
        }
        let gap = roots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if gap < opts.collision_gap {
            return Err(Error::RootCollision { gap });
        }
    }
    // Defects are sums of O(L) terms; roundoff floor scales with L.
    let floor = opts.tol.max(4.0 * f64::EPSILON * params.sites as f64 * PI);
    let converged = norm <= floor;
    if !converged {
        return Err(Error::BetheNonConvergence {
            iterations,
            defect: norm,
        });
    }
    let mut holes = holes.to_vec();
    holes.sort_by(f64::total_cmp);
    Ok(BetheState {
        params: *params,
        roots,
        quantum_numbers: qn,
        holes,
        residual: norm,
        converged,
        iterations,
        defect_history: history,
    })
}

/// Symmetric quantum numbers `-(M-1)/2, ..., (M-1)/2` with `M = params.magnetization`.
pub fn solve_ground_state(params: &ModelParams) -> Result<BetheState> {
    let m = params.magnetization;
    let qn: Vec<f64> = (0..m).map(|k| k as f64 - (m as f64 - 1.0) / 2.0).collect();
    solve(params, &qn, &[], &SolverOptions::default())
}

/// `E = (sin eta / 2) sum (phi'(t) + phi'(t - theta))`,
/// `P = sum (phi(t) + phi(t - theta))` reduced to `[0, 2 pi)`.
pub fn energy_momentum(state: &BetheState) -> Result<(f64, f64)> {
    if !state.converged {
        return Err(Error::Unconverged);
    }
    let p = &state.params;
    let k = KernelFunctions::new(p.eta);
    let mut roots = state.roots.clone();
    roots.sort_by(f64::total_cmp);
    let e = p.eta.sin() / 2.0
        * roots
            .iter()
            .map(|&t| k.driving_prime(t, p.theta))
            .sum::<f64>();
    let mom = roots.iter().map(|&t| k.driving(t, p.theta)).sum::<f64>();
    Ok((e, mom.rem_euclid(2.0 * PI)))
}

/// Eigenvalue of the log-derivative Hamiltonian on the fully polarized
/// state (no roots): `(L/2)(cos eta - sin eta Im coth(theta + i eta))`.
/// A Bethe state with energy `E` has lattice energy `reference_energy - E`.
pub fn reference_energy(params: &ModelParams) -> f64 {
    let half = params.sites as f64 / 2.0;
    let coth = Complex64::new(params.theta, params.eta).tanh().inv();
    half * (params.eta.cos() - params.eta.sin() * coth.im)
}

/// Eigenvalue of the log-derivative Hamiltonian carried by `state`.
pub fn lattice_energy(state: &BetheState) -> Result<f64> {
    Ok(reference_energy(&state.params) - energy_momentum(state)?.0)
}

/// Smoothed density per site at interior roots: `2 / (L (t_{a+1} - t_{a-1}))`.
pub fn root_density(state: &BetheState) -> Vec<(f64, f64)> {
    let l = state.params.sites as f64;
    state
        .roots
        .windows(3)
        .map(|w| (w[1], 2.0 / (l * (w[2] - w[0]))))
        .collect()
}
