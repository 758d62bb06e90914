use serde::{Deserialize, Serialize};

use super::solver::{counting_function, energy_momentum, solve, vacancy_bound, SolverOptions};
use super::BetheState;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::ModelParams;

/// All admissible quantum numbers for `m` roots, ascending.
pub fn vacancies(params: &ModelParams, m: usize) -> Vec<f64> {
    let bound = vacancy_bound(params, m);
    let offset = if m % 2 == 0 { 0.5 } else { 0.0 };
    let mut out = Vec::new();
    let mut j = offset;
    while j < bound - 1e-9 {
        out.push(j);
        if j > 0.0 {
            out.push(-j);
        }
        j += 1.0;
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Rapidity `t` with `z(t) = j` for the counting function of `state`.
pub fn hole_rapidity(state: &BetheState, j: f64) -> f64 {
    let z = |t: f64| counting_function(&state.params, &state.roots, t) - j;
    let first = state.roots.first().copied().unwrap_or(0.0);
    let last = state.roots.last().copied().unwrap_or(state.params.theta);
    let (mut lo, mut hi) = (first - 1.0, last + 1.0);
    while z(lo) > 0.0 && lo > -1e3 {
        lo -= 2.0 * (hi - lo);
    }
    while z(hi) < 0.0 && hi < 1e3 {
        hi += 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if z(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Excitation with one root removed from the half-filled sector of
/// `params`: the vacancy `hole_position` is left empty, and the remaining
/// forced holes sit at the opposite edge of the window.
pub fn solve_hole_state(params: &ModelParams, hole_position: f64) -> Result<BetheState> {
    let m = params
        .magnetization
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidQuantumNumbers("no root to remove".into()))?;
    let reduced = params.with_magnetization(m)?;
    let vac = vacancies(&reduced, m);
    if !vac.iter().any(|&j| (j - hole_position).abs() < 1e-9) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "hole at {hole_position} is not a vacancy of the M = {m} window"
        )));
    }
    let extra = vac.len().checked_sub(m + 1).ok_or_else(|| {
        Error::InvalidQuantumNumbers(format!("M = {m} window has no room for a hole"))
    })?;
    let others: Vec<f64> = vac
        .iter()
        .copied()
        .filter(|&j| (j - hole_position).abs() > 1e-9)
        .collect();
    let partners: Vec<f64> = if hole_position <= 0.0 {
        others.iter().rev().take(extra).copied().collect()
    } else {
        others.iter().take(extra).copied().collect()
    };
    let mut holes = vec![hole_position];
    holes.extend(&partners);
    let qn: Vec<f64> = others
        .into_iter()
        .filter(|j| !partners.iter().any(|p| (p - j).abs() < 1e-9))
        .collect();
    solve(&reduced, &qn, &holes, &SolverOptions::default())
}

/// One hole excitation: rapidity, energy and momentum relative to the state
/// whose holes sit at both window edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleSample {
    pub quantum_number: f64,
    pub rapidity: f64,
    pub energy: f64,
    pub momentum: f64,
    pub residual: f64,
}

/// Scan every interior vacancy of the one-root-removed window. Failed
/// points are returned as errors in place.
pub fn hole_scan(params: &ModelParams, exec: Execution) -> Result<Vec<Result<HoleSample>>> {
    let m = params.magnetization.saturating_sub(1);
    let reduced = params.with_magnetization(m)?;
    let vac = vacancies(&reduced, m);
    if vac.len() < 3 {
        return Err(Error::InvalidQuantumNumbers("hole window too small".into()));
    }
    let reference = solve_hole_state(params, vac[0])?;
    let (e_ref, p_ref) = energy_momentum(&reference)?;
    let interior = &vac[1..vac.len() - 1];
    Ok(exec.map(interior, |&j| {
        let state = solve_hole_state(params, j)?;
        let (e, p) = energy_momentum(&state)?;
        Ok(HoleSample {
            quantum_number: j,
            rapidity: hole_rapidity(&state, j),
            energy: e_ref - e,
            momentum: (p - p_ref).rem_euclid(2.0 * std::f64::consts::PI),
            residual: state.residual,
        })
    }))
}
