//! Hamiltonians of the alternating chain: the logarithmic derivative of the
//! transfer matrix, its local three-site form, the decoupled limit, the
//! phase-string transformation and the first-order interchain coupling.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::SectorBasis;
use super::operator::{fit_affine, AffineConvention, SectorOperator};
use super::smatrix::{s_matrix, s_matrix_derivative, Matrix8, TwoSiteOperator, C64};
use super::transfer::transfer_matrix_pair;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::ModelParams;

pub const CONDITION_CAP: f64 = 1e12;
pub const HERMITICITY_TOL: f64 = 1e-8;
pub const RECONCILE_TOL: f64 = 1e-9;

/// Diagnostics of the log-derivative construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDerivDiagnostics {
    pub condition_at_zero: f64,
    pub condition_at_theta: f64,
    pub hermiticity_residual: f64,
}

fn norm1(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Z^{-1} dZ` at one point, with its 1-norm condition number.
fn log_derivative_at(t: f64, params: &ModelParams, exec: Execution) -> Result<(DMatrix<C64>, f64)> {
    let (z, dz) = transfer_matrix_pair(t, params, exec)?;
    let z = z.to_dense().into_owned();
    let lu = z.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::SingularTransferMatrix {
        point: t,
        condition: f64::INFINITY,
    })?;
    let condition = norm1(&z) * norm1(&inv);
    if !condition.is_finite() || condition > CONDITION_CAP {
        return Err(Error::SingularTransferMatrix {
            point: t,
            condition,
        });
    }
    Ok((inv * dz.to_dense().as_ref(), condition))
}

/// `H = (sh(i eta) / 2) (Z^{-1}(0) dZ(0) + Z^{-1}(theta) dZ(theta))` without the
/// hermiticity check; the residual `||H - H^+||_F / max(1, ||H||_F)` is reported.
pub fn hamiltonian_logderiv_unchecked(
    params: &ModelParams,
    exec: Execution,
) -> Result<(SectorOperator, LogDerivDiagnostics)> {
    params.validate()?;
    let (a, c0) = log_derivative_at(0.0, params, exec)?;
    let (b, ct) = log_derivative_at(params.theta, params, exec)?;
    let pref = C64::new(0.0, params.eta).sinh() * 0.5;
    let h = (a + b) * pref;
    let residual = (&h - h.adjoint()).norm() / h.norm().max(1.0);
    let basis = SectorBasis::new(params.sites, params.magnetization)?;
    Ok((
        SectorOperator::dense(basis, h),
        LogDerivDiagnostics {
            condition_at_zero: c0,
            condition_at_theta: ct,
            hermiticity_residual: residual,
        },
    ))
}

/// Log-derivative Hamiltonian; fails if it is not hermitian to [`HERMITICITY_TOL`].
pub fn hamiltonian_logderiv(params: &ModelParams) -> Result<SectorOperator> {
    let (h, diag) = hamiltonian_logderiv_unchecked(params, Execution::default())?;
    if diag.hermiticity_residual > HERMITICITY_TOL {
        return Err(Error::ConventionMismatch {
            residual: diag.hermiticity_residual,
        });
    }
    Ok(h)
}

/// The three-site density acting on `(i, i+1, i+2)` for a window whose
/// last two sites have spectral-parameter difference `u`.
pub fn local_density(u: f64, eta: f64) -> Matrix8 {
    let uc = C64::new(u, 0.0);
    let s = s_matrix(uc, eta);
    let sinv = s
        .inverse()
        .expect("S(u) is invertible for real u and 0 < eta < pi");
    let ds = s_matrix_derivative(uc, eta);
    let ds0 = s_matrix_derivative(C64::new(0.0, 0.0), eta);
    let s_jk = s.embed3(1, 2);
    let sinv_jk = sinv.embed3(1, 2);
    let ds_jk = ds.embed3(1, 2);
    let p_ik = TwoSiteOperator::permutation().embed3(0, 2);
    let ds_ik = ds0.embed3(0, 2);
    let c = C64::new(0.0, eta).sinh();
    sinv_jk * p_ik * ds_ik * s_jk + sinv_jk * ds_jk * c
}

/// Local Hamiltonian: sum over `i` of [`local_density`] on `(i, i+1, i+2)`
/// with periodic closure; the argument is `xi_{i+2} - xi_{i+1}`.
pub fn hamiltonian_local(params: &ModelParams) -> Result<SectorOperator> {
    params.validate()?;
    let l = params.sites;
    let basis = SectorBasis::new(l, params.magnetization)?;
    let terms: Vec<([usize; 3], Matrix8)> = (0..l)
        .map(|i| {
            let (j, k) = ((i + 1) % l, (i + 2) % l);
            let u = params.inhomogeneity(k) - params.inhomogeneity(j);
            ([i, j, k], local_density(u, params.eta))
        })
        .collect();
    Ok(SectorOperator::from_three_site_terms(basis, &terms))
}

/// Fit `H_local = sigma H_logderiv + shift` and fail if the residual exceeds
/// [`RECONCILE_TOL`] (relative to `max(1, ||H_local||)`).
pub fn reconcile(params: &ModelParams) -> Result<AffineConvention> {
    let local = hamiltonian_local(params)?;
    let (logd, _) = hamiltonian_logderiv_unchecked(params, Execution::default())?;
    let conv = fit_affine(&local, &logd)?;
    let scale = local.frobenius_norm().max(1.0);
    if conv.residual / scale > RECONCILE_TOL {
        return Err(Error::ReconciliationFailure {
            residual: conv.residual,
        });
    }
    Ok(conv)
}

/// Hop phase sign carried by the chain starting at `site`.
fn chain_sign(site: usize) -> f64 {
    if site % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Decoupled limit `theta -> infinity`:
/// `sum_i [Delta n_i n_{i+2} + 1/2 (b+_i b_{i+2} e^{i s_i 2 eta (n_{i+1} - 1/2)} + h.c.)]`,
/// `s_i = -1` on even sites and `+1` on odd sites.
pub fn hamiltonian_h0(params: &ModelParams) -> Result<SectorOperator> {
    params.validate()?;
    let l = params.sites;
    let eta = params.eta;
    let delta = params.delta();
    let basis = SectorBasis::new(l, params.magnetization)?;
    Ok(SectorOperator::from_action(basis, move |mask, out| {
        let n = |s: usize| f64::from(u8::from(SectorBasis::is_up(mask, s)));
        let mut diag = 0.0;
        for i in 0..l {
            let (j, k) = ((i + 1) % l, (i + 2) % l);
            diag += delta * n(i) * n(k);
            let phase = C64::from_polar(0.5, chain_sign(i) * 2.0 * eta * (n(j) - 0.5));
            if n(k) == 1.0 && n(i) == 0.0 {
                out.push((mask ^ (1 << i) ^ (1 << k), phase));
            } else if n(i) == 1.0 && n(k) == 0.0 {
                out.push((mask ^ (1 << i) ^ (1 << k), phase.conj()));
            }
        }
        out.push((mask, C64::new(diag, 0.0)));
    }))
}

/// Constant separating the log-derivative Hamiltonian from [`hamiltonian_h0`]
/// as `theta -> infinity`: `Delta (L - 2M) / 2`.
pub fn decoupled_shift(params: &ModelParams) -> f64 {
    params.delta() * (params.sites as f64 - 2.0 * params.magnetization as f64) / 2.0
}

/// Phase of the decoupling transformation on one configuration:
/// `-2 eta sum_{a even, b odd, b < a} (n_a - 1/2)(n_b - 1/2)`.
pub fn decoupling_phase(mask: u64, sites: usize, eta: f64) -> f64 {
    let mut acc = 0.0;
    let mut odd_below = 0.0;
    for s in 0..sites {
        let n = if SectorBasis::is_up(mask, s) {
            0.5
        } else {
            -0.5
        };
        if s % 2 == 1 {
            odd_below += n;
        } else {
            acc += n * odd_below;
        }
    }
    -2.0 * eta * acc
}

/// Diagonal unitary `U`; `U H0 U^+` is two decoupled XXZ chains in the bulk.
pub fn decoupling_transform(params: &ModelParams) -> Result<SectorOperator> {
    params.validate()?;
    let (l, eta) = (params.sites, params.eta);
    let basis = SectorBasis::new(l, params.magnetization)?;
    Ok(SectorOperator::diagonal(basis, move |m| {
        C64::from_polar(1.0, decoupling_phase(m, l, eta))
    }))
}

/// `U A U^+` for diagonal unitary `U`.
pub fn conjugate_diagonal(u: &SectorOperator, a: &SectorOperator) -> SectorOperator {
    let n = a.dim();
    let d: Vec<C64> = (0..n).map(|i| u.element(i, i)).collect();
    let mut m = a.to_dense().into_owned();
    for c in 0..n {
        for r in 0..n {
            m[(r, c)] *= d[r] * d[c].conj();
        }
    }
    SectorOperator::dense(a.basis().clone(), m)
}

/// Twist angles `(phi_even, phi_odd)` of the decoupled chains on a
/// configuration with `n_even`, `n_odd` particles on the two sublattices.
pub fn decoupled_twists(eta: f64, sites: usize, n_even: usize, n_odd: usize) -> (f64, f64) {
    let quarter = sites as f64 / 4.0;
    (
        2.0 * eta * (n_odd as f64 - quarter),
        2.0 * eta * (n_even as f64 - quarter),
    )
}

/// Periodic XXZ chain `sum_x [Delta n_x n_{x+1} + 1/2 (b+_x b_{x+1} + h.c.)]`
/// with the boundary hop `x = sites - 1 -> 0` carrying `e^{i phi}`.
pub fn twisted_xxz(sites: usize, particles: usize, delta: f64, phi: f64) -> Result<SectorOperator> {
    let basis = SectorBasis::new(sites, particles)?;
    Ok(SectorOperator::from_action(basis, move |mask, out| {
        let mut diag = 0.0;
        for x in 0..sites {
            let y = (x + 1) % sites;
            let (nx, ny) = (SectorBasis::is_up(mask, x), SectorBasis::is_up(mask, y));
            if nx && ny {
                diag += delta;
            }
            if nx != ny {
                let ph = if y == 0 {
                    C64::from_polar(0.5, phi)
                } else {
                    C64::new(0.5, 0.0)
                };
                // moving a particle from y to x picks up the phase, the reverse its conjugate
                out.push((mask ^ (1 << x) ^ (1 << y), if ny { ph } else { ph.conj() }));
            }
        }
        out.push((mask, C64::new(diag, 0.0)));
    }))
}

/// Nearest-neighbour interchain hopping
/// `2 sin^2(eta) e^{-theta} sum_x (b+_x b_{x+1} + h.c.)`.
pub fn interaction_first_order(params: &ModelParams) -> Result<SectorOperator> {
    params.validate()?;
    let l = params.sites;
    let amp = C64::new(2.0 * params.eta.sin().powi(2) * params.coupling(), 0.0);
    let basis = SectorBasis::new(l, params.magnetization)?;
    Ok(SectorOperator::from_action(basis, move |mask, out| {
        for a in 0..l {
            let b = (a + 1) % l;
            if SectorBasis::is_up(mask, a) != SectorBasis::is_up(mask, b) {
                out.push((mask ^ (1 << a) ^ (1 << b), amp));
            }
        }
    }))
}

/// Full first-order coefficient of the log-derivative Hamiltonian in
/// `h = e^{-theta}` (per unit `h`): a particle hopping from `a` to `a + 1`
/// with spectators `n_{a-1}`, `n_{a+2}` carries
/// `2 sin^2 eta + i s_a sin(2 eta) (n_{a+2} - n_{a-1})`, with the sublattice
/// sign `s_a` of [`hamiltonian_h0`]; the reverse hop is the
/// complex conjugate. The imaginary part is what [`interaction_first_order`]
/// drops.
pub fn interaction_first_order_complete(params: &ModelParams) -> Result<SectorOperator> {
    params.validate()?;
    let l = params.sites;
    let re = 2.0 * params.eta.sin().powi(2);
    let im = (2.0 * params.eta).sin();
    let basis = SectorBasis::new(l, params.magnetization)?;
    Ok(SectorOperator::from_action(basis, move |mask, out| {
        let n = |s: usize| f64::from(u8::from(SectorBasis::is_up(mask, s % l)));
        for a in 0..l {
            let b = (a + 1) % l;
            let (na, nb) = (n(a), n(b));
            if na == nb {
                continue;
            }
            let amp = C64::new(re, chain_sign(a) * im * (n(a + 2) - n(a + l - 1)));
            let amp = if na == 1.0 { amp } else { amp.conj() };
            out.push((mask ^ (1 << a) ^ (1 << b), amp));
        }
    }))
}

/// Richardson estimate of `dH/dh` at `h = 0` for the log-derivative
/// Hamiltonian, using `theta1 < theta2` and the exact limit
/// `H0 + decoupled_shift`.
pub fn extract_first_order(
    params: &ModelParams,
    theta1: f64,
    theta2: f64,
) -> Result<SectorOperator> {
    let p1 = params.with_theta(theta1)?;
    let p2 = params.with_theta(theta2)?;
    let limit = hamiltonian_h0(params)?;
    let shift = C64::new(decoupled_shift(params), 0.0);
    let rest = |p: &ModelParams| -> Result<DMatrix<C64>> {
        let (h, _) = hamiltonian_logderiv_unchecked(p, Execution::default())?;
        let mut m = h.to_dense().into_owned() - limit.to_dense().as_ref();
        for i in 0..m.nrows() {
            m[(i, i)] -= shift;
        }
        Ok(m)
    };
    let (h1, h2) = (p1.coupling(), p2.coupling());
    let r1 = rest(&p1)?;
    let r2 = rest(&p2)?;
    let v = (r1 * C64::new(h2 * h2, 0.0) - r2 * C64::new(h1 * h1, 0.0))
        / C64::new(h1 * h2 * h2 - h2 * h1 * h1, 0.0);
    Ok(SectorOperator::dense(limit.basis().clone(), v))
}

/// Whether a nearest-neighbour hop across `(a, a+1)` in configuration `mask`
/// has equal spectators `n_{a-1} = n_{a+2}` (the dropped factor vanishes).
pub fn is_matched_hop(mask: u64, a: usize, sites: usize) -> bool {
    SectorBasis::is_up(mask, (a + sites - 1) % sites) == SectorBasis::is_up(mask, (a + 2) % sites)
}
