//! Inhomogeneous transfer matrix `Z(t) = Tr_0 S_{1,0}(t - xi_1) ... S_{L,0}(t - xi_L)`
//! on a magnetization sector.
//!
//! Each column is obtained by pushing the input configuration through the
//! sites from last to first while tracking the auxiliary spin; states are
//! merged on `(partial output mask, auxiliary spin)` so a column costs about
//! `dim * L` operations.

use nalgebra::DMatrix;

use super::basis::SectorBasis;
use super::operator::SectorOperator;
use super::smatrix::{s_matrix, s_matrix_derivative, TwoSiteOperator, C64};
use crate::error::Result;
use crate::exec::Execution;
use crate::params::ModelParams;

#[derive(Clone, Copy)]
struct Path {
    mask: u64,
    aux: bool,
    value: C64,
    deriv: C64,
}

fn site_weights(t: f64, params: &ModelParams) -> Vec<(TwoSiteOperator, TwoSiteOperator)> {
    (0..params.sites)
        .map(|i| {
            let u = C64::new(t - params.inhomogeneity(i), 0.0);
            (s_matrix(u, params.eta), s_matrix_derivative(u, params.eta))
        })
        .collect()
}

/// One column: returns `(output mask, Z entry, dZ/dt entry)`.
fn column(
    input: u64,
    weights: &[(TwoSiteOperator, TwoSiteOperator)],
    with_deriv: bool,
) -> Vec<(u64, C64, C64)> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut out: Vec<(u64, C64, C64)> = Vec::new();
    for start in [true, false] {
        let mut paths = vec![Path {
            mask: 0,
            aux: start,
            value: one,
            deriv: zero,
        }];
        let mut next = Vec::with_capacity(paths.len() * 2);
        for site in (0..weights.len()).rev() {
            let (s, ds) = &weights[site];
            let up_in = SectorBasis::is_up(input, site);
            next.clear();
            for p in &paths {
                for up_out in [true, false] {
                    // Ice rule fixes the outgoing auxiliary spin.
                    let count = i32::from(up_in) + i32::from(p.aux) - i32::from(up_out);
                    if !(0..=1).contains(&count) {
                        continue;
                    }
                    let aux_out = count == 1;
                    let w = s.element((up_out, aux_out), (up_in, p.aux));
                    if w == zero && !with_deriv {
                        continue;
                    }
                    let dw = ds.element((up_out, aux_out), (up_in, p.aux));
                    let mask = if up_out { p.mask | (1 << site) } else { p.mask };
                    next.push(Path {
                        mask,
                        aux: aux_out,
                        value: p.value * w,
                        deriv: p.deriv * w + p.value * dw,
                    });
                }
            }
            next.sort_by_key(|p| (p.mask, p.aux));
            paths.clear();
            for p in next.drain(..) {
                match paths.last_mut() {
                    Some(q) if q.mask == p.mask && q.aux == p.aux => {
                        q.value += p.value;
                        q.deriv += p.deriv;
                    }
                    _ => paths.push(p),
                }
            }
        }
        out.extend(
            paths
                .iter()
                .filter(|p| p.aux == start)
                .map(|p| (p.mask, p.value, p.deriv)),
        );
    }
    out
}

fn build(
    t: f64,
    params: &ModelParams,
    exec: Execution,
) -> Result<(SectorOperator, SectorOperator)> {
    params.validate()?;
    let basis = SectorBasis::new(params.sites, params.magnetization)?;
    let weights = site_weights(t, params);
    let cols = exec.map(basis.states(), |&m| column(m, &weights, true));
    let n = basis.dim();
    let mut z = DMatrix::zeros(n, n);
    let mut dz = DMatrix::zeros(n, n);
    for (c, entries) in cols.into_iter().enumerate() {
        for (mask, v, d) in entries {
            let r = basis
                .index_of(mask)
                .expect("transfer matrix preserves magnetization");
            z[(r, c)] += v;
            dz[(r, c)] += d;
        }
    }
    Ok((
        SectorOperator::dense(basis.clone(), z),
        SectorOperator::dense(basis, dz),
    ))
}

/// `Z(t)` restricted to the sector `params.magnetization`.
pub fn transfer_matrix(t: f64, params: &ModelParams) -> Result<SectorOperator> {
    transfer_matrix_with(t, params, Execution::default())
}

pub fn transfer_matrix_with(
    t: f64,
    params: &ModelParams,
    exec: Execution,
) -> Result<SectorOperator> {
    Ok(build(t, params, exec)?.0)
}

/// Exact `dZ/dt` by the product rule.
pub fn transfer_matrix_derivative(t: f64, params: &ModelParams) -> Result<SectorOperator> {
    Ok(build(t, params, Execution::default())?.1)
}

/// `(Z(t), dZ/dt)` from a single contraction.
pub fn transfer_matrix_pair(
    t: f64,
    params: &ModelParams,
    exec: Execution,
) -> Result<(SectorOperator, SectorOperator)> {
    build(t, params, exec)
}
