//! Lanczos iteration with full reorthogonalization and locking, for the
//! lowest eigenpairs of a hermitian operator given only its action.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vertex::C64;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 400,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(v: &mut [C64], against: &[Vec<C64>]) {
    // Two passes keep the basis orthogonal to working precision.
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
}

/// Lowest eigenpair of `apply` on the orthogonal complement of `locked`.
fn lowest_deflated<F>(
    apply: &F,
    n: usize,
    locked: &[Vec<C64>],
    rng: &mut ChaCha8Rng,
    opts: &LanczosOptions,
) -> Result<(f64, Vec<C64>)>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    orthogonalize(&mut v, locked);
    let nv = norm(&v);
    if nv == 0.0 {
        return Err(Error::NonConvergence { iterations: 0 });
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let room = n - locked.len();
    let cap = opts.max_iterations.min(room);
    let mut basis: Vec<Vec<C64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    loop {
        let m = basis.len();
        let mut w = apply(&basis[m - 1]);
        let a = dot(&basis[m - 1], &w).re;
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);

        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imin, &lambda) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty tridiagonal");
        let y = eig.eigenvectors.column(imin);
        let resid = b * y[m - 1].abs();
        let converged = resid <= opts.tol * lambda.abs().max(1.0);
        if converged || m >= room {
            let mut x = vec![C64::new(0.0, 0.0); n];
            for (k, q) in basis.iter().enumerate() {
                let c = y[k];
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi += qi * c;
                }
            }
            orthogonalize(&mut x, locked);
            let nx = norm(&x);
            x.iter_mut().for_each(|z| *z /= nx);
            return Ok((lambda, x));
        }
        if m >= cap {
            return Err(Error::NonConvergence { iterations: m });
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
}

/// The `k` lowest eigenpairs, ascending.
pub fn lowest_eigenpairs<F>(
    apply: F,
    n: usize,
    k: usize,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<C64>)>>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let k = k.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let (lambda, x) = lowest_deflated(&apply, n, &locked, &mut rng, opts)?;
        locked.push(x.clone());
        out.push((lambda, x));
    }
    // Rayleigh-Ritz on the locked space removes ordering artefacts.
    let kk = out.len();
    let ax: Vec<Vec<C64>> = locked.iter().map(|x| apply(x)).collect();
    let mut g = DMatrix::<C64>::zeros(kk, kk);
    for i in 0..kk {
        for j in 0..kk {
            g[(i, j)] = dot(&locked[i], &ax[j]);
        }
    }
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..kk).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(order
        .into_iter()
        .map(|c| {
            let coeffs: DVector<C64> = eig.eigenvectors.column(c).into_owned();
            let mut x = vec![C64::new(0.0, 0.0); n];
            for (j, q) in locked.iter().enumerate() {
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi += qi * coeffs[j];
                }
            }
            (eig.eigenvalues[c], x)
        })
        .collect())
}
