use std::borrow::Cow;

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};

use super::basis::SectorBasis;
use super::smatrix::{three_site_index, three_site_occupations, Matrix8, C64};
use crate::error::{Error, Result};

/// Matrix storage of a sector operator.
#[derive(Debug, Clone)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix<C64>),
}

/// A complex operator restricted to one magnetization sector.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    basis: SectorBasis,
    storage: Storage,
}

impl SectorOperator {
    pub fn dense(basis: SectorBasis, matrix: DMatrix<C64>) -> Self {
        assert_eq!(matrix.nrows(), basis.dim());
        assert_eq!(matrix.ncols(), basis.dim());
        Self {
            basis,
            storage: Storage::Dense(matrix),
        }
    }

    pub fn sparse(basis: SectorBasis, matrix: CsrMatrix<C64>) -> Self {
        assert_eq!(matrix.nrows(), basis.dim());
        assert_eq!(matrix.ncols(), basis.dim());
        Self {
            basis,
            storage: Storage::Sparse(matrix),
        }
    }

    pub fn identity(basis: SectorBasis) -> Self {
        let n = basis.dim();
        let mut coo = CooMatrix::new(n, n);
        for i in 0..n {
            coo.push(i, i, C64::new(1.0, 0.0));
        }
        Self::sparse(basis, CsrMatrix::from(&coo))
    }

    /// Build from the action on basis masks. `action(mask, out)` pushes
    /// `(image_mask, amplitude)` pairs for `op |mask>`; images must stay in
    /// the sector.
    pub fn from_action<F>(basis: SectorBasis, action: F) -> Self
    where
        F: Fn(u64, &mut Vec<(u64, C64)>),
    {
        let n = basis.dim();
        let mut coo = CooMatrix::new(n, n);
        let mut buf = Vec::new();
        for (col, &mask) in basis.states().iter().enumerate() {
            buf.clear();
            action(mask, &mut buf);
            for &(image, amp) in &buf {
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = basis
                    .index_of(image)
                    .expect("operator action left the magnetization sector");
                coo.push(row, col, amp);
            }
        }
        Self::sparse(basis, CsrMatrix::from(&coo))
    }

    /// Sum of three-site terms `(i, j, k, h)`, each acting on sites `i, j, k`
    /// in the local order of [`three_site_index`].
    pub fn from_three_site_terms(basis: SectorBasis, terms: &[([usize; 3], Matrix8)]) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self::from_action(basis, |mask, out| {
            for (sites, h) in terms {
                let ups = sites.map(|s| SectorBasis::is_up(mask, s));
                let col = three_site_index(ups);
                for row in 0..8 {
                    let v = h[(row, col)];
                    if v == zero {
                        continue;
                    }
                    let new = three_site_occupations(row);
                    let mut image = mask;
                    for (s, up) in sites.iter().zip(new) {
                        if up {
                            image |= 1 << s;
                        } else {
                            image &= !(1 << s);
                        }
                    }
                    out.push((image, v));
                }
            }
        })
    }

    /// Diagonal operator with entries `f(mask)`.
    pub fn diagonal<F: Fn(u64) -> C64>(basis: SectorBasis, f: F) -> Self {
        Self::from_action(basis, |mask, out| out.push((mask, f(mask))))
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn to_dense(&self) -> Cow<'_, DMatrix<C64>> {
        match &self.storage {
            Storage::Dense(m) => Cow::Borrowed(m),
            Storage::Sparse(s) => {
                let mut m = DMatrix::zeros(s.nrows(), s.ncols());
                for (r, c, v) in s.triplet_iter() {
                    m[(r, c)] += *v;
                }
                Cow::Owned(m)
            }
        }
    }

    pub fn into_dense(self) -> Self {
        let m = self.to_dense().into_owned();
        Self::dense(self.basis, m)
    }

    /// `y = op x`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![C64::new(0.0, 0.0); n];
        match &self.storage {
            Storage::Dense(m) => {
                for c in 0..n {
                    let xc = x[c];
                    if xc == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (yr, a) in y.iter_mut().zip(m.column(c).iter()) {
                        *yr += a * xc;
                    }
                }
            }
            Storage::Sparse(s) => {
                let (offsets, cols, vals) = (s.row_offsets(), s.col_indices(), s.values());
                for (r, yr) in y.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in offsets[r]..offsets[r + 1] {
                        acc += vals[k] * x[cols[k]];
                    }
                    *yr = acc;
                }
            }
        }
        y
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Sparse(s) => s
                .get_entry(row, col)
                .map(|e| e.into_value())
                .unwrap_or(C64::new(0.0, 0.0)),
        }
    }

    /// Nonzero entries `(row, col, value)` with `|value| > tol`, row-major.
    pub fn triplets(&self, tol: f64) -> Vec<(usize, usize, C64)> {
        let mut out: Vec<(usize, usize, C64)> = match &self.storage {
            Storage::Dense(m) => {
                let mut v = Vec::new();
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        if m[(r, c)].norm() > tol {
                            v.push((r, c, m[(r, c)]));
                        }
                    }
                }
                v
            }
            Storage::Sparse(s) => s
                .triplet_iter()
                .filter(|(_, _, v)| v.norm() > tol)
                .map(|(r, c, v)| (r, c, *v))
                .collect(),
        };
        out.sort_by_key(|&(r, c, _)| (r, c));
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.norm(),
            Storage::Sparse(s) => s.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// `|| op - op^dagger ||_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = self.to_dense();
        (m.as_ref() - m.adjoint()).norm()
    }

    /// `|| A B - B A ||_F`.
    pub fn commutator_norm(&self, other: &SectorOperator) -> f64 {
        let a = self.to_dense();
        let b = other.to_dense();
        (a.as_ref() * b.as_ref() - b.as_ref() * a.as_ref()).norm()
    }

    /// `a * self + b * other + c * I`, dense.
    pub fn combine(&self, a: C64, other: &SectorOperator, b: C64, c: C64) -> SectorOperator {
        assert_eq!(self.dim(), other.dim());
        let mut m = self.to_dense().into_owned() * a + other.to_dense().as_ref() * b;
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        SectorOperator::dense(self.basis.clone(), m)
    }

    pub fn scaled(&self, s: C64) -> SectorOperator {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * s),
            Storage::Sparse(m) => Storage::Sparse(m * s),
        };
        SectorOperator {
            basis: self.basis.clone(),
            storage,
        }
    }

    /// `|| self - other ||_F`.
    pub fn distance(&self, other: &SectorOperator) -> f64 {
        (self.to_dense().as_ref() - other.to_dense().as_ref()).norm()
    }

    /// Sector is preserved and the operator is a pure diagonal.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.triplets(tol).iter().all(|&(r, c, _)| r == c)
    }
}

/// Real affine relation `A = scale * B + shift * I` between two operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineConvention {
    pub sigma: f64,
    pub shift: f64,
    pub residual: f64,
}

impl AffineConvention {
    pub fn identity() -> Self {
        Self {
            sigma: 1.0,
            shift: 0.0,
            residual: 0.0,
        }
    }

    pub fn apply(&self, value: f64) -> f64 {
        self.sigma * value + self.shift
    }
}

/// Least-squares fit of real `(sigma, shift)` in `A ~ sigma B + shift I`.
pub fn fit_affine(a: &SectorOperator, b: &SectorOperator) -> Result<AffineConvention> {
    if a.dim() != b.dim() {
        return Err(Error::SizeMismatch(a.dim(), b.dim()));
    }
    let am = a.to_dense();
    let bm = b.to_dense();
    let n = a.dim() as f64;
    let inner = |x: &DMatrix<C64>, y: &DMatrix<C64>| -> f64 {
        x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum()
    };
    let bb = inner(&bm, &bm);
    let tr_b: f64 = (0..a.dim()).map(|i| bm[(i, i)].re).sum();
    let tr_a: f64 = (0..a.dim()).map(|i| am[(i, i)].re).sum();
    let ba = inner(&bm, &am);
    let det = bb * n - tr_b * tr_b;
    if det.abs() <= 1e-14 * (bb * n).max(1.0) {
        return Err(Error::RankDeficient);
    }
    let sigma = (n * ba - tr_b * tr_a) / det;
    let shift = (bb * tr_a - tr_b * ba) / det;
    let fitted = b.combine(
        C64::new(sigma, 0.0),
        b,
        C64::new(0.0, 0.0),
        C64::new(shift, 0.0),
    );
    let residual = (am.as_ref() - fitted.to_dense().as_ref()).norm();
    Ok(AffineConvention {
        sigma,
        shift,
        residual,
    })
}

/// Translation by `shift` sites: the occupation of site `i` moves to `i + shift`.
pub fn translation(basis: SectorBasis, shift: usize) -> SectorOperator {
    let l = basis.sites();
    let s = shift % l;
    let full = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
    SectorOperator::from_action(basis, move |mask, out| {
        let image = if s == 0 {
            mask
        } else {
            ((mask << s) | (mask >> (l - s))) & full
        };
        out.push((image, C64::new(1.0, 0.0)));
    })
}

/// Occupation number on the even (`parity = 0`) or odd (`parity = 1`) sublattice.
pub fn sublattice_number(basis: SectorBasis, parity: usize) -> SectorOperator {
    let l = basis.sites();
    let sub: u64 = (0..l).filter(|i| i % 2 == parity).map(|i| 1u64 << i).sum();
    SectorOperator::diagonal(basis, move |mask| {
        C64::new((mask & sub).count_ones() as f64, 0.0)
    })
}

/// Total `S^z = M - L/2` (times one half per spin).
pub fn total_sz(basis: SectorBasis) -> SectorOperator {
    let l = basis.sites() as f64;
    SectorOperator::diagonal(basis, move |mask| {
        C64::new(mask.count_ones() as f64 - l / 2.0, 0.0) * 0.5
    })
}
