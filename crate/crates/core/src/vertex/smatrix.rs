//! Trigonometric six-vertex S-matrix on two spin-1/2 sites.
//!
//! Pair basis order is `(up up, up down, down up, down down)`; a site in
//! state "up" is an occupied hard-core boson (`n = 1`).

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix8 = SMatrix<C64, 8, 8>;

/// Index of a two-site configuration in the pair basis.
#[inline]
pub fn pair_index(first_up: bool, second_up: bool) -> usize {
    2 * usize::from(!first_up) + usize::from(!second_up)
}

/// A 4x4 operator on the tensor product of two sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteOperator {
    pub entries: Matrix4<C64>,
}

impl TwoSiteOperator {
    pub fn identity() -> Self {
        Self {
            entries: Matrix4::identity(),
        }
    }

    /// Swap of the two sites.
    pub fn permutation() -> Self {
        let one = C64::new(1.0, 0.0);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = one;
        m[(3, 3)] = one;
        m[(1, 2)] = one;
        m[(2, 1)] = one;
        Self { entries: m }
    }

    fn six_vertex(aligned: C64, antialigned: C64, exchange: C64) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = aligned;
        m[(3, 3)] = aligned;
        m[(1, 1)] = antialigned;
        m[(2, 2)] = antialigned;
        m[(1, 2)] = exchange;
        m[(2, 1)] = exchange;
        Self { entries: m }
    }

    pub fn inverse(&self) -> Option<Self> {
        self.entries.try_inverse().map(|entries| Self { entries })
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            entries: self.entries * other.entries,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            entries: self.entries * s,
        }
    }

    /// Entries vanish unless both configurations carry the same number of up spins.
    pub fn satisfies_ice_rule(&self, tol: f64) -> bool {
        let ups = [2usize, 1, 1, 0];
        (0..4).all(|r| (0..4).all(|c| ups[r] == ups[c] || self.entries[(r, c)].norm() <= tol))
    }

    /// Matrix element `<out|op|in>` for explicit occupations.
    #[inline]
    pub fn element(&self, out: (bool, bool), inp: (bool, bool)) -> C64 {
        self.entries[(pair_index(out.0, out.1), pair_index(inp.0, inp.1))]
    }

    /// Embed into three sites, acting on positions `a` and `b` (in that order).
    pub fn embed3(&self, a: usize, b: usize) -> Matrix8 {
        debug_assert!(a < 3 && b < 3 && a != b);
        let mut out = Matrix8::zeros();
        for col in 0..8 {
            let ups = three_site_occupations(col);
            for ra in [true, false] {
                for rb in [true, false] {
                    let v = self.element((ra, rb), (ups[a], ups[b]));
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut o = ups;
                    o[a] = ra;
                    o[b] = rb;
                    out[(three_site_index(o), col)] += v;
                }
            }
        }
        out
    }
}

/// Occupations of a three-site basis index (first site most significant).
#[inline]
pub fn three_site_occupations(idx: usize) -> [bool; 3] {
    [idx & 4 == 0, idx & 2 == 0, idx & 1 == 0]
}

#[inline]
pub fn three_site_index(ups: [bool; 3]) -> usize {
    4 * usize::from(!ups[0]) + 2 * usize::from(!ups[1]) + usize::from(!ups[2])
}

/// `S(t) = (sh(t + i eta), sh(t), sh(i eta))`.
pub fn s_matrix(t: C64, eta: f64) -> TwoSiteOperator {
    let ieta = C64::new(0.0, eta);
    TwoSiteOperator::six_vertex((t + ieta).sinh(), t.sinh(), ieta.sinh())
}

/// Entrywise `d S / d t`.
pub fn s_matrix_derivative(t: C64, eta: f64) -> TwoSiteOperator {
    let ieta = C64::new(0.0, eta);
    TwoSiteOperator::six_vertex((t + ieta).cosh(), t.cosh(), C64::new(0.0, 0.0))
}

pub fn frobenius<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|| S12(t1-t2) S13(t1) S23(t2) - S23(t2) S13(t1) S12(t1-t2) ||_F` on three sites.
pub fn yang_baxter_residual(t1: f64, t2: f64, eta: f64) -> f64 {
    let s12 = s_matrix(C64::new(t1 - t2, 0.0), eta).embed3(0, 1);
    let s13 = s_matrix(C64::new(t1, 0.0), eta).embed3(0, 2);
    let s23 = s_matrix(C64::new(t2, 0.0), eta).embed3(1, 2);
    frobenius(&(s12 * s13 * s23 - s23 * s13 * s12))
}
