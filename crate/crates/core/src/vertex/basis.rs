use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain length representable with `u64` bitmasks.
pub const MAX_SITES: usize = 62;

/// Fixed-magnetization basis: all `L`-bit masks with `M` bits set, in
/// ascending numeric order. Bit `i` set means site `i` is up (`n_i = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorBasis {
    sites: usize,
    ups: usize,
    states: Vec<u64>,
    #[serde(skip)]
    binom: Vec<Vec<u64>>,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

impl SectorBasis {
    pub fn new(sites: usize, ups: usize) -> Result<Self> {
        if sites > MAX_SITES {
            return Err(Error::InvalidParams(format!(
                "L = {sites} exceeds {MAX_SITES}"
            )));
        }
        if ups > sites {
            return Err(Error::InvalidParams(format!(
                "M = {ups} exceeds L = {sites}"
            )));
        }
        let dim = binomial(sites, ups) as usize;
        let mut states = Vec::with_capacity(dim);
        if ups == 0 {
            states.push(0);
        } else {
            let limit = 1u64 << sites;
            let mut s: u64 = (1u64 << ups) - 1;
            while s < limit {
                states.push(s);
                // Gosper's hack: next mask with the same popcount.
                let c = s & s.wrapping_neg();
                let r = s + c;
                s = (((r ^ s) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(states.len(), dim);
        let binom = (0..=sites)
            .map(|n| (0..=ups + 1).map(|k| binomial(n, k)).collect())
            .collect();
        Ok(Self {
            sites,
            ups,
            states,
            binom,
        })
    }

    /// Dimension `binomial(L, M)` without building the basis.
    pub fn dimension_of(sites: usize, ups: usize) -> usize {
        binomial(sites, ups) as usize
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn ups(&self) -> usize {
        self.ups
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Ordinal of `mask`, or `None` if it is not in this sector.
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        if mask >> self.sites != 0 || mask.count_ones() as usize != self.ups {
            return None;
        }
        if self.binom.is_empty() {
            return self.states.binary_search(&mask).ok();
        }
        // Combinatorial number system: colex rank equals ascending order.
        let mut rank = 0u64;
        let mut k = 0usize;
        let mut m = mask;
        while m != 0 {
            let pos = m.trailing_zeros() as usize;
            k += 1;
            rank += self.binom[pos][k];
            m &= m - 1;
        }
        Some(rank as usize)
    }

    #[inline]
    pub fn is_up(mask: u64, site: usize) -> bool {
        (mask >> site) & 1 == 1
    }
}
