use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parameters of one lattice run: anisotropy, inhomogeneity shift, chain
/// length and magnetization sector (number of up spins / Bethe roots).
///
/// Sites are numbered `0..sites`; even sites carry inhomogeneity `0`, odd
/// sites carry `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eta: f64,
    pub theta: f64,
    pub sites: usize,
    pub magnetization: usize,
}

impl ModelParams {
    pub fn new(eta: f64, theta: f64, sites: usize, magnetization: usize) -> Result<Self> {
        let p = ModelParams {
            eta,
            theta,
            sites,
            magnetization,
        };
        p.validate()?;
        Ok(p)
    }

    /// Half-filled sector `M = L / 2`.
    pub fn half_filled(eta: f64, theta: f64, sites: usize) -> Result<Self> {
        Self::new(eta, theta, sites, sites / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < PI) {
            return Err(Error::InvalidParams(format!(
                "eta = {} must lie strictly inside (0, pi)",
                self.eta
            )));
        }
        if !self.theta.is_finite() || self.theta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "theta = {} must be finite and >= 0",
                self.theta
            )));
        }
        if self.sites < 4 || self.sites % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "L = {} must be an even integer >= 4",
                self.sites
            )));
        }
        if self.magnetization > self.sites {
            return Err(Error::InvalidParams(format!(
                "M = {} exceeds L = {}",
                self.magnetization, self.sites
            )));
        }
        Ok(())
    }

    pub fn with_magnetization(&self, magnetization: usize) -> Result<Self> {
        Self::new(self.eta, self.theta, self.sites, magnetization)
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.eta, theta, self.sites, self.magnetization)
    }

    /// XXZ anisotropy `cos(eta)`.
    pub fn delta(&self) -> f64 {
        self.eta.cos()
    }

    /// Coupling `h = exp(-theta)`.
    pub fn coupling(&self) -> f64 {
        (-self.theta).exp()
    }

    /// Spectral-parameter shift carried by `site`.
    pub fn inhomogeneity(&self, site: usize) -> f64 {
        if site % 2 == 0 {
            0.0
        } else {
            self.theta
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 1.0, 8, 4).is_err());
        assert!(ModelParams::new(PI, 1.0, 8, 4).is_err());
        assert!(ModelParams::new(0.7, -1.0, 8, 4).is_err());
        assert!(ModelParams::new(0.7, 1.0, 7, 3).is_err());
        assert!(ModelParams::new(0.7, 1.0, 2, 1).is_err());
        assert!(ModelParams::new(0.7, 1.0, 8, 9).is_err());
        assert!(ModelParams::new(0.7, 1.0, 8, 8).is_ok());
    }

    #[test]
    fn alternating_inhomogeneities() {
        let p = ModelParams::new(0.7, 1.5, 6, 3).unwrap();
        let xi: Vec<f64> = (0..6).map(|i| p.inhomogeneity(i)).collect();
        assert_eq!(xi, vec![0.0, 1.5, 0.0, 1.5, 0.0, 1.5]);
        assert!((p.delta() - 0.7f64.cos()).abs() < 1e-15);
        assert!((p.coupling() - (-1.5f64).exp()).abs() < 1e-15);
    }
}
