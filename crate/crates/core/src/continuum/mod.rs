//! Thermodynamic-limit quantities: root densities, hole dispersion, soliton
//! mass, low-energy constants and the vacuum-energy Fourier integral.

pub mod quadrature;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bethe::HoleSample;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Calibration between the pole term of the vacuum integral and
/// `(1/4) M^2 cot(pi^2 / 2 eta)`: the integral carries `-1/2` of it. Fixed
/// by the energy scan (see `scaling::energy_scan`).
pub const VACUUM_CALIBRATION: f64 = -0.5;

/// Low-energy constants at anisotropy `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumConstants {
    pub eta: f64,
    /// `2 (pi - eta) / pi`.
    pub xi: f64,
    /// `8 (pi - eta)`.
    pub beta_sq: f64,
    /// Scaling dimension of the interchain operator, equal to `xi`.
    pub d: f64,
    /// Sound velocity `(sin eta / eta)(pi / 2)`.
    pub v: f64,
    pub mass_exponent: f64,
    pub energy_exponent: f64,
}

impl ContinuumConstants {
    pub fn new(eta: f64) -> Self {
        let xi = 2.0 * (PI - eta) / PI;
        Self {
            eta,
            xi,
            beta_sq: 8.0 * (PI - eta),
            d: xi,
            v: eta.sin() / eta * PI / 2.0,
            mass_exponent: PI / (2.0 * eta),
            energy_exponent: PI / eta,
        }
    }
}

/// `R0(t) = 1 / (2 eta ch(pi t / eta))`.
pub fn bare_density_r0(t: f64, eta: f64) -> f64 {
    1.0 / (2.0 * eta * (PI * t / eta).cosh())
}

/// `R(t) = (R0(t) + R0(t - theta)) / 2`.
pub fn ground_density_r(t: f64, params: &ModelParams) -> f64 {
    0.5 * (bare_density_r0(t, params.eta) + bare_density_r0(t - params.theta, params.eta))
}

/// `(epsilon(t), p'(t))` with `epsilon = (sin eta / 2) p'` and
/// `p' = 2 pi (R0(t) + R0(t - theta))`.
pub fn hole_dispersion_continuum(t: f64, params: &ModelParams) -> (f64, f64) {
    let dp =
        2.0 * PI * (bare_density_r0(t, params.eta) + bare_density_r0(t - params.theta, params.eta));
    (params.eta.sin() / 2.0 * dp, dp)
}

/// Hole momentum `p(t) = int_{theta/2}^t p'(s) ds` by adaptive quadrature.
pub fn hole_momentum(t: f64, params: &ModelParams) -> Result<f64> {
    let (v, _) = quadrature::integrate(
        |s| hole_dispersion_continuum(s, params).1,
        params.theta / 2.0,
        t,
        1e-13,
        10_000,
    )?;
    Ok(v)
}

/// Soliton mass `4 sqrt(v) e^{-pi theta / 2 eta}`.
pub fn soliton_mass(params: &ModelParams) -> f64 {
    let c = ContinuumConstants::new(params.eta);
    4.0 * c.v.sqrt() * (-PI * params.theta / (2.0 * params.eta)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSource {
    FiniteLattice,
    Continuum,
    Relativistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub t: f64,
    pub epsilon: f64,
    pub p: f64,
}

/// Sampled hole dispersion with its mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub samples: Vec<DispersionSample>,
    pub mass: f64,
    pub source: CurveSource,
}

impl DispersionCurve {
    /// Continuum lattice curve at the given rapidities.
    pub fn continuum(params: &ModelParams, ts: &[f64]) -> Result<Self> {
        let samples = ts
            .iter()
            .map(|&t| {
                Ok(DispersionSample {
                    t,
                    epsilon: hole_dispersion_continuum(t, params).0,
                    p: hole_momentum(t, params)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            samples,
            mass: soliton_mass(params),
            source: CurveSource::Continuum,
        })
    }

    /// Finite-lattice curve from a hole scan; momenta are measured from the
    /// edge-hole reference state.
    pub fn from_holes(samples: &[HoleSample], gap: f64) -> Self {
        Self {
            samples: samples
                .iter()
                .map(|s| DispersionSample {
                    t: s.rapidity,
                    epsilon: s.energy,
                    p: s.momentum,
                })
                .collect(),
            mass: gap,
            source: CurveSource::FiniteLattice,
        }
    }

    /// Relativistic parametrization `epsilon = M ch(pi s / eta)`,
    /// `p = M sh(pi s / eta)`, `s = t - theta / 2`, in physical units.
    pub fn relativistic(params: &ModelParams, ts: &[f64]) -> Self {
        let m = soliton_mass(params);
        let samples = ts
            .iter()
            .map(|&t| {
                let x = PI * (t - params.theta / 2.0) / params.eta;
                DispersionSample {
                    t,
                    epsilon: m * x.cosh(),
                    p: m * x.sinh(),
                }
            })
            .collect();
        Self {
            samples,
            mass: m,
            source: CurveSource::Relativistic,
        }
    }

    /// Lattice units to physical units: `epsilon / sqrt(v)`, `p sqrt(v)`.
    pub fn to_physical(&self, eta: f64) -> Self {
        if self.source == CurveSource::Relativistic {
            return self.clone();
        }
        let sv = ContinuumConstants::new(eta).v.sqrt();
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| DispersionSample {
                    t: s.t,
                    epsilon: s.epsilon / sv,
                    p: s.p * sv,
                })
                .collect(),
            mass: self.mass,
            source: self.source,
        }
    }

    /// Largest `|epsilon^2 - p^2 - M^2|`.
    pub fn invariant_mass_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.epsilon * s.epsilon - s.p * s.p - self.mass * self.mass).abs())
            .fold(0.0, f64::max)
    }
}

/// `sh(w (pi - eta) / 2) / (sh(w pi / 2) ch(w eta / 2))`, even in `w`, with
/// the removable point `w = 0` giving `(pi - eta) / pi`.
pub fn vacuum_kernel(w: f64, eta: f64) -> f64 {
    let w = w.abs();
    if w < 1e-8 {
        return (PI - eta) / PI;
    }
    let a = w * (PI - eta) / 2.0;
    let b = w * PI / 2.0;
    let c = w * eta / 2.0;
    // 2 e^{-eta w} (1 - e^{-2a}) / ((1 - e^{-2b}) (1 + e^{-2c}))
    2.0 * (-eta * w).exp() * (-(-2.0 * a).exp_m1())
        / ((-(-2.0 * b).exp_m1()) * (1.0 + (-2.0 * c).exp()))
}

/// `I(theta) = int dw e^{i w theta} g(w)` over the real line, computed as
/// `2 int_0^W cos(w theta) g(w) dw` with `W` past the point where the
/// exponential tail drops below roundoff. Returns `(value, error estimate)`.
pub fn vacuum_fourier_integral(eta: f64, theta: f64, tol: f64) -> Result<(f64, f64)> {
    let cutoff = (2.0 / (eta * 1e-18)).ln() / eta;
    let period = if theta > 0.0 {
        2.0 * PI / theta
    } else {
        cutoff
    };
    let width = period.min(1.0);
    let n = (cutoff / width).ceil() as usize;
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64 * width).collect();
    let f = |w: f64| (w * theta).cos() * vacuum_kernel(w, eta);
    let (v, e) = quadrature::integrate_panels(&f, &breaks, tol / 2.0, 200_000)?;
    Ok((2.0 * v, 2.0 * e))
}

/// Vacuum-energy integral `(1/2)(sin eta / 2) I(theta)` with absolute error
/// at most `tol`.
pub fn vacuum_energy_integral(params: &ModelParams, tol: f64) -> Result<f64> {
    if params.theta <= 0.0 {
        return Err(Error::InvalidParams(
            "vacuum integral needs theta > 0".into(),
        ));
    }
    let pref = params.eta.sin() / 4.0;
    let (v, e) = vacuum_fourier_integral(params.eta, params.theta, tol / pref)?;
    if e * pref > tol {
        return Err(Error::QuadratureNonConvergence { error: e * pref });
    }
    Ok(pref * v)
}

/// `I(theta)` from closing the contour in the upper half plane: poles of
/// `1/sh(w pi / 2)` at `w = 2ik` give `4 tan(k eta) e^{-2k theta}` and poles
/// of `1/ch(w eta / 2)` at `w = i(2m+1) pi / eta` give
/// `-(4 pi / eta) cot((2m+1) pi^2 / 2 eta) e^{-(2m+1) pi theta / eta}`.
pub fn vacuum_residue_series(eta: f64, theta: f64, terms: usize) -> f64 {
    let mut total = 0.0;
    for k in 1..=terms {
        let kf = k as f64;
        total += 4.0 * (kf * eta).tan() * (-2.0 * kf * theta).exp();
    }
    for m in 0..terms {
        let o = (2 * m + 1) as f64;
        total -= 4.0 * PI / eta / (o * PI * PI / (2.0 * eta)).tan() * (-o * PI * theta / eta).exp();
    }
    total
}

fn check_resonance(eta: f64) -> Result<()> {
    let s = (PI * PI / (2.0 * eta)).sin();
    if s.abs() < 1e-6 {
        return Err(Error::Resonance(s.abs()));
    }
    Ok(())
}

/// `(1/4) M^2 cot(pi^2 / 2 eta)`.
pub fn vacuum_energy_singular(params: &ModelParams) -> Result<f64> {
    check_resonance(params.eta)?;
    let m = soliton_mass(params);
    Ok(0.25 * m * m / (PI * PI / (2.0 * params.eta)).tan())
}

/// Leading non-analytic term of [`vacuum_energy_integral`] from the residue
/// at `w = i pi / eta`: `-(pi sin eta / eta) cot(pi^2 / 2 eta) h^{pi / eta}`.
pub fn vacuum_energy_pole_term(params: &ModelParams) -> Result<f64> {
    check_resonance(params.eta)?;
    let eta = params.eta;
    Ok(-(PI * eta.sin() / eta) / (PI * PI / (2.0 * eta)).tan() * (-PI * params.theta / eta).exp())
}

/// Thermodynamic limit of the Bethe ground-state energy per site,
/// `(sin eta / 4)(I(0) + I(theta))`.
pub fn ground_energy_density(params: &ModelParams, tol: f64) -> Result<f64> {
    let pref = params.eta.sin() / 4.0;
    let (i0, _) = vacuum_fourier_integral(params.eta, 0.0, tol / pref)?;
    let (it, _) = vacuum_fourier_integral(params.eta, params.theta, tol / pref)?;
    Ok(pref * (i0 + it))
}
