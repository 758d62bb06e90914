//! Power-law scans in the coupling `h = e^{-theta}` and their fits.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bethe::{hole_scan, HoleSample};
use crate::continuum::{
    bare_density_r0, soliton_mass, vacuum_energy_integral, vacuum_energy_singular,
    ContinuumConstants,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::ModelParams;

/// `(mass exponent 1/(2-d), energy exponent 2/(2-d))`.
pub fn predicted_exponents(d: f64) -> Result<(f64, f64)> {
    if d >= 2.0 {
        return Err(Error::IrrelevantOperator(d));
    }
    Ok((1.0 / (2.0 - d), 2.0 / (2.0 - d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    BetheAnsatz,
    Integral,
    ExactDiagonalization,
    Continuum,
}

/// Observable samples over a theta grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub eta: f64,
    pub sites: Option<usize>,
    pub thetas: Vec<f64>,
    /// `h = e^{-theta}`, strictly decreasing.
    pub couplings: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Vec<Provenance>,
}

impl ScalingSeries {
    pub fn new(eta: f64, sites: Option<usize>) -> Self {
        Self {
            eta,
            sites,
            thetas: Vec::new(),
            couplings: Vec::new(),
            values: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn push(&mut self, theta: f64, value: f64, provenance: Provenance) {
        self.thetas.push(theta);
        self.couplings.push((-theta).exp());
        self.values.push(value);
        self.provenance.push(provenance);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.couplings.windows(2).all(|w| w[1] < w[0]) && self.values.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitModel {
    /// `y = A h^p`, least squares in log space.
    PurePower,
    /// `y = A h^p + sum_{k=1}^{order} c_k h^{2k}`, linear in `(A, c)` with
    /// `p` found by a deterministic one-dimensional search.
    PowerPlusBackground { order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub exponent: f64,
    pub prefactor: f64,
    /// Coefficients of `h^2, h^4, ...` (empty for the pure model).
    pub background: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_rms: f64,
    /// Covariance of `(ln A, p)` for the pure model.
    pub covariance: Option<[[f64; 2]; 2]>,
    pub predicted_exponent: f64,
    pub deviation: f64,
}

impl FitResult {
    pub fn evaluate(&self, h: f64) -> f64 {
        let mut y = self.prefactor * h.powf(self.exponent);
        for (k, c) in self.background.iter().enumerate() {
            y += c * h.powi(2 * (k as i32 + 1));
        }
        y
    }

    /// Fitted background only.
    pub fn background_at(&self, h: f64) -> f64 {
        self.background
            .iter()
            .enumerate()
            .map(|(k, c)| c * h.powi(2 * (k as i32 + 1)))
            .sum()
    }
}

fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    // Column scaling keeps widely different powers of h comparable.
    let scales: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if scales.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::RankDeficient);
    }
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-14 * smax {
        return Err(Error::RankDeficient);
    }
    let x = svd.solve(b, 0.0).map_err(|_| Error::RankDeficient)?;
    Ok(DVector::from_iterator(
        x.len(),
        x.iter().zip(&scales).map(|(v, s)| v / s),
    ))
}

fn pure_power(series: &ScalingSeries, predicted: f64) -> Result<FitResult> {
    let n = series.len();
    if let Some(&bad) = series.values.iter().find(|&&y| y <= 0.0 || !y.is_finite()) {
        return Err(Error::NonPositiveObservable(bad));
    }
    let a = DMatrix::from_fn(n, 2, |i, j| {
        if j == 0 {
            1.0
        } else {
            series.couplings[i].ln()
        }
    });
    let b = DVector::from_iterator(n, series.values.iter().map(|y| y.ln()));
    let x = lstsq(&a, &b)?;
    let res: Vec<f64> = (0..n).map(|i| b[i] - x[0] - x[1] * a[(i, 1)]).collect();
    let rss: f64 = res.iter().map(|r| r * r).sum();
    let dof = (n as f64 - 2.0).max(1.0);
    let cov = (a.transpose() * &a).try_inverse().map(|m| {
        [
            [m[(0, 0)] * rss / dof, m[(0, 1)] * rss / dof],
            [m[(1, 0)] * rss / dof, m[(1, 1)] * rss / dof],
        ]
    });
    Ok(FitResult {
        model: FitModel::PurePower,
        exponent: x[1],
        prefactor: x[0].exp(),
        background: Vec::new(),
        residual_rms: (rss / n as f64).sqrt(),
        residuals: res,
        covariance: cov,
        predicted_exponent: predicted,
        deviation: relative_deviation(x[1], predicted),
    })
}

fn relative_deviation(exponent: f64, predicted: f64) -> f64 {
    if predicted == 0.0 {
        exponent.abs()
    } else {
        ((exponent - predicted) / predicted).abs()
    }
}

/// Relative residuals and coefficients of the linear sub-problem at fixed `p`.
fn projected(
    series: &ScalingSeries,
    order: usize,
    p: f64,
) -> Result<(f64, DVector<f64>, Vec<f64>)> {
    let n = series.len();
    let w: Vec<f64> = series
        .values
        .iter()
        .map(|y| 1.0 / y.abs().max(f64::MIN_POSITIVE))
        .collect();
    let a = DMatrix::from_fn(n, order + 1, |i, j| {
        let h = series.couplings[i];
        w[i] * if j == 0 {
            h.powf(p)
        } else {
            h.powi(2 * j as i32)
        }
    });
    let b = DVector::from_iterator(n, (0..n).map(|i| series.values[i] * w[i]));
    let x = lstsq(&a, &b)?;
    let r = &b - &a * &x;
    let res: Vec<f64> = r.iter().copied().collect();
    Ok((r.norm_squared(), x, res))
}

fn background_fit(
    series: &ScalingSeries,
    order: usize,
    predicted: f64,
    bracket: (f64, f64),
) -> Result<FitResult> {
    let need = order + 3;
    if series.len() < need.max(4) {
        return Err(Error::TooFewPoints {
            got: series.len(),
            need: need.max(4),
        });
    }
    let rss = |p: f64| {
        projected(series, order, p)
            .map(|r| r.0)
            .unwrap_or(f64::INFINITY)
    };
    // Coarse scan, then golden-section refinement around the best node.
    let (lo, hi) = bracket;
    let nodes = 400;
    let step = (hi - lo) / nodes as f64;
    let best = (0..=nodes)
        .map(|k| lo + step * k as f64)
        .map(|p| (p, rss(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty scan");
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * best.0.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = rss(d);
        }
    }
    let p = 0.5 * (a + b);
    let (r2, x, res) = projected(series, order, p)?;
    Ok(FitResult {
        model: FitModel::PowerPlusBackground { order },
        exponent: p,
        prefactor: x[0],
        background: x.iter().skip(1).copied().collect(),
        residual_rms: (r2 / series.len() as f64).sqrt(),
        residuals: res,
        covariance: None,
        predicted_exponent: predicted,
        deviation: relative_deviation(p, predicted),
    })
}

/// Fit `series` with `model`; `predicted` is carried into the result. The
/// background model searches the exponent in `(0.05, 2 order + 1.95)`
/// excluding nothing; use [`power_law_fit_in`] to restrict it.
pub fn power_law_fit(series: &ScalingSeries, model: FitModel, predicted: f64) -> Result<FitResult> {
    match model {
        FitModel::PurePower => {
            if series.len() < 4 {
                return Err(Error::TooFewPoints {
                    got: series.len(),
                    need: 4,
                });
            }
            pure_power(series, predicted)
        }
        FitModel::PowerPlusBackground { order } => {
            background_fit(series, order, predicted, (0.05, 2.0 * order as f64 + 1.95))
        }
    }
}

/// Background fit with the exponent searched inside `bracket`.
pub fn power_law_fit_in(
    series: &ScalingSeries,
    order: usize,
    predicted: f64,
    bracket: (f64, f64),
) -> Result<FitResult> {
    background_fit(series, order, predicted, bracket)
}

/// Raise the background order from 2 until the residual drops by less
/// than 10 % (at most `max_order`).
pub fn escalating_background_fit(
    series: &ScalingSeries,
    predicted: f64,
    bracket: (f64, f64),
    max_order: usize,
) -> Result<FitResult> {
    let mut best = background_fit(series, 2, predicted, bracket)?;
    for order in 3..=max_order {
        let next = match background_fit(series, order, predicted, bracket) {
            Ok(f) => f,
            Err(_) => break,
        };
        let improved = next.residual_rms < 0.9 * best.residual_rms;
        best = next;
        if !improved {
            break;
        }
    }
    Ok(best)
}

/// Where the mass observable comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MassSource {
    Continuum,
    BetheAnsatz { sites: usize },
}

/// Gap of one finite chain from the hole band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleGap {
    pub theta: f64,
    /// Amplitude of the fitted dispersion shape, in lattice energy units.
    pub gap: f64,
    /// Fitted constant offset of the band.
    pub offset: f64,
    /// Smallest sampled hole energy.
    pub min_sample: f64,
    pub samples: Vec<HoleSample>,
}

/// Fit the hole band `epsilon_L(t) = A f(t) + B` with the continuum shape
/// `f(t) = eta ch(pi theta / 2 eta)(R0(t) + R0(t - theta))`, normalized to
/// `f(theta / 2) ~ 1`; `A` is the gap.
pub fn hole_gap(params: &ModelParams, exec: Execution) -> Result<HoleGap> {
    let scan = hole_scan(params, exec)?;
    let samples: Vec<HoleSample> = scan.into_iter().collect::<Result<_>>()?;
    let (eta, theta) = (params.eta, params.theta);
    let norm = eta * (PI * theta / (2.0 * eta)).cosh();
    let shape = |t: f64| norm * (bare_density_r0(t, eta) + bare_density_r0(t - theta, eta));
    let n = samples.len();
    let a = DMatrix::from_fn(n, 2, |i, j| {
        if j == 0 {
            shape(samples[i].rapidity)
        } else {
            1.0
        }
    });
    let b = DVector::from_iterator(n, samples.iter().map(|s| s.energy));
    let x = lstsq(&a, &b)?;
    let min_sample = samples
        .iter()
        .map(|s| s.energy)
        .fold(f64::INFINITY, f64::min);
    Ok(HoleGap {
        theta,
        gap: x[0],
        offset: x[1],
        min_sample,
        samples,
    })
}

/// Physical soliton mass per theta (lattice gap divided by `sqrt(v)`).
/// Points whose solve fails are dropped with a warning.
pub fn mass_scan(
    eta: f64,
    theta_grid: &[f64],
    source: MassSource,
    exec: Execution,
) -> Result<ScalingSeries> {
    let sv = ContinuumConstants::new(eta).v.sqrt();
    let mut grid = theta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    match source {
        MassSource::Continuum => {
            let mut s = ScalingSeries::new(eta, None);
            for &theta in &grid {
                let p = ModelParams::half_filled(eta, theta, 4)?;
                s.push(theta, soliton_mass(&p), Provenance::Continuum);
            }
            Ok(s)
        }
        MassSource::BetheAnsatz { sites } => {
            let mut s = ScalingSeries::new(eta, Some(sites));
            let gaps = exec.map(&grid, |&theta| {
                ModelParams::half_filled(eta, theta, sites)
                    .and_then(|p| hole_gap(&p, Execution::Sequential))
            });
            for (theta, g) in grid.iter().zip(gaps) {
                match g {
                    Ok(g) => s.push(*theta, g.gap / sv, Provenance::BetheAnsatz),
                    Err(e) => warn!("mass scan: theta = {theta} dropped: {e}"),
                }
            }
            Ok(s)
        }
    }
}

/// Vacuum-energy scan with background subtraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyScan {
    /// Raw integral values.
    pub raw: ScalingSeries,
    /// Background-subtracted singular part per theta.
    pub singular: ScalingSeries,
    pub fit: FitResult,
    /// `singular_i / ((1/4) M^2 cot(pi^2 / 2 eta))` per theta.
    pub calibration: Vec<f64>,
    /// Mean of `calibration`.
    pub calibration_mean: f64,
    /// `(max - min) / |mean|` of `calibration`.
    pub calibration_spread: f64,
}

/// Vacuum integral over the grid, fitted with `A h^p + sum c_k h^{2k}`
/// (order escalated from 2 up to 4), exponent searched in `(1, 2 order)`
/// away from the even background powers.
pub fn energy_scan(eta: f64, theta_grid: &[f64], tol: f64, exec: Execution) -> Result<EnergyScan> {
    let constants = ContinuumConstants::new(eta);
    let mut grid = theta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values = exec.map(&grid, |&theta| {
        ModelParams::half_filled(eta, theta, 4).and_then(|p| vacuum_energy_integral(&p, tol))
    });
    let mut raw = ScalingSeries::new(eta, None);
    for (theta, v) in grid.iter().zip(values) {
        raw.push(*theta, v?, Provenance::Integral);
    }
    let pred = constants.energy_exponent;
    // Exclude the even integers so the power is not confused with background.
    let lo = (pred.floor() + 0.02).max(0.05);
    let hi = pred.ceil() - 0.02;
    let bracket = if pred.fract() < 0.02 || pred.fract() > 0.98 {
        (pred - 0.45, pred + 0.45)
    } else {
        (lo, hi)
    };
    let fit = escalating_background_fit(&raw, pred, bracket, 4)?;
    let mut singular = ScalingSeries::new(eta, None);
    let mut calibration = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        let h = raw.couplings[i];
        let y = raw.values[i] - fit.background_at(h);
        singular.push(raw.thetas[i], y, Provenance::Integral);
        let p = ModelParams::half_filled(eta, raw.thetas[i], 4)?;
        calibration.push(y / vacuum_energy_singular(&p)?);
    }
    let mean = calibration.iter().sum::<f64>() / calibration.len() as f64;
    let spread = (calibration
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        - calibration.iter().copied().fold(f64::INFINITY, f64::min))
        / mean.abs();
    Ok(EnergyScan {
        raw,
        singular,
        fit,
        calibration,
        calibration_mean: mean,
        calibration_spread: spread,
    })
}

/// Fit window in theta: the upper end keeps `h^{pi/eta}` at least 100x above
/// `noise`; the lower end keeps the next pole correction `h^{2 pi / eta}`
/// below `rel` of the leading one.
pub fn select_window(eta: f64, noise: f64, rel: f64) -> (f64, f64) {
    let p = PI / eta;
    let hi = -(100.0 * noise).ln() / p;
    let lo = -rel.ln() / p;
    (lo, hi)
}

/// `(x, y, fit(x))` rows for plotting.
pub fn plot_data(series: &ScalingSeries, fit: &FitResult) -> Vec<(f64, f64, f64)> {
    series
        .couplings
        .iter()
        .zip(&series.values)
        .map(|(&h, &y)| (h, y, fit.evaluate(h)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> ScalingSeries {
        let mut s = ScalingSeries::new(1.0, None);
        for k in 0..12 {
            let theta = 3.0 + 0.5 * k as f64;
            s.push(theta, f((-theta).exp()), Provenance::Continuum);
        }
        s
    }

    #[test]
    fn exponents() {
        assert_eq!(predicted_exponents(1.0).unwrap(), (1.0, 2.0));
        let (m, e) = predicted_exponents(1.2).unwrap();
        assert!((m - 1.25).abs() < 1e-14 && (e - 2.5).abs() < 1e-14);
        assert!(predicted_exponents(2.0).is_err());
    }

    #[test]
    fn pure_power_round_trip() {
        let s = synthetic(|h| 3.0 * h.powf(1.25));
        let f = power_law_fit(&s, FitModel::PurePower, 1.25).unwrap();
        assert!((f.exponent - 1.25).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-10);
        assert!(f.residual_rms <= 1e-12);
        let c = synthetic(|_| 2.0);
        assert!(
            power_law_fit(&c, FitModel::PurePower, 0.0)
                .unwrap()
                .exponent
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn background_round_trip() {
        let s = synthetic(|h| 3.0 * h.powf(1.25) + 0.1 * h * h);
        let f = power_law_fit(&s, FitModel::PowerPlusBackground { order: 2 }, 1.25).unwrap();
        assert!((f.exponent - 1.25).abs() < 1e-6, "{}", f.exponent);
    }

    #[test]
    fn rejects_bad_input() {
        let s = synthetic(|h| -h);
        assert!(matches!(
            power_law_fit(&s, FitModel::PurePower, 1.0),
            Err(Error::NonPositiveObservable(_))
        ));
        let mut t = ScalingSeries::new(1.0, None);
        t.push(1.0, 1.0, Provenance::Continuum);
        assert!(power_law_fit(&t, FitModel::PurePower, 1.0).is_err());
    }
}
