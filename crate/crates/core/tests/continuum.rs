use std::f64::consts::PI;

use sinegordon_core::bethe::{energy_momentum, hole_scan, solve_ground_state};
use sinegordon_core::continuum::quadrature::integrate;
use sinegordon_core::continuum::*;
use sinegordon_core::ModelParams;

fn eta0() -> f64 {
    2.0 * PI / 5.0
}

#[test]
fn constants_satisfy_identities() {
    for k in 0..50 {
        let eta = 0.05 + (PI - 0.1) * k as f64 / 49.0;
        let c = ContinuumConstants::new(eta);
        assert!(
            (1.0 / (2.0 - c.xi) - PI / (2.0 * eta)).abs() <= 1e-14 * (PI / (2.0 * eta)).max(1.0)
        );
        assert!((c.d - c.beta_sq / (4.0 * PI)).abs() <= 1e-14);
        assert_eq!(c.d, c.xi);
    }
    assert!((ContinuumConstants::new(PI / 2.0).v - 1.0).abs() < 1e-15);
}

#[test]
fn bare_density_is_normalized() {
    let eta = 0.9;
    assert!((bare_density_r0(0.0, eta) - 1.0 / (2.0 * eta)).abs() < 1e-16);
    assert_eq!(bare_density_r0(0.7, eta), bare_density_r0(-0.7, eta));
    let (v, _) = integrate(|t| bare_density_r0(t, eta), -40.0, 40.0, 1e-13, 10_000).unwrap();
    assert!((v - 0.5).abs() < 1e-10);
    let p = ModelParams::half_filled(eta, 3.0, 8).unwrap();
    let (v, _) = integrate(|t| ground_density_r(t, &p), -40.0, 43.0, 1e-13, 10_000).unwrap();
    assert!((v - 0.5).abs() < 1e-10);
}

#[test]
fn dispersion_ratio_is_constant() {
    let p = ModelParams::half_filled(eta0(), 6.0, 256).unwrap();
    for k in 0..100 {
        let t = -3.0 + 12.0 * k as f64 / 99.0;
        let (e, dp) = hole_dispersion_continuum(t, &p);
        assert!((e / dp - eta0().sin() / 2.0).abs() <= 1e-12);
    }
}

#[test]
fn momentum_quadrature_matches_closed_form() {
    let p = ModelParams::half_filled(0.8, 4.0, 8).unwrap();
    let c = PI / 0.8;
    let closed = |t: f64| 2.0 * ((c * t).exp().atan() + (c * (t - 4.0)).exp().atan());
    for &t in &[-1.0, 0.5, 2.0, 3.7, 6.0] {
        let q = hole_momentum(t, &p).unwrap();
        assert!((q - (closed(t) - closed(2.0))).abs() < 1e-11);
    }
}

#[test]
fn mass_formula() {
    let p = ModelParams::half_filled(PI / 2.0, 3.0, 8).unwrap();
    assert!((soliton_mass(&p) - 4.0 * (-3.0f64).exp()).abs() < 1e-15);
    let a = ModelParams::half_filled(0.9, 5.0, 8).unwrap();
    let b = ModelParams::half_filled(0.9, 7.0, 8).unwrap();
    let ratio = soliton_mass(&a) / soliton_mass(&b);
    assert!((ratio - (PI * 2.0 / 1.8).exp()).abs() < 1e-12 * ratio);
}

#[test]
fn relativistic_curve_has_invariant_mass() {
    let p = ModelParams::half_filled(eta0(), 8.0, 8).unwrap();
    let ts: Vec<f64> = (0..41).map(|k| 2.0 + 0.1 * k as f64).collect();
    let rel = DispersionCurve::relativistic(&p, &ts);
    assert!(rel.invariant_mass_defect() <= 1e-10 * rel.mass.powi(2));
}

#[test]
fn large_theta_dispersion_is_relativistic() {
    let dev = |theta: f64| {
        let p = ModelParams::half_filled(eta0(), theta, 8).unwrap();
        let ts: Vec<f64> = (0..11)
            .map(|k| theta / 2.0 - 0.5 + 0.1 * k as f64)
            .collect();
        let lat = DispersionCurve::continuum(&p, &ts)
            .unwrap()
            .to_physical(eta0());
        let rel = DispersionCurve::relativistic(&p, &ts);
        lat.samples
            .iter()
            .zip(&rel.samples)
            .map(|(a, b)| {
                ((a.epsilon - b.epsilon) / b.epsilon)
                    .abs()
                    .max(((a.p - b.p) / rel.mass).abs())
            })
            .fold(0.0, f64::max)
    };
    let (d8, d12) = (dev(8.0), dev(12.0));
    let predicted = (-PI * 8.0 / eta0()).exp();
    assert!(d8 < 50.0 * predicted.sqrt(), "{d8}");
    assert!(d12 < d8 * 1e-2, "{d8} {d12}");
}

#[test]
fn vacuum_integrand_limit_and_reality() {
    let eta = eta0();
    assert!((vacuum_kernel(0.0, eta) - (PI - eta) / PI).abs() < 1e-15);
    assert!((vacuum_kernel(1e-6, eta) - (PI - eta) / PI).abs() < 1e-10);
    // direct evaluation agrees where it does not overflow
    let w: f64 = 3.0;
    let direct = (w * (PI - eta) / 2.0).sinh() / ((w * PI / 2.0).sinh() * (w * eta / 2.0).cosh());
    assert!((vacuum_kernel(w, eta) - direct).abs() < 1e-15);
    assert_eq!(vacuum_kernel(2.5, eta), vacuum_kernel(-2.5, eta));
}

#[test]
fn vacuum_integral_matches_residue_series() {
    for &theta in &[1.0, 2.0, 4.0, 6.0] {
        let (q, e) = vacuum_fourier_integral(eta0(), theta, 1e-14).unwrap();
        let r = vacuum_residue_series(eta0(), theta, 60);
        assert!((q - r).abs() < 1e-13, "{theta}: {q} {r} {e}");
    }
    let p = ModelParams::half_filled(eta0(), 4.0, 8).unwrap();
    let v = vacuum_energy_integral(&p, 1e-12).unwrap();
    assert!((v - eta0().sin() / 4.0 * vacuum_residue_series(eta0(), 4.0, 60)).abs() < 1e-12);
}

#[test]
fn vacuum_integral_is_step_stable() {
    let (a, _) = vacuum_fourier_integral(0.9, 3.0, 1e-13).unwrap();
    let (b, _) = vacuum_fourier_integral(0.9, 3.0, 1e-15).unwrap();
    assert!((a - b).abs() <= 1e-12);
}

#[test]
fn pole_term_is_the_calibrated_singular_part() {
    for &theta in &[3.0, 5.0, 8.0] {
        let p = ModelParams::half_filled(eta0(), theta, 8).unwrap();
        let pole = vacuum_energy_pole_term(&p).unwrap();
        let sing = vacuum_energy_singular(&p).unwrap();
        assert!((pole - VACUUM_CALIBRATION * sing).abs() <= 1e-10 * sing.abs());
    }
    let res = ModelParams::half_filled(PI / 2.0, 3.0, 8).unwrap();
    assert!(vacuum_energy_singular(&res).is_err());
}

#[test]
fn mass_exponent_tends_to_one_half() {
    let es: Vec<f64> = (1..20)
        .map(|k| ContinuumConstants::new(PI * (0.5 + 0.025 * k as f64)).mass_exponent)
        .collect();
    assert!(es.windows(2).all(|w| w[1] < w[0]));
    assert!((es.last().unwrap() - 0.5).abs() < 0.03);
}

#[test]
fn finite_lattice_energy_density_approaches_integral() {
    let theta = 2.0;
    let want =
        ground_energy_density(&ModelParams::half_filled(eta0(), theta, 8).unwrap(), 1e-13).unwrap();
    let e = |l: usize| {
        let p = ModelParams::half_filled(eta0(), theta, l).unwrap();
        energy_momentum(&solve_ground_state(&p).unwrap()).unwrap().0 / l as f64
    };
    let (a, b) = (e(256), e(512));
    // leading finite-size correction is 1/L^2
    let extrapolated = (4.0 * b - a) / 3.0;
    assert!(
        (extrapolated - want).abs() < 1e-6 * want.abs(),
        "{extrapolated} {want}"
    );
}

#[test]
fn finite_lattice_holes_follow_continuum_dispersion() {
    let p = ModelParams::half_filled(eta0(), 6.0, 256).unwrap();
    let scan = hole_scan(&p, Default::default()).unwrap();
    let samples: Vec<_> = scan.into_iter().map(|r| r.unwrap()).collect();
    let peak = samples
        .iter()
        .map(|s| hole_dispersion_continuum(s.rapidity, &p).0)
        .fold(0.0, f64::max);
    let worst = samples
        .iter()
        .map(|s| (s.energy - hole_dispersion_continuum(s.rapidity, &p).0).abs())
        .fold(0.0, f64::max);
    assert!(worst / peak <= 0.01, "{}", worst / peak);
}
