use std::f64::consts::PI;

use sinegordon_core::bethe::*;
use sinegordon_core::continuum::ground_density_r;
use sinegordon_core::spectra::*;
use sinegordon_core::vertex::*;
use sinegordon_core::ModelParams;

fn subsets(v: &[f64], k: usize) -> Vec<Vec<f64>> {
    if k == 0 {
        return vec![vec![]];
    }
    if v.len() < k {
        return vec![];
    }
    let mut out: Vec<Vec<f64>> = subsets(&v[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, v[0]);
            s
        })
        .collect();
    out.extend(subsets(&v[1..], k));
    out
}

fn eta0() -> f64 {
    2.0 * PI / 5.0
}

#[test]
fn ground_state_small_chain_solves_exactly() {
    let p = ModelParams::half_filled(eta0(), 1.0, 8).unwrap();
    let s = solve_ground_state(&p).unwrap();
    assert!(s.converged && s.residual <= 1e-12);
    assert!(product_form_residual(&p, &s.roots) <= 1e-10);
    let d = counting_residual(&p, &s.roots, &s.quantum_numbers);
    assert!(d.iter().all(|x| x.abs() <= 1e-12));
}

#[test]
fn single_root_sits_at_origin() {
    let p = ModelParams::new(0.9, 0.0, 8, 1).unwrap();
    let s = solve_ground_state(&p).unwrap();
    assert_eq!(s.quantum_numbers, vec![0.0]);
    assert!(s.roots[0].abs() < 1e-14);
}

#[test]
fn every_real_root_state_is_in_the_ed_spectrum() {
    for m in [3usize, 4] {
        let p = ModelParams::new(eta0(), 1.0, 8, m).unwrap();
        let h = hamiltonian_logderiv(&p).unwrap();
        let spec = diagonalize(&h, &p, DiagMode::Full).unwrap();
        let mut energies = Vec::new();
        for qn in subsets(&vacancies(&p, m), m) {
            if let Ok(s) = solve(&p, &qn, &[], &SolverOptions::default()) {
                energies.push(reference_energy(&p) - energy_momentum(&s).unwrap().0);
            }
        }
        assert!(!energies.is_empty());
        let rep = match_into(&energies, &spec.eigenvalues, 1e-8).unwrap();
        assert!(rep.passed, "M={m}: {}", rep.max_deviation);
    }
}

#[test]
fn reference_energy_is_the_polarized_eigenvalue() {
    for &(eta, theta) in &[(0.7, 1.0), (2.1, 0.3), (eta0(), 4.0)] {
        let p = ModelParams::new(eta, theta, 8, 0).unwrap();
        let h = hamiltonian_logderiv(&p).unwrap();
        assert!((h.element(0, 0).re - reference_energy(&p)).abs() < 1e-12);
    }
}

#[test]
fn momentum_is_conjugate_to_two_site_translation() {
    let p = ModelParams::new(eta0(), 1.0, 8, 3).unwrap();
    let h = hamiltonian_logderiv(&p).unwrap();
    let spec = translation_labels(&h, diagonalize(&h, &p, DiagMode::Full).unwrap()).unwrap();
    let labels = spec.labels.unwrap();
    let mut states = Vec::new();
    for qn in subsets(&vacancies(&p, 3), 3) {
        let s = solve(&p, &qn, &[], &SolverOptions::default()).unwrap();
        let (e, mom) = energy_momentum(&s).unwrap();
        states.push((reference_energy(&p) - e, mom));
    }
    for range in clusters(&spec.eigenvalues, 1e-9) {
        let e = spec.eigenvalues[range.start];
        let mut want: Vec<C64> = states
            .iter()
            .filter(|(x, _)| (x - e).abs() < 1e-8)
            .map(|&(_, mom)| C64::from_polar(1.0, -mom))
            .collect();
        if want.is_empty() {
            continue;
        }
        assert_eq!(want.len(), range.len());
        let mut got: Vec<C64> = labels[range].to_vec();
        let key = |z: &C64| (z.arg() * 1e6).round() as i64;
        want.sort_by_key(key);
        got.sort_by_key(key);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).norm() < 1e-8, "{a} {b}");
        }
    }
}

#[test]
fn reflection_about_half_theta() {
    let p = ModelParams::new(eta0(), 1.3, 16, 7).unwrap();
    let qn = [-3.0, -2.0, 0.0, 1.0, 2.0, 3.0, 4.0];
    let s = solve(&p, &qn, &[], &SolverOptions::default()).unwrap();
    let neg: Vec<f64> = qn.iter().map(|j| -j).collect();
    let r = solve(&p, &neg, &[], &SolverOptions::default()).unwrap();
    let mut mirrored: Vec<f64> = s.roots.iter().map(|t| p.theta - t).collect();
    mirrored.sort_by(f64::total_cmp);
    for (a, b) in mirrored.iter().zip(&r.roots) {
        assert!((a - b).abs() < 1e-9);
    }
    let g = solve_ground_state(&ModelParams::half_filled(eta0(), 1.3, 16).unwrap()).unwrap();
    let mut m: Vec<f64> = g.roots.iter().map(|t| 1.3 - t).collect();
    m.sort_by(f64::total_cmp);
    for (a, b) in m.iter().zip(&g.roots) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn homogeneous_point_collapses_kernels() {
    let p = ModelParams::half_filled(0.8, 0.0, 12).unwrap();
    let s = solve_ground_state(&p).unwrap();
    // with theta = 0 the equations are those of one XXZ chain of L sites
    let k = KernelFunctions::new(0.8);
    for (t, j) in s.roots.iter().zip(&s.quantum_numbers) {
        let scatter: f64 = s.roots.iter().map(|u| k.theta(t - u)).sum();
        let d = 12.0 * k.phi(*t) - 2.0 * PI * j - scatter;
        assert!(d.abs() < 1e-11);
    }
    let (_, mom) = energy_momentum(&s).unwrap();
    assert!(mom.min(2.0 * PI - mom) < 1e-12);
}

#[test]
fn jacobian_matches_finite_differences() {
    let p = ModelParams::half_filled(eta0(), 2.0, 12).unwrap();
    let s = solve_ground_state(&p).unwrap();
    let roots: Vec<f64> = s.roots.iter().map(|t| t + 0.01).collect();
    let jac = jacobian(&p, &roots);
    let d = 1e-6;
    for b in 0..roots.len() {
        let mut up = roots.clone();
        let mut dn = roots.clone();
        up[b] += d;
        dn[b] -= d;
        let fu = counting_residual(&p, &up, &s.quantum_numbers);
        let fd = counting_residual(&p, &dn, &s.quantum_numbers);
        for a in 0..roots.len() {
            let num = (fu[a] - fd[a]) / (2.0 * d);
            assert!((num - jac[(a, b)]).abs() <= 1e-6 * jac[(a, b)].abs().max(1.0));
        }
    }
}

#[test]
fn newton_converges_quadratically() {
    let p = ModelParams::half_filled(eta0(), 3.0, 64).unwrap();
    let s = solve_ground_state(&p).unwrap();
    let h = &s.defect_history;
    assert!(h.len() >= 4, "{h:?}");
    let n = h.len();
    // last three iterates before the roundoff floor
    let tail: Vec<f64> = h.iter().copied().filter(|x| *x > 1e-13).collect();
    let k = tail.len();
    if k >= 3 {
        let r1 = tail[k - 2] / tail[k - 3];
        let r2 = tail[k - 1] / tail[k - 2];
        assert!(r2 < r1 || r2 < 1e-3, "{h:?}");
    }
    assert!(h[n - 1] <= 1e-12 || s.residual <= 1e-11);
}

#[test]
fn energy_is_permutation_invariant() {
    let p = ModelParams::half_filled(eta0(), 1.0, 16).unwrap();
    let mut s = solve_ground_state(&p).unwrap();
    let (e1, p1) = energy_momentum(&s).unwrap();
    s.roots.reverse();
    let (e2, p2) = energy_momentum(&s).unwrap();
    assert_eq!((e1, p1), (e2, p2));
}

#[test]
fn energy_per_site_converges() {
    let mut last = f64::NAN;
    let mut diffs = Vec::new();
    for &l in &[32usize, 64, 128, 256, 512] {
        let p = ModelParams::half_filled(eta0(), 2.0, l).unwrap();
        let s = solve_ground_state(&p).unwrap();
        let e = energy_momentum(&s).unwrap().0 / l as f64;
        if last.is_finite() {
            diffs.push((e - last).abs());
        }
        last = e;
    }
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

#[test]
fn root_density_follows_continuum() {
    let p = ModelParams::half_filled(eta0(), 2.0, 512).unwrap();
    let s = solve_ground_state(&p).unwrap();
    let dens = root_density(&s);
    let peak = dens
        .iter()
        .map(|&(t, _)| ground_density_r(t, &p))
        .fold(0.0, f64::max);
    let worst = dens
        .iter()
        .map(|&(t, r)| (r - ground_density_r(t, &p)).abs())
        .fold(0.0, f64::max);
    assert!(worst / peak <= 0.02, "{}", worst / peak);
}

#[test]
fn hole_states_have_positive_energy() {
    let p = ModelParams::half_filled(eta0(), 3.0, 64).unwrap();
    let scan = hole_scan(&p, Default::default()).unwrap();
    assert!(!scan.is_empty());
    for r in scan {
        let s = r.unwrap();
        assert!(s.energy > 0.0, "{s:?}");
        assert!(s.residual <= 1e-10);
    }
}

#[test]
fn rejects_bad_quantum_numbers() {
    let p = ModelParams::new(eta0(), 1.0, 8, 3).unwrap();
    assert!(solve(&p, &[0.5, 1.0, 2.0], &[], &SolverOptions::default()).is_err());
    assert!(solve(&p, &[0.0, 1.0, 5.0], &[], &SolverOptions::default()).is_err());
    assert!(solve(&p, &[1.0, 1.0, 2.0], &[], &SolverOptions::default()).is_err());
}
