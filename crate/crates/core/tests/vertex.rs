use std::f64::consts::PI;

use nalgebra::DMatrix;
use sinegordon_core::spectra::{diagonalize, DiagMode};
use sinegordon_core::vertex::*;
use sinegordon_core::ModelParams;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sorted_eigs(m: DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Independent periodic XXZ chain: hop `1/2`, interaction `delta`, with a
/// phase `e^{i phi}` on the hop that crosses the boundary.
fn twisted_xxz(sites: usize, particles: usize, delta: f64, phi: f64) -> Vec<f64> {
    let states: Vec<u64> = (0u64..1 << sites)
        .filter(|s| s.count_ones() as usize == particles)
        .collect();
    let n = states.len();
    let idx = |m: u64| states.iter().position(|&s| s == m).unwrap();
    let mut h = DMatrix::<C64>::zeros(n, n);
    for (col, &s) in states.iter().enumerate() {
        for x in 0..sites {
            let y = (x + 1) % sites;
            let (nx, ny) = ((s >> x) & 1, (s >> y) & 1);
            h[(col, col)] += c(delta * (nx * ny) as f64);
            if ny == 1 && nx == 0 {
                let d = s ^ (1 << x) ^ (1 << y);
                let ph = if y == 0 {
                    C64::from_polar(1.0, phi)
                } else {
                    c(1.0)
                };
                h[(idx(d), col)] += ph * 0.5;
                h[(col, idx(d))] += ph.conj() * 0.5;
            }
        }
    }
    sorted_eigs(h)
}

#[test]
fn local_and_logderiv_hamiltonians_reconcile_on_grid() {
    let mut conventions = Vec::new();
    for &l in &[4usize, 6, 8] {
        for &eta in &[0.5, 2.0 * PI / 5.0, 2.0] {
            for &theta in &[0.5, 1.0, 2.0] {
                let p = ModelParams::half_filled(eta, theta, l).unwrap();
                let conv = reconcile(&p).unwrap();
                assert!(
                    conv.residual <= 1e-9,
                    "{l} {eta} {theta}: {}",
                    conv.residual
                );
                conventions.push(conv);
            }
        }
    }
    for conv in &conventions {
        assert!((conv.sigma - 2.0).abs() < 1e-10, "{}", conv.sigma);
        assert!(conv.shift.abs() < 1e-10, "{}", conv.shift);
    }
}

#[test]
fn reconciliation_holds_in_every_sector() {
    // M = 0 and M = L are one-dimensional: the scale is not identifiable.
    for m in 1..6 {
        let p = ModelParams::new(0.9, 1.3, 6, m).unwrap();
        let conv = reconcile(&p).unwrap();
        assert!((conv.sigma - 2.0).abs() < 1e-10 && conv.shift.abs() < 1e-10);
        assert!(conv.residual < 1e-9);
    }
}

#[test]
fn logderiv_is_hermitian() {
    for &l in &[4usize, 6] {
        for &eta in &[0.5, PI / 2.0, 2.0] {
            for &theta in &[0.5, 2.0] {
                let p = ModelParams::half_filled(eta, theta, l).unwrap();
                let (h, d) = hamiltonian_logderiv_unchecked(&p, Default::default()).unwrap();
                assert!(
                    d.hermiticity_residual <= 1e-10,
                    "{}",
                    d.hermiticity_residual
                );
                assert!(h.hermiticity_residual() <= 1e-10);
            }
        }
    }
}

#[test]
fn homogeneous_point_is_an_xxz_chain() {
    for &l in &[6usize, 8, 10] {
        let eta = 0.8;
        let p = ModelParams::half_filled(eta, 0.0, l).unwrap();
        let h = hamiltonian_logderiv(&p).unwrap();
        let got = sorted_eigs(h.to_dense().into_owned());
        let reference = twisted_xxz(l, l / 2, eta.cos(), 0.0);
        // eigenvalues of H = sigma H_xxz + shift, sigma > 0
        let n = got.len() as f64;
        let (mx, my) = (
            reference.iter().sum::<f64>() / n,
            got.iter().sum::<f64>() / n,
        );
        let sxy: f64 = reference
            .iter()
            .zip(&got)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum();
        let sxx: f64 = reference.iter().map(|x| (x - mx).powi(2)).sum();
        let sigma = sxy / sxx;
        let shift = my - sigma * mx;
        let worst = reference
            .iter()
            .zip(&got)
            .map(|(x, y)| (sigma * x + shift - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "L={l}: {worst}");
        assert!((sigma - 2.0).abs() < 1e-10, "{sigma}");
    }
}

#[test]
fn local_hamiltonian_is_three_site_local() {
    let p = ModelParams::half_filled(0.7, 1.0, 8).unwrap();
    let h = hamiltonian_local(&p).unwrap();
    let b = h.basis().clone();
    let l = p.sites;
    for (r, col, _) in h.triplets(1e-14) {
        let diff = b.state(r) ^ b.state(col);
        let inside = (0..l).any(|i| {
            let window = (1u64 << i) | (1u64 << ((i + 1) % l)) | (1u64 << ((i + 2) % l));
            diff & !window == 0
        });
        assert!(inside, "{:b} -> {:b}", b.state(col), b.state(r));
    }
}

#[test]
fn two_site_translation_commutes() {
    let p = ModelParams::half_filled(0.7, 1.0, 8).unwrap();
    let h = hamiltonian_local(&p).unwrap();
    let t2 = translation(h.basis().clone(), 2);
    assert!(h.commutator_norm(&t2) <= 1e-10);
}

#[test]
fn large_theta_approaches_decoupled_limit() {
    let p = ModelParams::half_filled(0.7, 12.0, 6).unwrap();
    let h = hamiltonian_logderiv(&p).unwrap();
    let h0 = hamiltonian_h0(&p).unwrap();
    let shifted = h.combine(c(1.0), &h, c(0.0), c(-decoupled_shift(&p)));
    let rel = shifted.distance(&h0) / h0.frobenius_norm();
    assert!(rel <= 1e-4, "{rel}");
    assert!(rel <= 20.0 * (-12.0f64).exp(), "{rel}");
}

#[test]
fn decoupled_hamiltonian_conserves_sublattice_numbers() {
    let p = ModelParams::new(1.1, 0.0, 8, 3).unwrap();
    let h0 = hamiltonian_h0(&p).unwrap();
    for parity in 0..2 {
        let n = sublattice_number(h0.basis().clone(), parity);
        assert!(h0.commutator_norm(&n) <= 1e-12);
    }
}

#[test]
fn decoupled_spectrum_is_union_of_twisted_chains() {
    let l = 8;
    for &eta in &[0.7, PI / 2.0] {
        for m in 0..=l {
            let p = ModelParams::new(eta, 0.0, l, m).unwrap();
            let h0 = hamiltonian_h0(&p).unwrap();
            let got = diagonalize(&h0, &p, DiagMode::Full).unwrap().eigenvalues;
            let mut union = Vec::new();
            for n1 in 0..=m.min(l / 2) {
                let n2 = m - n1;
                if n2 > l / 2 {
                    continue;
                }
                let (phi1, phi2) = decoupled_twists(eta, l, n1, n2);
                let e1 = twisted_xxz(l / 2, n1, eta.cos(), phi1);
                let e2 = twisted_xxz(l / 2, n2, eta.cos(), phi2);
                for a in &e1 {
                    for b in &e2 {
                        union.push(a + b);
                    }
                }
            }
            union.sort_by(f64::total_cmp);
            assert_eq!(union.len(), got.len());
            let worst = union
                .iter()
                .zip(&got)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-10, "eta={eta} M={m}: {worst}");
        }
    }
}

#[test]
fn phase_string_removes_bulk_interchain_phases() {
    let l = 8;
    for m in 0..=l {
        let p = ModelParams::new(0.7, 0.0, l, m).unwrap();
        let u = decoupling_transform(&p).unwrap();
        let b = u.basis().clone();
        for i in 0..b.dim() {
            assert!((u.element(i, i).norm() - 1.0).abs() < 1e-15);
        }
        let ht = conjugate_diagonal(&u, &hamiltonian_h0(&p).unwrap());
        for (r, col, v) in ht.triplets(1e-14) {
            let diff = b.state(r) ^ b.state(col);
            if diff == 0 {
                continue;
            }
            let lo = diff.trailing_zeros() as usize;
            let hi = 63 - diff.leading_zeros() as usize;
            if hi - lo == 2 {
                assert!((v - c(0.5)).norm() <= 1e-12, "bulk hop {v}");
            }
        }
    }
}

#[test]
fn first_order_matches_interaction_on_matched_hops() {
    let eta: f64 = 0.7;
    let amp = 2.0 * eta.sin().powi(2);
    let p = ModelParams::half_filled(eta, 0.0, 6).unwrap();
    let v = extract_first_order(&p, 10.0, 12.0).unwrap();
    let b = v.basis().clone();
    let mut matched = 0;
    for (r, col, x) in v.triplets(1e-7) {
        let diff = b.state(r) ^ b.state(col);
        if diff == 0 {
            continue;
        }
        let lo = diff.trailing_zeros() as usize;
        let hi = 63 - diff.leading_zeros() as usize;
        let a = if hi - lo == 1 { lo } else { hi };
        if is_matched_hop(b.state(col), a, 6) {
            matched += 1;
            assert!((x - c(amp)).norm() / amp <= 1e-6, "{x}");
        }
    }
    assert!(matched > 0);
    let complete = interaction_first_order_complete(&p).unwrap();
    let rel = v.distance(&complete) / complete.frobenius_norm();
    assert!(rel <= 1e-6, "{rel}");
}

#[test]
fn remainder_after_first_order_is_second_order() {
    let p = ModelParams::half_filled(0.9, 0.0, 6).unwrap();
    let h0 = hamiltonian_h0(&p).unwrap();
    let v = interaction_first_order_complete(&p).unwrap();
    let shift = decoupled_shift(&p);
    let rest = |theta: f64| {
        let q = p.with_theta(theta).unwrap();
        let h = hamiltonian_logderiv(&q).unwrap();
        let approx = h0.combine(c(1.0), &v, c(q.coupling()), c(shift));
        h.distance(&approx)
    };
    let (r8, r10, r12) = (rest(8.0), rest(10.0), rest(12.0));
    let s1 = (r8 / r10).ln() / 2.0;
    let s2 = (r10 / r12).ln() / 2.0;
    assert!(
        (s1 - 2.0).abs() < 0.05 && (s2 - 2.0).abs() < 0.1,
        "{s1} {s2}"
    );
}

#[test]
fn interaction_has_uniform_amplitude_and_moves_one_particle() {
    let p = ModelParams::new(0.7, 3.0, 8, 4).unwrap();
    let v = interaction_first_order(&p).unwrap();
    let b = v.basis().clone();
    let amp = 2.0 * 0.7f64.sin().powi(2) * (-3.0f64).exp();
    let even: u64 = 0x55;
    for (r, col, x) in v.triplets(0.0) {
        assert!((x.norm() - amp).abs() < 1e-15);
        let de =
            (b.state(r) & even).count_ones() as i64 - (b.state(col) & even).count_ones() as i64;
        assert_eq!(de.abs(), 1);
    }
}
