use sinegordon_core::bethe::{solve_ground_state, BetheState};
use sinegordon_core::io::{
    bethe_csv, operator_csv, read_json, read_operator_triplets, series_csv, with_comments,
    write_atomic, write_json,
};
use sinegordon_core::scaling::{Provenance, ScalingSeries};
use sinegordon_core::vertex::hamiltonian_logderiv;
use sinegordon_core::ModelParams;

#[test]
fn operator_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let p = ModelParams::new(1.1, 0.7, 6, 3).unwrap();
    let h = hamiltonian_logderiv(&p).unwrap();
    let (bytes, desc) = operator_csv(&h, &p, "logderiv", 0.0).unwrap();
    assert_eq!(desc.dim, 20);
    let path = dir.path().join("h.csv");
    write_atomic(&path, &with_comments(&["config_hash=abc".into()], bytes)).unwrap();
    let t = read_operator_triplets(&path).unwrap();
    assert_eq!(t.len(), desc.nonzeros);
    for (r, c, v) in t {
        assert_eq!(v, h.element(r, c));
    }
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn bethe_state_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = ModelParams::new(1.2, 1.0, 8, 4).unwrap();
    let s = solve_ground_state(&p).unwrap();
    let path = dir.path().join("nested/state.json");
    write_json(&path, &s).unwrap();
    let back: BetheState = read_json(&path).unwrap();
    assert_eq!(back, s);
    let text = String::from_utf8(bethe_csv(&s).unwrap()).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.lines().next(), Some("index,quantum_number,rapidity"));
}

#[test]
fn series_output_is_byte_stable() {
    let mut s = ScalingSeries::new(1.0, None);
    for k in 0..4 {
        s.push(3.0 + k as f64, 0.1 / (k + 1) as f64, Provenance::Integral);
    }
    assert_eq!(series_csv(&s).unwrap(), series_csv(&s.clone()).unwrap());
    let text = String::from_utf8(series_csv(&s).unwrap()).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .take(3)
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row, vec![s.thetas[1], s.couplings[1], s.values[1]]);
}
