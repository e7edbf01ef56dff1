use std::sync::Arc;

use latqma::lattice::{closest_vector, GridSpec, Lattice, LatticeGrid};
use latqma::witness::{
    build_adversarial_witness, build_honest_witness, default_cutoff, validate, AdversarialKind,
    QuantumWitness,
};

fn skewed_grid(m: u32) -> Arc<LatticeGrid> {
    let l = Lattice::from_integer_rows(&[vec![15, 4], vec![-3, 14]], 1).unwrap();
    Arc::new(LatticeGrid::new(l, GridSpec::new(m, 1)).unwrap())
}

#[test]
fn honest_support_matches_distance_oracle() {
    let g = skewed_grid(7);
    let cutoff = default_cutoff(2);
    let w = build_honest_witness(&g, cutoff).unwrap();
    let s = w.state().unwrap();
    for i in 0..g.len() {
        let p = g.point(i);
        let d = closest_vector(&g.embed(&p), g.lattice()).unwrap().distance;
        let on = s.amps[i].norm() > 0.0;
        assert_eq!(on, d <= cutoff, "point {p:?} at distance {d}");
    }
}

#[test]
fn honest_is_symmetric_under_negation() {
    let g = skewed_grid(6);
    let w = build_honest_witness(&g, default_cutoff(2)).unwrap();
    for i in 0..g.len() {
        let p = g.point(i);
        let a = w.amplitude(&p);
        let b = w.amplitude(&g.neg(&p));
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn adversaries_validate_and_round_trip() {
    let g = skewed_grid(5);
    let cutoff = default_cutoff(2);
    let kinds = [
        AdversarialKind::HonestForNoInstance,
        AdversarialKind::LatticeDelta,
        AdversarialKind::WrongWidth { gamma: 0.7 },
        AdversarialKind::Shifted {
            shift: g.from_signed(&[2, -1]),
        },
        AdversarialKind::RandomPhase { seed: 4 },
    ];
    for k in &kinds {
        let w = build_adversarial_witness(k, &g, cutoff).unwrap();
        assert!(validate(&w).is_valid(), "{k:?}");
        let back = QuantumWitness::parse(&w.to_text(), g.clone()).unwrap();
        assert_eq!(back.components(), w.components());
    }
    let honest = build_honest_witness(&g, cutoff).unwrap();
    let delta = build_adversarial_witness(&AdversarialKind::LatticeDelta, &g, cutoff).unwrap();
    let mix = QuantumWitness::mixture(&[(0.25, &honest), (0.75, &delta)]).unwrap();
    assert!(validate(&mix).is_valid());
    let back = QuantumWitness::parse(&mix.to_text(), g).unwrap();
    assert_eq!(back.components(), mix.components());
}
