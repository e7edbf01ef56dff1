use std::sync::Arc;

use latqma::autocorr::{apply_shift, autocorr_h, circuit_probability, ShiftVector};
use latqma::lattice::{GridSpec, Lattice, LatticeGrid};
use latqma::witness::{
    build_adversarial_witness, build_honest_witness, default_cutoff, AdversarialKind,
    QuantumWitness,
};
use proptest::prelude::*;

fn grid() -> Arc<LatticeGrid> {
    let l = Lattice::from_integer_rows(&[vec![15, 4], vec![-3, 14]], 1).unwrap();
    Arc::new(LatticeGrid::new(l, GridSpec::new(6, 1)).unwrap())
}

fn witnesses(g: &Arc<LatticeGrid>) -> Vec<QuantumWitness> {
    let c = default_cutoff(2);
    let honest = build_honest_witness(g, c).unwrap();
    let phase = build_adversarial_witness(&AdversarialKind::RandomPhase { seed: 8 }, g, c).unwrap();
    let wide =
        build_adversarial_witness(&AdversarialKind::WrongWidth { gamma: 1.3 }, g, c).unwrap();
    let mix = QuantumWitness::mixture(&[(0.5, &honest), (0.5, &phase)]).unwrap();
    vec![honest, phase, wide, mix]
}

fn shift() -> impl Strategy<Value = ShiftVector> {
    (0u32..64, 0u32..64).prop_map(|(a, b)| ShiftVector::new(vec![a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circuit_equals_formula(x in shift()) {
        let g = grid();
        for w in witnesses(&g) {
            let p = circuit_probability(&w, &x).unwrap();
            let h = autocorr_h(&w, &x).unwrap();
            prop_assert!((p - (1.0 - h) / 2.0).abs() <= 1e-10);
            prop_assert!(h.abs() <= 1.0 + 1e-9);
            prop_assert!((h - autocorr_h(&w, &g.neg(&x)).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn shifts_form_a_group_action(x in shift(), y in shift()) {
        let g = grid();
        let w = build_adversarial_witness(&AdversarialKind::RandomPhase { seed: 1 }, &g, 3.0).unwrap();
        let s = w.state().unwrap();
        let lhs = apply_shift(&g, &apply_shift(&g, s, &y).unwrap(), &x).unwrap();
        let rhs = apply_shift(&g, s, &g.add(&x, &y)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn periodic_in_the_lattice(x in shift(), k in -3i64..=3, l in -3i64..=3) {
        // x + k v_1 + l v_2 has the same grid point, and h only depends on it
        let g = grid();
        let c = g.short_coeffs(&x).unwrap();
        let moved = g.from_signed(&[c[0] + k * 64, c[1] + l * 64]);
        prop_assert_eq!(&moved, &x);
        let w = &witnesses(&g)[0];
        prop_assert_eq!(autocorr_h(w, &moved).unwrap(), autocorr_h(w, &x).unwrap());
    }
}
