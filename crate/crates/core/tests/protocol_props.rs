use std::collections::BTreeMap;
use std::sync::Arc;

use latqma::autocorr::{circuit_probability, grid_ball};
use latqma::lattice::{
    closest_vector, shortest_vector, DyadicVector, GapThresholds, GridSpec, Instance, Lattice,
    LatticeGrid, Truth,
};
use latqma::protocol::{
    check_reduction, qma_amplified_verify, reduce_svp_to_cvp, run_experiment, sample_ball_grid,
    ExperimentKind, ExperimentParams, Mode, MultiWitness, ProtocolConfig, TestKind,
};
use latqma::witness::{
    build_adversarial_witness, build_honest_witness, default_cutoff, AdversarialKind,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn z2_grid(scale: i64, m: u32) -> Arc<LatticeGrid> {
    let l = Lattice::from_integer_rows(&[vec![scale, 0], vec![0, scale]], 1).unwrap();
    Arc::new(LatticeGrid::new(l, GridSpec::new(m, 1)).unwrap())
}

#[test]
fn ball_sampler_is_uniform() {
    let l = Lattice::from_integer_rows(&[vec![8, 1], vec![-2, 7]], 1).unwrap();
    let g = LatticeGrid::new(l, GridSpec::new(5, 1)).unwrap();
    let radius = 1.5;
    let support = grid_ball(&g, radius);
    assert!(
        support.len() > 20 && support.len() <= 200,
        "{}",
        support.len()
    );
    let mut counts: BTreeMap<_, usize> = support.iter().map(|p| (p.clone(), 0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let draws = 100_000;
    let mut retries = 0;
    for _ in 0..draws {
        let (p, r) = sample_ball_grid(radius, &g, &mut rng).unwrap();
        retries += r;
        *counts
            .get_mut(&p)
            .expect("sample outside the enumerated ball") += 1;
    }
    let expected = draws as f64 / support.len() as f64;
    let chi2: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let q = ChiSquared::new((support.len() - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    assert!(chi2 < q, "chi2 {chi2} above {q}");
    assert!((retries as f64 / draws as f64) <= 10.0);
}

#[test]
fn default_ball_retries_are_small() {
    let g = z2_grid(15, 7);
    let cfg = ProtocolConfig::desk(&g, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let total: usize = (0..2000)
        .map(|_| sample_ball_grid(cfg.ball_radius, &g, &mut rng).unwrap().1)
        .sum();
    assert!(total as f64 / 2000.0 <= 10.0);
}

#[test]
fn product_mean_matches_exact_probability() {
    let g = z2_grid(15, 5);
    let w = Arc::new(
        build_adversarial_witness(
            &AdversarialKind::WrongWidth { gamma: 1.5 },
            &g,
            default_cutoff(2),
        )
        .unwrap(),
    );
    let inst = Instance::new(
        g.lattice().clone(),
        DyadicVector::new(vec![1, 1], 1),
        15.0,
        GapThresholds::desk(2),
    )
    .unwrap();
    let mut cfg = ProtocolConfig::desk(&g, 0);
    cfg.k = 4;
    let multi = MultiWitness::power(w, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let runs = 10_000;
    let diffs: Vec<f64> = (0..runs)
        .map(|_| {
            let rep =
                qma_amplified_verify(&inst, &g, &multi, &cfg, Some(TestKind::Short), &mut rng)
                    .unwrap();
            rep.records[0].value - rep.records[0].expected
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / runs as f64;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt();
    assert!(mean.abs() <= 3.0 * sd / (runs as f64).sqrt());
}

#[test]
fn exact_mode_reports_register_average() {
    let g = z2_grid(15, 5);
    let c = default_cutoff(2);
    let a = Arc::new(build_honest_witness(&g, c).unwrap());
    let b = Arc::new(build_adversarial_witness(&AdversarialKind::LatticeDelta, &g, c).unwrap());
    let inst = Instance::new(
        g.lattice().clone(),
        DyadicVector::new(vec![1, 1], 1),
        15.0,
        GapThresholds::desk(2),
    )
    .unwrap();
    let mut cfg = ProtocolConfig::desk(&g, 0);
    cfg.k = 2;
    cfg.mode = Mode::Exact;
    let multi = MultiWitness::Correlated(vec![
        (0.25, vec![a.clone(), b.clone()]),
        (0.75, vec![b.clone(), b.clone()]),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rep = qma_amplified_verify(&inst, &g, &multi, &cfg, None, &mut rng).unwrap();
    let x = &rep.records[0].descriptor.shift;
    let (pa, pb) = (
        circuit_probability(&a, x).unwrap(),
        circuit_probability(&b, x).unwrap(),
    );
    let want = 0.25 * (pa + pb) / 2.0 + 0.75 * pb;
    assert!((rep.records[0].value - want).abs() < 1e-15);
}

#[test]
fn reduction_examples_on_z2() {
    let l = Lattice::from_integer_rows(&[vec![1, 0], vec![0, 1]], 1).unwrap();
    let red = reduce_svp_to_cvp(&l).unwrap();
    let v = red[0].lattice.combine(&red[0].target.coefficients());
    assert_eq!(v, vec![1.0, 0.0]);
    assert!((closest_vector(&v, &red[0].lattice).unwrap().distance - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_yes_side_on_random_3d(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 3),
        num in 1i64..=4,
    ) {
        let rows: Vec<Vec<i64>> = rows.into_iter().enumerate().map(|(i, mut r)| { r[i] += 6; r }).collect();
        let l = Lattice::from_integer_rows(&rows, 1).unwrap()
            .scaled(&BigRational::new(num.into(), 2.into())).unwrap();
        let lam = shortest_vector(&l).unwrap().length;
        let check = check_reduction(&l, lam).unwrap();
        prop_assert_eq!(check.truth, if lam <= 1.0 { Truth::No } else { Truth::Yes });
        prop_assert!(check.holds);
        for row in &check.rows {
            prop_assert!(row.distance >= lam - 1e-9);
        }
    }
}

#[test]
fn reduction_no_side_uses_odd_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let n = rng.gen_range(2..=4);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rng.gen_range(-2..=2) + if i == j { 5 } else { 0 })
                    .collect()
            })
            .collect();
        let l = Lattice::from_integer_rows(&rows, 1).unwrap();
        let sv = shortest_vector(&l).unwrap();
        let l = l
            .scaled(&BigRational::new(
                1.into(),
                ((sv.length.ceil() as i64) + 1).into(),
            ))
            .unwrap();
        let check = check_reduction(&l, 3.0).unwrap();
        assert_eq!(check.truth, Truth::No);
        assert!(!check.odd_indices.is_empty());
        assert!(check.holds);
    }
}

#[test]
fn soundness_experiment_rejects_cheating_witness() {
    let l = Lattice::from_integer_rows(&[vec![32, 0], vec![0, 32]], 3).unwrap();
    let g = Arc::new(LatticeGrid::new(l.clone(), GridSpec::new(6, 5)).unwrap());
    let inst = Instance::new(
        l,
        DyadicVector::new(vec![1, 0], 5),
        1.0,
        GapThresholds::desk(2),
    )
    .unwrap();
    assert_eq!(inst.truth, Truth::No);
    let mut p = ExperimentParams::new(inst, g, 5);
    p.trials = 100;
    p.force = Some(TestKind::Target);
    let out = run_experiment(ExperimentKind::Soundness, &p).unwrap();
    assert!(!out.accept);
    assert_eq!(out.metric, 1.0);
}

#[test]
fn completeness_experiment_accepts_and_repeats() {
    let g = z2_grid(15, 6);
    let inst = Instance::new(
        g.lattice().clone(),
        DyadicVector::new(vec![1, 1], 1),
        15.0,
        GapThresholds::desk(2),
    )
    .unwrap();
    let mut p = ExperimentParams::new(inst, g, 9);
    p.trials = 100;
    let a = run_experiment(ExperimentKind::Completeness, &p).unwrap();
    let b = run_experiment(ExperimentKind::Completeness, &p).unwrap();
    assert!(a.accept);
    assert_eq!(a.csv, b.csv);
}

#[test]
fn pd_audit_experiment_on_honest_witness() {
    let g = z2_grid(15, 6);
    let inst = Instance::new(
        g.lattice().clone(),
        DyadicVector::new(vec![1, 1], 1),
        15.0,
        GapThresholds::desk(2),
    )
    .unwrap();
    let mut p = ExperimentParams::new(inst, g, 9);
    p.trials = 100;
    p.anomaly = Some(p.grid.from_signed(&[2, 0]));
    let out = run_experiment(ExperimentKind::PdAudit, &p).unwrap();
    assert!(out.accept, "{:?}", out.diagnostics);
    assert!(out
        .csv
        .starts_with("point_coeffs,role,h,mu_target,verdict,det4\n"));
}
