use tcomm_core::{
    inmi, pairwise_matrix, synth_init, synth_run, synth_step, unmi, Measure, SynthConfig,
};

fn cfg(churn: f64, flip: f64, seed: u64) -> SynthConfig {
    SynthConfig {
        churn,
        flip,
        seed,
        ..SynthConfig::default()
    }
}

#[test]
fn network_size_is_constant() {
    for (phi, psi) in [(0.1, 0.1), (0.5, 0.0), (1.0, 1.0), (0.01, 0.3)] {
        let c = cfg(phi, psi, 4);
        let mut s = synth_init(&c).unwrap();
        for _ in 0..30 {
            s = synth_step(s, &c);
            assert_eq!(s.active().len(), 400);
            assert_eq!((0..500).filter(|&i| s.is_active(i)).count(), 400);
            assert!(s.labels().iter().all(|&l| l < 4));
        }
    }
}

#[test]
fn mean_departures_match_churn_rate() {
    let phi = 0.05;
    let c = cfg(phi, 0.01, 12);
    let mut s = synth_init(&c).unwrap();
    let steps = 1_000;
    let mut total = 0usize;
    for _ in 0..steps {
        s = synth_step(s, &c);
        total += s.last_departures();
    }
    let mean = total as f64 / steps as f64;
    let expected = phi * 400.0;
    let se = (400.0 * phi * (1.0 - phi) / steps as f64).sqrt();
    assert!(
        (mean - expected).abs() < 5.0 * se,
        "mean {mean}, expected {expected} +- {se}"
    );
}

#[test]
fn no_churn_means_union_equals_intersection() {
    let run = synth_run(&cfg(0.0, 0.05, 3)).unwrap();
    let u = pairwise_matrix(&run.partitions, Measure::Unmi).unwrap();
    let i = pairwise_matrix(&run.partitions, Measure::Inmi).unwrap();
    assert_eq!(u.values(), i.values());
}

#[test]
fn no_flips_means_unit_inmi() {
    let run = synth_run(&cfg(0.1, 0.0, 3)).unwrap();
    for a in &run.partitions {
        for b in &run.partitions {
            assert!((inmi(a, b).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn frozen_labels_score_high_everywhere() {
    let run = synth_run(&cfg(0.0, 0.001, 9)).unwrap();
    let m = pairwise_matrix(&run.partitions, Measure::Unmi).unwrap();
    assert!(
        m.values().iter().all(|&v| v > 0.8),
        "min {}",
        m.values().iter().copied().fold(1.0, f64::min)
    );
}

#[test]
fn churn_separates_the_measures() {
    let run = synth_run(&cfg(0.1, 0.001, 1)).unwrap();
    let u = pairwise_matrix(&run.partitions, Measure::Unmi)
        .unwrap()
        .off_diagonal_mean()
        .unwrap();
    let i = pairwise_matrix(&run.partitions, Measure::Inmi)
        .unwrap()
        .off_diagonal_mean()
        .unwrap();
    assert!(i > u, "inmi {i} unmi {u}");
    let first_last = unmi(&run.partitions[0], &run.partitions[49]).unwrap();
    assert!(first_last < 0.9);
}
