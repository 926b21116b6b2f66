use bgn::{
    binarize, cd_train, cd_train_from, cd_update, drift, energy, error_rate, euler_step,
    flip_noise, hebbian_weights, overlap_family, relax, BipolarPattern, IntegratorConfig,
    NoiseSpec, StateVector, TrainConfig, WeightMatrix,
};
use proptest::prelude::*;

fn weights_strategy(max_n: usize, scale: f64) -> impl Strategy<Value = WeightMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-scale..scale, n * (n - 1) / 2).prop_map(move |upper| {
            let mut flat = vec![0.0; n * n];
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            for ((i, j), w) in pairs.zip(upper) {
                flat[i * n + j] = w;
                flat[j * n + i] = w;
            }
            WeightMatrix::from_row_major(n, flat).unwrap()
        })
    })
}

fn with_state(
    max_n: usize,
    scale: f64,
    range: f64,
) -> impl Strategy<Value = (WeightMatrix, StateVector)> {
    weights_strategy(max_n, scale).prop_flat_map(move |w| {
        let n = w.size();
        prop::collection::vec(-range..range, n)
            .prop_map(move |x| (w.clone(), StateVector::new(x).unwrap()))
    })
}

fn pattern_strategy(n: usize) -> impl Strategy<Value = BipolarPattern> {
    prop::collection::vec(prop::bool::ANY, n).prop_map(|bits| {
        BipolarPattern::new(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap()
    })
}

fn perturbed(x: &StateVector, i: usize, eps: f64) -> StateVector {
    let mut v = x.as_slice().to_vec();
    v[i] += eps;
    StateVector::new(v).unwrap()
}

proptest! {
    #[test]
    fn drift_is_negative_energy_gradient((w, x) in with_state(8, 1.0, 2.0)) {
        let eps = 1e-5;
        let d = drift(&x, &w).unwrap();
        for i in 0..x.len() {
            let up = energy(&perturbed(&x, i, eps), &w).unwrap().total;
            let down = energy(&perturbed(&x, i, -eps), &w).unwrap().total;
            let fd = -(up - down) / (2.0 * eps);
            let a = d.as_slice()[i];
            let scale = a.abs().max(fd.abs());
            prop_assume!(scale > 1e-4);
            prop_assert!((a - fd).abs() / scale < 1e-5, "i={} drift={} fd={}", i, a, fd);
        }
    }

    #[test]
    fn energy_never_increases_along_euler((w, x0) in with_state(12, 0.5, 2.0)) {
        let mut x = x0;
        let mut e = energy(&x, &w).unwrap().total;
        for _ in 0..300 {
            x = euler_step(&x, &w, 0.01).unwrap();
            let next = energy(&x, &w).unwrap().total;
            prop_assert!(next <= e + 1e-9, "{} -> {}", e, next);
            e = next;
        }
    }

    #[test]
    fn euler_step_is_pure((w, x) in with_state(6, 1.0, 2.0)) {
        let before = x.clone();
        let a = euler_step(&x, &w, 0.1).unwrap();
        let b = euler_step(&x, &w, 0.1).unwrap();
        prop_assert_eq!(&x, &before);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn uncoupled_relax_lands_on_signs(
        x0 in prop::collection::vec(prop_oneof![-3.0..-0.01f64, 0.01..3.0f64], 1..16)
    ) {
        let n = x0.len();
        let start = StateVector::new(x0.clone()).unwrap();
        let cfg = IntegratorConfig { max_steps: 100_000, convergence_tol: 1e-12, ..Default::default() };
        let r = relax(&start, &WeightMatrix::zeros(n), &cfg).unwrap();
        prop_assert!(r.converged);
        for (v, s) in r.final_state.as_slice().iter().zip(&x0) {
            prop_assert!((v - s.signum()).abs() < 1e-12, "{} from {}", v, s);
        }
    }

    #[test]
    fn flip_noise_is_an_involution(
        p in pattern_strategy(64), k in 0usize..=64, seed in any::<u64>()
    ) {
        let spec = NoiseSpec { flip_count: k, rng_seed: seed };
        let once = flip_noise(&p, &spec).unwrap();
        prop_assert_eq!(flip_noise(&once, &spec).unwrap(), p.clone());
        prop_assert_eq!(error_rate(&p, &once).unwrap(), k as f64 / 64.0);
    }

    #[test]
    fn cd_update_keeps_weights_valid(
        w in weights_strategy(10, 1.0), seed in any::<u64>()
    ) {
        let n = w.size();
        let p = bgn::random_patterns(n, 1, seed).unwrap().remove(0);
        let (next, delta) = cd_update(&w, &p, &TrainConfig::default()).unwrap();
        prop_assert!(delta >= 0.0);
        for i in 0..n {
            prop_assert_eq!(next.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(next.get(i, j), next.get(j, i));
            }
        }
    }

    #[test]
    fn hebbian_keeps_weights_valid(seed in any::<u64>(), p in 1usize..6) {
        let pats = bgn::random_patterns(12, p, seed).unwrap();
        let w = hebbian_weights(&pats, 0.3).unwrap();
        prop_assert!(WeightMatrix::from_row_major(12, w.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn overlap_family_members_distinct(
        shared in 1usize..10, distinct in 1usize..4, p in 2usize..5, spare in 0usize..5
    ) {
        let fam = overlap_family(shared + p * distinct + spare, shared, distinct, p).unwrap();
        for a in 0..p {
            for b in a + 1..p {
                prop_assert_ne!(&fam[a], &fam[b]);
            }
        }
    }
}

fn long_relax() -> IntegratorConfig {
    IntegratorConfig {
        max_steps: 5000,
        ..Default::default()
    }
}

#[test]
fn hebbian_stores_pattern_and_its_inverse() {
    let xi = BipolarPattern::new(vec![1, -1, -1, 1, 1]).unwrap();
    let w = hebbian_weights(std::slice::from_ref(&xi), 1.0).unwrap();
    for start in [xi.clone(), xi.negated()] {
        let r = relax(&StateVector::from(&start), &w, &long_relax()).unwrap();
        assert_eq!(binarize(&r.final_state), start);
    }
}

#[test]
fn cd_is_noop_when_patterns_are_fixed_points() {
    // With zero initial coupling every ±1 vector is stationary.
    let pats = bgn::random_patterns(20, 3, 5).unwrap();
    let cfg = TrainConfig {
        epochs: 4,
        ..Default::default()
    };
    let out = cd_train_from(WeightMatrix::zeros(20), &pats, &cfg).unwrap();
    assert_eq!(out.history, vec![0.0; 4]);
    assert_eq!(out.weights, WeightMatrix::zeros(20));
}

#[test]
fn cd_train_is_deterministic() {
    let pats = overlap_family(16, 8, 2, 3).unwrap();
    let cfg = TrainConfig {
        epochs: 20,
        rng_seed: 99,
        ..Default::default()
    };
    assert_eq!(
        cd_train(&pats, &cfg).unwrap(),
        cd_train(&pats, &cfg).unwrap()
    );
}

#[test]
fn cd_single_pattern_becomes_fixed_point() {
    let p = BipolarPattern::new(vec![1, -1]).unwrap();
    let cfg = TrainConfig {
        epochs: 5000,
        stop_threshold: Some(1e-9),
        ..Default::default()
    };
    let out = cd_train(std::slice::from_ref(&p), &cfg).unwrap();
    let (_, delta) = cd_update(&out.weights, &p, &cfg).unwrap();
    assert!(delta < 1e-6, "{delta}");
}

#[test]
fn cd_convergence_signal_settles_on_overlap_family() {
    let fam = overlap_family(64, 40, 4, 4).unwrap();
    let cfg = TrainConfig {
        epochs: 500,
        ..Default::default()
    };
    let out = cd_train(&fam, &cfg).unwrap();
    let first = out
        .history
        .iter()
        .position(|&d| d < 1e-6)
        .expect("never dropped below 1e-6");
    assert!(out.history[first..].iter().all(|&d| d < 1e-6));
}

/// Rows of a Sylvester Hadamard matrix are mutually orthogonal ±1 vectors.
fn hadamard_rows(order: usize, count: usize) -> Vec<BipolarPattern> {
    (1..=count)
        .map(|r| {
            let values = (0..order)
                .map(|c| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect();
            BipolarPattern::new(values).unwrap()
        })
        .collect()
}

#[test]
fn hebb_and_cd_agree_on_orthogonal_patterns() {
    let n = 32;
    let pats = hadamard_rows(n, 3);
    let hebb = hebbian_weights(&pats, pats.len() as f64 / n as f64).unwrap();
    let cfg = TrainConfig {
        epochs: 100,
        ..Default::default()
    };
    let cd = cd_train_from(hebb.clone(), &pats, &cfg).unwrap().weights;
    for p in &pats {
        let start = StateVector::from(p);
        let by_hebb = binarize(&relax(&start, &hebb, &long_relax()).unwrap().final_state);
        let by_cd = binarize(&relax(&start, &cd, &long_relax()).unwrap().final_state);
        assert_eq!(&by_hebb, p);
        assert_eq!(by_hebb, by_cd);
    }
}
