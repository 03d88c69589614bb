use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robust_lingam::rng::stream;
use robust_lingam::scm::generate_random_scm;
use robust_lingam::{CausalOrdering, ConnectionMatrix, DataMatrix, NoiseDistribution, ScmSpec};

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generated_models_are_acyclic(p in 1usize..12, q in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = generate_random_scm(p, q, &NoiseDistribution::student_t(2.0), &mut rng).unwrap();
        prop_assert!(spec.b.permuted(&spec.ordering).is_strictly_lower_triangular());
        prop_assert!(spec.is_consistent_ordering(&spec.ordering));
        for (_, _, w) in spec.b.edges() {
            prop_assert!((0.1..=0.9).contains(&w.abs()));
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 3), 1..20), named in any::<bool>()) {
        let mut d = DataMatrix::from_rows(&rows).unwrap();
        if named {
            d = d.with_names(vec!["a".into(), "b b".into(), "c,d".into()]).unwrap();
        }
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = DataMatrix::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn seeds_determine_models_and_samples() {
    let noise = NoiseDistribution::lognormal();
    let draw = |seed| {
        let mut rng = stream(seed, 3);
        let spec = generate_random_scm(6, 0.5, &noise, &mut rng).unwrap();
        let data = spec.sample(50, &mut rng).unwrap();
        (spec, data)
    };
    assert_eq!(draw(1), draw(1));
    assert_ne!(draw(1).1, draw(2).1);
}

#[test]
fn parent_count_of_last_variable() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let noise = NoiseDistribution::student_t(1.0);
    let reps = 10_000;
    let mut total = 0usize;
    for _ in 0..reps {
        let spec = generate_random_scm(10, 0.5, &noise, &mut rng).unwrap();
        let last = spec.ordering.as_slice()[9];
        total += (0..10).filter(|&j| spec.b.get(last, j) != 0.0).count();
    }
    let mean = total as f64 / reps as f64;
    assert!((mean - 4.5).abs() < 0.1, "{mean}");
}

#[test]
fn orderings_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let noise = NoiseDistribution::exponential();
    let mut counts = std::collections::HashMap::new();
    for _ in 0..6000 {
        let spec = generate_random_scm(3, 0.0, &noise, &mut rng).unwrap();
        *counts.entry(spec.ordering.as_slice().to_vec()).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 6);
    // binomial sd is about 29
    assert!(counts.values().all(|&c| (850..=1150).contains(&c)), "{counts:?}");
}

#[test]
fn independent_columns_have_zero_mean() {
    let spec = ScmSpec::new(
        CausalOrdering::identity(3),
        ConnectionMatrix::zeros(3),
        vec![NoiseDistribution::exponential(); 3],
    )
    .unwrap();
    let d = spec.sample(100_000, &mut stream(21, 0)).unwrap();
    for j in 0..3 {
        let (m, _) = mean_and_se(d.column(j));
        assert!(m.abs() < 0.02, "column {j}: {m}");
    }
}

#[test]
fn chain_slope_is_recovered() {
    let mut b = ConnectionMatrix::zeros(2);
    b.set(1, 0, 0.5);
    let spec = ScmSpec::new(CausalOrdering::identity(2), b, vec![NoiseDistribution::exponential(); 2]).unwrap();
    let d = spec.sample(100_000, &mut stream(22, 0)).unwrap();
    let (x, y) = (d.column(0), d.column(1));
    let (mx, _) = mean_and_se(x);
    let (my, _) = mean_and_se(y);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    assert!((cov / var - 0.5).abs() < 0.02);
}

#[test]
fn noise_centering() {
    let n = 1_000_000;
    for (k, noise) in [
        NoiseDistribution::lognormal(),
        NoiseDistribution::pareto(),
        NoiseDistribution::exponential(),
        NoiseDistribution::student_t(5.0),
    ]
    .iter()
    .enumerate()
    {
        let draws = noise.draw_n(n, &mut stream(31, k as u64));
        let (m, se) = mean_and_se(&draws);
        assert!(m.abs() < 3.0 * se, "{}: mean {m}, se {se}", noise.label());
    }
    let draws = NoiseDistribution::student_t(1.0).draw_n(n, &mut stream(31, 9));
    let positive = draws.iter().filter(|v| **v > 0.0).count() as f64 / n as f64;
    assert!((positive - 0.5).abs() < 0.005);
}

#[test]
fn spec_json_shape() {
    let spec = generate_random_scm(3, 1.0, &NoiseDistribution::pareto(), &mut stream(5, 5)).unwrap();
    let v = serde_json::to_value(&spec).unwrap();
    assert_eq!(v["p"], 3);
    assert_eq!(v["order"].as_array().unwrap().len(), 3);
    assert!(v["order"].as_array().unwrap().iter().all(|i| (1..=3).contains(&i.as_u64().unwrap())));
    assert_eq!(v["noise"][0]["kind"], "pareto");
    let back: ScmSpec = serde_json::from_value(v).unwrap();
    assert_eq!(back, spec);
}
