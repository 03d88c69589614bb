use robust_lingam::harness::{
    benchmark, run_outlier_grid, run_simulation, ExperimentKind, ExperimentReport, OutlierGridSettings,
    SimulationSettings,
};
use robust_lingam::{DiscoveryConfig, NoiseDistribution};

fn methods(labels: &[&str]) -> Vec<DiscoveryConfig> {
    labels.iter().map(|l| DiscoveryConfig::from_label(l).unwrap()).collect()
}

fn settings(p: usize, n: Vec<usize>, q: f64, noise: NoiseDistribution, labels: &[&str], reps: usize) -> SimulationSettings {
    SimulationSettings {
        p,
        sample_sizes: n,
        q,
        noise,
        methods: methods(labels),
        replications: reps,
        master_seed: 20,
    }
}

#[test]
fn bivariate_rates_match_published_regime() {
    // 796 and 789 correct out of 1000 for the two methods
    let s = settings(2, vec![100], 1.0, NoiseDistribution::student_t(5.0), &["ols-kbi", "ts-kbi"], 100);
    let r = run_simulation(&s).unwrap();
    for m in ["ols-kbi", "ts-kbi"] {
        let rate = r.cell(m, 100).unwrap().rate();
        assert!((0.67..=0.92).contains(&rate), "{m}: {rate}");
    }
}

#[test]
fn single_replication_counts() {
    let s = settings(4, vec![20, 40], 0.5, NoiseDistribution::exponential(), &["ts-dcorr", "rm-kbi"], 1);
    let r = run_simulation(&s).unwrap();
    assert_eq!(r.cells.len(), 4);
    assert!(r.cells.iter().all(|c| c.correct + c.failures <= 1 && c.replications == 1));
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let s = settings(5, vec![60], 0.6, NoiseDistribution::student_t(1.0), &["ts-kbi", "ols-dcorr"], 8);
    let a = run_simulation(&s).unwrap().without_timing();
    let b = run_simulation(&s).unwrap().without_timing();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let mut other = s.clone();
    other.master_seed += 1;
    let c = run_simulation(&other).unwrap().without_timing();
    assert_ne!(a.settings, c.settings);
}

fn check_schema(v: &serde_json::Value) {
    let obj = v.as_object().unwrap();
    for key in ["kind", "version", "timestamp", "settings", "cells", "wall_seconds"] {
        assert!(obj.contains_key(key), "missing {key}");
    }
    assert!(v["version"].is_string());
    assert!(chrono::DateTime::parse_from_rfc3339(v["timestamp"].as_str().unwrap()).is_ok());
    for c in v["cells"].as_array().unwrap() {
        assert!(c["method"].is_string());
        for key in ["n", "correct", "failures", "replications"] {
            assert!(c[key].is_u64(), "{key}");
        }
        assert!(c["seconds"].is_f64());
        assert!(c["correct"].as_u64() <= c["replications"].as_u64());
        if let Some(o) = c.get("outlier") {
            assert_eq!(o.as_array().unwrap().len(), 2);
        }
    }
    let back: ExperimentReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(&serde_json::to_value(back).unwrap(), v);
}

#[test]
fn reports_follow_schema() {
    let s = settings(3, vec![30], 1.0, NoiseDistribution::lognormal(), &["ts-kbi", "ts-dcorr"], 2);
    let sim = run_simulation(&s).unwrap();
    assert_eq!(sim.kind, ExperimentKind::Simulation);
    check_schema(&serde_json::to_value(&sim).unwrap());
    let bench = benchmark(&s).unwrap();
    assert_eq!(bench.timing_ratios.len(), 1);
    check_schema(&serde_json::to_value(&bench).unwrap());
    let grid = run_outlier_grid(&OutlierGridSettings::new(50, vec![2], methods(&["ts-dcorr"]), 2, 1)).unwrap();
    check_schema(&serde_json::to_value(&grid).unwrap());
    assert_eq!(serde_json::to_value(&grid).unwrap()["kind"], "outlier_grid");
}

#[test]
fn outlier_grid_edge_cases() {
    let empty = run_outlier_grid(&OutlierGridSettings::new(100, vec![], methods(&["ts-kbi"]), 3, 0)).unwrap();
    assert!(empty.cells.is_empty());
    let small = run_outlier_grid(&OutlierGridSettings::new(200, vec![0, 10], methods(&["ts-kbi"]), 5, 0)).unwrap();
    assert_eq!(small.cells.len(), 16);
    assert!(small.outlier_cell("ts-kbi", [1.0, 1.0]).is_some());
    assert!(small.outlier_cell("ts-kbi", [-1024.0, 1024.0]).is_some());
    assert!(small.to_text_table().contains("ts-kbi"));
}

#[test]
fn distance_correlation_variants_are_faster() {
    let s = settings(
        10,
        vec![300],
        0.5,
        NoiseDistribution::student_t(5.0),
        &["ts-kbi", "ts-dcorr", "ols-kbi", "ols-dcorr"],
        10,
    );
    let r = benchmark(&s).unwrap();
    let total = |measure: &str| -> f64 {
        r.cells.iter().filter(|c| c.method.ends_with(measure)).map(|c| c.seconds).sum()
    };
    assert!(total("-dcorr") < total("-kbi"), "{}", r.to_text_table());
    assert_eq!(r.timing_ratios.len(), 2);
}

#[test]
fn theil_sen_dcorr_scales_subquadratically() {
    let time = |n: usize| {
        let s = settings(3, vec![n], 1.0, NoiseDistribution::student_t(2.0), &["ts-dcorr"], 3);
        benchmark(&s).unwrap().cells[0].seconds
    };
    // alternate and keep the fastest run of each, to damp scheduler noise
    let (mut t1, mut t4) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..3 {
        t1 = t1.min(time(1000));
        t4 = t4.min(time(4000));
    }
    // quadratic growth would give a factor of 16
    assert!(t4 < 12.0 * t1, "{t1} -> {t4}");
}

#[test]
fn invalid_settings_are_rejected() {
    let mut s = settings(3, vec![3], 1.0, NoiseDistribution::exponential(), &["ts-kbi"], 1);
    assert!(run_simulation(&s).is_err());
    s.sample_sizes = vec![10];
    s.replications = 0;
    assert!(run_simulation(&s).is_err());
    assert!(run_outlier_grid(&OutlierGridSettings::new(100, vec![12], vec![], 1, 0)).is_err());
}
