use proptest::prelude::*;
use sinf::pointproc::{
    estimate_correlations, gamma_density, lift, poisson_sample, ray_transform_mass, thoma_to_config, uniform_bins, unlift, Bin,
    BinnedDensity, CorrelationAccumulator, Density, PointConfiguration, Support,
};
use sinf::partitions::{thoma_embed_f64, Partition};
use sinf::rng::from_seed;

#[test]
fn deterministic_configuration_is_counted_exactly() {
    // a fixed configuration has ρ_k(cell) = number of ordered distinct k-tuples in it
    let c = PointConfiguration::new(vec![-0.7, 0.1, 0.15, 0.9]).unwrap();
    let bins = uniform_bins(-1.0, 1.0, 4).unwrap();
    let samples = vec![c.clone(); 10];
    let one = estimate_correlations(&samples, 1, Support::Bins(bins.clone())).unwrap();
    assert_eq!(one.values, vec![1.0, 0.0, 2.0, 1.0]);
    assert!(one.std_errors.iter().all(|&s| s == 0.0));
    let two = estimate_correlations(&samples, 2, Support::Bins(bins.clone())).unwrap();
    // cell (2, 2): the two points 0.1 and 0.15, ordered both ways
    assert_eq!(two.values[2 + 4 * 2], 2.0);
    assert_eq!(two.values[0 + 4 * 2], 2.0);
    assert_eq!(two.values[0], 0.0);
    assert_eq!(two.values.iter().sum::<f64>(), 12.0);
}

#[test]
fn poisson_correlations_factorize() {
    let density = Density::piecewise(vec![0.0, 1.0, 2.0], vec![3.0, 1.5]).unwrap();
    let mut rng = from_seed(4);
    let samples: Vec<PointConfiguration> = (0..40_000).map(|_| poisson_sample(&density, (0.0, 2.0), &mut rng).unwrap()).collect();
    let bins = vec![Bin::new(0.0, 1.0).unwrap(), Bin::new(1.0, 2.0).unwrap()];
    let one = estimate_correlations(&samples, 1, Support::Bins(bins.clone())).unwrap();
    let two = estimate_correlations(&samples, 2, Support::Bins(bins)).unwrap();
    for (i, expect) in [3.0, 1.5].iter().enumerate() {
        assert!((one.values[i] - expect).abs() < 4.0 * one.std_errors[i], "bin {i}: {}", one.values[i]);
    }
    for (cell, expect) in [9.0, 4.5, 4.5, 2.25].iter().enumerate() {
        assert!((two.values[cell] - expect).abs() < 4.0 * two.std_errors[cell], "cell {cell}: {}", two.values[cell]);
    }
}

#[test]
fn accumulators_merge_like_one_stream() {
    let density = Density::piecewise(vec![-1.0, 1.0], vec![2.0]).unwrap();
    let mut rng = from_seed(8);
    let samples: Vec<PointConfiguration> = (0..3000).map(|_| poisson_sample(&density, (-1.0, 1.0), &mut rng).unwrap()).collect();
    let support = Support::Bins(uniform_bins(-1.0, 1.0, 5).unwrap());
    let whole = estimate_correlations(&samples, 2, support.clone()).unwrap();
    let mut parts: Vec<CorrelationAccumulator> = samples
        .chunks(700)
        .map(|chunk| {
            let mut acc = CorrelationAccumulator::new(2, support.clone()).unwrap();
            chunk.iter().for_each(|c| acc.push(c));
            acc
        })
        .collect();
    let mut merged = parts.remove(0);
    for p in &parts {
        merged.merge(p).unwrap();
    }
    let merged = merged.finish(None).unwrap();
    assert_eq!(merged.hits, whole.hits);
    for (a, b) in merged.values.iter().zip(&whole.values) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn lifted_uniform_density_matches_ray_transform() {
    // deterministic one-point process at 1/2: lifted density is γ_t(2x)·2
    let t = 1.7;
    let rho = BinnedDensity::new(vec![Bin::new(0.45, 0.55).unwrap()], vec![10.0]).unwrap();
    let target = Bin::new(0.5, 1.5).unwrap();
    let mass = ray_transform_mass(&rho, t, target, 1e-10).unwrap();
    // direct: ∫_{0.45}^{0.55} 10 P(target.lo ≤ s u < target.hi) du by midpoint rule
    let mut direct = 0.0;
    let m = 2000;
    for i in 0..m {
        let u = 0.45 + (i as f64 + 0.5) * 0.1 / m as f64;
        let k = 4000;
        let (a, b) = (target.lo / u, target.hi / u);
        let p: f64 = (0..k).map(|j| a + (j as f64 + 0.5) * (b - a) / k as f64).map(|s| gamma_density(t, s)).sum::<f64>() * (b - a) / k as f64;
        direct += 10.0 * p * 0.1 / m as f64;
    }
    assert!((mass - direct).abs() < 1e-6, "{mass} vs {direct}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_density_has_unit_mass(t in 0.3f64..6.0) {
        let n = 100_000;
        let mid = |i: usize, lo: f64, hi: f64| lo + (i as f64 + 0.5) * (hi - lo) / n as f64;
        // on [0, 1] substitute s = v^(1/t), which removes the endpoint singularity for t < 1
        let head: f64 = (0..n)
            .map(|i| {
                let s = mid(i, 0.0, 1.0).powf(1.0 / t);
                gamma_density(t, s) * s.powf(1.0 - t) / t
            })
            .sum::<f64>()
            / n as f64;
        let tail: f64 = (0..n).map(|i| gamma_density(t, mid(i, 1.0, 60.0))).sum::<f64>() * 59.0 / n as f64;
        prop_assert!((head + tail - 1.0).abs() < 1e-6, "{}", head + tail);
    }

    #[test]
    fn unlift_inverts_lift_on_thoma_configurations(parts in prop::collection::vec(1u32..10, 1..6), seed in any::<u64>(), t in 0.1f64..4.0) {
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let c = thoma_to_config(&thoma_embed_f64(&Partition::new(parts).unwrap()).unwrap());
        let lifted = lift(&c, t, &mut from_seed(seed)).unwrap();
        let back = unlift(&lifted);
        prop_assert_eq!(back.len(), c.len());
        for (a, b) in back.positions().iter().zip(c.positions()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn counts_are_additive_over_adjacent_bins(pos in prop::collection::vec(-5.0f64..5.0, 0..30), cut in -5.0f64..5.0) {
        let c = PointConfiguration::new(pos).unwrap();
        prop_assert_eq!(c.count_in(-5.0, cut) + c.count_in(cut, 5.0), c.count_in(-5.0, 5.0));
        prop_assert_eq!(c.count_in(-5.0, 5.0), c.len());
    }
}
