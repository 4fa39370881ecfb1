use sinf::experiment::{main_theorem_experiment, p2_limit, BinLayout, ExperimentSpec, Route, Tolerances};
use sinf::special::{SpectralParam, WhittakerKernel};

fn spec(z: SpectralParam, route: Route, samples: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec { z, route, samples, seed, bins: BinLayout::default() }
}

#[test]
fn real_parameter_runs_through_the_same_pipeline() {
    let z = SpectralParam::new(0.4, 0.0).unwrap();
    let r = main_theorem_experiment(&spec(z, Route::Growth { n: 400 }, 4000, 77)).unwrap();
    let tol = Tolerances::default();
    assert!(r.failures(&tol).is_empty(), "max {} SE", r.max_sigma(tol.sigma_min_hits));
    let m = r.p2.unwrap();
    assert!((m.mean - p2_limit(z)).abs() < 4.0 * m.std_error());
}

#[test]
fn reruns_are_identical() {
    let z = SpectralParam::new(0.3, 0.2).unwrap();
    let a = main_theorem_experiment(&spec(z, Route::Mixed { xi: 0.98 }, 500, 5)).unwrap();
    let b = main_theorem_experiment(&spec(z, Route::Mixed { xi: 0.98 }, 500, 5)).unwrap();
    assert_eq!(a, b);
    let c = main_theorem_experiment(&spec(z, Route::Mixed { xi: 0.98 }, 500, 6)).unwrap();
    assert_ne!(a.bins, c.bins);
}

#[test]
fn predicted_values_are_bin_averages_of_the_diagonal() {
    let z = SpectralParam::new(0.3, 0.2).unwrap();
    let kernel = WhittakerKernel::new(z).unwrap();
    let r = main_theorem_experiment(&spec(z, Route::Growth { n: 50 }, 64, 1)).unwrap();
    for b in r.bins.iter().filter(|b| b.bin.lo >= 0.5 || b.bin.hi <= -0.5) {
        let (lo, hi) = (b.bin.lo, b.bin.hi);
        // composite Simpson on 16 panels
        let m = 16;
        let h = (hi - lo) / m as f64;
        let k = |i: usize| kernel.eval(lo + i as f64 * h, lo + i as f64 * h).unwrap();
        let simpson = (0..=m).map(|i| k(i) * if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }).sum::<f64>() * h / 3.0 / (hi - lo);
        assert!((b.predicted - simpson).abs() < 1e-6 * simpson, "[{lo}, {hi}): {} vs {simpson}", b.predicted);
    }
}
