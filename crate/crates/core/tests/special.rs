use proptest::prelude::*;
use sinf::pointproc::det_correlation;
use sinf::special::{
    geometric_panels, l_kernel, q_of_z, resolvent_check, sine_kernel, whittaker_w, GridSpec, SpectralParam, WhittakerKernel,
};

/// `W'' = (1/4 − κ/x + (μ² − 1/4)/x²) W`.
fn coefficient(kappa: f64, mu_sq: f64, x: f64) -> f64 {
    0.25 - kappa / x + (mu_sq - 0.25) / (x * x)
}

/// Large-x expansion `x^κ e^{−x/2} Σ_k Π_{j<k} ((1/2 − κ + j)² − μ²) / (k! (−x)^k)`.
fn asymptotic(kappa: f64, mu_sq: f64, x: f64) -> (f64, f64) {
    let (mut term, mut sum, mut dsum) = (1.0, 1.0, 0.0);
    for k in 1..40 {
        let j = (k - 1) as f64;
        term *= ((0.5 - kappa + j).powi(2) - mu_sq) / (k as f64 * -x);
        sum += term;
        dsum += -(k as f64) * term / x;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    let lead = x.powf(kappa) * (-x / 2.0).exp();
    (lead * sum, lead * (dsum + (kappa / x - 0.5) * sum))
}

/// Classical RK4 integration of the Whittaker equation from x = 60 down to `x`.
fn rk4_oracle(kappa: f64, mu_sq: f64, x: f64) -> f64 {
    let (mut w, mut dw) = asymptotic(kappa, mu_sq, 60.0);
    let steps = 200_000;
    let h = -(60.0 - x) / steps as f64;
    let mut s = 60.0;
    let f = |s: f64, w: f64, dw: f64| (dw, coefficient(kappa, mu_sq, s) * w);
    for _ in 0..steps {
        let (k1a, k1b) = f(s, w, dw);
        let (k2a, k2b) = f(s + h / 2.0, w + h / 2.0 * k1a, dw + h / 2.0 * k1b);
        let (k3a, k3b) = f(s + h / 2.0, w + h / 2.0 * k2a, dw + h / 2.0 * k2b);
        let (k4a, k4b) = f(s + h, w + h * k3a, dw + h * k3b);
        w += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        dw += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        s += h;
    }
    w
}

#[test]
fn agrees_with_independent_rk4() {
    for &(kappa, mu_sq) in &[(0.3, -0.04), (-0.3, -0.04), (1.2, -2.5), (-2.0, 0.7), (0.0, 1.44), (2.5, -6.0)] {
        for &x in &[0.7, 2.0, 5.0, 12.0, 25.0] {
            let w = whittaker_w(kappa, mu_sq, x).unwrap();
            let o = rk4_oracle(kappa, mu_sq, x);
            // relative to the envelope, since W may sit near a zero
            let scale = o.abs().max(x.powf(kappa) * (-x / 2.0).exp() * 1e-3);
            assert!((w - o).abs() < 1e-5 * scale, "κ = {kappa}, μ² = {mu_sq}, x = {x}: {w} vs {o}");
        }
    }
}

#[test]
fn approaches_the_leading_asymptotic() {
    let (kappa, mu_sq) = (0.7, -1.3);
    let c1 = (0.5 - kappa) * (0.5 - kappa) - mu_sq;
    for &x in &[40.0, 80.0, 160.0] {
        let ratio = whittaker_w(kappa, mu_sq, x).unwrap() / (x.powf(kappa) * (-x / 2.0).exp());
        // first correction is −c1/x
        assert!((ratio - 1.0 + c1 / x).abs() < 10.0 / (x * x), "x = {x}: {ratio}");
    }
}

#[test]
fn q_examples_and_symmetries() {
    let half = q_of_z(SpectralParam::new(0.5, 0.0).unwrap()).unwrap().value();
    assert!((half - (-std::f64::consts::PI.powi(2)).exp()).abs() < 1e-15);
    for &(a, b) in &[(0.3, 0.2), (-1.7, 0.9), (2.2, -0.4)] {
        let base = q_of_z(SpectralParam::new(a, b).unwrap()).unwrap().value();
        assert!(base > 0.0 && base < 1.0);
        for (c, d) in [(a, -b), (-a, b), (a + 1.0, b), (a - 3.0, b)] {
            let other = q_of_z(SpectralParam::new(c, d).unwrap()).unwrap().value();
            assert!((other - base).abs() < 1e-12 * base, "{c}+{d}i");
        }
    }
    assert!(q_of_z(SpectralParam::new(2.0, 0.0).unwrap()).is_err());
}

#[test]
fn sine_kernel_values() {
    assert_eq!(sine_kernel(0.3, 0.3), 1.0);
    for k in 1..5 {
        assert!(sine_kernel(0.2 + k as f64, 0.2).abs() < 1e-15);
    }
    assert!((sine_kernel(0.5, 0.0) - 2.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn first_moments_of_the_diagonal() {
    // ∫ |x| K(x,x) dx = |z|² and ∫ x|x| K(x,x) dx = 2 Re z |z|² for the lifted process
    let z = SpectralParam::new(0.3, 0.2).unwrap();
    let kernel = WhittakerKernel::new(z).unwrap();
    let (nodes, weights) = geometric_panels(1e-12, 80.0, 60, 8).unwrap();
    let pos = kernel.diagonal_many(&nodes).unwrap();
    let neg_nodes: Vec<f64> = nodes.iter().map(|x| -x).collect();
    let neg = kernel.diagonal_many(&neg_nodes).unwrap();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in 0..nodes.len() {
        m1 += weights[i] * nodes[i] * (pos[i] + neg[i]);
        m2 += weights[i] * nodes[i] * nodes[i] * (pos[i] - neg[i]);
    }
    assert!((m1 - z.t()).abs() < 1e-8, "{m1}");
    assert!((m2 - 2.0 * 0.3 * z.t()).abs() < 1e-8, "{m2}");
}

#[test]
fn resolvent_deviation_shrinks_with_refinement() {
    let z = SpectralParam::new(-0.2, 0.4).unwrap();
    let a = resolvent_check(z, &GridSpec::with_nodes(160), (0.1, 5.0)).unwrap();
    let b = resolvent_check(z, &GridSpec::with_nodes(320), (0.1, 5.0)).unwrap();
    assert!(b.deviation < a.deviation / 2.0, "{} → {}", a.deviation, b.deviation);
    assert!(resolvent_check(SpectralParam::new(0.6, 0.0).unwrap(), &GridSpec::default(), (0.1, 5.0)).is_err());
}

fn point() -> impl Strategy<Value = f64> {
    (0.05f64..6.0, any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

fn strip_z() -> impl Strategy<Value = SpectralParam> {
    (-0.45f64..0.45, 0.05f64..2.0).prop_map(|(a, b)| SpectralParam::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn satisfies_the_whittaker_equation(kappa in -3.0f64..3.0, mu_sq in -9.0f64..9.0, x in 0.5f64..40.0) {
        let abs_coef = 0.25 + kappa.abs() / x + (mu_sq - 0.25).abs() / (x * x);
        let h = (2e-5 / abs_coef).sqrt().min(0.01 * x);
        let w = |s: f64| whittaker_w(kappa, mu_sq, s).unwrap();
        let (a, b, c) = (w(x - h), w(x), w(x + h));
        let residual = (a - 2.0 * b + c) / (h * h) - coefficient(kappa, mu_sq, x) * b;
        let scale = abs_coef * a.abs().max(b.abs()).max(c.abs());
        prop_assert!(residual.abs() < 1e-4 * scale, "residual {residual:e}, scale {scale:e}");
    }

    #[test]
    fn closed_form_family(mu in 0.0f64..3.0, x in 0.01f64..50.0) {
        let w = whittaker_w(mu + 0.5, mu * mu, x).unwrap();
        let exact = x.powf(mu + 0.5) * (-x / 2.0).exp();
        prop_assert!((w - exact).abs() < 1e-9 * exact, "{w} vs {exact}");
    }

    #[test]
    fn kernel_is_j_symmetric_and_real(z in strip_z(), x in point(), y in point()) {
        let k = WhittakerKernel::new(z).unwrap();
        let (kxy, kyx) = (k.eval(x, y).unwrap(), k.eval(y, x).unwrap());
        prop_assert!(kxy.is_finite());
        prop_assert!((kxy - x.signum() * y.signum() * kyx).abs() <= 1e-10 * kxy.abs().max(1e-3));
    }

    #[test]
    fn gauge_leaves_minors_unchanged(z in strip_z(), pts in prop::collection::vec(point(), 4), phis in prop::collection::vec(0.2f64..5.0, 4)) {
        let mut pts = pts;
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(pts.len() == 4);
        let k = WhittakerKernel::new(z).unwrap();
        let phi = |x: f64| phis[pts.iter().position(|&p| p == x).unwrap()];
        let plain = det_correlation(|x, y| k.eval(x, y).unwrap(), &pts).unwrap();
        let gauged = det_correlation(|x, y| phi(x) * k.eval(x, y).unwrap() / phi(y), &pts).unwrap();
        prop_assert!((plain - gauged).abs() <= 1e-10 * plain.abs().max(1e-12));
    }

    #[test]
    fn minors_are_nonnegative_in_the_strip(z in strip_z(), pts in prop::collection::vec(point(), 1..4)) {
        let mut pts = pts;
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let k = WhittakerKernel::new(z).unwrap();
        prop_assert!(det_correlation(|x, y| k.eval(x, y).unwrap(), &pts).unwrap() >= -1e-10);
    }

    #[test]
    fn q_formulas_agree(a in -3.0f64..3.0, b in 0.1f64..3.0, neg in any::<bool>()) {
        let v = q_of_z(SpectralParam::new(a, if neg { -b } else { b }).unwrap()).unwrap();
        prop_assert!(v.discrepancy().unwrap() < 1e-10);
    }

    #[test]
    fn l_kernel_reflects_under_negation(z in strip_z(), x in 0.05f64..6.0, y in 0.05f64..6.0) {
        let neg = SpectralParam::new(-z.a, -z.b).unwrap();
        let a = l_kernel(z, x, -y).unwrap();
        let b = l_kernel(neg, y, -x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
        prop_assert!(l_kernel(z, -x, y).is_err());
    }
}
