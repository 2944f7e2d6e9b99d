use casimir_core::quadrature::Tolerance;
use casimir_core::spectral::{SpectralLine, TabulatedSpectrum};
use casimir_core::{
    overlap_strength, polarizability_from_spectrum, spectral_density, verify_measure_identity,
    SpectralPolarizability, ThermalState,
};
use proptest::prelude::*;

fn lor(a: f64, e: f64, g: f64) -> SpectralPolarizability {
    SpectralPolarizability::lorentzian(a, e, g).unwrap()
}

fn th(beta: f64) -> ThermalState {
    ThermalState::new(beta).unwrap()
}

fn h0(s1: &SpectralPolarizability, s2: &SpectralPolarizability, beta: f64) -> f64 {
    overlap_strength(s1, s2, &th(beta), Tolerance::relative(1e-10))
        .unwrap()
        .h0
}

#[test]
fn overlap_matches_dense_trapezoid() {
    // 10⁶-point trapezoid on a window holding all but ~1e-9 of the integrand
    let (s, beta) = (lor(1.0, 1.0, 0.01), 1.0);
    let value = h0(&s, &s, beta);
    let (lo, hi, n) = (0.0f64, 2.0f64, 1_000_000usize);
    let h = (hi - lo) / n as f64;
    let f = |m: f64| {
        if m == 0.0 {
            return 0.0;
        }
        let d = spectral_density(&s, m * m).unwrap();
        m.powi(4) * d * d / (0.5 * beta * m).sinh().powi(2)
    };
    let mut sum = 0.5 * (f(lo) + f(hi));
    for i in 1..n {
        sum += f(lo + i as f64 * h);
    }
    // the wing beyond m = 2 is smooth; integrate it adaptively
    let tail_est = {
        let q = casimir_core::quadrature::Adaptive::new(Tolerance::relative(1e-10));
        q.integrate_to_infinity(f, hi).unwrap().value
    };
    let trap = std::f64::consts::PI * beta / 2.0 * (sum * h + tail_est);
    assert!(((value - trap) / trap).abs() < 1e-6, "{value} vs {trap}");
}

#[test]
fn overlap_decreases_with_beta_and_vanishes() {
    let s = lor(1.0, 1.0, 0.05);
    let mut prev = f64::INFINITY;
    for &beta in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
        let v = h0(&s, &s, beta);
        assert!(v < prev && v >= 0.0);
        prev = v;
    }
    assert!(prev < 1e-6 * h0(&s, &s, 0.5));
}

#[test]
fn classical_regime_linear_in_temperature() {
    let s = lor(1.0, 1.0, 0.01);
    let base = h0(&s, &s, 1e-2) * 1e-2;
    for &beta in &[1e-3, 2e-3, 5e-3] {
        let v = h0(&s, &s, beta) * beta;
        assert!(((v - base) / base).abs() < 1e-2, "beta={beta}");
    }
}

#[test]
fn quantum_regime_boltzmann_slope() {
    // Narrow lines so the line centre dominates the power-law Lorentzian wings.
    let s = lor(1.0, 1.0, 1e-9);
    let (b1, b2) = (50.0, 60.0);
    let slope = (h0(&s, &s, b2).ln() - h0(&s, &s, b1).ln()) / (b2 - b1);
    assert!(((slope + 1.0) / 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn resonant_over_detuned_grows_as_lines_narrow() {
    let mut prev = 0.0;
    for &g in &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3] {
        let res = h0(&lor(1.0, 1.0, g), &lor(1.0, 1.0, g), 1.0);
        let det = h0(&lor(1.0, 1.0, g), &lor(1.0, 1.5, g), 1.0);
        let ratio = res / det;
        assert!(ratio > prev, "gamma={g}");
        prev = ratio;
    }
    assert!(prev > 1e5);
}

#[test]
fn detuned_suppression_scales_as_width_squared() {
    // A line centre sitting on the partner's wing: H₀ ∝ γ when detuned,
    // ∝ 1/γ when coincident, so the suppression ratio goes as γ².
    let det = |g: f64| h0(&lor(1.0, 1.0, g), &lor(1.0, 5.0, g), 1.0);
    let res = |g: f64| h0(&lor(1.0, 1.0, g), &lor(1.0, 1.0, g), 1.0);
    let r = det(1e-3) / det(1e-4);
    assert!((r / 10.0 - 1.0).abs() < 1e-3, "{r}");
    let s = (det(1e-3) / res(1e-3)) / (det(1e-4) / res(1e-4));
    assert!((s / 100.0 - 1.0).abs() < 1e-3, "{s}");
}

#[test]
fn measure_identity_at_several_energies() {
    for &e in &[0.5, 1.0, 2.0] {
        let r = verify_measure_identity(e, 1e-3 * e).unwrap();
        assert!((r - 1.0).abs() < 1e-2, "E={e}: {r}");
    }
    let coarse = verify_measure_identity(1.0, 1e-3).unwrap();
    let fine = verify_measure_identity(1.0, 5e-4).unwrap();
    assert!((fine - 1.0).abs() <= (coarse - 1.0).abs());
}

#[test]
fn line_sum_and_table_sum_rules() {
    let s = SpectralPolarizability::lines(vec![
        SpectralLine::new(0.4, 1.0, 0.0).unwrap(),
        SpectralLine::new(1.1, 2.0, 0.05).unwrap(),
    ])
    .unwrap();
    let h = polarizability_from_spectrum(&s, 0.0, Tolerance::relative(1e-10)).unwrap();
    assert!((h - 1.5).abs() < 1e-8);
    let t = TabulatedSpectrum::parse("# test\n0.2,0.0\n1.0,1.0\n4.0,0.25\n9.0,0.0\n").unwrap();
    let s = SpectralPolarizability::Tabulated(t.clone());
    let h = polarizability_from_spectrum(&s, 0.0, Tolerance::relative(1e-10)).unwrap();
    assert!((h - t.integral()).abs() < 1e-12);
}

#[test]
fn table_overlap_against_lorentzian_table() {
    // A finely tabulated Lorentzian behaves like the analytic one.
    let s = lor(1.0, 1.0, 0.2);
    let grid: Vec<f64> = (1..=20_000).map(|i| i as f64 * 2e-4).collect();
    let dens: Vec<f64> = grid.iter().map(|&u| spectral_density(&s, u).unwrap()).collect();
    let t = SpectralPolarizability::Tabulated(TabulatedSpectrum::new(grid, dens).unwrap());
    let a = h0(&s, &s, 1.0);
    let b = h0(&t, &t, 1.0);
    assert!(((a - b) / a).abs() < 1e-2, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_nonnegative_and_symmetric(
        e1 in 0.2f64..3.0, e2 in 0.2f64..3.0,
        g1 in 1e-3f64..0.3, g2 in 1e-3f64..0.3,
        beta in 0.1f64..10.0,
    ) {
        let (a, b) = (lor(1.0, e1, g1), lor(0.7, e2, g2));
        let x = h0(&a, &b, beta);
        let y = h0(&b, &a, beta);
        prop_assert!(x >= 0.0);
        prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-300));
    }

    #[test]
    fn density_nonnegative(e in 0.1f64..5.0, g in 1e-4f64..1.0, m2 in 1e-6f64..50.0) {
        prop_assert!(spectral_density(&lor(1.0, e, g), m2).unwrap() >= 0.0);
    }

    #[test]
    fn polarizability_is_decreasing_and_positive(e in 0.2f64..3.0, g in 1e-3f64..0.5, k in 0.0f64..5.0) {
        let s = lor(1.0, e, g);
        let tol = Tolerance::relative(1e-10);
        let a = polarizability_from_spectrum(&s, k, tol).unwrap();
        let b = polarizability_from_spectrum(&s, k + 0.1, tol).unwrap();
        prop_assert!(a > 0.0 && b < a && a <= 1.0 + 1e-9);
    }
}
