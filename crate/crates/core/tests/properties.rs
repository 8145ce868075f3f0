use curvspec::shooting::{energy, integrate_ivp, slope_from_amplitude};
use curvspec::timemap::{Regime, TimeMap};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minkowski_time_map_monotone(lambda in 5.0f64..400.0, xi in 0.01f64..0.5, dx in 0.001f64..0.05) {
        let tm = TimeMap::new(Regime::new(-1.0).unwrap());
        let a = tm.eval(lambda, xi).unwrap().value;
        let b = tm.eval(lambda, xi + dx).unwrap().value;
        let c = tm.eval(lambda * 1.1, xi).unwrap().value;
        prop_assert!(b > a);
        prop_assert!(c < a);
        prop_assert!(a >= xi);
    }

    #[test]
    fn amplitude_round_trip(kappa in prop_oneof![0.2f64..4.0, -4.0f64..-0.2], frac in 0.05f64..0.9) {
        let regime = Regime::new(kappa).unwrap();
        let tm = TimeMap::new(regime);
        // Fraction of the largest admissible amplitude for the unit target.
        let top = if regime.is_euclidean() {
            1.0 / (2.0 * 0.599_070_117_367_796_1 * kappa.sqrt())
        } else {
            0.5 / (-kappa).sqrt()
        };
        let xi = frac * top;
        let lambda = tm.lambda_of_xi(xi, 0.5).unwrap();
        let back = tm.solve_amplitude(lambda, 0.5).unwrap();
        prop_assert!((back - xi).abs() < 1e-8 * xi.max(1.0), "{xi} -> {lambda} -> {back}");
    }

    #[test]
    fn energy_conserved(kappa in prop_oneof![0.2f64..2.0, -2.0f64..-0.2], lambda in 5.0f64..40.0, frac in 0.05f64..0.9) {
        let b = if kappa > 0.0 {
            frac * 3.0
        } else {
            frac / (-kappa).sqrt()
        };
        let traj = integrate_ivp(kappa, lambda, b, 1.0, 1e-11).unwrap();
        let e0 = energy(kappa, lambda, 0.0, b).unwrap();
        prop_assert!(traj.energy_drift() < 1e-8 * e0.abs().max(1.0));
    }

    #[test]
    fn slope_consistent_with_energy(kappa in prop_oneof![0.2f64..2.0, -2.0f64..-0.2], lambda in 2.0f64..50.0, frac in 0.01f64..0.95) {
        let regime = Regime::new(kappa).unwrap();
        let xi = if regime.is_euclidean() {
            frac * regime.amplitude_bound(lambda)
        } else {
            frac
        };
        let b = slope_from_amplitude(kappa, lambda, xi).unwrap();
        let at_wall = energy(kappa, lambda, 0.0, b).unwrap();
        let at_apex = energy(kappa, lambda, xi, 0.0).unwrap();
        prop_assert!((at_wall - at_apex).abs() < 1e-9 * at_apex.abs().max(1.0));
    }
}
