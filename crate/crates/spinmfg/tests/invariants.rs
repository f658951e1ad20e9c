//! Property-based invariants: defining ODEs under finite differences,
//! symmetry of the consistency function, value/rate ranges, and the shape
//! facts (monotonicity in T, concavity/convexity in m) that make the root
//! enumeration exhaustive.

use proptest::prelude::*;
use spinmfg::equilibrium::{find_equilibria, EquilibriumClass, DEFAULT_GRID, DEFAULT_TOL};
use spinmfg::mfg::{
    conditional_mean, consistency_f, optimal_rate, value_function, z_gap,
};
use spinmfg::params::{LocalField, ModelParams, SpinState, TerminalMean};

const FD_H: f64 = 1e-4;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.05f64..=1.0, 0.1f64..=10.0, -1.0f64..=1.0)
        .prop_map(|(eps, t, m0)| ModelParams::new(t, eps, m0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// d/dt z = (1/2) z |z| under a centered difference, O(h^2).
    #[test]
    fn z_gap_solves_its_ode(p in params_strategy(), m in -1.0f64..=1.0, u in 0.05f64..=0.95) {
        let m = TerminalMean(m);
        let t = u * p.horizon;
        let (t0, t1) = (t - FD_H.min(0.4 * t), t + FD_H.min(0.4 * t));
        for y in LocalField::BOTH {
            let z = z_gap(t, y, m, &p).unwrap();
            let fd = (z_gap(t1, y, m, &p).unwrap() - z_gap(t0, y, m, &p).unwrap()) / (t1 - t0);
            prop_assert!((fd - 0.5 * z * z.abs()).abs() < 1e-5);
        }
    }

    /// d/dt m(t,y) = -m(t,y) |z| + z under a centered difference.
    #[test]
    fn conditional_mean_solves_kolmogorov(p in params_strategy(), m in -1.0f64..=1.0, u in 0.05f64..=0.95) {
        let m = TerminalMean(m);
        let t = u * p.horizon;
        let (t0, t1) = (t - FD_H.min(0.4 * t), t + FD_H.min(0.4 * t));
        for y in LocalField::BOTH {
            let z = z_gap(t, y, m, &p).unwrap();
            let mt = conditional_mean(t, y, m, &p).unwrap();
            let fd = (conditional_mean(t1, y, m, &p).unwrap()
                - conditional_mean(t0, y, m, &p).unwrap())
                / (t1 - t0);
            prop_assert!((fd - (-mt * z.abs() + z)).abs() < 1e-5);
        }
    }

    /// d/dt V(t,1,y) = ((z)^-)^2 / 2 and d/dt V(t,-1,y) = ((z)^+)^2 / 2.
    #[test]
    fn value_function_solves_its_ode(p in params_strategy(), m in -1.0f64..=1.0, u in 0.05f64..=0.95) {
        let m = TerminalMean(m);
        let t = u * p.horizon;
        let (t0, t1) = (t - FD_H.min(0.4 * t), t + FD_H.min(0.4 * t));
        for y in LocalField::BOTH {
            let z = z_gap(t, y, m, &p).unwrap();
            for (x, expect) in [
                (SpinState::Up, 0.5 * (-z).max(0.0) * (-z).max(0.0)),
                (SpinState::Down, 0.5 * z.max(0.0) * z.max(0.0)),
            ] {
                let fd = (value_function(t1, x, y, m, &p).unwrap()
                    - value_function(t0, x, y, m, &p).unwrap())
                    / (t1 - t0);
                prop_assert!((fd - expect).abs() < 1e-5);
            }
        }
    }

    /// Terminal condition -x(m+y), both branches, exactly.
    #[test]
    fn terminal_values_exact(p in params_strategy(), m in -1.0f64..=1.0) {
        let tm = TerminalMean(m);
        for x in [SpinState::Down, SpinState::Up] {
            for y in LocalField::BOTH {
                let v = value_function(p.horizon, x, y, tm, &p).unwrap();
                prop_assert_eq!(v, -x.value() * (m + y.signed(p.field_strength)));
            }
        }
    }

    /// V(t,-1,y) - V(t,1,y) = z(t,y) to 1e-12.
    #[test]
    fn gap_consistency(p in params_strategy(), m in -1.0f64..=1.0, u in 0.0f64..=1.0) {
        let tm = TerminalMean(m);
        let t = u * p.horizon;
        for y in LocalField::BOTH {
            let gap = value_function(t, SpinState::Down, y, tm, &p).unwrap()
                - value_function(t, SpinState::Up, y, tm, &p).unwrap();
            prop_assert!((gap - z_gap(t, y, tm, &p).unwrap()).abs() < 1e-12);
        }
    }

    /// F(-m, -m0) = -F(m, m0) to 1e-12.
    #[test]
    fn consistency_antisymmetry(p in params_strategy(), m in -1.0f64..=1.0) {
        let mirrored = ModelParams { initial_mean: -p.initial_mean, ..p };
        let a = consistency_f(TerminalMean(-m), &mirrored);
        let b = consistency_f(TerminalMean(m), &p);
        prop_assert!((a + b).abs() < 1e-12);
    }

    /// |m(t,y)| <= 1 and rates are nonnegative everywhere.
    #[test]
    fn ranges(p in params_strategy(), m in -1.0f64..=1.0, u in 0.0f64..=1.0) {
        let tm = TerminalMean(m);
        let t = u * p.horizon;
        for y in LocalField::BOTH {
            prop_assert!(conditional_mean(t, y, tm, &p).unwrap().abs() <= 1.0 + 1e-15);
            for x in [SpinState::Down, SpinState::Up] {
                prop_assert!(optimal_rate(t, x, y, tm, &p).unwrap() >= 0.0);
            }
        }
    }

    /// F restricted to m > eps is strictly increasing in T.
    #[test]
    fn f_increasing_in_horizon_on_polarized_side(
        eps in 0.05f64..=0.95,
        m0 in 0.0f64..=0.9,
        dm in 0.01f64..=0.99,
        t1 in 0.1f64..=8.0,
        dt in 0.05f64..=4.0,
    ) {
        let m = eps + dm * (1.0 - eps);
        let pa = ModelParams::new(t1, eps, m0).unwrap();
        let pb = ModelParams::new(t1 + dt, eps, m0).unwrap();
        prop_assert!(
            consistency_f(TerminalMean(m), &pb) > consistency_f(TerminalMean(m), &pa)
        );
    }

    /// Second differences: concave on (eps, 1], convex on [0, eps] for m0 >= 0.
    #[test]
    fn curvature_signs(eps in 0.2f64..=0.9, m0 in 0.0f64..=0.9, t in 0.2f64..=8.0) {
        let p = ModelParams::new(t, eps, m0).unwrap();
        let f = |m: f64| consistency_f(TerminalMean(m), &p);
        let h = 1e-4;
        // polarized side: concave
        let mut m = eps + 0.1 * (1.0 - eps);
        while m < 1.0 - 2.0 * h {
            let d2 = f(m + h) - 2.0 * f(m) + f(m - h);
            prop_assert!(d2 <= 1e-12, "second difference {d2} at m={m}");
            m += 0.2 * (1.0 - eps);
        }
        // unpolarized side: convex
        let mut m = 0.1 * eps;
        while m < eps - 2.0 * h {
            let d2 = f(m + h) - 2.0 * f(m) + f(m - h);
            prop_assert!(d2 >= -1e-12, "second difference {d2} at m={m}");
            m += 0.2 * eps;
        }
    }
}

// ---- proposition-level count checks on deterministic samples ----

fn count_class(p: &ModelParams, class: EquilibriumClass) -> usize {
    find_equilibria(p, DEFAULT_GRID, DEFAULT_TOL)
        .unwrap()
        .iter()
        .filter(|e| e.class == class && !e.tangent)
        .count()
}

#[test]
fn unique_polarized_coherent_when_field_below_initial_mean() {
    // eps <= m0: one polarized-coherent root at every horizon, -> 1 as T grows
    for (eps, m0) in [(0.2, 0.25), (0.1, 0.3), (0.4, 0.5)] {
        for t in [0.2, 1.0, 4.0, 50.0] {
            let p = ModelParams::new(t, eps, m0).unwrap();
            assert_eq!(count_class(&p, EquilibriumClass::PolarizedCoherent), 1, "({eps},{m0},{t})");
        }
        let p = ModelParams::new(1e4, eps, m0).unwrap();
        let big = find_equilibria(&p, DEFAULT_GRID, DEFAULT_TOL)
            .unwrap()
            .into_iter()
            .filter(|e| e.class == EquilibriumClass::PolarizedCoherent)
            .map(|e| e.m)
            .next()
            .unwrap();
        assert!((big - 1.0).abs() < 1e-2, "limit root {big}");
    }
}

#[test]
fn unique_unpolarized_coherent_when_field_is_large() {
    // eps >= (1+m0)/2: one unpolarized-coherent root at every horizon, -> 0
    for (eps, m0) in [(0.7, 0.25), (0.65, 0.3), (0.9, 0.5)] {
        for t in [0.2, 1.0, 4.0, 50.0] {
            let p = ModelParams::new(t, eps, m0).unwrap();
            assert_eq!(
                count_class(&p, EquilibriumClass::UnpolarizedCoherent),
                1,
                "({eps},{m0},{t})"
            );
        }
        let p = ModelParams::new(1e4, eps, m0).unwrap();
        let small = find_equilibria(&p, DEFAULT_GRID, DEFAULT_TOL)
            .unwrap()
            .into_iter()
            .filter(|e| e.class == EquilibriumClass::UnpolarizedCoherent)
            .map(|e| e.m)
            .next()
            .unwrap();
        assert!(small.abs() < 1e-2, "limit root {small}");
    }
}

#[test]
fn no_unpolarized_incoherent_when_field_is_large() {
    // eps >= (1-m0)/2, m0 > 0: the unpolarized-incoherent class is empty
    for (eps, m0) in [(0.4, 0.25), (0.45, 0.2), (0.3, 0.5)] {
        for t in [0.3, 2.0, 7.0, 14.0] {
            let p = ModelParams::new(t, eps, m0).unwrap();
            assert_eq!(
                count_class(&p, EquilibriumClass::UnpolarizedIncoherent),
                0,
                "({eps},{m0},{t})"
            );
        }
    }
}
