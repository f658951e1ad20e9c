//! Independent-oracle comparisons: the grid-scan root oracle against the
//! bracketing finder, and the full small-N HJB system against the symmetric
//! reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use spinmfg::equilibrium::{brute_force_roots, find_equilibria, DEFAULT_GRID, DEFAULT_TOL};
use spinmfg::hjb::{full_hjb_oracle, solve_hjb, HjbConfig, RateConvention};
use spinmfg::params::{LocalField, ModelParams, SpinState};

fn random_params(rng: &mut impl Rng) -> ModelParams {
    let eps = rng.gen_range(0.02..=1.0);
    let t = 10f64.powf(rng.gen_range(-1.0..1.18)); // ~0.1 .. 15
    let m0 = rng.gen_range(-0.95..0.95);
    ModelParams::new(t, eps, m0).unwrap()
}

#[test]
fn finder_agrees_with_grid_oracle_on_random_triples() {
    let mut rng = ChaCha12Rng::seed_from_u64(20_240_817);
    for i in 0..150 {
        let p = random_params(&mut rng);
        let fine = find_equilibria(&p, DEFAULT_GRID, DEFAULT_TOL).unwrap();
        let brute = brute_force_roots(&p, 1_000_000).unwrap();
        assert_eq!(fine.len(), brute.len(), "triple {i}: count mismatch at {p:?}");
        for (a, b) in fine.iter().zip(&brute) {
            assert!((a.m - b).abs() <= 1e-6, "triple {i}: {} vs {b} at {p:?}", a.m);
        }
    }
}

/// The value table restricted to a single-field population is the exact
/// exchangeable N-player system, so it must match the full 2^n oracle to
/// integration accuracy under either rate convention.
#[test]
fn reduction_matches_full_oracle_for_single_field_populations() {
    let p = ModelParams::new(2.0, 0.42, 0.25).unwrap();
    let steps = 400;
    for convention in [RateConvention::PerspectiveShift, RateConvention::PaperPrinted] {
        // two players, both +eps: table(N=1, neps=1), +eps block
        let oracle = full_hjb_oracle(&[LocalField::Plus, LocalField::Plus], &p, steps).unwrap();
        let cfg = HjbConfig::new(1, 1, steps, convention, p).unwrap();
        let (values, _) = solve_hjb(&cfg).unwrap();
        for k in [0, steps / 2, steps] {
            for st in 0..4usize {
                let x1 = if st & 1 == 1 { SpinState::Up } else { SpinState::Down };
                let np = (st >> 1) & 1;
                let diff = (oracle.get(k, 0, st) - values.get(k, x1, LocalField::Plus, np, 0)).abs();
                assert!(diff < 1e-8, "{convention:?} n=2 k={k} st={st}: {diff:.2e}");
            }
        }
        // three players, all -eps: table(N=2, neps=0), -eps block
        let oracle =
            full_hjb_oracle(&[LocalField::Minus, LocalField::Minus, LocalField::Minus], &p, steps)
                .unwrap();
        let cfg = HjbConfig::new(2, 0, steps, convention, p).unwrap();
        let (values, _) = solve_hjb(&cfg).unwrap();
        for k in [0, steps / 2, steps] {
            for st in 0..8usize {
                let x1 = if st & 1 == 1 { SpinState::Up } else { SpinState::Down };
                let nm = ((st >> 1) & 1) + ((st >> 2) & 1);
                let diff =
                    (oracle.get(k, 0, st) - values.get(k, x1, LocalField::Minus, 0, nm)).abs();
                assert!(diff < 1e-6, "{convention:?} n=3 k={k} st={st}: {diff:.2e}");
            }
        }
        // three players, all +eps: table(N=2, neps=2), +eps block
        let oracle =
            full_hjb_oracle(&[LocalField::Plus, LocalField::Plus, LocalField::Plus], &p, steps)
                .unwrap();
        let cfg = HjbConfig::new(2, 2, steps, convention, p).unwrap();
        let (values, _) = solve_hjb(&cfg).unwrap();
        for k in [0, steps] {
            for st in 0..8usize {
                let x1 = if st & 1 == 1 { SpinState::Up } else { SpinState::Down };
                let np = ((st >> 1) & 1) + ((st >> 2) & 1);
                let diff = (oracle.get(k, 0, st) - values.get(k, x1, LocalField::Plus, np, 0)).abs();
                assert!(diff < 1e-6, "{convention:?} n=3+ k={k} st={st}: {diff:.2e}");
            }
        }
    }
}

/// Mixed-field populations couple tables with different field splits, which
/// the single-table closure only approximates. At N_total = 2 the closure
/// error is O(1) (the whole "population" is a single opposite-field
/// opponent); at N_total = 3 it already shrinks. Measured and recorded, not
/// assumed small.
#[test]
fn mixed_field_closure_deviation_is_small_and_recorded() {
    let p = ModelParams::new(2.0, 0.42, 0.25).unwrap();
    let steps = 400;
    for convention in [RateConvention::PerspectiveShift, RateConvention::PaperPrinted] {
        // two players: (+eps) against one -eps opponent: table(1, 0), +eps block
        let oracle = full_hjb_oracle(&[LocalField::Plus, LocalField::Minus], &p, steps).unwrap();
        let cfg = HjbConfig::new(1, 0, steps, convention, p).unwrap();
        let (values, _) = solve_hjb(&cfg).unwrap();
        let mut dev2 = 0.0f64;
        for st in 0..4usize {
            let x1 = if st & 1 == 1 { SpinState::Up } else { SpinState::Down };
            let nm = (st >> 1) & 1;
            dev2 =
                dev2.max((oracle.get(0, 0, st) - values.get(0, x1, LocalField::Plus, 0, nm)).abs());
        }
        // three players: (+eps) against {+eps, -eps}: table(2, 1), +eps block
        let oracle =
            full_hjb_oracle(&[LocalField::Plus, LocalField::Plus, LocalField::Minus], &p, steps)
                .unwrap();
        let cfg = HjbConfig::new(2, 1, steps, convention, p).unwrap();
        let (values, _) = solve_hjb(&cfg).unwrap();
        let mut dev3 = 0.0f64;
        for st in 0..8usize {
            let x1 = if st & 1 == 1 { SpinState::Up } else { SpinState::Down };
            let np = (st >> 1) & 1;
            let nm = (st >> 2) & 1;
            dev3 = dev3
                .max((oracle.get(0, 0, st) - values.get(0, x1, LocalField::Plus, np, nm)).abs());
        }
        println!(
            "mixed-field closure deviation ({}): N_total=2 {dev2:.3e}, N_total=3 {dev3:.3e}",
            convention.label()
        );
        assert!(dev2 < 2.0 && dev3 < 2.0, "{convention:?}: deviations {dev2} {dev3}");
        assert!(dev3 < dev2, "{convention:?}: closure error should shrink with N");
    }
}

/// The two rate conventions differ by an indicator placement in the opponent
/// feedback arguments. Pointwise, at a fixed population fraction, their
/// tables approach each other as N grows; the sup over all aggregate states
/// does not vanish (the finite-N selection boundary itself moves), which is
/// recorded here rather than assumed away.
#[test]
fn convention_difference_shrinks_with_population_size() {
    let p = ModelParams::new(1.5, 0.45, 0.25).unwrap();
    let tables = |n: usize| {
        let mk = |conv| HjbConfig::new(n, n / 2, 300, conv, p).unwrap();
        let (a, _) = solve_hjb(&mk(RateConvention::PaperPrinted)).unwrap();
        let (b, _) = solve_hjb(&mk(RateConvention::PerspectiveShift)).unwrap();
        (a, b)
    };
    let gap_at = |a: &spinmfg::hjb::ValueTable, b: &spinmfg::hjb::ValueTable, frac: f64| {
        let n = a.config.n_others;
        let np = (frac * (n / 2) as f64).round() as usize;
        let nm = (frac * (n - n / 2) as f64).round() as usize;
        let mut worst = 0.0f64;
        for x in [SpinState::Down, SpinState::Up] {
            for y in LocalField::BOTH {
                worst = worst.max((a.get(0, x, y, np, nm) - b.get(0, x, y, np, nm)).abs());
            }
        }
        worst
    };
    let sup = |a: &spinmfg::hjb::ValueTable, b: &spinmfg::hjb::ValueTable| {
        let n = a.config.n_others;
        let mut worst = 0.0f64;
        for x in [SpinState::Down, SpinState::Up] {
            for y in LocalField::BOTH {
                for np in 0..=n / 2 {
                    for nm in 0..=(n - n / 2) {
                        worst = worst.max((a.get(0, x, y, np, nm) - b.get(0, x, y, np, nm)).abs());
                    }
                }
            }
        }
        worst
    };
    let mut committed = Vec::new();
    for n in [8usize, 16, 32] {
        let (a, b) = tables(n);
        committed.push(gap_at(&a, &b, 0.8));
        println!(
            "convention gap N={n}: committed-state {:.3e}, sup over states {:.3e}",
            committed.last().unwrap(),
            sup(&a, &b)
        );
    }
    assert!(
        committed[1] < committed[0] && committed[2] < committed[1],
        "pointwise gap not shrinking: {committed:?}"
    );
    let slope = (committed[0] / committed[2]).log2() / 2.0;
    assert!(slope > 0.5, "decay per doubling {slope}");
}

/// Single player: the full oracle reduces to the scalar problem with
/// m_N = x, whose value function is explicit.
#[test]
fn single_player_oracle_matches_closed_form() {
    let t_h = 2.3;
    let eps = 0.42;
    let p = ModelParams::new(t_h, eps, 0.0).unwrap();
    let steps = 2_000;
    for field in LocalField::BOTH {
        let oracle = full_hjb_oracle(&[field], &p, steps).unwrap();
        let y = field.signed(eps);
        for k in [0, steps / 3, steps] {
            let t = t_h * k as f64 / steps as f64;
            for (st, x) in [(0usize, -1.0), (1usize, 1.0)] {
                // terminal -x(x + y) = -1 - xy; opposed states keep the
                // Riccati correction 2|y|/(|y|(T-t)+1)
                let aligned = x * y >= 0.0;
                let expect = if aligned {
                    -1.0 - y.abs()
                } else {
                    -1.0 - y.abs() + 2.0 * y.abs() / (y.abs() * (t_h - t) + 1.0)
                };
                let got = oracle.get(k, 0, st);
                assert!((got - expect).abs() < 1e-9, "k={k} x={x} y={y}: {got} vs {expect}");
            }
        }
    }
}
