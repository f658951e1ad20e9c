//! Closed forms of the mean field game for a fixed candidate terminal mean m.
//!
//! For fixed m the representative player's problem decouples per field value y
//! and everything is explicit: the HJB gap z(t,y) = V(t,-1,y) - V(t,1,y)
//! solves dz/dt = ½ z|z| with z(T,y) = 2(m+y), giving
//!
//!   z(t,y) = 2(m+y) / (|m+y|(T-t) + 1),
//!
//! the optimal flip rate is the negative part of x·z, and the conditional
//! mean m(t,y) follows from the Kolmogorov forward equation:
//!
//!   m(t,y) = ρ [1 - (1 - ρ m₀) ((|m+y|(T-t)+1)/(|m+y|T+1))²],  ρ = sign(m+y).
//!
//! A terminal mean m is a mean-field equilibrium iff `consistency_f(m, p) = 0`,
//! i.e. the average of m(T, ±ε) reproduces m.

use crate::error::Result;
use crate::params::{LocalField, ModelParams, SpinState, TerminalMean};

/// Which one-sided convention to use for sign(m ± ε) exactly at a kink.
/// The value of the consistency function is the same either way (the term
/// reduces to m₀/2 at the kink); the hint only matters for derivative
/// evaluations taken from a specific side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

fn sign_or(v: f64, side: Side) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        match side {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }
}

/// HJB gap z(t,y) = V(t,-1,y) - V(t,1,y); zero when m + y = 0.
pub fn z_gap(t: f64, y: LocalField, m: TerminalMean, p: &ModelParams) -> Result<f64> {
    p.check_time(t)?;
    let a = m.0 + y.signed(p.field_strength);
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * a / (a.abs() * (p.horizon - t) + 1.0))
}

/// Value function V(t,x,y). The aligned branch (sign(m+y) ∈ {0, x}) carries
/// no running cost; the opposed branch pays for flipping toward the field.
pub fn value_function(
    t: f64,
    x: SpinState,
    y: LocalField,
    m: TerminalMean,
    p: &ModelParams,
) -> Result<f64> {
    p.check_time(t)?;
    let a = m.0 + y.signed(p.field_strength);
    let abs_a = a.abs();
    let opposed = a != 0.0 && (a > 0.0) != (x == SpinState::Up);
    if opposed {
        Ok(-abs_a + 2.0 * abs_a / (abs_a * (p.horizon - t) + 1.0))
    } else {
        Ok(-abs_a)
    }
}

/// Optimal flip rate u*(t,x,y) = (x z(t,y))⁻.
pub fn optimal_rate(
    t: f64,
    x: SpinState,
    y: LocalField,
    m: TerminalMean,
    p: &ModelParams,
) -> Result<f64> {
    let z = z_gap(t, y, m, p)?;
    Ok((-(x.value() * z)).max(0.0))
}

/// Conditional mean m(t,y) of the optimally controlled state given the field y.
/// When m + y = 0 the rate vanishes and the mean stays frozen at m₀.
pub fn conditional_mean(t: f64, y: LocalField, m: TerminalMean, p: &ModelParams) -> Result<f64> {
    p.check_time(t)?;
    let a = m.0 + y.signed(p.field_strength);
    if a == 0.0 {
        return Ok(p.initial_mean);
    }
    let rho = if a > 0.0 { 1.0 } else { -1.0 };
    let ratio = (a.abs() * (p.horizon - t) + 1.0) / (a.abs() * p.horizon + 1.0);
    Ok(rho * (1.0 - (1.0 - rho * p.initial_mean) * ratio * ratio))
}

/// Population mean E[x*(t)] = ½ (m(t,+ε) + m(t,-ε)).
pub fn population_mean(t: f64, m: TerminalMean, p: &ModelParams) -> Result<f64> {
    Ok(0.5
        * (conditional_mean(t, LocalField::Plus, m, p)?
            + conditional_mean(t, LocalField::Minus, m, p)?))
}

/// Consistency function F(m) = E[x*(T)] - m. Zeros are the mean-field
/// equilibria. Fast path used by the root finder; `side` resolves sign(0)
/// at m = ±ε (the value itself is side-independent).
pub(crate) fn f_raw(m: f64, eps: f64, horizon: f64, m0: f64, side: Side) -> f64 {
    let mut acc = -m;
    for a in [m + eps, m - eps] {
        let rho = sign_or(a, side);
        let d = a.abs() * horizon + 1.0;
        acc += 0.5 * rho * (1.0 - (1.0 - rho * m0) / (d * d));
    }
    acc
}

/// dF/dm within a sign-regular region (one-sided at the kinks m = ±ε).
pub(crate) fn df_dm_raw(m: f64, eps: f64, horizon: f64, m0: f64, side: Side) -> f64 {
    let mut acc = -1.0;
    for a in [m + eps, m - eps] {
        let rho = sign_or(a, side);
        let d = a.abs() * horizon + 1.0;
        acc += (1.0 - rho * m0) * horizon / (d * d * d);
    }
    acc
}

/// Consistency function with the default sign(0) convention (limit from above,
/// matching the boundary analysis of the polarized-coherent regime).
pub fn consistency_f(m: TerminalMean, p: &ModelParams) -> f64 {
    f_raw(m.0, p.field_strength, p.horizon, p.initial_mean, Side::Above)
}

/// Consistency function with an explicit one-sided convention at m = ±ε.
pub fn consistency_f_with_side(m: TerminalMean, p: &ModelParams, side: Side) -> f64 {
    f_raw(m.0, p.field_strength, p.horizon, p.initial_mean, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, eps: f64, m0: f64) -> ModelParams {
        ModelParams::new(t, eps, m0).unwrap()
    }

    #[test]
    fn z_gap_examples() {
        let pr = p(1.0, 0.5, 0.25);
        let m = TerminalMean(0.5);
        // terminal condition z(T,y) = 2(m+y)
        assert_eq!(z_gap(1.0, LocalField::Plus, m, &pr).unwrap(), 2.0);
        // m + y = 0 forces z = 0 for all t
        assert_eq!(z_gap(0.0, LocalField::Minus, m, &pr).unwrap(), 0.0);
        assert_eq!(z_gap(0.7, LocalField::Minus, m, &pr).unwrap(), 0.0);
        // hand evaluation: 2*1 / (1*1 + 1)
        assert!((z_gap(0.0, LocalField::Plus, m, &pr).unwrap() - 1.0).abs() < 1e-15);
        // sign matches sign(m+y) everywhere
        for t in [0.0, 0.3, 0.9] {
            assert!(z_gap(t, LocalField::Plus, m, &pr).unwrap() > 0.0);
        }
        assert!(z_gap(1.5, LocalField::Plus, m, &pr).is_err());
    }

    #[test]
    fn value_function_examples() {
        let pr = p(1.0, 0.5, 0.25);
        let m = TerminalMean(0.5);
        // terminal condition -x(m+y), both branches
        assert_eq!(value_function(1.0, SpinState::Up, LocalField::Plus, m, &pr).unwrap(), -1.0);
        assert_eq!(value_function(1.0, SpinState::Down, LocalField::Plus, m, &pr).unwrap(), 1.0);
        // opposed branch at t=0: -1 + 2*1/(1+1) = 0
        assert!(
            value_function(0.0, SpinState::Down, LocalField::Plus, m, &pr).unwrap().abs() < 1e-15
        );
    }

    #[test]
    fn optimal_rate_examples() {
        let pr = p(1.0, 0.5, 0.25);
        let m = TerminalMean(0.5);
        // aligned player never flips
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(optimal_rate(t, SpinState::Up, LocalField::Plus, m, &pr).unwrap(), 0.0);
        }
        // m + y = 0 gives zero rate
        assert_eq!(optimal_rate(0.3, SpinState::Down, LocalField::Minus, m, &pr).unwrap(), 0.0);
        // negative part of -z_gap from the z example above
        assert!(
            (optimal_rate(0.0, SpinState::Down, LocalField::Plus, m, &pr).unwrap() - 1.0).abs()
                < 1e-15
        );
    }

    #[test]
    fn conditional_mean_examples() {
        // initial condition m(0,y) = m0
        let pr = p(1.0, 0.5, 0.25);
        for y in LocalField::BOTH {
            for m in [-0.7, 0.0, 0.5] {
                assert!(
                    (conditional_mean(0.0, y, TerminalMean(m), &pr).unwrap() - 0.25).abs() < 1e-15
                );
            }
        }
        // m0 = 1 with rho = +1 stays at 1
        let pr1 = p(1.0, 0.5, 1.0);
        assert_eq!(conditional_mean(0.4, LocalField::Plus, TerminalMean(0.5), &pr1).unwrap(), 1.0);
        // hand evaluation of the terminal value: 1 - 0.75/4
        let v = conditional_mean(1.0, LocalField::Plus, TerminalMean(0.5), &pr).unwrap();
        assert!((v - 0.8125).abs() < 1e-15);
    }

    #[test]
    fn population_mean_examples() {
        let pr = p(1.0, 0.5, 0.25);
        assert!((population_mean(0.0, TerminalMean(0.3), &pr).unwrap() - 0.25).abs() < 1e-15);
        // Table 2 row 1 at its equation-consistent horizon: fixed point of the mean
        let pr2 = p(2.0, 0.42, 0.1);
        let m = TerminalMean(0.8261);
        assert!((population_mean(2.0, m, &pr2).unwrap() - 0.8261).abs() < 1e-3);
    }

    #[test]
    fn consistency_examples() {
        // m = 0 is an equilibrium iff m0 = 0
        let pr = p(1.0, 0.5, 0.0);
        assert_eq!(consistency_f(TerminalMean(0.0), &pr), 0.0);
        // T -> 0 limit gives F -> m0 - m
        let pr = p(1e-9, 0.5, 0.25);
        assert!((consistency_f(TerminalMean(0.3), &pr) + 0.05).abs() < 1e-8);
        // Table 2 row 1 at the equation-consistent horizon
        let pr = p(2.0, 0.42, 0.1);
        assert!(consistency_f(TerminalMean(0.8261), &pr).abs() < 1e-3);
        // side convention does not change the value at the kink
        let pr = p(3.0, 0.5, 0.25);
        let above = consistency_f_with_side(TerminalMean(0.5), &pr, Side::Above);
        let below = consistency_f_with_side(TerminalMean(0.5), &pr, Side::Below);
        assert!((above - below).abs() < 1e-15);
    }

    #[test]
    fn gap_consistency_with_value_function() {
        let pr = p(2.3, 0.42, 0.1);
        let m = TerminalMean(0.37);
        for t in [0.0, 0.8, 2.3] {
            for y in LocalField::BOTH {
                let gap = value_function(t, SpinState::Down, y, m, &pr).unwrap()
                    - value_function(t, SpinState::Up, y, m, &pr).unwrap();
                assert!((gap - z_gap(t, y, m, &pr).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let (eps, t, m0) = (0.42, 1.7, 0.2);
        let h = 1e-6;
        for m in [0.1, 0.3, 0.55, 0.9, -0.2, -0.8] {
            let fd = (f_raw(m + h, eps, t, m0, Side::Above) - f_raw(m - h, eps, t, m0, Side::Above))
                / (2.0 * h);
            let an = df_dm_raw(m, eps, t, m0, Side::Above);
            assert!((fd - an).abs() < 1e-7, "m={m}: fd={fd} analytic={an}");
        }
    }
}
