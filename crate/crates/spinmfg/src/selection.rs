//! Cost functionals over equilibria and the equilibrium-selection predictor.
//!
//! For an equilibrium value m(T), the time-zero value v_{m(T)}(x, y) gives the
//! cost each (x, y)-subpopulation pays to reach it. Weighting by the initial
//! spin distribution yields the per-field costs J^(-ε), J^(+ε); the selection
//! rule picks, among coherent equilibria, the one minimizing the cost of the
//! underdog subpopulation (the players whose field opposes sign(m₀)).

use crate::equilibrium::{find_equilibria, Equilibrium, EquilibriumClass, DEFAULT_GRID, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::params::{ModelParams, SpinState};
use serde::{Deserialize, Serialize};

/// Exact tie threshold for the underdog-cost minimizer.
const TIE_EPS: f64 = 1e-12;

/// Per-subpopulation and total costs of reaching a given equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Cost of the y = -ε subpopulation (the underdog when m₀ > 0).
    pub j_minus: f64,
    /// Cost of the y = +ε subpopulation.
    pub j_plus: f64,
    /// Total cost, ½ (j_minus + j_plus).
    pub j_total: f64,
}

/// Outcome of the selection predictor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionResult {
    pub chosen: Equilibrium,
    pub chosen_costs: CostBreakdown,
    /// Every coherent equilibrium with its cost breakdown, sorted by m.
    pub all_coherent: Vec<(Equilibrium, CostBreakdown)>,
    /// Underdog-cost crossing times of the coherent branches; filled by
    /// [`branch_crossing_times`] based callers, empty for a plain prediction.
    pub crossing_times: Vec<f64>,
    /// Set when two coherent equilibria tied on underdog cost and the tie was
    /// broken toward larger |m|.
    pub tie_break: bool,
}

/// v_{mT}(x, y) = V(0, x, y) at m = mT; `y` is the signed field value.
pub fn initial_value(x: SpinState, y: f64, m_t: f64, horizon: f64) -> f64 {
    let a = m_t + y;
    let abs_a = a.abs();
    let opposed = a != 0.0 && (a > 0.0) != (x == SpinState::Up);
    if opposed {
        -abs_a + 2.0 * abs_a / (horizon * abs_a + 1.0)
    } else {
        -abs_a
    }
}

/// J^(-ε), J^(+ε) and the total J for a terminal mean mT.
pub fn cost_breakdown(m_t: f64, p: &ModelParams) -> CostBreakdown {
    let eps = p.field_strength;
    let m0 = p.initial_mean;
    let (w_down, w_up) = ((1.0 - m0) / 2.0, (1.0 + m0) / 2.0);
    let j_minus = w_down * initial_value(SpinState::Down, -eps, m_t, p.horizon)
        + w_up * initial_value(SpinState::Up, -eps, m_t, p.horizon);
    let j_plus = w_down * initial_value(SpinState::Down, eps, m_t, p.horizon)
        + w_up * initial_value(SpinState::Up, eps, m_t, p.horizon);
    CostBreakdown { j_minus, j_plus, j_total: 0.5 * (j_minus + j_plus) }
}

/// Underdog cost: J of the subpopulation whose field sign opposes sign(m₀).
fn underdog_cost(c: &CostBreakdown, m0: f64) -> f64 {
    if m0 < 0.0 {
        c.j_plus
    } else {
        c.j_minus
    }
}

fn is_coherent(e: &Equilibrium, m0: f64) -> bool {
    if m0 == 0.0 {
        return true;
    }
    e.m != 0.0 && (e.m > 0.0) == (m0 > 0.0)
}

/// Predicts the equilibrium selected by the finite population: among coherent
/// equilibria, the minimizer of the underdog-subpopulation cost. Ties are
/// broken toward larger |m| and flagged.
pub fn predict_selected(p: &ModelParams) -> Result<SelectionResult> {
    let equilibria = find_equilibria(p, DEFAULT_GRID, DEFAULT_TOL)?;
    if equilibria.is_empty() {
        return Err(Error::NoEquilibrium(format!("{p:?}")));
    }
    let m0 = p.initial_mean;
    let all_coherent: Vec<(Equilibrium, CostBreakdown)> = equilibria
        .iter()
        .filter(|e| is_coherent(e, m0))
        .map(|&e| (e, cost_breakdown(e.m, p)))
        .collect();
    if all_coherent.is_empty() {
        return Err(Error::NoEquilibrium(format!("no coherent equilibrium for {p:?}")));
    }
    let mut best = all_coherent[0];
    let mut tie_break = false;
    for &(e, c) in &all_coherent[1..] {
        let (ju, jb) = (underdog_cost(&c, m0), underdog_cost(&best.1, m0));
        if (ju - jb).abs() <= TIE_EPS {
            tie_break = true;
            if e.m.abs() > best.0.m.abs() {
                best = (e, c);
            }
        } else if ju < jb {
            best = (e, c);
        }
    }
    Ok(SelectionResult {
        chosen: best.0,
        chosen_costs: best.1,
        all_coherent,
        crossing_times: Vec::new(),
        tie_break,
    })
}

/// The equilibrium minimizing the total cost J, over all equilibria.
pub fn min_total_cost_equilibrium(p: &ModelParams) -> Result<Equilibrium> {
    let equilibria = find_equilibria(p, DEFAULT_GRID, DEFAULT_TOL)?;
    equilibria
        .into_iter()
        .min_by(|a, b| {
            cost_breakdown(a.m, p).j_total.total_cmp(&cost_breakdown(b.m, p).j_total)
        })
        .ok_or_else(|| Error::NoEquilibrium(format!("{p:?}")))
}

fn polarized_coherent(class: EquilibriumClass) -> bool {
    class == EquilibriumClass::PolarizedCoherent
}

fn unpolarized_coherent(class: EquilibriumClass) -> bool {
    class == EquilibriumClass::UnpolarizedCoherent
}

/// Underdog-cost difference between the best polarized-coherent and the best
/// unpolarized-coherent equilibrium, or None when either branch is absent.
fn branch_cost_gap(eps: f64, m0: f64, t: f64, grid: usize) -> Option<f64> {
    let p = ModelParams { horizon: t, field_strength: eps, initial_mean: m0 };
    let equilibria = find_equilibria(&p, grid, DEFAULT_TOL).ok()?;
    let mut best_pc: Option<f64> = None;
    let mut best_uc: Option<f64> = None;
    for e in &equilibria {
        let ju = underdog_cost(&cost_breakdown(e.m, &p), m0);
        if polarized_coherent(e.class) {
            best_pc = Some(best_pc.map_or(ju, |v: f64| v.min(ju)));
        } else if unpolarized_coherent(e.class) {
            best_uc = Some(best_uc.map_or(ju, |v: f64| v.min(ju)));
        }
    }
    Some(best_pc? - best_uc?)
}

/// Tracks the coherent branches over T and returns the horizons where their
/// underdog costs cross, refined by bisection to 1e-4. Branches are
/// re-enumerated at each step of a ΔT = 0.01 grid, which survives folds and
/// branch births without continuation bookkeeping.
pub fn branch_crossing_times(eps: f64, m0: f64, t_range: (f64, f64)) -> Result<Vec<f64>> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidParameter(format!("T range ({t_lo}, {t_hi})")));
    }
    // the symmetry map reduces m0 < 0 to the mirrored problem with the
    // subpopulation roles swapped; crossing times are identical
    let m0 = m0.abs();
    const STEP: f64 = 0.01;
    const SWEEP_GRID: usize = 2_000;
    let n = ((t_hi - t_lo) / STEP).ceil() as usize;
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let t = (t_lo + i as f64 * STEP).min(t_hi);
        let gap = branch_cost_gap(eps, m0, t, SWEEP_GRID);
        if let (Some((tp, gp)), Some(g)) = (prev, gap) {
            if gp.signum() != g.signum() && gp != 0.0 {
                let f = |tt: f64| branch_cost_gap(eps, m0, tt, SWEEP_GRID).unwrap_or(gp);
                out.push(crate::numerics::bisect(f, tp, t, 1e-5));
            }
        }
        prev = gap.map(|g| (t, g));
    }
    Ok(out)
}
