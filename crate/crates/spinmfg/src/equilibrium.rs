//! Enumeration and classification of the consistency-equation roots.
//!
//! F is continuous on [-1,1] and piecewise smooth with kinks at m = ±ε. On
//! each sign-regular subinterval it is strictly concave or convex, so it has
//! at most two roots there; grid bracketing plus bisection with tangency
//! detection at interior |F| minima is therefore exhaustive.

use crate::error::{Error, Result};
use crate::mfg::{df_dm_raw, f_raw, Side};
use crate::numerics::bisect;
use crate::params::ModelParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Horizon clamp bounds: T -> 0 and T -> infinity are never evaluated literally.
pub const T_MIN: f64 = 1e-9;
pub const T_MAX: f64 = 1e6;

/// Default grid density per sign-regular subinterval.
pub const DEFAULT_GRID: usize = 10_000;
/// Default |F| tolerance for accepted roots.
pub const DEFAULT_TOL: f64 = 1e-12;
/// |F| threshold under which an interior minimum with no sign change is
/// reported as a double (tangent) root.
const TANGENT_TOL: f64 = 1e-8;
/// Merge radius for duplicate roots found from adjacent intervals/boundaries.
const DEDUP: f64 = 1e-9;

/// The four equilibrium classes (polarization x coherence), for m0 >= 0.
/// Negative m0 is handled by the symmetry map which swaps coherence labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumClass {
    PolarizedCoherent,
    PolarizedIncoherent,
    UnpolarizedCoherent,
    UnpolarizedIncoherent,
}

impl EquilibriumClass {
    pub const ALL: [EquilibriumClass; 4] = [
        EquilibriumClass::PolarizedCoherent,
        EquilibriumClass::PolarizedIncoherent,
        EquilibriumClass::UnpolarizedCoherent,
        EquilibriumClass::UnpolarizedIncoherent,
    ];

    pub fn swap_coherence(self) -> Self {
        match self {
            EquilibriumClass::PolarizedCoherent => EquilibriumClass::PolarizedIncoherent,
            EquilibriumClass::PolarizedIncoherent => EquilibriumClass::PolarizedCoherent,
            EquilibriumClass::UnpolarizedCoherent => EquilibriumClass::UnpolarizedIncoherent,
            EquilibriumClass::UnpolarizedIncoherent => EquilibriumClass::UnpolarizedCoherent,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EquilibriumClass::PolarizedCoherent => "polarized-coherent",
            EquilibriumClass::PolarizedIncoherent => "polarized-incoherent",
            EquilibriumClass::UnpolarizedCoherent => "unpolarized-coherent",
            EquilibriumClass::UnpolarizedIncoherent => "unpolarized-incoherent",
        }
    }
}

/// A root of the consistency equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub m: f64,
    pub class: EquilibriumClass,
    /// True when this is a double root (the curve is tangent to zero).
    pub tangent: bool,
}

/// A subinterval where |F| dips within 10*tol of zero without a sign change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearTangency {
    pub interval: (f64, f64),
    pub m: f64,
    pub f_min: f64,
}

/// Full output of the root enumeration.
#[derive(Debug, Clone)]
pub struct FindReport {
    pub equilibria: Vec<Equilibrium>,
    pub near_tangencies: Vec<NearTangency>,
    /// Set when the horizon was clamped into [T_MIN, T_MAX].
    pub horizon_clamped: bool,
}

/// Per-class root counts and the matching phase-diagram region, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSignature {
    /// Counts ordered as [PC, PI, UC, UI].
    pub counts: [u8; 4],
    /// Region 1..9 when the counts match a known region; None on separatrices
    /// (tangent roots present) or for count patterns outside the table.
    pub region_id: Option<u8>,
}

/// Count patterns of the nine phase-diagram regions, ordered [PC, PI, UC, UI].
pub const REGION_COUNTS: [([u8; 4], u8); 9] = [
    ([1, 1, 0, 1], 1),
    ([1, 1, 2, 1], 2),
    ([1, 2, 2, 0], 3),
    ([2, 2, 1, 0], 4),
    ([1, 2, 0, 0], 5),
    ([1, 0, 0, 0], 6),
    ([1, 0, 2, 0], 7),
    ([2, 0, 1, 0], 8),
    ([0, 0, 1, 0], 9),
];

/// Classifies a root by its position relative to ±ε and the sign of m0.
pub fn classify(m: f64, p: &ModelParams) -> Result<EquilibriumClass> {
    if !(m.is_finite() && m.abs() <= 1.0) {
        return Err(Error::Domain(format!("classify: |m| = {} > 1", m.abs())));
    }
    if p.initial_mean < 0.0 {
        // symmetry map: the mirrored root in the mirrored problem has the
        // same polarization and the same coherence (sign agreement with m0)
        let mirrored = ModelParams { initial_mean: -p.initial_mean, ..*p };
        return classify(-m, &mirrored);
    }
    let eps = p.field_strength;
    Ok(if m > eps {
        EquilibriumClass::PolarizedCoherent
    } else if m < -eps {
        EquilibriumClass::PolarizedIncoherent
    } else if m > 0.0 {
        EquilibriumClass::UnpolarizedCoherent
    } else {
        EquilibriumClass::UnpolarizedIncoherent
    })
}

pub(crate) fn clamp_horizon(p: &ModelParams) -> (ModelParams, bool) {
    if (T_MIN..=T_MAX).contains(&p.horizon) {
        (*p, false)
    } else {
        (ModelParams { horizon: p.horizon.clamp(T_MIN, T_MAX), ..*p }, true)
    }
}

struct RawRoot {
    m: f64,
    tangent: bool,
}

/// Enumerates roots on one sign-regular open subinterval (a, b).
fn scan_interval(
    a: f64,
    b: f64,
    grid: usize,
    tol: f64,
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    roots: &mut Vec<RawRoot>,
    warnings: &mut Vec<NearTangency>,
) {
    if b - a < 1e-12 {
        return;
    }
    let n = grid.max(8);
    let h = (b - a) / n as f64;
    // keep strictly inside the open interval so kink conventions never mix
    let xs: Vec<f64> = (0..=n).map(|i| (a + i as f64 * h).clamp(a + 1e-13, b - 1e-13)).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut had_sign_change = false;
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(RawRoot { m: xs[i], tangent: false });
            had_sign_change = true;
        } else if fs[i].signum() != fs[i + 1].signum() {
            let r = bisect(f, xs[i], xs[i + 1], 1e-15);
            debug_assert!(f(r).abs() <= tol.max(1e-9), "unconverged root {r}");
            roots.push(RawRoot { m: r, tangent: false });
            had_sign_change = true;
        }
    }
    if fs[n] == 0.0 {
        roots.push(RawRoot { m: xs[n], tangent: false });
        had_sign_change = true;
    }

    // interior |F| minima without a local sign change: tangency candidates.
    // F' is monotone on a sign-regular piece, so refining via F' is exact.
    let mut fmin = f64::INFINITY;
    let mut fmin_at = xs[0];
    for i in 1..n {
        let (al, ac, ar) = (fs[i - 1].abs(), fs[i].abs(), fs[i + 1].abs());
        if ac < fmin {
            fmin = ac;
            fmin_at = xs[i];
        }
        if ac <= al && ac <= ar && fs[i - 1].signum() == fs[i + 1].signum() {
            if ac < TANGENT_TOL {
                let (lo, hi) = (xs[i - 1], xs[i + 1]);
                let m_star = if df(lo).signum() != df(hi).signum() {
                    bisect(df, lo, hi, 1e-15)
                } else {
                    xs[i]
                };
                if f(m_star).abs() < TANGENT_TOL {
                    roots.push(RawRoot { m: m_star, tangent: true });
                }
            }
        }
    }
    if !had_sign_change && fmin <= 10.0 * tol {
        warnings.push(NearTangency { interval: (a, b), m: fmin_at, f_min: fmin });
    }
}

fn find_raw(eps: f64, horizon: f64, m0: f64, grid: usize, tol: f64) -> (Vec<RawRoot>, Vec<NearTangency>) {
    debug_assert!(m0 >= 0.0);
    let mut roots = Vec::new();
    let mut warnings = Vec::new();

    let pieces: [(f64, f64, Side); 4] = [
        (-1.0, -eps, Side::Below),
        (-eps, 0.0, Side::Above),
        (0.0, eps, Side::Above),
        (eps, 1.0, Side::Above),
    ];
    for (a, b, side) in pieces {
        let f = move |m: f64| f_raw(m, eps, horizon, m0, side);
        let df = move |m: f64| df_dm_raw(m, eps, horizon, m0, side);
        scan_interval(a, b, grid, tol, &f, &df, &mut roots, &mut warnings);
    }

    // explicit boundary checks; both sign conventions give the same value there
    let boundary_tol = (10.0 * tol).max(1e-11);
    for mb in [-eps, 0.0, eps] {
        if f_raw(mb, eps, horizon, m0, Side::Above).abs() <= boundary_tol {
            roots.push(RawRoot { m: mb, tangent: false });
        }
    }

    roots.sort_by(|a, b| a.m.total_cmp(&b.m));
    let mut merged: Vec<RawRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r.m - last.m).abs() <= DEDUP => last.tangent |= r.tangent,
            _ => merged.push(r),
        }
    }
    (merged, warnings)
}

/// Finds every equilibrium in [-1, 1], with tangency detection and explicit
/// boundary checks at m ∈ {-ε, 0, ε}. Negative m0 is solved through the
/// symmetry map (roots negated, coherence labels swapped).
pub fn find_equilibria_report(p: &ModelParams, grid_points: usize, tol: f64) -> Result<FindReport> {
    if grid_points < 1_000 {
        return Err(Error::InvalidParameter(format!(
            "grid_points = {grid_points}, need at least 1000"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol}, need tol > 0")));
    }
    let (pc, clamped) = clamp_horizon(p);
    let mirror = pc.initial_mean < 0.0;
    let m0 = pc.initial_mean.abs();

    let (raw, mut warnings) = find_raw(pc.field_strength, pc.horizon, m0, grid_points, tol);
    let mut equilibria = Vec::with_capacity(raw.len());
    for r in raw {
        let m = if mirror { -r.m } else { r.m };
        equilibria.push(Equilibrium { m, class: classify(m, &pc)?, tangent: r.tangent });
    }
    if mirror {
        equilibria.sort_by(|a, b| a.m.total_cmp(&b.m));
        for w in &mut warnings {
            *w = NearTangency { interval: (-w.interval.1, -w.interval.0), m: -w.m, f_min: w.f_min };
        }
    }
    Ok(FindReport { equilibria, near_tangencies: warnings, horizon_clamped: clamped })
}

/// Convenience wrapper returning the sorted equilibria only.
pub fn find_equilibria(p: &ModelParams, grid_points: usize, tol: f64) -> Result<Vec<Equilibrium>> {
    Ok(find_equilibria_report(p, grid_points, tol)?.equilibria)
}

/// Uniform-grid oracle for `find_equilibria`: returns midpoints of
/// sign-change cells plus grid minima of |F| below sqrt(machine epsilon).
/// Intended for tests; no refinement beyond the grid.
pub fn brute_force_roots(p: &ModelParams, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 100_000 {
        return Err(Error::InvalidParameter(format!(
            "resolution = {resolution}, need at least 1e5"
        )));
    }
    let (pc, _) = clamp_horizon(p);
    let mirror = pc.initial_mean < 0.0;
    let m0 = pc.initial_mean.abs();
    let (eps, horizon) = (pc.field_strength, pc.horizon);
    let f = |m: f64| f_raw(m, eps, horizon, m0, Side::Above);

    let h = 2.0 / resolution as f64;
    let mut out = Vec::new();
    let mut prev_x = -1.0f64;
    let mut prev = f(prev_x);
    let tiny = f64::EPSILON.sqrt();
    let mut prev_abs = prev.abs();
    let mut before_abs = f64::INFINITY;
    for i in 1..=resolution {
        let x = -1.0 + i as f64 * h;
        let v = f(x);
        if prev == 0.0 {
            out.push(prev_x);
        } else if prev.signum() != v.signum() && v != 0.0 {
            out.push(0.5 * (prev_x + x));
        }
        // local |F| minimum below sqrt(eps): tangency candidate
        let va = v.abs();
        if prev_abs < tiny && prev_abs <= before_abs && prev_abs <= va && prev != 0.0 {
            let same_sign = f(prev_x - h).signum() == v.signum();
            if same_sign {
                out.push(prev_x);
            }
        }
        before_abs = prev_abs;
        prev_abs = va;
        prev = v;
        prev_x = x;
    }
    if prev == 0.0 {
        out.push(prev_x);
    }
    if mirror {
        out = out.into_iter().map(|m| -m).collect();
        out.reverse();
    }
    // merge duplicates from adjacent cells
    let mut merged: Vec<f64> = Vec::with_capacity(out.len());
    for m in out {
        if merged.last().map_or(true, |&l| (m - l).abs() > 2.0 * h) {
            merged.push(m);
        }
    }
    Ok(merged)
}

/// Counts roots per class and maps the 4-tuple onto a phase-diagram region.
pub fn region_signature(p: &ModelParams) -> Result<PhaseSignature> {
    let report = find_equilibria_report(p, DEFAULT_GRID, DEFAULT_TOL)?;
    Ok(signature_of(&report.equilibria))
}

/// Signature of an already-computed equilibrium list.
pub fn signature_of(equilibria: &[Equilibrium]) -> PhaseSignature {
    let mut counts = [0u8; 4];
    let mut tangent = false;
    for e in equilibria {
        tangent |= e.tangent;
        let idx = match e.class {
            EquilibriumClass::PolarizedCoherent => 0,
            EquilibriumClass::PolarizedIncoherent => 1,
            EquilibriumClass::UnpolarizedCoherent => 2,
            EquilibriumClass::UnpolarizedIncoherent => 3,
        };
        counts[idx] += 1;
    }
    let region_id = if tangent {
        None
    } else {
        REGION_COUNTS.iter().find(|(c, _)| *c == counts).map(|&(_, id)| id)
    };
    PhaseSignature { counts, region_id }
}

/// One sampled boundary curve of the phase diagram.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSamples {
    pub name: String,
    /// (eps, T) pairs where the curve is defined.
    pub points: Vec<(f64, f64)>,
}

/// Dense signature grid plus the analytic boundary curves sampled at the
/// grid's ε values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub eps_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Row-major: index = i_eps * t_values.len() + i_t.
    pub signatures: Vec<PhaseSignature>,
    pub curves: Vec<CurveSamples>,
}

/// Computes the signature grid over eps_range x t_range at the given
/// resolution (cells per axis), along with every boundary curve.
pub fn phase_grid(
    eps_range: (f64, f64),
    t_range: (f64, f64),
    m0: f64,
    resolution: usize,
) -> Result<PhaseGrid> {
    let (e_lo, e_hi) = eps_range;
    let (t_lo, t_hi) = t_range;
    if !(e_lo > 0.0 && e_hi <= 1.0 && e_lo < e_hi) {
        return Err(Error::InvalidParameter(format!(
            "eps range ({e_lo}, {e_hi}) must lie inside (0, 1]"
        )));
    }
    if !(t_lo > 0.0 && t_hi <= T_MAX && t_lo < t_hi) {
        return Err(Error::InvalidParameter(format!("T range ({t_lo}, {t_hi}) invalid")));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let eps_values: Vec<f64> = (0..resolution)
        .map(|i| e_lo + (e_hi - e_lo) * (i as f64 + 0.5) / resolution as f64)
        .collect();
    let t_values: Vec<f64> = (0..resolution)
        .map(|i| t_lo + (t_hi - t_lo) * (i as f64 + 0.5) / resolution as f64)
        .collect();

    // lighter grid per cell keeps the full diagram fast; tangency handling is
    // unchanged and separatrix cells simply get region_id = None
    let cell_grid = 2_000;
    let signatures: Vec<PhaseSignature> = eps_values
        .par_iter()
        .flat_map_iter(|&eps| {
            let t_values = t_values.clone();
            t_values.into_iter().map(move |t| {
                let p = ModelParams { horizon: t, field_strength: eps, initial_mean: m0 };
                let report = find_equilibria_report(&p, cell_grid, DEFAULT_TOL)
                    .expect("valid grid parameters");
                signature_of(&report.equilibria)
            })
        })
        .collect();

    let curves = crate::curves::boundary_curves(&eps_values, m0);
    Ok(PhaseGrid { eps_values, t_values, signatures, curves })
}
