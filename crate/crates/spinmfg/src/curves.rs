//! Critical curves of the phase diagram: the boundary time T*, the threshold
//! field strengths ε*¹ ε*² ε*³, and the tangency times T_c of the polarized
//! and unpolarized branches.
//!
//! All of these reduce to closed forms plus 1-D root finding:
//!   - T*(ε, m₀) solves F(ε, ε, T, m₀) = 0 (quadratic in T, explicit root);
//!   - ε*¹ is the zero of G(ε, m₀) = ∂F/∂m(ε, ε, T*, m₀), expressed through
//!     y = sqrt((1-m₀)/(1+m₀-2ε));
//!   - the unpolarized tangency times come from the zeros of a concave scalar
//!     function v_s(s) (s = (εT)²), whose corner and tail signs pin ε*² / ε*³.

use crate::error::{Error, Result};
use crate::mfg::{df_dm_raw, f_raw, Side};
use crate::numerics::{bisect, golden_max};
use crate::equilibrium::CurveSamples;
use serde::{Deserialize, Serialize};

/// Boundary time T*(ε, m₀) at which m = ε itself solves the consistency
/// equation. Defined for m₀ < ε < (1+m₀)/2 (also used with negated m₀ for
/// the incoherent side).
pub fn t_star(eps: f64, m0: f64) -> Result<f64> {
    if !(eps > m0 && eps < (1.0 + m0) / 2.0) {
        return Err(Error::Domain(format!(
            "t_star: need m0 < eps < (1+m0)/2, got eps={eps}, m0={m0}"
        )));
    }
    let radicand = (1.0 - m0) / (1.0 + m0 - 2.0 * eps);
    Ok((-1.0 + radicand.sqrt()) / (2.0 * eps))
}

/// G(ε, m₀) = ∂F/∂m evaluated at (m = ε, T = T*(ε, m₀)); strictly increasing
/// in ε from G(m₀, m₀) = -1, diverging as ε approaches (1+m₀)/2.
pub fn big_g(eps: f64, m0: f64) -> Result<f64> {
    if !(eps > m0 && eps < (1.0 + m0) / 2.0) {
        return Err(Error::Domain(format!(
            "big_g: need m0 < eps < (1+m0)/2, got eps={eps}, m0={m0}"
        )));
    }
    let y = ((1.0 - m0) / (1.0 + m0 - 2.0 * eps)).sqrt();
    Ok(-1.0 + (1.0 - m0) * (y * y - 1.0) * (y * y - y + 1.0) / (2.0 * eps * y * y * y))
}

/// The unique zero of G(·, m₀) in (m₀, (1+m₀)/2).
pub fn eps_star1(m0: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m0) {
        return Err(Error::Domain(format!("eps_star1: need 0 <= m0 < 1, got {m0}")));
    }
    let lo = m0 + 1e-12;
    let hi = (1.0 + m0) / 2.0 - 1e-12;
    Ok(bisect(|e| big_g(e, m0).unwrap(), lo, hi, 1e-13))
}

/// v_s(s, ε, m₀): the tangency indicator of the unpolarized-coherent branch,
/// as a function of s = (εT)². Zeros with s > m₀/(4ε) are exactly the
/// branch's tangency times T = sqrt(s)/ε. Strictly concave in s on its
/// domain and diverging to -∞.
pub fn v_s(s: f64, eps: f64, m0: f64) -> Result<f64> {
    if m0 < 0.0 || eps <= 0.0 {
        return Err(Error::Domain(format!("v_s: need m0 >= 0 and eps > 0, got m0={m0} eps={eps}")));
    }
    let s_min = if m0 > 0.0 { m0 / (4.0 * eps) } else { 0.0 };
    if s < s_min - 1e-12 || s < 0.0 {
        return Err(Error::Domain(format!("v_s: s = {s} below domain start {s_min}")));
    }
    let s = s.max(s_min.max(0.0));
    let r = s.sqrt();
    let u = if m0 > 0.0 { (m0 / (4.0 * eps * s)).cbrt() } else { 0.0 };
    let a = (1.0 + r) * (1.0 + r) - r * r * u * u;
    Ok(-2.0 * r * m0 * (1.0 + r - r * u) + 2.0 * (1.0 + m0) * r * (1.0 + r) - eps * a * a
        + 4.0 * eps * r * r * u * u * a)
}

/// Value of v_s at the left end of its domain, s = m₀/(4ε). Closed form:
/// m₀(1+m₀)/(2ε) + (1+m₀)sqrt(m₀/ε) - ε(1 + 2 sqrt(m₀/ε)).
fn v_s_corner(eps: f64, m0: f64) -> f64 {
    if m0 == 0.0 {
        return -eps;
    }
    let q = (m0 / eps).sqrt();
    m0 * (1.0 + m0) / (2.0 * eps) + (1.0 + m0) * q - eps * (1.0 + 2.0 * q)
}

/// The unique ε ∈ (m₀, (1+m₀)/2) where the corner value of v_s vanishes;
/// zero when m₀ = 0.
pub fn eps_star2(m0: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m0) {
        return Err(Error::Domain(format!("eps_star2: need 0 <= m0 < 1, got {m0}")));
    }
    if m0 == 0.0 {
        return Ok(0.0);
    }
    let lo = m0 + 1e-13;
    let hi = (1.0 + m0) / 2.0 - 1e-13;
    Ok(bisect(|e| v_s_corner(e, m0), lo, hi, 1e-13))
}

/// Concave maximum of v_s over its s-domain: (argmax, max).
fn v_s_max(eps: f64, m0: f64) -> (f64, f64) {
    let lo = if m0 > 0.0 { m0 / (4.0 * eps) } else { 1e-14 };
    let mut hi = (2.0 * lo).max(1.0);
    let v = |s: f64| v_s(s, eps, m0).unwrap();
    while v(hi) > v(0.5 * hi) && hi < 1e16 {
        hi *= 2.0;
    }
    golden_max(v, lo, hi)
}

/// The unique ε ∈ (ε*², (1+m₀)/2) where the whole v_s curve becomes tangent
/// to zero (its maximum vanishes); above it the unpolarized-coherent branch
/// has no tangency time at all.
pub fn eps_star3(m0: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m0) {
        return Err(Error::Domain(format!("eps_star3: need 0 <= m0 < 1, got {m0}")));
    }
    let lo = eps_star2(m0)? + 1e-12;
    let hi = (1.0 + m0) / 2.0 - 1e-12;
    Ok(bisect(|e| v_s_max(e, m0).1, lo.max(1e-9), hi, 1e-13))
}

/// Tangency times of the unpolarized-coherent branch: zero, one, or two
/// values T = sqrt(s)/ε over the zeros of v_s. One time for ε ≤ ε*²
/// (including all ε ≤ m₀), two for ε*² < ε < ε*³, none for ε ≥ ε*³.
pub fn t_c_unpolarized(eps: f64, m0: f64) -> Result<Vec<f64>> {
    if m0 < 0.0 || eps <= 0.0 {
        return Err(Error::Domain(format!(
            "t_c_unpolarized: need m0 >= 0 and eps > 0, got m0={m0} eps={eps}"
        )));
    }
    let corner = v_s_corner(eps, m0);
    let (s_peak, peak) = v_s_max(eps, m0);
    let v = |s: f64| v_s(s, eps, m0).unwrap();
    let mut roots_s = Vec::new();
    if peak > 0.0 {
        if corner > 0.0 {
            // single zero to the right of the peak
            let mut hi = (2.0 * s_peak).max(1.0);
            while v(hi) > 0.0 {
                hi *= 2.0;
            }
            roots_s.push(bisect(v, s_peak, hi, 1e-14));
        } else if corner < 0.0 {
            let lo = if m0 > 0.0 { m0 / (4.0 * eps) } else { 1e-14 };
            roots_s.push(bisect(v, lo, s_peak, 1e-14));
            let mut hi = (2.0 * s_peak).max(1.0);
            while v(hi) > 0.0 {
                hi *= 2.0;
            }
            roots_s.push(bisect(v, s_peak, hi, 1e-14));
        } else {
            // corner exactly zero: the boundary tangency itself
            roots_s.push(m0 / (4.0 * eps));
        }
    }
    Ok(roots_s.into_iter().map(|s| s.sqrt() / eps).collect())
}

/// Maximum of F over m ∈ (ε, 1]: F is strictly concave there, so the critical
/// point is the unique zero of the (decreasing) derivative.
fn max_f_polarized(eps: f64, horizon: f64, m0: f64) -> f64 {
    let a = eps + 1e-12;
    let b = 1.0;
    let da = df_dm_raw(a, eps, horizon, m0, Side::Above);
    let db = df_dm_raw(b, eps, horizon, m0, Side::Above);
    let m_star = if da <= 0.0 {
        a
    } else if db >= 0.0 {
        b
    } else {
        bisect(|m| df_dm_raw(m, eps, horizon, m0, Side::Above), a, b, 1e-15)
    };
    f_raw(m_star, eps, horizon, m0, Side::Above)
}

/// One 2-D Newton step for the tangency system [F, dF/dm] = 0 in (m, T).
/// Jacobian entries are the analytic second derivatives of F on m > ε.
fn newton_step(m: f64, t: f64, eps: f64, m0: f64) -> Option<(f64, f64)> {
    let mut f = -m;
    let mut fm = -1.0;
    let mut ft = 0.0;
    let mut fmm = 0.0;
    let mut fmt = 0.0;
    for a in [m + eps, m - eps] {
        let rho = if a >= 0.0 { 1.0 } else { -1.0 };
        let c = 1.0 - rho * m0;
        let d = a.abs() * t + 1.0;
        let (d2, d3, d4) = (d * d, d * d * d, d * d * d * d);
        f += 0.5 * rho * (1.0 - c / d2);
        fm += c * t / d3;
        ft += c * a / d3;
        fmm += -3.0 * rho * c * t * t / d4;
        fmt += c * (d - 3.0 * a.abs() * t) / d4;
    }
    let det = fm * fmt - ft * fmm;
    if det.abs() < 1e-300 {
        return None;
    }
    let dm = (f * fmt - ft * fm) / det;
    let dt = (fm * fm - f * fmm) / det;
    Some((m - dm, t - dt))
}

/// Tangency time T_c of the polarized branch (m > ε): the unique T at which
/// the concave curve m ↦ F(m) touches zero from below. Returns None when no
/// tangency exists (ε ≤ ε*¹(m₀) for m₀ ≥ 0). Accepts negative m₀ for the
/// incoherent side, where the tangency exists for every ε.
pub fn t_c_polarized(eps: f64, m0: f64) -> Result<Option<f64>> {
    Ok(t_c_polarized_full(eps, m0)?.map(|(t, _)| t))
}

/// Same as [`t_c_polarized`] but also returns the tangency location m.
pub fn t_c_polarized_full(eps: f64, m0: f64) -> Result<Option<(f64, f64)>> {
    if !(eps > 0.0 && eps <= 1.0 && m0.abs() < 1.0) {
        return Err(Error::Domain(format!("t_c_polarized: eps={eps}, m0={m0}")));
    }
    let below_half = eps < (1.0 + m0) / 2.0;
    if m0 >= 0.0 && below_half && eps <= eps_star1(m0)? {
        return Ok(None);
    }

    // bracket in T: below T_lo the polarized maximum of F is negative,
    // above T_hi positive
    let mut t_hi = if below_half {
        t_star(eps, m0)?
    } else {
        let mut t = 1.0;
        while max_f_polarized(eps, t, m0) <= 0.0 {
            t *= 2.0;
            if t > crate::equilibrium::T_MAX {
                return Ok(None);
            }
        }
        t
    };
    if max_f_polarized(eps, t_hi, m0) <= 0.0 {
        // can happen only from rounding right at eps_star1
        t_hi *= 1.0 + 1e-9;
        if max_f_polarized(eps, t_hi, m0) <= 0.0 {
            return Ok(None);
        }
    }
    let mut t_lo = 0.5 * t_hi;
    while max_f_polarized(eps, t_lo, m0) > 0.0 {
        t_lo *= 0.5;
        if t_lo < 1e-14 {
            return Ok(None);
        }
    }

    // coarse scan of |F| + |dF/dm| over (m, T) to seed Newton
    let mut best = (f64::INFINITY, 0.5 * (eps + 1.0), 0.5 * (t_lo + t_hi));
    for i in 0..200 {
        let t = t_lo + (t_hi - t_lo) * (i as f64 + 0.5) / 200.0;
        for j in 0..200 {
            let m = eps + (1.0 - eps) * (j as f64 + 0.5) / 200.0;
            let score = f_raw(m, eps, t, m0, Side::Above).abs()
                + df_dm_raw(m, eps, t, m0, Side::Above).abs();
            if score < best.0 {
                best = (score, m, t);
            }
        }
    }
    let (_, mut m, mut t) = best;
    let mut newton_ok = false;
    for _ in 0..60 {
        match newton_step(m, t, eps, m0) {
            Some((mn, tn)) if mn > eps && mn <= 1.0 && tn > 0.0 && tn.is_finite() => {
                let converged = (mn - m).abs() < 1e-13 && (tn - t).abs() < 1e-13 * t.max(1.0);
                m = mn;
                t = tn;
                if converged {
                    newton_ok = true;
                    break;
                }
            }
            _ => break,
        }
    }
    if !newton_ok {
        // nested bisection fallback: the polarized maximum is increasing in T
        t = bisect(|tt| max_f_polarized(eps, tt, m0), t_lo, t_hi, 1e-13);
        m = {
            let da = df_dm_raw(eps + 1e-12, eps, t, m0, Side::Above);
            if da <= 0.0 {
                eps
            } else {
                bisect(|mm| df_dm_raw(mm, eps, t, m0, Side::Above), eps + 1e-12, 1.0, 1e-15)
            }
        };
    }
    Ok(Some((t, m)))
}

/// Every critical quantity at one (ε, m₀): the thresholds (functions of m₀)
/// and the curves evaluated at this ε where defined.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalCurves {
    pub t_star: Option<f64>,
    pub t_c1: Option<f64>,
    pub t_c2: Option<f64>,
    pub t_c3: Option<f64>,
    pub eps_star1: f64,
    pub eps_star2: f64,
    pub eps_star3: f64,
}

/// Gathers the critical curves of the coherent side at a given ε.
pub fn critical_curves(eps: f64, m0: f64) -> Result<CriticalCurves> {
    let e1 = eps_star1(m0)?;
    let e2 = eps_star2(m0)?;
    let e3 = eps_star3(m0)?;
    let ts = t_star(eps, m0).ok();
    let tc1 = t_c_polarized(eps, m0)?;
    let tcu = t_c_unpolarized(eps, m0)?;
    Ok(CriticalCurves {
        t_star: ts,
        t_c1: tc1,
        t_c2: tcu.first().copied(),
        t_c3: tcu.get(1).copied(),
        eps_star1: e1,
        eps_star2: e2,
        eps_star3: e3,
    })
}

/// Samples every boundary curve of the phase diagram (coherent and
/// incoherent sides) at the given ε values, for a fixed m₀ ≥ 0.
pub fn boundary_curves(eps_values: &[f64], m0: f64) -> Vec<CurveSamples> {
    let m0 = m0.abs();
    let mut t_star_coh = Vec::new();
    let mut t_star_inc = Vec::new();
    let mut t_c1_coh = Vec::new();
    let mut t_c1_inc = Vec::new();
    let mut t_c2 = Vec::new();
    let mut t_c3 = Vec::new();
    for &eps in eps_values {
        if let Ok(t) = t_star(eps, m0) {
            t_star_coh.push((eps, t));
        }
        if let Ok(t) = t_star(eps, -m0) {
            t_star_inc.push((eps, t));
        }
        if let Ok(Some(t)) = t_c_polarized(eps, m0) {
            t_c1_coh.push((eps, t));
        }
        if let Ok(Some(t)) = t_c_polarized(eps, -m0) {
            t_c1_inc.push((eps, t));
        }
        if let Ok(ts) = t_c_unpolarized(eps, m0) {
            if let Some(&t) = ts.first() {
                t_c2.push((eps, t));
            }
            if let Some(&t) = ts.get(1) {
                t_c3.push((eps, t));
            }
        }
    }
    vec![
        CurveSamples { name: "t_star_coherent".into(), points: t_star_coh },
        CurveSamples { name: "t_star_incoherent".into(), points: t_star_inc },
        CurveSamples { name: "t_c1_coherent".into(), points: t_c1_coh },
        CurveSamples { name: "t_c1_incoherent".into(), points: t_c1_inc },
        CurveSamples { name: "t_c2_unpolarized".into(), points: t_c2 },
        CurveSamples { name: "t_c3_unpolarized".into(), points: t_c3 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{find_equilibria, EquilibriumClass, DEFAULT_GRID, DEFAULT_TOL};
    use crate::params::ModelParams;

    #[test]
    fn t_star_hand_value() {
        // sqrt(3) - 1 at (0.5, 0.25)
        let t = t_star(0.5, 0.25).unwrap();
        assert!((t - (3f64.sqrt() - 1.0)).abs() < 1e-14);
        // radicand -> 1 as eps -> m0+
        assert!(t_star(0.25 + 1e-9, 0.25).unwrap() < 1e-5);
        // diverges toward (1+m0)/2
        assert!(t_star(0.625 - 1e-9, 0.25).unwrap() > 1e3);
        assert!(t_star(0.2, 0.25).is_err());
        assert!(t_star(0.7, 0.25).is_err());
    }

    #[test]
    fn big_g_limits_and_fd_cross_check() {
        // G(m0+, m0) -> -1
        assert!((big_g(0.25 + 1e-10, 0.25).unwrap() + 1.0).abs() < 1e-4);
        // diverges at the upper end
        assert!(big_g(0.625 - 1e-10, 0.25).unwrap() > 1e3);
        // central finite difference of F in m at (eps, T*)
        let (eps, m0) = (0.5, 0.25);
        let ts = t_star(eps, m0).unwrap();
        let h = 1e-6;
        let fd =
            (f_raw(eps + 2.0 * h, eps, ts, m0, Side::Above) - f_raw(eps, eps, ts, m0, Side::Above))
                / (2.0 * h);
        let g = big_g(eps, m0).unwrap();
        assert!((fd - g).abs() < 1e-5, "fd={fd} g={g}");
    }

    #[test]
    fn eps_star1_is_root_and_in_interval() {
        for m0 in [0.0, 0.1, 0.25, 0.5, 0.8] {
            let e = eps_star1(m0).unwrap();
            assert!(e > m0 && e < (1.0 + m0) / 2.0);
            assert!(big_g(e, m0).unwrap().abs() < 1e-10);
        }
        // grid-scan oracle at m0 = 0.25: sign change across the root
        let e = eps_star1(0.25).unwrap();
        assert!(big_g(e - 1e-6, 0.25).unwrap() < 0.0);
        assert!(big_g(e + 1e-6, 0.25).unwrap() > 0.0);
        // frozen reference from the independent workbench
        assert!((e - 0.559335).abs() < 1e-5);
    }

    #[test]
    fn v_s_corner_values() {
        // corner values: 3/2 (1 - m0) at eps = m0, -(1-m0)/2 at eps = (1+m0)/2
        let m0 = 0.25;
        let v = v_s(0.25, 0.25, m0).unwrap();
        assert!((v - 1.125).abs() < 1e-12);
        let v = v_s(0.1, 0.625, m0).unwrap();
        assert!((v + 0.375).abs() < 1e-12);
        // tail diverges to -inf
        assert!(v_s(1e6, 0.4, m0).unwrap() < -1e6);
        assert!(v_s(0.01, 0.4, m0).is_err());
    }

    #[test]
    fn eps_star2_and_3() {
        assert_eq!(eps_star2(0.0).unwrap(), 0.0);
        let m0 = 0.25;
        let e2 = eps_star2(m0).unwrap();
        assert!(e2 > m0 && e2 < 0.625);
        assert!(v_s(m0 / (4.0 * e2), e2, m0).unwrap().abs() < 1e-10);
        let e3 = eps_star3(m0).unwrap();
        assert!(e2 < e3 && e3 < 0.625);
        assert!(v_s_max(e3, m0).1.abs() < 1e-9);
        // two v_s roots just below, none just above
        assert_eq!(t_c_unpolarized(e3 - 1e-4, m0).unwrap().len(), 2);
        assert_eq!(t_c_unpolarized(e3 + 1e-4, m0).unwrap().len(), 0);
        // frozen references from the independent workbench
        assert!((e2 - 0.4966757).abs() < 1e-6);
        assert!((e3 - 0.5157370).abs() < 1e-6);
        assert!((eps_star1(0.2).unwrap() - 0.5153833).abs() < 1e-6);
        assert!((eps_star2(0.2).unwrap() - 0.4553223).abs() < 1e-6);
        assert!((eps_star3(0.2).unwrap() - 0.4803913).abs() < 1e-6);
    }

    #[test]
    fn unpolarized_tangency_counts() {
        let m0 = 0.25;
        // eps <= m0: exactly one time
        let ts = t_c_unpolarized(0.2, m0).unwrap();
        assert_eq!(ts.len(), 1);
        assert!((ts[0] - 12.662627).abs() < 1e-4);
        // inside the reentrant window: two times
        let ts = t_c_unpolarized(0.51, m0).unwrap();
        assert_eq!(ts.len(), 2);
        assert!((ts[0] - 0.814654).abs() < 1e-4);
        assert!((ts[1] - 1.175455).abs() < 1e-4);
        // beyond eps_star3: none; 0.52 already lies above eps_star3 = 0.51574,
        // so the unpolarized branch there keeps two roots at every T > T*
        assert!(t_c_unpolarized(0.52, m0).unwrap().is_empty());
        assert!(t_c_unpolarized(0.6, m0).unwrap().is_empty());
    }

    #[test]
    fn unpolarized_tangency_vs_root_counts() {
        // crossing the single tangency time gains exactly two UC roots
        let m0 = 0.25;
        let tc = t_c_unpolarized(0.2, m0).unwrap()[0];
        let count_uc = |t: f64| {
            let p = ModelParams::new(t, 0.2, m0).unwrap();
            find_equilibria(&p, DEFAULT_GRID, DEFAULT_TOL)
                .unwrap()
                .iter()
                .filter(|e| e.class == EquilibriumClass::UnpolarizedCoherent && !e.tangent)
                .count()
        };
        assert_eq!(count_uc(tc - 1e-3), 0);
        assert_eq!(count_uc(tc + 1e-3), 2);
    }

    #[test]
    fn polarized_tangency() {
        let m0 = 0.25;
        // below/at eps_star1 (and a fortiori eps <= m0): absent
        assert!(t_c_polarized(0.2, m0).unwrap().is_none());
        assert!(t_c_polarized(0.5, m0).unwrap().is_none());
        // above: present, with the +-2 root-count jump
        let tc = t_c_polarized(0.7, m0).unwrap().unwrap();
        assert!((tc - 3.948607).abs() < 1e-4);
        let count_pc = |t: f64| {
            let p = ModelParams::new(t, 0.7, m0).unwrap();
            find_equilibria(&p, DEFAULT_GRID, DEFAULT_TOL)
                .unwrap()
                .iter()
                .filter(|e| e.class == EquilibriumClass::PolarizedCoherent && !e.tangent)
                .count()
        };
        assert_eq!(count_pc(tc - 1e-3), 0);
        assert_eq!(count_pc(tc + 1e-3), 2);
        // incoherent side exists even for small eps
        let tci = t_c_polarized(0.3, -m0).unwrap().unwrap();
        assert!((tci - 1.494360).abs() < 1e-4);
        assert!(tci < t_star(0.3, -m0).unwrap());
    }

    #[test]
    fn critical_curves_gathers_consistent_values() {
        let m0 = 0.25;
        let c = critical_curves(0.51, m0).unwrap();
        assert!((c.t_star.unwrap() - t_star(0.51, m0).unwrap()).abs() < 1e-15);
        assert!(c.t_c1.is_none(), "0.51 < eps_star1");
        let ts = t_c_unpolarized(0.51, m0).unwrap();
        assert_eq!(c.t_c2, Some(ts[0]));
        assert_eq!(c.t_c3, Some(ts[1]));
        assert!((c.eps_star1 - eps_star1(m0).unwrap()).abs() < 1e-15);
        let c = critical_curves(0.7, m0).unwrap();
        assert!(c.t_star.is_none(), "0.7 >= (1+m0)/2");
        assert!(c.t_c1.is_some() && c.t_c2.is_none() && c.t_c3.is_none());
    }

    #[test]
    fn polarized_tangency_continuity_at_eps_star1() {
        let m0 = 0.25;
        let e1 = eps_star1(m0).unwrap();
        let tc = t_c_polarized(e1 + 1e-5, m0).unwrap().unwrap();
        let ts = t_star(e1 + 1e-5, m0).unwrap();
        assert!((tc - ts).abs() < 1e-4, "tc={tc} ts={ts}");
    }
}
