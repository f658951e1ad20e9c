//! Small scalar root-finding and 1-D optimization helpers.

/// Bisection on [lo, hi]; requires a sign change. Refines until the interval
/// width drops below `xtol` (absolute) or the iteration cap is hit.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != f(hi).signum(), "bisect needs a bracket");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < xtol {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximum of a unimodal (here: concave) function on [lo, hi].
/// Returns (argmax, max).
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        if hi - lo < 1e-13 * lo.abs().max(1.0) {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
