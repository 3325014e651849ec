//! Bracketed bisection.

const MAX_ITER: usize = 4000;

/// Root of `f` in `[a, b]` given a sign change (or a zero at an endpoint).
/// Stops when the bracket is narrower than `xtol` or cannot be split further.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "no sign change on [{a}, {b}]");
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return m;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Solve `f(x) = y` for increasing `f` on `[lo, ∞)`, doubling the upper end until bracketed.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: F, y: f64, lo: f64, hi0: f64, xtol: f64) -> f64 {
    let mut hi = hi0.max(lo + 1.0);
    let mut k = 0;
    while f(hi) < y && k < 2000 {
        hi = lo + 2.0 * (hi - lo);
        k += 1;
    }
    bisect(|x| f(x) - y, lo, hi, xtol)
}
