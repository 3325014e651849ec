//! Elliptic-integral based special functions of the plane and two-sided
//! bounds for their higher-dimensional analogues.
//!
//! For `n >= 3` only bounds are available. They are mathematical bounds
//! evaluated in double precision, not directed-rounding intervals.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Inconsistent(format!("[{lo}, {hi}] is not an interval")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn exact(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub(crate) fn ordered(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return domain(format!("dimension {n} < 2"));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

fn check_dim(n: u32) -> Result<()> {
    Dimension::new(n).map(|_| ())
}

pub fn agm(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("agm needs positive finite arguments, got ({a}, {b})"));
    }
    Ok(agm_unchecked(a, b))
}

pub(crate) fn agm_unchecked(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..100 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if an == a && bn == b {
            break;
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// `sqrt(1 - r^2)` without cancellation near `r = 1`.
pub(crate) fn complement(r: f64) -> f64 {
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// Complete elliptic integral of the first kind, modulus `r`.
pub fn ell_k(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return domain(format!("ell_k needs 0 <= r < 1, got {r}"));
    }
    Ok(FRAC_PI_2 / agm_unchecked(1.0, complement(r)))
}

/// μ evaluated from a modulus and its complement, both given to full precision.
pub(crate) fn mu_pair(r: f64, rc: f64) -> f64 {
    FRAC_PI_2 * agm_unchecked(1.0, rc) / agm_unchecked(1.0, r)
}

/// Modulus of the plane Grötzsch ring.
pub fn mu(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("mu needs 0 < r < 1, got {r}"));
    }
    Ok(mu_pair(r, complement(r)))
}

/// `(r, r')` with `mu(r) = y`. Bisection runs in `log r` on the half where
/// `r <= 1/sqrt 2` and the other half is reached through `mu(r) mu(r') = π²/4`.
pub(crate) fn mu_inv_pair(y: f64) -> (f64, f64) {
    if y < FRAC_PI_2 {
        let (rc, r) = mu_inv_pair(PI * PI / (4.0 * y));
        return (r, rc);
    }
    let f = |u: f64| {
        let r = u.exp();
        mu_pair(r, complement(r)) - y
    };
    // log(1/r) < mu(r) < log(4/r), widened against rounding
    let lo = -y - 1.0;
    let hi = (4f64.ln() - y + 1.0).min(-0.5 * 2f64.ln());
    let u = if f(hi) >= 0.0 {
        hi
    } else if f(lo) <= 0.0 {
        lo
    } else {
        bisect(f, lo, hi, 0.0)
    };
    let r = u.exp();
    (r, complement(r))
}

/// Inverse of [`mu`]. Below `y ≈ 0.25` the result rounds to 1.
pub fn mu_inv(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("mu_inv needs finite y > 0, got {y}"));
    }
    Ok(mu_inv_pair(y).0)
}

/// Hersch–Pfluger distortion function.
pub fn phi_k(k: f64, r: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("phi_K needs K > 0, got {k}"));
    }
    if !(0.0..=1.0).contains(&r) {
        return domain(format!("phi_K needs 0 <= r <= 1, got {r}"));
    }
    if r == 0.0 || r == 1.0 {
        return Ok(r);
    }
    Ok(mu_inv_pair(mu_pair(r, complement(r)) / k).0)
}

pub fn gamma2(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("gamma2 needs s > 1, got {s}"));
    }
    let rc = ((s - 1.0) * (s + 1.0)).sqrt() / s;
    Ok(2.0 * PI / mu_pair(1.0 / s, rc))
}

pub fn tau2(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("tau2 needs t > 0, got {t}"));
    }
    let r = (1.0 / (1.0 + t)).sqrt();
    let rc = (t / (1.0 + t)).sqrt();
    Ok(PI / mu_pair(r, rc))
}

pub fn gamma2_inv(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("gamma2_inv needs y > 0, got {y}"));
    }
    Ok(1.0 / mu_inv_pair(2.0 * PI / y).0)
}

pub fn tau2_inv(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("tau2_inv needs y > 0, got {y}"));
    }
    let (r, rc) = mu_inv_pair(PI / y);
    Ok((rc / r).powi(2))
}

/// Surface measure of the unit sphere in `R^n`.
pub fn omega_sphere(n: u32) -> Result<f64> {
    check_dim(n)?;
    // Γ(n/2) by the half-integer recursion
    let (mut g, mut k) = if n.is_multiple_of(2) { (1.0, 2) } else { (PI.sqrt(), 1) };
    while k + 2 <= n {
        g *= k as f64 / 2.0;
        k += 2;
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / g)
}

pub fn lambda_n_interval(n: u32) -> Result<Interval> {
    check_dim(n)?;
    if n == 2 {
        return Ok(Interval::exact(4.0));
    }
    Ok(Interval { lo: 4.0, hi: 2.0 * (n as f64 - 1.0).exp() })
}

fn lambda_hi_ln(n: u32) -> f64 {
    2f64.ln() + (n as f64 - 1.0)
}

pub fn tau_n_bounds(n: u32, t: f64) -> Result<Interval> {
    check_dim(n)?;
    if n == 2 {
        return tau2(t).map(Interval::exact);
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("tau_n needs t > 0, got {t}"));
    }
    let w = omega_sphere(n)?;
    let e = 1.0 - n as f64;
    let l = t.ln_1p();
    Ok(Interval {
        lo: w * (2.0 * lambda_hi_ln(n) + l).powf(e),
        hi: w * l.powf(e),
    })
}

pub fn gamma_n_bounds(n: u32, s: f64) -> Result<Interval> {
    check_dim(n)?;
    if n == 2 {
        return gamma2(s).map(Interval::exact);
    }
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("gamma_n needs s > 1, got {s}"));
    }
    let w = omega_sphere(n)?;
    let e = 1.0 - n as f64;
    let l = s.ln();
    Ok(Interval {
        lo: w * (lambda_hi_ln(n) + l).powf(e),
        hi: w * l.powf(e),
    })
}

/// Range of `t` compatible with `τ_n(t) = y`. The lower end is clamped at 0
/// when the lower bound curve gives no information.
pub fn tau_n_inv_bounds(n: u32, y: f64) -> Result<Interval> {
    check_dim(n)?;
    if n == 2 {
        return tau2_inv(y).map(Interval::exact);
    }
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("tau_n_inv needs y > 0, got {y}"));
    }
    let v = (omega_sphere(n)? / y).powf(1.0 / (n as f64 - 1.0));
    Ok(Interval {
        lo: (v - 2.0 * lambda_hi_ln(n)).exp_m1().max(0.0),
        hi: v.exp_m1(),
    })
}

/// Range of `s` compatible with `γ_n(s) = y`, clamped at 1 from below.
pub fn gamma_n_inv_bounds(n: u32, y: f64) -> Result<Interval> {
    check_dim(n)?;
    if n == 2 {
        return gamma2_inv(y).map(Interval::exact);
    }
    if !(y > 0.0) || !y.is_finite() {
        return domain(format!("gamma_n_inv needs y > 0, got {y}"));
    }
    let v = (omega_sphere(n)? / y).powf(1.0 / (n as f64 - 1.0));
    Ok(Interval {
        lo: (v - lambda_hi_ln(n)).exp().max(1.0),
        hi: v.exp(),
    })
}

/// `τ_n^{-1}(τ_n(t)/K)`.
pub fn eta_k_n(n: u32, k: f64, t: f64) -> Result<Interval> {
    check_dim(n)?;
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("eta needs K > 0, got {k}"));
    }
    if n == 2 {
        return tau2_inv(tau2(t)? / k).map(Interval::exact);
    }
    let tb = tau_n_bounds(n, t)?;
    // τ_n^{-1} is decreasing: the largest target gives the smallest preimage.
    let lo = tau_n_inv_bounds(n, tb.hi / k)?.lo;
    let hi = tau_n_inv_bounds(n, tb.lo / k)?.hi;
    Ok(Interval::ordered(lo, hi))
}

/// Lower bound for `φ_{1/K,n}(r)`.
///
/// For `n = 2` the exact value is `phi_k(1/K, r)`.
pub fn phi_kn_lower(n: u32, k: f64, r: f64) -> Result<f64> {
    check_dim(n)?;
    if !(k >= 1.0) || !k.is_finite() {
        return domain(format!("phi_Kn_lower needs K >= 1, got {k}"));
    }
    if !(0.0..=1.0).contains(&r) {
        return domain(format!("phi_Kn_lower needs 0 <= r <= 1, got {r}"));
    }
    let beta = k.powf(1.0 / (n as f64 - 1.0));
    let lam_ln = if n == 2 { 4f64.ln() } else { lambda_hi_ln(n) };
    let via_lambda = ((1.0 - beta) * lam_ln).exp();
    let via_k = 2f64.powf(1.0 - beta) * k.powf(-beta);
    Ok(via_lambda.max(via_k) * r.powf(beta))
}

/// Teichmüller's extremal function on the unit circle, `p(e^{iθ})`.
pub fn teichmuller_p_circle(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 2.0 * PI) {
        return domain(format!("p(e^(iθ)) needs 0 < θ < 2π, got {theta}"));
    }
    let q = 0.25 * theta;
    let y = 2.0 / PI * mu_pair(q.cos(), q.sin());
    Ok(y + 1.0 / y)
}

/// `(4/π) 𝒦(1/√2)²`.
pub fn b_constant() -> f64 {
    let k = FRAC_PI_2 / agm_unchecked(1.0, std::f64::consts::FRAC_1_SQRT_2);
    4.0 / PI * k * k
}
