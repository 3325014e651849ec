//! Ball inclusions for the quasihyperbolic, λ⁻¹ and μ balls, the circumscribed
//! λ-ball in the punctured plane and the punctured-disk modulus comparison.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::metrics::{quasihyperbolic_exact, ExactKind};
use crate::roots::bisect;
use crate::special::{gamma_n_inv_bounds, mu_inv_pair, tau2, tau_n_bounds, tau_n_inv_bounds, Interval};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallInclusionReport {
    pub inner_euclid_radius_factor: Option<f64>,
    pub outer_euclid_radius_factor: Option<f64>,
    pub aux_constants: BTreeMap<String, f64>,
    pub validity_note: String,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

/// `B(x, r d(x)) ⊂ D_k(x, M) ⊂ B(x, R d(x))`, r = 1 − e^{−M}, R = e^M − 1.
pub fn quasiball_radii(m: f64) -> Result<BallInclusionReport> {
    positive("M", m)?;
    Ok(BallInclusionReport {
        inner_euclid_radius_factor: Some(-(-m).exp_m1()),
        outer_euclid_radius_factor: Some(m.exp_m1()),
        aux_constants: BTreeMap::new(),
        validity_note: "all proper subdomains".into(),
    })
}

fn put_interval(map: &mut BTreeMap<String, f64>, name: &str, v: Interval) {
    if v.is_degenerate() {
        map.insert(name.into(), v.lo);
    } else {
        map.insert(format!("{name}_lo"), v.lo);
        map.insert(format!("{name}_hi"), v.hi);
    }
}

/// Constants c₁, c₂, c₃ of the λ⁻¹-ball inclusions at level t.
pub fn lambda_ball_constants(n: u32, t: f64) -> Result<BallInclusionReport> {
    positive("t", t)?;
    let c3 = tau_n_inv_bounds(n, t / SQRT_2)?;
    let c1 = Interval { lo: 1.0 / (1.0 + c3.hi), hi: 1.0 / (1.0 + c3.lo) };
    let u = tau_n_inv_bounds(n, 2.0 * t)?;
    let c2 = Interval { lo: (u.lo / (1.0 + u.lo)).sqrt(), hi: (u.hi / (1.0 + u.hi)).sqrt() };
    let mut aux = BTreeMap::new();
    put_interval(&mut aux, "c1", c1);
    put_interval(&mut aux, "c2", c2);
    put_interval(&mut aux, "c3", c3);
    aux.insert("k_inner_radius".into(), c2.lo.ln_1p());
    // t > √2 τ_n(1) forces c₃ < 1; in n ≥ 3 the known bound of c₃ decides
    let gate = if n == 2 { t > SQRT_2 * tau2(1.0)? } else { c3.hi < 1.0 };
    let note = if gate {
        aux.insert("k_outer_radius".into(), -(-c3.hi).ln_1p());
        "t > √2·τ_n(1): B(a, c₃d(a)) ⊂ D_k(a, log(1/(1−c₃)))"
    } else {
        "t ≤ √2·τ_n(1): no quasihyperbolic outer radius"
    };
    Ok(BallInclusionReport {
        inner_euclid_radius_factor: Some(c2.lo),
        outer_euclid_radius_factor: Some(c3.hi),
        aux_constants: aux,
        validity_note: note.into(),
    })
}

/// Constants d₁, d₂, d₃ of the μ-ball inclusions at level t (connected, nondegenerate boundary).
pub fn mu_ball_constants(n: u32, t: f64) -> Result<BallInclusionReport> {
    positive("t", t)?;
    let u = tau_n_inv_bounds(n, t)?;
    let d1 = Interval { lo: u.lo / (1.0 + u.lo), hi: u.hi / (1.0 + u.hi) };
    let g = gamma_n_inv_bounds(n, t)?;
    let d2 = Interval { lo: 1.0 / g.hi, hi: 1.0 / g.lo };
    let d3 = Interval { lo: 1.0 / u.hi, hi: if u.lo > 0.0 { 1.0 / u.lo } else { f64::INFINITY } };
    let mut aux = BTreeMap::new();
    put_interval(&mut aux, "d1", d1);
    put_interval(&mut aux, "d2", d2);
    put_interval(&mut aux, "d3", d3);
    aux.insert("k_inner_radius".into(), d2.lo.ln_1p());
    let gate = if n == 2 { t < tau2(1.0)? } else { d3.hi < 1.0 && t < tau_n_bounds(n, 1.0)?.lo };
    let note = if gate {
        aux.insert("k_outer_radius".into(), -(-d3.hi).ln_1p());
        "t < τ_n(1): B(a, d₃d(a)) ⊂ D_k(a, log(1/(1−d₃)))"
    } else {
        "t ≥ τ_n(1): no quasihyperbolic outer radius"
    };
    Ok(BallInclusionReport {
        inner_euclid_radius_factor: Some(d2.lo),
        outer_euclid_radius_factor: Some(d3.hi),
        aux_constants: aux,
        validity_note: note.into(),
    })
}

/// Angle θ(T) with λ_{R²∖{0}}(1, e^{iθ}) = 1/T.
pub fn circumscribed_lambda_angle(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 0.5) {
        return domain(format!("T must lie in (0, 1/2), got {t}"));
    }
    let y = PI * t / (1.0 + ((1.0 - 2.0 * t) * (1.0 + 2.0 * t)).sqrt());
    let (r, rc) = mu_inv_pair(y);
    // arccos r from the pair keeps θ accurate when r rounds to 1
    Ok(4.0 * rc.atan2(r))
}

/// Radius R_T = 2 sin(θ/2) of the smallest ball about 1 containing the λ-ball.
pub fn circumscribed_lambda_radius(t: f64) -> Result<f64> {
    Ok(2.0 * (0.5 * circumscribed_lambda_angle(t)?).sin())
}

fn check_rs(r: f64, s: f64) -> Result<()> {
    if !(r > 0.0 && r <= s && s < 1.0) {
        return domain(format!("need 0 < r <= s < 1, got r={r}, s={s}"));
    }
    Ok(())
}

pub fn m_gamma0(r: f64, s: f64) -> Result<f64> {
    check_rs(r, s)?;
    if s == r {
        return Err(Error::DegenerateFamily("M(Γ₀) is unbounded when s = r".into()));
    }
    tau2((s - r) * (1.0 - r * s) / (r * (1.0 - s).powi(2)))
}

pub fn m_delta0(r: f64) -> Result<f64> {
    check_rs(r, r)?;
    let q = (1.0 - r) * (1.0 + r);
    Ok(0.5 * tau2(4.0 * r * r / (q * q))?)
}

pub fn m_delta1(r: f64, s: f64) -> Result<f64> {
    check_rs(r, s)?;
    tau2(s * (1.0 + r).powi(2) / (r * (1.0 - s).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PuncturedDiskModuli {
    pub m_gamma0: f64,
    pub m_delta0: f64,
    pub m_delta1: f64,
}

pub fn punctured_disk_moduli(r: f64, s: f64) -> Result<PuncturedDiskModuli> {
    Ok(PuncturedDiskModuli { m_gamma0: m_gamma0(r, s)?, m_delta0: m_delta0(r)?, m_delta1: m_delta1(r, s)? })
}

pub fn quartic(r: f64) -> f64 {
    (((r - 8.0) * r - 2.0) * r - 8.0) * r + 1.0
}

/// Root of r⁴ − 8r³ − 2r² − 8r + 1 in (0, 1).
pub fn antipodal_threshold() -> f64 {
    bisect(|r| -quartic(r), 0.0, 1.0, 1e-12)
}

pub fn heikkala_r1(delta: f64) -> Result<f64> {
    positive("delta", delta)?;
    let d2 = delta * delta;
    // (√(δ⁴+64) − δ²)/8 without cancellation
    Ok(8.0 / ((d2 * d2 + 64.0).sqrt() + d2))
}

/// Real root of r³ + r² − 1.
pub fn heikkala_cubic_root() -> f64 {
    bisect(|r| (r + 1.0) * r * r - 1.0, 0.0, 1.0, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiballMargins {
    /// min over inner samples of M − k
    pub inner_slack: f64,
    /// min over outer samples of k − M
    pub outer_slack: f64,
}

/// Samples circles about e₁ in R²∖{0} just inside r·d and just outside R·d.
pub fn quasiball_margins(exec: Exec, m: f64, samples: usize) -> Result<QuasiballMargins> {
    let rep = quasiball_radii(m)?;
    let rin = rep.inner_euclid_radius_factor.unwrap() * (1.0 - 1e-3);
    let rout = rep.outer_euclid_radius_factor.unwrap() * (1.0 + 1e-3);
    let x = [1.0, 0.0];
    let k_at = |rho: f64, i: usize| {
        let phi = 2.0 * PI * i as f64 / samples as f64;
        quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &[1.0 + rho * phi.cos(), rho * phi.sin()])
    };
    let inner: Result<Vec<f64>> = exec.map(samples, |i| k_at(rin, i).map(|k| m - k)).into_iter().collect();
    let outer: Result<Vec<f64>> = exec.map(samples, |i| k_at(rout, i).map(|k| k - m)).into_iter().collect();
    Ok(QuasiballMargins {
        inner_slack: inner?.into_iter().fold(f64::INFINITY, f64::min),
        outer_slack: outer?.into_iter().fold(f64::INFINITY, f64::min),
    })
}
