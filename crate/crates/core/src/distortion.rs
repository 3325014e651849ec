//! Distortion bounds for quasiconformal maps of the unit ball with identity
//! boundary values, and for maps normalized at two points.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exec::{argmin_of, Exec};
use crate::roots::bisect;
use crate::special::{b_constant, eta_k_n, phi_k, phi_kn_lower, Interval};

/// `4 + 6 log 2`, the linear constant valid for `K <= 17`.
pub const STAB_CONST: f64 = 4.0 + 6.0 * LN_2;
pub const STAB_K_MAX: f64 = 17.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    RhoDisplacement,
    EuclidDisplacement,
    OriginDisplacement,
    CylinderQhDisplacement,
    GrowthEnvelope,
    LensDiameter,
    JTransfer,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::RhoDisplacement,
        Quantity::EuclidDisplacement,
        Quantity::OriginDisplacement,
        Quantity::CylinderQhDisplacement,
        Quantity::GrowthEnvelope,
        Quantity::LensDiameter,
        Quantity::JTransfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::RhoDisplacement => "rho_displacement",
            Quantity::EuclidDisplacement => "euclid_displacement",
            Quantity::OriginDisplacement => "origin_displacement",
            Quantity::CylinderQhDisplacement => "cylinder_qh_displacement",
            Quantity::GrowthEnvelope => "growth_envelope",
            Quantity::LensDiameter => "lens_diameter",
            Quantity::JTransfer => "j_transfer",
        }
    }

    pub fn parse(s: &str) -> Result<Quantity> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown quantity {s:?}")))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BoundValue {
    Number(f64),
    Interval(Interval),
}

impl BoundValue {
    /// The end that bounds the quantity from above.
    pub fn upper(&self) -> f64 {
        match self {
            BoundValue::Number(v) => *v,
            BoundValue::Interval(i) => i.hi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionBound {
    pub quantity: Quantity,
    pub value: BoundValue,
    pub validity: String,
    pub provenance: &'static str,
}

/// Extra inputs for the point-dependent quantities.
#[derive(Debug, Clone, Copy)]
pub struct DistortParams {
    pub x: [f64; 2],
    pub j: f64,
}

impl Default for DistortParams {
    fn default() -> Self {
        DistortParams { x: [0.5, 0.5], j: 1.0 }
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 1.0) || !k.is_finite() {
        return domain(format!("K must be finite and >= 1, got {k}"));
    }
    Ok(())
}

fn check_window(k: f64) -> Result<()> {
    if !(k > 1.0 && k <= 2.0) {
        return Err(Error::Validity(format!("needs 1 < K <= 2, got {k}")));
    }
    Ok(())
}

fn alpha(n: u32, k: f64) -> f64 {
    k.powf(1.0 / (1.0 - n as f64))
}

/// `exp(60 √(K−1))`.
pub fn c3(k: f64) -> f64 {
    (60.0 * (k - 1.0).sqrt()).exp()
}

/// Bounds for `log((1−a)/a)` with `a = φ_{1/K,n}(1/√2)²`, i.e. `log η_{K,n}(1)`.
pub fn id_boundary_rho_bound(n: u32, k: f64) -> Result<Interval> {
    check_k(k)?;
    if k == 1.0 {
        return Ok(Interval::exact(0.0));
    }
    let eta = eta_k_n(n, k, 1.0)?;
    if n == 2 {
        return Ok(Interval::exact(eta.lo.ln()));
    }
    let phi = phi_kn_lower(n, k, FRAC_1_SQRT_2)?;
    let mut hi = eta.hi.ln().min((1.0 / (phi * phi) - 1.0).ln());
    if k <= STAB_K_MAX {
        hi = hi.min(STAB_CONST * (k - 1.0));
    }
    let lo = eta.lo.max(1.0).ln().min(hi);
    Ok(Interval { lo, hi })
}

/// Upper bound for `|f(x) − x|`.
pub fn id_boundary_euclid_bound(n: u32, k: f64) -> Result<f64> {
    check_k(k)?;
    if n >= 3 && k > STAB_K_MAX {
        return Err(Error::Validity(format!("n >= 3 needs K <= 17, got {k}")));
    }
    let rho = id_boundary_rho_bound(n, k)?.hi;
    let mut best = 2.0 * (rho / 4.0).tanh();
    if k <= STAB_K_MAX {
        best = best.min(4.5 * (k - 1.0));
    }
    if n == 2 {
        best = best.min(0.5 * b_constant() * (k - 1.0));
    }
    Ok(best)
}

/// Upper bound for `|f(0)|`.
pub fn origin_displacement_bound(n: u32, k: f64) -> Result<f64> {
    check_k(k)?;
    if n == 2 {
        let a = phi_k(1.0 / k, FRAC_1_SQRT_2)?.powi(2);
        return Ok((1.0 - 2.0 * a).max(0.0));
    }
    let phi = phi_kn_lower(n, k, FRAC_1_SQRT_2)?;
    let eta = eta_k_n(n, k, 1.0)?.hi;
    let via_phi = 1.0 - 2.0 * phi * phi;
    let via_eta = (eta - 1.0) / (eta + 1.0);
    Ok(via_phi.min(via_eta).max(0.0))
}

/// The planar chain `|f(0)| ≤ 1 − 2^{3(1−K)} K^{−2K} ≤ (2 + 3 log 2)(K − 1)`.
pub fn origin_displacement_chain(k: f64) -> Result<[f64; 2]> {
    check_k(k)?;
    let mid = 1.0 - (3.0 * (1.0 - k) * LN_2 - 2.0 * k * k.ln()).exp();
    Ok([mid, (2.0 + 3.0 * LN_2) * (k - 1.0)])
}

fn mn_p(m: f64, n: f64, x: f64) -> f64 {
    // log(e^u − 1) without overflow
    let u = (m * x - m + 1.0) * LN_2 + n * x * x.ln();
    u + (-(-u).exp_m1()).ln()
}

fn mn_q(m: f64, n: f64, x: f64) -> f64 {
    (2.0 * m * LN_2 + 2.0 * n) * (x - 1.0)
}

#[allow(non_snake_case)]
pub fn mn_lemma_M(m: f64, n: f64) -> Result<f64> {
    if !(m >= 1.0 && n >= 1.0) {
        return domain(format!("mn lemma needs m, n >= 1, got ({m}, {n})"));
    }
    let t = (m * LN_2 - n) / (2.0 * n);
    let s = ((m - 1.0) * LN_2 + (1.0 + (n + m * LN_2).powi(2) / n).ln()) / n;
    Ok((s + t * t).sqrt() - t)
}

/// `p(x) − q(x)` for the mn lemma; non-positive on `[1, a]`.
pub fn mn_gap(m: f64, n: f64, x: f64) -> f64 {
    mn_p(m, n, x) - mn_q(m, n, x)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MnFixedPoint {
    pub a: f64,
    pub iterations: usize,
    pub residual: f64,
    pub upper_bound: f64,
}

pub fn mn_fixed_point(m: f64, n: f64) -> Result<MnFixedPoint> {
    let mut a = mn_lemma_M(m, n)?;
    let upper_bound = 2f64.powf(2.0 * m / n) * std::f64::consts::E.powi(2);
    let mut iterations = 0;
    loop {
        let y = mn_q(m, n, a);
        let mut hi = a.max(2.0);
        while mn_p(m, n, hi) < y {
            hi *= 2.0;
        }
        let next = bisect(|x| mn_p(m, n, x) - y, 1.0, hi, 1e-15);
        iterations += 1;
        let step = (next - a).abs();
        a = next;
        if step < 1e-10 || iterations >= 100_000 {
            break;
        }
    }
    Ok(MnFixedPoint { a, iterations, residual: mn_gap(m, n, a).abs(), upper_bound })
}

pub fn radial_stretch_delta(n: u32, k: f64) -> Result<f64> {
    if !(k > 1.0) || !k.is_finite() {
        return domain(format!("radial stretch needs K > 1, got {k}"));
    }
    let a = alpha(n, k);
    Ok((1.0 - a) * a.powf(a / (1.0 - a)))
}

/// Admissible range of `|f(x)|` for a K-qc self-map of the ball with
/// `m ≤ |f(z)| ≤ M` on the boundary.
pub fn annular_image_bounds(n: u32, k: f64, m: f64, big_m: f64, absx: f64) -> Result<Interval> {
    check_k(k)?;
    if !(m > 0.0 && m <= 1.0) || !(big_m >= 1.0) || !big_m.is_finite() {
        return domain(format!("needs 0 < m <= 1 <= M, got m = {m}, M = {big_m}"));
    }
    if !(0.0..1.0).contains(&absx) {
        return domain(format!("needs 0 <= |x| < 1, got {absx}"));
    }
    let t = (1.0 + absx) / (1.0 - absx);
    let up = eta_k_n(n, k, t)?.hi;
    let low = eta_k_n(n, 1.0 / k, t)?.lo;
    let hi = (up * big_m - m) / (1.0 + up);
    let lo = ((low * m - big_m) / (1.0 + low)).max(0.0);
    Interval::new(lo.min(hi), hi)
}

pub fn cylinder_bound(_n: u32, k: f64) -> Result<f64> {
    check_k(k)?;
    let e = 18.0 * (k - 1.0);
    Ok(e.exp_m1().sqrt() + e)
}

/// Candidate bounds for `η*_K(1)`, labelled.
pub fn eta_star_one_candidates(k: f64) -> Result<Vec<(&'static str, f64)>> {
    if !(k > 1.0) || !k.is_finite() {
        return domain(format!("eta*(1) needs K > 1, got {k}"));
    }
    let d = k - 1.0;
    let mut out = vec![
        ("log_form", ((4.0 * 2f64.sqrt() - d.ln()) * (k * k - 1.0)).exp()),
        ("sqrt_form", (4.0 * k * (k + 1.0) * d.sqrt()).exp()),
    ];
    if k < 4.0 / 3.0 {
        out.push(("prause", 1.0 + 600.0 * d * (1.0 / d).ln()));
    }
    Ok(out)
}

pub fn eta_star_one_bound(k: f64) -> Result<f64> {
    Ok(eta_star_one_candidates(k)?.into_iter().map(|c| c.1).fold(f64::INFINITY, f64::min))
}

/// Envelope for `|f(x)|` when `f` is K-qc and fixes `0`, `e₁`, `∞`.
pub fn two_point_growth_bounds(n: u32, k: f64, absx: f64) -> Result<Interval> {
    check_window(k)?;
    if !(absx > 0.0) || !absx.is_finite() {
        return domain(format!("needs |x| > 0, got {absx}"));
    }
    let a = alpha(n, k);
    let b = 1.0 / a;
    let c = c3(k);
    let (lo_p, hi_p) = if absx <= 1.0 { (b, a) } else { (a, b) };
    Ok(Interval::ordered(absx.powf(lo_p) / c, c * absx.powf(hi_p)))
}

fn norm2(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

fn to_e1(x: [f64; 2]) -> f64 {
    (x[0] - 1.0).hypot(x[1])
}

pub fn lens_diam_bound_sqrt(x: [f64; 2], eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("needs 0 < eps < 1, got {eps}"));
    }
    Ok(eps.sqrt() * 4.0 * (norm2(x).min(to_e1(x)) + 1.0))
}

/// Upper end of the admissible ε range for the linear lens bound.
pub fn lens_linear_window(x: [f64; 2]) -> f64 {
    let (a, d) = (norm2(x), to_e1(x));
    1f64.min((1.0 + d - a) / 2.0).min((a + d - 1.0) / 2.0)
}

pub fn lens_diam_bound_linear(x: [f64; 2], eps: f64, omega: f64) -> Result<f64> {
    let (a, d) = (norm2(x), to_e1(x));
    if !(omega > 0.0) {
        return Err(Error::Precondition(format!("needs ω > 0, got {omega}")));
    }
    if !(a < 2.0 && d <= a) {
        return Err(Error::Precondition(format!("needs |x| < 2 and |x − e1| <= |x|, got {a}, {d}")));
    }
    let angle = x[1].abs().atan2(x[0]);
    if angle < omega {
        return Err(Error::Precondition(format!("angle {angle} at 0 is below ω = {omega}")));
    }
    let w = lens_linear_window(x);
    if !(eps > 0.0 && eps < w) {
        return Err(Error::Precondition(format!("eps = {eps} outside (0, {w})")));
    }
    Ok(eps * (1.0 + 70.0 / omega))
}

/// Cosine range of the polar angle at radius `r` allowed by the annulus around `e₁`.
fn cos_range(r: f64, d: f64, eps: f64) -> Option<(f64, f64)> {
    if r <= 0.0 {
        return None;
    }
    let lo = ((r * r + 1.0 - (d + eps).powi(2)) / (2.0 * r)).max(-1.0);
    let hi = if d > eps { (r * r + 1.0 - (d - eps).powi(2)) / (2.0 * r) } else { 1.0 };
    let hi = hi.min(1.0);
    (lo <= hi).then_some((lo, hi))
}

/// Monte Carlo diameter of the lens `A(0,|x|±ε) ∩ A(e₁,|x−e₁|±ε)`, taken in
/// the closed half-plane containing `x`. Returns 0 when no sample lands in it.
pub fn lens_diam_brute(x: [f64; 2], eps: f64, samples: usize, seed: u64) -> Result<f64> {
    if samples < 10_000 {
        return Err(Error::Precondition(format!("needs at least 1e4 samples, got {samples}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return domain(format!("needs eps > 0, got {eps}"));
    }
    let (a, d) = (norm2(x), to_e1(x));
    let (r0, r1) = ((a - eps).max(0.0), a + eps);
    // proposal box in polar coordinates
    let (mut p0, mut p1) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=256 {
        let r = r0 + (r1 - r0) * i as f64 / 256.0;
        if let Some((lo, hi)) = cos_range(r, d, eps) {
            p0 = p0.min(hi.acos());
            p1 = p1.max(lo.acos());
        }
    }
    if p0 > p1 {
        return Ok(0.0);
    }
    let pad = 0.02 * (p1 - p0) + 1e-9;
    let (p0, p1) = ((p0 - pad).max(0.0), (p1 + pad).min(PI));
    let sign = if x[1] < 0.0 { -1.0 } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(samples);
    let mut proposals = 0usize;
    while pts.len() < samples && proposals < samples * 100 {
        proposals += 1;
        let r = (rng.gen::<f64>() * (r1 * r1 - r0 * r0) + r0 * r0).sqrt();
        let phi = p0 + (p1 - p0) * rng.gen::<f64>();
        let z = [r * phi.cos(), sign * r * phi.sin()];
        let dz = to_e1(z);
        if (dz - d).abs() <= eps && (norm2(z) - a).abs() <= eps {
            pts.push(z);
        }
    }
    Ok(hull_diameter(&mut pts))
}

fn hull_diameter(pts: &mut [[f64; 2]]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best = 0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max((hull[i][0] - hull[j][0]).hypot(hull[i][1] - hull[j][1]));
        }
    }
    best
}

/// Largest `K` for which `||f(x)| − |x|| ≤ ε` is guaranteed.
///
/// The cap is the smaller of the two candidates: the argument only
/// establishes the bound for `K ≤ 2`.
pub fn eps_to_k(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return domain(format!("needs eps > 0, got {eps}"));
    }
    Ok(((eps.ln_1p() / 60.0).powi(2) + 1.0).min(2.0))
}

/// Upper bound for `j_G(f(x), f(y))` given `j_G(x, y)`.
pub fn j_distortion_bound(n: u32, k: f64, j: f64) -> Result<f64> {
    check_window(k)?;
    if !(j >= 0.0) || !j.is_finite() {
        return domain(format!("needs j >= 0, got {j}"));
    }
    let a = alpha(n, k);
    Ok(c3(k) / a * j.powf(a).max(j))
}

#[derive(Debug, Clone, Serialize)]
pub struct SlackEntry {
    pub name: &'static str,
    pub min_slack: f64,
    pub argmin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabReport {
    pub k: f64,
    pub n: u32,
    pub entries: Vec<SlackEntry>,
}

impl StabReport {
    pub fn min_slack(&self) -> f64 {
        self.entries.iter().map(|e| e.min_slack).fold(f64::INFINITY, f64::min)
    }
}

fn grid_slack(exec: Exec, name: &'static str, grid: &[f64], f: impl Fn(f64) -> f64 + Sync + Send) -> SlackEntry {
    let vals = exec.map(grid.len(), |i| f(grid[i]));
    let (i, min_slack) = argmin_of(&vals).unwrap_or((0, f64::NAN));
    SlackEntry { name, min_slack, argmin: grid[i] }
}

/// Slack of the linear displacement inequalities at `K` and of the two
/// growth lemmas on a dense `t` grid.
pub fn stabrmk_checks(exec: Exec, n: u32, k: f64) -> Result<StabReport> {
    check_window(k)?;
    let rho = id_boundary_rho_bound(n, k)?.hi;
    let mut entries = vec![
        SlackEntry { name: "rho_le_stab_linear", min_slack: STAB_CONST * (k - 1.0) - rho, argmin: k },
        SlackEntry { name: "stab_linear_lt_9", min_slack: (9.0 - STAB_CONST) * (k - 1.0), argmin: k },
    ];
    if n == 2 {
        entries.push(SlackEntry { name: "rho_le_b_linear", min_slack: b_constant() * (k - 1.0) - rho, argmin: k });
        entries.push(SlackEntry { name: "rho_gt_pi_linear", min_slack: rho - PI * (k - 1.0), argmin: k });
    }
    let a = alpha(n, k);
    let b = 1.0 / a;
    let c = c3(k);
    let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 1e-3).collect();
    entries.push(grid_slack(exec, "c3_crossing", &grid, |t| {
        if t < 1.0 {
            (c * t.powf(a) - t) - (t - t.powf(b) / c)
        } else {
            (c * t.powf(b) - t) - (t - t.powf(a) / c)
        }
    }));
    entries.push(grid_slack(exec, "log_small_t", &grid[..1000], |t| {
        c / a * t.ln_1p().powf(a) - (c * t.powf(a).max(t.powf(b))).ln_1p()
    }));
    entries.push(grid_slack(exec, "log_large_t", &grid[999..], |t| {
        c / a * t.ln_1p() - (c * t.powf(a).max(t.powf(b))).ln_1p()
    }));
    Ok(StabReport { k, n, entries })
}

pub fn evaluate(q: Quantity, n: u32, k: f64, p: &DistortParams) -> Result<DistortionBound> {
    let absx = norm2(p.x);
    let (value, validity, provenance) = match q {
        Quantity::RhoDisplacement => (
            BoundValue::Interval(id_boundary_rho_bound(n, k)?),
            format!("n={n}, K>=1"),
            "log((1-a)/a), a = phi_{1/K,n}(1/sqrt2)^2",
        ),
        Quantity::EuclidDisplacement => (
            BoundValue::Number(id_boundary_euclid_bound(n, k)?),
            if n == 2 { "n=2, K>=1".into() } else { format!("n={n}, 1<=K<=17") },
            "min(2 tanh(rho/4), 9/2 (K-1), b/2 (K-1) in the plane)",
        ),
        Quantity::OriginDisplacement => (
            BoundValue::Number(origin_displacement_bound(n, k)?),
            format!("n={n}, K>=1"),
            "|f(0)| <= 1 - 2a",
        ),
        Quantity::CylinderQhDisplacement => (
            BoundValue::Number(cylinder_bound(n, k)?),
            format!("n={n}, K>=1"),
            "sqrt(e^{18(K-1)}-1) + 18(K-1)",
        ),
        Quantity::GrowthEnvelope => (
            BoundValue::Interval(two_point_growth_bounds(n, k, absx)?),
            format!("n={n}, 1<K<=2, |x|={absx}"),
            "c3 = exp(60 sqrt(K-1)) envelope",
        ),
        Quantity::LensDiameter => {
            check_window(k)?;
            let eps = c3(k) - 1.0;
            if eps >= 1.0 {
                return Err(Error::Validity(format!("lens bound needs eps(K) < 1, got {eps} at K = {k}")));
            }
            (
                BoundValue::Number(lens_diam_bound_sqrt(p.x, eps)?),
                format!("n={n}, eps(K)={eps}"),
                "diam(A) <= 4 sqrt(eps)(min(|x|,|x-e1|)+1)",
            )
        }
        Quantity::JTransfer => (
            BoundValue::Number(j_distortion_bound(n, k, p.j)?),
            format!("n={n}, 1<K<=2, j={}", p.j),
            "(c3/alpha) max(j^alpha, j)",
        ),
    };
    Ok(DistortionBound { quantity: q, value, validity, provenance })
}
