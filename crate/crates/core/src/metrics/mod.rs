//! Chordal, distance-ratio, quasihyperbolic, Seittenranta, Apollonian and
//! hyperbolic metrics, plus two-sided bounds for μ_G and λ_G.

mod domain;
mod qh;

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

pub use domain::{sphere_samples, CanonicalKind, DistOracle, DomainFlags, DomainSpec, ExtendedPoint, Membership, DOMAIN_NAMES};
pub use qh::{inner_length_numeric, quasihyperbolic_numeric, quasihyperbolic_numeric_with, GraphOptions};

pub(crate) use domain::{dist, dot, norm};

use crate::error::{domain as domain_err, Error, Result};
use crate::exec::Exec;
use crate::special::{gamma_n_bounds, omega_sphere, tau_n_bounds, teichmuller_p_circle, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub exact: bool,
}

impl MetricValue {
    fn exact(value: f64) -> Self {
        MetricValue { value, exact: true }
    }
}

/// Spherical (chordal) metric on the extended space.
pub fn chordal(x: &ExtendedPoint, y: &ExtendedPoint) -> f64 {
    match (x.coords(), y.coords()) {
        (None, None) => 0.0,
        (Some(a), None) | (None, Some(a)) => 1.0 / (1.0 + dot(a, a)).sqrt(),
        (Some(a), Some(b)) => {
            debug_assert_eq!(a.len(), b.len());
            dist(a, b) / ((1.0 + dot(a, a)).sqrt() * (1.0 + dot(b, b)).sqrt())
        }
    }
}

/// `|a,b,c,d| = q(a,c) q(b,d) / (q(a,b) q(c,d))`.
pub fn cross_ratio(a: &ExtendedPoint, b: &ExtendedPoint, c: &ExtendedPoint, d: &ExtendedPoint) -> Result<f64> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return domain_err("cross ratio needs four distinct points");
            }
        }
    }
    Ok(chordal(a, c) * chordal(b, d) / (chordal(a, b) * chordal(c, d)))
}

pub fn j_metric(d: &DomainSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let dx = d.require_interior(x)?;
    let dy = d.require_interior(y)?;
    if x == y {
        return Ok(0.0);
    }
    Ok((dist(x, y) / dx.min(dy)).ln_1p())
}

pub fn j_diameter(d: &DomainSpec, a: &[Vec<f64>]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (i, x) in a.iter().enumerate() {
        for y in &a[i + 1..] {
            best = best.max(j_metric(d, x, y)?);
        }
    }
    if a.len() == 1 {
        d.require_interior(&a[0])?;
    }
    Ok(best)
}

/// `d(A) / d(A, ∂G)`.
pub fn r_ratio(d: &DomainSpec, a: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() {
        return domain_err("empty point set");
    }
    let mut dmin = f64::INFINITY;
    let mut diam: f64 = 0.0;
    for (i, x) in a.iter().enumerate() {
        dmin = dmin.min(d.require_interior(x)?);
        for y in &a[i + 1..] {
            diam = diam.max(dist(x, y));
        }
    }
    Ok(diam / dmin)
}

fn finite_samples_check(d: &DomainSpec) -> Result<()> {
    if d.boundary_samples.len() < 2 {
        return domain_err("at least two boundary samples are required");
    }
    Ok(())
}

pub fn seittenranta(d: &DomainSpec, x: &[f64], y: &[f64]) -> Result<MetricValue> {
    seittenranta_with(Exec::default(), d, x, y)
}

pub fn seittenranta_with(exec: Exec, d: &DomainSpec, x: &[f64], y: &[f64]) -> Result<MetricValue> {
    finite_samples_check(d)?;
    d.require_interior(x)?;
    d.require_interior(y)?;
    if x == y {
        return Ok(MetricValue::exact(0.0));
    }
    let px = ExtendedPoint::finite(x);
    let py = ExtendedPoint::finite(y);
    let s = &d.boundary_samples;
    let qax: Vec<f64> = s.iter().map(|a| chordal(a, &px)).collect();
    let qby: Vec<f64> = s.iter().map(|b| chordal(b, &py)).collect();
    let qxy = chordal(&px, &py);
    let m = exec.max(s.len(), |i| {
        let mut best: f64 = 0.0;
        for j in 0..s.len() {
            if i != j {
                best = best.max(chordal(&s[i], &s[j]) * qxy / (qax[i] * qby[j]));
            }
        }
        best
    });
    Ok(MetricValue { value: m.ln_1p(), exact: d.boundary_exact })
}

pub fn apollonian(d: &DomainSpec, x: &[f64], y: &[f64]) -> Result<MetricValue> {
    finite_samples_check(d)?;
    d.require_interior(x)?;
    d.require_interior(y)?;
    if x == y {
        return Ok(MetricValue::exact(0.0));
    }
    let px = ExtendedPoint::finite(x);
    let py = ExtendedPoint::finite(y);
    // |a,x,y,b| = u(a)/u(b) with u(a) = q(a,y)/q(a,x); the sup over a ≠ b separates
    let u: Vec<f64> = d.boundary_samples.iter().map(|a| chordal(a, &py) / chordal(a, &px)).collect();
    let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MetricValue { value: (hi / lo).ln().max(0.0), exact: d.boundary_exact })
}

/// Hyperbolic distance in the unit ball.
pub fn hyperbolic_ball(x: &[f64], y: &[f64]) -> Result<f64> {
    let (nx, ny) = (norm(x), norm(y));
    if nx >= 1.0 || ny >= 1.0 {
        return domain_err("hyperbolic_ball needs points of the open unit ball");
    }
    let d2 = dist(x, y).powi(2);
    if d2 == 0.0 {
        return Ok(0.0);
    }
    let t2 = (1.0 - nx) * (1.0 + nx) * (1.0 - ny) * (1.0 + ny);
    Ok(2.0 * (d2 / (d2 + t2)).sqrt().atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactKind {
    HalfSpace,
    PuncturedSpace,
}

/// Angle between two nonzero vectors, accurate near 0 and π.
pub(crate) fn angle_between(x: &[f64], y: &[f64]) -> f64 {
    let (nx, ny) = (norm(x), norm(y));
    let mut dm = 0.0;
    let mut dp = 0.0;
    for (a, b) in x.iter().zip(y) {
        dm += (a / nx - b / ny).powi(2);
        dp += (a / nx + b / ny).powi(2);
    }
    2.0 * dm.sqrt().atan2(dp.sqrt())
}

pub fn quasihyperbolic_exact(kind: ExactKind, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return domain_err("points must share a dimension n >= 2");
    }
    match kind {
        ExactKind::PuncturedSpace => {
            let (nx, ny) = (norm(x), norm(y));
            if nx == 0.0 || ny == 0.0 {
                return domain_err("the origin is a boundary point");
            }
            if x == y {
                return Ok(0.0);
            }
            let l = (nx / ny).ln();
            Ok(l.hypot(angle_between(x, y)))
        }
        ExactKind::HalfSpace => {
            let n = x.len() - 1;
            if !(x[n] > 0.0 && y[n] > 0.0) {
                return domain_err("half-space points need a positive last coordinate");
            }
            Ok(2.0 * (dist(x, y) / (2.0 * (x[n] * y[n]).sqrt())).asinh())
        }
    }
}

fn exact_kind_of(d: &DomainSpec) -> Option<ExactKind> {
    match d.kind {
        CanonicalKind::HalfSpace => Some(ExactKind::HalfSpace),
        CanonicalKind::PuncturedSpace => Some(ExactKind::PuncturedSpace),
        _ => None,
    }
}

/// `k_G`, exact for canonical half-spaces and punctured spaces, numeric otherwise.
pub fn quasihyperbolic(d: &DomainSpec, x: &[f64], y: &[f64], tol: f64) -> Result<MetricValue> {
    match exact_kind_of(d) {
        Some(kind) => {
            d.require_interior(x)?;
            d.require_interior(y)?;
            quasihyperbolic_exact(kind, x, y).map(MetricValue::exact)
        }
        None => quasihyperbolic_numeric(d, x, y, tol),
    }
}

/// `μ_{B^n}(0, x) = γ_n(1/|x|)`.
pub fn mu_ball_center(n: u32, x: &[f64]) -> Result<Interval> {
    let r = norm(x);
    if !(r > 0.0 && r < 1.0) {
        return domain_err("mu_ball_center needs 0 < |x| < 1");
    }
    gamma_n_bounds(n, 1.0 / r)
}

const H2_ALPHA_NUM: f64 = 9.0 / 8.0;

/// Explicit planar h with `μ_G ≤ h(3 k_G)`; α = (9/8) log 2, β = 1.
pub fn h2_plane(t: f64) -> f64 {
    let alpha = H2_ALPHA_NUM * 2f64.ln();
    let beta = 1.0;
    if t <= 0.0 {
        0.0
    } else if t <= 0.25 {
        2.0 * PI * alpha / (1.0 / (2.0 * t)).ln()
    } else {
        36.0 * beta * PI * t * t
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MuConfig {
    /// The dimension constant c_n; no default exists.
    pub cn: Option<f64>,
    /// Tolerance for a numeric k_G when no closed form is available.
    pub numeric_k_tol: Option<f64>,
}

pub fn mu_bounds(d: &DomainSpec, x: &[f64], y: &[f64], cfg: &MuConfig) -> Result<Interval> {
    let dx = d.require_interior(x)?;
    d.require_interior(y)?;
    if x == y {
        return Ok(Interval::exact(0.0));
    }
    let n = d.dimension;
    let dxy = dist(x, y);
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    let mut any = false;
    if d.flags.boundary_connected {
        if let Some(cn) = cfg.cn {
            lo = lo.max(cn * j_metric(d, x, y)?);
            any = true;
        }
    }
    if dxy < dx {
        let s = dx / dxy;
        let w = omega_sphere(n)?;
        hi = hi.min(w * s.ln().powf(1.0 - n as f64));
        hi = hi.min(gamma_n_bounds(n, s)?.hi);
        any = true;
    }
    if n == 2 {
        let k = match exact_kind_of(d) {
            Some(kind) => Some(quasihyperbolic_exact(kind, x, y)?),
            None => match cfg.numeric_k_tol {
                Some(tol) => Some(quasihyperbolic_numeric(d, x, y, tol)?.value),
                None => None,
            },
        };
        if let Some(k) = k {
            hi = hi.min(h2_plane(3.0 * k));
            any = true;
        }
    }
    if !any {
        return Err(Error::Unsupported("no bound for μ_G applies to this pair".into()));
    }
    if lo > hi {
        return Err(Error::Inconsistent(format!("lower {lo} exceeds upper {hi}; check c_n")));
    }
    Ok(Interval { lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaBounds {
    pub lambda: Interval,
    pub inverse: Interval,
}

/// Two-sided bounds for λ_G(x, y); `cn` enables the ball-local lower bound.
pub fn lambda_bounds(d: &DomainSpec, x: &[f64], y: &[f64], cn: Option<f64>) -> Result<LambdaBounds> {
    let dx = d.require_interior(x)?;
    let dy = d.require_interior(y)?;
    if x == y {
        return Ok(LambdaBounds {
            lambda: Interval::exact(f64::INFINITY),
            inverse: Interval::exact(0.0),
        });
    }
    let n = d.dimension;
    let dxy = dist(x, y);
    let s = dxy / dx.min(dy);
    let hi = SQRT_2 * tau_n_bounds(n, s)?.hi;
    let mut lo = 0.0f64;
    if let Some(c) = d.flags.qed_constant {
        lo = lo.max(c * tau_n_bounds(n, s * s + 2.0 * s)?.lo);
    }
    if let Some(cn) = cn {
        if dxy < dx {
            lo = lo.max(cn * (dx / dxy).ln());
        }
    }
    let lambda = Interval::new(lo, hi)?;
    Ok(LambdaBounds {
        lambda,
        inverse: Interval { lo: 1.0 / hi, hi: if lo > 0.0 { 1.0 / lo } else { f64::INFINITY } },
    })
}

/// `λ_{R²∖{0}}(1, e^{iθ})`.
pub fn lambda_punctured_plane_circle(theta: f64) -> Result<f64> {
    teichmuller_p_circle(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[f64]) -> ExtendedPoint {
        ExtendedPoint::finite(c)
    }

    fn invert(x: &ExtendedPoint) -> ExtendedPoint {
        match x.coords() {
            None => p(&[0.0, 0.0]),
            Some(c) => {
                let r2 = dot(c, c);
                if r2 == 0.0 {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite(c.iter().map(|v| v / r2).collect())
                }
            }
        }
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal(&p(&[0.0, 0.0]), &ExtendedPoint::Infinity), 1.0);
        assert!((chordal(&p(&[0.0, 0.0]), &p(&[1.0, 0.0])) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal(&ExtendedPoint::Infinity, &ExtendedPoint::Infinity), 0.0);
    }

    #[test]
    fn cross_ratio_examples() {
        let v = cross_ratio(&p(&[0.0, 0.0]), &p(&[1.0, 0.0]), &p(&[2.0, 0.0]), &ExtendedPoint::Infinity).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        assert!(cross_ratio(&p(&[0.0, 0.0]), &p(&[0.0, 0.0]), &p(&[2.0, 0.0]), &ExtendedPoint::Infinity).is_err());
    }

    #[test]
    fn j_examples() {
        let g = DomainSpec::punctured_space(2).unwrap();
        assert!((j_metric(&g, &[1.0, 0.0], &[2.0, 0.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(j_metric(&g, &[1.0, 0.3], &[1.0, 0.3]).unwrap(), 0.0);
        assert_eq!(j_diameter(&g, &[vec![1.0, 0.0]]).unwrap(), 0.0);
        assert!((r_ratio(&g, &[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap() - 1.0).abs() < 1e-15);
        let pts = vec![vec![1.0, 0.0], vec![0.0, 3.0], vec![-0.5, -0.5]];
        let mut want: f64 = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                want = want.max(j_metric(&g, &pts[i], &pts[k]).unwrap());
            }
        }
        assert_eq!(j_diameter(&g, &pts).unwrap(), want);
    }

    #[test]
    fn hyperbolic_examples() {
        let r: f64 = 0.5;
        let v = hyperbolic_ball(&[0.0, 0.0], &[r, 0.0]).unwrap();
        assert!((v - ((1.0 + r) / (1.0 - r)).ln()).abs() < 1e-14);
        let x = [0.3, 0.0];
        let y = [-0.3, 0.0];
        let rho = hyperbolic_ball(&x, &y).unwrap();
        assert!((dist(&x, &y) - 2.0 * (rho / 4.0).tanh()).abs() < 1e-14);
        assert!(hyperbolic_ball(&[1.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn exact_k_examples() {
        for n in 1..=10 {
            let nf = n as f64;
            let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[nf, 0.0], &[nf + 1.0, 0.0]).unwrap();
            assert!((k - ((nf + 1.0) / nf).ln()).abs() < 1e-12);
        }
        let a = (4.0 * PI).exp();
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[a, 0.0], &[a * a, 0.0]).unwrap();
        assert!((k - 4.0 * PI).abs() < 1e-9);
        let k = quasihyperbolic_exact(ExactKind::HalfSpace, &[0.0, 1.0], &[0.0, std::f64::consts::E]).unwrap();
        assert!((k - 1.0).abs() < 1e-14);
        // half-space against ∫ dt/t along a vertical segment and the arcosh form
        let (x, y) = ([0.3, 0.7], [1.9, 0.2]);
        let k = quasihyperbolic_exact(ExactKind::HalfSpace, &x, &y).unwrap();
        let c = 1.0 + dist(&x, &y).powi(2) / (2.0 * x[1] * y[1]);
        assert!((k - c.acosh()).abs() < 1e-12);
        // punctured plane: opposite points on the unit circle are π apart
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[1.0, 0.0], &[-1.0, 0.0]).unwrap();
        assert!((k - PI).abs() < 1e-15);
        assert!(quasihyperbolic_exact(ExactKind::PuncturedSpace, &[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(quasihyperbolic_exact(ExactKind::HalfSpace, &[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn seittenranta_examples() {
        let g = DomainSpec::punctured_space(2).unwrap();
        let (x, y) = ([1.0, 0.0], [2.0, 0.0]);
        let d = seittenranta(&g, &x, &y).unwrap();
        assert!(d.exact);
        assert!(d.value >= j_metric(&g, &x, &y).unwrap() - 1e-12);
        assert_eq!(seittenranta(&g, &x, &x).unwrap().value, 0.0);
        let thin = DomainSpec::new(
            2,
            std::sync::Arc::new(norm),
            std::sync::Arc::new(|x| norm(x) > 0.0),
            vec![p(&[0.0, 0.0])],
            f64::INFINITY,
            DomainFlags::default(),
        )
        .unwrap();
        assert!(seittenranta(&thin, &x, &y).is_err());
        assert!(apollonian(&thin, &x, &y).is_err());
    }

    #[test]
    fn half_plane_j_delta_alpha() {
        let h = DomainSpec::half_space(2, 4001).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(0.2..2.0)];
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(0.2..2.0)];
            let j = j_metric(&h, &x, &y).unwrap();
            let d = seittenranta(&h, &x, &y).unwrap().value;
            let a = apollonian(&h, &x, &y).unwrap().value;
            assert!(d <= 2.0 * j + 1e-12, "δ ≤ 2j");
            assert!(d >= j - 1e-3, "j ≤ δ: j={j} δ={d}");
            assert!(a >= j - 1e-3, "j ≤ α: j={j} α={a}");
            let a2 = apollonian(&h, &y, &x).unwrap().value;
            assert!((a - a2).abs() < 1e-12);
        }
    }

    #[test]
    fn j_below_exact_k() {
        let g = DomainSpec::punctured_space(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let j = j_metric(&g, &x, &y).unwrap();
            let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y).unwrap();
            assert!(j <= k + 1e-12);
        }
    }

    #[test]
    fn exact_k_isometry_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)];
            let y = [rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)];
            let k = quasihyperbolic_exact(ExactKind::HalfSpace, &x, &y).unwrap();
            // translation along the boundary and reflection keep H²
            let s = rng.gen_range(-5.0..5.0);
            let k2 = quasihyperbolic_exact(ExactKind::HalfSpace, &[-(x[0] + s), x[1]], &[-(y[0] + s), y[1]]).unwrap();
            assert!((k - k2).abs() < 1e-10 * k.max(1.0));
            // rotations about the puncture
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            let rot = |v: &[f64]| [a.cos() * v[0] - a.sin() * v[1], a.sin() * v[0] + a.cos() * v[1]];
            let kp = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y).unwrap();
            let kr = quasihyperbolic_exact(ExactKind::PuncturedSpace, &rot(&x), &rot(&y)).unwrap();
            assert!((kp - kr).abs() < 1e-10 * kp.max(1.0));
        }
    }

    #[test]
    fn mu_ball_center_examples() {
        let v = mu_ball_center(2, &[0.5f64.sqrt(), 0.0]).unwrap();
        assert!((v.lo - 4.0).abs() < 1e-13 && v.is_degenerate());
        let a = mu_ball_center(2, &[0.1, 0.0]).unwrap().lo;
        let b = mu_ball_center(2, &[0.9, 0.0]).unwrap().lo;
        assert!(a < b);
        let v3 = mu_ball_center(3, &[0.5, 0.0, 0.0]).unwrap();
        assert!(v3.lo < v3.hi);
        assert_eq!(v3, gamma_n_bounds(3, 2.0).unwrap());
        assert!(mu_ball_center(2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn mu_bounds_examples() {
        let g = DomainSpec::punctured_space(2).unwrap();
        let b = mu_bounds(&g, &[1.0, 0.0], &[1.1, 0.0], &MuConfig::default()).unwrap();
        assert!(b.hi <= 2.0 * PI / 10f64.ln() + 1e-12);
        assert_eq!(mu_bounds(&g, &[1.0, 0.0], &[1.0, 0.0], &MuConfig::default()).unwrap(), Interval::exact(0.0));
        // far pair: only the h₂(3k) branch applies
        let (x, y) = ([1.0, 0.0], [3.0, 0.0]);
        let b = mu_bounds(&g, &x, &y, &MuConfig::default()).unwrap();
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y).unwrap();
        assert!((b.hi - h2_plane(3.0 * k)).abs() < 1e-12);
        // small k: the logarithmic branch
        let (x, y) = ([1.0, 0.0], [1.01, 0.0]);
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y).unwrap();
        let want = 2.0 * PI * (9.0 / 8.0) * 2f64.ln() / (1.0 / (6.0 * k)).ln();
        assert!((h2_plane(3.0 * k) - want).abs() < 1e-12);
        // no applicable bound
        let ball3 = DomainSpec::ball(3, 16).unwrap();
        assert!(matches!(
            mu_bounds(&ball3, &[0.0, 0.0, 0.5], &[0.0, 0.0, -0.5], &MuConfig::default()),
            Err(Error::Unsupported(_))
        ));
        // a c_n larger than any admissible constant is reported
        let ball2 = DomainSpec::ball(2, 16).unwrap();
        let cfg = MuConfig { cn: Some(1e6), numeric_k_tol: None };
        assert!(matches!(mu_bounds(&ball2, &[0.0, 0.0], &[0.01, 0.0], &cfg), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn h2_continuity_at_quarter() {
        let t: f64 = 0.25;
        let alpha = 9.0 / 8.0 * 2f64.ln();
        let left = 2.0 * PI * alpha / (1.0 / (2.0 * t)).ln();
        let right = 36.0 * PI * t * t;
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn lambda_bounds_examples() {
        let g = DomainSpec::punctured_space(2).unwrap();
        let b = lambda_bounds(&g, &[1.0, 0.0], &[2.0, 0.0], None).unwrap();
        assert!((b.lambda.hi - 2.0 * SQRT_2).abs() < 1e-13);
        let q = g.clone().with_flags(DomainFlags { qed_constant: Some(1.0), ..Default::default() });
        let b = lambda_bounds(&q, &[1.0, 0.0], &[2.0, 0.0], None).unwrap();
        assert!((b.lambda.lo - crate::special::tau2(3.0).unwrap()).abs() < 1e-13);
        assert!(b.lambda.lo <= b.lambda.hi);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let b = lambda_bounds(&q, &x, &y, None).unwrap();
            assert!(b.lambda.lo <= b.lambda.hi);
            assert!(b.inverse.lo <= b.inverse.hi);
        }
    }

    #[test]
    fn lambda_circle() {
        assert!((lambda_punctured_plane_circle(PI).unwrap() - 2.0).abs() < 1e-14);
        let a = lambda_punctured_plane_circle(2.0).unwrap();
        let b = lambda_punctured_plane_circle(2.0 * PI - 2.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..2000 {
            let t = 2.0 * PI * i as f64 / 2000.0;
            let v = lambda_punctured_plane_circle(t).unwrap();
            if v < best.0 {
                best = (v, t);
            }
        }
        assert!((best.1 - PI).abs() < 1e-9);
    }

    #[test]
    fn tanh_inequality_grid() {
        for i in 0..40 {
            for k in 0..40 {
                let a = 2.0 * PI * i as f64 / 40.0;
                let x = [0.95 * (i as f64 / 40.0) * a.cos(), 0.95 * (i as f64 / 40.0) * a.sin()];
                let y = [0.9 * (k as f64 / 40.0) - 0.45, 0.3];
                let rho = hyperbolic_ball(&x, &y).unwrap();
                assert!(dist(&x, &y) <= 2.0 * (rho / 4.0).tanh() + 1e-14);
            }
            let r = 0.95 * i as f64 / 40.0;
            let rho = hyperbolic_ball(&[r, 0.0], &[-r, 0.0]).unwrap();
            assert!((2.0 * r - 2.0 * (rho / 4.0).tanh()).abs() < 1e-14);
        }
    }

    fn arb_point() -> impl Strategy<Value = [f64; 2]> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_filter("nonzero", |(a, b)| a * a + b * b > 1e-4).prop_map(|(a, b)| [a, b])
    }

    fn arb_ball_point() -> impl Strategy<Value = [f64; 2]> {
        (0.0f64..0.99, 0.0f64..(2.0 * PI)).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
    }

    proptest! {
        #[test]
        fn metric_axioms(x in arb_point(), y in arb_point(), z in arb_point()) {
            let g = DomainSpec::punctured_space(2).unwrap();
            let (px, py, pz) = (p(&x), p(&y), p(&z));
            prop_assert!((chordal(&px, &py) - chordal(&py, &px)).abs() < 1e-15);
            prop_assert!(chordal(&px, &pz) <= chordal(&px, &py) + chordal(&py, &pz) + 1e-9);
            prop_assert!(chordal(&px, &py) <= 1.0);
            let j = |a: &[f64], b: &[f64]| j_metric(&g, a, b).unwrap();
            prop_assert!((j(&x, &y) - j(&y, &x)).abs() < 1e-15);
            prop_assert!(j(&x, &z) <= j(&x, &y) + j(&y, &z) + 1e-9);
            let k = |a: &[f64], b: &[f64]| quasihyperbolic_exact(ExactKind::PuncturedSpace, a, b).unwrap();
            prop_assert!(k(&x, &y) >= 0.0 && (k(&x, &y) - k(&y, &x)).abs() < 1e-12);
            prop_assert!(k(&x, &z) <= k(&x, &y) + k(&y, &z) + 1e-9);
            prop_assert_eq!(k(&x, &x), 0.0);
        }

        #[test]
        fn hyperbolic_axioms(x in arb_ball_point(), y in arb_ball_point(), z in arb_ball_point()) {
            let h = |a: &[f64], b: &[f64]| hyperbolic_ball(a, b).unwrap();
            prop_assert!((h(&x, &y) - h(&y, &x)).abs() < 1e-9);
            prop_assert!(h(&x, &z) <= h(&x, &y) + h(&y, &z) + 1e-9);
            prop_assert!(dist(&x, &y) <= 2.0 * (h(&x, &y) / 4.0).tanh() + 1e-12);
        }

        #[test]
        fn cross_ratio_moebius(a in arb_point(), b in arb_point(), c in arb_point(), d in arb_point(), s in 0.1f64..10.0) {
            let pts = [p(&a), p(&b), p(&c), p(&d)];
            let v = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]);
            prop_assume!(v.is_ok());
            let v = v.unwrap();
            prop_assume!(v.is_finite() && v < 1e6 && v > 1e-6);
            let inv: Vec<ExtendedPoint> = pts.iter().map(invert).collect();
            let w = cross_ratio(&inv[0], &inv[1], &inv[2], &inv[3]).unwrap();
            prop_assert!((v - w).abs() <= 1e-10 * v.max(1.0));
            let sim = |x: &[f64; 2]| p(&[s * x[1] + 0.3, -s * x[0] - 1.2]);
            let u = cross_ratio(&sim(&a), &sim(&b), &sim(&c), &sim(&d)).unwrap();
            prop_assert!((v - u).abs() <= 1e-10 * v.max(1.0));
            prop_assert!(v > 0.0);
        }
    }
}
