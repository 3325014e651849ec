use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExtendedPoint {
    Finite(Vec<f64>),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(coords: &[f64]) -> Self {
        ExtendedPoint::Finite(coords.to_vec())
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            ExtendedPoint::Finite(c) => Some(c),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }
}

impl From<&[f64]> for ExtendedPoint {
    fn from(c: &[f64]) -> Self {
        ExtendedPoint::finite(c)
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalKind {
    Ball,
    HalfSpace,
    PuncturedSpace,
    PuncturedBall,
    PlaneMinus01,
    SegmentComplement,
    Polygon,
    Custom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DomainFlags {
    pub uniform_constant: Option<f64>,
    pub qed_constant: Option<f64>,
    pub boundary_connected: bool,
    pub boundary_nondegenerate: bool,
    pub convex: bool,
}

pub type DistOracle = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A proper subdomain of `R^n` known through oracles and boundary samples.
#[derive(Clone)]
pub struct DomainSpec {
    pub dimension: u32,
    dist: DistOracle,
    inside: Membership,
    pub boundary_samples: Vec<ExtendedPoint>,
    /// The samples are the whole boundary (e.g. punctured space).
    pub boundary_exact: bool,
    pub diam: f64,
    pub flags: DomainFlags,
    pub kind: CanonicalKind,
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("dimension", &self.dimension)
            .field("kind", &self.kind)
            .field("samples", &self.boundary_samples.len())
            .field("diam", &self.diam)
            .field("flags", &self.flags)
            .finish()
    }
}

impl DomainSpec {
    pub fn new(
        dimension: u32,
        dist: DistOracle,
        inside: Membership,
        boundary_samples: Vec<ExtendedPoint>,
        diam: f64,
        flags: DomainFlags,
    ) -> Result<Self> {
        if dimension < 2 {
            return domain("dimension must be at least 2");
        }
        if boundary_samples.is_empty() {
            return domain("boundary sample set is empty");
        }
        Ok(DomainSpec {
            dimension,
            dist,
            inside,
            boundary_samples,
            boundary_exact: false,
            diam,
            flags,
            kind: CanonicalKind::Custom,
        })
    }

    pub fn dist(&self, x: &[f64]) -> f64 {
        (self.dist)(x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.inside)(x) && (self.dist)(x) > 0.0
    }

    pub fn with_flags(mut self, flags: DomainFlags) -> Self {
        self.flags = flags;
        self
    }

    pub(crate) fn require_interior(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension as usize {
            return domain(format!("point has {} coordinates, domain has dimension {}", x.len(), self.dimension));
        }
        if !self.contains(x) {
            return domain(format!("{x:?} is not an interior point"));
        }
        Ok(self.dist(x))
    }

    /// Unit ball with `m` boundary samples.
    pub fn ball(n: u32, m: usize) -> Result<Self> {
        let mut d = DomainSpec::new(
            n,
            Arc::new(|x| 1.0 - norm(x)),
            Arc::new(|x| norm(x) < 1.0),
            sphere_samples(n, m),
            2.0,
            DomainFlags { boundary_connected: true, boundary_nondegenerate: true, convex: true, ..Default::default() },
        )?;
        d.kind = CanonicalKind::Ball;
        Ok(d)
    }

    /// Upper half-space `x_n > 0`; samples on the hyperplane plus ∞.
    pub fn half_space(n: u32, m: usize) -> Result<Self> {
        let last = n as usize - 1;
        let mut samples = hyperplane_samples(n, m);
        samples.push(ExtendedPoint::Infinity);
        let mut d = DomainSpec::new(
            n,
            Arc::new(move |x| x[last]),
            Arc::new(move |x| x[last] > 0.0),
            samples,
            f64::INFINITY,
            DomainFlags { boundary_connected: true, boundary_nondegenerate: true, convex: true, ..Default::default() },
        )?;
        d.kind = CanonicalKind::HalfSpace;
        Ok(d)
    }

    /// `R^n \ {0}`; the boundary {0, ∞} is sampled exactly.
    pub fn punctured_space(n: u32) -> Result<Self> {
        let mut d = DomainSpec::new(
            n,
            Arc::new(norm),
            Arc::new(|x| norm(x) > 0.0),
            vec![ExtendedPoint::Finite(vec![0.0; n as usize]), ExtendedPoint::Infinity],
            f64::INFINITY,
            DomainFlags::default(),
        )?;
        d.kind = CanonicalKind::PuncturedSpace;
        d.boundary_exact = true;
        Ok(d)
    }

    pub fn punctured_ball(n: u32, m: usize) -> Result<Self> {
        let mut samples = sphere_samples(n, m);
        samples.push(ExtendedPoint::Finite(vec![0.0; n as usize]));
        let mut d = DomainSpec::new(
            n,
            Arc::new(|x| {
                let r = norm(x);
                r.min(1.0 - r)
            }),
            Arc::new(|x| {
                let r = norm(x);
                r > 0.0 && r < 1.0
            }),
            samples,
            2.0,
            DomainFlags::default(),
        )?;
        d.kind = CanonicalKind::PuncturedBall;
        Ok(d)
    }

    /// `R^2 \ {0, e_1}`; the boundary {0, e_1, ∞} is sampled exactly.
    pub fn plane_minus_0_1() -> Result<Self> {
        let mut d = DomainSpec::new(
            2,
            Arc::new(|x| norm(x).min(dist(x, &[1.0, 0.0]))),
            Arc::new(|x| norm(x) > 0.0 && dist(x, &[1.0, 0.0]) > 0.0),
            vec![
                ExtendedPoint::Finite(vec![0.0, 0.0]),
                ExtendedPoint::Finite(vec![1.0, 0.0]),
                ExtendedPoint::Infinity,
            ],
            f64::INFINITY,
            DomainFlags::default(),
        )?;
        d.kind = CanonicalKind::PlaneMinus01;
        d.boundary_exact = true;
        Ok(d)
    }

    /// `R^2 \ [0, e_1]`.
    pub fn segment_complement(m: usize) -> Result<Self> {
        let m = m.max(2);
        let mut samples: Vec<ExtendedPoint> =
            (0..m).map(|i| ExtendedPoint::Finite(vec![i as f64 / (m - 1) as f64, 0.0])).collect();
        samples.push(ExtendedPoint::Infinity);
        let seg = |x: &[f64]| {
            let t = x[0].clamp(0.0, 1.0);
            ((x[0] - t).powi(2) + x[1] * x[1]).sqrt()
        };
        let mut d = DomainSpec::new(
            2,
            Arc::new(seg),
            Arc::new(move |x| seg(x) > 0.0),
            samples,
            f64::INFINITY,
            DomainFlags::default(),
        )?;
        d.kind = CanonicalKind::SegmentComplement;
        Ok(d)
    }

    /// Interior of a simple closed polygon in the plane.
    pub fn polygon_interior(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return domain("polygon needs at least 3 vertices");
        }
        let v = Arc::new(vertices);
        let vd = v.clone();
        let vi = v.clone();
        let mut diam: f64 = 0.0;
        for a in v.iter() {
            for b in v.iter() {
                diam = diam.max(dist(a, b));
            }
        }
        let samples = v.iter().map(|p| ExtendedPoint::Finite(p.to_vec())).collect();
        let mut d = DomainSpec::new(
            2,
            Arc::new(move |x| polyline_distance(&vd, x)),
            Arc::new(move |x| point_in_polygon(&vi, x)),
            samples,
            diam,
            DomainFlags { boundary_connected: true, boundary_nondegenerate: true, ..Default::default() },
        )?;
        d.kind = CanonicalKind::Polygon;
        Ok(d)
    }

    pub fn by_name(name: &str, n: u32, samples: usize) -> Result<Self> {
        match name {
            "ball" => Self::ball(n, samples),
            "half_space" => Self::half_space(n, samples),
            "punctured_space" => Self::punctured_space(n),
            "punctured_ball" => Self::punctured_ball(n, samples),
            "plane_minus_0_1" => Self::plane_minus_0_1(),
            "segment_complement" => Self::segment_complement(samples),
            other => domain(format!("unknown domain '{other}'")),
        }
    }
}

pub const DOMAIN_NAMES: [&str; 6] =
    ["ball", "half_space", "punctured_space", "punctured_ball", "plane_minus_0_1", "segment_complement"];

fn polyline_distance(v: &[[f64; 2]], x: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        let a = v[i];
        let b = v[(i + 1) % v.len()];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let l2 = dx * dx + dy * dy;
        let t = if l2 > 0.0 { (((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let (px, py) = (a[0] + t * dx - x[0], a[1] + t * dy - x[1]);
        best = best.min((px * px + py * py).sqrt());
    }
    best
}

fn point_in_polygon(v: &[[f64; 2]], x: &[f64]) -> bool {
    let mut inside = false;
    let mut j = v.len() - 1;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[j]);
        if (a[1] > x[1]) != (b[1] > x[1]) && x[0] < (b[0] - a[0]) * (x[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Deterministic samples of the unit sphere `S^{n-1}`.
pub fn sphere_samples(n: u32, m: usize) -> Vec<ExtendedPoint> {
    let m = m.max(4);
    match n {
        2 => (0..m)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / m as f64;
                ExtendedPoint::Finite(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    ExtendedPoint::Finite(vec![r * a.cos(), r * a.sin(), z])
                })
                .collect()
        }
        _ => {
            let n = n as usize;
            let mut out = Vec::new();
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut c = vec![0.0; n];
                    c[i] = s;
                    out.push(ExtendedPoint::Finite(c));
                }
                for j in i + 1..n {
                    for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let mut c = vec![0.0; n];
                        c[i] = si * std::f64::consts::FRAC_1_SQRT_2;
                        c[j] = sj * std::f64::consts::FRAC_1_SQRT_2;
                        out.push(ExtendedPoint::Finite(c));
                    }
                }
            }
            out
        }
    }
}

/// Samples of `{x_n = 0}`: a fine central grid with geometric tails.
fn hyperplane_samples(n: u32, m: usize) -> Vec<ExtendedPoint> {
    let m = m.max(8);
    let mut line = Vec::with_capacity(m + 40);
    for i in 0..m {
        line.push(-4.0 + 8.0 * i as f64 / (m - 1) as f64);
    }
    for k in 1..=20 {
        let v = 4.0 * 1.5f64.powi(k);
        line.push(v);
        line.push(-v);
    }
    let k = n as usize - 1;
    if k == 1 {
        return line.into_iter().map(|t| ExtendedPoint::Finite(vec![t, 0.0])).collect();
    }
    // coarse product grid for n >= 3
    let per = ((m as f64).powf(1.0 / k as f64).ceil() as usize).max(4);
    let mut coarse: Vec<f64> = (0..per).map(|i| -4.0 + 8.0 * i as f64 / (per - 1) as f64).collect();
    for k in 1..=8 {
        let v = 4.0 * 2f64.powi(k);
        coarse.push(v);
        coarse.push(-v);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let mut c: Vec<f64> = idx.iter().map(|&i| coarse[i]).collect();
        c.push(0.0);
        out.push(ExtendedPoint::Finite(c));
        let mut d = 0;
        while d < k {
            idx[d] += 1;
            if idx[d] < coarse.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == k {
            break;
        }
    }
    out
}
