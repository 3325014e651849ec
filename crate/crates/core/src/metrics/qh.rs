//! Geodesic-graph approximation of length metrics with density ρ(d(z)).
//!
//! The graph lives on a square grid in the plane through x and y. Edges join
//! grid vertices along primitive offsets of a stencil that widens with each
//! refinement, so both the spacing error and the direction error shrink.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::domain::{dist, dot, norm, DomainSpec};
use super::MetricValue;
use crate::error::{domain as domain_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    pub max_level: u32,
    pub max_vertices: usize,
    /// Half-width of the search window in units of |x − y|.
    pub window: f64,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions { max_level: 5, max_vertices: 1_500_000, window: 1.0 }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Node {
    cost: f64,
    idx: usize,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.partial_cmp(&self.cost).unwrap_or(Ordering::Equal).then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn stencil(radius: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            if (a, b) != (0, 0) && gcd(a, b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Orthonormal frame (u, v) of the plane the graph lives in.
fn frame(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let l = dist(x, y);
    let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| (b - a) / l).collect();
    if x.len() == 2 {
        return (u.clone(), vec![-u[1], u[0]]);
    }
    let orth = |w: &[f64]| -> Vec<f64> {
        let c = dot(w, &u);
        w.iter().zip(&u).map(|(a, b)| a - c * b).collect()
    };
    let mut v = orth(x);
    if norm(&v) < 1e-9 * norm(x).max(1.0) {
        let k = (0..u.len()).min_by(|&i, &j| u[i].abs().partial_cmp(&u[j].abs()).unwrap()).unwrap();
        let mut e = vec![0.0; u.len()];
        e[k] = 1.0;
        v = orth(&e);
    }
    let nv = norm(&v);
    (u, v.into_iter().map(|c| c / nv).collect())
}

struct Grid<'a> {
    d: &'a DomainSpec,
    origin: &'a [f64],
    u: Vec<f64>,
    v: Vec<f64>,
    h: f64,
    nj: usize,
    s0: f64,
    t0: f64,
    dcache: Vec<f64>,
}

impl Grid<'_> {
    fn point(&self, s: f64, t: f64) -> Vec<f64> {
        self.origin.iter().zip(self.u.iter().zip(&self.v)).map(|(o, (a, b))| o + s * a + t * b).collect()
    }

    fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx / self.nj, idx % self.nj);
        (self.s0 + i as f64 * self.h, self.t0 + j as f64 * self.h)
    }

    fn node_dist(&mut self, idx: usize) -> f64 {
        if self.dcache[idx].is_nan() {
            let (s, t) = self.coords(idx);
            let p = self.point(s, t);
            self.dcache[idx] = if self.d.contains(&p) { self.d.dist(&p) } else { 0.0 };
        }
        self.dcache[idx]
    }

    /// ∫ ρ(d) over the segment, or None when the segment may leave the domain.
    fn edge_weight(&mut self, a: usize, b: usize, density: &dyn Fn(f64) -> f64) -> Option<f64> {
        let (da, db) = (self.node_dist(a), self.node_dist(b));
        if da <= 0.0 || db <= 0.0 {
            return None;
        }
        let (sa, ta) = self.coords(a);
        let (sb, tb) = self.coords(b);
        let len = (sb - sa).hypot(tb - ta);
        let dm = da.min(db);
        if len > 8.0 * dm {
            return None;
        }
        let mut m = ((len / (0.25 * dm)).ceil() as usize).clamp(2, 64);
        m += m % 2;
        let step = len / m as f64;
        let mut acc = 0.0;
        for k in 0..=m {
            let dk = match k {
                0 => da,
                _ if k == m => db,
                _ => {
                    let f = k as f64 / m as f64;
                    let p = self.point(sa + f * (sb - sa), ta + f * (tb - ta));
                    if !self.d.contains(&p) {
                        return None;
                    }
                    self.d.dist(&p)
                }
            };
            // balls of radius d around the nodes must cover the segment
            if dk < step {
                return None;
            }
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * density(dk);
        }
        Some(acc * step / 3.0)
    }
}

fn shortest(
    d: &DomainSpec,
    x: &[f64],
    y: &[f64],
    m: usize,
    window: f64,
    radius: i64,
    density: &dyn Fn(f64) -> f64,
) -> Option<f64> {
    let l = dist(x, y);
    let h = l / m as f64;
    let wm = (window * m as f64).ceil() as usize;
    let (u, v) = frame(x, y);
    let ni = 2 * wm + m + 1;
    let nj = 2 * wm + 1;
    let mut g = Grid {
        d,
        origin: x,
        u,
        v,
        h,
        nj,
        s0: -(wm as f64) * h,
        t0: -(wm as f64) * h,
        dcache: vec![f64::NAN; ni * nj],
    };
    let src = wm * nj + wm;
    let dst = (wm + m) * nj + wm;
    let offs = stencil(radius);
    let mut best = vec![f64::INFINITY; ni * nj];
    let mut done = vec![false; ni * nj];
    let mut heap = BinaryHeap::new();
    best[src] = 0.0;
    heap.push(Node { cost: 0.0, idx: src });
    while let Some(Node { cost, idx }) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        if idx == dst {
            return Some(cost);
        }
        let (i, j) = ((idx / nj) as i64, (idx % nj) as i64);
        for &(a, b) in &offs {
            let (p, q) = (i + a, j + b);
            if p < 0 || q < 0 || p >= ni as i64 || q >= nj as i64 {
                continue;
            }
            let nb = p as usize * nj + q as usize;
            if done[nb] {
                continue;
            }
            if let Some(w) = g.edge_weight(idx, nb, density) {
                let c = cost + w;
                if c < best[nb] {
                    best[nb] = c;
                    heap.push(Node { cost: c, idx: nb });
                }
            }
        }
    }
    None
}

fn refine(
    d: &DomainSpec,
    x: &[f64],
    y: &[f64],
    tol: f64,
    opts: &GraphOptions,
    density: &dyn Fn(f64) -> f64,
) -> Result<MetricValue> {
    if !(tol > 0.0) {
        return domain_err("tol must be positive");
    }
    let dx = d.require_interior(x)?;
    let dy = d.require_interior(y)?;
    if x == y {
        return Ok(MetricValue { value: 0.0, exact: true });
    }
    let l = dist(x, y);
    let m0 = ((2.0 * l / dx.min(dy)).ceil() as usize).max(8);
    let mut window = opts.window;
    let mut prev: Option<f64> = None;
    let mut last = None;
    for level in 0..=opts.max_level {
        let m = m0 << level;
        let verts = ((2.0 * window + 1.0) * m as f64 + 1.0) * (2.0 * window * m as f64 + 1.0);
        if verts > opts.max_vertices as f64 {
            break;
        }
        match shortest(d, x, y, m, window, 2 + level as i64, density) {
            Some(v) => {
                if let Some(p) = prev {
                    if (p - v).abs() < tol {
                        return Ok(MetricValue { value: v, exact: false });
                    }
                }
                prev = Some(v);
                last = Some(v);
            }
            None => {
                prev = None;
                window *= 2.0;
            }
        }
    }
    match last {
        Some(v) => Ok(MetricValue { value: v, exact: false }),
        None => Err(Error::Connectivity(format!("no path from {x:?} to {y:?} at the finest admissible grid"))),
    }
}

/// Upper approximation of k_G(x, y) by a geodesic graph.
pub fn quasihyperbolic_numeric(d: &DomainSpec, x: &[f64], y: &[f64], tol: f64) -> Result<MetricValue> {
    quasihyperbolic_numeric_with(d, x, y, tol, &GraphOptions::default())
}

pub fn quasihyperbolic_numeric_with(
    d: &DomainSpec,
    x: &[f64],
    y: &[f64],
    tol: f64,
    opts: &GraphOptions,
) -> Result<MetricValue> {
    refine(d, x, y, tol, opts, &|r| 1.0 / r)
}

/// Inner length distance m_G(x, y) on the same graph with density 1.
pub fn inner_length_numeric(d: &DomainSpec, x: &[f64], y: &[f64], tol: f64) -> Result<MetricValue> {
    refine(d, x, y, tol, &GraphOptions::default(), &|_| 1.0)
}
