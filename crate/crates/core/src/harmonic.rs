//! Planar harmonic maps `f = g + conj(h)`, Laplacians of `|f|^p`, Poisson
//! extensions on the disk and on B³, and sampled moduli of continuity.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::metrics::{quasihyperbolic_numeric, DomainSpec};
use crate::quad::{gauss_legendre, gauss_legendre_on};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPlanarMap {
    pub g: Vec<C>,
    pub h: Vec<C>,
}

fn horner(c: &[C], z: C) -> C {
    c.iter().rev().fold(C::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn derivative(c: &[C], z: C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (j, &a) in c.iter().enumerate().skip(1).rev() {
        acc = acc * z + a * j as f64;
    }
    acc
}

impl HarmonicPlanarMap {
    pub fn new(g: Vec<C>, h: Vec<C>) -> Self {
        HarmonicPlanarMap { g, h }
    }

    /// `z + k·conj(z)`.
    pub fn linear(k: f64) -> Self {
        Self::new(vec![C::new(0.0, 0.0), C::new(1.0, 0.0)], vec![C::new(0.0, 0.0), C::new(k, 0.0)])
    }

    /// Truncation of `Σ (−1)^n r^n cos(nθ) / n²` to `modes` terms.
    pub fn counterexample(modes: usize) -> Self {
        let mut c = vec![C::new(0.0, 0.0); modes + 1];
        for (n, cn) in c.iter_mut().enumerate().skip(1) {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            *cn = C::new(s / (2.0 * (n * n) as f64), 0.0);
        }
        Self::new(c.clone(), c)
    }

    pub fn eval(&self, z: C) -> C {
        horner(&self.g, z) + horner(&self.h, z).conj()
    }

    pub fn g_prime(&self, z: C) -> C {
        derivative(&self.g, z)
    }

    pub fn h_prime(&self, z: C) -> C {
        derivative(&self.h, z)
    }

    pub fn jacobian(&self, z: C) -> f64 {
        self.g_prime(z).norm_sqr() - self.h_prime(z).norm_sqr()
    }

    /// Values at `r·e^{2πik/n}`, `k = 0..n`, by one inverse FFT.
    pub fn circle_values(&self, r: f64, n: usize) -> Vec<C> {
        let fold = |c: &[C]| {
            let mut buf = vec![C::new(0.0, 0.0); n];
            let mut p = 1.0;
            for (j, &a) in c.iter().enumerate() {
                buf[j % n] += a * p;
                p *= r;
            }
            FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
            buf
        };
        let gv = fold(&self.g);
        let hv = fold(&self.h);
        gv.iter().zip(&hv).map(|(a, b)| a + b.conj()).collect()
    }

    pub fn boundary_samples(&self, n: usize) -> Result<BoundaryFunction1D> {
        BoundaryFunction1D::new(self.circle_values(1.0, n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction1D {
    samples: Vec<C>,
}

impl BoundaryFunction1D {
    pub fn new(samples: Vec<C>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return domain(format!("boundary samples need a power of two >= 8, got {n}"));
        }
        Ok(BoundaryFunction1D { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> C) -> Result<Self> {
        Self::new((0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect())
    }

    pub fn samples(&self) -> &[C] {
        &self.samples
    }
}

/// Optimal exponent `q` with `|f|^q` subharmonic for k-quasiregular harmonic `f`.
pub fn subharmonic_exponent(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return domain(format!("needs 0 <= k < 1, got {k}"));
    }
    Ok(4.0 * k / ((1.0 + k) * (1.0 + k)))
}

fn check_disk(z: C) -> Result<()> {
    if !(z.norm() <= 1.0) {
        return domain(format!("point {z} is outside the closed unit disk"));
    }
    Ok(())
}

pub fn laplacian_abs_f_sq(f: &HarmonicPlanarMap, z: C) -> Result<f64> {
    check_disk(z)?;
    Ok(4.0 * (f.g_prime(z).norm_sqr() + f.h_prime(z).norm_sqr()))
}

/// `|∇|f|²|²`.
pub fn grad_abs_f_sq(f: &HarmonicPlanarMap, z: C) -> Result<f64> {
    check_disk(z)?;
    let (gp, hp, w) = (f.g_prime(z), f.h_prime(z), f.eval(z));
    Ok(4.0 * (gp.norm_sqr() + hp.norm_sqr()) * w.norm_sqr() + 8.0 * (gp.conj() * hp * w * w).re)
}

pub fn laplacian_abs_f_p(f: &HarmonicPlanarMap, z: C, p: f64) -> Result<f64> {
    check_disk(z)?;
    if !(p > 0.0) {
        return domain(format!("needs p > 0, got {p}"));
    }
    let (gp, hp, w) = (f.g_prime(z), f.h_prime(z), f.eval(z));
    let a = w.norm();
    if a == 0.0 {
        return Err(Error::Singularity(format!("f vanishes at {z}")));
    }
    let cross = (gp.conj() * hp * w * w).re;
    Ok(p * p * (gp.norm_sqr() + hp.norm_sqr()) * a.powf(p - 2.0) + 2.0 * p * (p - 2.0) * a.powf(p - 4.0) * cross)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubharmonicScan {
    pub min_value: f64,
    pub argmin: [f64; 2],
    pub subharmonic: bool,
}

/// Minimum of `Δ|f|^p` over an `n × n` square grid clipped to the disk of radius `radius`.
/// Grid points with `|f| ≤ 1e−8` are skipped.
pub fn check_subharmonic(
    exec: Exec,
    f: &HarmonicPlanarMap,
    p: f64,
    radius: f64,
    n: usize,
    tol: f64,
) -> Result<SubharmonicScan> {
    if !(radius > 0.0 && radius < 1.0) || n < 2 {
        return domain(format!("needs 0 < radius < 1 and n >= 2, got {radius}, {n}"));
    }
    let step = 2.0 * radius / (n - 1) as f64;
    let rows = exec.map(n, |i| {
        let x = -radius + step * i as f64;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for j in 0..n {
            let y = -radius + step * j as f64;
            let z = C::new(x, y);
            if z.norm() > radius || f.eval(z).norm() <= 1e-8 {
                continue;
            }
            if let Ok(v) = laplacian_abs_f_p(f, z, p) {
                if v < best.0 {
                    best = (v, [x, y]);
                }
            }
        }
        best
    });
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for r in rows {
        if r.0 < best.0 {
            best = r;
        }
    }
    Ok(SubharmonicScan { min_value: best.0, argmin: best.1, subharmonic: best.0 >= -tol })
}

/// Harmonic extension of sampled boundary data, keeping Fourier modes `|m| ≤ modes`.
pub fn poisson_disk_extend(phi: &BoundaryFunction1D, modes: usize) -> Result<HarmonicPlanarMap> {
    let n = phi.samples.len();
    if modes > n / 2 {
        return Err(Error::Aliasing(format!("{modes} modes from {n} samples")));
    }
    let mut c = phi.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut c);
    let scale = 1.0 / n as f64;
    let mut g = vec![C::new(0.0, 0.0); modes + 1];
    let mut h = vec![C::new(0.0, 0.0); modes + 1];
    g[0] = c[0] * scale;
    for m in 1..=modes {
        if 2 * m == n {
            // the Nyquist mode is shared evenly between e^{imθ} and e^{−imθ}
            g[m] = c[m] * scale * 0.5;
            h[m] = (c[m] * scale * 0.5).conj();
        } else {
            g[m] = c[m] * scale;
            h[m] = (c[n - m] * scale).conj();
        }
    }
    Ok(HarmonicPlanarMap::new(g, h))
}

fn chord(angle: f64) -> f64 {
    2.0 * (0.5 * angle).sin().abs()
}

/// Sampled `ω(φ, δ)`: all sample pairs at chordal distance at most `δ`.
pub fn boundary_modulus(phi: &BoundaryFunction1D, delta: f64) -> Result<f64> {
    boundary_modulus_with(Exec::default(), phi, delta)
}

pub fn boundary_modulus_with(exec: Exec, phi: &BoundaryFunction1D, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return domain(format!("needs δ > 0, got {delta}"));
    }
    let s = &phi.samples;
    let n = s.len();
    let h = 2.0 * PI / n as f64;
    let offsets: Vec<usize> = (1..=n / 2).take_while(|&k| chord(k as f64 * h) <= delta).collect();
    let best = exec.max(offsets.len(), |i| {
        let k = offsets[i];
        (0..n).map(|j| (s[j] - s[(j + k) % n]).norm()).fold(0.0, f64::max)
    });
    Ok(best.max(0.0))
}

/// Polar sampling grid for [`closed_modulus`].
#[derive(Debug, Clone, Copy)]
pub struct DiskGrid {
    /// Angles per circle; should exceed twice the map's degree.
    pub n_theta: usize,
    /// Uniform radii `i / n_coarse`.
    pub n_coarse: usize,
    /// Extra radii `1 − jδ/n_fine`, `j ≤ 2 n_fine`.
    pub n_fine: usize,
    /// Cap on angular offsets tried per pair of radii.
    pub max_offsets: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        DiskGrid { n_theta: 8192, n_coarse: 64, n_fine: 4, max_offsets: 33 }
    }
}

/// Sampled `ω̃(f, δ)` over pairs of grid points in the closed disk at distance at most `δ`.
pub fn closed_modulus(f: &HarmonicPlanarMap, delta: f64, grid: &DiskGrid) -> Result<f64> {
    closed_modulus_with(Exec::default(), f, delta, grid)
}

pub fn closed_modulus_with(exec: Exec, f: &HarmonicPlanarMap, delta: f64, grid: &DiskGrid) -> Result<f64> {
    if !(delta > 0.0) {
        return domain(format!("needs δ > 0, got {delta}"));
    }
    let n = grid.n_theta;
    if n < 8 || grid.n_coarse < 1 {
        return domain("disk grid too small");
    }
    let mut radii: Vec<f64> = (0..=grid.n_coarse).map(|i| i as f64 / grid.n_coarse as f64).collect();
    for j in 0..=2 * grid.n_fine {
        let r = 1.0 - j as f64 * delta / grid.n_fine.max(1) as f64;
        if r >= 0.0 {
            radii.push(r);
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let values: Vec<Vec<C>> = exec.map(radii.len(), |i| f.circle_values(radii[i], n));
    let mut pairs = Vec::new();
    for a in 0..radii.len() {
        for b in a..radii.len() {
            // allow for rounding in 1 − jδ/n_fine
            if radii[b] - radii[a] <= delta * (1.0 + 1e-12) {
                pairs.push((a, b));
            }
        }
    }
    let h = 2.0 * PI / n as f64;
    let best = exec.max(pairs.len(), |i| {
        let (a, b) = pairs[i];
        let (ra, rb) = (radii[a], radii[b]);
        let smax = if ra == 0.0 {
            0
        } else {
            let c = ((ra * ra + rb * rb - delta * delta) / (2.0 * ra * rb)).clamp(-1.0, 1.0);
            ((c.acos() / h).floor() as usize).min(n / 2)
        };
        let stride = (2 * smax / grid.max_offsets.max(1)).max(1);
        let mut offs: Vec<i64> = (-(smax as i64)..=smax as i64).step_by(stride).collect();
        offs.push(smax as i64);
        let (va, vb) = (&values[a], &values[b]);
        let mut m: f64 = 0.0;
        for &s in &offs {
            let s = s.rem_euclid(n as i64) as usize;
            for j in 0..n {
                m = m.max((va[j] - vb[(j + s) % n]).norm());
            }
        }
        m
    });
    Ok(best.max(0.0))
}

/// `max ω(δ₁+δ₂) / (ω(δ₁) + ω(δ₂))` over pairs from `deltas`.
pub fn modulus_subadditivity(phi: &BoundaryFunction1D, deltas: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in deltas {
        for &b in deltas {
            let denom = boundary_modulus(phi, a)? + boundary_modulus(phi, b)?;
            if denom > 0.0 {
                worst = worst.max(boundary_modulus(phi, a + b)? / denom);
            }
        }
    }
    Ok(worst)
}

/// `sup |h′| / |g′|` over a polar grid of radius `r_max`.
pub fn qr_constant_estimate(f: &HarmonicPlanarMap, r_max: f64, n: usize) -> f64 {
    let mut k: f64 = 0.0;
    for i in 0..=n {
        let r = r_max * i as f64 / n as f64;
        for j in 0..4 * n {
            let z = C::from_polar(r, 2.0 * PI * j as f64 / (4 * n) as f64);
            let g = f.g_prime(z).norm();
            if g > 0.0 {
                k = k.max(f.h_prime(z).norm() / g);
            }
        }
    }
    k
}

#[derive(Clone)]
pub struct SphereBoundaryFunction {
    pub oracle: Arc<dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync>,
    pub lipschitz: f64,
}

impl SphereBoundaryFunction {
    pub fn new(oracle: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static, lipschitz: f64) -> Result<Self> {
        if !(lipschitz >= 0.0) {
            return domain(format!("Lipschitz constant must be >= 0, got {lipschitz}"));
        }
        Ok(SphereBoundaryFunction { oracle: Arc::new(oracle), lipschitz })
    }
}

fn frame(x: [f64; 3], r: f64) -> [[f64; 3]; 3] {
    let e = if r > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { [0.0, 0.0, 1.0] };
    let seed = if e[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = seed[0] * e[0] + seed[1] * e[1] + seed[2] * e[2];
    let mut a = [seed[0] - d * e[0], seed[1] - d * e[1], seed[2] - d * e[2]];
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.iter_mut().for_each(|v| *v /= na);
    let b = [e[1] * a[2] - e[2] * a[1], e[2] * a[0] - e[0] * a[2], e[0] * a[1] - e[1] * a[0]];
    [a, b, e]
}

/// Nodes in `u = cos θ` (measured from `x/|x|`) with weights that already carry
/// the Poisson kernel. The substitution `t = 1/|x − ξ|` makes the kernel
/// constant; `t` is split into dyadic panels.
fn kernel_nodes(r: f64, n: usize) -> Vec<(f64, f64)> {
    if r < 1e-6 {
        let (u, w) = gauss_legendre(n);
        return u
            .into_iter()
            .zip(w)
            .map(|(u, w)| (u, w * (1.0 - r * r) / (1.0 + r * r - 2.0 * r * u).powf(1.5)))
            .collect();
    }
    let (t0, t1) = (1.0 / (1.0 + r), 1.0 / (1.0 - r));
    let per = (n / 4).max(8);
    let scale = (1.0 - r * r) / r;
    let mut out = Vec::new();
    let mut a = t0;
    while a < t1 {
        let b = (2.0 * a).min(t1);
        let (ts, ws) = gauss_legendre_on(per, a, b);
        for (t, w) in ts.into_iter().zip(ws) {
            let u = ((1.0 + r * r - 1.0 / (t * t)) / (2.0 * r)).clamp(-1.0, 1.0);
            out.push((u, w * scale));
        }
        a = b;
    }
    out
}

/// Poisson extension `P[φ](x)` on the unit ball of R³.
pub fn poisson_ball3(phi: &SphereBoundaryFunction, x: [f64; 3], quad_n: usize) -> Result<[f64; 3]> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if !(r < 1.0) {
        return domain(format!("needs |x| < 1, got {r}"));
    }
    if quad_n < 4 {
        return domain("quadrature needs at least 4 nodes");
    }
    let [a, b, e] = frame(x, r);
    let nodes = kernel_nodes(r, quad_n);
    let m = 2 * quad_n;
    let mut acc = [0.0; 3];
    let mut mass = 0.0;
    for &(u, w) in &nodes {
        let s = (1.0 - u * u).max(0.0).sqrt();
        for k in 0..m {
            let ang = 2.0 * PI * k as f64 / m as f64;
            let (c, sn) = (s * ang.cos(), s * ang.sin());
            let xi = [
                c * a[0] + sn * b[0] + u * e[0],
                c * a[1] + sn * b[1] + u * e[1],
                c * a[2] + sn * b[2] + u * e[2],
            ];
            let v = (phi.oracle)(xi);
            let wk = w * 2.0 * PI / m as f64;
            mass += wk;
            for i in 0..3 {
                acc[i] += wk * v[i];
            }
        }
    }
    let residual = (mass / (4.0 * PI) - 1.0).abs();
    if residual > 1e-4 {
        return Err(Error::Accuracy(format!("constant reproduction residual {residual}")));
    }
    Ok(acc.map(|v| v / (4.0 * PI)))
}

/// Operator norm of the derivative of `P[φ]` restricted to the plane
/// orthogonal to `x0`, by central differences.
pub fn tangential_derivative_norm(phi: &SphereBoundaryFunction, x0: [f64; 3], h: f64, quad_n: usize) -> Result<f64> {
    let r = (x0[0] * x0[0] + x0[1] * x0[1] + x0[2] * x0[2]).sqrt();
    if !(r > 0.0 && r + h < 1.0) {
        return domain(format!("needs 0 < |x0| and |x0| + h < 1, got {r}, {h}"));
    }
    let [a, b, _] = frame(x0, r);
    let mut cols = [[0.0; 3]; 2];
    for (c, t) in cols.iter_mut().zip([a, b]) {
        let p = poisson_ball3(phi, [x0[0] + h * t[0], x0[1] + h * t[1], x0[2] + h * t[2]], quad_n)?;
        let m = poisson_ball3(phi, [x0[0] - h * t[0], x0[1] - h * t[1], x0[2] - h * t[2]], quad_n)?;
        for i in 0..3 {
            c[i] = (p[i] - m[i]) / (2.0 * h);
        }
    }
    // largest eigenvalue of the 2×2 Gram matrix
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (p, q, s) = (dot(&cols[0], &cols[0]), dot(&cols[0], &cols[1]), dot(&cols[1], &cols[1]));
    let lam = 0.5 * (p + s) + (0.25 * (p - s) * (p - s) + q * q).sqrt();
    Ok(lam.sqrt())
}

/// `exp((1/2) · mean of log J_f over B(z, 1 − |z|))`.
pub fn alpha_f_disk(f: &HarmonicPlanarMap, z: C, quad_n: usize) -> Result<f64> {
    let rad = 1.0 - z.norm();
    if !(rad > 0.0) {
        return domain(format!("needs |z| < 1, got {}", z.norm()));
    }
    let (rs, ws) = gauss_legendre_on(quad_n.max(4), 0.0, rad);
    let m = 2 * quad_n.max(4);
    let mut acc = 0.0;
    for (&r, &w) in rs.iter().zip(&ws) {
        for k in 0..m {
            let p = z + C::from_polar(r, 2.0 * PI * k as f64 / m as f64);
            let j = f.jacobian(p);
            if !(j > 0.0) {
                return Err(Error::Orientation(format!("J_f = {j} at {p}")));
            }
            acc += w * r * (2.0 * PI / m as f64) * j.ln();
        }
    }
    Ok((0.5 * acc / (PI * rad * rad)).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct BilipschitzEstimate {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

/// Ratios `k_{D′}(f z₁, f z₂) / k_D(z₁, z₂)` with `D′` the polygon through
/// `boundary_image`.
pub fn qh_bilipschitz_estimate(
    f: &HarmonicPlanarMap,
    pairs: &[(C, C)],
    boundary_image: &[C],
    tol: f64,
) -> Result<BilipschitzEstimate> {
    for (i, a) in boundary_image.iter().enumerate() {
        for b in &boundary_image[i + 1..] {
            if (a - b).norm() < 1e-12 {
                return Err(Error::Injectivity(format!("two boundary samples map to {a}")));
            }
        }
    }
    let image = DomainSpec::polygon_interior(boundary_image.iter().map(|w| [w.re, w.im]).collect())?;
    let disk = DomainSpec::ball(2, 64)?;
    let mut ratios = Vec::with_capacity(pairs.len());
    for &(z1, z2) in pairs {
        let (w1, w2) = (f.eval(z1), f.eval(z2));
        if (w1 - w2).norm() < 1e-12 {
            return Err(Error::Injectivity(format!("{z1} and {z2} have the same image")));
        }
        let kd = quasihyperbolic_numeric(&disk, &[z1.re, z1.im], &[z2.re, z2.im], tol)?.value;
        let ki = quasihyperbolic_numeric(&image, &[w1.re, w1.im], &[w2.re, w2.im], tol)?.value;
        ratios.push(ki / kd);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BilipschitzEstimate { min_ratio, max_ratio, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn abs_sq(f: &HarmonicPlanarMap, x: f64, y: f64) -> f64 {
        f.eval(c(x, y)).norm_sqr()
    }

    fn sample_map() -> HarmonicPlanarMap {
        HarmonicPlanarMap::new(vec![c(0.2, -0.1), c(1.0, 0.3), c(-0.4, 0.2), c(0.1, 0.05)], vec![c(0.0, 0.0), c(0.3, -0.2), c(0.05, 0.1)])
    }

    #[test]
    fn exponent() {
        assert_eq!(subharmonic_exponent(0.0).unwrap(), 0.0);
        assert!((subharmonic_exponent(1.0 / 3.0).unwrap() - 0.75).abs() < 1e-15);
        let q = subharmonic_exponent(0.999999).unwrap();
        assert!(q < 1.0 && q > 1.0 - 1e-10);
        assert!(subharmonic_exponent(1.0).is_err());
        let mut prev = -1.0;
        for i in 0..100 {
            let q = subharmonic_exponent(i as f64 / 100.0).unwrap();
            assert!(q > prev);
            prev = q;
        }
    }

    #[test]
    fn laplacians_closed_form() {
        let f = HarmonicPlanarMap::linear(0.5);
        assert!((laplacian_abs_f_sq(&f, c(0.3, -0.7)).unwrap() - 5.0).abs() < 1e-14);
        let k0 = HarmonicPlanarMap::new(vec![c(2.0, 1.0)], vec![]);
        assert_eq!(laplacian_abs_f_sq(&k0, c(0.1, 0.1)).unwrap(), 0.0);
        assert_eq!(grad_abs_f_sq(&k0, c(0.1, 0.1)).unwrap(), 0.0);
        let id = HarmonicPlanarMap::linear(0.0);
        assert!((grad_abs_f_sq(&id, c(0.6, 0.0)).unwrap() - 4.0 * 0.36).abs() < 1e-14);
        for k in [0.2, 0.5] {
            for p in [0.5, 1.3, 3.0] {
                let f = HarmonicPlanarMap::linear(k);
                let v = laplacian_abs_f_p(&f, c(1.0, 0.0), p).unwrap();
                let e = p * p * (1.0 + k * k) * (1.0 + k).powf(p - 2.0) + 2.0 * p * (p - 2.0) * (1.0 + k).powf(p - 2.0) * k;
                assert!((v - e).abs() < 1e-12);
            }
        }
        let q = subharmonic_exponent(0.5).unwrap();
        assert!(laplacian_abs_f_p(&HarmonicPlanarMap::linear(0.5), c(1.0, 0.0), q).unwrap().abs() < 1e-12);
        let f = sample_map();
        let z = c(0.3, 0.2);
        assert!((laplacian_abs_f_p(&f, z, 2.0).unwrap() - laplacian_abs_f_sq(&f, z).unwrap()).abs() < 1e-12);
        assert!(matches!(laplacian_abs_f_p(&id, c(0.0, 0.0), 1.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn finite_difference_oracles() {
        let f = sample_map();
        let (x, y, h) = (0.3, 0.2, 1e-4);
        let lap = (abs_sq(&f, x + h, y) + abs_sq(&f, x - h, y) + abs_sq(&f, x, y + h) + abs_sq(&f, x, y - h)
            - 4.0 * abs_sq(&f, x, y))
            / (h * h);
        assert!((lap - laplacian_abs_f_sq(&f, c(x, y)).unwrap()).abs() < 1e-6);
        let gx = (abs_sq(&f, x + h, y) - abs_sq(&f, x - h, y)) / (2.0 * h);
        let gy = (abs_sq(&f, x, y + h) - abs_sq(&f, x, y - h)) / (2.0 * h);
        assert!((gx * gx + gy * gy - grad_abs_f_sq(&f, c(x, y)).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn subharmonic_scan() {
        let f = HarmonicPlanarMap::linear(1.0 / 3.0);
        let s = check_subharmonic(Exec::default(), &f, 0.75 + 1e-3, 0.999, 201, 1e-9).unwrap();
        assert!(s.subharmonic, "{s:?}");
        let s = check_subharmonic(Exec::default(), &f, 0.7, 0.999, 201, 1e-9).unwrap();
        assert!(s.min_value < 0.0);
        assert!(s.argmin[1].abs() < 1e-9, "{s:?}");
        let hol = HarmonicPlanarMap::new(vec![c(0.1, 0.0), c(1.0, 0.0), c(0.0, 0.4)], vec![]);
        assert!(check_subharmonic(Exec::Sequential, &hol, 0.1, 0.95, 101, 1e-9).unwrap().subharmonic);
    }

    #[test]
    fn poisson_disk() {
        let n = 64;
        let phi = BoundaryFunction1D::from_fn(n, |_| c(2.0, -1.0)).unwrap();
        let f = poisson_disk_extend(&phi, 10).unwrap();
        assert!((f.eval(c(0.3, 0.4)) - c(2.0, -1.0)).norm() < 1e-14);
        let phi = BoundaryFunction1D::from_fn(n, |t| C::from_polar(1.0, t)).unwrap();
        let f = poisson_disk_extend(&phi, 32).unwrap();
        let z = c(-0.2, 0.55);
        assert!((f.eval(z) - z).norm() < 1e-14);
        let modes = 20;
        let cx = HarmonicPlanarMap::counterexample(modes);
        let phi = cx.boundary_samples(128).unwrap();
        let f = poisson_disk_extend(&phi, modes).unwrap();
        for m in 1..=modes {
            let want = if m % 2 == 0 { 1.0 } else { -1.0 } / (2.0 * (m * m) as f64);
            assert!((f.g[m] - c(want, 0.0)).norm() < 1e-15);
            assert!((f.h[m] - c(want, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(poisson_disk_extend(&phi, 65), Err(Error::Aliasing(_))));
        assert!(BoundaryFunction1D::new(vec![c(0.0, 0.0); 12]).is_err());
    }

    #[test]
    fn circle_values_match_eval() {
        let f = sample_map();
        let v = f.circle_values(0.7, 16);
        for (k, w) in v.iter().enumerate() {
            let z = C::from_polar(0.7, 2.0 * PI * k as f64 / 16.0);
            assert!((w - f.eval(z)).norm() < 1e-13);
        }
        // folding when the degree exceeds the sample count
        let g = HarmonicPlanarMap::counterexample(40);
        let v = g.circle_values(0.9, 16);
        assert!((v[3] - g.eval(C::from_polar(0.9, 2.0 * PI * 3.0 / 16.0))).norm() < 1e-13);
    }

    #[test]
    fn moduli_simple() {
        let id = HarmonicPlanarMap::linear(0.0).boundary_samples(1 << 15).unwrap();
        for d in [0.1, 0.01] {
            let w = boundary_modulus(&id, d).unwrap();
            assert!(w <= d && w > 0.97 * d);
        }
        let k = HarmonicPlanarMap::new(vec![c(0.7, 0.0)], vec![]);
        assert_eq!(boundary_modulus(&k.boundary_samples(64).unwrap(), 0.3).unwrap(), 0.0);
        let g = DiskGrid { n_theta: 256, ..DiskGrid::default() };
        assert_eq!(closed_modulus(&k, 0.3, &g).unwrap(), 0.0);
        let lin = HarmonicPlanarMap::linear(0.5);
        let w = closed_modulus(&lin, 0.1, &g).unwrap();
        assert!((w - 0.15).abs() < 1e-12, "{w}");
    }

    #[test]
    fn counterexample_moduli_small() {
        let f = HarmonicPlanarMap::counterexample(256);
        let phi = f.boundary_samples(1 << 14).unwrap();
        let g = DiskGrid { n_theta: 1024, ..DiskGrid::default() };
        let r1 = closed_modulus(&f, 0.1, &g).unwrap() / 0.1;
        let r2 = closed_modulus(&f, 0.01, &g).unwrap() / 0.01;
        assert!(r2 > r1);
        assert!(boundary_modulus(&phi, 0.01).unwrap() / 0.01 < 1.8);
        // oracle: f(−1) − f(−(1−δ)) = Σ (1 − (1−δ)^n)/n²
        let d: f64 = 0.01;
        let direct: f64 = (1..=256).map(|n| (1.0 - (1.0 - d).powi(n)) / (n * n) as f64).sum();
        assert!(r2 * d >= direct * (1.0 - 1e-12));
        let s = modulus_subadditivity(&phi, &[0.01, 0.02, 0.05]).unwrap();
        assert!(s <= 1.0 + 1e-12 && s > 0.3);
    }

    #[test]
    fn poisson_ball() {
        let v = [0.3, -1.0, 2.0];
        let cst = SphereBoundaryFunction::new(move |_| v, 0.0).unwrap();
        for r in [0.0, 0.5, 0.9, 0.99, 0.999] {
            let u = poisson_ball3(&cst, [0.0, r * 0.6, r * 0.8], 64).unwrap();
            for i in 0..3 {
                assert!((u[i] - v[i]).abs() < 1e-6, "r = {r}");
            }
        }
        let id = SphereBoundaryFunction::new(|x| x, 1.0).unwrap();
        let x = [0.1, 0.7, -0.2];
        let u = poisson_ball3(&id, x, 64).unwrap();
        for i in 0..3 {
            assert!((u[i] - x[i]).abs() < 1e-10);
        }
        assert!(poisson_ball3(&id, [0.0; 3], 16).unwrap().iter().all(|v| v.abs() < 1e-14));
        for r in [0.9, 0.99, 0.999] {
            let d = tangential_derivative_norm(&id, [0.0, 0.0, r], 1e-4 * (1.0 - r), 64).unwrap();
            assert!((d - 1.0).abs() < 1e-4, "r = {r}: {d}");
        }
        assert!(poisson_ball3(&id, [0.0, 0.0, 1.0], 16).is_err());
    }

    #[test]
    fn poisson_ball_quadratic() {
        // harmonic polynomial x² − y² has itself as extension
        let q = SphereBoundaryFunction::new(|x| [x[0] * x[0] - x[1] * x[1], x[0] * x[2], 0.0], 2.0).unwrap();
        let x = [0.5, -0.3, 0.6];
        let u = poisson_ball3(&q, x, 64).unwrap();
        assert!((u[0] - (x[0] * x[0] - x[1] * x[1])).abs() < 1e-10);
        assert!((u[1] - x[0] * x[2]).abs() < 1e-10);
    }

    #[test]
    fn alpha_f() {
        assert!((alpha_f_disk(&HarmonicPlanarMap::linear(0.0), c(0.2, 0.1), 16).unwrap() - 1.0).abs() < 1e-14);
        let f = HarmonicPlanarMap::new(vec![c(0.0, 0.0), c(2.5, 0.0)], vec![]);
        assert!((alpha_f_disk(&f, c(-0.3, 0.5), 16).unwrap() - 2.5).abs() < 1e-12);
        let f = HarmonicPlanarMap::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.0)], vec![c(0.0, 0.0), c(0.4, 0.0)]);
        for z in [c(0.1, 0.0), c(-0.2, 0.3)] {
            let a = alpha_f_disk(&f, z, 24).unwrap();
            assert!(f.jacobian(z).sqrt() >= a, "{z}");
        }
        let bad = HarmonicPlanarMap::linear(1.5);
        assert!(matches!(alpha_f_disk(&bad, c(0.0, 0.0), 8), Err(Error::Orientation(_))));
    }

    #[test]
    fn qr_constant() {
        let k = qr_constant_estimate(&HarmonicPlanarMap::linear(0.3), 0.9, 10);
        assert!((k - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bilipschitz_identity_and_rotation() {
        let m = 128;
        let pairs = [(c(0.0, 0.0), c(0.4, 0.0)), (c(-0.2, 0.3), c(0.3, -0.1))];
        for f in [HarmonicPlanarMap::linear(0.0), HarmonicPlanarMap::new(vec![c(0.0, 0.0), C::from_polar(1.0, 0.7)], vec![])] {
            let bd: Vec<C> = (0..m).map(|k| f.eval(C::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))).collect();
            let r = qh_bilipschitz_estimate(&f, &pairs, &bd, 1e-3).unwrap();
            assert!(r.min_ratio > 0.97 && r.max_ratio < 1.03, "{r:?}");
        }
        let bd = vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(matches!(
            qh_bilipschitz_estimate(&HarmonicPlanarMap::linear(0.0), &pairs, &bd, 1e-2),
            Err(Error::Injectivity(_))
        ));
    }

    fn poly() -> impl Strategy<Value = HarmonicPlanarMap> {
        let coef = (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C::new(a, b));
        (prop::collection::vec(coef.clone(), 1..6), prop::collection::vec(coef, 1..6))
            .prop_map(|(g, h)| HarmonicPlanarMap::new(g, h))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Δ(u^a) = a u^{a−1} Δu + a(a−1) u^{a−2} |∇u|² with u = |f|², a = p/2
        #[test]
        fn chain_rule_identity(f in poly(), x in -0.7..0.7f64, y in -0.7..0.7f64, p in 0.1..4.0f64) {
            let z = C::new(x, y);
            let u = f.eval(z).norm_sqr();
            prop_assume!(u > 1e-6);
            let a = p / 2.0;
            let lhs = a * u.powf(a - 1.0) * laplacian_abs_f_sq(&f, z).unwrap()
                + a * (a - 1.0) * u.powf(a - 2.0) * grad_abs_f_sq(&f, z).unwrap();
            let rhs = laplacian_abs_f_p(&f, z, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        // |h(ξ)| ≤ (4/π) ‖h‖_∞ |ξ| for real harmonic h with h(0) = 0
        #[test]
        fn harmonic_schwarz(f in poly(), x in -0.95..0.95f64, y in -0.95..0.95f64) {
            let mut f = f;
            f.g[0] = C::new(0.0, 0.0);
            f.h[0] = C::new(0.0, 0.0);
            let z = C::new(x, y);
            prop_assume!(z.norm() < 1.0 && z.norm() > 1e-3);
            let n = 512;
            let sup = f.circle_values(1.0, n).iter().map(|w| w.re.abs()).fold(0.0, f64::max);
            prop_assert!(f.eval(z).re.abs() <= 4.0 / PI * sup * z.norm() * (1.0 + 1e-6));
        }
    }
}
