//! Registry of inequality and identity checks shared by the `verify`
//! subcommand and the acceptance tests.
//!
//! Every check reduces to a minimum slack over a grid; it passes when the
//! slack is at least `−tolerance`. Identities report `−|error|`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::Serialize;

use crate::balls::{
    antipodal_threshold, circumscribed_lambda_angle, circumscribed_lambda_radius, heikkala_cubic_root, m_delta0,
    m_delta1, mu_ball_constants, quartic, quasiball_margins,
};
use crate::chart::{builtin_chart, composition_slack, gating_violations, monotonicity_violations, DomainProps, MetricId};
use crate::distortion::{
    id_boundary_euclid_bound, id_boundary_rho_bound, lens_diam_bound_linear, lens_diam_bound_sqrt, lens_diam_brute,
    lens_linear_window, mn_fixed_point, mn_gap, stabrmk_checks, two_point_growth_bounds,
};
use crate::error::Result;
use crate::exec::Exec;
use crate::harmonic::{
    boundary_modulus_with, check_subharmonic, closed_modulus_with, grad_abs_f_sq, laplacian_abs_f_p,
    laplacian_abs_f_sq, poisson_ball3, subharmonic_exponent, tangential_derivative_norm, DiskGrid,
    HarmonicPlanarMap, SphereBoundaryFunction,
};
use crate::metrics::{
    chordal, cross_ratio, hyperbolic_ball, j_metric, quasihyperbolic_exact, seittenranta, DomainSpec, ExactKind,
    ExtendedPoint,
};
use crate::special::{b_constant, eta_k_n, gamma2, mu, phi_k, tau2, tau_n_bounds, teichmuller_p_circle};

/// Number of checks registered by [`registry`].
pub const DOCUMENTED_CHECK_COUNT: usize = 40;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyConfig {
    pub cn: Option<f64>,
    pub uniform_c: Option<f64>,
    pub qed_c: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constant {
    Cn,
    UniformC,
    QedC,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub min_slack: f64,
    pub argmin: String,
}

type RunFn = fn(&VerifyConfig) -> Result<Outcome>;

#[derive(Clone)]
pub struct Check {
    pub id: &'static str,
    pub provenance: &'static str,
    pub grid_spec: &'static str,
    pub tolerance: f64,
    pub needs: &'static [Constant],
    run: RunFn,
}

impl Check {
    pub fn run(&self, cfg: &VerifyConfig) -> VerifyEntry {
        let missing = self.needs.iter().any(|c| match c {
            Constant::Cn => cfg.cn.is_none(),
            Constant::UniformC => cfg.uniform_c.is_none(),
            Constant::QedC => cfg.qed_c.is_none(),
        });
        let base = |status: String, min_slack: Option<f64>, argmin: Option<String>, passed: bool| VerifyEntry {
            check_id: self.id.to_string(),
            provenance: self.provenance.to_string(),
            grid_spec: self.grid_spec.to_string(),
            tolerance: self.tolerance,
            min_slack,
            argmin,
            passed,
            status,
        };
        if missing {
            return base("skipped: unconfigured constant".into(), None, None, false);
        }
        match (self.run)(cfg) {
            Ok(o) => {
                let passed = o.min_slack >= -self.tolerance;
                let status = if passed { "passed" } else { "failed" };
                base(status.into(), Some(o.min_slack), Some(o.argmin), passed)
            }
            Err(e) => base(format!("error: {e}"), None, None, false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct VerifyEntry {
    pub check_id: String,
    pub provenance: String,
    pub grid_spec: String,
    pub tolerance: f64,
    pub min_slack: Option<f64>,
    pub argmin: Option<String>,
    pub passed: bool,
    pub status: String,
}

impl VerifyEntry {
    pub fn skipped(&self) -> bool {
        self.status.starts_with("skipped")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
    pub summary: Summary,
}

/// Runs the selected checks (in parallel when `exec` allows); entries keep registration order.
pub fn run_checks(exec: Exec, filter: Option<&Regex>, cfg: &VerifyConfig) -> VerifyReport {
    let checks: Vec<Check> = registry().into_iter().filter(|c| filter.is_none_or(|r| r.is_match(c.id))).collect();
    let entries = exec.map(checks.len(), |i| checks[i].run(cfg));
    let skipped = entries.iter().filter(|e| e.skipped()).count();
    let passed = entries.iter().filter(|e| e.passed).count();
    let summary = Summary { total: entries.len(), passed, failed: entries.len() - passed - skipped, skipped };
    VerifyReport { entries, summary }
}

struct Acc {
    slack: f64,
    at: String,
}

impl Acc {
    fn new() -> Self {
        Acc { slack: f64::INFINITY, at: String::new() }
    }

    fn push(&mut self, slack: f64, at: impl FnOnce() -> String) {
        let s = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if s < self.slack {
            self.slack = s;
            self.at = at();
        }
    }

    fn done(self) -> Result<Outcome> {
        Ok(Outcome { min_slack: self.slack, argmin: self.at })
    }
}

fn check(
    id: &'static str,
    provenance: &'static str,
    grid_spec: &'static str,
    tolerance: f64,
    needs: &'static [Constant],
    run: RunFn,
) -> Check {
    Check { id, provenance, grid_spec, tolerance, needs, run }
}

pub fn registry() -> Vec<Check> {
    vec![
        check("sf.mu_identity", "μ(r)μ(r′) = π²/4", "r = 0.01..0.99 step 0.01", 1e-11, &[], sf_mu_identity),
        check("sf.phipyth", "φ_K(r)² + φ_{1/K}(r′)² = 1", "K = 1.1..5 step 0.1 × r = 0.01..0.99 step 0.01", 1e-9, &[], sf_phipyth),
        check("sf.gamma_tau", "γ₂(s) = 2τ₂(s² − 1), relative", "s = 1 + 49i/500, i = 1..500", 1e-10, &[], sf_gamma_tau),
        check("sf.spot_values", "γ₂(√2) = 4, τ₂(1) = 2", "two points", 1e-12, &[], sf_spot_values),
        check("sf.monotone", "μ, γ₂, τ₂ decreasing; φ_K increasing", "log grids, 200 points each", 0.0, &[], sf_monotone),
        check("sf.phi2_bracket", "s ≤ Φ₂(s) = exp(μ(1/s)) ≤ 4s (λ₂ = 4)", "s = 1..100, 400 points", 1e-12, &[], sf_phi2_bracket),
        check("sf.tau_n_order", "τ_n bounds ordered, exact in the plane", "n = 2,3,4 × log t grid", 1e-12, &[], sf_tau_n_order),
        check("metrics.axioms", "metric axioms and triangle inequality", "200 seeded triples", 1e-9, &[], metrics_axioms),
        check("metrics.j_le_k", "j_G ≤ k_G", "500 seeded pairs in R²∖{0}", 1e-12, &[], metrics_j_le_k),
        check("metrics.j_delta", "j ≤ δ ≤ 2j (Seittenranta)", "30 seeded pairs, half-plane with 4001 boundary samples", 1e-3, &[], metrics_j_delta),
        check("metrics.qh_isometry", "k_{φG}(φx, φy) = k_G(x, y) for Euclidean isometries φ", "200 seeded pairs", 1e-10, &[], metrics_qh_isometry),
        check("metrics.cross_ratio_mobius", "cross ratio invariant under inversion and similarities", "200 seeded quadruples", 1e-10, &[], metrics_cross_ratio),
        check("metrics.tanh", "|x − y| ≤ 2 tanh(ρ(x, y)/4), equality for x = −y", "40 × 40 grid in B²", 1e-14, &[], metrics_tanh),
        check("metrics.ferrand", "k(n, n+1) = log((n+1)/n) in R²∖{0}; image gap 4π", "n = 1..10", 1e-9, &[], metrics_ferrand),
        check("metrics.uniform_half_plane", "k_G ≤ c j_G with the configured uniform constant", "200 seeded pairs in the half-plane", 1e-12, &[Constant::UniformC], metrics_uniform),
        check("chart.gating", "edges refuse to evaluate without their preconditions", "every builtin edge", 0.0, &[], chart_gating),
        check("chart.monotone", "every ζ increasing and vanishing at 0⁺", "log grid t = 1e-8..10, n = 2, 3", 0.0, &[], chart_monotone),
        check("chart.composition", "best path ≤ the composed cell", "t ∈ {1e-3, 0.01, 0.05, 0.1, 0.2}", 1e-12, &[], chart_composition),
        check("chart.export", "at least 20 edges, each with a citation", "builtin chart", 0.0, &[], chart_export),
        check("chart.configured_constants", "μ → λ⁻¹ transfer with configured c_n and QED constant", "t ∈ {0.01, 0.1}", 1e-12, &[Constant::Cn, Constant::QedC], chart_configured),
        check("balls.quasiball_punctured", "B(x, (1−e^{−M})d) ⊂ D_k(x, M) ⊂ B(x, (e^M−1)d) in R²∖{0}", "M ∈ {0.2, 0.5, 1}, 720 samples per circle", 0.0, &[], balls_quasiball),
        check("balls.mu_constants", "d₂ increasing in t and d₂ < d₃", "t = 0.5..10, 60 points", 0.0, &[], balls_mu_constants),
        check("balls.circumscribed_p", "p(e^{iθ(T)}) = 1/T", "T = 0.05..0.45 step 0.05", 1e-9, &[], balls_circumscribed_p),
        check("balls.circumscribed_limit", "R_T within 0.01 of 2 at T = 0.499", "T = 0.499", 0.0, &[], balls_circumscribed_limit),
        check("balls.antipodal_quartic", "quartic root in (0.11, 0.12]; M(Δ₁) ≥ M(Δ₀) at s = r exactly above it", "r ∈ {0.10, 0.12, 0.5, 0.9}", 0.0, &[], balls_quartic),
        check("balls.heikkala_cubic", "root of r³ + r² − 1 in (0.75, 0.76)", "bisection", 0.0, &[], balls_cubic),
        check("distort.eta1b", "e^{π(K−1)} < η_{K,2}(1) < e^{b(K−1)}, b = 4.376879", "K = 1.01..2.5 step 0.01", 0.0, &[], distort_eta1b),
        check("distort.mn_lemma", "log(2^{3K−2}K^{2K} − 1) ≤ (4 + 6 log 2)(K − 1); fixed point a > 17", "K = 1..17 step 0.005", 1e-10, &[], distort_mn_lemma),
        check("distort.lens", "lens diameter below the √ε and linear bounds", "100 seeded admissible configurations, 2e4 samples each", 0.0, &[], distort_lens),
        check("distort.growth_envelope", "radial stretch inside the two-point growth envelope", "n = 2,3,4 × K ∈ {1.01, 1.3, 2} × |x| = 0.01..2", 1e-12, &[], distort_growth),
        check("distort.stabrmk", "linear displacement constants and growth lemmas", "K = 1.05..2 step 0.05, n = 2, 3", 1e-12, &[], distort_stabrmk),
        check("distort.euclid_sanity", "(b/2)(K−1) ≤ (9/2)(K−1) and the planar bound below it", "K = 1..17 step 0.1", 1e-12, &[], distort_euclid),
        check("harmonic.exponent", "q = 4k/(1+k)², q(1/3) = 3/4", "k = 0..0.99", 1e-15, &[], harmonic_exponent),
        check("harmonic.laplacians", "Δ|f|², |∇|f|²|², Δ|f|^p against finite differences", "50 seeded (f, z, p)", 1e-6, &[], harmonic_laplacians),
        check("harmonic.chain_rule", "Δ(u^α) assembled from Δu and |∇u|² equals Δ|f|^p", "200 seeded (f, z, p)", 1e-9, &[], harmonic_chain_rule),
        check("harmonic.subharmonic_optimality", "sign of Δ|f|^p(1) changes at p = q; min Δ|f|^q ≥ 0", "k ∈ {0.2, 1/3, 0.6}, 201² grid", 1e-9, &[], harmonic_subharmonic),
        check("harmonic.schwarz", "|h(ξ)| ≤ (4/π)‖h‖∞|ξ|", "100 seeded harmonic polynomials", 1e-6, &[], harmonic_schwarz),
        check("harmonic.counterexample_moduli", "ω(δ)/δ ≤ 1.8 but ω̃(δ)/δ grows for Σ(−1)ⁿrⁿcos nθ/n²", "2048 modes, δ ∈ {0.1, 0.01, 0.001}", 0.0, &[], harmonic_counterexample),
        check("harmonic.linear_moduli_ratio", "ω̃/ω for z + 0.5 z̄ varies < 10%", "δ ∈ {0.1, 0.01, 0.001}", 0.0, &[], harmonic_linear_ratio),
        check("harmonic.poisson_ball", "P[const] = const; tangential derivative of P[ξ] bounded", "|x| ∈ {0.9, 0.99, 0.999}, 64-node quadrature", 1e-6, &[], harmonic_poisson_ball),
    ]
}

fn sf_mu_identity(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for i in 1..=99 {
        let r = i as f64 / 100.0;
        let e = (mu(r)? * mu((1.0 - r * r).sqrt())? - FRAC_PI_2 * FRAC_PI_2).abs();
        a.push(-e, || format!("r={r}"));
    }
    a.done()
}

fn sf_phipyth(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for ki in 11..=50 {
        let k = ki as f64 / 10.0;
        for i in 1..=99 {
            let r = i as f64 / 100.0;
            let rc = (1.0 - r * r).sqrt();
            let e = (phi_k(k, r)?.powi(2) + phi_k(1.0 / k, rc)?.powi(2) - 1.0).abs();
            a.push(-e, || format!("K={k}, r={r}"));
        }
    }
    a.done()
}

fn sf_gamma_tau(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for i in 1..=500 {
        let s = 1.0 + 49.0 * i as f64 / 500.0;
        let g = gamma2(s)?;
        a.push(-((g - 2.0 * tau2(s * s - 1.0)?) / g).abs(), || format!("s={s}"));
    }
    a.done()
}

fn sf_spot_values(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    a.push(-(gamma2(2f64.sqrt())? - 4.0).abs(), || "gamma2(sqrt 2)".into());
    a.push(-(tau2(1.0)? - 2.0).abs(), || "tau2(1)".into());
    a.done()
}

fn sf_monotone(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let grid = |lo: f64, hi: f64| -> Vec<f64> { (0..200).map(|i| lo + (hi - lo) * i as f64 / 199.0).collect() };
    let dec = |a: &mut Acc, name: &str, xs: &[f64], f: &dyn Fn(f64) -> Result<f64>| -> Result<()> {
        for w in xs.windows(2) {
            let d = f(w[0])? - f(w[1])?;
            a.push(d, || format!("{name} at {}", w[1]));
        }
        Ok(())
    };
    dec(&mut a, "mu", &grid(0.01, 0.99), &|r| mu(r))?;
    dec(&mut a, "gamma2", &grid(1.05, 50.0), &|s| gamma2(s))?;
    dec(&mut a, "tau2", &grid(0.05, 50.0), &|t| tau2(t))?;
    for k in [0.5, 2.0, 4.0] {
        dec(&mut a, "phi_K (negated)", &grid(0.01, 0.99), &|r| phi_k(k, r).map(|v| -v))?;
    }
    a.done()
}

fn sf_phi2_bracket(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for i in 1..=400 {
        let s = 1.0 + 99.0 * i as f64 / 400.0;
        let p = (2.0 * PI / gamma2(s)?).exp();
        a.push(((p - s) / s).min((4.0 * s - p) / s), || format!("s={s}"));
    }
    a.done()
}

fn sf_tau_n_order(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for n in [2, 3, 4] {
        for i in 0..=60 {
            let t = 10f64.powf(-3.0 + i as f64 * 0.1);
            let b = tau_n_bounds(n, t)?;
            a.push((b.hi - b.lo) / b.hi, || format!("n={n}, t={t}"));
            if n == 2 {
                let v = tau2(t)?;
                a.push(-((b.lo - v).abs() + (b.hi - v).abs()) / v, || format!("n=2, t={t}"));
            }
        }
    }
    a.done()
}

fn rng(cfg: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
}

type Dist<'a> = dyn Fn(&[f64; 2], &[f64; 2]) -> Result<f64> + 'a;

fn metrics_axioms(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 1);
    let ball = DomainSpec::ball(2, 64)?;
    let mut a = Acc::new();
    for _ in 0..200 {
        let mut pt = || {
            let (rad, ang): (f64, f64) = (0.95 * r.gen::<f64>().sqrt(), r.gen_range(0.0..2.0 * PI));
            [rad * ang.cos(), rad * ang.sin()]
        };
        let (x, y, z) = (pt(), pt(), pt());
        let ds: [(&str, Box<Dist<'_>>); 4] = [
            ("chordal", Box::new(|p, q| Ok(chordal(&ExtendedPoint::finite(p), &ExtendedPoint::finite(q))))),
            ("j", Box::new(|p, q| j_metric(&ball, p, q))),
            ("rho", Box::new(|p, q| hyperbolic_ball(p, q))),
            ("k_punctured", Box::new(|p, q| quasihyperbolic_exact(ExactKind::PuncturedSpace, p, q))),
        ];
        for (name, d) in &ds {
            let (xy, yx, xz, zy, xx) = (d(&x, &y)?, d(&y, &x)?, d(&x, &z)?, d(&z, &y)?, d(&x, &x)?);
            a.push(xz + zy - xy, || format!("{name} triangle at {x:?}, {y:?}, {z:?}"));
            a.push(-(xy - yx).abs(), || format!("{name} symmetry at {x:?}, {y:?}"));
            a.push(-xx.abs(), || format!("{name} identity at {x:?}"));
            a.push(xy, || format!("{name} nonnegativity at {x:?}, {y:?}"));
        }
    }
    a.done()
}

fn metrics_j_le_k(cfg: &VerifyConfig) -> Result<Outcome> {
    let g = DomainSpec::punctured_space(2)?;
    let mut r = rng(cfg, 2);
    let mut a = Acc::new();
    for _ in 0..500 {
        let x = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let y = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let j = j_metric(&g, &x, &y)?;
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y)?;
        a.push(k - j, || format!("{x:?}, {y:?}"));
    }
    a.done()
}

fn metrics_j_delta(cfg: &VerifyConfig) -> Result<Outcome> {
    let h = DomainSpec::half_space(2, 4001)?;
    let mut r = rng(cfg, 3);
    let mut a = Acc::new();
    for _ in 0..30 {
        let x = [r.gen_range(-1.0..1.0), r.gen_range(0.2..2.0)];
        let y = [r.gen_range(-1.0..1.0), r.gen_range(0.2..2.0)];
        let j = j_metric(&h, &x, &y)?;
        let d = seittenranta(&h, &x, &y)?.value;
        a.push(d - j, || format!("j ≤ δ at {x:?}, {y:?}"));
        a.push(2.0 * j - d, || format!("δ ≤ 2j at {x:?}, {y:?}"));
    }
    a.done()
}

fn metrics_qh_isometry(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 4);
    let mut a = Acc::new();
    for _ in 0..200 {
        let x = [r.gen_range(-2.0..2.0), r.gen_range(0.1..2.0)];
        let y = [r.gen_range(-2.0..2.0), r.gen_range(0.1..2.0)];
        let k = quasihyperbolic_exact(ExactKind::HalfSpace, &x, &y)?;
        let s = r.gen_range(-5.0..5.0);
        let k2 = quasihyperbolic_exact(ExactKind::HalfSpace, &[-(x[0] + s), x[1]], &[-(y[0] + s), y[1]])?;
        a.push(-(k - k2).abs() / k.max(1.0), || format!("half-plane {x:?}, {y:?}"));
        let t: f64 = r.gen_range(0.0..2.0 * PI);
        let rot = |v: &[f64; 2]| [t.cos() * v[0] - t.sin() * v[1], t.sin() * v[0] + t.cos() * v[1]];
        let kp = quasihyperbolic_exact(ExactKind::PuncturedSpace, &x, &y)?;
        let kr = quasihyperbolic_exact(ExactKind::PuncturedSpace, &rot(&x), &rot(&y))?;
        a.push(-(kp - kr).abs() / kp.max(1.0), || format!("punctured {x:?}, {y:?}"));
    }
    a.done()
}

fn metrics_cross_ratio(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 5);
    let mut a = Acc::new();
    let inv = |p: [f64; 2]| {
        let q = p[0] * p[0] + p[1] * p[1];
        [p[0] / q, p[1] / q]
    };
    for _ in 0..200 {
        let mut pt = || [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let ps = [pt(), pt(), pt(), pt()];
        let (s, th, sh) = (r.gen_range(0.1..10.0), r.gen_range(0.0..2.0 * PI), [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]);
        let sim = |p: [f64; 2]| {
            let (c, si) = (f64::cos(th), f64::sin(th));
            [s * (c * p[0] - si * p[1]) + sh[0], s * (si * p[0] + c * p[1]) + sh[1]]
        };
        let cr = |q: [[f64; 2]; 4]| {
            let e = q.map(|v| ExtendedPoint::finite(&v));
            cross_ratio(&e[0], &e[1], &e[2], &e[3])
        };
        let base = cr(ps)?;
        for (name, img) in [("inversion", ps.map(inv)), ("similarity", ps.map(sim))] {
            let v = cr(img)?;
            a.push(-(v - base).abs() / base.max(1.0), || format!("{name} at {ps:?}"));
        }
    }
    a.done()
}

fn metrics_tanh(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let d = |x: &[f64; 2], y: &[f64; 2]| (x[0] - y[0]).hypot(x[1] - y[1]);
    for i in 0..40 {
        let t = 2.0 * PI * i as f64 / 40.0;
        let rr = 0.95 * i as f64 / 40.0;
        let x = [rr * t.cos(), rr * t.sin()];
        for k in 0..40 {
            let y = [0.9 * k as f64 / 40.0 - 0.45, 0.3];
            let rho = hyperbolic_ball(&x, &y)?;
            a.push(2.0 * (rho / 4.0).tanh() - d(&x, &y), || format!("{x:?}, {y:?}"));
        }
        let rho = hyperbolic_ball(&[rr, 0.0], &[-rr, 0.0])?;
        a.push(-(2.0 * rr - 2.0 * (rho / 4.0).tanh()).abs(), || format!("x = −y, |x| = {rr}"));
    }
    a.done()
}

fn metrics_ferrand(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for n in 1..=10 {
        let nf = n as f64;
        let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[nf, 0.0], &[nf + 1.0, 0.0])?;
        // identity part is held to 1e−12, well inside the check tolerance
        a.push(-(k - ((nf + 1.0) / nf).ln()).abs() * 1e3, || format!("k({n}, {})", n + 1));
    }
    let e = (4.0 * PI).exp();
    let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[e, 0.0], &[e * e, 0.0])?;
    a.push(-(k - 4.0 * PI).abs(), || "k(e^{4π}, e^{8π})".into());
    a.done()
}

fn metrics_uniform(cfg: &VerifyConfig) -> Result<Outcome> {
    let c = cfg.uniform_c.expect("gated");
    let h = DomainSpec::half_space(2, 64)?;
    let mut r = rng(cfg, 6);
    let mut a = Acc::new();
    for _ in 0..200 {
        let x = [r.gen_range(-3.0..3.0), r.gen_range(0.01..3.0)];
        let y = [r.gen_range(-3.0..3.0), r.gen_range(0.01..3.0)];
        let k = quasihyperbolic_exact(ExactKind::HalfSpace, &x, &y)?;
        let j = j_metric(&h, &x, &y)?;
        a.push((c * j - k) / k.max(1.0), || format!("{x:?}, {y:?}"));
    }
    a.done()
}

fn violations(v: Vec<String>) -> Result<Outcome> {
    Ok(Outcome { min_slack: -(v.len() as f64), argmin: v.into_iter().next().unwrap_or_default() })
}

fn chart_gating(_: &VerifyConfig) -> Result<Outcome> {
    violations(gating_violations(&builtin_chart()))
}

fn chart_monotone(_: &VerifyConfig) -> Result<Outcome> {
    violations(monotonicity_violations(&builtin_chart()))
}

fn chart_composition(_: &VerifyConfig) -> Result<Outcome> {
    let (min_slack, argmin) = composition_slack(&builtin_chart());
    Ok(Outcome { min_slack, argmin })
}

fn chart_export(_: &VerifyConfig) -> Result<Outcome> {
    let rows = builtin_chart().export();
    let mut v: Vec<String> = rows
        .iter()
        .filter(|r| r.provenance.trim().is_empty())
        .map(|r| format!("{}→{} has no citation", r.from, r.to))
        .collect();
    if rows.len() < 20 {
        v.insert(0, format!("only {} edges", rows.len()));
    }
    violations(v)
}

fn chart_configured(cfg: &VerifyConfig) -> Result<Outcome> {
    let p = DomainProps {
        cn: cfg.cn,
        qed_constant: cfg.qed_c,
        boundary_connected: true,
        boundary_card_ge_2: true,
        ..DomainProps::new(2)
    };
    let chart = builtin_chart();
    let mut a = Acc::new();
    for t in [0.01, 0.1] {
        match chart.query(MetricId::Mu, MetricId::LambdaInv, &p, t) {
            Some(q) => a.push(q.value.is_finite() as u8 as f64 - 1.0, || format!("t={t}")),
            None => a.push(-1.0, || format!("no path at t={t}")),
        }
    }
    a.done()
}

fn balls_quasiball(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for m in [0.2, 0.5, 1.0] {
        let q = quasiball_margins(Exec::default(), m, 720)?;
        a.push(q.inner_slack, || format!("inner circle, M={m}"));
        a.push(q.outer_slack, || format!("outer circle, M={m}"));
    }
    a.done()
}

fn balls_mu_constants(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let mut prev: Option<f64> = None;
    for i in 0..60 {
        let t = 0.5 + 9.5 * i as f64 / 59.0;
        let r = mu_ball_constants(2, t)?;
        let (d2, d3) = (r.aux_constants["d2"], r.aux_constants["d3"]);
        a.push(d3 - d2, || format!("d2 < d3 at t={t}"));
        if let Some(p) = prev {
            a.push(d2 - p, || format!("d2 increasing at t={t}"));
        }
        prev = Some(d2);
    }
    a.done()
}

fn balls_circumscribed_p(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for i in 1..=9 {
        let t = 0.05 * i as f64;
        let v = teichmuller_p_circle(circumscribed_lambda_angle(t)?)?;
        a.push(-(v - 1.0 / t).abs(), || format!("T={t}"));
    }
    a.done()
}

fn balls_circumscribed_limit(_: &VerifyConfig) -> Result<Outcome> {
    let r = circumscribed_lambda_radius(0.499)?;
    Ok(Outcome { min_slack: 0.01 - (2.0 - r).abs(), argmin: format!("T=0.499, R_T={r}") })
}

fn balls_quartic(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let root = antipodal_threshold();
    a.push((root - 0.11).min(0.12 - root), || format!("root {root}"));
    a.push(-quartic(0.12), || "quartic(0.12) ≤ 0".into());
    for r in [0.12, 0.5, 0.9] {
        a.push(m_delta1(r, r)? - m_delta0(r)?, || format!("M(Δ₁) ≥ M(Δ₀) at r={r}"));
    }
    a.push(m_delta0(0.10)? - m_delta1(0.10, 0.10)?, || "violation expected at r=0.10".into());
    a.done()
}

fn balls_cubic(_: &VerifyConfig) -> Result<Outcome> {
    let r = heikkala_cubic_root();
    Ok(Outcome { min_slack: (r - 0.75).min(0.76 - r), argmin: format!("root {r}") })
}

fn distort_eta1b(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let b = b_constant();
    a.push(1e-5 - (b - 4.376879).abs(), || format!("b = {b}"));
    for i in 1..=150 {
        let k = 1.0 + i as f64 / 100.0;
        let eta = eta_k_n(2, k, 1.0)?.lo;
        let l = eta.ln();
        a.push(l - PI * (k - 1.0), || format!("lower at K={k}"));
        a.push(b * (k - 1.0) - l, || format!("upper at K={k}"));
    }
    a.done()
}

fn distort_mn_lemma(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for i in 0..=3200 {
        let k = 1.0 + i as f64 * 0.005;
        a.push(-mn_gap(3.0, 2.0, k), || format!("K={k}"));
    }
    let fp = mn_fixed_point(3.0, 2.0)?;
    a.push(fp.a - 17.0, || format!("a = {}", fp.a));
    a.push(1e-8 - fp.residual, || format!("residual {}", fp.residual));
    a.done()
}

fn distort_lens(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 7);
    let mut a = Acc::new();
    for case in 0..100 {
        let x = loop {
            let x: [f64; 2] = [r.gen_range(-1.5..2.5), r.gen_range(0.05..2.0)];
            let (m, d) = (x[0].hypot(x[1]), (x[0] - 1.0).hypot(x[1]));
            if m.min(d) > 0.05 {
                break x;
            }
        };
        let (m, d) = (x[0].hypot(x[1]), (x[0] - 1.0).hypot(x[1]));
        let lin_ok = m < 2.0 && d <= m && lens_linear_window(x) > 0.0;
        let cap = if lin_ok { lens_linear_window(x) } else { 1f64.min(m).min(d) };
        let eps = cap * r.gen_range(0.01..0.99) * [1.0, 0.1, 0.01][case % 3];
        let brute = lens_diam_brute(x, eps, 20_000, cfg.seed.wrapping_add(case as u64))?;
        let sq = lens_diam_bound_sqrt(x, eps)?;
        a.push((sq - brute) / sq, || format!("√ε bound at x={x:?}, ε={eps}"));
        if lin_ok {
            let omega = x[1].atan2(x[0]);
            let li = lens_diam_bound_linear(x, eps, omega)?;
            a.push((li - brute) / li, || format!("linear bound at x={x:?}, ε={eps}"));
        }
    }
    a.done()
}

fn distort_growth(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for n in [2u32, 3, 4] {
        for k in [1.01f64, 1.3, 2.0] {
            let al = k.powf(1.0 / (1.0 - n as f64));
            for i in 1..=200 {
                let r = i as f64 * 0.01;
                let e = two_point_growth_bounds(n, k, r)?;
                let v = r.powf(al);
                a.push((v - e.lo).min(e.hi - v) / v, || format!("n={n}, K={k}, |x|={r}"));
            }
        }
    }
    a.done()
}

fn distort_stabrmk(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    for n in [2, 3] {
        for i in 1..=20 {
            let k = 1.0 + 0.05 * i as f64;
            let rep = stabrmk_checks(Exec::Sequential, n, k)?;
            for e in rep.entries {
                a.push(e.min_slack, || format!("{} n={n} K={k} at {}", e.name, e.argmin));
            }
        }
    }
    a.done()
}

fn distort_euclid(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let b = b_constant();
    for i in 0..=160 {
        let k = 1.0 + 0.1 * i as f64;
        a.push((4.5 - 0.5 * b) * (k - 1.0), || format!("K={k}"));
        a.push(4.5 * (k - 1.0) - id_boundary_euclid_bound(2, k)?, || format!("planar bound at K={k}"));
        let rho = id_boundary_rho_bound(3, k)?;
        a.push(rho.hi - rho.lo, || format!("ρ interval at K={k}"));
    }
    a.done()
}

fn harmonic_exponent(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    a.push(-(subharmonic_exponent(1.0 / 3.0)? - 0.75).abs(), || "k=1/3".into());
    let mut prev = -1.0;
    for i in 0..100 {
        let q = subharmonic_exponent(i as f64 / 100.0)?;
        a.push((q - prev).min(1.0 - q), || format!("k={}", i as f64 / 100.0));
        prev = q;
    }
    a.done()
}

fn random_map(r: &mut ChaCha8Rng) -> HarmonicPlanarMap {
    let (ng, nh) = (r.gen_range(2..6), r.gen_range(1..5));
    let mut coefs = |n: usize| -> Vec<num_complex::Complex64> {
        (0..n).map(|_| num_complex::Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
    };
    let g = coefs(ng);
    HarmonicPlanarMap::new(g, coefs(nh))
}

/// Fourth-order finite differences of `u` at `(x, y)`: (Laplacian, |∇u|²).
fn fd4(u: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> (f64, f64) {
    let d2 = |a: f64, b: f64, c: f64, d: f64, e: f64| (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
    let d1 = |a: f64, b: f64, d: f64, e: f64| (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
    let c = u(x, y);
    let (xm2, xm1, xp1, xp2) = (u(x - 2.0 * h, y), u(x - h, y), u(x + h, y), u(x + 2.0 * h, y));
    let (ym2, ym1, yp1, yp2) = (u(x, y - 2.0 * h), u(x, y - h), u(x, y + h), u(x, y + 2.0 * h));
    let lap = d2(xm2, xm1, c, xp1, xp2) + d2(ym2, ym1, c, yp1, yp2);
    let gx = d1(xm2, xm1, xp1, xp2);
    let gy = d1(ym2, ym1, yp1, yp2);
    (lap, gx * gx + gy * gy)
}

fn harmonic_laplacians(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 8);
    let mut a = Acc::new();
    let mut done = 0;
    while done < 50 {
        let f = random_map(&mut r);
        let z = num_complex::Complex64::from_polar(r.gen_range(0.0..0.8), r.gen_range(0.0..2.0 * PI));
        if f.eval(z).norm() < 0.1 {
            continue;
        }
        let p = r.gen_range(0.5..4.0);
        done += 1;
        let sq = |x: f64, y: f64| f.eval(num_complex::Complex64::new(x, y)).norm_sqr();
        let pw = |x: f64, y: f64| f.eval(num_complex::Complex64::new(x, y)).norm().powf(p);
        let (lap_sq, grad_sq) = fd4(&sq, z.re, z.im, 1e-3);
        let (lap_p, _) = fd4(&pw, z.re, z.im, 1e-3);
        let rel = |exact: f64, fd: f64| -(exact - fd).abs() / exact.abs().max(1.0);
        let (e1, e2, e3) = (laplacian_abs_f_sq(&f, z)?, grad_abs_f_sq(&f, z)?, laplacian_abs_f_p(&f, z, p)?);
        a.push(rel(e1, lap_sq), || format!("Δ|f|² at {z}"));
        a.push(rel(e2, grad_sq), || format!("|∇|f|²|² at {z}"));
        a.push(rel(e3, lap_p), || format!("Δ|f|^p at {z}, p={p}"));
    }
    a.done()
}

fn harmonic_chain_rule(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 9);
    let mut a = Acc::new();
    for _ in 0..200 {
        let f = random_map(&mut r);
        let z = num_complex::Complex64::from_polar(r.gen_range(0.0..0.9), r.gen_range(0.0..2.0 * PI));
        let u = f.eval(z).norm_sqr();
        if u < 1e-6 {
            continue;
        }
        let p = r.gen_range(0.1..4.0);
        let al = p / 2.0;
        let lhs = al * u.powf(al - 1.0) * laplacian_abs_f_sq(&f, z)?
            + al * (al - 1.0) * u.powf(al - 2.0) * grad_abs_f_sq(&f, z)?;
        let rhs = laplacian_abs_f_p(&f, z, p)?;
        a.push(-(lhs - rhs).abs() / rhs.abs().max(1.0), || format!("z={z}, p={p}"));
    }
    a.done()
}

fn harmonic_subharmonic(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let one = num_complex::Complex64::new(1.0, 0.0);
    for k in [0.2, 1.0 / 3.0, 0.6] {
        let f = HarmonicPlanarMap::linear(k);
        let q = subharmonic_exponent(k)?;
        let below = laplacian_abs_f_p(&f, one, q - 1e-3)?;
        let above = laplacian_abs_f_p(&f, one, q + 1e-3)?;
        // the sign change shows up as below < 0 < above
        a.push((-below).min(above) * 1e9, || format!("sign change at k={k}"));
        let s = check_subharmonic(Exec::Sequential, &f, q, 0.999, 201, 1e-9)?;
        a.push(s.min_value, || format!("grid scan k={k} at {:?}", s.argmin));
    }
    a.done()
}

fn harmonic_schwarz(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut r = rng(cfg, 10);
    let mut a = Acc::new();
    for _ in 0..100 {
        let mut f = random_map(&mut r);
        f.g[0] = num_complex::Complex64::new(0.0, 0.0);
        f.h[0] = num_complex::Complex64::new(0.0, 0.0);
        let sup = f.circle_values(1.0, 1024).iter().map(|w| w.re.abs()).fold(0.0, f64::max);
        for _ in 0..20 {
            let z = num_complex::Complex64::from_polar(r.gen_range(0.01..0.99), r.gen_range(0.0..2.0 * PI));
            let bound = 4.0 / PI * sup * z.norm();
            a.push((bound - f.eval(z).re.abs()) / bound.max(1e-300), || format!("z={z}"));
        }
    }
    a.done()
}

fn counterexample_ratios() -> Result<(Vec<f64>, Vec<f64>)> {
    let f = HarmonicPlanarMap::counterexample(2048);
    let phi = f.boundary_samples(1 << 18)?;
    let grid = DiskGrid::default();
    let mut w = Vec::new();
    let mut wt = Vec::new();
    for d in [0.1, 0.01, 0.001] {
        w.push(boundary_modulus_with(Exec::default(), &phi, d)? / d);
        wt.push(closed_modulus_with(Exec::default(), &f, d, &grid)? / d);
    }
    Ok((w, wt))
}

fn harmonic_counterexample(_: &VerifyConfig) -> Result<Outcome> {
    let (w, wt) = counterexample_ratios()?;
    let mut a = Acc::new();
    for (i, d) in [0.1, 0.01, 0.001].iter().enumerate() {
        a.push(1.8 - w[i], || format!("ω(δ)/δ = {} at δ={d}", w[i]));
    }
    a.push(wt[2] / wt[0] - 2.0, || format!("ω̃ growth factor {}", wt[2] / wt[0]));
    a.done()
}

/// `(ω̃/ω)` for `z + k z̄` at δ ∈ {0.1, 0.01, 0.001}.
pub fn linear_moduli_ratios(k: f64) -> Result<Vec<f64>> {
    let f = HarmonicPlanarMap::linear(k);
    let phi = f.boundary_samples(1 << 16)?;
    let grid = DiskGrid { n_theta: 1024, ..DiskGrid::default() };
    let mut out = Vec::new();
    for d in [0.1, 0.01, 0.001] {
        out.push(closed_modulus_with(Exec::default(), &f, d, &grid)? / boundary_modulus_with(Exec::default(), &phi, d)?);
    }
    Ok(out)
}

/// `ω(δ)/δ` and `ω̃(δ)/δ` for the truncated counterexample series at δ ∈ {0.1, 0.01, 0.001}.
pub fn counterexample_moduli_ratios() -> Result<(Vec<f64>, Vec<f64>)> {
    counterexample_ratios()
}

fn harmonic_linear_ratio(_: &VerifyConfig) -> Result<Outcome> {
    let r = linear_moduli_ratios(0.5)?;
    let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(Outcome { min_slack: 0.1 - (hi - lo) / lo, argmin: format!("ratios {r:?}") })
}

fn harmonic_poisson_ball(_: &VerifyConfig) -> Result<Outcome> {
    let mut a = Acc::new();
    let v = [0.3, -1.0, 2.0];
    let cst = SphereBoundaryFunction::new(move |_| v, 0.0)?;
    let id = SphereBoundaryFunction::new(|x| x, 1.0)?;
    for r in [0.0, 0.5, 0.9, 0.99] {
        let u = poisson_ball3(&cst, [0.0, 0.6 * r, 0.8 * r], 64)?;
        let e = (0..3).map(|i| (u[i] - v[i]).abs()).fold(0.0, f64::max);
        a.push(-e, || format!("constant at |x|={r}"));
    }
    for r in [0.9, 0.99, 0.999] {
        let d = tangential_derivative_norm(&id, [0.0, 0.0, r], 1e-4 * (1.0 - r), 64)?;
        // bounded by C·L; for φ(ξ) = ξ the extension is the identity, C = 1
        a.push((1.0 + 1e-6) * id.lipschitz - d, || format!("tangential derivative {d} at r={r}"));
    }
    a.done()
}
