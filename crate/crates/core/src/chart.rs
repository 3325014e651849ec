//! Moduli of continuity ζ_ρ^d between metrics, as a gated directed graph.
//!
//! `d(x, y) ≤ ζ(ρ(x, y))` holds on every domain whose properties satisfy the
//! edge preconditions. In dimension n ≥ 3 only bounds of γ_n and τ_n are known,
//! so each edge uses the end of the bound interval that keeps ζ an upper bound.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::DomainSpec;
use crate::special::{gamma_n_bounds, omega_sphere, tau_n_bounds, tau_n_inv_bounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricId {
    J,
    K,
    Mu,
    LambdaInv,
    Delta,
    Alpha,
    Euclid,
}

impl MetricId {
    pub const ALL: [MetricId; 7] =
        [MetricId::J, MetricId::K, MetricId::Mu, MetricId::LambdaInv, MetricId::Delta, MetricId::Alpha, MetricId::Euclid];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "j" => MetricId::J,
            "k" => MetricId::K,
            "mu" => MetricId::Mu,
            "lambda_inv" | "lambda" => MetricId::LambdaInv,
            "delta" => MetricId::Delta,
            "alpha" => MetricId::Alpha,
            "euclid" => MetricId::Euclid,
            _ => return Err(Error::Domain(format!("unknown metric '{s}'"))),
        })
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MetricId::J => "J",
            MetricId::K => "K",
            MetricId::Mu => "MU",
            MetricId::LambdaInv => "LAMBDA_INV",
            MetricId::Delta => "DELTA",
            MetricId::Alpha => "ALPHA",
            MetricId::Euclid => "EUCLID",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainProps {
    pub dimension: u32,
    pub uniform_constant: Option<f64>,
    pub qed_constant: Option<f64>,
    /// The dimension constant c_n of the lower bound μ_G ≥ c_n j_G.
    pub cn: Option<f64>,
    pub boundary_connected: bool,
    pub boundary_nondegenerate: bool,
    pub boundary_card_ge_2: bool,
    pub convex: bool,
    pub bounded_with_diam: Option<f64>,
    /// Caller asserts that the point pairs are local (y ∈ B(x, d(x))).
    pub local: bool,
}

impl DomainProps {
    pub fn new(dimension: u32) -> Self {
        DomainProps {
            dimension,
            uniform_constant: None,
            qed_constant: None,
            cn: None,
            boundary_connected: false,
            boundary_nondegenerate: false,
            boundary_card_ge_2: false,
            convex: false,
            bounded_with_diam: None,
            local: false,
        }
    }

    /// Everything asserted; used to exercise every edge.
    pub fn permissive(dimension: u32, c: f64) -> Self {
        DomainProps {
            dimension,
            uniform_constant: Some(c.max(1.0)),
            qed_constant: Some(c.min(1.0)),
            cn: Some(c),
            boundary_connected: true,
            boundary_nondegenerate: true,
            boundary_card_ge_2: true,
            convex: true,
            bounded_with_diam: Some(2.0),
            local: true,
        }
    }

    pub fn from_spec(d: &DomainSpec, cn: Option<f64>) -> Self {
        DomainProps {
            dimension: d.dimension,
            uniform_constant: d.flags.uniform_constant,
            qed_constant: d.flags.qed_constant,
            cn,
            boundary_connected: d.flags.boundary_connected,
            boundary_nondegenerate: d.flags.boundary_nondegenerate,
            boundary_card_ge_2: d.boundary_samples.len() >= 2,
            convex: d.flags.convex,
            bounded_with_diam: d.diam.is_finite().then_some(d.diam),
            local: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Req {
    Uniform,
    Qed,
    Cn,
    Connected,
    Nondegenerate,
    CardGe2,
    Convex,
    Bounded,
    Local,
    Plane,
}

impl Req {
    pub fn name(self) -> &'static str {
        match self {
            Req::Uniform => "uniform_constant",
            Req::Qed => "qed_constant",
            Req::Cn => "cn",
            Req::Connected => "boundary_connected",
            Req::Nondegenerate => "boundary_nondegenerate",
            Req::CardGe2 => "boundary_card_ge_2",
            Req::Convex => "convex",
            Req::Bounded => "bounded_with_diam",
            Req::Local => "local",
            Req::Plane => "dimension_2",
        }
    }

    fn holds(self, p: &DomainProps) -> bool {
        match self {
            Req::Uniform => p.uniform_constant.is_some(),
            Req::Qed => p.qed_constant.is_some(),
            Req::Cn => p.cn.is_some(),
            Req::Connected => p.boundary_connected,
            Req::Nondegenerate => p.boundary_nondegenerate,
            Req::CardGe2 => p.boundary_card_ge_2,
            Req::Convex => p.convex,
            Req::Bounded => p.bounded_with_diam.is_some(),
            Req::Local => p.local,
            Req::Plane => p.dimension == 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Global,
    LocalOnly,
}

type ZetaFn = fn(&DomainProps, f64) -> Result<f64>;

#[derive(Clone)]
pub struct ZetaEdge {
    pub from: MetricId,
    pub to: MetricId,
    pub formula: &'static str,
    pub preconds: Vec<Req>,
    pub validity: Validity,
    pub provenance: &'static str,
    /// ζ(t) decays like 1/log(1/t); such edges are monotone but not small at t = 1e−6.
    pub slow_decay: bool,
    f: ZetaFn,
}

impl fmt::Debug for ZetaEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{} [{}] {}", self.from, self.to, self.formula, self.provenance)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeRow {
    pub from: MetricId,
    pub to: MetricId,
    pub formula: &'static str,
    pub preconditions: Vec<&'static str>,
    pub validity: Validity,
    pub provenance: &'static str,
}

impl ZetaEdge {
    pub fn check(&self, props: &DomainProps) -> Result<()> {
        if self.validity == Validity::LocalOnly && !props.local {
            return Err(Error::Gated("local"));
        }
        for r in &self.preconds {
            if !r.holds(props) {
                return Err(Error::Gated(r.name()));
            }
        }
        Ok(())
    }

    pub fn row(&self) -> EdgeRow {
        let mut pre: Vec<&'static str> = self.preconds.iter().map(|r| r.name()).collect();
        if self.validity == Validity::LocalOnly {
            pre.push("local");
        }
        EdgeRow {
            from: self.from,
            to: self.to,
            formula: self.formula,
            preconditions: pre,
            validity: self.validity,
            provenance: self.provenance,
        }
    }
}

pub fn eval_edge(e: &ZetaEdge, props: &DomainProps, t: f64) -> Result<f64> {
    e.check(props)?;
    if !(t >= 0.0) {
        return Err(Error::Range(format!("ζ needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    (e.f)(props, t)
}

fn out_of_window(what: &str, t: f64) -> Error {
    Error::Range(format!("{what}: t = {t} is outside the validity window"))
}

fn n_of(p: &DomainProps) -> u32 {
    p.dimension
}

fn c_of(v: Option<f64>) -> f64 {
    v.expect("precondition checked")
}

/// Upper end of γ_n(1/(e^t − 1)), t < log 2.
fn gamma_of_j(p: &DomainProps, t: f64) -> Result<f64> {
    if t >= LN_2 {
        return Err(out_of_window("γ(1/(e^t−1)) needs t < log 2", t));
    }
    let s = 1.0 / t.exp_m1();
    if !s.is_finite() {
        return Ok(0.0);
    }
    Ok(gamma_n_bounds(n_of(p), s)?.hi)
}

fn omega_log(p: &DomainProps, t: f64) -> Result<f64> {
    if t >= 1.0 {
        return Err(out_of_window("ω(log(1/t))^{1−n} needs t < 1", t));
    }
    let n = n_of(p);
    Ok(omega_sphere(n)? * (1.0 / t).ln().powf(1.0 - n as f64))
}

/// Lower end of τ_n(s), with τ(∞) = 0.
fn tau_lo(n: u32, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Ok(0.0);
    }
    Ok(tau_n_bounds(n, s)?.lo)
}

fn tau_inv_hi(n: u32, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Ok(0.0);
    }
    Ok(tau_n_inv_bounds(n, y)?.hi)
}

fn tau_inv_lo(n: u32, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Ok(0.0);
    }
    Ok(tau_n_inv_bounds(n, y)?.lo)
}

fn j_to_lambda(p: &DomainProps, t: f64) -> Result<f64> {
    let c = c_of(p.qed_constant);
    Ok(1.0 / (c * tau_lo(n_of(p), (2.0 * t).exp_m1())?))
}

fn lambda_to_j(p: &DomainProps, t: f64) -> Result<f64> {
    Ok(tau_inv_hi(n_of(p), 1.0 / (SQRT_2 * t))?.ln_1p())
}

fn lambda_to_k(p: &DomainProps, t: f64) -> Result<f64> {
    let c3 = tau_inv_hi(n_of(p), 1.0 / (SQRT_2 * t))?;
    if c3 >= 1.0 {
        return Err(out_of_window("log(1/(1−τ⁻¹(1/(√2t)))) needs τ⁻¹ < 1", t));
    }
    Ok(-(-c3).ln_1p())
}

fn mu_to_j(p: &DomainProps, t: f64) -> Result<f64> {
    Ok(t / c_of(p.cn))
}

/// Both branches of h₂(3t): (2πα/log(1/(6t)), 324πt²), α = (9/8) log 2.
pub fn k_to_mu_h2_branches(t: f64) -> (f64, f64) {
    let alpha = 9.0 / 8.0 * LN_2;
    (2.0 * PI * alpha / (1.0 / (6.0 * t)).ln(), 324.0 * PI * t * t)
}

fn diam_of(p: &DomainProps) -> f64 {
    c_of(p.bounded_with_diam)
}

#[allow(clippy::too_many_arguments)]
fn edge(
    from: MetricId,
    to: MetricId,
    formula: &'static str,
    preconds: &[Req],
    validity: Validity,
    provenance: &'static str,
    slow_decay: bool,
    f: ZetaFn,
) -> ZetaEdge {
    ZetaEdge { from, to, formula, preconds: preconds.to_vec(), validity, provenance, slow_decay, f }
}

#[derive(Debug, Clone)]
pub struct TransferChart {
    pub edges: Vec<ZetaEdge>,
}

pub fn builtin_chart() -> TransferChart {
    use MetricId::*;
    use Req::*;
    use Validity::*;
    let edges = vec![
        edge(K, J, "t", &[], Global, "j_G ≤ k_G (length of any curve vs. distance ratio)", false, |_, t| Ok(t)),
        edge(J, K, "c·t", &[Uniform], Global, "uniform domain: k_G ≤ c·j_G", false, |p, t| {
            Ok(c_of(p.uniform_constant) * t)
        }),
        edge(
            J,
            Mu,
            "γ_n(1/(e^t−1)), t < log 2",
            &[],
            LocalOnly,
            "Grötzsch ring comparison in B(x, d(x)): μ_G ≤ γ_n(d(x)/|x−y|)",
            false,
            gamma_of_j,
        ),
        edge(
            J,
            Mu,
            "ω_{n−1}(log(1/t))^{1−n}, t < 1",
            &[],
            LocalOnly,
            "γ_n(s) ≤ ω_{n−1}(log s)^{1−n} applied to γ_n(1/(e^t−1))",
            false,
            omega_log,
        ),
        edge(
            K,
            Mu,
            "γ_n(1/(e^t−1)), t < log 2",
            &[Connected, Nondegenerate],
            Global,
            "μ-ball inclusion D_μ(a,t) ⊃ D_k(a, log(1 + 1/γ_n^{-1}(t)))",
            true,
            gamma_of_j,
        ),
        edge(
            K,
            Mu,
            "2πα/log(1/(6t)) for t ≤ 1/12, 324πt² for t > 1/12; α = (9/8)log 2",
            &[Plane],
            Global,
            "planar μ_G ≤ h₂(3k_G) with the explicit piecewise h₂",
            true,
            |_, t| {
                let (a, b) = k_to_mu_h2_branches(t);
                Ok(if t <= 1.0 / 12.0 { a } else { b })
            },
        ),
        edge(Mu, J, "t/c_n", &[Connected, Cn], Global, "μ_G ≥ c_n·j_G for connected boundary", false, mu_to_j),
        edge(Mu, K, "c·t", &[Uniform, Connected], Global, "uniform domain with connected boundary: k_G ≤ c·μ_G", false, |p, t| {
            Ok(c_of(p.uniform_constant) * t)
        }),
        edge(
            J,
            LambdaInv,
            "1/(c·τ_n(e^{2t}−1))",
            &[Qed],
            Global,
            "c-QED domain: λ_G ≥ c·τ_n(s² + 2s)",
            true,
            j_to_lambda,
        ),
        edge(
            K,
            LambdaInv,
            "1/(c·τ_n(e^{2t}−1))",
            &[Qed],
            Global,
            "ζ_k^{λ^{-1}} = ζ_j^{λ^{-1}} since j_G ≤ k_G",
            true,
            j_to_lambda,
        ),
        edge(
            LambdaInv,
            J,
            "log(1 + τ_n^{-1}(1/(√2·t)))",
            &[],
            Global,
            "λ_G(x,y) ≤ √2·τ_n(|x−y|/min(d(x),d(y)))",
            false,
            lambda_to_j,
        ),
        edge(
            LambdaInv,
            K,
            "log(1/(1 − τ_n^{-1}(1/(√2·t)))), τ_n^{-1}(1/(√2t)) < 1",
            &[],
            Global,
            "λ⁻¹-ball inclusion in B(a, c₃ d(a)) followed by the quasihyperbolic ball inclusion",
            false,
            lambda_to_k,
        ),
        edge(
            Mu,
            LambdaInv,
            "ζ_μ^j ∘ ζ_j^{λ^{-1}} = 1/(c·τ_n(e^{2t/c_n}−1))",
            &[Qed, Connected, Cn],
            Global,
            "composition through j_G",
            true,
            |p, t| j_to_lambda(p, mu_to_j(p, t)?),
        ),
        edge(
            LambdaInv,
            Mu,
            "ζ_{λ^{-1}}^j ∘ ζ_j^μ",
            &[],
            LocalOnly,
            "composition through j_G",
            false,
            |p, t| gamma_of_j(p, lambda_to_j(p, t)?),
        ),
        edge(
            LambdaInv,
            K,
            "ζ_{λ^{-1}}^j ∘ ζ_j^k = c·log(1 + τ_n^{-1}(1/(√2·t)))",
            &[Uniform],
            Global,
            "composition through j_G",
            false,
            |p, t| Ok(c_of(p.uniform_constant) * lambda_to_j(p, t)?),
        ),
        edge(Delta, J, "t", &[], Global, "Seittenranta: j_G ≤ δ_G", false, |_, t| Ok(t)),
        edge(J, Delta, "2t", &[], Global, "Seittenranta: δ_G ≤ 2·j_G", false, |_, t| Ok(2.0 * t)),
        edge(Alpha, J, "t", &[Convex], Global, "Seittenranta: j_G ≤ α_G on convex domains", false, |_, t| Ok(t)),
        edge(
            Mu,
            Delta,
            "log(1 + 1/τ_n^{-1}(t))",
            &[Connected, CardGe2],
            Global,
            "Seittenranta: δ_G bounded by μ_G for connected boundary",
            false,
            |p, t| {
                let s = tau_inv_lo(n_of(p), t)?;
                Ok(if s > 0.0 { (1.0 / s).ln_1p() } else { f64::INFINITY })
            },
        ),
        edge(
            LambdaInv,
            Delta,
            "log(1 + 2·τ_n^{-1}(1/t))",
            &[CardGe2],
            Global,
            "Seittenranta: δ_G bounded by λ_G^{-1}",
            false,
            |p, t| Ok((2.0 * tau_inv_hi(n_of(p), 1.0 / t)?).ln_1p()),
        ),
        edge(
            J,
            Euclid,
            "(e^t−1)·diam",
            &[Bounded],
            Global,
            "Seittenranta: D_j(x,t) ⊂ B(x, (e^t−1)d(x))",
            false,
            |p, t| Ok(t.exp_m1() * diam_of(p)),
        ),
        edge(
            Delta,
            Euclid,
            "(e^t−1)·diam",
            &[Bounded],
            Global,
            "Seittenranta: D_δ(x,t) ⊂ B(x, (e^t−1)d(x))",
            false,
            |p, t| Ok(t.exp_m1() * diam_of(p)),
        ),
        edge(
            K,
            Euclid,
            "t·diam",
            &[Bounded],
            Global,
            "k_G ≥ |x−y|/diam(G) on bounded domains",
            false,
            |p, t| Ok(t * diam_of(p)),
        ),
        edge(
            LambdaInv,
            Euclid,
            "τ_n^{-1}(1/(√2·t))·diam",
            &[Bounded],
            Global,
            "λ⁻¹-ball inclusion D_{λ⁻¹}(a,t) ⊂ B(a, c₃ d(a))",
            false,
            |p, t| Ok(tau_inv_hi(n_of(p), 1.0 / (SQRT_2 * t))? * diam_of(p)),
        ),
    ];
    TransferChart { edges }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub value: f64,
    pub path: Vec<MetricId>,
    pub provenance: Vec<&'static str>,
}

impl TransferChart {
    pub fn edges_between(&self, from: MetricId, to: MetricId) -> Vec<&ZetaEdge> {
        self.edges.iter().filter(|e| e.from == from && e.to == to).collect()
    }

    pub fn export(&self) -> Vec<EdgeRow> {
        self.edges.iter().map(ZetaEdge::row).collect()
    }

    /// All simple paths from `from` to `to` whose edges pass their gates.
    pub fn paths(&self, from: MetricId, to: MetricId, props: &DomainProps) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut visited = [false; 7];
        let mut stack = Vec::new();
        visited[from.index()] = true;
        self.dfs(from, to, props, &mut visited, &mut stack, &mut out);
        out
    }

    fn dfs(
        &self,
        at: MetricId,
        to: MetricId,
        props: &DomainProps,
        visited: &mut [bool; 7],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for (i, e) in self.edges.iter().enumerate() {
            if e.from != at || e.check(props).is_err() {
                continue;
            }
            stack.push(i);
            if e.to == to {
                out.push(stack.clone());
            } else if !visited[e.to.index()] {
                visited[e.to.index()] = true;
                self.dfs(e.to, to, props, visited, stack, out);
                visited[e.to.index()] = false;
            }
            stack.pop();
        }
    }

    /// Composes `path` (diagrammatic order) at `t`; None if a window is left.
    pub fn compose(&self, path: &[usize], props: &DomainProps, t: f64) -> Option<f64> {
        let mut v = t;
        for &i in path {
            v = eval_edge(&self.edges[i], props, v).ok()?;
            if v.is_nan() {
                return None;
            }
        }
        Some(v)
    }

    /// Pointwise-minimal transfer from `from` to `to` at `t`, or None when no path applies.
    pub fn query(&self, from: MetricId, to: MetricId, props: &DomainProps, t: f64) -> Option<QueryResult> {
        if from == to {
            return Some(QueryResult { value: t, path: vec![from], provenance: vec!["identity"] });
        }
        let mut best: Option<QueryResult> = None;
        for p in self.paths(from, to, props) {
            let Some(v) = self.compose(&p, props, t) else { continue };
            if best.as_ref().is_none_or(|b| v < b.value) {
                let mut nodes = vec![from];
                nodes.extend(p.iter().map(|&i| self.edges[i].to));
                best = Some(QueryResult {
                    value: v,
                    path: nodes,
                    provenance: p.iter().map(|&i| self.edges[i].provenance).collect(),
                });
            }
        }
        best
    }
}

pub fn union_validity_radius(c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("union radius needs 0 < c <= 1, got {c}")));
    }
    Ok((c / 4.0).ln_1p())
}

pub struct UnionModulus<'a> {
    omega1: &'a dyn Fn(f64) -> f64,
    omega2: &'a dyn Fn(f64) -> f64,
    pub c: f64,
    pub radius: f64,
}

impl UnionModulus<'_> {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t > self.radius {
            return Err(Error::Range(format!("union modulus valid on [0, {}], got {t}", self.radius)));
        }
        let s = 4.0 * t / self.c;
        Ok((self.omega1)(s).max((self.omega2)(s)))
    }
}

/// Modulus of continuity on G₁ ∪ G₂ from moduli on each piece.
pub fn union_modulus<'a>(
    omega1: &'a dyn Fn(f64) -> f64,
    omega2: &'a dyn Fn(f64) -> f64,
    c: f64,
) -> Result<UnionModulus<'a>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("union_modulus needs 0 < c < 1, got {c}")));
    }
    Ok(UnionModulus { omega1, omega2, c, radius: union_validity_radius(c)? })
}

fn relax(p: &DomainProps, r: Req) -> DomainProps {
    let mut p = *p;
    match r {
        Req::Uniform => p.uniform_constant = None,
        Req::Qed => p.qed_constant = None,
        Req::Cn => p.cn = None,
        Req::Connected => p.boundary_connected = false,
        Req::Nondegenerate => p.boundary_nondegenerate = false,
        Req::CardGe2 => p.boundary_card_ge_2 = false,
        Req::Convex => p.convex = false,
        Req::Bounded => p.bounded_with_diam = None,
        Req::Local => p.local = false,
        Req::Plane => p.dimension = 3,
    }
    p
}

/// Edges that evaluate although one of their preconditions was removed.
pub fn gating_violations(chart: &TransferChart) -> Vec<String> {
    let full = DomainProps::permissive(2, 0.5);
    let mut out = Vec::new();
    for e in &chart.edges {
        if let Err(err) = eval_edge(e, &full, 0.01) {
            out.push(format!("{e:?} fails with every flag set: {err}"));
        }
        for &r in &e.preconds {
            if eval_edge(e, &relax(&full, r), 0.01) != Err(Error::Gated(r.name())) {
                out.push(format!("{e:?} not gated by {}", r.name()));
            }
        }
        if e.validity == Validity::LocalOnly {
            let p = DomainProps { local: false, ..full };
            if eval_edge(e, &p, 0.01) != Err(Error::Gated("local")) {
                out.push(format!("{e:?} not gated by local"));
            }
        }
    }
    out
}

/// Monotonicity on a log grid `t ∈ [1e−8, 1e1]` inside each window, and
/// `ζ(t₀) < 1e−3` for global edges without slow decay (`t₀ = 1e−6` in the
/// plane, `1e−12` in higher dimensions).
pub fn monotonicity_violations(chart: &TransferChart) -> Vec<String> {
    let mut out = Vec::new();
    for n in [2, 3] {
        let p = DomainProps::permissive(n, 0.5);
        for e in &chart.edges {
            if e.check(&p).is_err() {
                continue;
            }
            let mut prev = 0.0;
            for i in 0..=120 {
                let t = 10f64.powf(-8.0 + i as f64 * 0.075);
                match eval_edge(e, &p, t) {
                    Ok(v) => {
                        if v < prev * (1.0 - 1e-12) {
                            out.push(format!("{e:?} n={n}: decreases at t={t}"));
                        }
                        prev = v;
                    }
                    Err(Error::Range(_)) => break,
                    Err(other) => {
                        out.push(format!("{e:?} n={n}: {other}"));
                        break;
                    }
                }
            }
            if e.validity == Validity::Global && !e.slow_decay && e.to != MetricId::Euclid {
                let t0 = if n == 2 { 1e-6 } else { 1e-12 };
                match eval_edge(e, &p, t0) {
                    Ok(v) if v < 1e-3 => {}
                    other => out.push(format!("{e:?} n={n}: ζ({t0}) = {other:?}")),
                }
            }
        }
    }
    out
}

/// Minimum relative slack of `query ≤ composed edge` over the composite cells.
pub fn composition_slack(chart: &TransferChart) -> (f64, String) {
    let p = DomainProps::permissive(2, 0.5);
    let mut worst = (f64::INFINITY, String::new());
    let mut note = |label: &str, t: f64, q: Option<QueryResult>, bound: Option<f64>| {
        let slack = match (q, bound) {
            (Some(q), Some(b)) => (b - q.value) / b.abs().max(1e-300),
            (None, Some(_)) => f64::NEG_INFINITY,
            (_, None) => return,
        };
        if slack < worst.0 {
            worst = (slack, format!("{label} t={t}"));
        }
    };
    for &t in &[1e-3, 0.01, 0.05, 0.1, 0.2] {
        let j = mu_to_j(&p, t).ok();
        note("mu->lambda_inv", t, chart.query(MetricId::Mu, MetricId::LambdaInv, &p, t), j.and_then(|j| j_to_lambda(&p, j).ok()));
        note("k->lambda_inv", t, chart.query(MetricId::K, MetricId::LambdaInv, &p, t), j_to_lambda(&p, t).ok());
        let lj = lambda_to_j(&p, t).ok();
        note(
            "lambda_inv->k",
            t,
            chart.query(MetricId::LambdaInv, MetricId::K, &p, t),
            lj.map(|v| c_of(p.uniform_constant) * v),
        );
        note("lambda_inv->mu", t, chart.query(MetricId::LambdaInv, MetricId::Mu, &p, t), lj.and_then(|v| gamma_of_j(&p, v).ok()));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{tau2, tau2_inv};

    fn all2() -> DomainProps {
        DomainProps::permissive(2, 0.5)
    }

    fn single(chart: &TransferChart, from: MetricId, to: MetricId) -> &ZetaEdge {
        chart.edges_between(from, to)[0]
    }

    #[test]
    fn chart_shape() {
        let c = builtin_chart();
        assert!(c.edges.len() >= 20);
        assert!(c.edges_between(MetricId::Euclid, MetricId::J).is_empty());
        assert!(c.edges_between(MetricId::Euclid, MetricId::K).is_empty());
        let mut seen = std::collections::HashSet::new();
        for e in &c.edges {
            assert!(seen.insert((e.from, e.to, e.provenance)), "duplicate {e:?}");
            assert!(!e.provenance.is_empty());
        }
    }

    #[test]
    fn edge_examples() {
        let c = builtin_chart();
        let p = DomainProps::new(2);
        assert_eq!(eval_edge(single(&c, MetricId::K, MetricId::J), &p, 0.7).unwrap(), 0.7);
        assert_eq!(eval_edge(single(&c, MetricId::J, MetricId::Delta), &p, 0.7).unwrap(), 1.4);
        let q = DomainProps { qed_constant: Some(1.0), ..p };
        let v = eval_edge(single(&c, MetricId::J, MetricId::LambdaInv), &q, 2f64.sqrt().ln()).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        let m = DomainProps { boundary_connected: true, boundary_card_ge_2: true, ..p };
        let v = eval_edge(single(&c, MetricId::Mu, MetricId::Delta), &m, 2.0).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-11);
        assert!(c.query(MetricId::Euclid, MetricId::J, &all2(), 0.1).is_none());
    }

    #[test]
    fn h2_branches_meet() {
        let (a, b) = k_to_mu_h2_branches(1.0 / 12.0);
        assert!((a - b).abs() < 1e-12 * a, "gap {}", (a - b).abs());
        let (a2, _) = k_to_mu_h2_branches(0.01);
        let want = 2.0 * PI * (9.0 / 8.0) * LN_2 / (1.0f64 / 0.06).ln();
        assert!((a2 - want).abs() < 1e-14);
        assert!((crate::metrics::h2_plane(3.0 * 0.01) - a2).abs() < 1e-14);
    }

    #[test]
    fn lambda_to_k_window() {
        let c = builtin_chart();
        let e = c.edges.iter().find(|e| e.from == MetricId::LambdaInv && e.to == MetricId::K && e.preconds.is_empty()).unwrap();
        let p = DomainProps::new(2);
        let edge_t = 1.0 / (SQRT_2 * tau2(1.0).unwrap());
        assert!(matches!(eval_edge(e, &p, edge_t * 1.001), Err(Error::Range(_))));
        let t = 0.2;
        let want = (1.0 / (1.0 - tau2_inv(1.0 / (SQRT_2 * t)).unwrap())).ln();
        assert!((eval_edge(e, &p, t).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn gating_every_edge() {
        let v = gating_violations(&builtin_chart());
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn monotone_and_vanishing() {
        let v = monotonicity_violations(&builtin_chart());
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn composition_cells() {
        let (slack, at) = composition_slack(&builtin_chart());
        assert!(slack >= -1e-12, "{slack} at {at}");
    }

    #[test]
    fn query_examples() {
        let c = builtin_chart();
        let p = DomainProps { boundary_connected: true, boundary_nondegenerate: true, ..DomainProps::new(3) };
        let q = c.query(MetricId::K, MetricId::Mu, &p, 0.3).unwrap();
        assert_eq!(q.path, vec![MetricId::K, MetricId::Mu]);
        assert_eq!(q.value, gamma_of_j(&p, 0.3).unwrap());
        let q = c.query(MetricId::J, MetricId::J, &p, 0.4).unwrap();
        assert_eq!(q.value, 0.4);
        // only μ → j → λ⁻¹ exists here
        let p = DomainProps { qed_constant: Some(0.8), cn: Some(0.3), boundary_connected: true, ..DomainProps::new(2) };
        let q = c.query(MetricId::Mu, MetricId::LambdaInv, &p, 0.1).unwrap();
        assert!((q.value - j_to_lambda(&p, 0.1 / 0.3).unwrap()).abs() < 1e-14);
        assert!(c.query(MetricId::Mu, MetricId::LambdaInv, &DomainProps::new(2), 0.1).is_none());
    }

    #[test]
    fn union_examples() {
        let id = |t: f64| t;
        let u = union_modulus(&id, &id, 0.5).unwrap();
        assert!((u.radius - (9.0f64 / 8.0).ln()).abs() < 1e-15);
        assert!((u.eval(0.1).unwrap() - 0.8).abs() < 1e-15);
        assert!(u.eval(0.2).is_err());
        assert_eq!(u.eval(0.0).unwrap(), 0.0);
        assert!((union_validity_radius(1.0).unwrap() - 1.25f64.ln()).abs() < 1e-15);
        assert!(union_modulus(&id, &id, 1.0).is_err());
        assert!(union_modulus(&id, &id, 0.0).is_err());
    }
}
