use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use regex::Regex;
use serde_json::json;

use qcgeom::balls::{
    antipodal_threshold, circumscribed_lambda_angle, circumscribed_lambda_radius, heikkala_cubic_root, heikkala_r1,
    lambda_ball_constants, mu_ball_constants, punctured_disk_moduli, quartic, quasiball_margins, quasiball_radii,
};
use qcgeom::chart::{builtin_chart, DomainProps, MetricId};
use qcgeom::distortion::{
    evaluate, lens_diam_bound_linear, lens_diam_bound_sqrt, lens_diam_brute, lens_linear_window, mn_fixed_point,
    mn_gap, stabrmk_checks, two_point_growth_bounds, DistortParams, Quantity,
};
use qcgeom::harmonic::{
    alpha_f_disk, boundary_modulus_with, check_subharmonic, closed_modulus_with, laplacian_abs_f_p,
    qr_constant_estimate, subharmonic_exponent, DiskGrid, HarmonicPlanarMap,
};
use qcgeom::metrics::{
    apollonian, chordal, hyperbolic_ball, j_metric, lambda_bounds, mu_bounds, quasihyperbolic,
    quasihyperbolic_exact, seittenranta, DomainSpec, ExactKind, ExtendedPoint, MuConfig,
};
use qcgeom::special;
use qcgeom::verify::{run_checks, VerifyConfig};
use qcgeom::Exec;

/// `println!` that exits quietly when the reader hangs up and with code 3 on other write errors.
macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

#[derive(Parser)]
#[command(name = "qcgeom", version, about = "Conformal invariants, hyperbolic-type metrics and distortion bounds")]
struct Cli {
    /// Seed for randomized computations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Dimension constant c_n (μ_G ≥ c_n j_G)
    #[arg(long, global = true)]
    cn: Option<f64>,
    /// Uniformity constant c (k_G ≤ c j_G)
    #[arg(long = "uniform-c", global = true)]
    uniform_c: Option<f64>,
    /// QED constant of the domain complement
    #[arg(long = "qed-c", global = true)]
    qed_c: Option<f64>,
    /// Run everything on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a special function: agm, ell_k, mu, mu_inv, phi_k, gamma2, tau2, gamma2_inv, tau2_inv,
    /// omega_sphere, lambda_n, tau_n, gamma_n, tau_n_inv, gamma_n_inv, eta, phi_kn_lower, p_circle, b
    Sf {
        name: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
    /// Evaluate a metric between two points of a named domain
    Metric(MetricArgs),
    /// Transfer chart
    Chart {
        #[command(subcommand)]
        op: ChartOp,
    },
    /// Ball inclusions and related moduli
    Ball {
        #[command(subcommand)]
        op: BallOp,
    },
    /// Distortion bounds for quasiconformal maps
    Distort {
        #[command(subcommand)]
        op: DistortOp,
    },
    /// Harmonic quasiregular maps of the disk
    Harmonic {
        #[command(subcommand)]
        op: HarmonicOp,
    },
    /// Run the registered inequality and identity checks
    Verify {
        /// Only checks whose id matches
        #[arg(long)]
        filter: Option<String>,
        /// Write the report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate an operation over a parameter range as CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct MetricArgs {
    /// ball, half_space, punctured_space, punctured_ball, plane_minus_0_1, segment_complement
    #[arg(long)]
    domain: String,
    /// j, k, delta, alpha, rho, chordal, mu, lambda
    #[arg(long)]
    metric: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    y: Vec<f64>,
    /// Boundary samples for sampled domains
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Tolerance of the numeric quasihyperbolic distance
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Subcommand)]
enum ChartOp {
    /// Best composed transfer ζ from one metric to another at t
    Query(QueryArgs),
    /// List every edge with formula, preconditions and citation
    Export {
        /// Write CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// k(n, n+1) = log((n+1)/n) in R²∖{0} and the image of a 4π gap
    Ferrand {
        #[arg(long, default_value_t = 10)]
        count: u32,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long)]
    connected: bool,
    #[arg(long)]
    nondegenerate: bool,
    /// Boundary has at least two points
    #[arg(long)]
    card_ge_2: bool,
    #[arg(long)]
    convex: bool,
    #[arg(long)]
    diam: Option<f64>,
    /// Point pairs satisfy y ∈ B(x, d(x))
    #[arg(long)]
    local: bool,
}

#[derive(Subcommand)]
enum BallOp {
    /// k-ball radii in R²∖{0} with boundary-margin samples
    Quasiball {
        #[arg(long = "M")]
        m: f64,
        #[arg(long, default_value_t = 720)]
        samples: usize,
    },
    Lambda {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long)]
        t: f64,
    },
    Mu {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long)]
        t: f64,
    },
    /// Circumscribed radius of the λ-ball about 1 in R²∖{0}
    Circumscribed {
        #[arg(long = "T")]
        t: f64,
    },
    /// Moduli of the punctured-disk curve families
    Punctured {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
    },
    /// Root of r⁴ − 8r³ − 2r² − 8r + 1 in (0, 1)
    Quartic,
    /// r₁(δ), or the root of r³ + r² − 1 without --delta
    Heikkala {
        #[arg(long)]
        delta: Option<f64>,
    },
}

#[derive(Subcommand)]
enum DistortOp {
    /// Evaluate a named bound; `distort quantities` lists the names
    Bound {
        quantity: String,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.5,0.5")]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
    },
    /// List bound names
    Quantities,
    /// Fixed point and gap of the linear displacement lemma
    Mn {
        #[arg(long, default_value_t = 3.0)]
        m: f64,
        #[arg(long = "N", default_value_t = 2.0)]
        big_n: f64,
        #[arg(long = "K")]
        k: Option<f64>,
    },
    /// Lens diameter: brute force and both bounds
    Lens {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    /// Growth envelope for |f(x)| near the origin
    Growth {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        absx: f64,
    },
    /// Slack report of the linear displacement constants
    Stab {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long = "K")]
        k: f64,
    },
}

#[derive(Args, Clone)]
struct MapArgs {
    /// linear (z + k z̄), counterexample, or poly (with --g/--h)
    #[arg(long, default_value = "linear")]
    map: String,
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    #[arg(long, default_value_t = 2048)]
    modes: usize,
    /// Coefficients of g as re,im pairs
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    g: Vec<f64>,
    /// Coefficients of h as re,im pairs
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    h: Vec<f64>,
}

#[derive(Subcommand)]
enum HarmonicOp {
    /// q = 4k/(1+k)²
    Exponent {
        #[arg(long)]
        k: f64,
    },
    /// Δ|f|^p at z
    Laplacian {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Grid scan of Δ|f|^p over a disk
    Subharmonic {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0.999)]
        radius: f64,
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Boundary and closed-disk moduli of continuity at δ
    Moduli {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        delta: f64,
        /// log₂ of the number of boundary samples
        #[arg(long, default_value_t = 16)]
        log2_samples: u32,
    },
    /// max |h′|/|g′| over a disk
    Qr {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0.99)]
        rmax: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// α_f at z
    Alpha {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        quad: usize,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Operation; `sweep list` prints the available ones
    op: String,
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output path; `-` for stdout
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fixed parameters, name=value
    #[arg(long = "set", value_parser = parse_kv)]
    set: Vec<(String, f64)>,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    Ok((k.to_string(), v.parse().map_err(|e| format!("{v}: {e}"))?))
}

enum Fail {
    Usage(String),
    Io(String),
}

impl From<qcgeom::Error> for Fail {
    fn from(e: qcgeom::Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Out<T> = Result<T, Fail>;

fn usage<T>(msg: impl Into<String>) -> Out<T> {
    Err(Fail::Usage(msg.into()))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Fail {
    Fail::Io(format!("{}: {e}", path.display()))
}

/// 17 significant digits.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn emit(args: std::fmt::Arguments) {
    if let Err(e) = writeln!(std::io::stdout().lock(), "{args}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("I/O error: stdout: {e}");
        std::process::exit(3);
    }
}

fn print_json(v: &impl serde::Serialize) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(Fail::Io(m)) => {
            eprintln!("I/O error: {m}");
            ExitCode::from(3)
        }
    }
}

fn exec(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn run(cli: &Cli) -> Out<u8> {
    match &cli.cmd {
        Cmd::Sf { name, args } => sf(name, args).map(|v| {
            out!("{v}");
            0
        }),
        Cmd::Metric(a) => metric(cli, a),
        Cmd::Chart { op } => chart(cli, op),
        Cmd::Ball { op } => ball(cli, op),
        Cmd::Distort { op } => distort(cli, op),
        Cmd::Harmonic { op } => harmonic(cli, op),
        Cmd::Verify { filter, json } => verify(cli, filter.as_deref(), json.as_deref()),
        Cmd::Sweep(a) => sweep(a),
    }
}

fn nargs(name: &str, args: &[f64], n: usize) -> Out<()> {
    if args.len() != n {
        return usage(format!("sf {name} takes {n} argument(s), got {}", args.len()));
    }
    Ok(())
}

fn dim(v: f64) -> Out<u32> {
    if v.fract() != 0.0 || v < 1.0 {
        return usage(format!("dimension must be a positive integer, got {v}"));
    }
    Ok(v as u32)
}

fn sf(name: &str, a: &[f64]) -> Out<String> {
    let iv = |i: special::Interval| format!("{} {}", num(i.lo), num(i.hi));
    let arity = match name {
        "b" => 0,
        "ell_k" | "mu" | "mu_inv" | "gamma2" | "tau2" | "gamma2_inv" | "tau2_inv" | "omega_sphere" | "lambda_n"
        | "p_circle" => 1,
        "agm" | "phi_k" | "tau_n" | "gamma_n" | "tau_n_inv" | "gamma_n_inv" => 2,
        "eta" | "phi_kn_lower" => 3,
        _ => return usage(format!("unknown special function '{name}'")),
    };
    nargs(name, a, arity)?;
    Ok(match name {
        "b" => num(special::b_constant()),
        "agm" => num(special::agm(a[0], a[1])?),
        "ell_k" => num(special::ell_k(a[0])?),
        "mu" => num(special::mu(a[0])?),
        "mu_inv" => num(special::mu_inv(a[0])?),
        "phi_k" => num(special::phi_k(a[0], a[1])?),
        "gamma2" => num(special::gamma2(a[0])?),
        "tau2" => num(special::tau2(a[0])?),
        "gamma2_inv" => num(special::gamma2_inv(a[0])?),
        "tau2_inv" => num(special::tau2_inv(a[0])?),
        "omega_sphere" => num(special::omega_sphere(dim(a[0])?)?),
        "lambda_n" => iv(special::lambda_n_interval(dim(a[0])?)?),
        "p_circle" => num(special::teichmuller_p_circle(a[0])?),
        "tau_n" => iv(special::tau_n_bounds(dim(a[0])?, a[1])?),
        "gamma_n" => iv(special::gamma_n_bounds(dim(a[0])?, a[1])?),
        "tau_n_inv" => iv(special::tau_n_inv_bounds(dim(a[0])?, a[1])?),
        "gamma_n_inv" => iv(special::gamma_n_inv_bounds(dim(a[0])?, a[1])?),
        "eta" => iv(special::eta_k_n(dim(a[0])?, a[1], a[2])?),
        "phi_kn_lower" => num(special::phi_kn_lower(dim(a[0])?, a[1], a[2])?),
        _ => unreachable!(),
    })
}

fn metric(cli: &Cli, a: &MetricArgs) -> Out<u8> {
    if a.x.is_empty() || a.x.len() != a.y.len() {
        return usage("--x and --y need the same nonzero number of coordinates");
    }
    let n = a.x.len() as u32;
    let (x, y) = (a.x.as_slice(), a.y.as_slice());
    let d = DomainSpec::by_name(&a.domain, n, a.samples)?;
    let out = match a.metric.as_str() {
        "j" => json!({ "value": j_metric(&d, x, y)? }),
        "k" => serde_json::to_value(quasihyperbolic(&d, x, y, a.tol)?).expect("serializable"),
        "delta" => serde_json::to_value(seittenranta(&d, x, y)?).expect("serializable"),
        "alpha" => serde_json::to_value(apollonian(&d, x, y)?).expect("serializable"),
        "rho" => {
            if a.domain != "ball" {
                return usage("rho is the hyperbolic metric of the unit ball; use --domain ball");
            }
            json!({ "value": hyperbolic_ball(x, y)? })
        }
        "chordal" => json!({ "value": chordal(&ExtendedPoint::finite(x), &ExtendedPoint::finite(y)) }),
        "mu" => {
            let cfg = MuConfig { cn: cli.cn, numeric_k_tol: Some(a.tol) };
            serde_json::to_value(mu_bounds(&d, x, y, &cfg)?).expect("serializable")
        }
        "lambda" => serde_json::to_value(lambda_bounds(&d, x, y, cli.cn)?).expect("serializable"),
        other => return usage(format!("unknown metric '{other}'")),
    };
    print_json(&json!({ "domain": a.domain, "metric": a.metric, "result": out }));
    Ok(0)
}

fn chart(cli: &Cli, op: &ChartOp) -> Out<u8> {
    let chart = builtin_chart();
    match op {
        ChartOp::Query(q) => {
            let props = DomainProps {
                uniform_constant: cli.uniform_c,
                qed_constant: cli.qed_c,
                cn: cli.cn,
                boundary_connected: q.connected,
                boundary_nondegenerate: q.nondegenerate,
                boundary_card_ge_2: q.card_ge_2,
                convex: q.convex,
                bounded_with_diam: q.diam,
                local: q.local,
                ..DomainProps::new(q.n)
            };
            let (from, to) = (MetricId::parse(&q.from)?, MetricId::parse(&q.to)?);
            match chart.query(from, to, &props, q.t) {
                Some(r) => print_json(&r),
                None => return usage(format!("no admissible path {from}→{to} at t={} under the given flags", q.t)),
            }
        }
        ChartOp::Export { csv } => {
            let rows: Vec<Vec<String>> = chart
                .export()
                .into_iter()
                .map(|r| {
                    vec![
                        r.from.to_string(),
                        r.to.to_string(),
                        r.formula.to_string(),
                        r.preconditions.join(";"),
                        match serde_json::to_value(r.validity).expect("serializable") {
                            serde_json::Value::String(v) => v,
                            v => v.to_string(),
                        },
                        r.provenance.to_string(),
                    ]
                })
                .collect();
            let header = ["from", "to", "formula", "preconditions", "validity", "citation"];
            write_csv(csv.as_deref(), &header, &rows)?;
        }
        ChartOp::Ferrand { count } => {
            let mut rows = Vec::new();
            for i in 1..=*count {
                let n = i as f64;
                let k = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[n, 0.0], &[n + 1.0, 0.0])?;
                rows.push(json!({ "n": i, "k": k, "log_ratio": ((n + 1.0) / n).ln() }));
            }
            let a = (4.0 * std::f64::consts::PI).exp();
            let gap = quasihyperbolic_exact(ExactKind::PuncturedSpace, &[a, 0.0], &[a * a, 0.0])?;
            print_json(&json!({ "pairs": rows, "image_gap": gap, "four_pi": 4.0 * std::f64::consts::PI }));
        }
    }
    Ok(0)
}

fn ball(cli: &Cli, op: &BallOp) -> Out<u8> {
    match op {
        BallOp::Quasiball { m, samples } => {
            let radii = quasiball_radii(*m)?;
            let margins = quasiball_margins(exec(cli), *m, *samples)?;
            print_json(&json!({ "radii": radii, "margins": margins }));
        }
        BallOp::Lambda { n, t } => print_json(&lambda_ball_constants(*n, *t)?),
        BallOp::Mu { n, t } => print_json(&mu_ball_constants(*n, *t)?),
        BallOp::Circumscribed { t } => {
            print_json(&json!({
                "T": t,
                "theta": circumscribed_lambda_angle(*t)?,
                "radius": circumscribed_lambda_radius(*t)?,
            }));
        }
        BallOp::Punctured { r, s } => print_json(&punctured_disk_moduli(*r, *s)?),
        BallOp::Quartic => {
            let r = antipodal_threshold();
            print_json(&json!({ "root": r, "quartic_at_0.12": quartic(0.12) }));
        }
        BallOp::Heikkala { delta } => match delta {
            Some(d) => print_json(&json!({ "delta": d, "r1": heikkala_r1(*d)? })),
            None => print_json(&json!({ "cubic_root": heikkala_cubic_root() })),
        },
    }
    Ok(0)
}

fn point2(v: &[f64], flag: &str) -> Out<[f64; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => usage(format!("--{flag} takes two comma-separated coordinates")),
    }
}

fn distort(cli: &Cli, op: &DistortOp) -> Out<u8> {
    match op {
        DistortOp::Bound { quantity, n, k, x, j } => {
            let q = Quantity::parse(quantity)?;
            print_json(&evaluate(q, *n, *k, &DistortParams { x: point2(x, "x")?, j: *j })?);
        }
        DistortOp::Quantities => {
            for q in Quantity::ALL {
                out!("{q}");
            }
        }
        DistortOp::Mn { m, big_n, k } => {
            let fp = mn_fixed_point(*m, *big_n)?;
            let gap = k.map(|k| mn_gap(*m, *big_n, k));
            print_json(&json!({ "fixed_point": fp, "gap": gap }));
        }
        DistortOp::Lens { x, eps, samples } => {
            let x = point2(x, "x")?;
            let brute = lens_diam_brute(x, *eps, *samples, cli.seed)?;
            let sqrt = lens_diam_bound_sqrt(x, *eps)?;
            let linear = lens_diam_bound_linear(x, *eps, x[1].atan2(x[0])).ok();
            print_json(&json!({
                "brute": brute,
                "bound_sqrt": sqrt,
                "bound_linear": linear,
                "linear_window": lens_linear_window(x),
            }));
        }
        DistortOp::Growth { n, k, absx } => print_json(&two_point_growth_bounds(*n, *k, *absx)?),
        DistortOp::Stab { n, k } => print_json(&stabrmk_checks(exec(cli), *n, *k)?),
    }
    Ok(0)
}

fn pairs(v: &[f64], flag: &str) -> Out<Vec<Complex64>> {
    if !v.len().is_multiple_of(2) {
        return usage(format!("--{flag} takes re,im pairs"));
    }
    Ok(v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn build_map(a: &MapArgs) -> Out<HarmonicPlanarMap> {
    Ok(match a.map.as_str() {
        "linear" => HarmonicPlanarMap::linear(a.k),
        "counterexample" => HarmonicPlanarMap::counterexample(a.modes),
        "poly" => HarmonicPlanarMap::new(pairs(&a.g, "g")?, pairs(&a.h, "h")?),
        other => return usage(format!("unknown map '{other}'")),
    })
}

fn harmonic(cli: &Cli, op: &HarmonicOp) -> Out<u8> {
    match op {
        HarmonicOp::Exponent { k } => out!("{}", num(subharmonic_exponent(*k)?)),
        HarmonicOp::Laplacian { map, p, z } => {
            let z = point2(z, "z")?;
            out!("{}", num(laplacian_abs_f_p(&build_map(map)?, Complex64::new(z[0], z[1]), *p)?));
        }
        HarmonicOp::Subharmonic { map, p, radius, grid } => {
            let p = match p {
                Some(p) => *p,
                None => subharmonic_exponent(map.k)?,
            };
            let s = check_subharmonic(exec(cli), &build_map(map)?, p, *radius, *grid, 1e-9)?;
            print_json(&json!({ "p": p, "scan": s }));
        }
        HarmonicOp::Moduli { map, delta, log2_samples } => {
            if !(3..=24).contains(log2_samples) {
                return usage("--log2-samples must lie in 3..=24");
            }
            let f = build_map(map)?;
            let phi = f.boundary_samples(1 << log2_samples)?;
            let w = boundary_modulus_with(exec(cli), &phi, *delta)?;
            let wt = closed_modulus_with(exec(cli), &f, *delta, &DiskGrid::default())?;
            print_json(&json!({ "delta": delta, "omega": w, "omega_closed": wt, "ratio": wt / w }));
        }
        HarmonicOp::Qr { map, rmax, n } => out!("{}", num(qr_constant_estimate(&build_map(map)?, *rmax, *n))),
        HarmonicOp::Alpha { map, z, quad } => {
            let z = point2(z, "z")?;
            out!("{}", num(alpha_f_disk(&build_map(map)?, Complex64::new(z[0], z[1]), *quad)?));
        }
    }
    Ok(0)
}

fn verify(cli: &Cli, filter: Option<&str>, json_path: Option<&Path>) -> Out<u8> {
    let re = match filter {
        Some(f) => Some(Regex::new(f).map_err(|e| Fail::Usage(format!("bad --filter: {e}")))?),
        None => None,
    };
    let cfg = VerifyConfig { cn: cli.cn, uniform_c: cli.uniform_c, qed_c: cli.qed_c, seed: cli.seed };
    let report = run_checks(exec(cli), re.as_ref(), &cfg);
    if report.entries.is_empty() {
        return usage(format!("no check matches '{}'", filter.unwrap_or_default()));
    }
    for e in &report.entries {
        let tag = if e.passed {
            "PASS"
        } else if e.skipped() {
            "SKIP"
        } else {
            "FAIL"
        };
        let slack = e.min_slack.map(num).unwrap_or_else(|| "-".into());
        out!("[{tag}] {:<36} slack {slack}  {}", e.check_id, e.argmin.as_deref().unwrap_or(&e.status));
    }
    let s = &report.summary;
    out!("{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
    if let Some(p) = json_path {
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        std::fs::write(p, text + "\n").map_err(|e| io_err(p, e))?;
    }
    Ok(if s.failed > 0 { 1 } else { 0 })
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Out<()> {
    let sink: Box<dyn Write> = match path {
        None => Box::new(std::io::stdout()),
        Some(p) if p == Path::new("-") => Box::new(std::io::stdout()),
        Some(p) => Box::new(File::create(p).map_err(|e| io_err(p, e))?),
    };
    let shown = path.unwrap_or(Path::new("-"));
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header).map_err(|e| io_err(shown, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(shown, e))?;
    }
    w.flush().map_err(|e| io_err(shown, e))
}

type SweepFn = fn(&BTreeMap<String, f64>) -> qcgeom::Result<Vec<f64>>;

struct SweepOp {
    name: &'static str,
    params: &'static [(&'static str, f64)],
    outputs: &'static [&'static str],
    eval: SweepFn,
}

fn iv2(i: special::Interval) -> Vec<f64> {
    vec![i.lo, i.hi]
}

fn p(m: &BTreeMap<String, f64>, k: &str) -> f64 {
    m[k]
}

fn pn(m: &BTreeMap<String, f64>) -> u32 {
    p(m, "n").round().max(1.0) as u32
}

fn distort_sweep(q: Quantity, m: &BTreeMap<String, f64>) -> qcgeom::Result<Vec<f64>> {
    let params = DistortParams { x: [p(m, "x0"), p(m, "x1")], j: p(m, "j") };
    Ok(vec![evaluate(q, pn(m), p(m, "k"), &params)?.value.upper()])
}

const DISTORT_PARAMS: &[(&str, f64)] = &[("n", 2.0), ("k", 1.5), ("x0", 0.5), ("x1", 0.5), ("j", 1.0)];

fn sweep_ops() -> Vec<SweepOp> {
    let mut ops = vec![
        SweepOp { name: "mu", params: &[("r", 0.5)], outputs: &["mu"], eval: |m| Ok(vec![special::mu(p(m, "r"))?]) },
        SweepOp { name: "mu_inv", params: &[("y", 1.0)], outputs: &["r"], eval: |m| Ok(vec![special::mu_inv(p(m, "y"))?]) },
        SweepOp {
            name: "phi_k",
            params: &[("k", 2.0), ("r", 0.5)],
            outputs: &["phi"],
            eval: |m| Ok(vec![special::phi_k(p(m, "k"), p(m, "r"))?]),
        },
        SweepOp { name: "gamma2", params: &[("s", 2.0)], outputs: &["gamma2"], eval: |m| Ok(vec![special::gamma2(p(m, "s"))?]) },
        SweepOp { name: "tau2", params: &[("t", 1.0)], outputs: &["tau2"], eval: |m| Ok(vec![special::tau2(p(m, "t"))?]) },
        SweepOp {
            name: "tau_n",
            params: &[("n", 3.0), ("t", 1.0)],
            outputs: &["lo", "hi"],
            eval: |m| Ok(iv2(special::tau_n_bounds(pn(m), p(m, "t"))?)),
        },
        SweepOp {
            name: "eta",
            params: &[("n", 2.0), ("k", 2.0), ("t", 1.0)],
            outputs: &["lo", "hi"],
            eval: |m| Ok(iv2(special::eta_k_n(pn(m), p(m, "k"), p(m, "t"))?)),
        },
        SweepOp {
            name: "circumscribed",
            params: &[("t", 0.25)],
            outputs: &["theta", "radius"],
            eval: |m| Ok(vec![circumscribed_lambda_angle(p(m, "t"))?, circumscribed_lambda_radius(p(m, "t"))?]),
        },
        SweepOp {
            name: "quasiball",
            params: &[("m", 0.5)],
            outputs: &["inner_factor", "outer_factor"],
            eval: |m| {
                let r = quasiball_radii(p(m, "m"))?;
                Ok(vec![r.inner_euclid_radius_factor.unwrap_or(f64::NAN), r.outer_euclid_radius_factor.unwrap_or(f64::NAN)])
            },
        },
        SweepOp {
            name: "mn_gap",
            params: &[("m", 3.0), ("n", 2.0), ("k", 2.0)],
            outputs: &["gap"],
            eval: |m| Ok(vec![mn_gap(p(m, "m"), p(m, "n"), p(m, "k"))]),
        },
        SweepOp {
            name: "growth",
            params: &[("n", 2.0), ("k", 2.0), ("absx", 0.5)],
            outputs: &["lo", "hi"],
            eval: |m| Ok(iv2(two_point_growth_bounds(pn(m), p(m, "k"), p(m, "absx"))?)),
        },
        SweepOp {
            name: "subharmonic_exponent",
            params: &[("k", 0.5)],
            outputs: &["q"],
            eval: |m| Ok(vec![subharmonic_exponent(p(m, "k"))?]),
        },
    ];
    // one op per named distortion bound
    let distort: [(&'static str, SweepFn); 7] = [
        ("rho_displacement", |m| distort_sweep(Quantity::RhoDisplacement, m)),
        ("euclid_displacement", |m| distort_sweep(Quantity::EuclidDisplacement, m)),
        ("origin_displacement", |m| distort_sweep(Quantity::OriginDisplacement, m)),
        ("cylinder_qh_displacement", |m| distort_sweep(Quantity::CylinderQhDisplacement, m)),
        ("growth_envelope", |m| distort_sweep(Quantity::GrowthEnvelope, m)),
        ("lens_diameter", |m| distort_sweep(Quantity::LensDiameter, m)),
        ("j_transfer", |m| distort_sweep(Quantity::JTransfer, m)),
    ];
    for (name, eval) in distort {
        ops.push(SweepOp { name, params: DISTORT_PARAMS, outputs: &["upper"], eval });
    }
    ops
}

fn sweep(a: &SweepArgs) -> Out<u8> {
    let ops = sweep_ops();
    if a.op == "list" {
        for o in &ops {
            let ps: Vec<String> = o.params.iter().map(|(n, d)| format!("{n}={d}")).collect();
            out!("{:<26} params {:<36} outputs {}", o.name, ps.join(" "), o.outputs.join(","));
        }
        return Ok(0);
    }
    let Some(op) = ops.iter().find(|o| o.name == a.op) else {
        return usage(format!("unknown sweep op '{}'; try `sweep list`", a.op));
    };
    let (Some(param), Some(from), Some(to), Some(steps), Some(csv)) = (&a.param, a.from, a.to, a.steps, &a.csv)
    else {
        return usage("sweep needs --param, --from, --to, --steps and --csv");
    };
    let mut vals: BTreeMap<String, f64> = op.params.iter().map(|(n, d)| (n.to_string(), *d)).collect();
    for (k, v) in &a.set {
        if !vals.contains_key(k) {
            return usage(format!("{} has no parameter '{k}'", op.name));
        }
        vals.insert(k.clone(), *v);
    }
    if !vals.contains_key(param) {
        return usage(format!("{} has no parameter '{}'", op.name, param));
    }
    let mut header = vec![param.as_str()];
    header.extend(op.outputs);
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let v = if steps == 1 { from } else { from + (to - from) * i as f64 / (steps - 1) as f64 };
        vals.insert(param.clone(), v);
        let out = (op.eval)(&vals).unwrap_or_else(|e| {
            eprintln!("warning: {}={}: {e}", param, num(v));
            vec![f64::NAN; op.outputs.len()]
        });
        let mut row = vec![num(v)];
        row.extend(out.into_iter().map(num));
        rows.push(row);
    }
    write_csv(Some(csv), &header, &rows)?;
    Ok(0)
}
