use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcgeom::balls::{
    antipodal_threshold, circumscribed_lambda_angle, circumscribed_lambda_radius, heikkala_cubic_root, m_delta0,
    m_delta1, quartic, quasiball_margins,
};
use qcgeom::chart::{builtin_chart, composition_slack, gating_violations, monotonicity_violations};
use qcgeom::distortion::{
    lens_diam_bound_linear, lens_diam_bound_sqrt, lens_diam_brute, lens_linear_window, mn_fixed_point, mn_gap,
};
use qcgeom::harmonic::{
    check_subharmonic, grad_abs_f_sq, laplacian_abs_f_p, laplacian_abs_f_sq, subharmonic_exponent, HarmonicPlanarMap,
};
use qcgeom::metrics::{quasihyperbolic_exact, ExactKind};
use qcgeom::special::{b_constant, eta_k_n, gamma2, mu, phi_k, tau2};
use qcgeom::verify::{counterexample_moduli_ratios, linear_moduli_ratios};
use qcgeom::{Exec, Result};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn max_over(mut it: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    it.try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

fn c1() -> Result<Verdict> {
    let e = max_over((1..=99).map(|i| {
        let r = i as f64 / 100.0;
        Ok((mu(r)? * mu((1.0 - r * r).sqrt())? - FRAC_PI_2 * FRAC_PI_2).abs())
    }))?;
    verdict(e <= 1e-11, format!("max error {e:.3e}"))
}

fn c2() -> Result<Verdict> {
    let mut e = 0.0f64;
    for ki in 11..=50 {
        let k = ki as f64 / 10.0;
        for i in 1..=99 {
            let r = i as f64 / 100.0;
            let rc = (1.0 - r * r).sqrt();
            e = e.max((phi_k(k, r)?.powi(2) + phi_k(1.0 / k, rc)?.powi(2) - 1.0).abs());
        }
    }
    verdict(e <= 1e-9, format!("max error {e:.3e}"))
}

fn c3() -> Result<Verdict> {
    let e = max_over((1..=500).map(|i| {
        let s = 1.0 + 49.0 * i as f64 / 500.0;
        let g = gamma2(s)?;
        Ok(((g - 2.0 * tau2(s * s - 1.0)?) / g).abs())
    }))?;
    let g = (gamma2(2f64.sqrt())? - 4.0).abs();
    let t = (tau2(1.0)? - 2.0).abs();
    verdict(e <= 1e-10 && g <= 1e-12 && t <= 1e-12, format!("max rel error {e:.3e}, |γ₂(√2)−4| {g:.1e}, |τ₂(1)−2| {t:.1e}"))
}

fn c4() -> Result<Verdict> {
    let b = b_constant();
    let mut ok = (b - 4.376879).abs() <= 1e-5;
    for i in 1..=150 {
        let k = 1.0 + i as f64 / 100.0;
        let eta = eta_k_n(2, k, 1.0)?.lo;
        ok &= (PI * (k - 1.0)).exp() < eta && eta < (b * (k - 1.0)).exp();
    }
    verdict(ok, format!("b = {b:.9}"))
}

fn c5() -> Result<Verdict> {
    let mut worst = f64::INFINITY;
    for i in 0..=3200 {
        worst = worst.min(-mn_gap(3.0, 2.0, 1.0 + i as f64 * 0.005));
    }
    let fp = mn_fixed_point(3.0, 2.0)?;
    verdict(
        worst >= -1e-10 && fp.a > 17.0 && fp.residual <= 1e-8,
        format!("min slack {worst:.3e}, fixed point {:.6} (residual {:.1e})", fp.a, fp.residual),
    )
}

fn c6() -> Result<Verdict> {
    let root = antipodal_threshold();
    let mut ok = root > 0.11 && root <= 0.12 && quartic(0.12) <= 0.0;
    for r in [0.12, 0.5, 0.9] {
        ok &= m_delta1(r, r)? >= m_delta0(r)?;
    }
    ok &= m_delta1(0.10, 0.10)? < m_delta0(0.10)?;
    verdict(ok, format!("root {root:.8}, quartic(0.12) = {:.4e}", quartic(0.12)))
}

fn c7() -> Result<Verdict> {
    let r = heikkala_cubic_root();
    verdict(r > 0.75 && r < 0.76, format!("root {r:.10}"))
}

fn c8_identity() -> Result<f64> {
    max_over((1..=9).map(|i| {
        let t = 0.05 * i as f64;
        Ok((qcgeom::special::teichmuller_p_circle(circumscribed_lambda_angle(t)?)? - 1.0 / t).abs())
    }))
}

fn c8() -> Result<Verdict> {
    let e = c8_identity()?;
    let r = circumscribed_lambda_radius(0.499)?;
    verdict(e <= 1e-9 && (r - 2.0).abs() <= 0.01, format!("p identity max error {e:.3e}; R_0.499 = {r:.6}"))
}

fn c9() -> Result<Verdict> {
    let mut worst = f64::INFINITY;
    for m in [0.2, 0.5, 1.0] {
        let q = quasiball_margins(Exec::default(), m, 720)?;
        worst = worst.min(q.inner_slack).min(q.outer_slack);
    }
    verdict(worst >= 0.0, format!("min margin {worst:.3e}"))
}

fn c10() -> Result<Verdict> {
    let one = Complex64::new(1.0, 0.0);
    let mut ok = subharmonic_exponent(1.0 / 3.0)? == 0.75;
    let mut worst = f64::INFINITY;
    for k in [0.2, 1.0 / 3.0, 0.6] {
        let f = HarmonicPlanarMap::linear(k);
        let q = subharmonic_exponent(k)?;
        let below = laplacian_abs_f_p(&f, one, q - 1e-3)?;
        let above = laplacian_abs_f_p(&f, one, q + 1e-3)?;
        ok &= below < 0.0 && above > 0.0;
        worst = worst.min(check_subharmonic(Exec::default(), &f, q, 0.999, 201, 1e-9)?.min_value);
    }
    verdict(ok && worst >= -1e-9, format!("grid min Δ|f|^q {worst:.3e}"))
}

fn c11() -> Result<Verdict> {
    let t = Instant::now();
    let (w, wt) = counterexample_moduli_ratios()?;
    let lin = linear_moduli_ratios(0.5)?;
    let secs = t.elapsed().as_secs_f64();
    let wmax = w.iter().cloned().fold(0.0, f64::max);
    let growth = wt[2] / wt[0];
    let (lo, hi) = lin.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    let var = (hi - lo) / lo;
    verdict(
        wmax <= 1.8 && growth >= 2.0 && var < 0.1 && secs <= 60.0,
        format!("max ω/δ {wmax:.4}, ω̃ growth {growth:.3}, linear variation {:.2}%, {secs:.1}s", 100.0 * var),
    )
}

fn fd4(u: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> (f64, f64) {
    let d2 = |a: f64, b: f64, c: f64, d: f64, e: f64| (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
    let d1 = |a: f64, b: f64, d: f64, e: f64| (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
    let c = u(x, y);
    let xs = [u(x - 2.0 * h, y), u(x - h, y), u(x + h, y), u(x + 2.0 * h, y)];
    let ys = [u(x, y - 2.0 * h), u(x, y - h), u(x, y + h), u(x, y + 2.0 * h)];
    let lap = d2(xs[0], xs[1], c, xs[2], xs[3]) + d2(ys[0], ys[1], c, ys[2], ys[3]);
    let (gx, gy) = (d1(xs[0], xs[1], xs[2], xs[3]), d1(ys[0], ys[1], ys[2], ys[3]));
    (lap, gx * gx + gy * gy)
}

fn c12() -> Result<Verdict> {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 50 {
        let (ng, nh) = (r.gen_range(2..6), r.gen_range(1..5));
        let mut cs = |m: usize| -> Vec<Complex64> {
            (0..m).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
        };
        let g = cs(ng);
        let f = HarmonicPlanarMap::new(g, cs(nh));
        let z = Complex64::from_polar(r.gen_range(0.0..0.8), r.gen_range(0.0..2.0 * PI));
        let p = r.gen_range(0.5..4.0);
        if f.eval(z).norm() < 0.1 {
            continue;
        }
        n += 1;
        let sq = |x: f64, y: f64| f.eval(Complex64::new(x, y)).norm_sqr();
        let pw = |x: f64, y: f64| f.eval(Complex64::new(x, y)).norm().powf(p);
        let (lap_sq, grad_sq) = fd4(&sq, z.re, z.im, 1e-3);
        let (lap_p, _) = fd4(&pw, z.re, z.im, 1e-3);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
        worst = worst
            .max(rel(laplacian_abs_f_sq(&f, z)?, lap_sq))
            .max(rel(grad_abs_f_sq(&f, z)?, grad_sq))
            .max(rel(laplacian_abs_f_p(&f, z, p)?, lap_p));
    }
    verdict(worst <= 1e-6, format!("max deviation {worst:.3e}"))
}

fn c13() -> Result<Verdict> {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let (mut violations, mut linear_cases) = (0, 0);
    let mut worst = f64::INFINITY;
    for case in 0..100u64 {
        let x: [f64; 2] = loop {
            let x: [f64; 2] = [r.gen_range(-1.5..2.5), r.gen_range(0.05..2.0)];
            if x[0].hypot(x[1]).min((x[0] - 1.0).hypot(x[1])) > 0.05 {
                break x;
            }
        };
        let (m, d) = (x[0].hypot(x[1]), (x[0] - 1.0).hypot(x[1]));
        let lin_ok = m < 2.0 && d <= m && lens_linear_window(x) > 0.0;
        let cap = if lin_ok { lens_linear_window(x) } else { 1f64.min(m).min(d) };
        let eps = cap * r.gen_range(0.01..0.99) * [1.0, 0.1, 0.01][case as usize % 3];
        let brute = lens_diam_brute(x, eps, 20_000, case)?;
        let sq = lens_diam_bound_sqrt(x, eps)?;
        worst = worst.min(sq - brute);
        violations += (brute > sq) as usize;
        if lin_ok {
            linear_cases += 1;
            let li = lens_diam_bound_linear(x, eps, x[1].atan2(x[0]))?;
            worst = worst.min(li - brute);
            violations += (brute > li) as usize;
        }
    }
    verdict(violations == 0, format!("{violations} violations, {linear_cases} linear-window cases, min slack {worst:.3e}"))
}

fn c14() -> Result<Verdict> {
    let chart = builtin_chart();
    let g = gating_violations(&chart);
    let m = monotonicity_violations(&chart);
    let (slack, at) = composition_slack(&chart);
    let rows = chart.export();
    let cited = rows.iter().all(|r| !r.provenance.trim().is_empty());
    verdict(
        g.is_empty() && m.is_empty() && slack >= -1e-12 && rows.len() >= 20 && cited,
        format!("{} gating, {} monotonicity violations; composition slack {slack:.3e} ({at}); {} edges", g.len(), m.len(), rows.len()),
    )
}

fn c15() -> Result<Verdict> {
    let e = max_over((1..=10).map(|n| {
        let n = n as f64;
        Ok((quasihyperbolic_exact(ExactKind::PuncturedSpace, &[n, 0.0], &[n + 1.0, 0.0])? - ((n + 1.0) / n).ln()).abs())
    }))?;
    let a = (4.0 * PI).exp();
    let gap = (quasihyperbolic_exact(ExactKind::PuncturedSpace, &[a, 0.0], &[a * a, 0.0])? - 4.0 * PI).abs();
    verdict(e <= 1e-12 && gap <= 1e-9, format!("max error {e:.3e}, image gap error {gap:.3e}"))
}

type Criterion = fn() -> Result<Verdict>;

/// Criteria that fail as literally stated, with the reason recorded alongside.
const KNOWN_UNATTAINABLE: &[(usize, &str)] =
    &[(8, "R_T − 2 decays like √(1 − 2T); R_0.499 ≈ 1.98092 sits 0.019 from 2, outside the 0.01 window")];

fn main() {
    let criteria: [(&str, Criterion); 15] = [
        ("μ identity", c1),
        ("φ_K Pythagorean identity", c2),
        ("γ₂/τ₂ relation and spot values", c3),
        ("η_{K,2}(1) exponential bracket", c4),
        ("linear displacement lemma and fixed point", c5),
        ("antipodal quartic threshold", c6),
        ("cubic root", c7),
        ("circumscribed λ-ball", c8),
        ("punctured-plane quasiball inclusions", c9),
        ("subharmonicity exponent optimality", c10),
        ("moduli of continuity vs counterexample", c11),
        ("Laplacian formulas vs finite differences", c12),
        ("lens diameter bounds", c13),
        ("transfer chart invariants", c14),
        ("Ferrand example", c15),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let t = Instant::now();
        let v = f().unwrap_or_else(|e| Verdict { pass: false, detail: format!("error: {e}") });
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {} ({:.2}s)", v.detail, t.elapsed().as_secs_f64());
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id);
        match (v.pass, known) {
            (false, Some((_, why))) => println!("       known: {why}"),
            (true, Some(_)) => unexpected.push(format!("{id} now passes; drop it from KNOWN_UNATTAINABLE")),
            (false, None) => unexpected.push(format!("{id} {name}: {}", v.detail)),
            (true, None) => {}
        }
    }
    // criterion 8 fails only on the limit clause
    let r = circumscribed_lambda_radius(0.499).unwrap();
    if !(c8_identity().unwrap() <= 1e-9 && (r - 1.980915).abs() < 1e-5 && 2.0 - circumscribed_lambda_radius(0.49999).unwrap() < 1e-3) {
        unexpected.push(format!("criterion 8 changed character: R_0.499 = {r}"));
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results: {unexpected:#?}");
        std::process::exit(1);
    }
    println!("acceptance: 14 of 15 criteria pass; 1 known failure");
}
