//! The six experiments. Each resolves its parameters from the config,
//! calls into the numerical crate and returns a report plus a CSV table.

use crate::config::{ChartName, ExperimentConfig, ExperimentName};
use crate::report::{num, Comparison, Criterion, RunReport, Table};
use nalgebra::vector;
use num_rational::Rational64;
use serde_json::json;
use wkb_lab::cutoff::CutoffLibrary;
use wkb_lab::dirac::growth::{geometric_degrees, lq_radial_norm, sogge_exponent};
use wkb_lab::dirac::{eigenfunction, jacobi_moment_fit, sharpness_report, sogge_fit, Sign};
use wkb_lab::hamilton_jacobi::{hj_residual, phase_eval, remainder_bound_check, FlowOptions, PhaseField, RemainderFit};
use wkb_lab::oscillatory::decay::{decay_sweep, SweepOptions};
use wkb_lab::oscillatory::{decay_fit, KernelOptions, Window};
use wkb_lab::strichartz::loss::graded_times;
use wkb_lab::strichartz::{build_partition, torus_loss_sweep, AdmissiblePair, Class, Exponent};
use wkb_lab::{LabError, MassParam, MetricChart, Result, Symbol, Vector};

/// Settings that come from the command line rather than the config.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub seed: u64,
    /// Kernel quadrature node budget.
    pub budget: u64,
}

pub fn run_experiment(cfg: &ExperimentConfig, settings: RunSettings) -> Result<(RunReport, Table)> {
    match cfg.experiment.name {
        ExperimentName::HjValidate => hj_validate(cfg, settings),
        ExperimentName::DispersionWave => dispersion(cfg, settings, Window::Wave),
        ExperimentName::DispersionKg => dispersion(cfg, settings, Window::Kg),
        ExperimentName::StrichartzFit => strichartz_fit(cfg, settings),
        ExperimentName::DiracSharpness => dirac_sharpness(cfg, settings),
        ExperimentName::JacobiMoments => jacobi_moments(cfg, settings),
    }
}

fn vec2(v: &[[f64; 2]]) -> Vec<Vector<2>> {
    v.iter().map(|p| vector![p[0], p[1]]).collect()
}

fn chart(cfg: &ExperimentConfig, default: ChartName) -> Result<(ChartName, MetricChart<2>)> {
    let g = &cfg.geometry;
    let name = g.chart.unwrap_or(default);
    let chart = match name {
        ChartName::Flat => MetricChart::flat(),
        ChartName::PerturbedFlat => {
            let c = g.center.unwrap_or([0.0, 0.0]);
            MetricChart::perturbed_flat(g.epsilon.unwrap_or(0.15), vector![c[0], c[1]], g.radius.unwrap_or(1.0))?
        }
    };
    Ok((name, chart))
}

fn chart_label(name: ChartName) -> &'static str {
    match name {
        ChartName::Flat => "flat",
        ChartName::PerturbedFlat => "perturbed_flat",
    }
}

fn hj_validate(cfg: &ExperimentConfig, s: RunSettings) -> Result<(RunReport, Table)> {
    let (name, chart) = chart(cfg, ChartName::Flat)?;
    let flat = name == ChartName::Flat;
    let m = cfg.geometry.m.unwrap_or(1.0);
    let t0 = cfg.geometry.t0.unwrap_or(if flat { 1.0 } else { 0.25 });
    let hj = &cfg.hamilton_jacobi;
    let hs = hj.h.clone().unwrap_or(vec![1.0, 0.25, 0.0625]);
    let ts = hj.t.clone().unwrap_or(if flat {
        vec![-t0, -0.5 * t0, 0.0, 0.5 * t0, t0]
    } else {
        vec![0.00625, 0.0125, 0.025, 0.05, 0.1]
    });
    let xs = vec2(&hj.x.clone().unwrap_or(if flat {
        vec![[0.0, 0.0], [0.5, -0.25], [-1.0, 0.75], [2.0, 1.0], [-0.3, -1.5]]
    } else {
        vec![[0.0, 0.0], [0.3, -0.4], [-0.6, 0.2]]
    }));
    let xis = vec2(&hj.xi.clone().unwrap_or(if flat {
        vec![[1.0, 0.0], [0.5, 1.5], [-2.0, 0.5], [-0.25, -0.75], [1.2, -1.1]]
    } else {
        vec![[1.0, 0.0], [0.5, 1.2], [-0.9, -0.7]]
    }));
    let mass = MassParam::new(m)?;
    let fields: Vec<PhaseField<2>> = hs
        .iter()
        .map(|h| Ok(PhaseField::new(Symbol::new(chart.clone(), mass, CutoffLibrary::standard(mass), *h)?, t0)))
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["h", "t", "x1", "x2", "xi1", "xi2", "S", "S_ref", "diff"]);
    let mut worst = 0.0f64;
    for f in &fields {
        let h = f.h();
        for &t in &ts {
            for x in &xs {
                for xi in &xis {
                    let v = phase_eval(f, t, x, xi)?;
                    // flat: the closed form; curved: the first-order Taylor model
                    let (s_val, reference, diff) = if flat {
                        let r = x.dot(xi) + t * (f.symbol.mass_term() + xi.norm_squared()).sqrt();
                        (v.s, r, v.s - r)
                    } else {
                        let lin = t * f.symbol.q(x, xi);
                        (v.s, x.dot(xi) + lin, v.s_minus_linear - lin)
                    };
                    worst = worst.max(diff.abs());
                    table.push(vec![num(h), num(t), num(x[0]), num(x[1]), num(xi[0]), num(xi[1]), num(s_val), num(reference), num(diff)]);
                }
            }
        }
    }
    let mut criteria = Vec::new();
    let mut details = json!(null);
    if flat {
        let mut c = Criterion::new("flat phase closed form", "eq:Hamitlonian-Jacobi", worst, 0.0, 1e-8, Comparison::Within);
        if c.pass {
            c.name = "flat phase closed form (exact)".into();
        }
        criteria.push(c);
    } else {
        let mut residual = 0.0f64;
        let rt: Vec<f64> = ts.iter().copied().filter(|t| *t > 0.0).collect();
        for f in &fields {
            for x in &xs {
                for xi in &xis {
                    for &t in rt.iter().filter(|t| **t + 1e-3 <= t0) {
                        residual = residual.max(hj_residual(f, t, x, xi, 1e-3)?.abs());
                    }
                }
            }
        }
        criteria.push(Criterion::new("Hamilton-Jacobi residual", "eq:Hamitlonian-Jacobi", residual, 0.0, 1e-6, Comparison::AtMost));
        let points: Vec<(Vector<2>, Vector<2>)> = xs.iter().flat_map(|x| xis.iter().map(move |xi| (*x, *xi))).collect();
        let rep = remainder_bound_check(&fields, &rt, &points)?;
        for (h, fit) in rep.h.iter().zip(&rep.fits) {
            let slope = match fit {
                RemainderFit::Fit { slope, .. } => *slope,
                RemainderFit::Exact => f64::NAN,
            };
            criteria.push(Criterion::new(&format!("remainder slope h={h}"), "eq:S2", slope, 2.2, 0.3, Comparison::Within));
        }
        let spread = rep.constant_spread().unwrap_or(f64::NAN);
        criteria.push(Criterion::new("remainder constant spread", "eq:S2", spread, 2.0, 0.0, Comparison::AtMost));
        details = json!({ "remainder": rep });
    }
    let params = json!({
        "chart": chart_label(name), "m": m, "t0": t0, "h": hs, "t": ts,
        "x": xs.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>(),
        "xi": xis.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>(),
    });
    Ok((RunReport::new("hj-validate", s.seed, params, criteria, details), table))
}

fn dispersion(cfg: &ExperimentConfig, s: RunSettings, window: Window) -> Result<(RunReport, Table)> {
    let kg = window == Window::Kg;
    let (name, chart) = chart(cfg, ChartName::PerturbedFlat)?;
    let m = cfg.geometry.m.unwrap_or(if kg { 1.0 } else { 0.0 });
    let t0 = cfg.geometry.t0.unwrap_or(1.0);
    let d = &cfg.dispersion;
    let default_h: Vec<f64> = if kg { 6..=8 } else { 4..=7 }.map(|j| 0.5f64.powi(j)).collect();
    let hs = d.h.clone().unwrap_or(default_h);
    let count = d.t_count.unwrap_or(5);
    let points = vec2(&d.points.clone().unwrap_or(vec![[0.0, 0.0], [0.3, -0.2]]));
    let mass = MassParam::new(m)?;
    let fields: Vec<PhaseField<2>> = hs
        .iter()
        .map(|h| {
            let sym = Symbol::new(chart.clone(), mass, CutoffLibrary::dispersion(mass), *h)?;
            Ok(PhaseField::new(sym, t0).with_options(FlowOptions::sweep()))
        })
        .collect::<Result<_>>()?;
    let opts = SweepOptions {
        points: points.clone(),
        radial_points: d.radial_points.unwrap_or(24),
        band_spacing: d.band_spacing.unwrap_or(0.125),
        kernel: KernelOptions { budget: s.budget, ..KernelOptions::default() },
    };
    let samples = decay_sweep(&fields, window, count, &opts)?;
    let mut table = Table::new(&["h", "t", "x1", "x2", "y1", "y2", "reL", "imL", "absL"]);
    for smp in &samples {
        let mut row = vec![num(smp.h), num(smp.t)];
        row.extend(smp.x.iter().chain(&smp.y).map(|v| num(*v)));
        row.extend([num(smp.value.re), num(smp.value.im), num(smp.max_abs)]);
        table.push(row);
    }
    let fit = decay_fit(&samples)?;
    let (tag, alpha, beta) = if kg { ("eq:disper-KG", 3.0, 1.0) } else { ("eq:disper-W", 2.0, 0.5) };
    let criteria = vec![
        Criterion::new("alpha (h exponent)", tag, fit.alpha, alpha, 0.25, Comparison::Within),
        Criterion::new("beta (time decay exponent)", tag, fit.beta, beta, 0.15, Comparison::Within),
        Criterion::new("fit residual", tag, fit.residual, 0.5, 0.0, Comparison::AtMost),
    ];
    let params = json!({
        "chart": chart_label(name), "m": m, "t0": t0, "h": hs, "t_count": count,
        "points": points.iter().map(|v| [v[0], v[1]]).collect::<Vec<_>>(),
        "radial_points": opts.radial_points, "band_spacing": opts.band_spacing, "budget": s.budget,
        "window": if kg { "kg" } else { "wave" },
    });
    let details = json!({ "alpha": fit.alpha, "beta": fit.beta, "intercept": fit.intercept, "residual": fit.residual, "reliable": fit.reliable });
    Ok((RunReport::new(if kg { "dispersion-kg" } else { "dispersion-wave" }, s.seed, params, criteria, details), table))
}

fn parse_exponent(field: &str, s: &str) -> Result<Exponent> {
    s.parse::<Exponent>()
        .map_err(|e| LabError::InvalidParameter(format!("{field}: {e}")))
}

fn strichartz_fit(cfg: &ExperimentConfig, s: RunSettings) -> Result<(RunReport, Table)> {
    let c = &cfg.strichartz;
    let d = c.d.unwrap_or(2);
    let p = parse_exponent("strichartz.p", c.p.as_deref().unwrap_or("8"))?;
    let q = parse_exponent("strichartz.q", c.q.as_deref().unwrap_or("4"))?;
    let mass = c.mass.unwrap_or(0.0);
    let ks = c.shells.clone().unwrap_or((3..=8).collect());
    let trials = c.trials.unwrap_or(16);
    let time_points = c.time_points.unwrap_or(49);
    let t_max = c.t_max.unwrap_or(1.0);
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let partition = build_partition(k_max)?;
    let pair = AdmissiblePair::new(p, q, d as u32, Class::Wave)?;
    let rep = torus_loss_sweep(d, mass, &pair, &partition, &ks, trials, s.seed, &graded_times(t_max, time_points))?;
    let mut table = Table::new(&["k", "trial", "quotient"]);
    for sh in &rep.shells {
        for (j, v) in sh.quotients.iter().enumerate() {
            table.push(vec![sh.k.to_string(), j.to_string(), num(*v)]);
        }
    }
    let criteria = vec![
        Criterion::new("loss slope at most gamma^W", "eq:stri-W", rep.fit.slope, rep.predicted_loss, 0.15, Comparison::AtMost),
        Criterion::new("excess trend of residuals", "eq:stri-W", rep.excess_trend, 0.0, 0.1, Comparison::AtMost),
    ];
    let params = json!({
        "model": "torus", "d": d, "p": p.to_string(), "q": q.to_string(), "mass": mass, "shells": ks,
        "trials": trials, "time_points": time_points, "t_max": t_max,
        "generator": "ChaCha20, stream (k << 32) | trial",
    });
    let details = json!({ "fit": rep.fit, "predicted_loss": rep.predicted_loss, "excess_trend": rep.excess_trend });
    Ok((RunReport::new("strichartz-fit", s.seed, params, criteria, details), table))
}

fn ratio_str(r: Rational64) -> String {
    r.to_string()
}

fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn dirac_sharpness(cfg: &ExperimentConfig, s: RunSettings) -> Result<(RunReport, Table)> {
    let c = &cfg.dirac;
    let d = c.d.unwrap_or(4);
    let report = sharpness_report(d)?;
    let default_q = if d >= 4 { format!("{}/{}", 2 * (d - 1), d - 3) } else { "inf".to_string() };
    let q = parse_exponent("dirac.q", c.q.as_deref().unwrap_or(&default_q))?;
    let (lo, hi) = if d == 2 { (16, 256) } else { (32, 400) };
    let ns = geometric_degrees(c.n_min.unwrap_or(lo), c.n_max.unwrap_or(hi), c.count.unwrap_or(9));
    let fit = sogge_fit(d as usize, q, &ns)?;
    let mut table = Table::new(&["d", "n", "l", "q", "norm"]);
    for smp in &fit.samples {
        table.push(vec![d.to_string(), smp.n.to_string(), "0".into(), q.to_string(), num(smp.norm)]);
    }
    let n0 = ns[0];
    table.push(vec![d.to_string(), n0.to_string(), "0".into(), "2".into(), num(lq_radial_norm(&eigenfunction(d as usize, n0, 0, Sign::Plus)?, Exponent::int(2))?)]);

    let rows: Vec<_> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "p": r.p, "q": r.q, "gamma_w": ratio_str(r.gamma), "s_q": ratio_str(r.growth),
                "gap": ratio_str(r.gap), "epsilon": r.epsilon.map(ratio_str),
                "equality": format!("{} = {}", ratio_str(r.gamma), ratio_str(r.growth)),
            })
        })
        .collect();
    let mut criteria = Vec::new();
    let first = &report.rows[0];
    match d {
        2 => criteria.push(Criterion::exact(
            "gap gamma^W(4,inf) - s(inf) = 1/4",
            "eq:stri-masslessdirac",
            ratio_f64(first.gap),
            0.25,
            first.gap == Rational64::new(1, 4),
        )),
        3 => {
            let last = report.rows.last().expect("three rows");
            criteria.push(Criterion::exact(
                "epsilon family gap eps/(2(2+eps)) -> 0",
                "eq:stri-masslessdirac",
                ratio_f64(last.gap),
                0.0,
                report.sharp,
            ))
        }
        _ => criteria.push(Criterion::exact(
            &format!("s(q) = gamma^W(2,q) = {}", ratio_str(first.growth)),
            "eq:stri-masslessdirac",
            ratio_f64(first.gap),
            0.0,
            report.sharp,
        )),
    }
    let tol = if d == 2 { 0.03 } else { 0.05 };
    criteria.push(Criterion::new("L^q growth slope s(q)", "lem-sogge", fit.slope, sogge_exponent(d as usize, q), tol, Comparison::Within));
    let params = json!({ "d": d, "q": q.to_string(), "n": ns, "l": 0 });
    let details = json!({ "sharpness": rows, "sharp": report.sharp, "growth": { "slope": fit.slope, "predicted": fit.predicted, "below_threshold": fit.below_threshold } });
    Ok((RunReport::new("dirac-sharpness", s.seed, params, criteria, details), table))
}

fn jacobi_moments(cfg: &ExperimentConfig, s: RunSettings) -> Result<(RunReport, Table)> {
    let c = &cfg.jacobi;
    let (alpha, beta, p, r) = (c.alpha.unwrap_or(1.0), c.beta.unwrap_or(2.0), c.p.unwrap_or(4.0), c.r.unwrap_or(0.0));
    let ns = geometric_degrees(c.n_min.unwrap_or(16), c.n_max.unwrap_or(512), c.count.unwrap_or(11));
    let fit = jacobi_moment_fit(alpha, beta, p, r, &ns)?;
    let mut table = Table::new(&["n", "moment"]);
    for (n, m) in &fit.moments {
        table.push(vec![n.to_string(), num(*m)]);
    }
    // 5 % of the predicted exponent, or 0.05 absolute when it vanishes
    let tol = if fit.predicted == 0.0 { 0.05 } else { 0.05 * fit.predicted.abs() };
    let criteria = vec![Criterion::new("moment exponent alpha p - 2r - 2", "lem-sogge", fit.slope, fit.predicted, tol, Comparison::Within)];
    let params = json!({ "alpha": alpha, "beta": beta, "p": p, "r": r, "n": ns });
    let details = json!({ "fit": fit.fit });
    Ok((RunReport::new("jacobi-moments", s.seed, params, criteria, details), table))
}
