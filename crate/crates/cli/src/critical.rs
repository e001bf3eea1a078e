use crate::cache::Cache;
use crate::data::{ModelData, SourceArg};
use crate::error::{usage, CliError};
use crate::output::{emit, json_text};
use blockmap::criticality::{
    critical_data, dual_dimension, kpz, lqg_exponents, lqg_string_exact, meander_central_charge, quad_mu_residual,
    CriticalValue,
};
use blockmap::lab::{fl, growth_rate_estimate, SequenceWindow};
use blockmap::models::Family;
use blockmap::pipeline::{eval_at, eval_at_q, m1_at_q, to_floats, ucrit_from_counts};
use blockmap::rug::{Float, Rational};
use clap::Args;
use serde_json::{json, Map, Value};
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct CriticalArgs {
    #[arg(long, value_parser = crate::parse_family)]
    pub model: Family,
    /// Coefficient file; required for bicubic.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub source: Option<SourceArg>,
    /// Component weight for meander-q.
    #[arg(long)]
    pub q: Option<f64>,
    /// Extrapolation order for estimated critical data.
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Central charge of the matter coupled to gravity, for families where it is rational.
pub fn rational_central_charge(family: Family) -> Option<Rational> {
    match family {
        Family::Quad => Some(Rational::new()),
        Family::Cubic | Family::OpenPath | Family::Meander => Some(Rational::from(-2)),
        Family::Bicubic => Some(Rational::from(-1)),
        Family::MeanderQ => None,
    }
}

fn value(v: &CriticalValue, source: &str) -> Value {
    json!({
        "value": v.to_f64(),
        "digits": format!("{v}"),
        "exact": v.exact.as_ref().map(|r| r.to_string()),
        "formula": v.formula,
        "source": source,
    })
}

fn estimated(v: f64, source: &str, method: &str) -> Value {
    json!({ "value": v, "exact": null, "source": source, "method": method })
}

fn check(name: &str, residual: f64, tolerance: f64) -> Value {
    json!({ "name": name, "residual": residual, "tolerance": tolerance, "pass": residual.abs() <= tolerance })
}

fn exponents(c: f64, exact_c: Option<&Rational>, source: &str) -> Result<(Value, Vec<Value>), CliError> {
    let e = lqg_exponents(c)?;
    let mut obj = Map::new();
    obj.insert("c".into(), json!(c));
    obj.insert("c_exact".into(), json!(exact_c.map(|r| r.to_string())));
    for (k, v) in [
        ("gamma", e.gamma),
        ("gamma_prime", e.gamma_prime),
        ("gamma_s", e.gamma_s),
        ("gamma_s_prime", e.gamma_s_prime),
    ] {
        obj.insert(k.into(), json!(v));
    }
    let (gs, gsp) = match exact_c {
        Some(c) => {
            let (a, b) = lqg_string_exact(c)?;
            (Some(a.to_string()), Some(b.to_string()))
        }
        None => (None, None),
    };
    obj.insert("gamma_s_exact".into(), json!(gs));
    obj.insert("gamma_s_prime_exact".into(), json!(gsp));
    obj.insert("source".into(), json!(source));
    let x = 0.5;
    let d = kpz(x, e.gamma);
    let dp = kpz(x, e.gamma_prime);
    let checks = vec![
        check("gamma * gamma_prime = 4", e.gamma * e.gamma_prime - 4.0, 1e-12),
        check("(1 - gamma_s)(1 - gamma_s_prime) = 1", (1.0 - e.gamma_s) * (1.0 - e.gamma_s_prime) - 1.0, 1e-12),
        check("kpz(1/2, gamma) kpz(1/2, gamma_prime) = 1/2", d * dp - x, 1e-12),
        check("dual dimension of kpz(1/2, gamma)", dual_dimension(d, e.gamma_s) - dp, 1e-12),
    ];
    Ok((Value::Object(obj), checks))
}

fn closed_form(family: Family) -> Result<Value, CliError> {
    let d = critical_data(family)?;
    let mut values = Map::new();
    values.insert("g1".into(), value(&d.g1, "closed-form"));
    values.insert("m1_at_g1".into(), value(&d.m1_at_g1, "closed-form"));
    values.insert("m1_prime_at_g1".into(), value(&d.m1prime_at_g1, "closed-form"));
    values.insert("u_cr".into(), value(&d.u_cr, "closed-form"));
    values.insert("g_c_at_u_cr".into(), value(&d.g_c_at_ucr, "closed-form"));
    values.insert("t_cr".into(), value(&d.t_cr, "closed-form"));
    if let Some(k) = &d.k_b {
        values.insert("k_b".into(), json!({ "value": k.to_f64(), "exact": k.to_string(), "source": "closed-form" }));
    }
    let c = rational_central_charge(family).expect("closed-form families have rational c");
    let (exps, mut checks) = exponents(c.to_f64(), Some(&c), "closed-form")?;
    let u_cr = d.u_cr.to_f64();
    let g_c = d.g_c_of_u(u_cr)?;
    checks.push(check("g_c(u_cr) by bisection on t_c", g_c - d.g_c_at_ucr.to_f64(), 1e-10));
    checks.push(check("g_c(u_cr) = g_cr(u_cr)", d.g_cr_of_u(u_cr) - d.g_c_at_ucr.to_f64(), 1e-10));
    if family == Family::Quad {
        let r = quad_mu_residual(&Rational::from((9, 5)), &Rational::from((25, 432)), &Rational::from((8, 5)));
        checks.push(check("quartic for M at (9/5, 25/432, 8/5)", r.to_f64(), 0.0));
    }
    Ok(json!({ "values": values, "exponents": exps, "checks": checks }))
}

/// Critical data extrapolated from the u = 1 counts.
fn from_counts(m1: Vec<Float>, eval: impl Fn(&Float) -> Vec<Float>, p: usize, tag: &str) -> Result<Map<String, Value>, CliError> {
    let r = ucrit_from_counts(&m1, p)?;
    let window = SequenceWindow::new(eval(&fl(r.ucrit.estimate)), "m_n at u_cr")?;
    let g_c = growth_rate_estimate(&window, p)?;
    let mut values = Map::new();
    values.insert("g1".into(), estimated(r.g1, tag, "ratio method"));
    values.insert("u_cr".into(), estimated(r.ucrit.estimate, tag, "generalized Richardson"));
    values.insert("u_cr_correction_exponent".into(), estimated(r.theta, tag, "fitted and rounded to a half-integer"));
    values.insert("g_c_at_u_cr".into(), estimated(g_c, tag, "ratio method at the estimated u_cr"));
    values.insert("t_cr".into(), json!({ "value": null, "source": tag, "note": "needs M1(g1) in closed form" }));
    Ok(values)
}

pub fn run(args: &CriticalArgs, cache: &Cache) -> Result<(), CliError> {
    let family = args.model;
    if args.q.is_some() && family != Family::MeanderQ {
        return Err(usage("--q is only used with meander-q"));
    }
    let mut report = Map::new();
    report.insert("command".into(), json!("critical"));
    report.insert("model".into(), json!(family.name()));
    let body = match family {
        Family::Quad | Family::Cubic | Family::OpenPath | Family::Meander => {
            if args.file.is_some() || args.source.is_some_and(|s| s != SourceArg::ClosedForm) {
                return Err(usage(format!("{family} critical data come from closed forms; drop --file/--source")));
            }
            report.insert("source".into(), json!("closed-form"));
            closed_form(family)?
        }
        Family::Bicubic => {
            if args.file.is_none() && args.source != Some(SourceArg::BruteForce) {
                return Err(usage(
                    "bicubic critical data need the bicubic counts m_n to high order, which have no closed form \
                     and only reach n = 12 by brute force; pass them with --file <path> (lines `n m_n`), \
                     or accept a rough estimate with --source brute-force",
                ));
            }
            let data = ModelData::resolve(family, args.source, args.file.as_deref())?;
            let order = data.max_order().unwrap_or(0);
            let series = data.series(order, cache)?;
            let tag = data.source_tag();
            report.insert("source".into(), json!(tag));
            report.insert("n".into(), json!(order));
            report.insert("p".into(), json!(args.p));
            let values = from_counts(to_floats(series.m1.coeffs()), |u| eval_at(&series.m_u, u), args.p, tag)?;
            let c = rational_central_charge(family).unwrap();
            let (exps, checks) = exponents(c.to_f64(), Some(&c), "closed-form")?;
            json!({ "values": values, "exponents": exps, "checks": checks })
        }
        Family::MeanderQ => {
            let q = args.q.ok_or_else(|| usage("meander-q needs --q"))?;
            let c = meander_central_charge(q)?;
            let data = ModelData::resolve(family, args.source, args.file.as_deref())?;
            let order = data.max_order().unwrap_or(0);
            let series = data.series_q(order, cache)?;
            let qf = fl(q);
            let tag = data.source_tag();
            report.insert("source".into(), json!(tag));
            report.insert("q".into(), json!(q));
            report.insert("n".into(), json!(order));
            report.insert("p".into(), json!(args.p));
            let values = from_counts(m1_at_q(&series.m1, &qf), |u| eval_at_q(&series.m_u, u, &qf), args.p, tag)?;
            let (exps, checks) = exponents(c, None, "closed-form")?;
            json!({ "values": values, "exponents": exps, "checks": checks })
        }
    };
    if let Value::Object(body) = body {
        report.extend(body);
    }
    let failed = report["checks"].as_array().is_some_and(|c| c.iter().any(|c| c["pass"] == false));
    emit(args.out.as_deref(), &json_text(&Value::Object(report)))?;
    if failed {
        return Err(CliError::NonConvergence("a consistency check failed; see the report".into()));
    }
    Ok(())
}
