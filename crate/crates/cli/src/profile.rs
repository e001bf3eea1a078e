use crate::error::{usage, CliError};
use crate::output::{emit, f17, json_text, Csv};
use blockmap::profile::{fisher_tail_exponent, fisher_tail_slope, phi_contour_crosscheck, ProfileCurve};
use clap::Args;
use serde_json::{json, Value};
use std::path::PathBuf;

const CROSSCHECK_TOL: f64 = 1e-8;
const FISHER_TARGET: f64 = 1.2;
const FISHER_TOL: f64 = 0.06;

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Add a phi_contour column from the complex form of the integral.
    #[arg(long)]
    pub crosscheck: bool,
    /// Fit the tail exponent of rho.
    #[arg(long)]
    pub fisher: bool,
    /// Fit window start:stop for --fisher.
    #[arg(long, default_value = "6:12")]
    pub fisher_window: String,
    #[arg(long, default_value_t = 16)]
    pub fisher_points: usize,
    /// CSV of (r, phi, rho); stdout when neither --out nor --report is given.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn check(name: &str, value: f64, tolerance: f64, pass: bool) -> Value {
    json!({ "name": name, "value": value, "tolerance": tolerance, "pass": pass })
}

pub fn run(args: &ProfileArgs) -> Result<(), CliError> {
    if args.points > 100_000 {
        return Err(usage("at most 100000 points"));
    }
    let curve = ProfileCurve::sample(args.r_min, args.r_max, args.points)?;
    let mut header = vec!["r", "phi", "rho"];
    let contour = if args.crosscheck {
        header.push("phi_contour");
        let v = curve
            .r
            .iter()
            .map(|&r| if r == 0.0 { Ok(0.0) } else { phi_contour_crosscheck(r) })
            .collect::<Result<Vec<_>, _>>()?;
        Some(v)
    } else {
        None
    };
    let mut csv = Csv::new(&header);
    for i in 0..curve.r.len() {
        let mut row = vec![f17(curve.r[i]), f17(curve.phi[i]), f17(curve.rho[i])];
        if let Some(c) = &contour {
            row.push(f17(c[i]));
        }
        csv.row(&row);
    }

    let mut checks = Vec::new();
    let monotone = curve.phi.windows(2).all(|w| w[1] >= w[0]);
    checks.push(check("phi non-decreasing", f64::NAN, 0.0, monotone));
    checks.push(check("rho non-negative", f64::NAN, 0.0, curve.rho.iter().all(|&v| v >= 0.0)));
    let in_range = curve.phi.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v));
    checks.push(check("phi within [0, 1]", f64::NAN, 1e-12, in_range));
    if let Some(c) = &contour {
        let dev = c.iter().zip(&curve.phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(check("max |phi_contour - phi|", dev, CROSSCHECK_TOL, dev < CROSSCHECK_TOL));
    }
    let fisher = if args.fisher {
        let window: Vec<f64> = args
            .fisher_window
            .split(':')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| usage("--fisher-window takes start:stop"))?;
        let [a, b] = window[..] else {
            return Err(usage("--fisher-window takes start:stop"));
        };
        let fit = fisher_tail_exponent(a, b, args.fisher_points)?;
        let slope = fisher_tail_slope(a, b, args.fisher_points)?;
        let pass = (fit.delta - FISHER_TARGET).abs() <= FISHER_TOL;
        checks.push(check("tail exponent delta near 6/5", fit.delta, FISHER_TOL, pass));
        json!({
            "window": [a, b],
            "points": args.fisher_points,
            "model": "log rho = c + p log r - k r^delta",
            "delta": fit.delta,
            "k": fit.k,
            "p": fit.p,
            "c": fit.c,
            "rms": fit.rms,
            "plain_slope": slope,
            "expected": FISHER_TARGET,
            "source": "quadrature",
        })
    } else {
        Value::Null
    };

    if args.out.is_some() || args.report.is_none() {
        emit(args.out.as_deref(), &csv.into_string())?;
    }
    if let Some(path) = &args.report {
        let report = json!({
            "command": "profile",
            "r_min": args.r_min,
            "r_max": args.r_max,
            "points": args.points,
            "quadrature_tolerance": curve.quadrature_tolerance,
            "phi_at_r_max": { "value": curve.phi.last(), "source": "quadrature" },
            "rho_max": { "value": curve.rho.iter().cloned().fold(0.0, f64::max), "source": "quadrature" },
            "fisher": fisher,
            "checks": checks,
        });
        emit(Some(path), &json_text(&report))?;
    }
    if checks.iter().any(|c| c["pass"] == false) {
        return Err(CliError::NonConvergence("a profile check failed; see the report".into()));
    }
    Ok(())
}
