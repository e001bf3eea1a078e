use crate::cache::Cache;
use crate::data::{ModelData, SourceArg};
use crate::error::{usage, CliError};
use crate::output::{emit, f17, json_text, Csv};
use blockmap::criticality::critical_data;
use blockmap::lab::{fl, np_estimate, SequenceWindow};
use blockmap::models::Family;
use blockmap::pipeline::{eval_at, eval_at_q, m1_at_q, to_floats, ucrit_from_counts};
use blockmap::rug::{Float, Rational};
use blockmap::{IntPoly, IntPoly2, TruncatedSeries};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;

const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Maps,
    TwoPoint,
    OpenPath,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Maps => "maps",
            Target::TwoPoint => "two-point",
            Target::OpenPath => "open-path",
        }
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long, value_parser = crate::parse_family)]
    pub model: Family,
    /// Sequence to analyse; open-path for the open-path model, maps otherwise.
    #[arg(long, value_enum)]
    pub what: Option<Target>,
    /// Truncation order N of the (N,p)-estimate.
    #[arg(long)]
    pub n: Option<usize>,
    /// Extrapolation order p of the (N,p)-estimate.
    #[arg(long)]
    pub p: Option<usize>,
    /// Power of log n in the assumed correction.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Weight u: a decimal, a fraction such as 9/5, or `ucr`. Repeatable.
    #[arg(long = "u")]
    pub u: Vec<String>,
    /// Sweep start:stop:step.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Shorthand for --u ucr.
    #[arg(long)]
    pub at_ucr: bool,
    /// Component weight for meander-q.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub source: Option<SourceArg>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// CSV of (u, estimate); stdout when neither --out nor --report is given.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Default (N, p) per model and sequence.
fn preset(family: Family, target: Target, data: &ModelData) -> (usize, usize) {
    let (n, p) = match (family, target) {
        (Family::Quad, Target::TwoPoint) => (35, 6),
        (Family::Quad, _) => (50, 5),
        (Family::Cubic, _) => (34, 5),
        (Family::OpenPath, _) => (30, 5),
        (Family::Meander, _) => (20, 5),
        (Family::Bicubic, _) => (34, 5),
        (Family::MeanderQ, _) => (10, 3),
    };
    (data.max_order().map_or(n, |cap| n.min(cap)), p)
}

fn parse_u(s: &str) -> Result<Float, CliError> {
    if let Some((a, b)) = s.split_once('/') {
        let r = Rational::from_str_radix(&format!("{}/{}", a.trim(), b.trim()), 10)
            .map_err(|_| usage(format!("bad fraction `{s}`")))?;
        return Ok(fl(&r));
    }
    let v = Float::parse(s.trim()).map_err(|_| usage(format!("bad weight `{s}`")))?;
    Ok(fl(v))
}

fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad sweep `{s}`; expected start:stop:step")))?;
    let [start, stop, step] = parts[..] else {
        return Err(usage(format!("bad sweep `{s}`; expected start:stop:step")));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(usage("sweep step must be positive"));
    }
    if stop < start {
        return Err(usage("sweep range is empty"));
    }
    let count = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(usage(format!("sweep has more than {MAX_SWEEP_POINTS} points")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

enum Evaluator {
    Plain(TruncatedSeries<IntPoly>),
    AtQ(TruncatedSeries<IntPoly2>, Float),
}

impl Evaluator {
    fn at(&self, u: &Float) -> Vec<Float> {
        match self {
            Evaluator::Plain(s) => eval_at(s, u),
            Evaluator::AtQ(s, q) => eval_at_q(s, u, q),
        }
    }
}

pub fn run(args: &EstimateArgs, cache: &Cache) -> Result<(), CliError> {
    let family = args.model;
    let target = args.what.unwrap_or(if family == Family::OpenPath { Target::OpenPath } else { Target::Maps });
    if target == Target::OpenPath && family != Family::OpenPath {
        return Err(usage("--what open-path needs --model open-path"));
    }
    if (family == Family::MeanderQ) != args.q.is_some() {
        return Err(usage("--q is required for meander-q and only used there"));
    }
    if !args.eta.is_finite() {
        return Err(usage("--eta must be finite"));
    }
    let data = ModelData::resolve(family, args.source, args.file.as_deref())?;
    let (n_default, p_default) = preset(family, target, &data);
    let n = args.n.unwrap_or(n_default);
    let p = args.p.unwrap_or(p_default);
    data.check_order(n)?;

    let (evaluator, m1_at_one) = if family == Family::MeanderQ {
        let q = fl(args.q.unwrap());
        blockmap::criticality::meander_central_charge(args.q.unwrap())?;
        let s = data.series_q(n, cache)?;
        let seq = match target {
            Target::Maps => s.m_u.clone(),
            Target::TwoPoint => s.two_point()?,
            Target::OpenPath => unreachable!(),
        };
        let m1 = m1_at_q(&s.m1, &q);
        (Evaluator::AtQ(seq, q), m1)
    } else {
        let s = data.series(n, cache)?;
        let seq = match target {
            Target::Maps => s.m_u.clone(),
            Target::TwoPoint => s.two_point()?,
            Target::OpenPath => s.open_path()?,
        };
        (Evaluator::Plain(seq), to_floats(s.m1.coeffs()))
    };

    let mut inputs: Vec<(String, Float)> = Vec::new();
    let mut u_cr_info = Value::Null;
    let wants_ucr = args.at_ucr || args.u.iter().any(|u| u.trim() == "ucr");
    let u_cr = if wants_ucr {
        let (u, info) = match critical_data(family) {
            Ok(d) => (fl(&d.u_cr.value), json!({ "value": d.u_cr.to_f64(), "source": "closed-form" })),
            Err(_) => {
                let r = ucrit_from_counts(&m1_at_one, p)?;
                let info = json!({ "value": r.ucrit.estimate, "source": data.source_tag(), "method": "generalized Richardson" });
                (fl(r.ucrit.estimate), info)
            }
        };
        u_cr_info = info;
        Some(u)
    } else {
        None
    };
    if args.at_ucr {
        inputs.push(("ucr".into(), u_cr.clone().unwrap()));
    }
    for s in &args.u {
        let u = if s.trim() == "ucr" { u_cr.clone().unwrap() } else { parse_u(s)? };
        inputs.push((s.trim().to_string(), u));
    }
    if let Some(sweep) = &args.sweep {
        for u in parse_sweep(sweep)? {
            inputs.push((f17(u), fl(u)));
        }
    }
    if inputs.is_empty() {
        return Err(usage("give at least one of --u, --sweep, --at-ucr"));
    }
    if let Some((label, _)) = inputs.iter().find(|(_, u)| *u <= 0) {
        return Err(usage(format!("weight u = {label} must be positive")));
    }

    let mut csv = Csv::new(&["u", "estimate"]);
    let mut points = Vec::new();
    for (label, u) in &inputs {
        let window = SequenceWindow::new(evaluator.at(u), target.name())?.with_eta(args.eta);
        let r = np_estimate(&window, n, p)?;
        csv.row(&[f17(u.to_f64()), f17(r.estimate)]);
        points.push(json!({ "label": label, "u": u.to_f64(), "estimate": r.estimate, "source": data.source_tag() }));
    }
    if args.out.is_some() || args.report.is_none() {
        emit(args.out.as_deref(), &csv.into_string())?;
    }
    if let Some(path) = &args.report {
        let report = json!({
            "command": "estimate",
            "model": family.name(),
            "what": target.name(),
            "source": data.source_tag(),
            "q": args.q,
            "n": n,
            "p": p,
            "eta": args.eta,
            "u_cr": u_cr_info,
            "points": points,
        });
        emit(Some(path), &json_text(&report))?;
    }
    Ok(())
}
