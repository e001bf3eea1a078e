use crate::cache::Cache;
use crate::data::{ModelData, SourceArg};
use crate::error::{usage, CliError};
use crate::output::{emit, json_text, Csv};
use blockmap::models::Family;
use blockmap::rug::Integer;
use blockmap::{IntPoly, IntPoly2, TruncatedSeries};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// m_n at u = 1
    Counts,
    /// m_n^(u) as polynomials in u
    Mu,
    /// block counts b_j
    Blocks,
    /// correlator coefficients c_j
    Correlator,
    /// two-point coefficients s_n^(u)
    TwoPoint,
    /// open-path coefficients (open-path model only)
    OpenPath,
    /// meander counts m_{N,k} by number of components k
    Components,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[arg(long, value_parser = crate::parse_family)]
    pub model: Family,
    #[arg(long, value_enum)]
    pub what: What,
    /// Truncation order N.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub source: Option<SourceArg>,
    /// Coefficient file (`n value` or `n k value` per line).
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// One table row: integer indices, then the coefficient.
type Row = (Vec<usize>, Integer);

fn scalar_rows(s: &TruncatedSeries<Integer>, from: usize) -> Vec<Row> {
    s.coeffs().iter().enumerate().skip(from).map(|(n, c)| (vec![n], c.clone())).collect()
}

fn poly_rows(s: &TruncatedSeries<IntPoly>) -> Vec<Row> {
    let mut rows = Vec::new();
    for (n, p) in s.coeffs().iter().enumerate() {
        for k in 0..=p.degree().unwrap_or(0) {
            rows.push((vec![n, k], p.coeff(k)));
        }
    }
    rows
}

fn poly2_rows(s: &TruncatedSeries<IntPoly2>) -> Vec<Row> {
    let mut rows = Vec::new();
    for (n, p) in s.coeffs().iter().enumerate() {
        for k in 0..=p.degree().unwrap_or(0) {
            let inner = p.coeff(k);
            for j in 0..=inner.degree().unwrap_or(0) {
                rows.push((vec![n, k, j], inner.coeff(j)));
            }
        }
    }
    rows
}

fn table(args: &CoeffsArgs, cache: &Cache) -> Result<(Vec<&'static str>, Vec<Row>, &'static str), CliError> {
    let family = args.model;
    if args.what == What::Components {
        if !matches!(family, Family::Meander | Family::MeanderQ) {
            return Err(usage("--what components is defined for meander and meander-q"));
        }
        let data = ModelData::resolve(Family::MeanderQ, args.source, args.file.as_deref())?;
        let row = data.m1_q(args.n, cache)?.coeff(args.n).clone();
        let rows = (1..=args.n).map(|k| (vec![args.n, k], row.coeff(k))).collect();
        return Ok((vec!["n", "k", "coeff"], rows, data.source_tag()));
    }
    if args.what == What::OpenPath && family != Family::OpenPath {
        return Err(usage("--what open-path needs --model open-path"));
    }
    let data = ModelData::resolve(family, args.source, args.file.as_deref())?;
    let tag = data.source_tag();
    if family == Family::MeanderQ {
        let s = data.series_q(args.n, cache)?;
        let nk = vec!["n", "k", "coeff"];
        let nkj = vec!["n", "k", "j", "coeff"];
        return Ok(match args.what {
            What::Counts => (nk, poly_rows(&s.m1), tag),
            What::Blocks => (nk, poly_rows(&s.blocks).into_iter().filter(|r| r.0[0] > 0).collect(), tag),
            What::Correlator => (nk, poly_rows(&s.correlator()), tag),
            What::Mu => (nkj, poly2_rows(&s.m_u), tag),
            What::TwoPoint => (nkj, poly2_rows(&s.two_point()?), tag),
            What::OpenPath | What::Components => unreachable!(),
        });
    }
    let s = data.series(args.n, cache)?;
    let n = vec!["n", "coeff"];
    let nk = vec!["n", "k", "coeff"];
    Ok(match args.what {
        What::Counts => (n, scalar_rows(&s.m1, 0), tag),
        What::Blocks => (n, scalar_rows(&s.blocks, 1), tag),
        What::Correlator => (n, scalar_rows(&s.correlator(), 0), tag),
        What::Mu => (nk, poly_rows(&s.m_u), tag),
        What::TwoPoint => (nk, poly_rows(&s.two_point()?), tag),
        What::OpenPath => (nk, poly_rows(&s.open_path()?), tag),
        What::Components => unreachable!(),
    })
}

pub fn run(args: &CoeffsArgs, cache: &Cache) -> Result<(), CliError> {
    let (header, rows, tag) = table(args, cache)?;
    let text = match args.format {
        Format::Csv => {
            let mut csv = Csv::new(&header);
            for (idx, c) in &rows {
                let mut fields: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                fields.push(c.to_string());
                csv.row(&fields);
            }
            csv.into_string()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(idx, c)| {
                    let mut v: Vec<Value> = idx.iter().map(|&i| json!(i)).collect();
                    v.push(json!(c.to_string()));
                    Value::Array(v)
                })
                .collect();
            json_text(&json!({
                "command": "coeffs",
                "model": args.model.name(),
                "what": args.what.to_possible_value().map(|v| v.get_name().to_string()),
                "n": args.n,
                "source": tag,
                "columns": header,
                "rows": rows,
            }))
        }
    };
    emit(args.out.as_deref(), &text)
}
