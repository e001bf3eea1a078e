//! Coefficient files: `n value` or `n k value` per line, `#` comments.

use super::enumerate::{brute_force_counts, meander_component_counts};
use super::{closed_form_count, Family, ModelError};
use rug::Integer;
use std::collections::BTreeMap;
use std::path::Path;

/// Largest n checked against brute force when a file is loaded.
const OVERLAP_ARCH: usize = 10;
const OVERLAP_MEANDER: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientTable {
    /// `m_n` for n = 0, 1, ...
    Plain(Vec<Integer>),
    /// `m_{n,k}`, row n holding k = 0..=n.
    Resolved(Vec<Vec<Integer>>),
}

impl CoefficientTable {
    /// Largest n present.
    pub fn max_n(&self) -> usize {
        match self {
            CoefficientTable::Plain(v) => v.len() - 1,
            CoefficientTable::Resolved(v) => v.len() - 1,
        }
    }

    /// Totals over k for resolved tables.
    pub fn totals(&self) -> Vec<Integer> {
        match self {
            CoefficientTable::Plain(v) => v.clone(),
            CoefficientTable::Resolved(rows) => rows.iter().map(|r| r.iter().sum()).collect(),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse { line, msg: msg.into() }
}

/// Parses a table. A missing n = 0 row is filled in as the empty system.
pub fn parse_counts(text: &str) -> Result<CoefficientTable, ModelError> {
    let mut plain: Vec<(usize, usize, Integer)> = Vec::new();
    let mut resolved: BTreeMap<(usize, usize), (usize, Integer)> = BTreeMap::new();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !matches!(fields.len(), 2 | 3) {
            return Err(parse_err(line, format!("expected 2 or 3 fields, found {}", fields.len())));
        }
        if *width.get_or_insert(fields.len()) != fields.len() {
            return Err(parse_err(line, "mixed plain and component-resolved records"));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|_| parse_err(line, format!("bad index '{s}'")));
        let value = fields[fields.len() - 1]
            .parse::<Integer>()
            .map_err(|_| parse_err(line, format!("bad integer '{}'", fields[fields.len() - 1])))?;
        let n = index(fields[0])?;
        if fields.len() == 2 {
            if plain.last().is_some_and(|&(prev, _, _)| n <= prev) {
                return Err(parse_err(line, "n must be strictly increasing"));
            }
            plain.push((n, line, value));
        } else {
            let k = index(fields[1])?;
            if k > n {
                return Err(parse_err(line, format!("k = {k} exceeds n = {n}")));
            }
            if resolved.range((k, n)..(k + 1, 0)).next().is_some() {
                return Err(parse_err(line, "n must be strictly increasing within each k"));
            }
            resolved.insert((k, n), (line, value));
        }
    }
    match width {
        None => Err(ModelError::InsufficientData),
        Some(2) => {
            let mut out = Vec::with_capacity(plain.len() + 1);
            if plain[0].0 == 1 {
                out.push(Integer::from(1));
            }
            for (n, line, v) in plain {
                if n != out.len() {
                    return Err(parse_err(line, format!("row n = {} is missing", out.len())));
                }
                out.push(v);
            }
            Ok(CoefficientTable::Plain(out))
        }
        Some(_) => {
            let max_n = resolved.keys().map(|&(_, n)| n).max().unwrap_or(0);
            let mut rows: Vec<Vec<Integer>> = (0..=max_n).map(|n| vec![Integer::new(); n + 1]).collect();
            rows[0][0] = Integer::from(1);
            let mut seen = vec![false; max_n + 1];
            seen[0] = true;
            for ((k, n), (_, v)) in resolved {
                rows[n][k] = v;
                seen[n] = true;
            }
            if let Some(n) = seen.iter().position(|s| !s) {
                return Err(parse_err(0, format!("no records for n = {n}")));
            }
            Ok(CoefficientTable::Resolved(rows))
        }
    }
}

fn mismatch(n: usize, k: Option<usize>, expected: &Integer, found: &Integer) -> ModelError {
    ModelError::Mismatch { n, k, expected: expected.clone(), found: found.clone() }
}

/// Checks a table against brute force (closed form for quads) on the small-n overlap.
pub fn validate_counts(table: &CoefficientTable, family: Family) -> Result<(), ModelError> {
    let overlap = match family {
        Family::Meander | Family::MeanderQ => OVERLAP_MEANDER,
        _ => OVERLAP_ARCH,
    }
    .min(table.max_n());
    match (family, table) {
        (Family::MeanderQ | Family::Meander, CoefficientTable::Resolved(rows)) => {
            let bf = meander_component_counts(overlap)?;
            for n in 0..=overlap {
                for (k, (want, got)) in bf[n].iter().zip(&rows[n]).enumerate() {
                    if want != got {
                        return Err(mismatch(n, Some(k), want, got));
                    }
                }
            }
            Ok(())
        }
        (Family::MeanderQ, CoefficientTable::Plain(_)) => Err(parse_err(
            0,
            "meander-q needs component-resolved records `n k value`",
        )),
        (_, CoefficientTable::Resolved(_)) if family != Family::Meander => {
            Err(parse_err(0, format!("{family} takes plain records `n value`")))
        }
        (_, CoefficientTable::Plain(values)) => {
            let expected = if family == Family::Quad {
                (0..=overlap).map(|n| closed_form_count(family, n)).collect::<Result<Vec<_>, _>>()?
            } else {
                brute_force_counts(family, overlap)?
            };
            for (n, (want, got)) in expected.iter().zip(values).enumerate() {
                if want != got {
                    return Err(mismatch(n, None, want, got));
                }
            }
            Ok(())
        }
        _ => unreachable!(),
    }
}

/// Reads, parses and validates a coefficient file for `family`.
pub fn load_external_counts(path: impl AsRef<Path>, family: Family) -> Result<CoefficientTable, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    let table = parse_counts(&text)?;
    validate_counts(&table, family)?;
    Ok(table)
}
