//! Count tables for a model, through the cache where they come from brute force.

use crate::cache::Cache;
use crate::error::{usage, CliError};
use blockmap::models::{load_external_counts, CoefficientTable, CountSource, Family, ModelSpec};
use blockmap::pipeline::{m1_series, m1_series_q, ModelSeries};
use blockmap::rug::Integer;
use blockmap::{IntPoly, Poly, TruncatedSeries};
use clap::ValueEnum;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    ClosedForm,
    BruteForce,
    ExternalFile,
}

impl From<SourceArg> for CountSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::ClosedForm => CountSource::ClosedForm,
            SourceArg::BruteForce => CountSource::BruteForce,
            SourceArg::ExternalFile => CountSource::ExternalFile,
        }
    }
}

pub struct ModelData {
    pub spec: ModelSpec,
    pub table: Option<CoefficientTable>,
}

impl ModelData {
    pub fn resolve(family: Family, source: Option<SourceArg>, file: Option<&Path>) -> Result<Self, CliError> {
        let count_source = match (source.map(CountSource::from), file) {
            (None, Some(_)) | (Some(CountSource::ExternalFile), Some(_)) => CountSource::ExternalFile,
            (Some(CountSource::ExternalFile), None) => return Err(usage("--source external-file needs --file")),
            (Some(_), Some(_)) => return Err(usage("--file is only used with --source external-file")),
            (Some(s), None) => s,
            (None, None) => ModelSpec::default_for(family).count_source,
        };
        if family == Family::MeanderQ && count_source == CountSource::ClosedForm {
            return Err(usage("meander-q has no closed form; use brute force or an external file"));
        }
        let table = match file {
            Some(path) => Some(load_external_counts(path, family)?),
            None => None,
        };
        Ok(ModelData { spec: ModelSpec { family, count_source }, table })
    }

    pub fn source_tag(&self) -> &'static str {
        self.spec.count_source.tag()
    }

    /// Largest order the data supports, if bounded.
    pub fn max_order(&self) -> Option<usize> {
        match self.spec.count_source {
            CountSource::ClosedForm => None,
            CountSource::BruteForce => self.spec.family.enumeration_cap(),
            CountSource::ExternalFile => self.table.as_ref().map(|t| t.max_n()),
        }
    }

    pub fn check_order(&self, n: usize) -> Result<(), CliError> {
        match self.max_order() {
            Some(cap) if n > cap => Err(usage(format!(
                "N = {n} exceeds what {} data supports for {} (at most {cap})",
                self.source_tag(),
                self.spec.family
            ))),
            _ => Ok(()),
        }
    }

    pub fn m1(&self, order: usize, cache: &Cache) -> Result<TruncatedSeries<Integer>, CliError> {
        self.check_order(order)?;
        if self.spec.count_source != CountSource::BruteForce {
            return Ok(m1_series(self.spec, order, self.table.as_ref())?);
        }
        let family = if self.spec.family == Family::OpenPath { Family::Cubic } else { self.spec.family };
        let key = format!("m1 model={family} N={order} ring=integer source=brute-force");
        let payload = cache.get_or_compute(&key, || -> Result<String, CliError> {
            let s = m1_series(self.spec, order, None)?;
            Ok(s.coeffs().iter().enumerate().map(|(n, c)| format!("{n} {c}\n")).collect())
        })?;
        let mut coeffs = Vec::with_capacity(order + 1);
        for (n, line) in payload.lines().enumerate() {
            match line.split_once(' ') {
                Some((i, v)) if i.parse() == Ok(n) => coeffs.push(parse_int(v, &key)?),
                _ => return Err(corrupt(&key)),
            }
        }
        if coeffs.len() != order + 1 {
            return Err(corrupt(&key));
        }
        Ok(TruncatedSeries::from_coeffs(coeffs))
    }

    /// Component-resolved counts, as polynomials in q.
    pub fn m1_q(&self, order: usize, cache: &Cache) -> Result<TruncatedSeries<IntPoly>, CliError> {
        self.check_order(order)?;
        if self.spec.count_source != CountSource::BruteForce {
            return Ok(m1_series_q(order, self.table.as_ref())?);
        }
        let key = format!("m1 model=meander-q N={order} ring=integer[q] source=brute-force");
        let payload = cache.get_or_compute(&key, || -> Result<String, CliError> {
            let s = m1_series_q(order, None)?;
            let mut text = String::new();
            for (n, p) in s.coeffs().iter().enumerate() {
                for k in 0..=n {
                    text.push_str(&format!("{n} {k} {}\n", p.coeff(k)));
                }
            }
            Ok(text)
        })?;
        let mut rows: Vec<Vec<Integer>> = vec![Vec::new(); order + 1];
        for line in payload.lines() {
            let f: Vec<&str> = line.split(' ').collect();
            let (Some(n), Some(k)) = (f.first().and_then(|s| s.parse::<usize>().ok()), f.get(1).and_then(|s| s.parse::<usize>().ok())) else {
                return Err(corrupt(&key));
            };
            if f.len() != 3 || n > order || k != rows[n].len() {
                return Err(corrupt(&key));
            }
            rows[n].push(parse_int(f[2], &key)?);
        }
        if rows.iter().enumerate().any(|(n, r)| r.len() != n + 1) {
            return Err(corrupt(&key));
        }
        Ok(TruncatedSeries::from_coeffs(rows.into_iter().map(Poly::new).collect()))
    }

    pub fn series(&self, order: usize, cache: &Cache) -> Result<ModelSeries<Integer>, CliError> {
        Ok(ModelSeries::from_m1(self.m1(order, cache)?)?)
    }

    pub fn series_q(&self, order: usize, cache: &Cache) -> Result<ModelSeries<IntPoly>, CliError> {
        Ok(ModelSeries::from_m1(self.m1_q(order, cache)?)?)
    }
}

fn parse_int(s: &str, key: &str) -> Result<Integer, CliError> {
    s.parse::<Integer>().map_err(|_| corrupt(key))
}

fn corrupt(key: &str) -> CliError {
    CliError::Validation(format!("cache entry for `{key}` passed its checksum but does not parse"))
}
