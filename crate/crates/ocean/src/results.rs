//! TDP result tables: one row per two-way feature set, as TSV or JSON lines.

use std::io::{BufRead, BufReader, Read, Write};

use ocean_core::{query, BranchOptions, PreparedState, Proportion, TdpReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmt::FeatureSetCollection;
use crate::resolve::{resolve_axis, ResolvedAxis, SetSpec};

pub const TSV_HEADER: [&str; 12] = [
    "row_set",
    "col_set",
    "n_rows",
    "n_cols",
    "pair_tdp",
    "row_tdp_lower",
    "row_tdp_upper",
    "col_tdp_lower",
    "col_tdp_upper",
    "row_exact",
    "col_exact",
    "iterations",
];

/// Output encoding of a result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

/// An exact ratio, written as `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn value(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl From<Proportion> for Ratio {
    fn from(p: Proportion) -> Self {
        Ratio {
            num: p.num,
            den: p.den,
        }
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        format!("{}/{}", r.num, r.den)
    }
}

impl TryFrom<String> for Ratio {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl std::str::FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| format!("expected num/den, got {s:?}"))?;
        let num = a
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let den = b
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if num > den {
            return Err(format!("{s:?} exceeds 1"));
        }
        Ok(Ratio { num, den })
    }
}

/// One two-way feature set and its three TDP bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub row_set: String,
    pub col_set: String,
    pub n_rows: u64,
    pub n_cols: u64,
    pub pair_tdp: Ratio,
    pub row_tdp_lower: Ratio,
    pub row_tdp_upper: Ratio,
    pub col_tdp_lower: Ratio,
    pub col_tdp_upper: Ratio,
    pub row_exact: bool,
    pub col_exact: bool,
    /// Branch-and-bound iterations spent on the row and column brackets together.
    pub iterations: u64,
}

/// Which TDP a heatmap shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Metric {
    Pair,
    Row,
    Col,
}

impl ResultRow {
    pub fn from_report(row_set: &str, col_set: &str, report: &TdpReport) -> Self {
        ResultRow {
            row_set: row_set.to_string(),
            col_set: col_set.to_string(),
            n_rows: report.row.rows as u64,
            n_cols: report.col.rows as u64,
            pair_tdp: report.pair_tdp().into(),
            row_tdp_lower: report.row_tdp_lower().into(),
            row_tdp_upper: report.row_tdp_upper().into(),
            col_tdp_lower: report.col_tdp_lower().into(),
            col_tdp_upper: report.col_tdp_upper().into(),
            row_exact: report.row.exact,
            col_exact: report.col.exact,
            iterations: report.row.iterations + report.col.iterations,
        }
    }

    /// The lower bound shown for `metric`.
    pub fn metric(&self, metric: Metric) -> Ratio {
        match metric {
            Metric::Pair => self.pair_tdp,
            Metric::Row => self.row_tdp_lower,
            Metric::Col => self.col_tdp_lower,
        }
    }

    fn tsv_fields(&self) -> [String; 12] {
        [
            self.row_set.clone(),
            self.col_set.clone(),
            self.n_rows.to_string(),
            self.n_cols.to_string(),
            self.pair_tdp.into(),
            self.row_tdp_lower.into(),
            self.row_tdp_upper.into(),
            self.col_tdp_lower.into(),
            self.col_tdp_upper.into(),
            self.row_exact.to_string(),
            self.col_exact.to_string(),
            self.iterations.to_string(),
        ]
    }
}

/// Streams rows in either format. TSV writes the header before the first row.
pub struct ResultWriter<W: Write> {
    out: W,
    format: Format,
    header_written: bool,
}

impl<W: Write> ResultWriter<W> {
    pub fn new(out: W, format: Format) -> Self {
        ResultWriter {
            out,
            format,
            header_written: false,
        }
    }

    pub fn header(&mut self) -> Result<()> {
        if self.format == Format::Tsv && !self.header_written {
            writeln!(self.out, "{}", TSV_HEADER.join("\t")).map_err(write_err)?;
        }
        self.header_written = true;
        Ok(())
    }

    pub fn write(&mut self, row: &ResultRow) -> Result<()> {
        self.header()?;
        match self.format {
            Format::Tsv => {
                writeln!(self.out, "{}", row.tsv_fields().join("\t")).map_err(write_err)?
            }
            Format::Json => {
                serde_json::to_writer(&mut self.out, row)?;
                writeln!(self.out).map_err(write_err)?;
            }
        }
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(write_err)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

fn write_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

/// Reads a table written by [`ResultWriter`], detecting the format from the first
/// non-blank character.
pub fn read_results(reader: impl Read, source_name: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    let mut format = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse {
            source_name: source_name.into(),
            line: line_no,
            message,
        };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fmt = *format.get_or_insert(if line.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Tsv
        });
        match fmt {
            Format::Json => rows.push(serde_json::from_str(&line).map_err(|e| err(e.to_string()))?),
            Format::Tsv => {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields == TSV_HEADER {
                    continue;
                }
                if fields.len() != TSV_HEADER.len() {
                    return Err(err(format!(
                        "expected {} fields, found {}",
                        TSV_HEADER.len(),
                        fields.len()
                    )));
                }
                let num = |k: usize| {
                    fields[k]
                        .parse::<u64>()
                        .map_err(|_| err(format!("{}: bad integer {:?}", TSV_HEADER[k], fields[k])))
                };
                let ratio = |k: usize| {
                    fields[k]
                        .parse::<Ratio>()
                        .map_err(|e| err(format!("{}: {e}", TSV_HEADER[k])))
                };
                let flag = |k: usize| {
                    fields[k]
                        .parse::<bool>()
                        .map_err(|_| err(format!("{}: bad boolean {:?}", TSV_HEADER[k], fields[k])))
                };
                rows.push(ResultRow {
                    row_set: fields[0].to_string(),
                    col_set: fields[1].to_string(),
                    n_rows: num(2)?,
                    n_cols: num(3)?,
                    pair_tdp: ratio(4)?,
                    row_tdp_lower: ratio(5)?,
                    row_tdp_upper: ratio(6)?,
                    col_tdp_lower: ratio(7)?,
                    col_tdp_upper: ratio(8)?,
                    row_exact: flag(9)?,
                    col_exact: flag(10)?,
                    iterations: num(11)?,
                });
            }
        }
    }
    Ok(rows)
}

/// A two-way set request: explicit specs for each side, or `None` for every set in
/// the corresponding collection.
#[derive(Debug, Clone, Default)]
pub struct ScanRequest<'a> {
    pub row_set: Option<SetSpec>,
    pub col_set: Option<SetSpec>,
    pub row_sets: Option<&'a FeatureSetCollection>,
    pub col_sets: Option<&'a FeatureSetCollection>,
}

fn resolve_side(
    spec: &Option<SetSpec>,
    collection: Option<&FeatureSetCollection>,
    axis: &str,
    position: impl Fn(&str) -> Option<usize> + Copy,
) -> Result<Vec<ResolvedAxis>> {
    match spec {
        Some(spec) => Ok(vec![resolve_axis(spec, collection, position)?]),
        None => {
            let c = collection
                .filter(|c| !c.is_empty())
                .ok_or_else(|| Error::Validation(format!("no {axis} sets given")))?;
            c.names()
                .map(|name| resolve_axis(&SetSpec::Named(name.to_string()), Some(c), position))
                .collect()
        }
    }
}

/// Number of pairs evaluated in parallel before their rows are written.
const SCAN_CHUNK: usize = 256;

/// Evaluates every requested pair, lexicographically by (row set, column set), and
/// streams rows to `out` in that order as each chunk completes. Returns the number
/// of rows written.
pub fn scan<W: Write>(
    state: &PreparedState,
    request: &ScanRequest<'_>,
    options: &BranchOptions,
    out: &mut ResultWriter<W>,
) -> Result<u64> {
    let rows = resolve_side(&request.row_set, request.row_sets, "row", |id| {
        state.row_position(id)
    })?;
    let cols = resolve_side(&request.col_set, request.col_sets, "column", |id| {
        state.col_position(id)
    })?;
    let pairs: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|i| (0..cols.len()).map(move |k| (i, k)))
        .collect();
    out.header()?;
    let mut written = 0;
    for chunk in pairs.chunks(SCAN_CHUNK) {
        let results: Vec<Result<ResultRow>> = chunk
            .par_iter()
            .map(|&(i, k)| {
                let (r, c) = (&rows[i], &cols[k]);
                let sel = ocean_core::TwoWaySelection::for_state(
                    state,
                    r.indices.clone(),
                    c.indices.clone(),
                )?;
                let report = query(state, &sel, options)?;
                Ok(ResultRow::from_report(&r.name, &c.name, &report))
            })
            .collect();
        for row in results {
            out.write(&row?)?;
            written += 1;
        }
        out.flush()?;
    }
    Ok(written)
}
