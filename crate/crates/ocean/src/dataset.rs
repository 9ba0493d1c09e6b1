//! Delimited numeric matrices: omics datasets and precomputed p-value matrices.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use ocean_core::AssociationMatrix;

use crate::error::{Error, Result};

/// Field separator of a matrix file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Delimiter {
    #[default]
    Tsv,
    Csv,
}

impl Delimiter {
    pub fn byte(self) -> u8 {
        match self {
            Delimiter::Tsv => b'\t',
            Delimiter::Csv => b',',
        }
    }

    /// `.csv` files are comma separated; everything else is read as TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Delimiter::Csv,
            _ => Delimiter::Tsv,
        }
    }
}

/// Which axis of the file holds the features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// Header row lists features, first column lists samples.
    #[default]
    SamplesInRows,
    /// Header row lists samples, first column lists features.
    FeaturesInRows,
}

/// `n` samples by `features` values, stored sample-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    sample_ids: Vec<String>,
    feature_ids: Vec<String>,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(
        sample_ids: Vec<String>,
        feature_ids: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let (n, f) = (sample_ids.len(), feature_ids.len());
        if n < 3 {
            return Err(Error::Validation(format!(
                "at least 3 samples are required, got {n}"
            )));
        }
        if f == 0 {
            return Err(Error::Validation("dataset has no features".into()));
        }
        if values.len() != n * f {
            return Err(Error::Validation(format!(
                "{n} samples x {f} features needs {} values, got {}",
                n * f,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value for sample {:?}, feature {:?}",
                sample_ids[i / f],
                feature_ids[i % f]
            )));
        }
        unique(&sample_ids, "sample")?;
        unique(&feature_ids, "feature")?;
        Ok(Dataset {
            sample_ids,
            feature_ids,
            values,
        })
    }

    pub fn samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn features(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn get(&self, sample: usize, feature: usize) -> f64 {
        self.values[sample * self.features() + feature]
    }

    /// All values of one feature across samples.
    pub fn feature(&self, feature: usize) -> Vec<f64> {
        (0..self.samples()).map(|i| self.get(i, feature)).collect()
    }

    /// The same data with samples in `order` (indices into the current samples).
    pub fn reorder_samples(&self, order: &[usize]) -> Dataset {
        let f = self.features();
        let mut values = Vec::with_capacity(self.values.len());
        for &i in order {
            values.extend_from_slice(&self.values[i * f..(i + 1) * f]);
        }
        Dataset {
            sample_ids: order.iter().map(|&i| self.sample_ids[i].clone()).collect(),
            feature_ids: self.feature_ids.clone(),
            values,
        }
    }
}

fn unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate {what} identifier {id:?}"
            )));
        }
    }
    Ok(())
}

/// A parsed labelled grid: header labels, row labels and row-major values.
struct Grid {
    col_labels: Vec<String>,
    row_labels: Vec<String>,
    values: Vec<f64>,
}

fn read_grid(reader: impl Read, delimiter: Delimiter, source_name: &str) -> Result<Grid> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter.byte())
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let parse_err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, "file is empty".into())),
    };
    let col_labels: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if col_labels.is_empty() {
        return Err(parse_err(1, "header has no data columns".into()));
    }
    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != col_labels.len() + 1 {
            return Err(parse_err(
                line,
                format!(
                    "expected {} fields, found {}",
                    col_labels.len() + 1,
                    rec.len()
                ),
            ));
        }
        let label = rec[0].trim().to_string();
        for (k, cell) in rec.iter().skip(1).enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    parse_err(
                        line,
                        format!(
                            "row {label:?}, column {:?}: not a number: {cell:?}",
                            col_labels[k]
                        ),
                    )
                })?;
            values.push(v);
        }
        row_labels.push(label);
    }
    Ok(Grid {
        col_labels,
        row_labels,
        values,
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Parses an omics dataset from delimited text.
pub fn parse_matrix_from(
    reader: impl Read,
    delimiter: Delimiter,
    orientation: Orientation,
    source_name: &str,
) -> Result<Dataset> {
    let grid = read_grid(reader, delimiter, source_name)?;
    match orientation {
        Orientation::SamplesInRows => Dataset::new(grid.row_labels, grid.col_labels, grid.values),
        Orientation::FeaturesInRows => {
            let (f, n) = (grid.row_labels.len(), grid.col_labels.len());
            let mut values = Vec::with_capacity(grid.values.len());
            for i in 0..n {
                for j in 0..f {
                    values.push(grid.values[j * n + i]);
                }
            }
            Dataset::new(grid.col_labels, grid.row_labels, values)
        }
    }
}

pub fn parse_matrix(
    path: &Path,
    delimiter: Delimiter,
    orientation: Orientation,
) -> Result<Dataset> {
    parse_matrix_from(
        open(path)?,
        delimiter,
        orientation,
        &path.display().to_string(),
    )
}

/// Writes a dataset with samples in rows, the layout [`parse_matrix`] reads by default.
pub fn write_matrix(
    dataset: &Dataset,
    mut out: impl Write,
    delimiter: Delimiter,
) -> std::io::Result<()> {
    let sep = delimiter.byte() as char;
    write!(out, "sample")?;
    for id in dataset.feature_ids() {
        write!(out, "{sep}{id}")?;
    }
    writeln!(out)?;
    for (i, sample) in dataset.sample_ids().iter().enumerate() {
        write!(out, "{sample}")?;
        for j in 0..dataset.features() {
            write!(out, "{sep}{}", dataset.get(i, j))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parses a precomputed p-value matrix: header of column feature ids, first column
/// of row feature ids.
pub fn parse_pvalue_matrix_from(
    reader: impl Read,
    delimiter: Delimiter,
    source_name: &str,
) -> Result<AssociationMatrix> {
    let grid = read_grid(reader, delimiter, source_name)?;
    if let Some(i) = grid.values.iter().position(|p| !(0.0..=1.0).contains(p)) {
        let q = grid.col_labels.len();
        return Err(Error::Validation(format!(
            "{source_name}: p-value {} for row {:?}, column {:?} is outside [0, 1]",
            grid.values[i],
            grid.row_labels[i / q],
            grid.col_labels[i % q]
        )));
    }
    Ok(AssociationMatrix::new(
        grid.row_labels,
        grid.col_labels,
        grid.values,
    )?)
}

pub fn parse_pvalue_matrix(path: &Path, delimiter: Delimiter) -> Result<AssociationMatrix> {
    parse_pvalue_matrix_from(open(path)?, delimiter, &path.display().to_string())
}

pub fn write_pvalue_matrix(
    matrix: &AssociationMatrix,
    mut out: impl Write,
    delimiter: Delimiter,
) -> std::io::Result<()> {
    let sep = delimiter.byte() as char;
    write!(out, "feature")?;
    for id in matrix.col_ids() {
        write!(out, "{sep}{id}")?;
    }
    writeln!(out)?;
    for (j, id) in matrix.row_ids().iter().enumerate() {
        write!(out, "{id}")?;
        for k in 0..matrix.cols() {
            write!(out, "{sep}{}", matrix.get(j, k))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "sample\tg1\tg2\ns1\t1.0\t2.5\ns2\t3\t-4\ns3\t0.5\t1e-3\n";

    #[test]
    fn parses_well_formed_file() {
        let d = parse_matrix_from(
            SMALL.as_bytes(),
            Delimiter::Tsv,
            Orientation::SamplesInRows,
            "x",
        )
        .unwrap();
        assert_eq!(d.samples(), 3);
        assert_eq!(d.feature_ids(), &["g1", "g2"]);
        assert_eq!(d.get(1, 1), -4.0);
    }

    #[test]
    fn transposed_file_with_flag_gives_same_dataset() {
        let t = "feature\ts1\ts2\ts3\ng1\t1.0\t3\t0.5\ng2\t2.5\t-4\t1e-3\n";
        let a = parse_matrix_from(
            SMALL.as_bytes(),
            Delimiter::Tsv,
            Orientation::SamplesInRows,
            "x",
        )
        .unwrap();
        let b = parse_matrix_from(
            t.as_bytes(),
            Delimiter::Tsv,
            Orientation::FeaturesInRows,
            "y",
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn na_cell_names_row_and_column() {
        let bad = "sample,g1,g2\ns1,1,2\ns2,NA,3\ns3,1,1\n";
        let err = parse_matrix_from(
            bad.as_bytes(),
            Delimiter::Csv,
            Orientation::SamplesInRows,
            "bad.csv",
        )
        .unwrap_err()
        .to_string();
        assert!(
            err.contains("line 3") && err.contains("\"s2\"") && err.contains("\"g1\""),
            "{err}"
        );
    }

    #[test]
    fn ragged_and_duplicate_rejected() {
        let ragged = "sample\ta\tb\ns1\t1\n";
        assert!(parse_matrix_from(
            ragged.as_bytes(),
            Delimiter::Tsv,
            Orientation::SamplesInRows,
            "r"
        )
        .is_err());
        let dup = "sample\ta\ta\ns1\t1\t2\ns2\t1\t2\ns3\t1\t2\n";
        let err = parse_matrix_from(
            dup.as_bytes(),
            Delimiter::Tsv,
            Orientation::SamplesInRows,
            "d",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate feature"));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let d = parse_matrix_from(
            SMALL.as_bytes(),
            Delimiter::Tsv,
            Orientation::SamplesInRows,
            "x",
        )
        .unwrap();
        let mut buf = Vec::new();
        write_matrix(&d, &mut buf, Delimiter::Csv).unwrap();
        let back = parse_matrix_from(
            buf.as_slice(),
            Delimiter::Csv,
            Orientation::SamplesInRows,
            "buf",
        )
        .unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn pvalue_matrix_range_checked() {
        let ok = "f\tc1\tc2\nr1\t0.5\t1\nr2\t0\t0.01\n";
        let m = parse_pvalue_matrix_from(ok.as_bytes(), Delimiter::Tsv, "ok").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        let bad = "f\tc1\nr1\t1.5\n";
        let err = parse_pvalue_matrix_from(bad.as_bytes(), Delimiter::Tsv, "bad").unwrap_err();
        assert!(err.to_string().contains("outside [0, 1]"));
    }
}
