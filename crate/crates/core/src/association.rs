use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::closed_testing::validate_pvalues;
use crate::error::{Error, Result};

/// A `p x q` matrix of pairwise association p-values with feature identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    rows: usize,
    cols: usize,
    pvalues: Vec<f64>,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
}

pub(crate) fn check_unique_ids(ids: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

impl AssociationMatrix {
    /// `pvalues` is row-major with `row_ids.len()` rows and `col_ids.len()` columns.
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, pvalues: Vec<f64>) -> Result<Self> {
        let rows = row_ids.len();
        let cols = col_ids.len();
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("association matrix"));
        }
        if pvalues.len() != rows * cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{rows} x {cols} matrix needs {} p-values, got {}",
                rows * cols,
                pvalues.len()
            )));
        }
        validate_pvalues(&pvalues)?;
        check_unique_ids(&row_ids)?;
        check_unique_ids(&col_ids)?;
        Ok(AssociationMatrix {
            rows,
            cols,
            pvalues,
            row_ids,
            col_ids,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pvalues(&self) -> &[f64] {
        &self.pvalues
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pvalues[row * self.cols + col]
    }

    pub fn transpose(&self) -> AssociationMatrix {
        let mut t = Vec::with_capacity(self.pvalues.len());
        for k in 0..self.cols {
            for j in 0..self.rows {
                t.push(self.get(j, k));
            }
        }
        AssociationMatrix {
            rows: self.cols,
            cols: self.rows,
            pvalues: t,
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn validates_shape_range_and_ids() {
        assert!(AssociationMatrix::new(ids(&["a"]), ids(&["x", "y"]), vec![0.1]).is_err());
        assert!(matches!(
            AssociationMatrix::new(ids(&["a"]), ids(&["x"]), vec![1.5]),
            Err(Error::InvalidPValue { .. })
        ));
        assert!(matches!(
            AssociationMatrix::new(ids(&["a", "a"]), ids(&["x"]), vec![0.1, 0.2]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn transpose_swaps_axes() {
        let m = AssociationMatrix::new(
            ids(&["a", "b"]),
            ids(&["x", "y", "z"]),
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        )
        .unwrap();
        let t = m.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.get(2, 1), 0.6);
        assert_eq!(t.row_ids()[0], "x");
        assert_eq!(t.transpose(), m);
    }
}
