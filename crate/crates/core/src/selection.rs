use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::PreparedState;

/// A two-way feature set `S_A x S_B`: distinct row indices and distinct column
/// indices into the association matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoWaySelection {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn check_axis(axis: &'static str, idx: &[usize], len: usize) -> Result<()> {
    if idx.is_empty() {
        return Err(Error::Empty(axis));
    }
    let mut seen = vec![false; len];
    for &i in idx {
        if i >= len {
            return Err(Error::IndexOutOfBounds {
                axis,
                index: i,
                len,
            });
        }
        if core::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex { axis, index: i });
        }
    }
    Ok(())
}

impl TwoWaySelection {
    /// Validates against a `n_rows x n_cols` matrix.
    pub fn new(rows: Vec<usize>, cols: Vec<usize>, n_rows: usize, n_cols: usize) -> Result<Self> {
        check_axis("row", &rows, n_rows)?;
        check_axis("column", &cols, n_cols)?;
        Ok(TwoWaySelection { rows, cols })
    }

    pub fn for_state(state: &PreparedState, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        Self::new(rows, cols, state.rows(), state.cols())
    }

    /// The whole matrix.
    pub fn full(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new((0..n_rows).collect(), (0..n_cols).collect(), n_rows, n_cols)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    /// Number of cells `|S_A| * |S_B|`.
    pub fn size(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn transposed(&self) -> TwoWaySelection {
        TwoWaySelection {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_out_of_bounds_and_duplicates() {
        assert!(matches!(
            TwoWaySelection::new(vec![], vec![0], 2, 2),
            Err(Error::Empty("row"))
        ));
        assert!(matches!(
            TwoWaySelection::new(vec![0], vec![2], 2, 2),
            Err(Error::IndexOutOfBounds {
                axis: "column",
                index: 2,
                len: 2
            })
        ));
        assert!(matches!(
            TwoWaySelection::new(vec![1, 1], vec![0], 2, 2),
            Err(Error::DuplicateIndex {
                axis: "row",
                index: 1
            })
        ));
        let s = TwoWaySelection::new(vec![1, 0], vec![1], 2, 2).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.transposed().rows(), &[1]);
    }
}
