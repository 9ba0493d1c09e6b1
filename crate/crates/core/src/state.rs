//! The immutable query context shared by every TDP query over one omics pair.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::association::{check_unique_ids, AssociationMatrix};
use crate::category::CategoryMatrix;
use crate::closed_testing::{categorize, category_cap, compute_h, Alpha, HommelConstant};
use crate::error::{Error, Result};

/// Version of the prepared-state layout written by the persistence layer.
pub const STATE_FORMAT_VERSION: u32 = 1;

/// α, h, the capped category matrix and identifier tables. Raw p-values are not
/// kept: every bound is a function of the categories alone.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    alpha: Alpha,
    h: HommelConstant,
    categories: CategoryMatrix,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    row_index: BTreeMap<String, usize>,
    col_index: BTreeMap<String, usize>,
    format_version: u32,
}

fn index_of(ids: &[String]) -> BTreeMap<String, usize> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect()
}

/// Computes `h` over all `p * q` p-values and categorizes every entry.
pub fn prepare(assoc: &AssociationMatrix, alpha: Alpha) -> Result<PreparedState> {
    let h = compute_h(assoc.pvalues(), alpha)?;
    let cap = category_cap(h.m());
    let categories = CategoryMatrix::from_iter_checked(
        assoc.rows(),
        assoc.cols(),
        cap,
        assoc
            .pvalues()
            .iter()
            .map(|&p| categorize(p, h, alpha, cap)),
    )?;
    PreparedState::from_parts(
        alpha,
        h,
        categories,
        assoc.row_ids().to_vec(),
        assoc.col_ids().to_vec(),
    )
}

impl PreparedState {
    /// Assembles a state from already categorized data, e.g. a loaded state file or
    /// a hand-written fixture.
    pub fn from_parts(
        alpha: Alpha,
        h: HommelConstant,
        categories: CategoryMatrix,
        row_ids: Vec<String>,
        col_ids: Vec<String>,
    ) -> Result<Self> {
        if row_ids.len() != categories.rows() || col_ids.len() != categories.cols() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} x {} identifiers for a {} x {} category matrix",
                row_ids.len(),
                col_ids.len(),
                categories.rows(),
                categories.cols()
            )));
        }
        let m = (categories.rows() as u64) * (categories.cols() as u64);
        if h.m() != m {
            return Err(Error::DimensionMismatch(alloc::format!(
                "Hommel constant computed over {} hypotheses, matrix has {m}",
                h.m()
            )));
        }
        check_unique_ids(&row_ids)?;
        check_unique_ids(&col_ids)?;
        Ok(PreparedState {
            alpha,
            h,
            row_index: index_of(&row_ids),
            col_index: index_of(&col_ids),
            categories,
            row_ids,
            col_ids,
            format_version: STATE_FORMAT_VERSION,
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn h(&self) -> HommelConstant {
        self.h
    }

    pub fn rows(&self) -> usize {
        self.categories.rows()
    }

    pub fn cols(&self) -> usize {
        self.categories.cols()
    }

    pub fn cap(&self) -> u32 {
        self.categories.cap()
    }

    pub fn categories(&self) -> &CategoryMatrix {
        &self.categories
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn row_position(&self, id: &str) -> Option<usize> {
        self.row_index.get(id).copied()
    }

    pub fn col_position(&self, id: &str) -> Option<usize> {
        self.col_index.get(id).copied()
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }
}
