//! Cumulative category tables and the single-step shortcut that brackets the
//! row-level discovery bound.
//!
//! For a selection `S_A x S_B`, row `j` of the table holds `c_jk`, the number of
//! categories `<= k` in that row. A union of rows `J` is Simes-positive iff the
//! summed row `c_Jk` reaches `k` somewhere. The row bound
//! `d_r = |S_A| - max{ |J| : J not positive }` is bracketed from below by summing
//! column-wise minima (`w`) and from above by summing rows in a concrete order (`v`).
//!
//! Columns need not be every integer `k`: `c_Jk` only changes where some category
//! equals `k`, so checking at the distinct category values is enough, and values
//! `g` with fewer than `g` categories `<= g` in the whole selection can never fire.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::selection::TwoWaySelection;
use crate::state::PreparedState;

/// The categories of one selection, row-major, `rows x cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionBlock {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl SelectionBlock {
    pub fn new(rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("selection"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{rows} x {cols} block needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|&g| g == 0) {
            return Err(Error::InvalidCategory {
                index,
                value: 0,
                cap: u32::MAX,
            });
        }
        Ok(SelectionBlock { rows, cols, data })
    }

    /// Extracts `S_A x S_B` with rows of the block being rows of the matrix.
    pub fn from_state(state: &PreparedState, sel: &TwoWaySelection) -> Self {
        let cats = state.categories();
        let mut data = Vec::with_capacity(sel.size());
        for &j in sel.rows() {
            for &k in sel.cols() {
                data.push(cats.get(j, k));
            }
        }
        SelectionBlock {
            rows: sel.rows().len(),
            cols: sel.cols().len(),
            data,
        }
    }

    /// Extracts `S_A x S_B` transposed, so rows of the block are the columns `S_B`.
    pub fn from_state_transposed(state: &PreparedState, sel: &TwoWaySelection) -> Self {
        let cats = state.categories();
        let mut data = Vec::with_capacity(sel.size());
        for &k in sel.cols() {
            for &j in sel.rows() {
                data.push(cats.get(j, k));
            }
        }
        SelectionBlock {
            rows: sel.cols().len(),
            cols: sel.rows().len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, j: usize) -> &[u32] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn transpose(&self) -> SelectionBlock {
        let mut data = Vec::with_capacity(self.data.len());
        for k in 0..self.cols {
            for j in 0..self.rows {
                data.push(self.data[j * self.cols + k]);
            }
        }
        SelectionBlock {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Table width `min(|S|, max category)`.
    pub fn full_width(&self) -> u32 {
        let max = self.data.iter().copied().max().unwrap_or(0) as u64;
        max.min(self.data.len() as u64) as u32
    }

    /// Distinct category values `g` with at least `g` categories `<= g` in the block.
    pub fn relevant_thresholds(&self) -> Vec<u32> {
        let limit = self.data.len() as u64;
        let mut small: Vec<u32> = self
            .data
            .iter()
            .copied()
            .filter(|&g| (g as u64) <= limit)
            .collect();
        small.sort_unstable();
        let mut out = Vec::new();
        let mut i = 0;
        while i < small.len() {
            let g = small[i];
            let mut end = i + 1;
            while end < small.len() && small[end] == g {
                end += 1;
            }
            if end as u64 >= g as u64 {
                out.push(g);
            }
            i = end;
        }
        out
    }
}

/// Strength of a row's own evidence: `min_k g_(k) / k` over its sorted categories.
/// Smaller is stronger; `<= 1` means the row alone is Simes-positive.
#[derive(Debug, Clone, Copy)]
pub struct RowScore {
    pub num: u64,
    pub den: u64,
}

impl RowScore {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for RowScore {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for RowScore {}

impl PartialOrd for RowScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RowScore {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * (other.den as u128)).cmp(&((other.num as u128) * (self.den as u128)))
    }
}

/// Score of a row given its categories over `S_B`.
pub fn row_score(categories: &[u32]) -> RowScore {
    assert!(!categories.is_empty(), "row score of an empty row");
    let mut sorted = categories.to_vec();
    sorted.sort_unstable();
    let mut best = RowScore {
        num: sorted[0] as u64,
        den: 1,
    };
    for (k, &g) in sorted.iter().enumerate().skip(1) {
        let s = RowScore {
            num: g as u64,
            den: k as u64 + 1,
        };
        if s < best {
            best = s;
        }
    }
    best
}

/// Score of matrix row `row` restricted to the columns `cols`.
pub fn row_score_in(state: &PreparedState, row: usize, cols: &[usize]) -> RowScore {
    let cats = state.categories();
    let values: Vec<u32> = cols.iter().map(|&k| cats.get(row, k)).collect();
    row_score(&values)
}

/// Row positions by descending score (weakest evidence first), ties by position.
pub fn weakest_first_order(scores: &[RowScore]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Row positions by ascending score (strongest evidence first), ties by position.
pub fn strongest_first_order(scores: &[RowScore]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// Counts of categories `<= t` for each threshold `t` (ascending) in one row.
pub(crate) fn row_counts(row: &[u32], thresholds: &[u32], out: &mut [u32]) {
    let mut sorted = row.to_vec();
    sorted.sort_unstable();
    let mut i = 0;
    for (slot, &t) in out.iter_mut().zip(thresholds) {
        while i < sorted.len() && sorted[i] <= t {
            i += 1;
        }
        *slot = i as u32;
    }
}

/// Per-row cumulative category counts for one (sub)problem of a selection.
///
/// Rows are the free rows of the subproblem; rows forced into every candidate
/// subset are folded into `forced_offset`, added to every cumulative sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulativeCategoryTable {
    thresholds: Vec<u32>,
    counts: Vec<u32>,
    labels: Vec<usize>,
    forced_offset: Vec<u64>,
    forced_rows: usize,
    selection_rows: usize,
}

impl CumulativeCategoryTable {
    /// Table with one column per `k = 1..=min(|S|, max category)`.
    pub fn full(block: &SelectionBlock) -> Self {
        let thresholds: Vec<u32> = (1..=block.full_width()).collect();
        Self::with_thresholds(block, thresholds)
    }

    /// Table restricted to the columns where some row union can become positive.
    /// Gives the same bounds as [`CumulativeCategoryTable::full`].
    pub fn compact(block: &SelectionBlock) -> Self {
        Self::with_thresholds(block, block.relevant_thresholds())
    }

    fn with_thresholds(block: &SelectionBlock, thresholds: Vec<u32>) -> Self {
        let width = thresholds.len();
        let mut counts = vec![0u32; block.rows() * width];
        if width > 0 {
            for j in 0..block.rows() {
                row_counts(
                    block.row(j),
                    &thresholds,
                    &mut counts[j * width..(j + 1) * width],
                );
            }
        }
        CumulativeCategoryTable {
            forced_offset: vec![0; width],
            thresholds,
            counts,
            labels: (0..block.rows()).collect(),
            forced_rows: 0,
            selection_rows: block.rows(),
        }
    }

    /// The subproblem where rows `forced` are in every subset and `removed` in none.
    /// Positions refer to rows of the original selection.
    pub fn restrict(&self, forced: &[usize], removed: &[usize]) -> Result<Self> {
        let width = self.width();
        let mut state = vec![0u8; self.selection_rows];
        for &j in forced {
            self.check_label(j)?;
            state[j] = 1;
        }
        for &j in removed {
            self.check_label(j)?;
            if state[j] == 1 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "row {j} is both forced and removed"
                )));
            }
            state[j] = 2;
        }
        let mut out = CumulativeCategoryTable {
            thresholds: self.thresholds.clone(),
            counts: Vec::new(),
            labels: Vec::new(),
            forced_offset: self.forced_offset.clone(),
            forced_rows: self.forced_rows,
            selection_rows: self.selection_rows,
        };
        for (pos, &label) in self.labels.iter().enumerate() {
            let row = &self.counts[pos * width..(pos + 1) * width];
            match state[label] {
                0 => {
                    out.labels.push(label);
                    out.counts.extend_from_slice(row);
                }
                1 => {
                    out.forced_rows += 1;
                    for (o, &c) in out.forced_offset.iter_mut().zip(row) {
                        *o += c as u64;
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn check_label(&self, j: usize) -> Result<()> {
        if self.labels.contains(&j) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "row {j} is not free in this table"
            )))
        }
    }

    /// Number of free rows.
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    /// Number of columns.
    pub fn width(&self) -> usize {
        self.thresholds.len()
    }

    /// The `k` value of every column.
    pub fn thresholds(&self) -> &[u32] {
        &self.thresholds
    }

    /// Selection positions of the free rows, in table order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, pos: usize) -> &[u32] {
        let w = self.width();
        &self.counts[pos * w..(pos + 1) * w]
    }

    pub fn forced_offset(&self) -> &[u64] {
        &self.forced_offset
    }

    pub fn forced_rows(&self) -> usize {
        self.forced_rows
    }

    pub fn selection_rows(&self) -> usize {
        self.selection_rows
    }

    /// True when the forced rows alone are already Simes-positive, so the
    /// subproblem holds no candidate subset.
    pub fn forced_positive(&self) -> bool {
        self.forced_rows > 0
            && self
                .forced_offset
                .iter()
                .zip(&self.thresholds)
                .any(|(&o, &t)| o >= t as u64)
    }

    /// The `w` table: each column sorted ascending, then summed down, plus the
    /// forced offset. Row `j - 1` holds the sum of the `j` smallest entries.
    #[allow(clippy::needless_range_loop)]
    pub fn bound_table(&self) -> Vec<Vec<u64>> {
        let (r, w) = (self.rows(), self.width());
        let mut out = vec![vec![0u64; w]; r];
        let mut column = Vec::with_capacity(r);
        for k in 0..w {
            column.clear();
            column.extend((0..r).map(|j| self.counts[j * w + k]));
            column.sort_unstable();
            let mut acc = self.forced_offset[k];
            for (j, &c) in column.iter().enumerate() {
                acc += c as u64;
                out[j][k] = acc;
            }
        }
        out
    }

    /// The `v` table: rows summed in `ordering` (free-row positions of this table).
    pub fn heuristic_table(&self, ordering: &[usize]) -> Result<Vec<Vec<u64>>> {
        self.check_permutation(ordering)?;
        let w = self.width();
        let mut acc = self.forced_offset.clone();
        let mut out = Vec::with_capacity(ordering.len());
        for &pos in ordering {
            for (a, &c) in acc.iter_mut().zip(self.row(pos)) {
                *a += c as u64;
            }
            out.push(acc.clone());
        }
        debug_assert!(out.iter().all(|r| r.len() == w));
        Ok(out)
    }

    fn check_permutation(&self, ordering: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.rows()];
        if ordering.len() != self.rows() {
            return Err(Error::InvalidParameter(alloc::format!(
                "ordering has {} entries for {} free rows",
                ordering.len(),
                self.rows()
            )));
        }
        for &pos in ordering {
            if pos >= self.rows() || core::mem::replace(&mut seen[pos], true) {
                return Err(Error::InvalidParameter(
                    "ordering is not a permutation".into(),
                ));
            }
        }
        Ok(())
    }

    /// Lower bound `B` on the row discovery bound within this subproblem.
    pub fn shortcut_bound(&self) -> u32 {
        if self.forced_positive() {
            return self.selection_rows as u32;
        }
        let w = self.bound_table();
        let j0 = findj_thresholds(&w, &self.thresholds);
        (self.selection_rows - self.forced_rows - j0) as u32
    }

    /// Upper bracket `H` witnessed by the prefixes of `ordering`.
    pub fn shortcut_heuristic(&self, ordering: &[usize]) -> Result<u32> {
        let v = self.heuristic_table(ordering)?;
        if self.forced_positive() {
            return Ok(self.selection_rows as u32);
        }
        let j1 = findj_thresholds(&v, &self.thresholds);
        Ok((self.selection_rows - self.forced_rows - j1) as u32)
    }

    /// Row positions of this table, weakest evidence first.
    pub fn default_ordering(&self, block: &SelectionBlock) -> Vec<usize> {
        let scores: Vec<RowScore> = self
            .labels
            .iter()
            .map(|&l| row_score(block.row(l)))
            .collect();
        weakest_first_order(&scores)
    }
}

/// Builds the full cumulative table of a selection.
pub fn build_cumulative_table(
    state: &PreparedState,
    sel: &TwoWaySelection,
) -> CumulativeCategoryTable {
    CumulativeCategoryTable::full(&SelectionBlock::from_state(state, sel))
}

/// Largest `j` such that row `j` (1-based) stays below its column index everywhere,
/// i.e. `t[j-1][k-1] < k` for all `k`. `0` when the first row already reaches.
///
/// Entries must be non-decreasing down each column and along each row. Runs the
/// staircase walk from the bottom-left corner in `O(rows + cols)`.
pub fn findj(table: &[Vec<u64>]) -> usize {
    let width = table.first().map_or(0, Vec::len);
    let mut j = table.len();
    let mut k = 1;
    while k <= width && j >= 1 {
        if table[j - 1][k - 1] >= k as u64 {
            j -= 1;
        } else {
            k += 1;
        }
    }
    j
}

/// [`findj`] over columns labelled by arbitrary ascending thresholds.
pub(crate) fn findj_thresholds(table: &[Vec<u64>], thresholds: &[u32]) -> usize {
    let mut j = table.len();
    let mut idx = 0;
    while idx < thresholds.len() && j >= 1 {
        if table[j - 1][idx] >= thresholds[idx] as u64 {
            j -= 1;
        } else {
            idx += 1;
        }
    }
    j
}

/// [`findj`] over a table given implicitly as `offset[idx] + sum_{i < j} elem(i, idx)`.
/// Column sums are formed only for the columns the walk visits.
pub(crate) fn findj_cumulative(
    rows: usize,
    thresholds: &[u32],
    offset: &[u64],
    elem: impl Fn(usize, usize) -> u32,
) -> usize {
    let mut j = rows;
    let mut idx = 0;
    let mut current: Option<u64> = None;
    while idx < thresholds.len() && j >= 1 {
        let value = match current {
            Some(v) => v,
            None => offset[idx] + (0..j).map(|i| elem(i, idx) as u64).sum::<u64>(),
        };
        if value >= thresholds[idx] as u64 {
            current = Some(value - elem(j - 1, idx) as u64);
            j -= 1;
        } else {
            idx += 1;
            current = None;
        }
    }
    j
}
