//! Pair, row and column TDP bounds for one two-way selection. All three share the
//! closed-testing coverage event, so they hold simultaneously without correction.

use crate::branch_bound::{branch_and_bound, BranchOptions, TdpBracket};
use crate::closed_testing::{pair_discoveries, DiscoveryCount, Proportion};
use crate::cumulative::SelectionBlock;
use crate::error::Result;
use crate::selection::TwoWaySelection;
use crate::state::PreparedState;

/// Bounds on the number of rows of `S_A` carrying at least one association with `S_B`.
pub fn row_tdp(
    state: &PreparedState,
    sel: &TwoWaySelection,
    options: &BranchOptions,
) -> Result<TdpBracket> {
    branch_and_bound(&SelectionBlock::from_state(state, sel), options)
}

/// Bounds on the number of columns of `S_B` carrying at least one association with `S_A`.
pub fn col_tdp(
    state: &PreparedState,
    sel: &TwoWaySelection,
    options: &BranchOptions,
) -> Result<TdpBracket> {
    branch_and_bound(&SelectionBlock::from_state_transposed(state, sel), options)
}

/// All three bounds for one selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdpReport {
    pub pair: DiscoveryCount,
    pub row: TdpBracket,
    pub col: TdpBracket,
}

impl TdpReport {
    pub fn pair_tdp(&self) -> Proportion {
        self.pair.proportion()
    }

    pub fn row_tdp_lower(&self) -> Proportion {
        Proportion::new(self.row.lower as u64, self.row.rows as u64)
    }

    pub fn row_tdp_upper(&self) -> Proportion {
        Proportion::new(self.row.upper as u64, self.row.rows as u64)
    }

    pub fn col_tdp_lower(&self) -> Proportion {
        Proportion::new(self.col.lower as u64, self.col.rows as u64)
    }

    pub fn col_tdp_upper(&self) -> Proportion {
        Proportion::new(self.col.upper as u64, self.col.rows as u64)
    }
}

/// Pair, row and column bounds for a block whose rows are `S_A`.
pub fn query_block(block: &SelectionBlock, options: &BranchOptions) -> Result<TdpReport> {
    let pair = pair_discoveries(block.data())?;
    let row = branch_and_bound(block, options)?;
    let col = branch_and_bound(&block.transpose(), &column_options(options))?;
    Ok(TdpReport { pair, row, col })
}

pub fn query(
    state: &PreparedState,
    sel: &TwoWaySelection,
    options: &BranchOptions,
) -> Result<TdpReport> {
    query_block(&SelectionBlock::from_state(state, sel), options)
}

// A fixed permutation is given for the rows; columns fall back to score order.
fn column_options(options: &BranchOptions) -> BranchOptions {
    BranchOptions {
        max_iter: options.max_iter,
        order: Default::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryMatrix;
    use crate::closed_testing::{Alpha, HommelConstant};
    use alloc::format;
    use alloc::string::String;
    use alloc::vec::Vec;

    fn state_of(rows: usize, cols: usize, cats: &[u32]) -> PreparedState {
        let m = (rows * cols) as u64;
        let cap = m as u32 + 1;
        let ids = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<String>>();
        PreparedState::from_parts(
            Alpha::new(0.05).unwrap(),
            HommelConstant::new(m, m).unwrap(),
            CategoryMatrix::from_values(rows, cols, cap, cats).unwrap(),
            ids("r", rows),
            ids("c", cols),
        )
        .unwrap()
    }

    #[test]
    fn one_by_one_category_one() {
        let s = state_of(1, 1, &[1]);
        let sel = TwoWaySelection::full(1, 1).unwrap();
        let r = query(&s, &sel, &BranchOptions::default()).unwrap();
        assert_eq!(r.pair.d_bar, 1);
        assert_eq!((r.row.lower, r.row.upper), (1, 1));
        assert_eq!((r.col.lower, r.col.upper), (1, 1));
    }

    #[test]
    fn every_cell_positive_gives_full_row_tdp() {
        let s = state_of(3, 4, &[1; 12]);
        let sel = TwoWaySelection::full(3, 4).unwrap();
        let r = query(&s, &sel, &BranchOptions::default()).unwrap();
        assert_eq!(r.row_tdp_lower(), Proportion::new(3, 3));
        assert_eq!(r.col_tdp_lower(), Proportion::new(4, 4));
        assert_eq!(r.pair.d_bar, 12);
    }

    #[test]
    fn column_tdp_is_row_tdp_of_transpose() {
        let cats = [1, 13, 13, 13, 2, 13, 13, 13, 13, 13, 13, 13];
        let s = state_of(3, 4, &cats);
        let sel = TwoWaySelection::full(3, 4).unwrap();
        let c = col_tdp(&s, &sel, &BranchOptions::default()).unwrap();
        let block = SelectionBlock::from_state(&s, &sel).transpose();
        assert_eq!(
            c,
            branch_and_bound(&block, &BranchOptions::default()).unwrap()
        );
        assert_eq!(c.rows, 4);
    }
}
