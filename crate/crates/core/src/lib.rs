//! Simultaneous confidence bounds on true discovery proportions of two-way feature
//! sets.
//!
//! Given a `p x q` matrix of pairwise association p-values, this crate computes, for
//! any sub-matrix `S_A x S_B`, lower `(1 - alpha)` bounds on
//!
//! * the pair TDP: the fraction of cells that are true associations;
//! * the row TDP: the fraction of rows in `S_A` associated with something in `S_B`;
//! * the column TDP: the same with the roles of rows and columns swapped.
//!
//! All bounds derive from one Simes-based closed testing procedure and hold
//! simultaneously over every selection, so selections may be chosen after looking at
//! the data. The procedure assumes positive dependence among the p-values; that is a
//! property of the input and is not checked.
//!
//! The typical flow is [`prepare`] once per matrix, then [`query`] per selection.
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod association;
pub mod branch_bound;
pub mod category;
pub mod closed_testing;
pub mod cumulative;
pub mod error;
#[cfg(feature = "oracles")]
pub mod oracles;
pub mod pearson;
pub mod selection;
pub mod state;
pub mod tdp;

pub use association::AssociationMatrix;
pub use branch_bound::{
    branch_and_bound, branch_and_bound_traced, BranchOptions, RowOrder, StepOutcome, Subproblem,
    TdpBracket, TraceEvent, DEFAULT_MAX_ITER,
};
pub use category::{width_for_cap, CategoryMatrix, CategoryStorage};
pub use closed_testing::{
    categorize, category_cap, compute_h, pair_discoveries, simes_positive, Alpha, DiscoveryCount,
    HommelConstant, Proportion,
};
pub use cumulative::{
    build_cumulative_table, findj, row_score, row_score_in, CumulativeCategoryTable, RowScore,
    SelectionBlock,
};
pub use error::{Error, Result};
pub use pearson::{correlation_pvalue, pearson_pvalue, PearsonTest};
pub use selection::TwoWaySelection;
pub use state::{prepare, PreparedState, STATE_FORMAT_VERSION};
pub use tdp::{col_tdp, query, query_block, row_tdp, TdpReport};
