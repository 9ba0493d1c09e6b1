//! Branch-and-bound refinement of the row-level bracket.
//!
//! The search space is every subset `J` of the selection's rows. A subproblem fixes
//! some rows into every candidate (`forced`) and drops others (`removed`); the
//! shortcut bound and heuristic of each subproblem come from its cumulative table.
//! Subproblems are processed last-in first-out, splitting on the free row with the
//! strongest own evidence.

use alloc::vec;
use alloc::vec::Vec;

use crate::cumulative::{
    findj_cumulative, row_score, strongest_first_order, weakest_first_order,
    CumulativeCategoryTable, RowScore, SelectionBlock,
};
use crate::error::{Error, Result};

/// Default iteration budget for branch-and-bound.
pub const DEFAULT_MAX_ITER: u64 = 1000;

/// Bracket `lower <= d_r <= upper` on the row-level discovery bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TdpBracket {
    pub lower: u32,
    pub upper: u32,
    pub exact: bool,
    pub iterations: u64,
    /// Number of rows in the selection, the denominator of the TDP.
    pub rows: u32,
}

/// How rows are ordered when forming the heuristic witness of each subproblem.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RowOrder {
    /// Descending row score: weakest evidence first.
    #[default]
    Score,
    /// A fixed permutation of selection rows; each subproblem keeps its free rows in
    /// this relative order.
    Fixed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchOptions {
    pub max_iter: u64,
    pub order: RowOrder,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions {
            max_iter: DEFAULT_MAX_ITER,
            order: RowOrder::Score,
        }
    }
}

impl BranchOptions {
    pub fn with_max_iter(max_iter: u64) -> Self {
        BranchOptions {
            max_iter,
            ..Default::default()
        }
    }
}

/// One node of the search: the rows fixed in or out and its shortcut results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subproblem {
    pub forced: Vec<usize>,
    pub removed: Vec<usize>,
    pub bound: u32,
    pub heuristic: u32,
    pub parent_bound: u32,
}

impl Subproblem {
    /// Bound inherited from the parent or computed here, whichever is larger.
    pub fn effective_bound(&self) -> u32 {
        self.bound.max(self.parent_bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// `upper <= bound`: nothing better inside.
    Pruned,
    /// Split on the given selection row.
    Split(usize),
    /// Evaluated but not split further (every row fixed, or the update closed the gap).
    Settled,
}

/// What happened to the subproblem popped at one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub iteration: u64,
    pub node: Subproblem,
    pub upper_after: u32,
    pub outcome: StepOutcome,
}

/// Columns of the cumulative table of the free rows, each sorted ascending, stored
/// column-major, plus the per-column forced offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SortedColumns {
    free: usize,
    data: Vec<u32>,
    offset: Vec<u64>,
}

impl SortedColumns {
    fn column(&self, idx: usize) -> &[u32] {
        &self.data[idx * self.free..(idx + 1) * self.free]
    }

    fn root(table: &CumulativeCategoryTable) -> Self {
        let (r, w) = (table.rows(), table.width());
        let mut data = Vec::with_capacity(r * w);
        for k in 0..w {
            let start = data.len();
            data.extend((0..r).map(|j| table.row(j)[k]));
            data[start..].sort_unstable();
        }
        SortedColumns {
            free: r,
            data,
            offset: table.forced_offset().to_vec(),
        }
    }

    /// Drops one row (given by its counts) from every column, optionally moving it
    /// into the forced offset.
    fn without_row(&self, row: &[u32], force: bool) -> Self {
        let w = self.offset.len();
        let free = self.free - 1;
        let mut data = Vec::with_capacity(free * w);
        let mut offset = self.offset.clone();
        for (k, &c) in row.iter().enumerate().take(w) {
            let col = self.column(k);
            let at = col.partition_point(|&x| x < c);
            debug_assert!(at < col.len() && col[at] == c);
            data.extend_from_slice(&col[..at]);
            data.extend_from_slice(&col[at + 1..]);
            if force {
                offset[k] += c as u64;
            }
        }
        SortedColumns { free, data, offset }
    }

    /// Rebuilds the subproblem table from the root by merging out every fixed row.
    #[allow(clippy::needless_range_loop)]
    fn rebuild(
        root: &SortedColumns,
        table: &CumulativeCategoryTable,
        fixed: &[usize],
        forced: &[usize],
    ) -> Self {
        let w = root.offset.len();
        let free = root.free - fixed.len();
        let mut data = Vec::with_capacity(free * w);
        let mut offset = root.offset.clone();
        let mut drop = Vec::with_capacity(fixed.len());
        for k in 0..w {
            drop.clear();
            drop.extend(fixed.iter().map(|&j| table.row(j)[k]));
            drop.sort_unstable();
            let mut d = 0;
            for &x in root.column(k) {
                if d < drop.len() && drop[d] == x {
                    d += 1;
                } else {
                    data.push(x);
                }
            }
            for &j in forced {
                offset[k] += table.row(j)[k] as u64;
            }
        }
        SortedColumns { free, data, offset }
    }
}

struct Engine<'a> {
    table: &'a CumulativeCategoryTable,
    rows: usize,
    heuristic_order: Vec<usize>,
    branch_order: Vec<usize>,
    root: SortedColumns,
}

struct Node {
    sub: Subproblem,
    columns: Option<SortedColumns>,
}

impl<'a> Engine<'a> {
    fn new(
        block: &SelectionBlock,
        table: &'a CumulativeCategoryTable,
        order: &RowOrder,
    ) -> Result<Self> {
        let rows = block.rows();
        let scores: Vec<RowScore> = (0..rows).map(|j| row_score(block.row(j))).collect();
        let heuristic_order = match order {
            RowOrder::Score => weakest_first_order(&scores),
            RowOrder::Fixed(perm) => {
                let mut seen = vec![false; rows];
                if perm.len() != rows
                    || perm
                        .iter()
                        .any(|&j| j >= rows || core::mem::replace(&mut seen[j], true))
                {
                    return Err(Error::InvalidParameter(
                        "fixed row order must be a permutation of the selection rows".into(),
                    ));
                }
                perm.clone()
            }
        };
        Ok(Engine {
            table,
            rows,
            heuristic_order,
            branch_order: strongest_first_order(&scores),
            root: SortedColumns::root(table),
        })
    }

    /// 0 = free, 1 = forced, 2 = removed.
    fn status(&self, sub: &Subproblem) -> Vec<u8> {
        let mut status = vec![0u8; self.rows];
        for &j in &sub.forced {
            status[j] = 1;
        }
        for &j in &sub.removed {
            status[j] = 2;
        }
        status
    }

    fn evaluate(&self, forced: usize, status: &[u8], columns: &SortedColumns) -> (u32, u32) {
        let total = self.rows as u32;
        let thresholds = self.table.thresholds();
        if forced > 0
            && columns
                .offset
                .iter()
                .zip(thresholds)
                .any(|(&o, &t)| o >= t as u64)
        {
            return (total, total);
        }
        let free = columns.free;
        let j0 = findj_cumulative(free, thresholds, &columns.offset, |i, k| {
            columns.data[k * free + i]
        });
        let order: Vec<usize> = self
            .heuristic_order
            .iter()
            .copied()
            .filter(|&j| status[j] == 0)
            .collect();
        debug_assert_eq!(order.len(), free);
        let j1 = findj_cumulative(free, thresholds, &columns.offset, |i, k| {
            self.table.row(order[i])[k]
        });
        let base = total - forced as u32;
        (base - j0 as u32, base - j1 as u32)
    }

    fn child(&self, parent: &Subproblem, columns: &SortedColumns, row: usize, force: bool) -> Node {
        let mut sub = Subproblem {
            forced: parent.forced.clone(),
            removed: parent.removed.clone(),
            bound: 0,
            heuristic: 0,
            parent_bound: parent.effective_bound(),
        };
        if force {
            sub.forced.push(row);
        } else {
            sub.removed.push(row);
        }
        let cols = columns.without_row(self.table.row(row), force);
        let status = self.status(&sub);
        let (b, h) = self.evaluate(sub.forced.len(), &status, &cols);
        sub.bound = b;
        sub.heuristic = h;
        Node {
            sub,
            columns: Some(cols),
        }
    }
}

fn run(
    block: &SelectionBlock,
    options: &BranchOptions,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> Result<TdpBracket> {
    // The engine's rows are the table's rows; both come from the same block.
    let table = CumulativeCategoryTable::compact(block);
    let engine = Engine::new(block, &table, &options.order)?;
    let rows = engine.rows as u32;

    let root_status = vec![0u8; engine.rows];
    let (b0, h0) = engine.evaluate(0, &root_status, &engine.root);
    let mut upper = h0;
    let mut queue = vec![Node {
        sub: Subproblem {
            forced: vec![],
            removed: vec![],
            bound: b0,
            heuristic: h0,
            parent_bound: 0,
        },
        columns: None,
    }];
    let mut iterations = 0u64;

    while iterations < options.max_iter {
        let Some(node) = queue.pop() else { break };
        iterations += 1;
        let bound = node.sub.effective_bound();
        let outcome = if upper <= bound {
            StepOutcome::Pruned
        } else {
            upper = upper.min(node.sub.heuristic);
            let status = engine.status(&node.sub);
            let next = engine
                .branch_order
                .iter()
                .copied()
                .find(|&j| status[j] == 0);
            match next {
                Some(row) if upper > bound => {
                    let columns = match node.columns {
                        Some(c) => c,
                        None if node.sub.forced.is_empty() && node.sub.removed.is_empty() => {
                            engine.root.clone()
                        }
                        None => {
                            let fixed: Vec<usize> = node
                                .sub
                                .forced
                                .iter()
                                .chain(&node.sub.removed)
                                .copied()
                                .collect();
                            SortedColumns::rebuild(&engine.root, &table, &fixed, &node.sub.forced)
                        }
                    };
                    let mut plus = engine.child(&node.sub, &columns, row, true);
                    let minus = engine.child(&node.sub, &columns, row, false);
                    // The forced child waits deeper in the stack; only the next pop keeps its table.
                    plus.columns = None;
                    queue.push(plus);
                    queue.push(minus);
                    StepOutcome::Split(row)
                }
                _ => StepOutcome::Settled,
            }
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent {
                iteration: iterations,
                node: node.sub,
                upper_after: upper,
                outcome,
            });
        }
    }

    let lower = queue
        .iter()
        .map(|n| n.sub.effective_bound())
        .fold(upper, u32::min);
    Ok(TdpBracket {
        lower,
        upper,
        exact: lower == upper,
        iterations,
        rows,
    })
}

/// Row-level bracket for the rows of `block`, refined for at most `options.max_iter`
/// iterations. `max_iter = 0` returns the single-step shortcut.
pub fn branch_and_bound(block: &SelectionBlock, options: &BranchOptions) -> Result<TdpBracket> {
    run(block, options, None)
}

/// As [`branch_and_bound`], also recording every popped subproblem.
pub fn branch_and_bound_traced(
    block: &SelectionBlock,
    options: &BranchOptions,
) -> Result<(TdpBracket, Vec<TraceEvent>)> {
    let mut trace = Vec::new();
    let bracket = run(block, options, Some(&mut trace))?;
    Ok((bracket, trace))
}
