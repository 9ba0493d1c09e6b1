//! Brute-force reference implementations of every bound, straight from the
//! definitions. Quadratic or exponential; meant for small instances.

use alloc::vec::Vec;

use crate::closed_testing::{validate_pvalues, window_holds, Alpha};
use crate::cumulative::SelectionBlock;
use crate::error::{Error, Result};
use crate::selection::TwoWaySelection;
use crate::state::PreparedState;

pub const ORACLE_H_LIMIT: usize = 5000;
pub const ORACLE_ROW_LIMIT: usize = 20;

/// `max{ r : r * p_(m-r+j) > j * alpha for all j = 1..=r }` by a double loop.
pub fn oracle_h(pvalues: &[f64], alpha: Alpha) -> Result<u64> {
    if pvalues.len() > ORACLE_H_LIMIT {
        return Err(Error::TooLarge {
            limit: ORACLE_H_LIMIT,
            got: pvalues.len(),
        });
    }
    validate_pvalues(pvalues)?;
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    for r in (1..=m).rev() {
        let ok =
            (1..=r).all(|j| window_holds(r as u64, sorted[m - r + j - 1], j as u64, alpha.get()));
        if ok {
            return Ok(r as u64);
        }
    }
    Ok(0)
}

/// `max_{1<=u<=|S|} (1 - u + |{g <= u}|)`, floored at zero, counting afresh for every `u`.
pub fn oracle_pair_discoveries(categories: &[u32], set_size: usize) -> u64 {
    let mut best: i64 = 0;
    for u in 1..=set_size {
        let count = categories.iter().filter(|&&g| g as usize <= u).count() as i64;
        best = best.max(1 - u as i64 + count);
    }
    best as u64
}

/// Simes test in ordered form: some `r` with `g_(r) <= r`.
fn oracle_simes(categories: &mut [u32]) -> bool {
    categories.sort_unstable();
    categories
        .iter()
        .enumerate()
        .any(|(i, &g)| g as usize <= i + 1)
}

/// `|S_A| - max{ |I| : I x S_B not Simes-positive }` over all `2^|S_A|` subsets.
pub fn oracle_row_discoveries_block(block: &SelectionBlock) -> Result<u64> {
    let rows = block.rows();
    if rows > ORACLE_ROW_LIMIT {
        return Err(Error::TooLarge {
            limit: ORACLE_ROW_LIMIT,
            got: rows,
        });
    }
    let mut best = 0usize;
    let mut buf: Vec<u32> = Vec::with_capacity(block.data().len());
    for mask in 1u32..(1u32 << rows) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        buf.clear();
        for j in (0..rows).filter(|j| mask & (1 << j) != 0) {
            buf.extend_from_slice(block.row(j));
        }
        if !oracle_simes(&mut buf) {
            best = size;
        }
    }
    Ok((rows - best) as u64)
}

pub fn oracle_row_discoveries(state: &PreparedState, sel: &TwoWaySelection) -> Result<u64> {
    oracle_row_discoveries_block(&SelectionBlock::from_state(state, sel))
}

pub fn oracle_col_discoveries(state: &PreparedState, sel: &TwoWaySelection) -> Result<u64> {
    oracle_row_discoveries_block(&SelectionBlock::from_state_transposed(state, sel))
}
