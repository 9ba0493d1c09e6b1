//! The 6 x 7 worked example used by the self-test and the test suites.

use ocean_core::{Alpha, AssociationMatrix, SelectionBlock};

/// p-categories of the worked example.
pub const TOY_CATEGORIES: [[u32; 7]; 6] = [
    [3, 948, 35, 5, 14, 1, 24],
    [11, 49, 7, 2, 27, 224, 18],
    [13, 160, 20, 12, 4, 2, 8],
    [78, 2, 75, 3, 5, 25, 2],
    [17, 4, 142, 80, 15, 451, 31],
    [82, 71, 23, 67, 762, 5, 20],
];

/// Cumulative counts `#{k : category <= u}` for `u = 1..=7`.
pub const TOY_CUMULATIVE: [[u32; 7]; 6] = [
    [1, 1, 2, 2, 3, 3, 3],
    [0, 1, 1, 1, 1, 1, 2],
    [0, 1, 1, 2, 2, 2, 2],
    [0, 2, 3, 3, 4, 4, 4],
    [0, 0, 0, 1, 1, 1, 1],
    [0, 0, 0, 0, 1, 1, 1],
];

/// The row ordering V5, V1, V6, V4, V2, V3 under which the heuristic is 5.
pub const TOY_REFERENCE_ORDER: [usize; 6] = [4, 0, 5, 3, 1, 2];

pub const TOY_ALPHA: f64 = 0.01;
/// The Hommel constant of [`toy_pvalues`] at [`TOY_ALPHA`].
pub const TOY_H: u64 = 34;

pub fn toy_block() -> SelectionBlock {
    SelectionBlock::new(6, 7, TOY_CATEGORIES.iter().flatten().copied().collect())
        .expect("valid toy block")
}

/// A p-value matrix whose own `h` (34 at alpha 0.01) reproduces
/// [`TOY_CATEGORIES`], up to the cap of 43 which stands in for every larger
/// category. Each entry sits mid-way inside its category,
/// `p = (c - 1/2) * alpha / h`. Rows are `V1..V6`, columns `W1..W7`.
pub fn toy_pvalues() -> AssociationMatrix {
    let p = TOY_CATEGORIES
        .iter()
        .flatten()
        .map(|&c| (c as f64 - 0.5) * TOY_ALPHA / TOY_H as f64)
        .collect();
    AssociationMatrix::new(
        (1..=6).map(|i| format!("V{i}")).collect(),
        (1..=7).map(|i| format!("W{i}")).collect(),
        p,
    )
    .expect("valid toy matrix")
}

pub fn toy_alpha() -> Alpha {
    Alpha::new(TOY_ALPHA).expect("valid alpha")
}
