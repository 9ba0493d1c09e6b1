//! Dense p-category matrices with a storage width chosen from the cap.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major category entries stored at the narrowest width that fits the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryStorage {
    U8(Vec<u8>),
    U16(Vec<u16>),
    U32(Vec<u32>),
}

impl CategoryStorage {
    fn len(&self) -> usize {
        match self {
            CategoryStorage::U8(v) => v.len(),
            CategoryStorage::U16(v) => v.len(),
            CategoryStorage::U32(v) => v.len(),
        }
    }

    #[inline]
    fn get(&self, i: usize) -> u32 {
        match self {
            CategoryStorage::U8(v) => v[i] as u32,
            CategoryStorage::U16(v) => v[i] as u32,
            CategoryStorage::U32(v) => v[i],
        }
    }
}

/// Bytes per stored entry for a given cap: 1, 2 or 4.
pub fn width_for_cap(cap: u32) -> u8 {
    if cap <= u8::MAX as u32 {
        1
    } else if cap <= u16::MAX as u32 {
        2
    } else {
        4
    }
}

/// A `rows x cols` grid of p-categories, every entry in `[1, cap]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMatrix {
    rows: usize,
    cols: usize,
    cap: u32,
    storage: CategoryStorage,
}

impl CategoryMatrix {
    /// Builds a matrix from row-major values, validating the range of every entry.
    pub fn from_values(rows: usize, cols: usize, cap: u32, values: &[u32]) -> Result<Self> {
        Self::from_iter_checked(rows, cols, cap, values.iter().copied())
    }

    /// Builds a matrix from a row-major iterator of exactly `rows * cols` entries.
    pub fn from_iter_checked(
        rows: usize,
        cols: usize,
        cap: u32,
        values: impl Iterator<Item = u32>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("category matrix"));
        }
        if cap == 0 {
            return Err(Error::InvalidParameter(
                "category cap must be positive".into(),
            ));
        }
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::DimensionMismatch("category matrix too large".into()))?;
        let check = |index: usize, value: u32| {
            if value == 0 || value > cap {
                Err(Error::InvalidCategory { index, value, cap })
            } else {
                Ok(())
            }
        };
        let storage = match width_for_cap(cap) {
            1 => {
                let mut v = Vec::with_capacity(n);
                for (i, g) in values.enumerate() {
                    check(i, g)?;
                    v.push(g as u8);
                }
                CategoryStorage::U8(v)
            }
            2 => {
                let mut v = Vec::with_capacity(n);
                for (i, g) in values.enumerate() {
                    check(i, g)?;
                    v.push(g as u16);
                }
                CategoryStorage::U16(v)
            }
            _ => {
                let mut v = Vec::with_capacity(n);
                for (i, g) in values.enumerate() {
                    check(i, g)?;
                    v.push(g);
                }
                CategoryStorage::U32(v)
            }
        };
        if storage.len() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "expected {n} category entries, got {}",
                storage.len()
            )));
        }
        Ok(CategoryMatrix {
            rows,
            cols,
            cap,
            storage,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Entry width in bytes (1, 2 or 4).
    pub fn width(&self) -> u8 {
        match self.storage {
            CategoryStorage::U8(_) => 1,
            CategoryStorage::U16(_) => 2,
            CategoryStorage::U32(_) => 4,
        }
    }

    pub fn storage(&self) -> &CategoryStorage {
        &self.storage
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        debug_assert!(row < self.rows && col < self.cols);
        self.storage.get(row * self.cols + col)
    }

    /// Row-major iterator over all entries.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.rows * self.cols).map(move |i| self.storage.get(i))
    }
}
