//! Simes-based closed testing primitives.
//!
//! Everything here works on p-categories: the category of a p-value `p` is the
//! smallest integer `r >= 1` with `h * p <= r * alpha`, where `h` is the Hommel
//! constant of the whole hypothesis family. Once categorized, a set of hypotheses
//! is rejected by the Simes local test iff some `u` has at least `u` categories
//! that are `<= u`, and the pair-level discovery bound is a counting exercise.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Family-wise significance level, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The Hommel constant `h` of a family of `m` hypotheses, `0 <= h <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HommelConstant {
    h: u64,
    m: u64,
}

impl HommelConstant {
    pub fn new(h: u64, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("hypothesis family"));
        }
        if h > m {
            return Err(Error::InvalidParameter(alloc::format!(
                "Hommel constant {h} exceeds family size {m}"
            )));
        }
        Ok(HommelConstant { h, m })
    }

    #[inline]
    pub fn h(self) -> u64 {
        self.h
    }

    #[inline]
    pub fn m(self) -> u64 {
        self.m
    }
}

/// Lower confidence bound on the number of true discoveries in a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscoveryCount {
    pub d_bar: u64,
    pub set_size: u64,
}

impl DiscoveryCount {
    pub fn proportion(self) -> Proportion {
        Proportion::new(self.d_bar, self.set_size)
    }
}

/// An exact ratio `num / den` with `num <= den`, used for reported TDPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Proportion {
    pub num: u64,
    pub den: u64,
}

impl Proportion {
    pub fn new(num: u64, den: u64) -> Self {
        debug_assert!(den > 0 && num <= den);
        Proportion { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub(crate) fn validate_pvalues(pvalues: &[f64]) -> Result<()> {
    for (index, &value) in pvalues.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidPValue { index, value });
        }
    }
    Ok(())
}

/// The Simes/Hommel window condition `r * p > j * alpha`, evaluated exactly as the
/// brute-force reference does so that both agree bit-for-bit at boundaries.
#[inline]
pub(crate) fn window_holds(r: u64, p: f64, j: u64, alpha: f64) -> bool {
    (r as f64) * p > (j as f64) * alpha
}

/// Computes the Hommel constant
/// `h = max{ r in 0..=m : r * p_(m-r+j) > j * alpha for j = 1..=r }`.
///
/// Only p-values below `alpha` can violate the window condition, so only those are
/// sorted. For the value of rank `i` (distance `d = m - i` from the top) the set of
/// window sizes it rules out is a suffix `r >= r_i`; `h` is `min_i r_i - 1`.
pub fn compute_h(pvalues: &[f64], alpha: Alpha) -> Result<HommelConstant> {
    if pvalues.is_empty() {
        return Err(Error::Empty("p-value collection"));
    }
    validate_pvalues(pvalues)?;
    let m = pvalues.len() as u64;
    let a = alpha.get();

    let max_p = pvalues.iter().copied().fold(0.0_f64, f64::max);
    // The top of every window is p_(m), which needs p_(m) > alpha.
    if max_p <= a {
        return HommelConstant::new(0, m);
    }

    let mut small: Vec<f64> = pvalues.iter().copied().filter(|&p| p < a).collect();
    small.sort_unstable_by(f64::total_cmp);

    let mut h = m;
    for (t, &p) in small.iter().enumerate() {
        let d = m - (t as u64 + 1);
        // Smallest r > d for which r * p <= (r - d) * alpha.
        let limit = a * d as f64 / (a - p);
        let mut r = if limit.is_finite() && limit < (m + 1) as f64 {
            libm::ceil(limit) as u64
        } else {
            m + 1
        };
        r = r.max(d + 1);
        while r > d + 1 && !window_holds(r - 1, p, r - 1 - d, a) {
            r -= 1;
        }
        while r <= m && window_holds(r, p, r - d, a) {
            r += 1;
        }
        h = h.min(r - 1);
        if h == 0 {
            break;
        }
    }
    HommelConstant::new(h, m)
}

/// Smallest cap that marks a category as beyond any count a query could reach.
pub fn category_cap(m: u64) -> u32 {
    (m.min(u32::MAX as u64 - 1) + 1) as u32
}

/// p-category `min{ r >= 1 : h * p <= r * alpha }`, clamped to `cap`.
pub fn categorize(p: f64, h: HommelConstant, alpha: Alpha, cap: u32) -> u32 {
    debug_assert!((0.0..=1.0).contains(&p));
    debug_assert!(cap >= 1);
    if h.h() == 0 || p <= 0.0 {
        return 1;
    }
    let a = alpha.get();
    let hp = h.h() as f64 * p;
    let estimate = libm::ceil(hp / a);
    if estimate.is_nan() || estimate >= cap as f64 + 2.0 {
        return cap;
    }
    let mut r = (estimate as u64).max(1);
    while r > 1 && hp <= (r - 1) as f64 * a {
        r -= 1;
    }
    while hp > r as f64 * a {
        r += 1;
    }
    r.min(cap as u64) as u32
}

/// Cumulative histogram of categories: `counts[u] = |{ g : g <= u }|` for `u <= limit`.
pub(crate) fn cumulative_counts(categories: impl Iterator<Item = u32>, limit: usize) -> Vec<u64> {
    let mut counts = vec![0u64; limit + 1];
    for g in categories {
        let g = g as usize;
        if g <= limit {
            counts[g] += 1;
        }
    }
    for u in 1..=limit {
        counts[u] += counts[u - 1];
    }
    counts
}

/// Simes local test on categories: true iff some `u` has at least `u` categories
/// `<= u`. Only `u <= |T|` can ever succeed.
pub fn simes_positive(categories: &[u32]) -> bool {
    let n = categories.len();
    if n == 0 {
        return false;
    }
    let counts = cumulative_counts(categories.iter().copied(), n);
    (1..=n).any(|u| counts[u] >= u as u64)
}

/// Pair-level lower bound `max_{1<=u<=|S|} (1 - u + |{g <= u}|)`, floored at zero.
pub fn pair_discoveries(categories: &[u32]) -> Result<DiscoveryCount> {
    pair_discoveries_from(categories.iter().copied(), categories.len())
}

/// Same as [`pair_discoveries`] for categories produced by an iterator of known length.
pub fn pair_discoveries_from(
    categories: impl Iterator<Item = u32>,
    set_size: usize,
) -> Result<DiscoveryCount> {
    if set_size == 0 {
        return Err(Error::Empty("selection"));
    }
    let counts = cumulative_counts(categories, set_size);
    let mut best = 0u64;
    for (u, &count) in counts.iter().enumerate().skip(1) {
        // 1 - u + count, computed without going negative.
        let gain = (count + 1).saturating_sub(u as u64);
        best = best.max(gain);
    }
    Ok(DiscoveryCount {
        d_bar: best,
        set_size: set_size as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    #[test]
    fn alpha_rejects_out_of_range() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(0.05).is_ok());
    }

    #[test]
    fn h_of_all_ones_is_m() {
        let h = compute_h(&[1.0, 1.0, 1.0], alpha(0.05)).unwrap();
        assert_eq!(h.h(), 3);
        assert_eq!(h.m(), 3);
    }

    #[test]
    fn h_of_all_zeros_is_zero() {
        for m in [1usize, 2, 17, 500] {
            let h = compute_h(&vec![0.0; m], alpha(0.05)).unwrap();
            assert_eq!(h.h(), 0);
        }
    }

    #[test]
    fn h_rejects_bad_input() {
        assert!(matches!(compute_h(&[], alpha(0.05)), Err(Error::Empty(_))));
        assert!(matches!(
            compute_h(&[0.2, f64::NAN], alpha(0.05)),
            Err(Error::InvalidPValue { index: 1, .. })
        ));
        assert!(matches!(
            compute_h(&[1.2], alpha(0.05)),
            Err(Error::InvalidPValue { index: 0, .. })
        ));
    }

    #[test]
    fn h_with_max_exactly_alpha_is_zero() {
        let h = compute_h(&[0.05, 0.01], alpha(0.05)).unwrap();
        assert_eq!(h.h(), 0);
    }

    #[test]
    fn categorize_examples() {
        let h = HommelConstant::new(100, 1000).unwrap();
        let a = alpha(0.05);
        // h * p in (2 alpha, 3 alpha]
        assert_eq!(categorize(2.5 * 0.05 / 100.0, h, a, 1001), 3);
        assert_eq!(categorize(3.0 * 0.05 / 100.0, h, a, 1001), 3);
        assert_eq!(categorize(0.0, h, a, 1001), 1);
        assert_eq!(categorize(1.0, h, a, 1001), 1001);
        let h0 = HommelConstant::new(0, 10).unwrap();
        assert_eq!(categorize(1.0, h0, a, 11), 1);
    }

    #[test]
    fn categorize_is_monotone_and_exact() {
        let h = HommelConstant::new(37, 400).unwrap();
        let a = alpha(0.1);
        let mut prev = 0;
        for i in 0..=10_000 {
            let p = i as f64 / 10_000.0;
            let g = categorize(p, h, a, 401);
            assert!(g >= prev);
            prev = g;
            if g < 401 {
                let hp = 37.0 * p;
                assert!(hp <= g as f64 * 0.1);
                assert!(g == 1 || hp > (g - 1) as f64 * 0.1);
            }
        }
    }

    #[test]
    fn simes_on_toy_rows() {
        let v1 = [3, 948, 35, 5, 14, 1, 24];
        let v2 = [11, 49, 7, 2, 27, 224, 18];
        let v3 = [13, 160, 20, 12, 4, 2, 8];
        let v4 = [78, 2, 75, 3, 5, 25, 2];
        let v5 = [17, 4, 142, 80, 15, 451, 31];
        assert!(simes_positive(&v1));
        assert!(simes_positive(&v4));
        assert!(!simes_positive(&v2));
        assert!(!simes_positive(&v3));
        assert!(!simes_positive(&v5));
        let union: Vec<u32> = v2.iter().chain(v3.iter()).copied().collect();
        assert!(simes_positive(&union));
    }

    #[test]
    fn pair_discoveries_edge_cases() {
        let all_cap = vec![41u32; 40];
        assert_eq!(pair_discoveries(&all_cap).unwrap().d_bar, 0);
        assert_eq!(pair_discoveries(&[1, 1, 1, 1, 1]).unwrap().d_bar, 5);
        assert!(pair_discoveries(&[]).is_err());
        // Categories larger than |S| never count.
        assert_eq!(pair_discoveries(&[4, 4, 4]).unwrap().d_bar, 0);
    }
}
