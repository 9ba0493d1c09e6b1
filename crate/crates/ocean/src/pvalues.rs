//! Pairwise Pearson p-value matrices between two sample-aligned datasets.

use std::collections::{HashMap, HashSet};

use ocean_core::{correlation_pvalue, AssociationMatrix};
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Output of [`build_pvalue_matrix`].
#[derive(Debug, Clone)]
pub struct PvalueMatrix {
    pub matrix: AssociationMatrix,
    /// Feature pairs where one side had zero variance; their p-value is 1.
    pub degenerate_pairs: u64,
    /// `b` was reordered to match the sample order of `a`.
    pub reordered: bool,
}

/// Centered feature vectors and their sums of squares.
struct Centered {
    n: usize,
    data: Vec<f64>,
    ss: Vec<f64>,
}

impl Centered {
    fn new(d: &Dataset) -> Self {
        let n = d.samples();
        let nf = n as f64;
        let mut data = Vec::with_capacity(n * d.features());
        let mut ss = Vec::with_capacity(d.features());
        for f in 0..d.features() {
            let x = d.feature(f);
            let mean = x.iter().sum::<f64>() / nf;
            let mut s = 0.0;
            for v in x {
                let c = v - mean;
                s += c * c;
                data.push(c);
            }
            ss.push(s);
        }
        Centered { n, data, ss }
    }

    fn feature(&self, f: usize) -> &[f64] {
        &self.data[f * self.n..(f + 1) * self.n]
    }
}

/// Sample order of `b` that lines it up with `a`, or `None` when already aligned.
fn alignment(a: &Dataset, b: &Dataset) -> Result<Option<Vec<usize>>> {
    if a.sample_ids() == b.sample_ids() {
        return Ok(None);
    }
    let in_b: HashMap<&str, usize> = b
        .sample_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let in_a: HashSet<&str> = a.sample_ids().iter().map(String::as_str).collect();
    let only_a: Vec<String> = a
        .sample_ids()
        .iter()
        .filter(|s| !in_b.contains_key(s.as_str()))
        .cloned()
        .collect();
    let only_b: Vec<String> = b
        .sample_ids()
        .iter()
        .filter(|s| !in_a.contains(s.as_str()))
        .cloned()
        .collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Error::SampleMismatch { only_a, only_b });
    }
    Ok(Some(
        a.sample_ids().iter().map(|s| in_b[s.as_str()]).collect(),
    ))
}

/// P-values of the two-sided Pearson test of every feature of `a` (rows) against
/// every feature of `b` (columns).
///
/// Samples are matched by identifier. Entries are bit-identical to calling
/// [`ocean_core::pearson_pvalue`] on each pair, independent of thread count.
pub fn build_pvalue_matrix(a: &Dataset, b: &Dataset) -> Result<PvalueMatrix> {
    let order = alignment(a, b)?;
    let reordered = order.is_some();
    let b_aligned;
    let b = match order {
        Some(order) => {
            b_aligned = b.reorder_samples(&order);
            &b_aligned
        }
        None => b,
    };
    let n = a.samples();
    let ca = Centered::new(a);
    let cb = Centered::new(b);
    let q = b.features();
    let mut pvalues = vec![0.0; a.features() * q];
    let degenerate: u64 = pvalues
        .par_chunks_mut(q)
        .enumerate()
        .map(|(j, out)| {
            let x = ca.feature(j);
            let mut degenerate = 0;
            for (k, slot) in out.iter_mut().enumerate() {
                let (sxx, syy) = (ca.ss[j], cb.ss[k]);
                if sxx == 0.0 || syy == 0.0 {
                    degenerate += 1;
                    *slot = 1.0;
                    continue;
                }
                let sxy: f64 = x
                    .iter()
                    .zip(cb.feature(k))
                    .fold(0.0, |acc, (u, v)| acc + u * v);
                let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
                *slot = correlation_pvalue(r, n);
            }
            degenerate
        })
        .sum();
    if degenerate > 0 {
        log::warn!(
            "{degenerate} feature pairs involve a constant feature; their p-values are set to 1"
        );
    }
    let matrix =
        AssociationMatrix::new(a.feature_ids().to_vec(), b.feature_ids().to_vec(), pvalues)?;
    Ok(PvalueMatrix {
        matrix,
        degenerate_pairs: degenerate,
        reordered,
    })
}
