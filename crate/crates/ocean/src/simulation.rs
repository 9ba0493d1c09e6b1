//! Monte-Carlo checks of the simultaneous guarantee and of power.

use ocean_core::{prepare, query, Alpha, BranchOptions, TwoWaySelection};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::pvalues::build_pvalue_matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Samples per dataset.
    pub n: usize,
    /// Features in the first dataset (matrix rows).
    pub p: usize,
    /// Features in the second dataset (matrix columns).
    pub q: usize,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
    /// Correlated block in the leading rows and columns; `None` for the global null.
    pub planted: Option<PlantedBlock>,
    pub max_iter: u64,
}

/// Leading `rows x cols` features share one latent factor, giving every cross pair
/// in the block correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedBlock {
    pub rows: usize,
    pub cols: usize,
    pub rho: f64,
}

impl SimulationConfig {
    pub fn null(n: usize, p: usize, q: usize, alpha: f64, reps: u64, seed: u64) -> Self {
        SimulationConfig {
            n,
            p,
            q,
            alpha,
            reps,
            seed,
            planted: None,
            max_iter: 1000,
        }
    }

    pub fn planted(
        n: usize,
        p: usize,
        q: usize,
        block: PlantedBlock,
        alpha: f64,
        reps: u64,
        seed: u64,
    ) -> Self {
        SimulationConfig {
            planted: Some(block),
            ..Self::null(n, p, q, alpha, reps, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub reps: u64,
    /// Replicates where some lower bound on the evaluated selection is positive.
    /// On null data this is the family-wise error rate.
    pub any_positive: u64,
    /// Replicates where the row TDP lower bound is positive.
    pub row_positive: u64,
    pub mean_pair_tdp: f64,
    pub mean_row_tdp: f64,
    pub mean_col_tdp: f64,
}

impl SimulationReport {
    pub fn rate(&self) -> f64 {
        self.any_positive as f64 / self.reps as f64
    }

    pub fn row_rate(&self) -> f64 {
        self.row_positive as f64 / self.reps as f64
    }
}

/// Tolerance `alpha + 3 * sqrt(alpha (1 - alpha) / reps)` for an observed FWER.
pub fn fwer_tolerance(alpha: f64, reps: u64) -> f64 {
    alpha + 3.0 * (alpha * (1.0 - alpha) / reps as f64).sqrt()
}

struct Outcome {
    pair: f64,
    row: f64,
    col: f64,
    any: bool,
    row_positive: bool,
}

fn dataset(prefix: &str, values: Vec<f64>, n: usize, features: usize) -> Result<Dataset> {
    Dataset::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        (0..features).map(|j| format!("{prefix}{j}")).collect(),
        values,
    )
}

fn replicate(cfg: &SimulationConfig, rep: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let (n, p, q) = (cfg.n, cfg.p, cfg.q);
    let mut a = vec![0.0; n * p];
    let mut b = vec![0.0; n * q];
    for i in 0..n {
        let latent = draw();
        for j in 0..p {
            a[i * p + j] = draw();
        }
        for k in 0..q {
            b[i * q + k] = draw();
        }
        if let Some(block) = cfg.planted {
            let (s, e) = (block.rho.sqrt(), (1.0 - block.rho).sqrt());
            for j in 0..block.rows {
                a[i * p + j] = s * latent + e * a[i * p + j];
            }
            for k in 0..block.cols {
                b[i * q + k] = s * latent + e * b[i * q + k];
            }
        }
    }
    let m = build_pvalue_matrix(&dataset("a", a, n, p)?, &dataset("b", b, n, q)?)?;
    let state = prepare(&m.matrix, Alpha::new(cfg.alpha)?)?;
    let sel = match cfg.planted {
        Some(block) => TwoWaySelection::for_state(
            &state,
            (0..block.rows).collect(),
            (0..block.cols).collect(),
        )?,
        None => TwoWaySelection::full(p, q)?,
    };
    let report = query(&state, &sel, &BranchOptions::with_max_iter(cfg.max_iter))?;
    let (pair, row, col) = (
        report.pair_tdp(),
        report.row_tdp_lower(),
        report.col_tdp_lower(),
    );
    Ok(Outcome {
        pair: pair.as_f64(),
        row: row.as_f64(),
        col: col.as_f64(),
        any: pair.num > 0 || row.num > 0 || col.num > 0,
        row_positive: row.num > 0,
    })
}

/// Runs `cfg.reps` independent replicates of data generation, preparation and a
/// query on the full matrix (or the planted block). Replicate `r` draws from
/// ChaCha8 seeded with `cfg.seed` on stream `r`, so results do not depend on
/// scheduling.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationReport> {
    let outcomes: Vec<Outcome> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| replicate(cfg, r))
        .collect::<Result<_>>()?;
    let reps = cfg.reps.max(1) as f64;
    Ok(SimulationReport {
        reps: cfg.reps,
        any_positive: outcomes.iter().filter(|o| o.any).count() as u64,
        row_positive: outcomes.iter().filter(|o| o.row_positive).count() as u64,
        mean_pair_tdp: outcomes.iter().map(|o| o.pair).sum::<f64>() / reps,
        mean_row_tdp: outcomes.iter().map(|o| o.row).sum::<f64>() / reps,
        mean_col_tdp: outcomes.iter().map(|o| o.col).sum::<f64>() / reps,
    })
}

/// Global-null simulation on the full selection; `rate()` estimates the FWER.
pub fn null_simulation(
    n: usize,
    p: usize,
    q: usize,
    alpha: f64,
    reps: u64,
    seed: u64,
) -> Result<SimulationReport> {
    run_simulation(&SimulationConfig::null(n, p, q, alpha, reps, seed))
}
