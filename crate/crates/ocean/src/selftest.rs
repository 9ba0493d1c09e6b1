//! Built-in checks: the worked example, oracle equivalence on seeded random
//! instances, state persistence and (full mode) the null FWER simulation.

use std::fmt;
use std::path::Path;

use ocean_core::oracles::{oracle_h, oracle_pair_discoveries, oracle_row_discoveries_block};
use ocean_core::{
    branch_and_bound, branch_and_bound_traced, compute_h, pair_discoveries, prepare, Alpha,
    BranchOptions, CumulativeCategoryTable, RowOrder, SelectionBlock, StepOutcome,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fixtures::{
    toy_alpha, toy_block, toy_pvalues, TOY_CATEGORIES, TOY_CUMULATIVE, TOY_REFERENCE_ORDER,
};
use crate::simulation::{fwer_tolerance, null_simulation};
use crate::statefile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn toy_example() -> Result<String, String> {
    let block = toy_block();
    let table = CumulativeCategoryTable::full(&block);
    for (j, row) in TOY_CUMULATIVE.iter().enumerate() {
        ensure!(
            &table.row(j)[..7] == row,
            "cumulative row {} is {:?}",
            j + 1,
            &table.row(j)[..7]
        );
    }
    let b = table.shortcut_bound();
    ensure!(b == 3, "bound B = {b}, expected 3");
    let h = table
        .shortcut_heuristic(&TOY_REFERENCE_ORDER)
        .map_err(|e| e.to_string())?;
    ensure!(h == 5, "heuristic H = {h}, expected 5");
    let opts = BranchOptions {
        max_iter: 100,
        order: RowOrder::Fixed(TOY_REFERENCE_ORDER.to_vec()),
    };
    let (bracket, trace) = branch_and_bound_traced(&block, &opts).map_err(|e| e.to_string())?;
    ensure!(
        bracket.exact && bracket.lower == 3 && bracket.iterations <= 5,
        "branch and bound gave {bracket:?}"
    );
    ensure!(
        trace.first().map(|e| e.outcome) == Some(StepOutcome::Split(0)),
        "first split is not on row 1"
    );
    let forced = trace
        .iter()
        .find(|e| e.node.forced == [0] && e.node.removed.is_empty());
    ensure!(
        forced.is_some_and(|e| e.node.bound == 6 && e.outcome == StepOutcome::Pruned),
        "forced-row-1 branch not pruned with bound 6: {forced:?}"
    );
    let state = prepare(&toy_pvalues(), toy_alpha()).map_err(|e| e.to_string())?;
    let cats_ok = TOY_CATEGORIES.iter().enumerate().all(|(j, row)| {
        row.iter()
            .enumerate()
            .all(|(k, &c)| state.categories().get(j, k) == c.min(state.cap()))
    });
    ensure!(cats_ok, "toy p-values do not reproduce the category table");
    Ok(format!(
        "B = 3, H = 5, exact 3 after {} iterations",
        bracket.iterations
    ))
}

fn random_h(rng: &mut ChaCha8Rng, instances: usize, max_m: usize) -> Result<String, String> {
    for i in 0..instances {
        let m = rng.random_range(1..=max_m);
        let alpha = Alpha::new([0.01, 0.05, 0.1][i % 3]).expect("valid alpha");
        let p: Vec<f64> = (0..m)
            .map(|_| {
                if rng.random_bool(0.3) {
                    rng.random::<f64>() * 0.01
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let fast = compute_h(&p, alpha).map_err(|e| e.to_string())?.h();
        let slow = oracle_h(&p, alpha).map_err(|e| e.to_string())?;
        ensure!(fast == slow, "instance {i}: h = {fast}, oracle {slow}");
    }
    Ok(format!("{instances} instances"))
}

fn random_pair(rng: &mut ChaCha8Rng, instances: usize, max_size: usize) -> Result<String, String> {
    for i in 0..instances {
        let size = rng.random_range(1..=max_size);
        let top = rng.random_range(1..=2 * size as u32);
        let cats: Vec<u32> = (0..size).map(|_| rng.random_range(1..=top)).collect();
        let fast = pair_discoveries(&cats).map_err(|e| e.to_string())?.d_bar;
        let slow = oracle_pair_discoveries(&cats, size);
        ensure!(fast == slow, "instance {i}: {fast} vs oracle {slow}");
    }
    Ok(format!("{instances} instances"))
}

fn random_rows(rng: &mut ChaCha8Rng, instances: usize) -> Result<String, String> {
    for i in 0..instances {
        let rows = rng.random_range(1..=10);
        let cols = rng.random_range(1..=8);
        let data: Vec<u32> = (0..rows * cols).map(|_| rng.random_range(1..=20)).collect();
        let block = SelectionBlock::new(rows, cols, data).map_err(|e| e.to_string())?;
        let truth = oracle_row_discoveries_block(&block).map_err(|e| e.to_string())? as u32;
        for budget in [0, 1, 2, 5, 10, 10_000] {
            let b = branch_and_bound(&block, &BranchOptions::with_max_iter(budget))
                .map_err(|e| e.to_string())?;
            ensure!(
                b.lower <= truth && truth <= b.upper,
                "instance {i}, budget {budget}: {b:?} vs oracle {truth}"
            );
            if budget == 10_000 {
                ensure!(
                    b.exact && b.lower == truth,
                    "instance {i} did not converge: {b:?} vs {truth}"
                );
            }
        }
    }
    Ok(format!("{instances} instances"))
}

fn state_round_trip() -> Result<String, String> {
    let state = prepare(&toy_pvalues(), toy_alpha()).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    statefile::write_state(&state, &mut buf).map_err(|e| e.to_string())?;
    let back =
        statefile::read_state(buf.as_slice(), Some(buf.len() as u64)).map_err(|e| e.to_string())?;
    ensure!(back == state, "loaded state differs");
    let cut = &buf[..buf.len() - 3];
    ensure!(
        matches!(
            statefile::read_state(cut, None),
            Err(crate::Error::Checksum(_))
        ),
        "truncated state was not rejected"
    );
    Ok(format!("{} bytes", buf.len()))
}

fn external_state(path: &Path) -> Result<String, String> {
    let state = statefile::load(path).map_err(|e| e.to_string())?;
    Ok(format!(
        "{} x {}, h = {}",
        state.rows(),
        state.cols(),
        state.h().h()
    ))
}

/// Runs the self-test. `state` additionally checks that the given state file loads.
pub fn run(mode: Mode, seed: u64, state: Option<&Path>) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();
    let scale = if mode == Mode::Full { 10 } else { 1 };
    report.record("worked example", toy_example());
    report.record(
        "hommel constant vs oracle",
        random_h(&mut rng, 20 * scale, 200 * scale),
    );
    report.record(
        "pair bound vs oracle",
        random_pair(&mut rng, 100 * scale, 50 * scale),
    );
    report.record("row bound vs oracle", random_rows(&mut rng, 100 * scale));
    report.record("state round trip", state_round_trip());
    if let Some(path) = state {
        report.record(
            &format!("state file {}", path.display()),
            external_state(path),
        );
    }
    if mode == Mode::Full {
        let (alpha, reps) = (0.05, 500);
        let limit = fwer_tolerance(alpha, reps);
        let outcome = null_simulation(50, 40, 50, alpha, reps, seed)
            .map_err(|e| e.to_string())
            .and_then(|r| {
                if r.rate() > limit {
                    return Err(format!("FWER {:.4} exceeds {limit:.4}", r.rate()));
                }
                Ok(format!(
                    "FWER {:.4} <= {limit:.4} over {reps} replicates",
                    r.rate()
                ))
            });
        report.record("null simulation", outcome);
    }
    report
}
