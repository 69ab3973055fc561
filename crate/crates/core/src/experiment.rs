//! Benchmark harness and verification checks behind the CLI.
//!
//! An experiment repeats: split 75/25, grow to at most 40 leaves, apply the
//! requested pruners, record metrics. Repetition `i` uses seed
//! `base_seed + i`; repetitions run concurrently and aggregate in repetition
//! order, so reports are reproducible.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bound_engine::{pi_upper_bound, vcdim_upper_bound, PartitionTable};
use crate::data_io::{split, RunRecord};
use crate::error::{Error, Result};
use crate::learner::{fit, DecisionTree, Sample};
use crate::oracle;
use crate::pruning::{prune_cart, prune_mcart, prune_with_bound};
use crate::risk_bound::BoundConfig;
use crate::tree_structure::TreeStructure;

/// The four benchmarked models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Original,
    Cart,
    Mcart,
    Bound,
}

pub const ALL_MODELS: [Model; 4] = [Model::Original, Model::Cart, Model::Mcart, Model::Bound];

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Original => "original",
            Model::Cart => "cart",
            Model::Mcart => "mcart",
            Model::Bound => "bound",
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        match s.trim().to_ascii_lowercase().as_str() {
            "original" => Ok(Model::Original),
            "cart" => Ok(Model::Cart),
            "mcart" | "m-cart" => Ok(Model::Mcart),
            "bound" | "ours" => Ok(Model::Bound),
            other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
        }
    }
}

/// Experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub repetitions: u64,
    pub models: Vec<Model>,
    pub bound: BoundConfig,
    pub base_seed: u64,
    pub max_leaves: usize,
    pub folds: usize,
    pub train_fraction: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            repetitions: 25,
            models: ALL_MODELS.to_vec(),
            bound: BoundConfig::default(),
            base_seed: 0,
            max_leaves: 40,
            folds: 10,
            train_fraction: 0.75,
        }
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

fn stat(values: &[f64]) -> Stat {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Stat {
        mean,
        std: var.sqrt(),
    }
}

/// Aggregates for one model over all repetitions.
#[derive(Debug, Clone, Serialize)]
pub struct ModelAggregate {
    pub model: Model,
    pub repetitions: u64,
    pub train_acc: Stat,
    pub test_acc: Stat,
    pub leaves: Stat,
    pub height: Stat,
    pub wall_time: Stat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Stat>,
}

/// Full result of an experiment on one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub dataset: String,
    pub rows: Vec<ModelAggregate>,
    pub records: Vec<RunRecord>,
    pub failures: Vec<String>,
}

/// The class cap: the growth bound sums over labelings and becomes expensive
/// beyond ten classes.
pub const MAX_CLASSES: u32 = 10;

/// Run the benchmark on `s`. Records come back ordered by repetition and
/// model; the shared `table` may already hold cached bounds.
pub fn run_experiment(
    s: &Sample,
    dataset: &str,
    cfg: &ExperimentConfig,
    table: &PartitionTable,
) -> Result<RunReport> {
    s.validate()?;
    cfg.bound.validate()?;
    if s.n_classes > MAX_CLASSES {
        return Err(Error::InvalidArgument(format!(
            "{dataset}: {} classes exceed the cap of {MAX_CLASSES}",
            s.n_classes
        )));
    }
    if table.mode() != cfg.bound.bound_mode {
        return Err(Error::InvalidArgument("table mode differs from configured bound mode".into()));
    }
    if cfg.repetitions == 0 {
        return Err(Error::InvalidArgument("need at least one repetition".into()));
    }

    let reps: Vec<u64> = (0..cfg.repetitions).collect();
    let per_rep: Vec<(Vec<RunRecord>, Vec<String>)> = reps
        .par_iter()
        .map(|&rep| run_repetition(s, dataset, cfg, table, rep))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (recs, fails) in per_rep {
        records.extend(recs);
        failures.extend(fails);
    }

    let mut rows = Vec::new();
    for model in &cfg.models {
        let of_model: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.model == model.name())
            .collect();
        if of_model.is_empty() {
            continue;
        }
        let pick = |f: &dyn Fn(&RunRecord) -> f64| -> Vec<f64> {
            of_model.iter().map(|r| f(r)).collect()
        };
        let bounds: Vec<f64> = of_model.iter().filter_map(|r| r.bound).collect();
        rows.push(ModelAggregate {
            model: *model,
            repetitions: of_model.len() as u64,
            train_acc: stat(&pick(&|r| r.train_acc)),
            test_acc: stat(&pick(&|r| r.test_acc)),
            leaves: stat(&pick(&|r| r.leaves as f64)),
            height: stat(&pick(&|r| r.height as f64)),
            wall_time: stat(&pick(&|r| r.wall_time)),
            bound: if bounds.is_empty() {
                None
            } else {
                Some(stat(&bounds))
            },
        });
    }

    Ok(RunReport {
        dataset: dataset.to_owned(),
        rows,
        records,
        failures,
    })
}

fn run_repetition(
    s: &Sample,
    dataset: &str,
    cfg: &ExperimentConfig,
    table: &PartitionTable,
    rep: u64,
) -> Result<(Vec<RunRecord>, Vec<String>)> {
    let seed = cfg.base_seed + rep;
    let (train, test) = split(s, cfg.train_fraction, seed)?;
    let grow_start = Instant::now();
    let tree = fit(&train, cfg.max_leaves)?;
    let grow_time = grow_start.elapsed().as_secs_f64();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let ell = s.num_features();

    for model in &cfg.models {
        let outcome: Result<(DecisionTree, f64, Option<f64>)> = match model {
            Model::Original => Ok((tree.clone(), grow_time, None)),
            Model::Cart => prune_cart(&tree, &train, cfg.folds, seed)
                .map(|r| (r.tree, r.wall_time, None)),
            Model::Mcart => prune_mcart(&tree, &train, ell, cfg.folds, seed)
                .map(|r| (r.tree, r.wall_time, None)),
            Model::Bound => prune_with_bound(&tree, &train, &cfg.bound, table)
                .map(|r| (r.tree, r.wall_time, r.bound_value)),
        };
        match outcome {
            Ok((pruned, wall_time, bound)) => {
                let train_err = pruned.count_errors(&train)?;
                let test_err = pruned.count_errors(&test)?;
                records.push(RunRecord {
                    dataset: dataset.to_owned(),
                    model: model.name().to_owned(),
                    seed,
                    train_acc: 1.0 - train_err as f64 / train.len() as f64,
                    test_acc: if test.is_empty() {
                        f64::NAN
                    } else {
                        1.0 - test_err as f64 / test.len() as f64
                    },
                    leaves: pruned.leaf_count(),
                    height: pruned.height(),
                    wall_time,
                    bound,
                });
            }
            Err(e) => failures.push(format!("rep {rep} {}: {e}", model.name())),
        }
    }
    Ok((records, failures))
}

/// Render a report as an aligned text table, or Markdown with `markdown`.
/// Everything except the time column is deterministic under fixed seeds.
pub fn render_report(report: &RunReport, markdown: bool) -> String {
    let mut out = String::new();
    let headers = ["model", "test acc", "train acc", "leaves", "height", "time [s]", "bound"];
    let mut table: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
    for row in &report.rows {
        let f = |s: Stat| format!("{:.3} ± {:.3}", s.mean, s.std);
        table.push(vec![
            row.model.name().to_string(),
            f(row.test_acc),
            f(row.train_acc),
            format!("{:.1} ± {:.1}", row.leaves.mean, row.leaves.std),
            format!("{:.1} ± {:.1}", row.height.mean, row.height.std),
            format!("{:.2}", row.wall_time.mean),
            row.bound.map_or("-".into(), |b| format!("{:.2} ± {:.2}", b.mean, b.std)),
        ]);
    }
    let widths: Vec<usize> = (0..headers.len())
        .map(|c| table.iter().map(|r| r[c].len()).max().unwrap())
        .collect();
    let _ = writeln!(out, "dataset: {}", report.dataset);
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        if markdown {
            let _ = writeln!(out, "| {} |", cells.join(" | "));
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "| {} |", rule.join(" | "));
            }
        } else {
            let _ = writeln!(out, "{}", cells.join("  "));
        }
    }
    for failure in &report.failures {
        let _ = writeln!(out, "failure: {failure}");
    }
    out
}

/// The eleven canonical tree shapes of height at most three, in the standard
/// catalog order used by the `figure2` command (frozen as a fixture).
pub const FIGURE2_STRUCTURES: [&str; 11] = [
    "L",
    "(LL)",
    "(L(LL))",
    "((LL)(LL))",
    "(L(L(LL)))",
    "(L((LL)(LL)))",
    "((LL)(L(LL)))",
    "((L(LL))(L(LL)))",
    "((LL)((LL)(LL)))",
    "((L(LL))((LL)(LL)))",
    "(((LL)(LL))((LL)(LL)))",
];

/// VC-dimension upper bounds of the catalog shapes for `ell` features.
pub fn figure2_bounds(ell: u64, table: &PartitionTable) -> Result<Vec<(TreeStructure, u64)>> {
    FIGURE2_STRUCTURES
        .iter()
        .map(|text| {
            let t: TreeStructure = text.parse()?;
            let bound = vcdim_upper_bound(&t, ell, table)?;
            Ok((t, bound))
        })
        .collect()
}

/// One verification check line.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyLine {
    pub check: String,
    pub m: u64,
    pub ell: u64,
    pub regime: String,
    pub oracle: u64,
    pub bound: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub lines: Vec<VerifyLine>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let _ = writeln!(
                out,
                "{} {:28} m={:<3} ell={:<2} regime={:<12} oracle={:<8} bound={}",
                if line.passed { "PASS" } else { "FAIL" },
                line.check,
                line.m,
                line.ell,
                line.regime,
                line.oracle,
                line.bound,
            );
        }
        let _ = writeln!(
            out,
            "{}: {} checks",
            if self.all_passed { "ALL PASS" } else { "FAILURES" },
            self.lines.len()
        );
        out
    }
}

/// Oracle-versus-bound verification at desk scale.
///
/// Checks, in order: the worst-case samples attain the stump bound exactly
/// (explicit tables for m <= 7, shifted blocks for 2*ell <= m); random
/// samples never exceed the stump bound; exhaustive tree partition counts
/// never exceed the recursive bound on every shape with at most three
/// internal nodes.
pub fn verify(max_m: u64, max_ell: u64) -> Result<VerifyReport> {
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    if max_m == 0 || max_m > 9 || max_ell == 0 || max_ell > 8 {
        return Err(Error::InvalidArgument(
            "verification is desk-scale: 1 <= max_m <= 9, 1 <= max_ell <= 8".into(),
        ));
    }
    let mut lines = Vec::new();

    // Tightness on the explicit tables.
    for m in 1..=max_m.min(7) {
        for ell in 1..=max_ell {
            let sample = oracle::worst_case_sample(m, ell)?;
            let got = oracle::stump_partitions(&sample).len() as u64;
            let bound = crate::bound_engine::stump_pi2_bound(m, ell)?
                .to_u64()
                .expect("desk-scale bound fits u64");
            lines.push(VerifyLine {
                check: "stump-tightness-table".into(),
                m,
                ell,
                regime: "explicit".into(),
                oracle: got,
                bound: bound.to_string(),
                passed: got == bound,
            });
        }
    }
    // Tightness of the shifted-block construction.
    for m in 8..=max_m {
        for ell in 1..=max_ell.min(m / 2) {
            let sample = oracle::worst_case_sample(m, ell)?;
            let got = oracle::stump_partitions(&sample).len() as u64;
            let bound = crate::bound_engine::stump_pi2_bound(m, ell)?
                .to_u64()
                .expect("desk-scale bound fits u64");
            lines.push(VerifyLine {
                check: "stump-tightness-blocks".into(),
                m,
                ell,
                regime: "trivial".into(),
                oracle: got,
                bound: bound.to_string(),
                passed: got == bound,
            });
        }
    }
    // Random soundness for stumps.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 2..=max_m {
        for ell in 1..=max_ell.min(4) {
            let bound = crate::bound_engine::stump_pi2_bound(m, ell)?
                .to_u64()
                .expect("desk-scale bound fits u64");
            let mut worst = 0u64;
            for _ in 0..100 {
                let feats: Vec<Vec<f64>> = (0..m)
                    .map(|_| (0..ell).map(|_| rng.random::<f64>()).collect())
                    .collect();
                let s = Sample::new(feats, vec![0; m as usize], 1)?;
                worst = worst.max(oracle::stump_partitions(&s).len() as u64);
            }
            lines.push(VerifyLine {
                check: "stump-soundness-random".into(),
                m,
                ell,
                regime: "random x100".into(),
                oracle: worst,
                bound: bound.to_string(),
                passed: worst <= bound,
            });
        }
    }
    // Exhaustive tree counts against the recursion.
    let table = PartitionTable::new(crate::bound_engine::BoundMode::Exact);
    let mut shapes: Vec<TreeStructure> = Vec::new();
    for leaves in 2..=4u64 {
        shapes.extend(crate::tree_structure::enumerate(leaves)?);
    }
    for shape in &shapes {
        for m in 2..=max_m.min(8) {
            for ell in 1..=max_ell.min(3) {
                let mut worst_violation: Option<(u64, u64, u64)> = None;
                let mut seen_max = 0u64;
                for trial in 0..10 {
                    let feats: Vec<Vec<f64>> = (0..m)
                        .map(|_| (0..ell).map(|_| rng.random::<f64>()).collect())
                        .collect();
                    let s = Sample::new(feats, vec![0; m as usize], 1)?;
                    let counts = oracle::tree_partition_counts_up_to(shape, &s, 4)?;
                    for c in 1..=4u64 {
                        let bound = pi_upper_bound(shape, c, m, ell, &table)?;
                        let bound = bound.to_u64().unwrap_or(u64::MAX);
                        let got = counts[c as usize];
                        seen_max = seen_max.max(got);
                        if got > bound {
                            worst_violation = Some((c, got, bound));
                        }
                    }
                    let _ = trial;
                }
                lines.push(VerifyLine {
                    check: format!("tree-soundness {shape}"),
                    m,
                    ell,
                    regime: "random x10".into(),
                    oracle: seen_max,
                    bound: match worst_violation {
                        Some((c, got, bound)) => format!("VIOLATED c={c}: {got} > {bound}"),
                        None => "respected".into(),
                    },
                    passed: worst_violation.is_none(),
                });
            }
        }
    }

    let all_passed = lines.iter().all(|l| l.passed);
    Ok(VerifyReport { lines, all_passed })
}
