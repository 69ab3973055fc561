//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).

use std::path::PathBuf;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use treebound::bound_engine::{
    growth_bound, partition_bound, stump_pi2_bound, stump_vcdim_exact, BoundMode, PartitionTable,
};
use treebound::data_io::{load, DatasetSpec, LabelColumn};
use treebound::experiment::{figure2_bounds, run_experiment, ExperimentConfig, Model};
use treebound::learner::{fit, Sample};
use treebound::oracle::{stump_partitions, tree_partition_counts_up_to, worst_case_sample};
use treebound::pruning::prune_with_bound_trace;
use treebound::risk_bound::{epsilon, BoundConfig};
use treebound::tree_structure::{enumerate, TreeStructure};

struct Criterion(&'static str);

impl Criterion {
    fn pass(self) {
        println!("ACCEPTANCE {:<28} PASS", self.0);
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        if std::thread::panicking() {
            println!("ACCEPTANCE {:<28} FAIL", self.0);
        }
    }
}

fn iris_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv")
}

/// The eleven catalog shapes at ell = 10 produce exactly the published
/// VC-dimension upper bounds.
#[test]
fn catalog_vcdim_bounds_exact() {
    let c = Criterion("catalog-vcdim-exact");
    let table = PartitionTable::new(BoundMode::Exact);
    let bounds: Vec<u64> = figure2_bounds(10, &table)
        .unwrap()
        .into_iter()
        .map(|(_, d)| d)
        .collect();
    assert_eq!(bounds, vec![1, 6, 16, 21, 25, 31, 32, 40, 38, 47, 52]);
    c.pass();
}

/// The stump VC dimension formula agrees with a direct scan for every
/// feature count up to one million.
#[test]
fn stump_vcdim_formula_exact() {
    let c = Criterion("stump-vcdim-exact");
    assert_eq!(stump_vcdim_exact(10).unwrap(), 6);

    // Independent oracle: central binomials via the multiplicative formula
    // in u128, then a linear scan per feature count.
    let mut centrals: Vec<u128> = Vec::new(); // centrals[d] = C(d, floor(d/2))
    for d in 0u128..40 {
        let k = d / 2;
        let mut v: u128 = 1;
        for i in 1..=k {
            v = v * (d - k + i) / i;
        }
        centrals.push(v);
    }
    for ell in 1..=1_000_000u64 {
        let two_ell = 2 * ell as u128;
        let mut expect = 1u64;
        while centrals[(expect + 1) as usize] <= two_ell {
            expect += 1;
        }
        assert_eq!(
            stump_vcdim_exact(ell).unwrap(),
            expect,
            "mismatch at ell={ell}"
        );
    }
    c.pass();
}

/// The worst-case samples realize exactly as many stump 2-partitions as the
/// bound allows: explicit tables for m <= 7 at every feature count up to 8,
/// shifted blocks whenever 2*ell <= m <= 10.
#[test]
fn stump_bound_tight_at_desk_scale() {
    let c = Criterion("stump-bound-tightness");
    for m in 1..=7u64 {
        for ell in 1..=8u64 {
            let sample = worst_case_sample(m, ell).unwrap();
            let realized = stump_partitions(&sample).len() as u64;
            let bound = stump_pi2_bound(m, ell).unwrap().to_u64().unwrap();
            assert_eq!(realized, bound, "tables not tight at m={m}, ell={ell}");
        }
    }
    for m in 2..=10u64 {
        for ell in 1..=m / 2 {
            let sample = worst_case_sample(m, ell).unwrap();
            let realized = stump_partitions(&sample).len() as u64;
            let bound = stump_pi2_bound(m, ell).unwrap().to_u64().unwrap();
            assert_eq!(realized, bound, "blocks not tight at m={m}, ell={ell}");
        }
    }
    c.pass();
}

/// Exhaustive partition counts never exceed the recursive bound: every shape
/// with at most three internal nodes, m <= 8, ell <= 3, c <= 4, 100 random
/// distinct-valued samples per cell.
#[test]
fn recursive_bound_sound_against_enumeration() {
    let c = Criterion("recursive-bound-soundness");
    let mut shapes = vec![TreeStructure::Leaf];
    for leaves in 2..=4u64 {
        shapes.extend(enumerate(leaves).unwrap());
    }
    let table = PartitionTable::new(BoundMode::Exact);

    let mut cells = Vec::new();
    for shape in &shapes {
        for m in 1..=8u64 {
            for ell in 1..=3u64 {
                cells.push((shape.clone(), m, ell));
            }
        }
    }
    cells.par_iter().for_each(|(shape, m, ell)| {
        let mut rng = ChaCha8Rng::seed_from_u64(m * 1000 + ell * 100 + shape.leaf_count());
        let bounds: Vec<u64> = (0..=4u64)
            .map(|c| {
                if c == 0 {
                    0
                } else {
                    partition_bound(shape, c, *m, *ell, &table)
                        .unwrap()
                        .to_u64()
                        .unwrap_or(u64::MAX)
                }
            })
            .collect();
        for _ in 0..100 {
            // Random permutation per feature keeps all values distinct.
            let mut sample_features = vec![vec![0.0f64; *ell as usize]; *m as usize];
            for f in 0..*ell {
                let mut values: Vec<usize> = (0..*m as usize).collect();
                for i in (1..values.len()).rev() {
                    let j = rng.random_range(0..=i);
                    values.swap(i, j);
                }
                for (p, &v) in values.iter().enumerate() {
                    sample_features[p][f as usize] = v as f64;
                }
            }
            let s = Sample::new(sample_features, vec![0; *m as usize], 1).unwrap();
            let counts = tree_partition_counts_up_to(shape, &s, 4).unwrap();
            for part_count in 1..=4usize {
                assert!(
                    counts[part_count] <= bounds[part_count],
                    "oracle beat the bound: {shape} m={m} ell={ell} c={part_count}: {} > {}",
                    counts[part_count],
                    bounds[part_count]
                );
            }
        }
    });
    c.pass();
}

/// Shattering consistency: the stump growth bound at six points equals 2^6,
/// and the 2-partition bound at seven points falls below 2^6 - 1, so the
/// VC scan stops exactly at six.
#[test]
fn stump_shattering_consistency() {
    let c = Criterion("stump-shattering");
    let table = PartitionTable::new(BoundMode::Exact);
    let stump = TreeStructure::stump();
    let tau = growth_bound(&stump, 6, 2, 10, &table).unwrap();
    assert_eq!(tau.to_u64().unwrap(), 64);
    let pi7 = partition_bound(&stump, 2, 7, 10, &table).unwrap();
    assert!(pi7.to_u64().unwrap() < (1 << 6) - 1);
    c.pass();
}

/// Bound-based pruning on 200 randomized fixture trees: accepted bounds never
/// increase, the loop terminates within the internal node budget, and leaves
/// never multiply.
#[test]
fn bound_pruner_properties_hold() {
    let c = Criterion("bound-pruner-properties");
    let cfg = BoundConfig::default();
    let table = cfg.table();
    (0..200u64).into_par_iter().for_each(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(20..=60);
        let ell = rng.random_range(2..=5);
        let n_classes = rng.random_range(2..=4);
        let max_leaves = rng.random_range(4..=25);
        let features: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..ell).map(|_| rng.random::<f64>() * 10.0).collect())
            .collect();
        let labels: Vec<u32> = (0..m).map(|_| rng.random_range(0..n_classes)).collect();
        let s = Sample::new(features, labels, n_classes).unwrap();
        let tree = fit(&s, max_leaves).unwrap();
        let internal = tree.leaf_count() - 1;

        let (result, trace) = prune_with_bound_trace(&tree, &s, &cfg, &table).unwrap();
        assert!(
            trace.windows(2).all(|w| w[1] <= w[0]),
            "bound rose in trace {trace:?} (seed {seed})"
        );
        assert!(trace.len() <= internal + 1, "too many accepted steps (seed {seed})");
        assert!(result.leaves_after <= result.leaves_before);
        assert_eq!(result.bound_value.unwrap(), *trace.last().unwrap());
    });
    c.pass();
}

/// Benchmark sanity on the bundled iris data, 25 seeded repetitions: both the
/// unpruned tree and the bound-pruned tree keep mean test accuracy within the
/// published band, and the pruner actually prunes without collapsing to a
/// single leaf.
#[test]
fn iris_benchmark_sanity() {
    let c = Criterion("iris-benchmark");
    let spec = DatasetSpec::csv(iris_path(), LabelColumn::Name("species".into()), true);
    let sample = load(&spec).unwrap();
    assert_eq!(sample.len(), 150);
    assert_eq!(sample.n_classes, 3);

    let cfg = ExperimentConfig {
        repetitions: 25,
        models: vec![Model::Original, Model::Bound],
        base_seed: 0,
        ..ExperimentConfig::default()
    };
    let table = cfg.bound.table();
    let report = run_experiment(&sample, "iris", &cfg, &table).unwrap();
    assert!(report.failures.is_empty(), "failures: {:?}", report.failures);

    let row = |model: Model| {
        report
            .rows
            .iter()
            .find(|r| r.model == model)
            .expect("model present")
    };
    let original = row(Model::Original);
    let bound = row(Model::Bound);
    assert_eq!(original.repetitions, 25);
    assert_eq!(bound.repetitions, 25);
    assert!(
        original.test_acc.mean >= 0.89 && original.test_acc.mean <= 0.97,
        "unpruned mean test accuracy {} outside [0.89, 0.97]",
        original.test_acc.mean
    );
    assert!(
        bound.test_acc.mean >= 0.89 && bound.test_acc.mean <= 0.97,
        "bound-pruned mean test accuracy {} outside [0.89, 0.97]",
        bound.test_acc.mean
    );
    assert!(
        bound.leaves.mean > 1.0 && bound.leaves.mean < 40.0,
        "bound-pruned mean leaves {} not in (1, 40)",
        bound.leaves.mean
    );
    c.pass();
}

/// The risk bound strictly increases with the error count.
#[test]
fn risk_bound_monotone_in_errors() {
    let c = Criterion("epsilon-monotone-in-k");
    let cfg = BoundConfig {
        bound_mode: BoundMode::Exact,
        ..BoundConfig::default()
    };
    let table = cfg.table();
    let stump = TreeStructure::stump();
    let values: Vec<f64> = (0..=50u64)
        .map(|k| epsilon(100, k, &stump, 2, 5, &cfg, &table).unwrap())
        .collect();
    assert!(
        values.windows(2).all(|w| w[1] > w[0]),
        "epsilon not strictly increasing: {values:?}"
    );
    c.pass();
}
