//! Three pruning algorithms over fitted trees.
//!
//! - [`prune_with_bound`]: greedily collapse whichever internal node most
//!   improves the structural risk bound, until no collapse improves it.
//!   Needs no cross-validation or randomness.
//! - [`prune_cart`]: cost-complexity pruning; the weakest-link sequence
//!   indexed by critical alpha, with alpha chosen by k-fold cross-validation
//!   on the training set.
//! - [`prune_mcart`]: identical machinery, but the per-subtree complexity
//!   charge `(d/m) ln(m/d)` with `d = L ln(L * ell)` replaces the leaf count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bound_engine::PartitionTable;
use crate::error::{Error, Result};
use crate::learner::{fit, DecisionTree, Sample};
use crate::risk_bound::{epsilon, BoundConfig};

/// Outcome of a pruning run.
#[derive(Debug, Clone)]
pub struct PruneResult {
    pub tree: DecisionTree,
    /// Final risk bound; bound-based pruner only.
    pub bound_value: Option<f64>,
    /// Selected cost-complexity alpha; CART variants only.
    pub chosen_alpha: Option<f64>,
    pub leaves_before: usize,
    pub leaves_after: usize,
    /// Seconds spent pruning.
    pub wall_time: f64,
}

/// Bound-based pruning. Returns the pruned tree and its risk bound.
pub fn prune_with_bound(
    t: &DecisionTree,
    s: &Sample,
    cfg: &BoundConfig,
    table: &PartitionTable,
) -> Result<PruneResult> {
    let (result, _) = prune_with_bound_trace(t, s, cfg, table)?;
    Ok(result)
}

/// As [`prune_with_bound`], also returning the bound of the input tree and of
/// every accepted collapse, in order. The trace is nonincreasing.
pub fn prune_with_bound_trace(
    t: &DecisionTree,
    s: &Sample,
    cfg: &BoundConfig,
    table: &PartitionTable,
) -> Result<(PruneResult, Vec<f64>)> {
    let start = Instant::now();
    let m = s.len() as u64;
    let n = s.n_classes as u64;
    let ell = s.num_features() as u64;
    let leaves_before = t.leaf_count();

    let mut tree = t.clone();
    // Histogram-based error accounting; equals routed errors for a tree fit
    // on (or rebound to) `s`, and keeps collapse deltas exact.
    let mut errors = tree.training_errors();
    let mut current = epsilon(m, errors as u64, &tree.structure(), n, ell, cfg, table)?;
    let mut trace = vec![current];

    loop {
        let candidates = tree.internal_nodes_preorder();
        if candidates.is_empty() {
            break;
        }
        // Best collapse candidate; later candidates win ties.
        let mut best: Option<(usize, f64, usize)> = None;
        for node in candidates {
            let k_after = errors - tree.subtree_training_errors(node) + tree.node_majority_errors(node);
            let shape = tree.structure_with_collapsed(node);
            let eps = epsilon(m, k_after as u64, &shape, n, ell, cfg, table)?;
            if best.as_ref().is_none_or(|(_, b, _)| eps <= *b) {
                best = Some((node, eps, k_after));
            }
        }
        let (node, eps, k_after) = best.expect("at least one candidate");
        if eps <= current {
            tree.collapse(node);
            errors = k_after;
            current = eps;
            trace.push(eps);
        } else {
            break;
        }
    }

    let leaves_after = tree.leaf_count();
    Ok((
        PruneResult {
            tree,
            bound_value: Some(current),
            chosen_alpha: None,
            leaves_before,
            leaves_after,
            wall_time: start.elapsed().as_secs_f64(),
        },
        trace,
    ))
}

/// Complexity charge of a subtree in weakest-link scoring.
trait Penalty {
    fn charge(&self, subtree_leaves: usize) -> f64;
}

/// Cost-complexity: collapsing a subtree with `L` leaves removes `L - 1`
/// leaves from the tree.
struct LeafCountPenalty;

impl Penalty for LeafCountPenalty {
    fn charge(&self, subtree_leaves: usize) -> f64 {
        (subtree_leaves - 1) as f64
    }
}

/// Capacity-shaped charge `(d/m) ln(m/d)` with `d = L ln(L * ell)`, zero once
/// `d` reaches `m`.
struct CapacityPenalty {
    m: usize,
    ell: usize,
}

impl Penalty for CapacityPenalty {
    fn charge(&self, subtree_leaves: usize) -> f64 {
        let l = subtree_leaves as f64;
        let d = l * (l * self.ell as f64).ln();
        let m = self.m as f64;
        if d >= m {
            0.0
        } else {
            (d / m) * (m / d).ln()
        }
    }
}

/// Weakest-link score of collapsing `node`: training error increase per unit
/// of complexity charge. Free collapses score zero; collapses with no
/// complexity reduction are never preferred.
fn link_score(tree: &DecisionTree, node: usize, m: usize, penalty: &dyn Penalty) -> f64 {
    let delta_errors =
        (tree.node_majority_errors(node) - tree.subtree_training_errors(node)) as f64 / m as f64;
    let charge = penalty.charge(tree.subtree_leaves(node));
    if charge <= 0.0 {
        if delta_errors == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        delta_errors / charge
    }
}

/// The weakest-link sequence of `t`: each round scores every internal node on
/// the round-start tree, collapses all minimizers (a minimizer inside an
/// already-collapsed subtree is subsumed), and records the minimal score as
/// the round's critical alpha. Ends at the root leaf. Alphas are
/// nondecreasing and leaf counts strictly decrease.
fn weakest_link_sequence_with(
    t: &DecisionTree,
    s: &Sample,
    penalty: &dyn Penalty,
) -> Vec<(f64, DecisionTree)> {
    let m = s.len();
    let mut tree = t.clone();
    let mut out = Vec::new();
    loop {
        let nodes = tree.internal_nodes_preorder();
        if nodes.is_empty() {
            return out;
        }
        // In a preorder listing the internal nodes of a subtree form a
        // contiguous run, so collapsed subtrees are skipped by run length.
        let runs: Vec<usize> = nodes.iter().map(|&n| tree.subtree_leaves(n) - 1).collect();
        let scores: Vec<f64> = nodes
            .iter()
            .map(|&n| link_score(&tree, n, m, penalty))
            .collect();
        let min_score = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let mut i = 0;
        while i < nodes.len() {
            if scores[i] == min_score {
                tree.collapse(nodes[i]);
                i += runs[i];
            } else {
                i += 1;
            }
        }
        out.push((min_score, tree.clone()));
    }
}

/// Cost-complexity weakest-link sequence of `t`, with the training error rate
/// as risk.
pub fn weakest_link_sequence(t: &DecisionTree, s: &Sample) -> Vec<(f64, DecisionTree)> {
    weakest_link_sequence_with(t, s, &LeafCountPenalty)
}

/// The sequence tree selected by `alpha`: the last collapse whose critical
/// alpha is `<= alpha`, or the unpruned tree when none is.
fn select_by_alpha<'a>(
    original: &'a DecisionTree,
    seq: &'a [(f64, DecisionTree)],
    alpha: f64,
) -> &'a DecisionTree {
    let mut pick = original;
    for (critical, tree) in seq {
        if *critical <= alpha {
            pick = tree;
        } else {
            break;
        }
    }
    pick
}

/// Candidate alphas: geometric means of consecutive critical alphas, plus 0
/// and infinity sentinels.
fn alpha_grid(seq: &[(f64, DecisionTree)]) -> Vec<f64> {
    let mut grid = vec![0.0];
    for w in seq.windows(2) {
        let g = (w[0].0 * w[1].0).sqrt();
        if g.is_finite() {
            grid.push(g);
        }
    }
    grid.push(f64::INFINITY);
    grid.dedup_by(|a, b| a == b);
    grid
}

fn accuracy(tree: &DecisionTree, s: &Sample) -> Result<f64> {
    Ok(1.0 - tree.count_errors(s)? as f64 / s.len() as f64)
}

fn cross_validated_prune(
    t: &DecisionTree,
    s: &Sample,
    folds: usize,
    seed: u64,
    penalty_for: &dyn Fn(usize) -> Box<dyn Penalty>,
) -> Result<PruneResult> {
    let start = Instant::now();
    if folds < 2 {
        return Err(Error::InvalidArgument("need at least two folds".into()));
    }
    let m = s.len();
    if m < folds {
        return Err(Error::InvalidArgument(format!(
            "{m} points cannot fill {folds} folds"
        )));
    }
    let leaves_before = t.leaf_count();

    let full_penalty = penalty_for(m);
    let full_seq = weakest_link_sequence_with(t, s, full_penalty.as_ref());
    let grid = alpha_grid(&full_seq);

    // Seeded shuffle, then contiguous chunks as validation folds.
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..m).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let chunk = m.div_ceil(folds);

    let mut mean_acc = vec![0.0f64; grid.len()];
    for fold in 0..folds {
        let lo = fold * chunk;
        let hi = ((fold + 1) * chunk).min(m);
        let val_idx: Vec<usize> = order[lo..hi].to_vec();
        let train_idx: Vec<usize> = order[..lo].iter().chain(&order[hi..]).copied().collect();
        if val_idx.is_empty() || train_idx.is_empty() {
            continue;
        }
        let train = s.subset(&train_idx);
        let val = s.subset(&val_idx);
        let fold_tree = fit(&train, t.max_leaves().max(1))?;
        let fold_penalty = penalty_for(train.len());
        let fold_seq = weakest_link_sequence_with(&fold_tree, &train, fold_penalty.as_ref());
        for (gi, &alpha) in grid.iter().enumerate() {
            let pick = select_by_alpha(&fold_tree, &fold_seq, alpha);
            mean_acc[gi] += accuracy(pick, &val)? / folds as f64;
        }
    }

    // Highest cross-validated accuracy; ties prefer the larger alpha.
    let mut best = 0usize;
    for gi in 1..grid.len() {
        if mean_acc[gi] >= mean_acc[best] {
            best = gi;
        }
    }
    let alpha = grid[best];
    let tree = select_by_alpha(t, &full_seq, alpha).clone();
    let leaves_after = tree.leaf_count();
    Ok(PruneResult {
        tree,
        bound_value: None,
        chosen_alpha: Some(alpha),
        leaves_before,
        leaves_after,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Cost-complexity pruning with `folds`-fold cross-validation on `s`.
pub fn prune_cart(t: &DecisionTree, s: &Sample, folds: usize, seed: u64) -> Result<PruneResult> {
    cross_validated_prune(t, s, folds, seed, &|_m| Box::new(LeafCountPenalty))
}

/// Modified cost-complexity pruning: the capacity-shaped charge replaces the
/// leaf count, both in weakest-link scoring and in the selection objective.
pub fn prune_mcart(
    t: &DecisionTree,
    s: &Sample,
    ell: usize,
    folds: usize,
    seed: u64,
) -> Result<PruneResult> {
    cross_validated_prune(t, s, folds, seed, &move |m| {
        Box::new(CapacityPenalty { m, ell })
    })
}
