//! Brute-force ground truth for the partition bounds.
//!
//! Everything a decision tree can do to a sample is determined by the
//! per-feature orderings of its points, so a sample is represented here by a
//! permutation matrix: row `i` lists the point indices sorted ascending by
//! feature `i`. This module enumerates realizable partitions exhaustively on
//! desk-scale samples and constructs the known worst-case samples whose
//! stump-realizable 2-partition counts attain the stump bound.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::learner::Sample;
use crate::tree_structure::TreeStructure;

/// Hand-crafted permutation tables, one per sample size up to seven, whose
/// prefixes of any length realize the maximum number of stump 2-partitions.
const SEPARATING_PERMS_M1: &[&[u32]] = &[&[1]];
const SEPARATING_PERMS_M2: &[&[u32]] = &[&[1, 2]];
const SEPARATING_PERMS_M3: &[&[u32]] = &[&[1, 2, 3], &[1, 3, 2]];
const SEPARATING_PERMS_M4: &[&[u32]] = &[&[1, 2, 4, 3], &[2, 3, 1, 4], &[1, 3, 2, 4]];
const SEPARATING_PERMS_M5: &[&[u32]] = &[
    &[1, 2, 3, 5, 4],
    &[2, 3, 4, 1, 5],
    &[3, 4, 1, 2, 5],
    &[1, 3, 5, 2, 4],
    &[1, 4, 2, 3, 5],
];
const SEPARATING_PERMS_M6: &[&[u32]] = &[
    &[1, 2, 3, 6, 5, 4],
    &[2, 3, 4, 1, 6, 5],
    &[3, 4, 5, 2, 1, 6],
    &[1, 3, 6, 5, 4, 2],
    &[3, 5, 2, 1, 6, 4],
    &[5, 1, 4, 3, 2, 6],
    &[1, 4, 3, 6, 2, 5],
    &[3, 6, 5, 1, 2, 4],
    &[1, 2, 5, 3, 4, 6],
    &[1, 3, 5, 2, 4, 6],
];
const SEPARATING_PERMS_M7: &[&[u32]] = &[
    &[1, 2, 3, 4, 5, 6, 7],
    &[2, 3, 4, 7, 1, 5, 6],
    &[3, 4, 7, 6, 2, 1, 5],
    &[4, 7, 6, 2, 5, 1, 3],
    &[1, 4, 3, 7, 6, 2, 5],
    &[5, 7, 4, 3, 2, 1, 6],
    &[3, 7, 5, 6, 1, 2, 4],
    &[2, 7, 4, 1, 6, 3, 5],
    &[2, 6, 3, 7, 1, 4, 5],
    &[1, 7, 3, 5, 2, 4, 6],
    &[3, 6, 7, 1, 2, 4, 5],
    &[1, 4, 7, 6, 2, 3, 5],
    &[1, 2, 7, 3, 4, 5, 6],
    &[1, 5, 7, 2, 3, 4, 6],
    &[1, 6, 7, 2, 3, 4, 5],
    &[2, 3, 7, 5, 1, 4, 6],
    &[2, 5, 7, 4, 3, 6, 1],
    &[2, 6, 7, 1, 3, 4, 5],
];

fn separating_perms(m: u64) -> &'static [&'static [u32]] {
    match m {
        1 => SEPARATING_PERMS_M1,
        2 => SEPARATING_PERMS_M2,
        3 => SEPARATING_PERMS_M3,
        4 => SEPARATING_PERMS_M4,
        5 => SEPARATING_PERMS_M5,
        6 => SEPARATING_PERMS_M6,
        7 => SEPARATING_PERMS_M7,
        _ => unreachable!("tables cover m <= 7 only"),
    }
}

/// Per-feature point orderings of a sample: row `i` is the permutation of
/// `1..=m` sorting feature `i` ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMatrix {
    rows: Vec<Vec<u32>>,
}

impl PermutationMatrix {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<PermutationMatrix> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidArgument("empty permutation matrix".into()));
        }
        let m = rows[0].len();
        for row in &rows {
            let mut seen = vec![false; m + 1];
            if row.len() != m {
                return Err(Error::InvalidArgument("ragged permutation matrix".into()));
            }
            for &v in row {
                if v == 0 || v as usize > m || seen[v as usize] {
                    return Err(Error::InvalidArgument(format!("row is not a permutation of 1..={m}")));
                }
                seen[v as usize] = true;
            }
        }
        Ok(PermutationMatrix { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// The induced sample: point `sigma_j` of feature `i` gets value `j`, so
    /// feature `i` orders the points exactly as row `i` and all values are
    /// distinct per feature. Labels are immaterial for partition counting.
    pub fn to_sample(&self) -> Sample {
        let m = self.rows[0].len();
        let ell = self.rows.len();
        let mut features = vec![vec![0.0f64; ell]; m];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &point) in row.iter().enumerate() {
                features[(point - 1) as usize][i] = (j + 1) as f64;
            }
        }
        Sample {
            features,
            labels: vec![0; m],
            n_classes: 1,
            feature_names: None,
        }
    }
}

/// Permutation matrix of a worst-case sample: `m` points on `ell` features
/// whose stump-realizable 2-partition count attains [`stump_pi2_bound`].
/// Supported regimes: `m <= 7` (explicit tables, truncated to `ell` rows or
/// padded with identity permutations) and `2 * ell <= m` (a shifted block
/// construction realizing two distinct partitions per feature and part
/// size).
pub fn worst_case_matrix(m: u64, ell: u64) -> Result<PermutationMatrix> {
    if m == 0 || ell == 0 {
        return Err(Error::InvalidArgument("worst_case_matrix requires m, ell >= 1".into()));
    }
    if m <= 7 {
        let table = separating_perms(m);
        let mut rows: Vec<Vec<u32>> = table
            .iter()
            .take(ell as usize)
            .map(|r| r.to_vec())
            .collect();
        while (rows.len() as u64) < ell {
            rows.push((1..=m as u32).collect());
        }
        return PermutationMatrix::new(rows);
    }
    if 2 * ell <= m {
        let mut rows = Vec::with_capacity(ell as usize);
        for i in 1..=ell {
            let mut row: Vec<u32> = (i..i + ell).map(|v| v as u32).collect();
            row.extend((2 * ell + 1..=m).map(|v| v as u32));
            row.extend((1..i).rev().map(|v| v as u32));
            row.extend((ell + i..=2 * ell).rev().map(|v| v as u32));
            rows.push(row);
        }
        return PermutationMatrix::new(rows);
    }
    Err(Error::UnsupportedConstruction(format!(
        "no worst-case sample construction for m={m}, ell={ell}; need m <= 7 or 2*ell <= m"
    )))
}

/// The sample induced by [`worst_case_matrix`].
pub fn worst_case_sample(m: u64, ell: u64) -> Result<Sample> {
    Ok(worst_case_matrix(m, ell)?.to_sample())
}

/// A 2-partition of point indices, encoded as the bitmask of the side
/// containing point 0.
pub type TwoPartition = u64;

/// The distinct 2-partitions of `s` realizable by a single threshold split:
/// for each feature, every cut strictly between distinct consecutive values.
pub fn stump_partitions(s: &Sample) -> HashSet<TwoPartition> {
    let m = s.len();
    assert!(m <= 64, "bitmask representation caps at 64 points");
    let full: u64 = if m == 64 { !0 } else { (1u64 << m) - 1 };
    let mut out = HashSet::new();
    for feature in 0..s.num_features() {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            s.features[a][feature]
                .partial_cmp(&s.features[b][feature])
                .expect("non-finite feature value")
                .then(a.cmp(&b))
        });
        let mut mask = 0u64;
        for w in 0..m - 1 {
            mask |= 1u64 << order[w];
            if s.features[order[w]][feature] < s.features[order[w + 1]][feature] {
                let canonical = if mask & 1 == 1 { mask } else { !mask & full };
                out.insert(canonical);
            }
        }
    }
    out
}

/// Exact number of distinct c-partitions the shape `t` realizes on `s`:
/// enumerates every assignment of (feature, threshold interval) to the
/// internal nodes, routes the points, and merges nonempty leaves into `c`
/// groups in every possible way. Guarded to desk scale.
pub fn tree_partitions_count(t: &TreeStructure, s: &Sample, c: u64) -> Result<u64> {
    let counts = tree_partition_counts_up_to(t, s, c)?;
    Ok(counts[c as usize])
}

/// Exact counts for every part count `0..=max_c` in one enumeration pass.
pub fn tree_partition_counts_up_to(
    t: &TreeStructure,
    s: &Sample,
    max_c: u64,
) -> Result<Vec<u64>> {
    let m = s.len();
    let ell = s.num_features();
    let n_nodes = t.node_count();
    if n_nodes > 3 || m > 10 || ell > 4 {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration is guarded to 3 internal nodes, 10 points, 4 features; got {n_nodes} nodes, {m} points, {ell} features"
        )));
    }
    let mut sets: Vec<HashSet<Vec<u16>>> = (0..=max_c).map(|_| HashSet::new()).collect();
    if t.is_leaf() || n_nodes == 0 {
        // Single leaf: the lone 1-partition.
        if max_c >= 1 && m >= 1 {
            let full = ((1u32 << m) - 1) as u16;
            sets[1].insert(vec![full]);
        }
        return Ok(sets.iter().map(|s| s.len() as u64).collect());
    }

    // Candidate thresholds per feature: one representative inside each of the
    // <= m+1 intervals delimited by the distinct sorted values. A cut between
    // equal values is not a split, so only distinct values matter.
    let mut thresholds: Vec<Vec<f64>> = Vec::with_capacity(ell);
    for feature in 0..ell {
        let mut values: Vec<f64> = s.features.iter().map(|row| row[feature]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite feature value"));
        values.dedup();
        let mut cuts = Vec::with_capacity(values.len() + 1);
        cuts.push(values[0] - 1.0);
        for w in values.windows(2) {
            cuts.push((w[0] + w[1]) / 2.0);
        }
        cuts.push(values[values.len() - 1] + 1.0);
        thresholds.push(cuts);
    }

    // Flatten the shape into preorder nodes; leaves get stable ids.
    struct FlatNode {
        // Either a child node id or a leaf id.
        left: FlatChild,
        right: FlatChild,
    }
    #[derive(Clone, Copy)]
    enum FlatChild {
        Node(usize),
        Leaf(usize),
    }
    fn flatten(
        t: &TreeStructure,
        nodes: &mut Vec<FlatNode>,
        n_leaves: &mut usize,
    ) -> FlatChild {
        match t {
            TreeStructure::Leaf => {
                *n_leaves += 1;
                FlatChild::Leaf(*n_leaves - 1)
            }
            TreeStructure::Node(l, r) => {
                let id = nodes.len();
                nodes.push(FlatNode {
                    left: FlatChild::Leaf(usize::MAX),
                    right: FlatChild::Leaf(usize::MAX),
                });
                let left = flatten(l, nodes, n_leaves);
                let right = flatten(r, nodes, n_leaves);
                nodes[id].left = left;
                nodes[id].right = right;
                FlatChild::Node(id)
            }
        }
    }
    let mut nodes = Vec::new();
    let mut n_leaves = 0usize;
    let root = flatten(t, &mut nodes, &mut n_leaves);

    // All (feature, threshold) rules, shared by every node.
    let mut rules: Vec<(usize, f64)> = Vec::new();
    for (feature, cuts) in thresholds.iter().enumerate() {
        for &cut in cuts {
            rules.push((feature, cut));
        }
    }

    let mut assignment = vec![0usize; nodes.len()];
    loop {
        // Route every point to a leaf under the current rule assignment.
        let mut leaf_masks = vec![0u16; n_leaves];
        for (p, row) in s.features.iter().enumerate() {
            let mut cur = root;
            loop {
                match cur {
                    FlatChild::Leaf(leaf) => {
                        leaf_masks[leaf] |= 1 << p;
                        break;
                    }
                    FlatChild::Node(id) => {
                        let (feature, cut) = rules[assignment[id]];
                        cur = if row[feature] <= cut {
                            nodes[id].left
                        } else {
                            nodes[id].right
                        };
                    }
                }
            }
        }
        let occupied: Vec<u16> = leaf_masks.iter().copied().filter(|&m| m != 0).collect();
        collect_merges(&occupied, max_c, &mut sets);

        // Advance the mixed-radix assignment counter.
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                return Ok(sets.iter().map(|s| s.len() as u64).collect());
            }
            assignment[pos] += 1;
            if assignment[pos] < rules.len() {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Insert every c-partition obtainable by grouping the occupied leaves into
/// `1..=max_c` nonempty groups, via restricted-growth-string enumeration.
fn collect_merges(occupied: &[u16], max_c: u64, sets: &mut [HashSet<Vec<u16>>]) {
    let n = occupied.len();
    if n == 0 {
        return;
    }
    let mut assign = vec![0usize; n];
    loop {
        let groups = assign.iter().max().unwrap() + 1;
        if (groups as u64) <= max_c {
            let mut parts = vec![0u16; groups];
            for (leaf, &g) in assign.iter().enumerate() {
                parts[g] |= occupied[leaf];
            }
            parts.sort_by_key(|p| p.trailing_zeros());
            sets[groups].insert(parts);
        }
        // Next restricted growth string: assign[i] may rise to
        // 1 + max(assign[..i]).
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let cap = assign[..i].iter().max().unwrap() + 1;
            if assign[i] < cap {
                assign[i] += 1;
                for a in assign[i + 1..].iter_mut() {
                    *a = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}
