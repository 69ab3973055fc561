//! Upper bounds on partitioning functions, growth functions and VC dimension
//! of binary decision tree classes over real-valued features.
//!
//! The central quantity is the c-partitioning function of a tree shape: the
//! largest number of distinct c-partitions the class can realize on any
//! m-point sample with `ell` features. For a stump it is bounded by
//! `(1/2) sum_k min(2*ell, C(m, k))`, and for general shapes by a recursion
//! over the two subtrees that combines their partition counts through pairwise
//! part unions. The 2-partitioning bound drives the VC-dimension scan: the
//! dimension of a shape is the largest `m` whose bound still reaches
//! `2^(m-1) - 1`.
//!
//! All values are exact big integers; the recursion memoizes into a
//! [`PartitionTable`] keyed by canonical subtree, part count, sample size and
//! feature count. The table is shared freely across queries and threads.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::combinatorics::{binomial, factorial, stirling2, BigCount};
use crate::error::{Error, Result};
use crate::tree_structure::TreeStructure;

/// Selects the exact recursion or the faster, looser variant that replaces
/// the sum over root split sizes with its term count times the largest term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Exact,
    Fast,
}

type TableKey = (Arc<str>, u64, u64, u64); // (canonical shape, c, m, ell)

/// Memo table for partition bounds. Entries are deterministic functions of
/// the key, so racing recomputation is harmless; inserts are idempotent.
pub struct PartitionTable {
    mode: BoundMode,
    entries: DashMap<TableKey, BigCount>,
}

impl PartitionTable {
    pub fn new(mode: BoundMode) -> Self {
        PartitionTable {
            mode,
            entries: DashMap::new(),
        }
    }

    pub fn mode(&self) -> BoundMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best-effort load of a cache file previously written by [`save`].
    /// Lines are `shape,c,m,ell,value` in decimal; unparsable lines are
    /// skipped. Returns `(loaded, skipped)`. Keep separate files per bound
    /// mode: the format does not record which mode produced a value.
    ///
    /// [`save`]: PartitionTable::save
    pub fn load(&self, path: &Path) -> Result<(usize, usize)> {
        let text = fs::read_to_string(path)?;
        let mut loaded = 0usize;
        let mut skipped = 0usize;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_cache_line(line) {
                Some((key, value)) => {
                    self.entries.insert(key, value);
                    loaded += 1;
                }
                None => skipped += 1,
            }
        }
        Ok((loaded, skipped))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut lines: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                let (shape, c, m, ell) = e.key();
                format!("{shape},{c},{m},{ell},{}", e.value())
            })
            .collect();
        lines.sort();
        let mut file = fs::File::create(path)?;
        for line in &lines {
            writeln!(file, "{line}")?;
        }
        Ok(())
    }
}

fn parse_cache_line(line: &str) -> Option<(TableKey, BigCount)> {
    let mut parts = line.split(',');
    let shape = parts.next()?;
    if shape.parse::<TreeStructure>().is_err() {
        return None;
    }
    let c = parts.next()?.parse::<u64>().ok()?;
    let m = parts.next()?.parse::<u64>().ok()?;
    let ell = parts.next()?.parse::<u64>().ok()?;
    let value = parts.next()?.parse::<BigUint>().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(((Arc::from(shape), c, m, ell), value))
}

/// Canonicalized shape with cached leaf counts and memo keys, built once per
/// query so the recursion never re-serializes subtrees.
struct CanonNode {
    key: Arc<str>,
    leaves: u64,
    // (left, right, twin) where twin means both subtrees share a canonical
    // form and the root sum double-counts every split.
    children: Option<(Box<CanonNode>, Box<CanonNode>, bool)>,
}

impl CanonNode {
    fn build(t: &TreeStructure) -> CanonNode {
        let canon = t.canonical_form();
        CanonNode::from_canonical(&canon)
    }

    fn from_canonical(t: &TreeStructure) -> CanonNode {
        match t {
            TreeStructure::Leaf => CanonNode {
                key: Arc::from("L"),
                leaves: 1,
                children: None,
            },
            TreeStructure::Node(l, r) => {
                let l = CanonNode::from_canonical(l);
                let r = CanonNode::from_canonical(r);
                let twin = l.key == r.key;
                CanonNode {
                    key: Arc::from(format!("({}{})", l.key, r.key)),
                    leaves: l.leaves + r.leaves,
                    children: Some((Box::new(l), Box::new(r), twin)),
                }
            }
        }
    }
}

/// Upper bound on the number of distinct 2-partitions a stump with `ell`
/// features can realize on `m` points: `(1/2) sum_{k=1}^{m-1} min(2*ell,
/// C(m, k))`. The pre-halving sum pairs `k` with `m - k` and its middle term
/// is even, so the division is exact. Zero for `m <= 1`.
pub fn stump_pi2_bound(m: u64, ell: u64) -> Result<BigCount> {
    if ell == 0 {
        return Err(Error::InvalidArgument("stump_pi2_bound requires ell >= 1".into()));
    }
    if m <= 1 {
        return Ok(BigUint::zero());
    }
    let two_ell = BigUint::from(ell) << 1;
    let mut sum = BigUint::zero();
    let mut binom = BigUint::from(m); // C(m, 1)
    for k in 1..m {
        sum += (&binom).min(&two_ell).clone();
        if k < m - 1 {
            binom = binom * (m - k) / (k + 1);
        }
    }
    debug_assert!(!sum.bit(0), "pre-halving stump sum must be even");
    Ok(sum >> 1)
}

/// Central binomial coefficients `C(d, floor(d/2))` for d = 0.. as long as
/// they fit a u64; the sequence outgrows any practical feature count within
/// a few dozen entries.
static CENTRAL_BINOMIALS: std::sync::LazyLock<Vec<u64>> = std::sync::LazyLock::new(|| {
    use num_traits::ToPrimitive;
    let mut v = Vec::new();
    for d in 0u64.. {
        match binomial(d, d / 2).to_u64() {
            Some(x) => v.push(x),
            None => break,
        }
    }
    v
});

/// Exact VC dimension of the stump class on `ell` real-valued features: the
/// largest `d` with `2*ell >= C(d, floor(d/2))`.
pub fn stump_vcdim_exact(ell: u64) -> Result<u64> {
    if ell == 0 {
        return Err(Error::InvalidArgument("stump_vcdim_exact requires ell >= 1".into()));
    }
    let two_ell = 2u128 * ell as u128;
    let table = &*CENTRAL_BINOMIALS;
    let mut d = 1usize;
    while d + 1 < table.len() && table[d + 1] as u128 <= two_ell {
        d += 1;
    }
    if d + 1 < table.len() {
        return Ok(d as u64);
    }
    // Feature counts beyond the u64 table: continue in exact arithmetic.
    let two_ell = BigUint::from(ell) << 1;
    let mut d = d as u64;
    while binomial(d + 1, (d + 1) >> 1) <= two_ell {
        d += 1;
    }
    Ok(d)
}

/// Upper bound on the c-partitioning function of shape `t`, exact recursion.
/// The table must have been created with [`BoundMode::Exact`].
pub fn partition_bound(
    t: &TreeStructure,
    c: u64,
    m: u64,
    ell: u64,
    table: &PartitionTable,
) -> Result<BigCount> {
    if table.mode != BoundMode::Exact {
        return Err(Error::InvalidArgument(
            "partition_bound needs an exact-mode table".into(),
        ));
    }
    pi_upper_bound(t, c, m, ell, table)
}

/// Looser but faster variant: the root recursion evaluates each subtree once
/// at its largest split size instead of summing over all split sizes. Always
/// at least the exact-mode value. The table must be in [`BoundMode::Fast`].
pub fn partition_bound_fast(
    t: &TreeStructure,
    c: u64,
    m: u64,
    ell: u64,
    table: &PartitionTable,
) -> Result<BigCount> {
    if table.mode != BoundMode::Fast {
        return Err(Error::InvalidArgument(
            "partition_bound_fast needs a fast-mode table".into(),
        ));
    }
    pi_upper_bound(t, c, m, ell, table)
}

/// Partition bound in the mode the table was created with.
pub fn pi_upper_bound(
    t: &TreeStructure,
    c: u64,
    m: u64,
    ell: u64,
    table: &PartitionTable,
) -> Result<BigCount> {
    if ell == 0 {
        return Err(Error::InvalidArgument("partition bounds require ell >= 1".into()));
    }
    let node = CanonNode::build(t);
    Ok(pi_node(&node, c, m, ell, table))
}

fn pi_node(node: &CanonNode, c: u64, m: u64, ell: u64, table: &PartitionTable) -> BigCount {
    let leaves = node.leaves;
    if c == 0 {
        return if m == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if c > m || c > leaves {
        return BigUint::zero();
    }
    if c == m || c == 1 || m == 1 {
        return BigUint::one();
    }
    if m <= leaves {
        return stirling2(m, c);
    }
    let key = (node.key.clone(), c, m, ell);
    if let Some(v) = table.entries.get(&key) {
        return v.clone();
    }
    // m > leaves >= 2 here, so the node cannot be a leaf.
    let (left, right, twin) = node.children.as_ref().expect("non-leaf");
    let mut n = match table.mode {
        BoundMode::Exact => {
            let two_ell = BigUint::from(ell) << 1;
            let lo = left.leaves;
            let hi = m - right.leaves;
            let mut binom = binomial(m, lo);
            let mut acc = BigUint::zero();
            for k in lo..=hi {
                let cuts = (&binom).min(&two_ell).clone();
                if !cuts.is_zero() {
                    let inner = union_sum(left, right, c, k, m - k, ell, table);
                    acc += cuts * inner;
                }
                if k < hi {
                    binom = binom * (m - k) / (k + 1);
                }
            }
            acc
        }
        BoundMode::Fast => {
            // Term count of the split-size sum times its largest summand;
            // both subtree bounds are nondecreasing in the sample size.
            let terms = m - leaves + 1;
            let inner = union_sum(left, right, c, m - right.leaves, m - left.leaves, ell, table);
            BigUint::from(terms) * (BigUint::from(ell) << 1) * inner
        }
    };
    if *twin {
        // Twin subtrees make the split-size sum symmetric; halving the
        // completed sum removes the double counting. An upper bound must
        // round up if exactness ever fails.
        if n.bit(0) {
            eprintln!(
                "warning: odd pre-halving partition sum for {} (c={c}, m={m}, ell={ell}); rounding up",
                node.key
            );
            n += BigUint::one();
        }
        n >>= 1;
    }
    if !clamp_certainly_slack(&n, m, c) {
        let ceiling = stirling2(m, c);
        if n > ceiling {
            n = ceiling;
        }
    }
    table.entries.insert(key, n.clone());
    n
}

/// Cheap certificate that `n < S(m, c)`, so the Stirling ceiling need not be
/// materialized: `S(m, c) >= c^(m-c) / c!` by counting surjections, and large
/// samples make that lower bound astronomically bigger than any recursion
/// value.
fn clamp_certainly_slack(n: &BigUint, m: u64, c: u64) -> bool {
    if c < 2 || m <= c {
        return false;
    }
    let ln_factorial: f64 = (2..=c).map(|i| (i as f64).ln()).sum();
    let ln_lower = (m - c) as f64 * (c as f64).ln() - ln_factorial;
    match crate::combinatorics::ln_big(n) {
        Ok(ln_n) => ln_n + 2.0 < ln_lower,
        Err(_) => false,
    }
}

/// Sum over part counts (a, b) of the two subtrees, weighted by the number of
/// ways to merge an a-partition and a b-partition into a c-partition:
/// `C(a, c-b) C(b, c-a) (a+b-c)!`.
fn union_sum(
    left: &CanonNode,
    right: &CanonNode,
    c: u64,
    m_left: u64,
    m_right: u64,
    ell: u64,
    table: &PartitionTable,
) -> BigCount {
    let mut sum = BigUint::zero();
    for a in 1..=c {
        let pi_left = pi_node(left, a, m_left, ell, table);
        if pi_left.is_zero() {
            continue;
        }
        for b in c.saturating_sub(a).max(1)..=c {
            let pi_right = pi_node(right, b, m_right, ell, table);
            if pi_right.is_zero() {
                continue;
            }
            let ways = binomial(a, c - b) * binomial(b, c - a) * factorial(a + b - c);
            sum += ways * &pi_left * pi_right;
        }
    }
    sum
}

/// Upper bound on the growth function of shape `t` with `n` classes:
/// `sum_a (n)_a * pi^a(m)`. Terms with more parts than classes vanish.
pub fn growth_bound(
    t: &TreeStructure,
    m: u64,
    n: u64,
    ell: u64,
    table: &PartitionTable,
) -> Result<BigCount> {
    if m == 0 {
        return Err(Error::InvalidArgument("growth_bound requires m >= 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("growth_bound requires n >= 2".into()));
    }
    if ell == 0 {
        return Err(Error::InvalidArgument("growth_bound requires ell >= 1".into()));
    }
    let node = CanonNode::build(t);
    let mut sum = BigUint::zero();
    for a in 1..=node.leaves.min(n).min(m) {
        let labelings = crate::combinatorics::falling_factorial(n, a);
        sum += labelings * pi_node(&node, a, m, ell, table);
    }
    Ok(sum)
}

/// Upper bound on the VC dimension of shape `t`: scan `m` upward from one
/// past the leaf count while the 2-partition bound still reaches
/// `2^(m-1) - 1`. A leaf has dimension one. The scan provably terminates; a
/// generous iteration cap turns a hypothetical runaway into an error instead
/// of a hang.
pub fn vcdim_upper_bound(t: &TreeStructure, ell: u64, table: &PartitionTable) -> Result<u64> {
    if ell == 0 {
        return Err(Error::InvalidArgument("vcdim_upper_bound requires ell >= 1".into()));
    }
    if t.is_leaf() {
        return Ok(1);
    }
    let node = CanonNode::build(t);
    let n_nodes = node.leaves - 1;
    let cap = 10 * (n_nodes + 1) * (64 + BigUint::from(n_nodes * ell).bits());
    let mut m = node.leaves + 1;
    let mut iterations = 0u64;
    loop {
        let threshold = (BigUint::one() << (m - 1)) - BigUint::one();
        if pi_node(&node, 2, m, ell, table) < threshold {
            return Ok(m - 1);
        }
        m += 1;
        iterations += 1;
        if iterations > cap {
            return Err(Error::Internal(format!(
                "VC dimension scan for {} exceeded {cap} iterations",
                node.key
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_structure::enumerate;

    fn exact_table() -> PartitionTable {
        PartitionTable::new(BoundMode::Exact)
    }

    fn fast_table() -> PartitionTable {
        PartitionTable::new(BoundMode::Fast)
    }

    fn stump() -> TreeStructure {
        TreeStructure::stump()
    }

    fn chain(n_nodes: u64) -> TreeStructure {
        let mut t = TreeStructure::Leaf;
        for _ in 0..n_nodes {
            t = TreeStructure::node(t, TreeStructure::Leaf);
        }
        t
    }

    fn balanced4() -> TreeStructure {
        TreeStructure::node(stump(), stump())
    }

    #[test]
    fn stump_pi2_values() {
        assert_eq!(stump_pi2_bound(6, 10).unwrap(), BigUint::from(31u32));
        assert_eq!(stump_pi2_bound(6, 1).unwrap(), BigUint::from(5u32));
        assert_eq!(stump_pi2_bound(1, 5).unwrap(), BigUint::zero());
        assert!(stump_pi2_bound(6, 0).is_err());
    }

    #[test]
    fn stump_vcdim_values() {
        assert_eq!(stump_vcdim_exact(10).unwrap(), 6);
        assert_eq!(stump_vcdim_exact(1).unwrap(), 2);
        assert_eq!(stump_vcdim_exact(3).unwrap(), 4);
        assert!(stump_vcdim_exact(0).is_err());
    }

    #[test]
    fn partition_bound_base_cases() {
        let table = exact_table();
        // Stump recursion reduces to the stump bound.
        assert_eq!(
            partition_bound(&stump(), 2, 6, 10, &table).unwrap(),
            BigUint::from(31u32)
        );
        // More parts than points or leaves.
        for t in [stump(), chain(2), balanced4()] {
            assert_eq!(partition_bound(&t, 5, 4, 10, &table).unwrap(), BigUint::zero());
        }
        // Sample no bigger than the leaf count realizes every partition.
        assert_eq!(
            partition_bound(&balanced4(), 3, 4, 10, &table).unwrap(),
            BigUint::from(6u32)
        );
        // Single part.
        assert_eq!(
            partition_bound(&TreeStructure::Leaf, 1, 5, 3, &table).unwrap(),
            BigUint::one()
        );
    }

    #[test]
    fn stump_recursion_matches_closed_form() {
        let table = exact_table();
        for ell in [1u64, 2, 5, 10] {
            for m in 2..=15u64 {
                assert_eq!(
                    partition_bound(&stump(), 2, m, ell, &table).unwrap(),
                    stump_pi2_bound(m, ell).unwrap(),
                    "mismatch at m={m}, ell={ell}"
                );
            }
        }
    }

    #[test]
    fn orientation_invariance() {
        let table = exact_table();
        let shapes: Vec<TreeStructure> = (1..=3u64).flat_map(|l| enumerate(l).unwrap()).collect();
        for a in &shapes {
            for b in &shapes {
                let ab = TreeStructure::node(a.clone(), b.clone());
                let ba = TreeStructure::node(b.clone(), a.clone());
                for c in 1..=4u64 {
                    for m in 1..=12u64 {
                        assert_eq!(
                            partition_bound(&ab, c, m, 5, &table).unwrap(),
                            partition_bound(&ba, c, m, 5, &table).unwrap(),
                            "orientation mismatch for {ab} vs {ba} at c={c}, m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn clamped_by_stirling() {
        let table = exact_table();
        for t in enumerate(4).unwrap() {
            for c in 1..=4u64 {
                for m in 1..=14u64 {
                    let bound = partition_bound(&t, c, m, 10, &table).unwrap();
                    assert!(bound <= stirling2(m, c), "clamp violated for {t} c={c} m={m}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_sample_size() {
        let table = exact_table();
        for l in 1..=4u64 {
            for t in enumerate(l).unwrap() {
                for ell in [1u64, 3, 10] {
                    let mut prev = BigUint::zero();
                    for m in 2..=15u64 {
                        let cur = partition_bound(&t, 2, m, ell, &table).unwrap();
                        assert!(cur >= prev, "bound decreased for {t} at m={m}, ell={ell}");
                        prev = cur;
                    }
                }
            }
        }
    }

    #[test]
    fn fast_mode_dominates_exact() {
        let exact = exact_table();
        let fast = fast_table();
        let mut shapes = Vec::new();
        for l in 2..=4u64 {
            shapes.extend(enumerate(l).unwrap()); // 1..=3 internal nodes
        }
        for t in &shapes {
            for ell in [1u64, 2, 5, 10] {
                for c in 1..=4u64 {
                    for m in 1..=12u64 {
                        let e = partition_bound(t, c, m, ell, &exact).unwrap();
                        let f = partition_bound_fast(t, c, m, ell, &fast).unwrap();
                        assert!(
                            f >= e,
                            "fast bound below exact for {t} c={c} m={m} ell={ell}: {f} < {e}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fast_mode_examples() {
        let fast = fast_table();
        assert_eq!(
            partition_bound_fast(&stump(), 2, 6, 10, &fast).unwrap(),
            BigUint::from(31u32) // clamped to S(6, 2)
        );
        assert_eq!(
            partition_bound_fast(&TreeStructure::Leaf, 1, 5, 3, &fast).unwrap(),
            BigUint::one()
        );
        let exact = exact_table();
        let f = partition_bound_fast(&chain(2), 2, 5, 10, &fast).unwrap();
        let e = partition_bound(&chain(2), 2, 5, 10, &exact).unwrap();
        assert!(f >= e);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        assert!(partition_bound(&stump(), 2, 6, 10, &fast_table()).is_err());
        assert!(partition_bound_fast(&stump(), 2, 6, 10, &exact_table()).is_err());
    }

    #[test]
    fn growth_bound_values() {
        let table = exact_table();
        assert_eq!(
            growth_bound(&TreeStructure::Leaf, 7, 3, 5, &table).unwrap(),
            BigUint::from(3u32)
        );
        // 2 + 2*31 = 64 = 2^6: the stump shatters six points.
        assert_eq!(
            growth_bound(&stump(), 6, 2, 10, &table).unwrap(),
            BigUint::from(64u32)
        );
        // pi^2 at m = 2 is a base case equal to one.
        assert_eq!(
            growth_bound(&stump(), 2, 2, 1, &table).unwrap(),
            BigUint::from(4u32)
        );
        assert!(growth_bound(&stump(), 0, 2, 1, &table).is_err());
        assert!(growth_bound(&stump(), 2, 1, 1, &table).is_err());
    }

    #[test]
    fn vcdim_small_shapes() {
        let table = exact_table();
        assert_eq!(vcdim_upper_bound(&TreeStructure::Leaf, 10, &table).unwrap(), 1);
        assert_eq!(vcdim_upper_bound(&stump(), 10, &table).unwrap(), 6);
        assert_eq!(vcdim_upper_bound(&chain(2), 10, &table).unwrap(), 16);
    }

    #[test]
    fn vcdim_asymptotic_guard() {
        // Complete shapes with 1, 3, 7 internal nodes: the bound should stay
        // within a small constant of n_nodes * log2(n_nodes * ell) + 1.
        let table = exact_table();
        let complete = |depth: u32| {
            let mut t = TreeStructure::Leaf;
            for _ in 0..depth {
                t = TreeStructure::node(t.clone(), t);
            }
            t
        };
        for depth in 1..=3u32 {
            let t = complete(depth);
            let n = t.node_count() as f64;
            let bound = vcdim_upper_bound(&t, 10, &table).unwrap() as f64;
            let scale = n * (n * 10.0).log2() + 1.0;
            assert!(
                bound / scale < 6.0,
                "VC bound {bound} too large vs scale {scale} at depth {depth}"
            );
        }
    }

    #[test]
    fn table_round_trips_through_disk() {
        let table = exact_table();
        partition_bound(&chain(2), 2, 8, 10, &table).unwrap();
        assert!(!table.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.txt");
        table.save(&path).unwrap();

        let reloaded = exact_table();
        let (loaded, skipped) = reloaded.load(&path).unwrap();
        assert_eq!(loaded, table.len());
        assert_eq!(skipped, 0);
        assert_eq!(
            partition_bound(&chain(2), 2, 8, 10, &reloaded).unwrap(),
            partition_bound(&chain(2), 2, 8, 10, &table).unwrap()
        );

        // Corrupt lines are skipped, valid ones kept.
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("not a cache line\n(LL),2,x,10,31\n");
        fs::write(&path, text).unwrap();
        let partial = exact_table();
        let (loaded2, skipped2) = partial.load(&path).unwrap();
        assert_eq!(loaded2, loaded);
        assert_eq!(skipped2, 2);
    }
}
