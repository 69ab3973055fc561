//! Greedy decision-tree induction on real-valued features.
//!
//! Trees grow best-first under the Gini criterion: at each step the leaf
//! whose best split yields the largest mass-weighted impurity decrease is
//! split, so a leaf cap keeps the most valuable splits. Candidate thresholds
//! sit at midpoints between consecutive distinct sorted values; a point
//! routes left iff its feature value is `<=` the threshold.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree_structure::TreeStructure;

/// A classification sample: `m` rows of `ell` real features with labels in
/// `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
    pub n_classes: u32,
    pub feature_names: Option<Vec<String>>,
}

impl Sample {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u32>, n_classes: u32) -> Result<Sample> {
        let s = Sample {
            features,
            labels,
            n_classes,
            feature_names: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidArgument("sample has no rows".into()));
        }
        let ell = self.features[0].len();
        if ell == 0 {
            return Err(Error::InvalidArgument("sample has no features".into()));
        }
        if self.features.iter().any(|row| row.len() != ell) {
            return Err(Error::InvalidArgument("ragged feature rows".into()));
        }
        if self.labels.len() != self.features.len() {
            return Err(Error::InvalidArgument("label count != row count".into()));
        }
        if self.labels.iter().any(|&y| y >= self.n_classes) {
            return Err(Error::InvalidArgument("label out of class range".into()));
        }
        Ok(())
    }

    /// Rows at the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Sample {
        Sample {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        hist: Vec<u32>,
    },
    Leaf {
        label: u32,
        hist: Vec<u32>,
    },
}

impl Node {
    fn hist(&self) -> &[u32] {
        match self {
            Node::Split { hist, .. } | Node::Leaf { hist, .. } => hist,
        }
    }

    fn count(&self) -> u32 {
        self.hist().iter().sum()
    }
}

/// A fitted decision tree: a shape plus per-node split rules, per-leaf
/// majority labels, and cached training class histograms.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    root: usize,
    n_classes: u32,
    max_leaves: usize,
}

/// Majority class: ties go to the smallest class index.
fn majority(hist: &[u32]) -> u32 {
    let mut best = 0usize;
    for (i, &c) in hist.iter().enumerate() {
        if c > hist[best] {
            best = i;
        }
    }
    best as u32
}

fn gini_weight(hist: &[u32]) -> f64 {
    // count * gini = count - sum c_i^2 / count
    let count: u32 = hist.iter().sum();
    if count == 0 {
        return 0.0;
    }
    let sq: f64 = hist.iter().map(|&c| (c as f64) * (c as f64)).sum();
    count as f64 - sq / count as f64
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    // Mass-weighted impurity decrease; comparable across leaves.
    gain: f64,
}

/// Best split of the rows `indices` by exhaustive scan over features and
/// midpoint thresholds. `None` when no split reduces impurity.
fn best_split(s: &Sample, indices: &[usize], hist: &[u32]) -> Option<SplitChoice> {
    let parent_weight = gini_weight(hist);
    if parent_weight == 0.0 || indices.len() < 2 {
        return None;
    }
    let mut best: Option<SplitChoice> = None;
    for feature in 0..s.num_features() {
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| {
            s.features[a][feature]
                .partial_cmp(&s.features[b][feature])
                .expect("non-finite feature value")
                .then(a.cmp(&b))
        });
        let mut left_hist = vec![0u32; s.n_classes as usize];
        for w in 0..order.len() - 1 {
            left_hist[s.labels[order[w]] as usize] += 1;
            let lo = s.features[order[w]][feature];
            let hi = s.features[order[w + 1]][feature];
            if lo == hi {
                continue;
            }
            let mut threshold = (lo + hi) / 2.0;
            if threshold >= hi {
                threshold = lo; // midpoint rounded up to hi; `<=` routing needs θ < hi
            }
            let right_hist: Vec<u32> = hist
                .iter()
                .zip(&left_hist)
                .map(|(&all, &l)| all - l)
                .collect();
            let gain = parent_weight - gini_weight(&left_hist) - gini_weight(&right_hist);
            let better = match &best {
                None => gain > 0.0,
                Some(b) => gain > b.gain,
            };
            if better {
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

/// Grow a tree on `s` until it is perfect on the training set, reaches
/// `max_leaves` leaves, or no split reduces impurity. Deterministic: split
/// ties resolve to the lowest feature index and lowest threshold, and ties
/// between leaves by a fixed scan order.
pub fn fit(s: &Sample, max_leaves: usize) -> Result<DecisionTree> {
    s.validate()?;
    if max_leaves == 0 {
        return Err(Error::InvalidArgument("max_leaves must be >= 1".into()));
    }
    let mut hist = vec![0u32; s.n_classes as usize];
    for &y in &s.labels {
        hist[y as usize] += 1;
    }
    let all: Vec<usize> = (0..s.len()).collect();

    struct Open {
        node: usize,
        indices: Vec<usize>,
        choice: Option<SplitChoice>,
    }

    let mut nodes = vec![Node::Leaf {
        label: majority(&hist),
        hist: hist.clone(),
    }];
    let mut open = vec![Open {
        node: 0,
        indices: all.clone(),
        choice: best_split(s, &all, &hist),
    }];
    let mut n_leaves = 1usize;

    while n_leaves < max_leaves {
        let mut pick: Option<usize> = None;
        for (i, o) in open.iter().enumerate() {
            if let Some(c) = &o.choice {
                if pick.is_none_or(|p| c.gain > open[p].choice.as_ref().unwrap().gain) {
                    pick = Some(i);
                }
            }
        }
        let Some(pick) = pick else { break };
        let Open { node, indices, choice } = open.swap_remove(pick);
        let choice = choice.unwrap();

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| s.features[i][choice.feature] <= choice.threshold);
        debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());

        let mk_hist = |idx: &[usize]| {
            let mut h = vec![0u32; s.n_classes as usize];
            for &i in idx {
                h[s.labels[i] as usize] += 1;
            }
            h
        };
        let left_hist = mk_hist(&left_idx);
        let right_hist = mk_hist(&right_idx);
        let parent_hist = nodes[node].hist().to_vec();

        let left = nodes.len();
        nodes.push(Node::Leaf {
            label: majority(&left_hist),
            hist: left_hist.clone(),
        });
        let right = nodes.len();
        nodes.push(Node::Leaf {
            label: majority(&right_hist),
            hist: right_hist.clone(),
        });
        nodes[node] = Node::Split {
            feature: choice.feature,
            threshold: choice.threshold,
            left,
            right,
            hist: parent_hist,
        };
        n_leaves += 1;

        let left_choice = best_split(s, &left_idx, &left_hist);
        open.push(Open {
            node: left,
            indices: left_idx,
            choice: left_choice,
        });
        let right_choice = best_split(s, &right_idx, &right_hist);
        open.push(Open {
            node: right,
            indices: right_idx,
            choice: right_choice,
        });
    }

    Ok(DecisionTree {
        nodes,
        root: 0,
        n_classes: s.n_classes,
        max_leaves,
    })
}

impl DecisionTree {
    /// Label of the leaf reached by threshold routing (`<=` goes left).
    pub fn predict(&self, x: &[f64]) -> Result<u32> {
        let mut cur = self.root;
        loop {
            match &self.nodes[cur] {
                Node::Leaf { label, .. } => return Ok(*label),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let v = *x.get(*feature).ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "input has {} features, tree needs index {}",
                            x.len(),
                            feature
                        ))
                    })?;
                    cur = if v <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Number of points of `s` the tree misclassifies.
    pub fn count_errors(&self, s: &Sample) -> Result<usize> {
        let mut errors = 0usize;
        for (row, &y) in s.features.iter().zip(&s.labels) {
            if self.predict(row)? != y {
                errors += 1;
            }
        }
        Ok(errors)
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    /// The leaf cap this tree was grown with.
    pub fn max_leaves(&self) -> usize {
        self.max_leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.count_leaves(self.root)
    }

    fn count_leaves(&self, node: usize) -> usize {
        match &self.nodes[node] {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => self.count_leaves(*left) + self.count_leaves(*right),
        }
    }

    pub fn height(&self) -> usize {
        self.node_height(self.root)
    }

    fn node_height(&self, node: usize) -> usize {
        match &self.nodes[node] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + self.node_height(*left).max(self.node_height(*right))
            }
        }
    }

    /// The unlabeled shape of this tree.
    pub fn structure(&self) -> TreeStructure {
        self.structure_at(self.root, None)
    }

    /// Shape with the subtree at `collapsed` replaced by a leaf.
    pub fn structure_with_collapsed(&self, collapsed: usize) -> TreeStructure {
        self.structure_at(self.root, Some(collapsed))
    }

    fn structure_at(&self, node: usize, collapsed: Option<usize>) -> TreeStructure {
        if collapsed == Some(node) {
            return TreeStructure::Leaf;
        }
        match &self.nodes[node] {
            Node::Leaf { .. } => TreeStructure::Leaf,
            Node::Split { left, right, .. } => TreeStructure::node(
                self.structure_at(*left, collapsed),
                self.structure_at(*right, collapsed),
            ),
        }
    }

    /// Whether arena slot `node` is currently an internal node reachable or
    /// not; collapsed slots become leaves.
    pub fn is_internal(&self, node: usize) -> bool {
        matches!(self.nodes[node], Node::Split { .. })
    }

    /// Arena indices of the nodes visited while routing `x`, root first,
    /// ending at the reached leaf.
    pub fn decision_path(&self, x: &[f64]) -> Result<Vec<usize>> {
        let mut path = vec![self.root];
        let mut cur = self.root;
        loop {
            match &self.nodes[cur] {
                Node::Leaf { .. } => return Ok(path),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let v = *x.get(*feature).ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "input has {} features, tree needs index {}",
                            x.len(),
                            feature
                        ))
                    })?;
                    cur = if v <= *threshold { *left } else { *right };
                    path.push(cur);
                }
            }
        }
    }

    /// Internal node indices in preorder (root first).
    pub fn internal_nodes_preorder(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.preorder_into(self.root, &mut out);
        out
    }

    fn preorder_into(&self, node: usize, out: &mut Vec<usize>) {
        if let Node::Split { left, right, .. } = &self.nodes[node] {
            out.push(node);
            self.preorder_into(*left, out);
            self.preorder_into(*right, out);
        }
    }

    /// Training errors a majority leaf at `node` would make on the points
    /// routed there during fitting.
    pub fn node_majority_errors(&self, node: usize) -> usize {
        let hist = self.nodes[node].hist();
        (self.nodes[node].count() - hist[majority(hist) as usize]) as usize
    }

    /// Training errors of the subtree rooted at `node`, from the cached leaf
    /// histograms; valid for the sample the tree was fit on.
    pub fn subtree_training_errors(&self, node: usize) -> usize {
        match &self.nodes[node] {
            Node::Leaf { label, hist } => {
                (hist.iter().sum::<u32>() - hist[*label as usize]) as usize
            }
            Node::Split { left, right, .. } => {
                self.subtree_training_errors(*left) + self.subtree_training_errors(*right)
            }
        }
    }

    pub fn training_errors(&self) -> usize {
        self.subtree_training_errors(self.root)
    }

    /// Leaf counts of the subtree rooted at each internal node.
    pub fn subtree_leaves(&self, node: usize) -> usize {
        self.count_leaves(node)
    }

    /// Recompute every node's class histogram by routing `s` through the
    /// tree, leaving split rules and leaf labels untouched, and adopt
    /// `max_leaves` as the growth cap pruners use when re-growing fold
    /// trees. Needed before pruning a deserialized tree, whose histograms
    /// are placeholders.
    pub fn rebind(&mut self, s: &Sample, max_leaves: usize) -> Result<()> {
        s.validate()?;
        let width = (s.n_classes.max(self.n_classes)) as usize;
        for node in &mut self.nodes {
            match node {
                Node::Leaf { hist, .. } | Node::Split { hist, .. } => {
                    *hist = vec![0; width];
                }
            }
        }
        for (row, &label) in s.features.iter().zip(&s.labels) {
            for node in self.decision_path(row)? {
                match &mut self.nodes[node] {
                    Node::Leaf { hist, .. } | Node::Split { hist, .. } => {
                        hist[label as usize] += 1;
                    }
                }
            }
        }
        self.n_classes = self.n_classes.max(s.n_classes);
        self.max_leaves = max_leaves;
        Ok(())
    }

    /// Replace the subtree at `node` with its majority leaf, in place.
    pub fn collapse(&mut self, node: usize) {
        let hist = self.nodes[node].hist().to_vec();
        self.nodes[node] = Node::Leaf {
            label: majority(&hist),
            hist,
        };
    }

    fn fmt_node(&self, node: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.nodes[node] {
            Node::Leaf { label, .. } => write!(f, "={label}"),
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                write!(f, "({feature}:{threshold} ")?;
                self.fmt_node(*left, f)?;
                write!(f, " ")?;
                self.fmt_node(*right, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for DecisionTree {
    /// Nested text form: leaves are `=label`, nodes are
    /// `(feature:threshold left right)`. A stump over feature 0 prints as
    /// `(0:1.5 =0 =1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(self.root, f)
    }
}

impl FromStr for DecisionTree {
    type Err = Error;

    /// Parse the `Display` form. Histograms are not part of the text format;
    /// parsed trees carry single-point placeholder histograms and are meant
    /// for prediction, not further pruning.
    fn from_str(s: &str) -> Result<DecisionTree> {
        let mut nodes = Vec::new();
        let (root, used, max_label) = parse_tree(s.trim(), 0, &mut nodes)?;
        if used != s.trim().len() {
            return Err(Error::Parse(format!("trailing input after tree at byte {used}")));
        }
        let n_classes = max_label + 1;
        for node in &mut nodes {
            match node {
                Node::Leaf { label, hist } => {
                    *hist = vec![0; n_classes as usize];
                    hist[*label as usize] = 1;
                }
                Node::Split { hist, .. } => {
                    *hist = vec![0; n_classes as usize];
                }
            }
        }
        Ok(DecisionTree {
            nodes,
            root,
            n_classes,
            max_leaves: 0,
        })
    }
}

fn parse_tree(s: &str, pos: usize, nodes: &mut Vec<Node>) -> Result<(usize, usize, u32)> {
    let bytes = s.as_bytes();
    match bytes.get(pos) {
        Some(b'=') => {
            let rest = &s[pos + 1..];
            let end = rest
                .find([' ', ')'])
                .unwrap_or(rest.len());
            let label: u32 = rest[..end]
                .parse()
                .map_err(|_| Error::Parse(format!("bad leaf label at byte {pos}")))?;
            nodes.push(Node::Leaf {
                label,
                hist: Vec::new(),
            });
            Ok((nodes.len() - 1, pos + 1 + end, label))
        }
        Some(b'(') => {
            let body = &s[pos + 1..];
            let colon = body
                .find(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' after byte {pos}")))?;
            let feature: usize = body[..colon]
                .parse()
                .map_err(|_| Error::Parse(format!("bad feature index at byte {pos}")))?;
            let after_colon = pos + 1 + colon + 1;
            let space = s[after_colon..]
                .find(' ')
                .ok_or_else(|| Error::Parse(format!("missing ' ' after threshold at byte {after_colon}")))?;
            let threshold: f64 = s[after_colon..after_colon + space]
                .parse()
                .map_err(|_| Error::Parse(format!("bad threshold at byte {after_colon}")))?;
            let (left, p, ml) = parse_tree(s, after_colon + space + 1, nodes)?;
            if bytes.get(p) != Some(&b' ') {
                return Err(Error::Parse(format!("expected ' ' at byte {p}")));
            }
            let (right, p, mr) = parse_tree(s, p + 1, nodes)?;
            if bytes.get(p) != Some(&b')') {
                return Err(Error::Parse(format!("expected ')' at byte {p}")));
            }
            nodes.push(Node::Split {
                feature,
                threshold,
                left,
                right,
                hist: Vec::new(),
            });
            Ok((nodes.len() - 1, p + 1, ml.max(mr)))
        }
        other => Err(Error::Parse(format!(
            "expected '=' or '(' at byte {pos}, found {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(features: Vec<Vec<f64>>, labels: Vec<u32>, n: u32) -> Sample {
        Sample::new(features, labels, n).unwrap()
    }

    #[test]
    fn single_class_gives_single_leaf() {
        let s = sample(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 0, 0], 1);
        let t = fit(&s, 40).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.count_errors(&s).unwrap(), 0);
    }

    #[test]
    fn two_points_force_a_stump() {
        let s = sample(vec![vec![1.0, 9.0], vec![2.0, 9.0]], vec![0, 1], 2);
        let t = fit(&s, 40).unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.count_errors(&s).unwrap(), 0);
        assert_eq!(t.to_string(), "(0:1.5 =0 =1)");
    }

    #[test]
    fn empty_sample_rejected() {
        assert!(Sample::new(vec![], vec![], 1).is_err());
    }

    #[test]
    fn predict_boundary_goes_left() {
        let t: DecisionTree = "(0:1.5 =1 =2)".parse().unwrap();
        assert_eq!(t.predict(&[1.0, 7.0]).unwrap(), 1);
        assert_eq!(t.predict(&[1.5, 7.0]).unwrap(), 1);
        assert_eq!(t.predict(&[1.6, 7.0]).unwrap(), 2);
        let leaf: DecisionTree = "=2".parse().unwrap();
        assert_eq!(leaf.predict(&[0.0]).unwrap(), 2);
        assert!(t.predict(&[]).is_err());
    }

    #[test]
    fn majority_leaf_errors() {
        let s = sample(
            (0..10).map(|i| vec![i as f64]).collect(),
            vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
            2,
        );
        let t = fit(&s, 1).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.count_errors(&s).unwrap(), 5);
    }

    #[test]
    fn growing_never_increases_training_error() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        let m = 60;
        let feats: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..3).map(|_| (next() % 1000) as f64 / 10.0).collect())
            .collect();
        let labels: Vec<u32> = (0..m).map(|_| (next() % 3) as u32).collect();
        let s = sample(feats, labels, 3);
        let mut prev = usize::MAX;
        for cap in 1..=20 {
            let t = fit(&s, cap).unwrap();
            let errs = t.count_errors(&s).unwrap();
            assert!(errs <= prev, "errors rose from {prev} to {errs} at cap {cap}");
            assert!(t.leaf_count() <= cap);
            prev = errs;
        }
    }

    #[test]
    fn iris_train_split_is_memorized_within_the_leaf_cap() {
        let path = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
        let spec = crate::data_io::DatasetSpec::csv(
            path,
            crate::data_io::LabelColumn::Name("species".into()),
            true,
        );
        let iris = crate::data_io::load(&spec).unwrap();
        let (train, _) = crate::data_io::split(&iris, 0.75, 0).unwrap();
        let t = fit(&train, 40).unwrap();
        assert!(t.leaf_count() <= 40);
        assert_eq!(t.count_errors(&train).unwrap(), 0);

        // Collapsed to a single leaf, the errors are everything outside the
        // plurality class.
        let leaf = fit(&train, 1).unwrap();
        let mut hist = vec![0usize; train.n_classes as usize];
        for &y in &train.labels {
            hist[y as usize] += 1;
        }
        let plurality = *hist.iter().max().unwrap();
        assert_eq!(leaf.count_errors(&train).unwrap(), train.len() - plurality);
    }

    #[test]
    fn fit_is_deterministic() {
        let s = sample(
            (0..30).map(|i| vec![(i * 7 % 13) as f64, (i * 3 % 5) as f64]).collect(),
            (0..30).map(|i| (i % 2) as u32).collect(),
            2,
        );
        let a = fit(&s, 10).unwrap().to_string();
        let b = fit(&s, 10).unwrap().to_string();
        assert_eq!(a, b);
    }

    proptest! {
        /// Threshold rules only see the ordering of feature values, so any
        /// strictly monotone transform applied at both fit and predict time
        /// leaves predictions unchanged.
        #[test]
        fn monotone_transform_invariance(
            rows in proptest::collection::vec(
                proptest::collection::vec(-50i32..50, 2), 4..40),
            labels in proptest::collection::vec(0u32..3, 40),
        ) {
            let m = rows.len();
            let feats: Vec<Vec<f64>> =
                rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let labels = labels[..m].to_vec();
            let s = Sample::new(feats.clone(), labels.clone(), 3).unwrap();
            let transform = |v: f64| v * v * v + 2.0 * v; // strictly increasing
            let tfeats: Vec<Vec<f64>> =
                feats.iter().map(|r| r.iter().map(|&v| transform(v)).collect()).collect();
            let ts = Sample::new(tfeats.clone(), labels, 3).unwrap();

            let t1 = fit(&s, 8).unwrap();
            let t2 = fit(&ts, 8).unwrap();
            for (orig, trans) in feats.iter().zip(&tfeats) {
                prop_assert_eq!(t1.predict(orig).unwrap(), t2.predict(trans).unwrap());
            }
        }

        #[test]
        fn tree_serialization_round_trips(
            rows in proptest::collection::vec(
                proptest::collection::vec(-10.0f64..10.0, 2), 4..25),
            labels in proptest::collection::vec(0u32..2, 25),
        ) {
            let m = rows.len();
            let s = Sample::new(rows.clone(), labels[..m].to_vec(), 2).unwrap();
            let t = fit(&s, 6).unwrap();
            let back: DecisionTree = t.to_string().parse().unwrap();
            for row in &rows {
                prop_assert_eq!(t.predict(row).unwrap(), back.predict(row).unwrap());
            }
        }
    }
}
