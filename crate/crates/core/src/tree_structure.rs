//! Unlabeled binary tree shapes.
//!
//! A [`TreeStructure`] is the shape of a decision tree with the split rules
//! and leaf labels stripped away; it names a whole hypothesis class. Mirror
//! images of a shape realize exactly the same partitions on any sample, so
//! shapes are compared through a canonical form that orders every node's
//! children deterministically.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An unlabeled binary tree: every internal node has exactly two children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeStructure {
    Leaf,
    Node(Box<TreeStructure>, Box<TreeStructure>),
}

impl TreeStructure {
    pub fn node(left: TreeStructure, right: TreeStructure) -> TreeStructure {
        TreeStructure::Node(Box::new(left), Box::new(right))
    }

    /// A single internal node with two leaves.
    pub fn stump() -> TreeStructure {
        TreeStructure::node(TreeStructure::Leaf, TreeStructure::Leaf)
    }

    pub fn leaf_count(&self) -> u64 {
        match self {
            TreeStructure::Leaf => 1,
            TreeStructure::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Number of internal nodes; always `leaf_count() - 1`.
    pub fn node_count(&self) -> u64 {
        self.leaf_count() - 1
    }

    pub fn height(&self) -> u64 {
        match self {
            TreeStructure::Leaf => 0,
            TreeStructure::Node(l, r) => 1 + l.height().max(r.height()),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeStructure::Leaf)
    }

    /// The representative of this shape's mirror-equivalence class: at every
    /// node the children are ordered smaller-first by leaf count, ties broken
    /// by recursive comparison. Idempotent.
    pub fn canonical_form(&self) -> TreeStructure {
        match self {
            TreeStructure::Leaf => TreeStructure::Leaf,
            TreeStructure::Node(l, r) => {
                let l = l.canonical_form();
                let r = r.canonical_form();
                if canonical_cmp(&l, &r) == Ordering::Greater {
                    TreeStructure::node(r, l)
                } else {
                    TreeStructure::node(l, r)
                }
            }
        }
    }
}

/// Total order on canonical shapes: leaf count first, then children
/// recursively.
fn canonical_cmp(a: &TreeStructure, b: &TreeStructure) -> Ordering {
    match a.leaf_count().cmp(&b.leaf_count()) {
        Ordering::Equal => match (a, b) {
            (TreeStructure::Leaf, TreeStructure::Leaf) => Ordering::Equal,
            (TreeStructure::Node(al, ar), TreeStructure::Node(bl, br)) => {
                match canonical_cmp(al, bl) {
                    Ordering::Equal => canonical_cmp(ar, br),
                    ord => ord,
                }
            }
            // Equal leaf counts force equal kinds.
            _ => unreachable!("leaf counts agree but node kinds differ"),
        },
        ord => ord,
    }
}

/// True iff the two shapes are equal up to mirroring subtrees.
pub fn structurally_equal(a: &TreeStructure, b: &TreeStructure) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// All canonical shapes with exactly `leaves` leaves, ordered by ascending
/// height and then by the canonical order. The count equals the
/// Wedderburn-Etherington number of `leaves`.
pub fn enumerate(leaves: u64) -> Result<Vec<TreeStructure>> {
    if leaves == 0 {
        return Err(Error::InvalidArgument(
            "enumerate requires at least one leaf".into(),
        ));
    }
    let mut cache: Vec<Vec<TreeStructure>> = vec![Vec::new(), vec![TreeStructure::Leaf]];
    for l in 2..=leaves {
        let mut shapes = Vec::new();
        for la in 1..=l / 2 {
            let lb = l - la;
            for (i, a) in cache[la as usize].iter().enumerate() {
                let bs = &cache[lb as usize];
                // For an even split, unordered pairs only.
                let start = if la == lb { i } else { 0 };
                for b in &bs[start..] {
                    shapes.push(TreeStructure::node(a.clone(), b.clone()));
                }
            }
        }
        cache.push(shapes);
    }
    let mut shapes = cache.pop().unwrap();
    // Children built from canonical parts in ascending order are already
    // canonical; only the listing order remains to be fixed.
    shapes.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| canonical_cmp(a, b)));
    Ok(shapes)
}

impl fmt::Display for TreeStructure {
    /// Text form used by the CLI and as memo keys: a leaf is `L`, a node is
    /// `(` left right `)`. The stump prints as `(LL)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeStructure::Leaf => write!(f, "L"),
            TreeStructure::Node(l, r) => write!(f, "({l}{r})"),
        }
    }
}

impl FromStr for TreeStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<TreeStructure> {
        let bytes = s.as_bytes();
        let (tree, used) = parse_at(bytes, 0)?;
        if used != bytes.len() {
            return Err(Error::Parse(format!(
                "trailing input after tree structure at byte {used} in {s:?}"
            )));
        }
        Ok(tree)
    }
}

fn parse_at(bytes: &[u8], pos: usize) -> Result<(TreeStructure, usize)> {
    match bytes.get(pos) {
        Some(b'L') => Ok((TreeStructure::Leaf, pos + 1)),
        Some(b'(') => {
            let (left, pos) = parse_at(bytes, pos + 1)?;
            let (right, pos) = parse_at(bytes, pos)?;
            match bytes.get(pos) {
                Some(b')') => Ok((TreeStructure::node(left, right), pos + 1)),
                _ => Err(Error::Parse(format!("expected ')' at byte {pos}"))),
            }
        }
        other => Err(Error::Parse(format!(
            "expected 'L' or '(' at byte {pos}, found {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn chain(n_nodes: u64) -> TreeStructure {
        let mut t = TreeStructure::Leaf;
        for _ in 0..n_nodes {
            t = TreeStructure::node(t, TreeStructure::Leaf);
        }
        t
    }

    #[test]
    fn canonical_form_examples() {
        let already = TreeStructure::node(TreeStructure::Leaf, TreeStructure::stump());
        assert_eq!(already.canonical_form(), already);

        let mirrored = TreeStructure::node(TreeStructure::stump(), TreeStructure::Leaf);
        assert_eq!(mirrored.canonical_form(), already);

        assert_eq!(TreeStructure::Leaf.canonical_form(), TreeStructure::Leaf);
    }

    #[test]
    fn structural_equality() {
        assert!(structurally_equal(&TreeStructure::Leaf, &TreeStructure::Leaf));
        assert!(!structurally_equal(&TreeStructure::stump(), &TreeStructure::Leaf));
        let a = TreeStructure::node(TreeStructure::stump(), TreeStructure::Leaf);
        let b = TreeStructure::node(TreeStructure::Leaf, TreeStructure::stump());
        assert!(structurally_equal(&a, &b));
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate(1).unwrap(), vec![TreeStructure::Leaf]);
        assert!(enumerate(0).is_err());

        let four = enumerate(4).unwrap();
        assert_eq!(four.len(), 2);
        // Balanced shape (height 2) sorts before the chain (height 3).
        assert_eq!(four[0].to_string(), "((LL)(LL))");
        assert_eq!(four[1].to_string(), "(L(L(LL)))");
        assert!(structurally_equal(&four[1], &chain(3)));

        assert_eq!(enumerate(6).unwrap().len(), 6);
    }

    #[test]
    fn enumerate_counts_match_wedderburn_etherington() {
        for l in 1..=12u64 {
            let shapes = enumerate(l).unwrap();
            let we = combinatorics::wedderburn_etherington(l)
                .unwrap()
                .to_u64()
                .unwrap();
            assert_eq!(shapes.len() as u64, we, "count mismatch at {l} leaves");
            for s in &shapes {
                assert_eq!(s.leaf_count(), l);
                assert_eq!(s.canonical_form(), *s);
            }
            let dedup: std::collections::HashSet<String> =
                shapes.iter().map(|s| s.to_string()).collect();
            assert_eq!(dedup.len(), shapes.len(), "duplicates at {l} leaves");
        }
    }

    fn arb_tree() -> impl Strategy<Value = TreeStructure> {
        let leaf = Just(TreeStructure::Leaf);
        leaf.prop_recursive(6, 32, 2, |inner| {
            (inner.clone(), inner).prop_map(|(l, r)| TreeStructure::node(l, r))
        })
    }

    /// Flip children at nodes selected by a bitmask, walked in preorder.
    fn swap_some(t: &TreeStructure, mask: &mut u64) -> TreeStructure {
        match t {
            TreeStructure::Leaf => TreeStructure::Leaf,
            TreeStructure::Node(l, r) => {
                let flip = *mask & 1 == 1;
                *mask >>= 1;
                let l = swap_some(l, mask);
                let r = swap_some(r, mask);
                if flip {
                    TreeStructure::node(r, l)
                } else {
                    TreeStructure::node(l, r)
                }
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_form_invariant_under_swaps(t in arb_tree(), mask in any::<u64>()) {
            let canon = t.canonical_form();
            prop_assert_eq!(canon.canonical_form(), canon.clone());
            let mut m = mask;
            let swapped = swap_some(&t, &mut m);
            prop_assert_eq!(swapped.canonical_form(), canon);
        }

        #[test]
        fn serialization_round_trips(t in arb_tree()) {
            let text = t.to_string();
            let back: TreeStructure = text.parse().unwrap();
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!("".parse::<TreeStructure>().is_err());
        assert!("(L".parse::<TreeStructure>().is_err());
        assert!("(LL)L".parse::<TreeStructure>().is_err());
        assert!("(LLL)".parse::<TreeStructure>().is_err());
        assert_eq!("(LL)".parse::<TreeStructure>().unwrap(), TreeStructure::stump());
    }
}
