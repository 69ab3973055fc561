//! Provable capacity bounds for binary decision trees on real-valued features.
//!
//! A tree *structure* (the shape alone, with free split rules and leaf labels)
//! defines a hypothesis class. This crate computes exact-arithmetic upper
//! bounds on how many distinct ways such a class can partition a sample, and
//! from those bounds derives growth-function and VC-dimension bounds. The
//! bounds feed a structural-risk pruning algorithm that needs no
//! cross-validation, benchmarked here against cost-complexity pruning.
//!
//! Module map:
//!
//! - [`combinatorics`]: exact big-integer counting primitives.
//! - [`tree_structure`]: unlabeled binary tree shapes, canonical forms,
//!   enumeration.
//! - [`bound_engine`]: partitioning-function, growth-function and
//!   VC-dimension upper bounds with persistent memoization.
//! - [`oracle`]: brute-force partition enumeration on explicit small samples,
//!   including worst-case sample constructions.
//! - [`learner`]: greedy Gini-grown decision trees.
//! - [`risk_bound`]: the structural risk bound epsilon and its priors.
//! - [`pruning`]: bound-based, cost-complexity (CART) and modified
//!   cost-complexity pruners.
//! - [`data_io`]: CSV ingestion and seeded splitting.
//! - [`experiment`]: benchmark harness and the checks behind the CLI.

pub mod bound_engine;
pub mod combinatorics;
pub mod data_io;
pub mod experiment;
pub mod learner;
pub mod oracle;
pub mod pruning;
pub mod risk_bound;
pub mod tree_structure;

mod error;

pub use error::{Error, Result};
