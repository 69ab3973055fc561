//! The structural risk bound driving bound-based pruning.
//!
//! For a tree with `k` training errors out of `m` points, the true risk is at
//! most `(1/m) (2k + 4 ln(4 tau(2m) / (delta q_k p_d)))` with probability
//! `1 - delta`, where `tau` is (an upper bound on) the growth function of the
//! tree's shape, `q_k` is a geometric prior over error counts and `p_d` a
//! prior over shapes that charges each leaf count `L` evenly across its
//! `WE(L)` distinct shapes. Growth bounds overflow any float long before the
//! sample sizes of interest, so everything is evaluated in the log domain.

use crate::bound_engine::{growth_bound, BoundMode, PartitionTable};
use crate::combinatorics::{ln_big, wedderburn_etherington};
use crate::error::{Error, Result};
use crate::tree_structure::TreeStructure;

/// Parameters of the risk bound.
#[derive(Debug, Clone)]
pub struct BoundConfig {
    /// Confidence parameter in (0, 1).
    pub delta: f64,
    /// Ratio of the geometric prior over error counts, in (0, 1). The
    /// default `2^-13.7` penalizes errors heavily to offset the looseness of
    /// the growth bound.
    pub r: f64,
    /// Which partition-bound recursion backs the growth bound.
    pub bound_mode: BoundMode,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            delta: 0.05,
            r: 2f64.powf(-13.7),
            bound_mode: BoundMode::Fast,
        }
    }
}

impl BoundConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument("delta must lie in (0, 1)".into()));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidArgument("r must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn table(&self) -> PartitionTable {
        PartitionTable::new(self.bound_mode)
    }
}

/// Prior mass of a tree shape: `6 / (pi^2 L^2)` split evenly over the
/// `WE(L)` shapes with `L` leaves. Every structure with the same leaf count
/// gets the same mass, and the total over all shapes is one.
pub fn prior_pd(t: &TreeStructure) -> f64 {
    let l = t.leaf_count();
    let we = wedderburn_etherington(l).expect("leaf count >= 1");
    let ln = ln_prior_pd(l, ln_big(&we).expect("WE >= 1"));
    ln.exp()
}

fn ln_prior_pd(leaves: u64, ln_we: f64) -> f64 {
    (6.0f64).ln() - 2.0 * std::f64::consts::PI.ln() - 2.0 * (leaves as f64).ln() - ln_we
}

/// Geometric prior over error counts: `(1 - r) r^k`.
pub fn prior_qk(k: u64, r: f64) -> f64 {
    (1.0 - r) * r.powi(k as i32)
}

fn ln_prior_qk(k: u64, r: f64) -> f64 {
    (1.0 - r).ln() + k as f64 * r.ln()
}

/// The risk bound for a tree of shape `t` making `k` errors on `m` training
/// points with `n` classes and `ell` features. May exceed one; always finite
/// and positive. The growth bound is evaluated at `2m` in the mode of
/// `table`.
pub fn epsilon(
    m: u64,
    k: u64,
    t: &TreeStructure,
    n: u64,
    ell: u64,
    cfg: &BoundConfig,
    table: &PartitionTable,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("epsilon requires m >= 1".into()));
    }
    if k > m {
        return Err(Error::InvalidArgument("epsilon requires k <= m".into()));
    }
    cfg.validate()?;
    // A one-class problem is a degenerate two-class one; the bound stays
    // valid with the larger class count.
    let tau = growth_bound(t, 2 * m, n.max(2), ell, table)?;
    let ln_tau = ln_big(&tau)?;
    let ln_we = ln_big(&wedderburn_etherington(t.leaf_count())?)?;
    let ln4 = 2.0 * std::f64::consts::LN_2;
    let sum = ln4 + ln_tau - cfg.delta.ln() - ln_prior_qk(k, cfg.r) - ln_prior_pd(t.leaf_count(), ln_we);
    Ok((2.0 * k as f64 + 4.0 * sum) / m as f64)
}
