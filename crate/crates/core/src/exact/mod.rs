//! Certified exact values of `c_lambda`: a backtracking oracle over
//! addressings and a branch and bound over the column-count program.

mod bnb;
mod search;

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::addressing::{
    cyclic_order_addressing, hadamard_addressing, k4_addressing, linear_order_addressing, verify,
    Addressing,
};
use crate::bounds::{held_karp_cycle, held_karp_path, lower_bounds_dm, BoundsConfig};
use crate::graph::DistanceMatrix;
use crate::lp::LpError;

pub use bnb::{branch_and_bound_c, branch_and_bound_c_with, BnbConfig};

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("search budget of {limit} nodes exceeded; result unproven")]
    BudgetExceeded { limit: u64 },
    #[error("no addressing of length at most {cap} (length cap reached; result unproven)")]
    LengthCap { cap: u64 },
    #[error("scale lambda must be a positive integer")]
    ZeroLambda,
    #[error("{n} vertices are beyond the search limit of 64")]
    TooLarge { n: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal check failed: {0}")]
    SelfCheck(String),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Stop with `LengthCap` instead of trying lengths above this.
    pub max_length: Option<u64>,
    /// Fix the first placed row to all zeros (complementing columns is a symmetry).
    pub fix_first_row: bool,
    /// Branch on ones-counts per block of equal columns rather than per column.
    pub canonical_columns: bool,
    /// Total search nodes across all lengths tried.
    pub node_limit: u64,
    /// Start at the best closed-form lower bound instead of 0.
    pub seed_lower_bound: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_length: None,
            fix_first_row: true,
            canonical_columns: true,
            node_limit: DEFAULT_NODE_LIMIT,
            seed_lower_bound: true,
        }
    }
}

/// A proven optimum with a witness of that length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub value: u64,
    pub witness: Addressing,
    /// Name of the argument proving no shorter addressing exists.
    pub lower_rule: &'static str,
    /// Search nodes or LP relaxations used.
    pub nodes: u64,
}

impl ExactResult {
    /// `length l proven optimal (lower bound rule = X)`.
    pub fn certificate(&self) -> String {
        format!("length {} proven optimal (lower bound rule = {})", self.value, self.lower_rule)
    }
}

fn check_witness(w: &Addressing, dm: &DistanceMatrix, lambda: u64) -> Result<(), ExactError> {
    match verify(w, dm, lambda) {
        Ok(true) => Ok(()),
        _ => Err(ExactError::SelfCheck("witness fails verification".into())),
    }
}

/// Decision version: an addressing of length exactly `len`, or `None` when
/// the complete search proves none exists.
pub fn feasible_at_length(
    dm: &DistanceMatrix,
    lambda: u64,
    len: u64,
    cfg: &SearchConfig,
) -> Result<Option<Addressing>, ExactError> {
    if lambda == 0 {
        return Err(ExactError::ZeroLambda);
    }
    let nodes = AtomicU64::new(0);
    let found = search::search(dm, lambda, len, cfg, &nodes)?;
    if let Some(w) = &found {
        check_witness(w, dm, lambda)?;
    }
    Ok(found)
}

/// Shortest addressing among the constructive schemes: Hamilton-cycle and
/// Hamilton-path orders of the metric closure (up to 16 vertices), the
/// four-point construction, and the Hadamard code.
pub fn constructive_upper(dm: &DistanceMatrix, lambda: u64) -> Result<Addressing, ExactError> {
    if lambda == 0 {
        return Err(ExactError::ZeroLambda);
    }
    let scaled = dm.scaled(lambda);
    let n = dm.n();
    let mut candidates = vec![hadamard_addressing(dm, lambda).expect("lambda > 0")];
    if n <= 16 {
        let cyc = held_karp_cycle(&scaled, 16).expect("within cap");
        candidates.push(cyclic_order_addressing(&scaled, &cyc.order));
        let path = held_karp_path(&scaled, 16).expect("within cap");
        candidates.push(linear_order_addressing(&scaled, &path.order));
    } else {
        let order: Vec<usize> = (0..n).collect();
        candidates.push(cyclic_order_addressing(&scaled, &order));
    }
    if n == 4 {
        candidates.push(k4_addressing(&scaled).expect("distance matrices are metric"));
    }
    let best = candidates.into_iter().min_by_key(Addressing::len).expect("nonempty");
    check_witness(&best, dm, lambda)?;
    Ok(best)
}

/// Exact `c_lambda` by trying lengths upward from the best closed-form lower
/// bound. Every length below the answer is refuted by exhaustive search, and
/// the constructive upper bound ends the scan early.
pub fn brute_force_c(dm: &DistanceMatrix, lambda: u64, cfg: &SearchConfig) -> Result<ExactResult, ExactError> {
    if lambda == 0 {
        return Err(ExactError::ZeroLambda);
    }
    let (start, seed_rule) = if cfg.seed_lower_bound {
        lower_bounds_dm(&dm.scaled(lambda), BoundsConfig::default()).best_lower().expect("always reported")
    } else {
        (0, "exhaustive_search")
    };
    let incumbent = constructive_upper(dm, lambda)?;
    let upper = incumbent.len() as u64;
    let nodes = AtomicU64::new(0);
    let rule = |l: u64| if l == start { seed_rule } else { "exhaustive_search" };
    for l in start..upper {
        if let Some(cap) = cfg.max_length {
            if l > cap {
                return Err(ExactError::LengthCap { cap });
            }
        }
        if let Some(w) = search::search(dm, lambda, l, cfg, &nodes)? {
            check_witness(&w, dm, lambda)?;
            return Ok(ExactResult {
                value: l,
                witness: w,
                lower_rule: rule(l),
                nodes: nodes.load(Ordering::Relaxed),
            });
        }
    }
    if cfg.max_length.is_some_and(|cap| upper > cap) {
        return Err(ExactError::LengthCap { cap: cfg.max_length.unwrap_or(0) });
    }
    Ok(ExactResult {
        value: upper,
        witness: incumbent,
        lower_rule: rule(upper.max(start)),
        nodes: nodes.load(Ordering::Relaxed),
    })
}

/// Whether `c_(l1 + l2) <= c_l1 + c_l2`, with all three values computed by
/// [`brute_force_c`]. The concatenated witnesses are re-verified at
/// `l1 + l2` as the certificate.
pub fn subadditivity_check(
    dm: &DistanceMatrix,
    l1: u64,
    l2: u64,
    cfg: &SearchConfig,
) -> Result<bool, ExactError> {
    if l1 == 0 || l2 == 0 {
        return Err(ExactError::ZeroLambda);
    }
    let a = brute_force_c(dm, l1, cfg)?;
    let b = brute_force_c(dm, l2, cfg)?;
    let sum = brute_force_c(dm, l1 + l2, cfg)?;
    let joined = a.witness.hconcat(&b.witness).expect("same vertex count");
    check_witness(&joined, dm, l1 + l2)?;
    Ok(sum.value <= a.value + b.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn dm(g: &crate::graph::WeightedGraph) -> DistanceMatrix {
        g.distances().unwrap()
    }

    #[test]
    fn decision_examples() {
        let c3 = dm(&unit_cycle(3));
        let cfg = SearchConfig::default();
        assert_eq!(feasible_at_length(&c3, 1, 1, &cfg).unwrap(), None);
        let w = feasible_at_length(&c3, 1, 2, &cfg).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(feasible_at_length(&dm(&unit_cycle(6)), 1, 2, &cfg).unwrap(), None);
    }

    #[test]
    fn oracle_examples() {
        let cfg = SearchConfig::default();
        assert_eq!(brute_force_c(&dm(&complete(4, 1)), 1, &cfg).unwrap().value, 2);
        assert_eq!(brute_force_c(&dm(&unit_cycle(3)), 3, &cfg).unwrap().value, 5);
        assert_eq!(brute_force_c(&dm(&cycle(&[2, 3, 4])), 1, &cfg).unwrap().value, 5);
        let r = brute_force_c(&dm(&unit_cycle(6)), 1, &cfg).unwrap();
        assert_eq!(r.certificate(), "length 3 proven optimal (lower bound rule = diameter)");
    }

    #[test]
    fn unseeded_and_ablated_searches_agree() {
        let graphs = [unit_cycle(3), unit_cycle(5), complete(4, 1), path(&[1, 2]), star(&[1, 1, 2])];
        let variants = [
            SearchConfig { seed_lower_bound: false, ..SearchConfig::default() },
            SearchConfig { fix_first_row: false, ..SearchConfig::default() },
            SearchConfig { canonical_columns: false, seed_lower_bound: false, ..SearchConfig::default() },
        ];
        for g in &graphs {
            let m = dm(g);
            let base = brute_force_c(&m, 1, &SearchConfig::default()).unwrap().value;
            for cfg in &variants {
                assert_eq!(brute_force_c(&m, 1, cfg).unwrap().value, base);
            }
        }
        let r = brute_force_c(&dm(&unit_cycle(4)), 1, &variants[0]).unwrap();
        assert_eq!(r.lower_rule, "exhaustive_search");
    }

    #[test]
    fn budget_is_not_infeasibility() {
        let cfg = SearchConfig { node_limit: 10, seed_lower_bound: false, ..SearchConfig::default() };
        // c_3(C7) = 11, so length 10 needs a long refutation
        let m = dm(&unit_cycle(7));
        assert!(matches!(
            feasible_at_length(&m, 3, 10, &cfg),
            Err(ExactError::BudgetExceeded { limit: 10 })
        ));
    }

    #[test]
    fn length_cap() {
        let cfg = SearchConfig { max_length: Some(2), ..SearchConfig::default() };
        assert_eq!(
            brute_force_c(&dm(&unit_cycle(7)), 1, &cfg),
            Err(ExactError::LengthCap { cap: 2 })
        );
    }

    #[test]
    fn subadditivity_examples() {
        let c3 = dm(&unit_cycle(3));
        let cfg = SearchConfig::default();
        assert!(subadditivity_check(&c3, 1, 1, &cfg).unwrap());
        assert!(subadditivity_check(&c3, 1, 2, &cfg).unwrap());
        assert_eq!(subadditivity_check(&c3, 0, 2, &cfg), Err(ExactError::ZeroLambda));
    }

    #[test]
    fn zero_lambda() {
        let c3 = dm(&unit_cycle(3));
        assert_eq!(brute_force_c(&c3, 0, &SearchConfig::default()), Err(ExactError::ZeroLambda));
        assert_eq!(branch_and_bound_c(&c3, 0), Err(ExactError::ZeroLambda));
    }
}
