//! Branch and bound on the integer column-count program with exact LP bounds.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{check_witness, constructive_upper, ExactError, ExactResult};
use crate::addressing::{from_cuts, Addressing};
use crate::graph::DistanceMatrix;
use crate::lp::{
    build_primal_with_cap, ceil_u64, cut_mask, solve_exact, Constraint, LinearProgramSpec, LpStatus,
    Rational, Relation, DEFAULT_PRIMAL_CAP,
};

#[derive(Debug, Clone)]
pub struct BnbConfig {
    /// LP relaxations solved before giving up.
    pub node_limit: u64,
    pub primal_cap: usize,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self { node_limit: 100_000, primal_cap: DEFAULT_PRIMAL_CAP }
    }
}

/// Exact `c_lambda` with default limits and the constructive incumbent.
pub fn branch_and_bound_c(dm: &DistanceMatrix, lambda: u64) -> Result<ExactResult, ExactError> {
    branch_and_bound_c_with(dm, lambda, &BnbConfig::default(), None)
}

/// Branches on the lowest-index fractional `S_A` (`S_A >= ceil` first, then
/// `S_A <= floor`) and prunes nodes whose relaxation rounds up to the
/// incumbent. `incumbent` may supply an addressing known to be valid, such
/// as a concatenation of factor witnesses; it is verified before use.
pub fn branch_and_bound_c_with(
    dm: &DistanceMatrix,
    lambda: u64,
    cfg: &BnbConfig,
    incumbent: Option<&Addressing>,
) -> Result<ExactResult, ExactError> {
    if lambda == 0 {
        return Err(ExactError::ZeroLambda);
    }
    let root = build_primal_with_cap(dm, lambda, cfg.primal_cap)?;
    let mut best = constructive_upper(dm, lambda)?;
    if let Some(given) = incumbent {
        check_witness(given, dm, lambda)?;
        if given.len() < best.len() {
            best = given.clone();
        }
    }

    let mut stack: Vec<Vec<Constraint>> = vec![Vec::new()];
    let mut solved = 0u64;
    let mut root_bound = None;
    while let Some(extra) = stack.pop() {
        if solved >= cfg.node_limit {
            return Err(ExactError::BudgetExceeded { limit: cfg.node_limit });
        }
        solved += 1;
        let mut lp = root.clone();
        lp.constraints.extend(extra.iter().cloned());
        let sol = solve_exact(&lp)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let bound = ceil_u64(&sol.value).expect("nonnegative objective");
        root_bound.get_or_insert(bound);
        if bound >= best.len() as u64 {
            continue;
        }
        match sol.assignment.iter().position(|x| !x.is_integer()) {
            None => best = witness_from(&root, &sol.assignment, dm.n()),
            Some(k) => {
                let x = &sol.assignment[k];
                let floor = x.floor();
                stack.push(with_bound(&extra, &root, k, Relation::Le, floor.clone()));
                stack.push(with_bound(&extra, &root, k, Relation::Ge, floor + Rational::one()));
            }
        }
    }

    check_witness(&best, dm, lambda)?;
    let value = best.len() as u64;
    let lower_rule = if root_bound.is_some_and(|b| b >= value) { "lp_relaxation" } else { "branch_and_bound" };
    Ok(ExactResult { value, witness: best, lower_rule, nodes: solved })
}

fn with_bound(
    extra: &[Constraint],
    root: &LinearProgramSpec,
    k: usize,
    relation: Relation,
    rhs: Rational,
) -> Vec<Constraint> {
    let mut out = extra.to_vec();
    out.push(Constraint {
        name: format!("b{}_{}", out.len(), root.variables[k]),
        coeffs: vec![(k, Rational::one())],
        relation,
        rhs,
    });
    out
}

fn witness_from(root: &LinearProgramSpec, s: &[Rational], n: usize) -> Addressing {
    debug_assert_eq!(root.num_vars(), s.len());
    let cuts: Vec<(u64, u64)> = s
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| {
            let count: BigInt = x.to_integer();
            (cut_mask(k), count.to_u64().expect("column count fits in u64"))
        })
        .collect();
    from_cuts(n, &cuts)
}
