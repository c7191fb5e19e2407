//! Exact rational linear programming over address-column variables.
//!
//! The primal program has one variable `S_A` per cut `{A, V \ A}`, counting
//! address columns whose one-set is `A`, and one covering row per vertex
//! pair. Cuts are canonicalized to subsets that avoid vertex 0, so variable
//! `k` is the cut `A = (k + 1) << 1`.

mod simplex;

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::addressing::ceil_log2;
use crate::graph::DistanceMatrix;

pub use simplex::solve_exact;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

pub const DEFAULT_PRIMAL_CAP: usize = 14;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Smallest integer at least `r`; `None` when negative or too large.
pub fn ceil_u64(r: &Rational) -> Option<u64> {
    r.ceil().to_integer().to_u64()
}

/// Renders `p/q`, or `p` when integral.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("{n} vertices exceed the LP size limit of {cap}")]
    SizeLimit { n: usize, cap: usize },
    #[error("malformed program: {0}")]
    Malformed(String),
    #[error("solver self-check failed: {0}")]
    SelfCheck(String),
    #[error("beta is zero (fewer than two vertices)")]
    ZeroBeta,
    #[error("program is {0}")]
    NotOptimal(LpStatus),
    #[error("integrality gap {gap} outside [1, {max}]")]
    GapOutOfRange { gap: String, max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

/// One row: sparse `(variable, coefficient)` pairs, relation, right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

/// A linear program over nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgramSpec {
    pub sense: Sense,
    pub variables: Vec<String>,
    /// Dense objective, one coefficient per variable.
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgramSpec {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.variables.len() {
            return Err(LpError::Malformed(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.variables.len()
            )));
        }
        for c in &self.constraints {
            let mut seen = vec![false; self.variables.len()];
            for &(j, _) in &c.coeffs {
                if j >= self.variables.len() {
                    return Err(LpError::Malformed(format!(
                        "row {} references variable {j}",
                        c.name
                    )));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(LpError::Malformed(format!(
                        "row {} repeats variable {j}",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// True when `x` is nonnegative and satisfies every row exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| c.relation.holds(&c.lhs(x), &c.rhs))
    }

    /// CPLEX LP text. Rows with fractional data are multiplied through by the
    /// least common multiple of their denominators; a fractional objective is
    /// scaled the same way and the factor is noted in a comment.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        let obj_scale = self.objective.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let s = Rational::from_integer(obj_scale.clone());
        let obj: Vec<(usize, BigInt)> =
            self.objective.iter().enumerate().map(|(j, c)| (j, (c * &s).to_integer())).collect();
        if !obj_scale.is_one() {
            let _ = writeln!(out, "\\ objective multiplied by {obj_scale}");
        }
        out.push_str(match self.sense {
            Sense::Minimize => "Minimize\n",
            Sense::Maximize => "Maximize\n",
        });
        let _ = writeln!(out, " obj: {}", self.lp_terms(&obj));
        out.push_str("Subject To\n");
        for c in &self.constraints {
            let scale = c.coeffs.iter().fold(c.rhs.denom().clone(), |l, (_, a)| l.lcm(a.denom()));
            let s = Rational::from_integer(scale);
            let row: Vec<(usize, BigInt)> =
                c.coeffs.iter().map(|(j, a)| (*j, (a * &s).to_integer())).collect();
            let rhs = (&c.rhs * &s).to_integer();
            let _ = writeln!(out, " {}: {} {} {}", c.name, self.lp_terms(&row), c.relation.symbol(), rhs);
        }
        out.push_str("Bounds\n");
        for v in &self.variables {
            let _ = writeln!(out, " {v} >= 0");
        }
        out.push_str("End\n");
        out
    }

    fn lp_terms(&self, row: &[(usize, BigInt)]) -> String {
        let mut s = String::new();
        for (j, a) in row.iter().filter(|(_, a)| !a.is_zero()) {
            match (s.is_empty(), a.is_negative()) {
                (true, false) => {}
                (true, true) => s.push_str("- "),
                (false, neg) => s.push_str(if neg { " - " } else { " + " }),
            }
            let mag = a.abs();
            if mag.is_one() {
                s.push_str(&self.variables[*j]);
            } else {
                let _ = write!(s, "{mag} {}", self.variables[*j]);
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

/// Solver output. `value`, `assignment` and `duals` are only meaningful when
/// `status` is optimal; otherwise they are zero or empty.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub assignment: Vec<Rational>,
    /// One multiplier per constraint, certifying optimality: the dual
    /// objective `sum duals[i] * rhs[i]` equals `value`.
    pub duals: Vec<Rational>,
    /// Indices of the basic structural variables at the optimal vertex.
    pub basis: Vec<usize>,
}

/// Vertex set of canonical cut variable `k`.
pub fn cut_mask(k: usize) -> u64 {
    ((k as u64) + 1) << 1
}

pub fn num_cuts(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (1usize << (n - 1)) - 1
    }
}

fn cut_name(mask: u64) -> String {
    let members: Vec<String> =
        (0..64).filter(|v| (mask >> v) & 1 == 1).map(|v| v.to_string()).collect();
    format!("S_{}", members.join("_"))
}

fn separates(mask: u64, i: usize, j: usize) -> bool {
    ((mask >> i) ^ (mask >> j)) & 1 == 1
}

fn check_cap(n: usize, cap: usize) -> Result<(), LpError> {
    if n > cap || n > 63 {
        Err(LpError::SizeLimit { n, cap })
    } else {
        Ok(())
    }
}

/// Covering program: minimize `sum S_A` subject to, for each pair `i < j`,
/// the columns separating `i` and `j` numbering at least `lambda * d(i, j)`.
pub fn build_primal(dm: &DistanceMatrix, lambda: u64) -> Result<LinearProgramSpec, LpError> {
    build_primal_with_cap(dm, lambda, DEFAULT_PRIMAL_CAP)
}

pub fn build_primal_with_cap(
    dm: &DistanceMatrix,
    lambda: u64,
    cap: usize,
) -> Result<LinearProgramSpec, LpError> {
    let n = dm.n();
    check_cap(n, cap)?;
    let cuts = num_cuts(n);
    let constraints = dm
        .pairs()
        .map(|(i, j)| Constraint {
            name: format!("p_{i}_{j}"),
            coeffs: (0..cuts)
                .filter(|&k| separates(cut_mask(k), i, j))
                .map(|k| (k, Rational::one()))
                .collect(),
            relation: Relation::Ge,
            rhs: int(lambda * dm.get(i, j)),
        })
        .collect();
    Ok(LinearProgramSpec {
        sense: Sense::Minimize,
        variables: (0..cuts).map(|k| cut_name(cut_mask(k))).collect(),
        objective: vec![Rational::one(); cuts],
        constraints,
    })
}

/// Cut-packing program: maximize `sum d(i, j) z_ij` with every cut carrying
/// total weight at most 1.
pub fn build_dual(dm: &DistanceMatrix) -> Result<LinearProgramSpec, LpError> {
    build_dual_with_cap(dm, DEFAULT_PRIMAL_CAP)
}

pub fn build_dual_with_cap(dm: &DistanceMatrix, cap: usize) -> Result<LinearProgramSpec, LpError> {
    let n = dm.n();
    check_cap(n, cap)?;
    let pairs: Vec<(usize, usize)> = dm.pairs().collect();
    let constraints = (0..num_cuts(n))
        .map(|k| {
            let mask = cut_mask(k);
            Constraint {
                name: format!("c{}", &cut_name(mask)[1..]),
                coeffs: pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, j))| separates(mask, i, j))
                    .map(|(p, _)| (p, Rational::one()))
                    .collect(),
                relation: Relation::Le,
                rhs: Rational::one(),
            }
        })
        .collect();
    Ok(LinearProgramSpec {
        sense: Sense::Maximize,
        variables: pairs.iter().map(|(i, j)| format!("z_{i}_{j}")).collect(),
        objective: pairs.iter().map(|&(i, j)| int(dm.get(i, j))).collect(),
        constraints,
    })
}

/// The uniform dual point `z_ij = 1 / floor(n^2 / 4)`: every cut separates
/// at most `floor(n^2 / 4)` pairs, so it is feasible for [`build_dual`].
pub fn plotkin_point(n: usize) -> Vec<Rational> {
    if n < 2 {
        return Vec::new();
    }
    let w = rat(1, (n * n / 4) as i64);
    vec![w; n * (n - 1) / 2]
}

/// `sum d(i, j) z_ij` over pairs in lexicographic order.
pub fn dual_objective(dm: &DistanceMatrix, z: &[Rational]) -> Rational {
    dm.pairs().zip(z).map(|((i, j), v)| int(dm.get(i, j)) * v).sum()
}

/// Optimum of the covering program at `lambda = 1`.
pub fn beta(dm: &DistanceMatrix) -> Result<Rational, LpError> {
    beta_with_cap(dm, DEFAULT_PRIMAL_CAP)
}

pub fn beta_with_cap(dm: &DistanceMatrix, cap: usize) -> Result<Rational, LpError> {
    Ok(solve_optimal(&build_primal_with_cap(dm, 1, cap)?)?.value)
}

/// Solves and insists on an optimal status.
pub fn solve_optimal(lp: &LinearProgramSpec) -> Result<LpSolution, LpError> {
    let sol = solve_exact(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        s => Err(LpError::NotOptimal(s)),
    }
}

/// Least common multiple of the denominators of an optimal vertex. Scaling
/// distances by it makes that vertex integral.
pub fn candidate_mu(sol: &LpSolution) -> BigInt {
    sol.assignment.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()))
}

/// `exact_c / beta`, checked to lie in `[1, ceil(log2 n)]`.
pub fn integrality_gap(dm: &DistanceMatrix, exact_c: u64) -> Result<Rational, LpError> {
    let b = beta(dm)?;
    if b.is_zero() {
        return Err(LpError::ZeroBeta);
    }
    let gap = int(exact_c) / b;
    let max = ceil_log2(dm.n()).max(1);
    if gap < Rational::one() || gap > int(u64::from(max)) {
        return Err(LpError::GapOutOfRange { gap: fmt_rational(&gap), max });
    }
    Ok(gap)
}
