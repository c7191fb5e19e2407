//! Two-phase revised simplex in exact rational arithmetic.
//!
//! Every row is scaled to integer data with a nonnegative right-hand side.
//! `<=` rows get a slack; `>=` rows get a surplus and an artificial; `=` rows
//! get an artificial. The basis inverse is kept dense. Entering and leaving
//! variables follow Bland's lowest-index rule, so the method terminates on
//! degenerate programs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LinearProgramSpec, LpError, LpSolution, LpStatus, Rational, Relation, Sense};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    m: usize,
    /// Sparse integer columns of the scaled standard form.
    cols: Vec<Vec<(usize, BigInt)>>,
    kind: Vec<Kind>,
    binv: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<Rational>,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    /// Simplex multipliers `c_B^T B^{-1}`, returned over a common denominator.
    fn multipliers(&self, cost: &[BigInt]) -> (Vec<BigInt>, BigInt) {
        let mut y = vec![Rational::zero(); self.m];
        for (r, &b) in self.basis.iter().enumerate() {
            let c = &cost[b];
            if c.is_zero() {
                continue;
            }
            let c = Rational::from_integer(c.clone());
            for (k, yk) in y.iter_mut().enumerate() {
                if !self.binv[r][k].is_zero() {
                    *yk += &c * &self.binv[r][k];
                }
            }
        }
        let den = y.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let scaled = y
            .iter()
            .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
            .collect();
        (scaled, den)
    }

    /// `B^{-1} a_j`.
    fn ftran(&self, j: usize) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.m];
        for (k, a) in &self.cols[j] {
            let a = Rational::from_integer(a.clone());
            for (i, ui) in u.iter_mut().enumerate() {
                if !self.binv[i][*k].is_zero() {
                    *ui += &self.binv[i][*k] * &a;
                }
            }
        }
        u
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[Rational]) {
        let ur = u[r].clone();
        for v in self.binv[r].iter_mut() {
            if !v.is_zero() {
                *v /= &ur;
            }
        }
        self.xb[r] /= &ur;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        for (i, ui) in u.iter().enumerate() {
            if i == r || ui.is_zero() {
                continue;
            }
            for (v, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= ui * p;
                }
            }
            self.xb[i] -= ui * &pivot_x;
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[entering] = true;
        self.basis[r] = entering;
    }

    /// One Bland iteration over the columns `allowed` admits.
    fn step(&mut self, cost: &[BigInt], allowed: impl Fn(Kind) -> bool) -> Step {
        let (y, den) = self.multipliers(cost);
        let entering = (0..self.cols.len()).find(|&j| {
            if self.in_basis[j] || !allowed(self.kind[j]) {
                return false;
            }
            let mut reduced = &cost[j] * &den;
            for (k, a) in &self.cols[j] {
                if !y[*k].is_zero() {
                    reduced -= &y[*k] * a;
                }
            }
            reduced.is_negative()
        });
        let Some(q) = entering else {
            return Step::Optimal;
        };
        let u = self.ftran(q);
        let mut leave: Option<(usize, Rational)> = None;
        for (i, ui) in u.iter().enumerate() {
            if !ui.is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / ui;
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        match leave {
            None => Step::Unbounded,
            Some((r, _)) => {
                self.pivot(r, q, &u);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self, cost: &[BigInt], allowed: impl Fn(Kind) -> bool + Copy) -> Step {
        loop {
            match self.step(cost, allowed) {
                Step::Pivoted => continue,
                done => return done,
            }
        }
    }
}

/// Solves `lp` exactly. The returned assignment is re-checked against every
/// row and the objective recomputed from it before returning.
pub fn solve_exact(lp: &LinearProgramSpec) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let nv = lp.num_vars();
    let m = lp.constraints.len();

    let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); nv];
    let mut kind = vec![Kind::Structural; nv];
    let mut rhs = Vec::with_capacity(m);
    let mut row_scale = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut scale = c.coeffs.iter().fold(c.rhs.denom().clone(), |l, (_, a)| l.lcm(a.denom()));
        let mut relation = c.relation;
        if c.rhs.is_negative() {
            scale = -scale;
            relation = match relation {
                Relation::Ge => Relation::Le,
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
            };
        }
        let s = Rational::from_integer(scale.clone());
        for (j, a) in &c.coeffs {
            if !a.is_zero() {
                cols[*j].push((i, (a * &s).to_integer()));
            }
        }
        rhs.push((&c.rhs * &s).to_integer());
        row_scale.push(scale);
        if relation == Relation::Ge {
            cols.push(vec![(i, -BigInt::one())]);
            kind.push(Kind::Slack);
        }
        cols.push(vec![(i, BigInt::one())]);
        kind.push(if relation == Relation::Le { Kind::Slack } else { Kind::Artificial });
        basis.push(cols.len() - 1);
    }

    let total = cols.len();
    let mut in_basis = vec![false; total];
    for &b in &basis {
        in_basis[b] = true;
    }
    let binv = (0..m)
        .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let xb = rhs.iter().map(|b| Rational::from_integer(b.clone())).collect();
    let mut t = Tableau { m, cols, kind, binv, basis, in_basis, xb };

    // phase 1
    if t.kind.contains(&Kind::Artificial) {
        let cost: Vec<BigInt> = t
            .kind
            .iter()
            .map(|k| if *k == Kind::Artificial { BigInt::one() } else { BigInt::zero() })
            .collect();
        t.run(&cost, |_| true);
        let infeasible = t
            .basis
            .iter()
            .zip(&t.xb)
            .any(|(&b, x)| t.kind[b] == Kind::Artificial && x.is_positive());
        if infeasible {
            return Ok(not_optimal(LpStatus::Infeasible));
        }
        drive_out_artificials(&mut t);
    }

    // phase 2, always as minimization
    let obj_scale = lp.objective.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let sign = if lp.sense == Sense::Maximize { -BigInt::one() } else { BigInt::one() };
    let factor = Rational::from_integer(&obj_scale * &sign);
    let mut cost: Vec<BigInt> = lp.objective.iter().map(|c| (c * &factor).to_integer()).collect();
    cost.resize(total, BigInt::zero());
    if let Step::Unbounded = t.run(&cost, |k| k != Kind::Artificial) {
        return Ok(not_optimal(LpStatus::Unbounded));
    }

    let mut assignment = vec![Rational::zero(); nv];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < nv {
            assignment[b] = t.xb[r].clone();
        }
    }
    if !lp.is_feasible(&assignment) {
        return Err(LpError::SelfCheck("optimal vertex violates a constraint".into()));
    }
    let value = lp.objective_value(&assignment);

    let (y, den) = t.multipliers(&cost);
    let denom = Rational::from_integer(den * &obj_scale * &sign);
    let duals: Vec<Rational> = y
        .into_iter()
        .zip(&row_scale)
        .map(|(yi, s)| Rational::from_integer(yi * s) / &denom)
        .collect();
    let dual_value: Rational = duals.iter().zip(&lp.constraints).map(|(d, c)| d * &c.rhs).sum();
    if dual_value != value {
        return Err(LpError::SelfCheck("dual objective differs from primal".into()));
    }

    let mut basis: Vec<usize> = t.basis.iter().copied().filter(|&b| b < nv).collect();
    basis.sort_unstable();
    Ok(LpSolution { status: LpStatus::Optimal, value, assignment, duals, basis })
}

/// Replaces artificials left basic at zero by any structural or slack column
/// with a nonzero entry in their row. Rows without one are redundant and keep
/// their artificial, which stays at zero because no admissible column touches it.
fn drive_out_artificials(t: &mut Tableau) {
    for r in 0..t.m {
        if t.kind[t.basis[r]] != Kind::Artificial {
            continue;
        }
        let candidate = (0..t.cols.len()).find(|&j| {
            if t.kind[j] == Kind::Artificial || t.in_basis[j] {
                return false;
            }
            let entry: Rational = t.cols[j]
                .iter()
                .map(|(k, a)| Rational::from_integer(a.clone()) * &t.binv[r][*k])
                .sum();
            !entry.is_zero()
        });
        if let Some(j) = candidate {
            let u = t.ftran(j);
            t.pivot(r, j, &u);
        }
    }
}

fn not_optimal(status: LpStatus) -> LpSolution {
    LpSolution {
        status,
        value: Rational::zero(),
        assignment: Vec::new(),
        duals: Vec::new(),
        basis: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat, Constraint};
    use super::*;

    fn lp(sense: Sense, obj: &[i64], rows: &[(&[i64], Relation, i64)]) -> LinearProgramSpec {
        LinearProgramSpec {
            sense,
            variables: (0..obj.len()).map(|i| format!("x{i}")).collect(),
            objective: obj.iter().map(|&c| rat(c, 1)).collect(),
            constraints: rows
                .iter()
                .enumerate()
                .map(|(i, (a, rel, b))| Constraint {
                    name: format!("r{i}"),
                    coeffs: a.iter().enumerate().map(|(j, &v)| (j, rat(v, 1))).collect(),
                    relation: *rel,
                    rhs: rat(*b, 1),
                })
                .collect(),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let p = lp(
            Sense::Maximize,
            &[3, 5],
            &[(&[1, 0], Relation::Le, 4), (&[0, 2], Relation::Le, 12), (&[3, 2], Relation::Le, 18)],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, int(36));
        assert_eq!(s.assignment, vec![int(2), int(6)]);
        assert_eq!(s.duals, vec![int(0), rat(3, 2), int(1)]);
    }

    #[test]
    fn fractional_optimum() {
        // min x + y, 2x + y >= 3, x + 3y >= 2 -> 8/5 at (7/5, 1/5)
        let p = lp(Sense::Minimize, &[1, 1], &[(&[2, 1], Relation::Ge, 3), (&[1, 3], Relation::Ge, 2)]);
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.value, rat(8, 5));
        assert_eq!(s.assignment, vec![rat(7, 5), rat(1, 5)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(Sense::Minimize, &[1], &[(&[1], Relation::Le, 1), (&[1], Relation::Ge, 2)]);
        assert_eq!(solve_exact(&p).unwrap().status, LpStatus::Infeasible);
        let p = lp(Sense::Maximize, &[1, 0], &[(&[1, -1], Relation::Le, 1)]);
        assert_eq!(solve_exact(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_negative_rhs_and_redundancy() {
        // x + y = 2 twice (redundant), -x <= -1/2 means x >= 1/2; min y
        let mut p = lp(
            Sense::Minimize,
            &[0, 1],
            &[(&[1, 1], Relation::Eq, 2), (&[1, 1], Relation::Eq, 2), (&[-1, 0], Relation::Le, -1)],
        );
        p.constraints[2].rhs = rat(-1, 2);
        p.constraints.push(Constraint {
            name: "cap".into(),
            coeffs: vec![(0, rat(2, 3))],
            relation: Relation::Le,
            rhs: int(1),
        });
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.value, rat(1, 2));
        assert_eq!(s.assignment, vec![rat(3, 2), rat(1, 2)]);
    }

    #[test]
    fn empty_program() {
        let p = lp(Sense::Minimize, &[], &[]);
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.value, int(0));
    }

    #[test]
    fn degenerate_program_terminates() {
        // classic cycling example for the largest-coefficient rule
        let p = LinearProgramSpec {
            sense: Sense::Maximize,
            variables: (0..4).map(|i| format!("x{i}")).collect(),
            objective: vec![rat(3, 4), int(0) - int(150), rat(1, 50), int(0) - int(6)],
            constraints: vec![
                Constraint {
                    name: "a".into(),
                    coeffs: vec![(0, rat(1, 4)), (1, rat(-60, 1)), (2, rat(-1, 25)), (3, int(9))],
                    relation: Relation::Le,
                    rhs: int(0),
                },
                Constraint {
                    name: "b".into(),
                    coeffs: vec![(0, rat(1, 2)), (1, rat(-90, 1)), (2, rat(-1, 50)), (3, int(3))],
                    relation: Relation::Le,
                    rhs: int(0),
                },
                Constraint { name: "c".into(), coeffs: vec![(2, int(1))], relation: Relation::Le, rhs: int(1) },
            ],
        };
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.value, rat(1, 20));
    }
}
