//! Exact linear and integer programming over the rationals.
//!
//! Two-phase tableau simplex with Bland's rule, and a depth-first branch
//! and bound on the most fractional variable for integer programs. No
//! floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Default cap on branch-and-bound nodes.
pub const DEFAULT_NODE_LIMIT: u64 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("program is infeasible")]
    Infeasible,
    #[error("program is unbounded")]
    Unbounded,
    #[error("branch-and-bound node limit of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("invalid program: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Variables have a finite lower bound (default 0) and an optional upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
    pub integer: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub objective: Rational,
    pub x: Vec<Rational>,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `"5/2"`, or `"3"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![Rational::zero(); n],
            upper: vec![None; n],
            integer: vec![false; n],
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Sparse form: `(index, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.vars()];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn set_all_integer(&mut self, flag: bool) {
        self.integer = vec![flag; self.vars()];
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.vars();
        if self.lower.len() != n || self.upper.len() != n || self.integer.len() != n {
            return Err(LpError::Invalid("bound or integrality vectors have the wrong length".into()));
        }
        if let Some(k) = self.constraints.iter().position(|c| c.coeffs.len() != n) {
            return Err(LpError::Invalid(format!("constraint {k} has the wrong length")));
        }
        Ok(())
    }

    /// Exact check of every constraint and bound.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.vars()
            && x.iter().zip(&self.lower).all(|(v, l)| v >= l)
            && x.iter().zip(&self.upper).all(|(v, u)| u.as_ref().map_or(true, |u| v <= u))
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Solves the relaxation, ignoring integrality.
pub fn lp_solve(p: &LinearProgram) -> Result<Solution, LpError> {
    p.check()?;
    for (l, u) in p.lower.iter().zip(&p.upper) {
        if matches!(u, Some(u) if u < l) {
            return Err(LpError::Infeasible);
        }
    }
    let n = p.vars();
    // shift x = y + lower so that y >= 0; minimise internally
    let sign = if p.sense == Sense::Minimize { Rational::one() } else { -Rational::one() };
    let cost: Vec<Rational> = p.objective.iter().map(|c| c * &sign).collect();
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &p.constraints {
        let shift: Rational = c.coeffs.iter().zip(&p.lower).map(|(a, l)| a * l).sum();
        rows.push((c.coeffs.clone(), c.relation, &c.rhs - shift));
    }
    for (j, u) in p.upper.iter().enumerate() {
        if let Some(u) = u {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[j] = Rational::one();
            rows.push((coeffs, Relation::Le, u - &p.lower[j]));
        }
    }
    let y = simplex(n, &cost, rows)?;
    let x: Vec<Rational> = y.iter().zip(&p.lower).map(|(v, l)| v + l).collect();
    let objective = p.evaluate(&x);
    debug_assert!(p.is_feasible(&x));
    Ok(Solution { objective, x })
}

struct Tableau {
    // each row: coefficients for all columns, then rhs
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimises `cost·x` over the current tableau with Bland's rule.
    /// Columns with `allowed[j] == false` never enter.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            // reduced cost c_j - c_B B^-1 A_j, computed from the tableau
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut rc = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[r][j].is_zero() {
                        rc -= &cost[b] * &self.a[r][j];
                    }
                }
                rc.is_negative()
            });
            let Some(c) = entering else { return Ok(()) };
            let rhs = self.cols;
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if self.a[r][c].is_positive() {
                    let ratio = &self.a[r][rhs] / &self.a[r][c];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return Err(LpError::Unbounded) };
            self.pivot(r, c);
        }
    }
}

/// Minimises `cost·y` subject to the rows and `y ≥ 0`.
fn simplex(n: usize, cost: &[Rational], rows: Vec<(Vec<Rational>, Relation, Rational)>) -> Result<Vec<Rational>, LpError> {
    // normalise to nonnegative right-hand sides
    let rows: Vec<_> = rows
        .into_iter()
        .map(|(coeffs, rel, rhs)| {
            if rhs.is_negative() {
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (coeffs.iter().map(|c| -c).collect::<Vec<_>>(), flipped, -rhs)
            } else {
                (coeffs, rel, rhs)
            }
        })
        .collect();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let mut a = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let (mut s_at, mut a_at) = (n, n + slacks);
    for (coeffs, rel, rhs) in rows {
        let mut row = vec![Rational::zero(); cols + 1];
        row[..n].clone_from_slice(&coeffs);
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[s_at] = Rational::one();
                basis.push(s_at);
                s_at += 1;
            }
            Relation::Ge => {
                row[s_at] = -Rational::one();
                s_at += 1;
                row[a_at] = Rational::one();
                basis.push(a_at);
                a_at += 1;
            }
            Relation::Eq => {
                row[a_at] = Rational::one();
                basis.push(a_at);
                a_at += 1;
            }
        }
        a.push(row);
    }
    let mut t = Tableau { a, basis, cols };
    let is_artificial = |j: usize| j >= n + slacks;
    if artificials > 0 {
        let phase1: Vec<Rational> = (0..cols).map(|j| if is_artificial(j) { Rational::one() } else { Rational::zero() }).collect();
        t.optimize(&phase1, &vec![true; cols])?;
        let infeasibility: Rational = (0..t.a.len())
            .filter(|&r| is_artificial(t.basis[r]))
            .map(|r| t.a[r][cols].clone())
            .sum();
        if infeasibility.is_positive() {
            return Err(LpError::Infeasible);
        }
        // drive remaining (zero-valued) artificials out of the basis
        let mut r = 0;
        while r < t.a.len() {
            if is_artificial(t.basis[r]) {
                match (0..n + slacks).find(|&j| !t.a[r][j].is_zero()) {
                    Some(j) => {
                        t.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        t.a.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }
    let mut phase2 = vec![Rational::zero(); cols];
    phase2[..n].clone_from_slice(cost);
    let allowed: Vec<bool> = (0..cols).map(|j| !is_artificial(j)).collect();
    t.optimize(&phase2, &allowed)?;
    let mut y = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            y[b] = t.a[r][cols].clone();
        }
    }
    Ok(y)
}

/// Solves with integrality, using the default node limit.
pub fn ilp_solve(p: &LinearProgram) -> Result<Solution, LpError> {
    ilp_solve_with_limit(p, DEFAULT_NODE_LIMIT)
}

pub fn ilp_solve_with_limit(p: &LinearProgram, node_limit: u64) -> Result<Solution, LpError> {
    p.check()?;
    // work as minimisation
    let mut q = p.clone();
    if p.sense == Sense::Maximize {
        q.sense = Sense::Minimize;
        q.objective = p.objective.iter().map(|c| -c).collect();
    }
    // objective value is integral at every integer point when all costs sit
    // on integer variables with integer coefficients
    let integral_objective = q
        .objective
        .iter()
        .zip(&q.integer)
        .all(|(c, &i)| c.is_zero() || (i && c.is_integer()));
    let mut best: Option<Solution> = None;
    let mut nodes = 0u64;
    branch(&q, integral_objective, &mut best, &mut nodes, node_limit)?;
    let mut sol = best.ok_or(LpError::Infeasible)?;
    sol.objective = p.evaluate(&sol.x);
    Ok(sol)
}

fn branch(
    p: &LinearProgram,
    integral_objective: bool,
    best: &mut Option<Solution>,
    nodes: &mut u64,
    limit: u64,
) -> Result<(), LpError> {
    *nodes += 1;
    if *nodes > limit {
        return Err(LpError::BudgetExceeded(limit));
    }
    let relax = match lp_solve(p) {
        Ok(s) => s,
        Err(LpError::Infeasible) => return Ok(()),
        Err(e) => return Err(e),
    };
    let bound = if integral_objective { relax.objective.ceil() } else { relax.objective.clone() };
    if let Some(b) = best {
        if bound >= b.objective {
            return Ok(());
        }
    }
    let half = ratio(1, 2);
    let mut pick: Option<(usize, Rational)> = None;
    for (j, v) in relax.x.iter().enumerate() {
        if !p.integer[j] || v.is_integer() {
            continue;
        }
        let frac = v - v.floor();
        let dist = (&frac - &half).abs();
        if pick.as_ref().map_or(true, |(_, d)| dist < *d) {
            pick = Some((j, dist));
        }
    }
    let Some((j, _)) = pick else {
        *best = Some(relax);
        return Ok(());
    };
    let v = &relax.x[j];
    let mut up = p.clone();
    up.lower[j] = v.ceil();
    branch(&up, integral_objective, best, nodes, limit)?;
    let mut down = p.clone();
    down.upper[j] = Some(v.floor());
    branch(&down, integral_objective, best, nodes, limit)
}
