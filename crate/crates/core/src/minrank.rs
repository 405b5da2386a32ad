//! Exact min-rank of (hyper)graphs and κ of coded-side-information
//! instances.
//!
//! Both problems are "choose one vector per row from an affine space,
//! minimise the rank". A fitting matrix row is `e_tail + span(e_j : j in
//! head)`; a row of `A + R` is `R_i + (X^(i) ∩ X^(S))`. The search deepens
//! the rank cap `k` from a lower bound and runs a depth-first search over
//! rows that keeps the span of the rows chosen so far in reduced echelon
//! form. Once the span has dimension `k`, each later row is forced into it by
//! a linear solve instead of being enumerated. Failed `(row, span)` states are
//! memoised. Children are visited in lexicographic order, so the first leaf
//! found at the minimal cap is the lexicographically smallest optimal
//! assignment.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::digraph::{Digraph, Hypergraph};
use crate::field::FieldSpec;
use crate::instance::IccsiInstance;
use crate::matrix::{is_zero, normalize, unit, vec_axpy, vector_from_index, FqMatrix};
use crate::mds::rs_generator;
use crate::subspace::Subspace;

pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ICBOUND_BUDGET";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinRankError {
    #[error("search budget of {0} operations exceeded")]
    BudgetExceeded(u64),
    #[error("field of order {q} is too small: {why}")]
    FieldTooSmall { q: u32, why: String },
    #[error("invalid pattern: {0}")]
    Invalid(String),
}

/// The budget from `ICBOUND_BUDGET`, or [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&b| b > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

/// Positions of an `m×n` fitting matrix split into forced ones, forced
/// zeros and free entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittingPattern {
    pub rows: usize,
    pub cols: usize,
    pub fixed_one: Vec<(usize, usize)>,
    pub fixed_zero: Vec<(usize, usize)>,
    pub free: Vec<(usize, usize)>,
}

impl FittingPattern {
    pub fn of_hypergraph(h: &Hypergraph) -> Self {
        let (rows, cols) = (h.m(), h.n());
        let mut p = FittingPattern { rows, cols, fixed_one: vec![], fixed_zero: vec![], free: vec![] };
        for (i, e) in h.hyperarcs().iter().enumerate() {
            for j in 0..cols {
                if j == e.tail {
                    p.fixed_one.push((i, j));
                } else if e.head.contains(&j) {
                    p.free.push((i, j));
                } else {
                    p.fixed_zero.push((i, j));
                }
            }
        }
        p
    }

    pub fn of_digraph(g: &Digraph) -> Self {
        Self::of_hypergraph(&Hypergraph::from(g))
    }

    pub fn to_row_pattern(&self, field: &FieldSpec) -> RowPattern {
        let n = self.cols;
        let rows = (0..self.rows)
            .map(|i| {
                let mut base = vec![0; n];
                for &(r, c) in &self.fixed_one {
                    if r == i {
                        base[c] = 1;
                    }
                }
                let dirs = self.free.iter().filter(|&&(r, _)| r == i).map(|&(_, c)| unit(n, c)).collect();
                AffineRow { base, dirs }
            })
            .collect();
        RowPattern { field: field.clone(), n, rows }
    }
}

/// A row ranging over `base + span(dirs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRow {
    pub base: Vec<u32>,
    pub dirs: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct RowPattern {
    pub field: FieldSpec,
    pub n: usize,
    pub rows: Vec<AffineRow>,
}

impl RowPattern {
    /// Total number of assignments, saturating.
    pub fn assignment_count(&self) -> u64 {
        let q = self.field.q() as u64;
        self.rows
            .iter()
            .fold(1u64, |acc, r| acc.saturating_mul(q.saturating_pow(r.dirs.len() as u32)))
    }

    fn materialize(&self, i: usize, coeffs: &[u32]) -> Vec<u32> {
        let row = &self.rows[i];
        let mut v = row.base.clone();
        for (c, d) in coeffs.iter().zip(&row.dirs) {
            vec_axpy(&self.field, &mut v, *c, d);
        }
        v
    }
}

/// Optimal value with a lexicographically smallest optimal assignment.
#[derive(Clone, Debug)]
pub struct MinRank {
    pub value: usize,
    pub certificate: FqMatrix,
    /// Chosen coefficients of each row's directions.
    pub coefficients: Vec<Vec<u32>>,
}

/// Incremental reduced echelon basis.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, f: &FieldSpec, v: &[u32]) -> Vec<u32> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p];
            if c != 0 {
                vec_axpy(f, &mut out, f.neg(c), row);
            }
        }
        out
    }

    /// Inserts an already reduced nonzero vector.
    fn insert(&mut self, f: &FieldSpec, reduced: &[u32]) {
        let v = normalize(f, reduced);
        let p = v.iter().position(|&x| x != 0).expect("nonzero");
        for row in &mut self.rows {
            let c = row[p];
            if c != 0 {
                vec_axpy(f, row, f.neg(c), &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
    }

    fn key(&self) -> Vec<u32> {
        self.rows.concat()
    }
}

/// Lexicographically smallest `c` with `target + Σ c_j dirs_j = 0`.
fn lex_min_solution(f: &FieldSpec, target: &[u32], dirs: &[Vec<u32>]) -> Option<Vec<u32>> {
    let s = dirs.len();
    let n = target.len();
    // columns are dirs; solve D c = -target
    let mut a = FqMatrix::zeros(f, n, s);
    for (j, d) in dirs.iter().enumerate() {
        for (r, &x) in d.iter().enumerate() {
            a.set(r, j, x);
        }
    }
    let rhs: Vec<u32> = target.iter().map(|&x| f.neg(x)).collect();
    let sol = crate::matrix::solve(&a, &rhs).ok()?;
    let mut c = sol.particular;
    let mut kernel = sol.kernel;
    // walk coordinates left to right, zeroing each one that is still free
    for j in 0..s {
        let Some(k) = kernel.iter().position(|v| v[j] != 0) else { continue };
        let kv = kernel.remove(k);
        let scale = f.div(c[j], kv[j]);
        vec_axpy(f, &mut c, f.neg(scale), &kv);
        for other in &mut kernel {
            let t = f.div(other[j], kv[j]);
            vec_axpy(f, other, f.neg(t), &kv);
        }
    }
    Some(c)
}

struct Search<'a> {
    pat: &'a RowPattern,
    cap: usize,
    budget: u64,
    ops: u64,
    failed: HashSet<(usize, Vec<u32>)>,
    choice: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), MinRankError> {
        self.ops += 1;
        if self.ops > self.budget {
            Err(MinRankError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    fn dfs(&mut self, i: usize, ech: &Echelon) -> Result<bool, MinRankError> {
        if i == self.pat.rows.len() {
            return Ok(true);
        }
        let key = (i, ech.key());
        if self.failed.contains(&key) {
            return Ok(false);
        }
        self.tick()?;
        let f = &self.pat.field;
        let row = &self.pat.rows[i];
        let rb = ech.reduce(f, &row.base);
        let rd: Vec<Vec<u32>> = row.dirs.iter().map(|d| ech.reduce(f, d)).collect();
        let found = if ech.dim() == self.cap {
            match lex_min_solution(f, &rb, &rd) {
                Some(c) => {
                    self.choice[i] = c;
                    self.dfs(i + 1, ech)?
                }
                None => false,
            }
        } else {
            self.branch(i, ech, &rb, &rd)?
        };
        if !found {
            self.failed.insert(key);
        }
        Ok(found)
    }

    fn branch(&mut self, i: usize, ech: &Echelon, rb: &[u32], rd: &[Vec<u32>]) -> Result<bool, MinRankError> {
        let f = &self.pat.field;
        let q = f.q();
        let s = rd.len();
        let count = (q as u64).checked_pow(s as u32).ok_or(MinRankError::BudgetExceeded(self.budget))?;
        let mut tried_in_span = false;
        for idx in 0..count {
            self.tick()?;
            let c = vector_from_index(q, s, idx);
            let mut r = rb.to_vec();
            for (cj, d) in c.iter().zip(rd) {
                vec_axpy(f, &mut r, *cj, d);
            }
            self.choice[i] = c;
            if is_zero(&r) {
                if tried_in_span {
                    continue;
                }
                tried_in_span = true;
                if self.dfs(i + 1, ech)? {
                    return Ok(true);
                }
            } else {
                let mut next = ech.clone();
                next.insert(f, &r);
                if self.dfs(i + 1, &next)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Exact minimum rank over all assignments of the pattern.
pub fn minrank_pattern(pat: &RowPattern, budget: u64) -> Result<MinRank, MinRankError> {
    let m = pat.rows.len();
    for r in &pat.rows {
        if r.base.len() != pat.n || r.dirs.iter().any(|d| d.len() != pat.n) {
            return Err(MinRankError::Invalid("row vectors must have length n".into()));
        }
    }
    let upper = m.min(pat.n);
    let lower = if pat.rows.iter().all(|r| r.dirs.is_empty() && is_zero(&r.base)) { 0 } else { 1.min(upper) };
    let mut spent = 0;
    for cap in lower..=upper {
        let mut s = Search {
            pat,
            cap,
            budget: budget.saturating_sub(spent),
            ops: 0,
            failed: HashSet::new(),
            choice: vec![Vec::new(); m],
        };
        let found = s.dfs(0, &Echelon::default()).map_err(|_| MinRankError::BudgetExceeded(budget))?;
        spent += s.ops;
        if found {
            let rows: Vec<Vec<u32>> = (0..m).map(|i| pat.materialize(i, &s.choice[i])).collect();
            let certificate = FqMatrix::from_rows(&pat.field, pat.n, &rows);
            debug_assert_eq!(certificate.rank(), cap);
            return Ok(MinRank { value: cap, certificate, coefficients: s.choice });
        }
    }
    unreachable!("cap = min(m, n) always succeeds")
}

pub fn minrank_hypergraph(h: &Hypergraph, field: &FieldSpec, budget: u64) -> Result<MinRank, MinRankError> {
    minrank_pattern(&FittingPattern::of_hypergraph(h).to_row_pattern(field), budget)
}

pub fn minrank_digraph(g: &Digraph, field: &FieldSpec, budget: u64) -> Result<MinRank, MinRankError> {
    minrank_hypergraph(&Hypergraph::from(g), field, budget)
}

/// Histogram of ranks over every assignment of the pattern.
pub fn rank_distribution(pat: &RowPattern, budget: u64) -> Result<BTreeMap<usize, u64>, MinRankError> {
    if pat.assignment_count() > budget {
        return Err(MinRankError::BudgetExceeded(budget));
    }
    let mut memo = HashMap::new();
    let mut ops = 0;
    let dist = distribution_from(pat, 0, &Echelon::default(), &mut memo, &mut ops, budget)?;
    Ok(dist.into_iter().enumerate().filter(|&(_, c)| c > 0).collect())
}

fn distribution_from(
    pat: &RowPattern,
    i: usize,
    ech: &Echelon,
    memo: &mut HashMap<(usize, Vec<u32>), Vec<u64>>,
    ops: &mut u64,
    budget: u64,
) -> Result<Vec<u64>, MinRankError> {
    if i == pat.rows.len() {
        let mut d = vec![0; ech.dim() + 1];
        d[ech.dim()] = 1;
        return Ok(d);
    }
    let key = (i, ech.key());
    if let Some(d) = memo.get(&key) {
        return Ok(d.clone());
    }
    let f = &pat.field;
    let row = &pat.rows[i];
    let rb = ech.reduce(f, &row.base);
    let rd: Vec<Vec<u32>> = row.dirs.iter().map(|d| ech.reduce(f, d)).collect();
    let q = f.q();
    let count = (q as u64).pow(rd.len() as u32);
    let mut total: Vec<u64> = Vec::new();
    let mut in_span = 0u64;
    for idx in 0..count {
        *ops += 1;
        if *ops > budget {
            return Err(MinRankError::BudgetExceeded(budget));
        }
        let c = vector_from_index(q, rd.len(), idx);
        let mut r = rb.clone();
        for (cj, d) in c.iter().zip(&rd) {
            vec_axpy(f, &mut r, *cj, d);
        }
        if is_zero(&r) {
            in_span += 1;
            continue;
        }
        let mut next = ech.clone();
        next.insert(f, &r);
        let sub = distribution_from(pat, i + 1, &next, memo, ops, budget)?;
        add_into(&mut total, &sub, 1);
    }
    if in_span > 0 {
        let sub = distribution_from(pat, i + 1, ech, memo, ops, budget)?;
        add_into(&mut total, &sub, in_span);
    }
    memo.insert(key, total.clone());
    Ok(total)
}

fn add_into(total: &mut Vec<u64>, sub: &[u64], times: u64) {
    if total.len() < sub.len() {
        total.resize(sub.len(), 0);
    }
    for (t, s) in total.iter_mut().zip(sub) {
        *t += s * times;
    }
}

/// κ with its certificate `A` and an optimal encoder.
#[derive(Clone, Debug)]
pub struct Kappa {
    pub value: usize,
    /// `A` with `A_i ∈ X^(i) ∩ X^(S)` and `rank(A + R) = value`.
    pub a: FqMatrix,
    /// Rows of `A + R`.
    pub certificate: FqMatrix,
    /// Basis of the row space of `A + R`, in reduced echelon form.
    pub encoder: FqMatrix,
}

pub fn kappa_pattern(inst: &IccsiInstance) -> RowPattern {
    let rows = (0..inst.m())
        .map(|i| {
            let shared = inst.side_space(i).intersect(inst.sender_space()).expect("same ambient space");
            AffineRow { base: inst.request(i).to_vec(), dirs: shared.basis().row_vecs() }
        })
        .collect();
    RowPattern { field: inst.field().clone(), n: inst.n(), rows }
}

pub fn kappa(inst: &IccsiInstance, budget: u64) -> Result<Kappa, MinRankError> {
    let best = minrank_pattern(&kappa_pattern(inst), budget)?;
    let f = inst.field();
    let mut a = best.certificate.clone();
    for i in 0..inst.m() {
        for j in 0..inst.n() {
            a.set(i, j, f.sub(best.certificate.get(i, j), inst.r().get(i, j)));
        }
    }
    let encoder = best.certificate.rref();
    Ok(Kappa { value: best.value, a, certificate: best.certificate, encoder })
}

/// An encoder `L` with `⟨L⟩ + (X^(i) ∩ X^(S)) = X^(S)` for every receiver,
/// of `d_S − min_i dim(X^(i) ∩ X^(S))` rows.
///
/// Rows are first taken from an MDS generator in sender-space coordinates;
/// if that does not work for the given side information, a dual greedy
/// search picks the annihilator one vector at a time, always the first
/// vector (in lexicographic order) that keeps it clear of every
/// `(X^(i) ∩ X^(S))^⊥`. Fails only when that search runs out of vectors.
pub fn multicast_matrix(inst: &IccsiInstance) -> Result<FqMatrix, MinRankError> {
    let f = inst.field();
    let sender = inst.sender_space();
    let s = sender.dim();
    // receivers' spaces in sender coordinates
    let local: Vec<Subspace> = (0..inst.m())
        .map(|i| {
            let u = inst.side_space(i).intersect(sender).expect("same ambient space");
            let coords: Vec<Vec<u32>> = (0..u.dim()).map(|r| sender.coordinates(u.basis().row(r))).collect();
            Subspace::span(f, s, &coords)
        })
        .collect();
    let e = local.iter().map(Subspace::dim).min().unwrap_or(s);
    let rows = s - e;
    let to_ambient = |w: &FqMatrix| -> FqMatrix {
        let v: Vec<Vec<u32>> = (0..w.rows()).map(|r| sender.combine(w.row(r))).collect();
        FqMatrix::from_rows(f, inst.n(), &v)
    };
    let works = |w: &Subspace| local.iter().all(|u| w.sum(u).map(|t| t.dim() == s).unwrap_or(false));

    if let Ok(g) = rs_generator(s, rows, f) {
        let w = Subspace::row_space(&g);
        if works(&w) {
            return Ok(to_ambient(&g));
        }
    }
    let perps: Vec<Subspace> = local.iter().map(Subspace::orthogonal).collect();
    let mut z = Subspace::zero(f, s);
    let q = f.q() as u64;
    let total = q.checked_pow(s as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| MinRankError::FieldTooSmall {
        q: f.q(),
        why: format!("sender space of dimension {s} too large for the greedy search"),
    })?;
    for _ in 0..e {
        let blocked: Vec<Subspace> = perps.iter().map(|p| p.sum(&z).expect("same ambient")).collect();
        let pick = (1..total)
            .map(|idx| vector_from_index(q as u32, s, idx))
            .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
            .find(|v| blocked.iter().all(|b| !b.contains(v)));
        let Some(v) = pick else {
            return Err(MinRankError::FieldTooSmall {
                q: f.q(),
                why: format!("no [{s},{rows}] multicast code found"),
            });
        };
        z = z.sum(&Subspace::span(f, s, &[v])).expect("same ambient");
    }
    let w = z.orthogonal();
    debug_assert!(works(&w));
    Ok(to_ambient(w.basis()))
}
