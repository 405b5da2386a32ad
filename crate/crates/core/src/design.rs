//! Block designs, projective planes and their codes, and the design-based
//! min-rank bound with its secrecy and adversary checks.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::instance::IcsiInstance;
use crate::matrix::{vec_add, vec_scale, vector_from_index, FqMatrix};
use crate::subspace::Subspace;

/// Largest code size enumerated by [`weight_checks`] and the exhaustive
/// recovery searches.
pub const MAX_ENUMERATION: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("not a design: {0}")]
    NotADesign(String),
    #[error("invalid design: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
    #[error("enumeration of {0} vectors exceeds the budget")]
    BudgetExceeded(u64),
}

/// A `t-(v,k,λ)` design on points `0..v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    v: usize,
    blocks: Vec<Vec<usize>>,
    t: usize,
    k: usize,
    lambda: usize,
    r: usize,
}

/// JSON shape, 1-based: `{"v": 7, "blocks": [[1,2,3], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignFile {
    pub v: usize,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn for_each_subset(items: &[usize], t: usize, f: &mut impl FnMut(&[usize])) {
    fn go(items: &[usize], t: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == t {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < t - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, t, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, t, 0, &mut Vec::with_capacity(t), f);
}

/// Checks that every block has the same size and every `t`-set of points
/// lies in the same number of blocks. Blocks are 0-based.
pub fn validate_design(v: usize, blocks: &[Vec<usize>], t: usize) -> Result<Design, DesignError> {
    if blocks.is_empty() {
        return Err(DesignError::Invalid("no blocks".into()));
    }
    if t == 0 {
        return Err(DesignError::Invalid("t must be positive".into()));
    }
    let mut sorted = Vec::with_capacity(blocks.len());
    for b in blocks {
        let mut b = b.clone();
        b.sort_unstable();
        b.dedup();
        if b.len() != blocks[sorted.len()].len() {
            return Err(DesignError::Invalid("block with a repeated point".into()));
        }
        if sorted.first().is_some_and(|f: &Vec<usize>| f.len() != b.len()) {
            return Err(DesignError::NotADesign("blocks have different sizes".into()));
        }
        if let Some(&p) = b.iter().find(|&&p| p >= v) {
            return Err(DesignError::Invalid(format!("point {} outside 1..={v}", p + 1)));
        }
        sorted.push(b);
    }
    let k = sorted[0].len();
    if t > k {
        return Err(DesignError::NotADesign(format!("blocks of size {k} cannot hold {t}-sets")));
    }
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for b in &sorted {
        for_each_subset(b, t, &mut |s| *counts.entry(s.to_vec()).or_insert(0) += 1);
    }
    let lambda = *counts.values().next().expect("blocks are nonempty");
    if counts.len() as u128 != binomial(v, t) || counts.values().any(|&c| c != lambda) {
        return Err(DesignError::NotADesign(format!("{t}-sets do not lie in a constant number of blocks")));
    }
    let r = sorted.iter().filter(|b| b.contains(&0)).count();
    Ok(Design { v, blocks: sorted, t, k, lambda, r })
}

impl Design {
    pub fn from_file(file: &DesignFile) -> Result<Design, DesignError> {
        let mut blocks = Vec::with_capacity(file.blocks.len());
        for b in &file.blocks {
            if b.iter().any(|&p| p == 0) {
                return Err(DesignError::Invalid("points are numbered from 1".into()));
            }
            blocks.push(b.iter().map(|p| p - 1).collect());
        }
        validate_design(file.v, &blocks, file.t.unwrap_or(2))
    }

    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            v: self.v,
            blocks: self.blocks.iter().map(|b| b.iter().map(|p| p + 1).collect()).collect(),
            t: (self.t != 2).then_some(self.t),
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Replication number: blocks through a point.
    pub fn r(&self) -> usize {
        self.r
    }

    /// `r − λ`.
    pub fn order(&self) -> usize {
        self.r - self.lambda
    }

    /// Whether this is a 2-(n²+n+1, n+1, 1) design for its order n ≥ 2.
    pub fn is_projective_plane(&self) -> bool {
        let n = self.order();
        self.t == 2 && self.lambda == 1 && n >= 2 && self.v == n * n + n + 1 && self.k == n + 1
    }

    /// `b × v` incidence matrix over `field`.
    pub fn incidence_matrix(&self, field: &FieldSpec) -> FqMatrix {
        let rows: Vec<Vec<u32>> = self.blocks.iter().map(|b| self.indicator(b)).collect();
        FqMatrix::from_rows(field, self.v, &rows)
    }

    fn indicator(&self, block: &[usize]) -> Vec<u32> {
        let mut row = vec![0; self.v];
        for &p in block {
            row[p] = 1;
        }
        row
    }

    /// `C_p(D)`, the row space of the incidence matrix.
    pub fn code(&self, p: u32) -> Result<Subspace, DesignError> {
        Ok(Subspace::row_space(&self.incidence_matrix(&FieldSpec::prime(p)?)))
    }
}

/// PG(2, r): points and lines are the normalized nonzero vectors of
/// `GF(r)^3` in increasing integer encoding; a point lies on a line when
/// their dot product vanishes.
pub fn projective_plane(r: u32) -> Result<Design, DesignError> {
    if r > 16 {
        return Err(DesignError::Invalid(format!("plane order {r} above 16")));
    }
    let f = FieldSpec::of_order(r)?;
    let points: Vec<Vec<u32>> = (1..(r as u64).pow(3))
        .map(|idx| vector_from_index(r, 3, idx))
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect();
    let blocks: Vec<Vec<usize>> = points
        .iter()
        .map(|line| (0..points.len()).filter(|&p| crate::matrix::dot(&f, line, &points[p]) == 0).collect())
        .collect();
    validate_design(points.len(), &blocks, 2)
}

pub fn p_rank(d: &Design, p: u32) -> Result<usize, DesignError> {
    Ok(d.incidence_matrix(&FieldSpec::prime(p)?).rank())
}

fn require_prime_divides_order(d: &Design, p: u32) -> Result<(), DesignError> {
    if !crate::field::is_prime(p) {
        return Err(DesignError::Field(FieldError::NonPrime(p)));
    }
    if d.order() == 0 || d.order() % p as usize != 0 {
        return Err(DesignError::Inapplicable(format!("{p} does not divide the order {}", d.order())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KlemmReport {
    pub p: u32,
    pub rank: usize,
    pub blocks: usize,
    /// `rank ≤ (b+1)/2`
    pub rank_bound_holds: bool,
    /// Whether `p ∤ λ` and `p² ∤ n`, so the second clause applies.
    pub second_clause_applies: bool,
    /// `C_p(D)^⊥ ⊆ C_p(D)`, checked even when the clause does not apply.
    pub dual_contained: bool,
    /// `rank ≥ v/2`
    pub rank_at_least_half: bool,
    /// Dual basis vectors outside the code.
    pub dual_outside: Vec<Vec<u32>>,
}

impl KlemmReport {
    /// Every clause that applies holds.
    pub fn passes(&self) -> bool {
        self.rank_bound_holds && (!self.second_clause_applies || (self.dual_contained && self.rank_at_least_half))
    }
}

/// Checks both clauses of Klemm's bound for `p` dividing the order.
pub fn klemm_check(d: &Design, p: u32) -> Result<KlemmReport, DesignError> {
    if d.t != 2 {
        return Err(DesignError::Inapplicable("Klemm's bound is for 2-designs".into()));
    }
    require_prime_divides_order(d, p)?;
    let code = d.code(p)?;
    let dual = code.orthogonal();
    let dual_outside: Vec<Vec<u32>> = dual.basis().row_vecs().into_iter().filter(|w| !code.contains(w)).collect();
    let p_us = p as usize;
    Ok(KlemmReport {
        p,
        rank: code.dim(),
        blocks: d.b(),
        rank_bound_holds: 2 * code.dim() <= d.b() + 1,
        second_clause_applies: d.lambda % p_us != 0 && d.order() % (p_us * p_us) != 0,
        dual_contained: dual_outside.is_empty(),
        rank_at_least_half: 2 * code.dim() >= d.v,
        dual_outside,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Containment {
    pub contains: bool,
    pub coincides: bool,
    /// Per receiver, the first block `B ∋ f(i)` with `B ∖ {f(i)} ⊆ X_i`.
    pub witness: Vec<Option<usize>>,
    /// Per receiver, the first block with `B ∖ {f(i)} = X_i`.
    pub coinciding_witness: Vec<Option<usize>>,
}

pub fn contains_design(inst: &IcsiInstance, d: &Design) -> Containment {
    let sized = d.v == inst.n() && d.b() <= inst.m();
    let mut witness = Vec::with_capacity(inst.m());
    let mut coinciding_witness = Vec::with_capacity(inst.m());
    for i in 0..inst.m() {
        let fi = inst.demand(i);
        let side = inst.side_info(i);
        let fits = |b: &Vec<usize>| b.contains(&fi) && b.iter().all(|&p| p == fi || side.contains(&p));
        witness.push(d.blocks.iter().position(fits));
        coinciding_witness.push(d.blocks.iter().position(|b| fits(b) && b.len() == side.len() + 1));
    }
    Containment {
        contains: sized && witness.iter().all(Option::is_some),
        coincides: sized && coinciding_witness.iter().all(Option::is_some),
        witness,
        coinciding_witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignBound {
    /// `rank_p(D)`
    pub p_rank: usize,
    /// `rank_p(D) ≤ (m+1)/2` as guaranteed by Klemm's bound.
    pub within_half: bool,
    /// Fitting matrix over `GF(p)`: row `i` is receiver `i`'s witness block.
    pub fitting: FqMatrix,
    /// Linearly independent rows of `fitting`; a valid index code.
    pub encoder: FqMatrix,
}

/// The design bound: if the instance contains a 2-design whose order is
/// divisible by `p`, the witness-block incidence rows fit the instance and
/// their rank is at most `rank_p(D) ≤ (m+1)/2`.
pub fn design_bound(inst: &IcsiInstance, d: &Design, p: u32) -> Result<DesignBound, DesignError> {
    require_prime_divides_order(d, p)?;
    if d.t != 2 {
        return Err(DesignError::Inapplicable("the bound needs a 2-design".into()));
    }
    let c = contains_design(inst, d);
    if !c.contains {
        return Err(DesignError::Inapplicable("the instance does not contain the design".into()));
    }
    let f = FieldSpec::prime(p)?;
    let rows: Vec<Vec<u32>> = c.witness.iter().map(|w| d.indicator(&d.blocks[w.expect("contained")])).collect();
    let fitting = FqMatrix::from_rows(&f, d.v, &rows);
    let mut encoder = FqMatrix::zeros(&f, 0, d.v);
    for row in &rows {
        let mut trial = encoder.clone();
        trial.push_row(row);
        if trial.rank() > encoder.rows() {
            encoder = trial;
        }
    }
    let p_rank = p_rank(d, p)?;
    Ok(DesignBound { p_rank, within_half: 2 * p_rank <= inst.m() + 1, fitting, encoder })
}

fn codewords(code: &Subspace) -> Result<impl Iterator<Item = Vec<u32>> + '_, DesignError> {
    let q = code.field().q() as u64;
    let total = q.checked_pow(code.dim() as u32).unwrap_or(u64::MAX);
    if total > MAX_ENUMERATION {
        return Err(DesignError::BudgetExceeded(total));
    }
    Ok((0..total).map(move |idx| code.combine(&vector_from_index(q as u32, code.dim(), idx))))
}

fn weight(w: &[u32]) -> usize {
    w.iter().filter(|&&x| x != 0).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub p: u32,
    pub order: usize,
    pub codewords: u64,
    pub distribution: BTreeMap<usize, u64>,
    pub min_weight: usize,
    /// `min_weight = n + 1`
    pub min_distance_ok: bool,
    /// Minimum-weight words are exactly the nonzero multiples of blocks.
    pub min_words_are_blocks: bool,
    /// `[p+2, 2p−1]` for planes of prime order `p`.
    pub gap: Option<(usize, usize)>,
    pub gap_empty: bool,
}

impl WeightReport {
    pub fn passes(&self) -> bool {
        self.min_distance_ok && self.min_words_are_blocks && self.gap_empty
    }
}

/// Enumerates `C_p(D)` for a projective plane of order `n` with `p | n`.
pub fn weight_checks(d: &Design, p: u32) -> Result<WeightReport, DesignError> {
    if !d.is_projective_plane() {
        return Err(DesignError::Inapplicable("not a projective plane".into()));
    }
    require_prime_divides_order(d, p)?;
    let code = d.code(p)?;
    let f = code.field().clone();
    let n = d.order();
    let mut distribution = BTreeMap::new();
    let mut count = 0u64;
    let mut minimal: Vec<Vec<u32>> = Vec::new();
    for w in codewords(&code)? {
        count += 1;
        let wt = weight(&w);
        *distribution.entry(wt).or_insert(0u64) += 1;
        if wt == n + 1 {
            minimal.push(w);
        }
    }
    let min_weight = distribution.keys().copied().find(|&w| w > 0).unwrap_or(0);
    let mut multiples: Vec<Vec<u32>> = Vec::new();
    for b in &d.blocks {
        let row = d.indicator(b);
        for c in 1..p {
            multiples.push(vec_scale(&f, c, &row));
        }
    }
    multiples.sort();
    multiples.dedup();
    minimal.sort();
    let gap = (n == p as usize && p >= 3).then_some((p as usize + 2, 2 * p as usize - 1));
    let gap_empty = gap.map_or(true, |(lo, hi)| distribution.range(lo..=hi).next().is_none());
    Ok(WeightReport {
        p,
        order: n,
        codewords: count,
        distribution,
        min_weight,
        min_distance_ok: min_weight == n + 1,
        min_words_are_blocks: minimal == multiples,
        gap,
        gap_empty,
    })
}

/// Vectors `u` over `GF(p)` supported on `support` with `u + e_j ∈ code`.
fn recovers(code: &Subspace, support: &[usize], j: usize) -> Result<bool, DesignError> {
    let f = code.field();
    let q = f.q() as u64;
    let total = q.checked_pow(support.len() as u32).unwrap_or(u64::MAX);
    if total > MAX_ENUMERATION {
        return Err(DesignError::BudgetExceeded(total));
    }
    let ej = crate::matrix::unit(code.ambient_dim(), j);
    for idx in 0..total {
        let coeffs = vector_from_index(q as u32, support.len(), idx);
        let mut u = vec![0; code.ambient_dim()];
        for (&s, &c) in support.iter().zip(&coeffs) {
            u[s] = c;
        }
        if code.contains(&vec_add(f, &u, &ej)) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecrecyReport {
    pub p: u32,
    /// `(receiver, message)` pairs examined, 0-based.
    pub pairs_checked: usize,
    /// Pairs where the receiver could recover a message it did not ask for.
    pub leaks: Vec<(usize, usize)>,
}

impl SecrecyReport {
    pub fn passes(&self) -> bool {
        self.leaks.is_empty()
    }
}

/// For an instance coinciding with a projective plane whose order `p`
/// divides, checks that no receiver `i` can recover any `X_j` with
/// `j ∉ X_i ∪ {f(i)}` from `C_p(D)`.
pub fn secrecy_check(inst: &IcsiInstance, d: &Design, p: u32) -> Result<SecrecyReport, DesignError> {
    if !d.is_projective_plane() {
        return Err(DesignError::Inapplicable("not a projective plane".into()));
    }
    require_prime_divides_order(d, p)?;
    if !contains_design(inst, d).coincides {
        return Err(DesignError::Inapplicable("the instance does not coincide with the design".into()));
    }
    let code = d.code(p)?;
    let mut pairs_checked = 0;
    let mut leaks = Vec::new();
    for i in 0..inst.m() {
        let mut known: Vec<usize> = inst.side_info(i).to_vec();
        known.push(inst.demand(i));
        known.sort_unstable();
        for j in (0..inst.n()).filter(|j| !known.contains(j)) {
            pairs_checked += 1;
            if recovers(&code, &known, j)? {
                leaks.push((i, j));
            }
        }
    }
    Ok(SecrecyReport { p, pairs_checked, leaks })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdversaryReport {
    pub p: u32,
    /// `|X_A| ≤ 2p − 2`
    pub size_ok: bool,
    /// First block meeting `X_A` in more than `p − 1` points.
    pub violating_block: Option<usize>,
    /// Messages outside `X_A` the adversary can recover, by exhaustive search.
    pub recoverable: Vec<usize>,
    /// Both hypotheses hold and the search found nothing.
    pub safe: bool,
}

impl AdversaryReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.size_ok && self.violating_block.is_none()
    }
}

/// Evaluates the adversary hypotheses for `X_A` (0-based messages) against a
/// plane of prime order `p`, and searches exhaustively for messages the
/// adversary could recover from `C_p(D)`.
pub fn adversary_check(d: &Design, adversary: &[usize], p: u32) -> Result<AdversaryReport, DesignError> {
    if !d.is_projective_plane() || d.order() != p as usize {
        return Err(DesignError::Inapplicable(format!("not a projective plane of order {p}")));
    }
    require_prime_divides_order(d, p)?;
    let mut xa = adversary.to_vec();
    xa.sort_unstable();
    xa.dedup();
    if let Some(&h) = xa.iter().find(|&&h| h >= d.v) {
        return Err(DesignError::Invalid(format!("message {} outside the design", h + 1)));
    }
    let p_us = p as usize;
    let size_ok = xa.len() <= 2 * p_us - 2;
    let violating_block = d.blocks.iter().position(|b| b.iter().filter(|x| xa.contains(x)).count() > p_us - 1);
    let code = d.code(p)?;
    let mut recoverable = Vec::new();
    for j in (0..d.v).filter(|j| !xa.contains(j)) {
        if recovers(&code, &xa, j)? {
            recoverable.push(j);
        }
    }
    let safe = size_ok && violating_block.is_none() && recoverable.is_empty();
    Ok(AdversaryReport { p, size_ok, violating_block, recoverable, safe })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fano_blocks() -> Vec<Vec<usize>> {
        [[1, 2, 3], [2, 6, 7], [3, 5, 7], [2, 4, 5], [1, 5, 6], [3, 4, 6], [1, 4, 7]]
            .iter()
            .map(|b| b.iter().map(|p| p - 1).collect())
            .collect()
    }

    fn integer_det(d: &Design) -> i128 {
        // fraction-free elimination (Bareiss)
        let n = d.v();
        let mut a: Vec<Vec<i128>> = d.blocks().iter().map(|b| (0..n).map(|p| b.contains(&p) as i128).collect()).collect();
        let mut sign = 1;
        let mut prev = 1;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    #[test]
    fn fano_parameters() {
        let d = validate_design(7, &fano_blocks(), 2).unwrap();
        assert_eq!((d.t(), d.v(), d.k(), d.lambda(), d.order(), d.r()), (2, 7, 3, 1, 2, 3));
        assert!(d.is_projective_plane());
        assert_eq!(p_rank(&d, 2).unwrap(), 4);
        // det = ±24 over the integers, so the 3-rank is not full
        assert_eq!(integer_det(&d).abs(), 24);
        assert_eq!(p_rank(&d, 3).unwrap(), 6);
        assert_eq!(p_rank(&d, 5).unwrap(), 7);
        let mut short = fano_blocks();
        short.pop();
        assert!(matches!(validate_design(7, &short, 2), Err(DesignError::NotADesign(_))));
    }

    #[test]
    fn planes() {
        for (r, v) in [(2u32, 7usize), (3, 13), (4, 21)] {
            let d = projective_plane(r).unwrap();
            assert_eq!((d.v(), d.b(), d.k(), d.lambda()), (v, v, r as usize + 1, 1));
        }
        assert!(matches!(projective_plane(6), Err(DesignError::Field(_))));
    }

    #[test]
    fn klemm_and_weights() {
        let fano = validate_design(7, &fano_blocks(), 2).unwrap();
        let k = klemm_check(&fano, 2).unwrap();
        assert!(k.passes() && k.second_clause_applies && k.dual_contained);
        assert!(matches!(klemm_check(&fano, 3), Err(DesignError::Inapplicable(_))));
        let w = weight_checks(&fano, 2).unwrap();
        assert!(w.passes());
        assert_eq!(w.distribution.get(&3), Some(&7));
        let pg3 = projective_plane(3).unwrap();
        assert_eq!(p_rank(&pg3, 3).unwrap(), 7);
        assert!(klemm_check(&pg3, 3).unwrap().passes());
        let w = weight_checks(&pg3, 3).unwrap();
        assert_eq!(w.codewords, 2187);
        assert_eq!(w.gap, Some((5, 5)));
        assert!(w.passes());
    }
}
