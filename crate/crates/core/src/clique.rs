//! Generalized cliques and the clique-cover family of upper bounds:
//! clique cover, local clique cover, partition multicast and partitioned
//! local clique cover, integral and fractional, plus weak-clique variants.
//!
//! Receiver sets are bit masks over `0..m`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::digraph::{bits, full_mask};
use crate::instance::IccsiInstance;
use crate::lp::{ilp_solve_with_limit, int, lp_solve, LinearProgram, LpError, Rational, Relation, Sense, DEFAULT_NODE_LIMIT};
use crate::matrix::{normalize, vector_from_index};
use crate::subspace::Subspace;

pub const MAX_RECEIVERS: usize = 12;
/// Partition programs enumerate every nonempty group of receivers.
pub const MAX_GROUP_RECEIVERS: usize = 10;
pub const MAX_VECTORS: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliqueError {
    #[error("{what} is {count}, above the limit {limit}")]
    TooLarge { what: &'static str, count: u64, limit: u64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
}

/// A vector `v ∈ X^(S)` and the receivers `j` with `v ∉ X^(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingVector {
    pub vector: Vec<u32>,
    pub unknown_to: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedClique {
    pub members: u64,
    /// Normalized representatives of `ℛ(C)`, one per distinct
    /// `unknown_to` set, each the lexicographically smallest, sorted by vector.
    pub vectors: Vec<CodingVector>,
    pub maximal: bool,
}

/// A downward-closed family of cliques, sorted by mask.
#[derive(Clone, Debug)]
pub struct CliqueFamily {
    m: usize,
    cliques: Vec<GeneralizedClique>,
    index: HashMap<u64, usize>,
}

impl CliqueFamily {
    fn from_map(m: usize, map: BTreeMap<u64, Vec<CodingVector>>) -> Self {
        let masks: Vec<u64> = map.keys().copied().collect();
        let cliques: Vec<GeneralizedClique> = map
            .into_iter()
            .map(|(members, mut vectors)| {
                vectors.sort_by(|a, b| a.vector.cmp(&b.vector));
                let maximal = !masks.iter().any(|&o| o != members && o & members == members);
                GeneralizedClique { members, vectors, maximal }
            })
            .collect();
        let index = cliques.iter().enumerate().map(|(k, c)| (c.members, k)).collect();
        CliqueFamily { m, cliques, index }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cliques(&self) -> &[GeneralizedClique] {
        &self.cliques
    }

    pub fn get(&self, members: u64) -> Option<&GeneralizedClique> {
        self.index.get(&members).map(|&k| &self.cliques[k])
    }

    pub fn contains(&self, members: u64) -> bool {
        self.index.contains_key(&members)
    }

    pub fn maximal(&self) -> impl Iterator<Item = &GeneralizedClique> {
        self.cliques.iter().filter(|c| c.maximal)
    }

    /// Cliques inside `within`, each with its Pareto-minimal coding vectors
    /// after restricting `unknown_to` to `within`.
    fn restricted(&self, within: u64) -> Vec<(u64, Vec<CodingVector>)> {
        self.cliques
            .iter()
            .filter(|c| c.members & !within == 0)
            .map(|c| {
                let mut opts: Vec<CodingVector> = Vec::new();
                for cv in &c.vectors {
                    let u = cv.unknown_to & within;
                    if opts.iter().any(|o| o.unknown_to & u == o.unknown_to) {
                        continue;
                    }
                    opts.retain(|o| o.unknown_to & u != u);
                    opts.push(CodingVector { vector: cv.vector.clone(), unknown_to: u });
                }
                (c.members, opts)
            })
            .collect()
    }
}

struct Spaces {
    side: Vec<Subspace>,
    /// `⟨R_i⟩ + X^(i)`
    reach: Vec<Subspace>,
}

impl Spaces {
    fn of(inst: &IccsiInstance) -> Self {
        let side: Vec<Subspace> = (0..inst.m()).map(|i| inst.side_space(i).clone()).collect();
        let reach = (0..inst.m())
            .map(|i| {
                let mut rows = side[i].basis().row_vecs();
                rows.push(inst.request(i).to_vec());
                Subspace::span(inst.field(), inst.n(), &rows)
            })
            .collect();
        Spaces { side, reach }
    }

    fn unknown_to(&self, v: &[u32]) -> u64 {
        (0..self.side.len()).filter(|&j| !self.side[j].contains(v)).fold(0, |acc, j| acc | 1 << j)
    }

    fn served(&self, v: &[u32]) -> u64 {
        (0..self.side.len())
            .filter(|&i| self.reach[i].contains(v) && !self.side[i].contains(v))
            .fold(0, |acc, i| acc | 1 << i)
    }
}

/// Whether `v ∈ X^(S)` and `R_i ∈ ⟨v⟩ + X^(i)` for every member.
pub fn in_coding_set(inst: &IccsiInstance, members: u64, v: &[u32]) -> bool {
    if v.len() != inst.n() || !inst.sender_space().contains(v) {
        return false;
    }
    bits(members).all(|i| {
        i < inst.m() && {
            let mut rows = inst.side_space(i).basis().row_vecs();
            rows.push(v.to_vec());
            Subspace::span(inst.field(), inst.n(), &rows).contains(inst.request(i))
        }
    })
}

fn check_receivers(m: usize, limit: usize) -> Result<(), CliqueError> {
    if m > limit {
        return Err(CliqueError::TooLarge { what: "number of receivers", count: m as u64, limit: limit as u64 });
    }
    Ok(())
}

/// Every generalized clique, found by running over the normalized vectors
/// of `X^(S)`. A vector `v` serves receiver `i` when `v ∈ ⟨R_i⟩ + X^(i)` and
/// `v ∉ X^(i)`; the cliques are the nonempty subsets of the served sets.
pub fn enumerate_cliques(inst: &IccsiInstance) -> Result<CliqueFamily, CliqueError> {
    check_receivers(inst.m(), MAX_RECEIVERS)?;
    let q = inst.field().q() as u64;
    let d = inst.d_sender();
    let total = (q as u128).pow(d as u32);
    if total > MAX_VECTORS as u128 {
        return Err(CliqueError::TooLarge { what: "sender space size", count: total.min(u64::MAX as u128) as u64, limit: MAX_VECTORS });
    }
    let spaces = Spaces::of(inst);
    let sender = inst.sender_space();
    // (served, unknown_to) -> lexicographically smallest vector
    let mut kinds: BTreeMap<(u64, u64), Vec<u32>> = BTreeMap::new();
    for lead in 0..d {
        let tail = d - lead - 1;
        for idx in 0..q.pow(tail as u32) {
            let mut coords = vec![0; d];
            coords[lead] = 1;
            coords[lead + 1..].copy_from_slice(&vector_from_index(q as u32, tail, idx));
            let v = normalize(inst.field(), &sender.combine(&coords));
            let served = spaces.served(&v);
            if served == 0 {
                continue;
            }
            let key = (served, spaces.unknown_to(&v));
            match kinds.get_mut(&key) {
                Some(best) if *best <= v => {}
                Some(best) => *best = v,
                None => {
                    kinds.insert(key, v);
                }
            }
        }
    }
    let mut map: BTreeMap<u64, Vec<CodingVector>> = BTreeMap::new();
    for ((served, unknown_to), v) in &kinds {
        let mut sub = *served;
        while sub != 0 {
            let entry = map.entry(sub).or_default();
            match entry.iter_mut().find(|c| c.unknown_to == *unknown_to) {
                Some(c) if c.vector <= *v => {}
                Some(c) => c.vector = v.clone(),
                None => entry.push(CodingVector { vector: v.clone(), unknown_to: *unknown_to }),
            }
            sub = (sub - 1) & served;
        }
    }
    Ok(CliqueFamily::from_map(inst.m(), map))
}

/// Whether every pair `i, j` of members has `R_j ∈ X^(i)` or `⟨R_j⟩ = ⟨R_i⟩`.
pub fn is_weak_clique(inst: &IccsiInstance, members: u64) -> bool {
    let compat = weak_compatibility(inst);
    bits(members).all(|i| members & !compat[i] == 0)
}

fn weak_compatibility(inst: &IccsiInstance) -> Vec<u64> {
    let m = inst.m();
    let spans: Vec<Subspace> = (0..m).map(|i| Subspace::span(inst.field(), inst.n(), &[inst.request(i).to_vec()])).collect();
    (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| {
                    let ok = |a: usize, b: usize| spans[a] == spans[b] || inst.side_space(a).contains(inst.request(b));
                    ok(i, j) && ok(j, i)
                })
                .fold(0, |acc, j| acc | 1 << j)
        })
        .collect()
}

/// Sum of one request per distinct span among the members, in member order.
pub fn weak_vector(inst: &IccsiInstance, members: u64) -> Vec<u32> {
    let f = inst.field();
    let mut seen: Vec<Subspace> = Vec::new();
    let mut v = vec![0; inst.n()];
    for i in bits(members) {
        let span = Subspace::span(f, inst.n(), &[inst.request(i).to_vec()]);
        if !seen.contains(&span) {
            seen.push(span);
            v = crate::matrix::vec_add(f, &v, inst.request(i));
        }
    }
    v
}

/// All weak cliques, each carrying only its sum-of-distinct-requests vector.
pub fn weak_cliques(inst: &IccsiInstance) -> Result<CliqueFamily, CliqueError> {
    check_receivers(inst.m(), MAX_RECEIVERS)?;
    let m = inst.m();
    let compat = weak_compatibility(inst);
    let spaces = Spaces::of(inst);
    let mut map = BTreeMap::new();
    for members in 1..=full_mask(m) {
        if bits(members).all(|i| members & !compat[i] == 0) {
            let vector = weak_vector(inst, members);
            let unknown_to = spaces.unknown_to(&vector);
            map.insert(members, vec![CodingVector { vector, unknown_to }]);
        }
    }
    Ok(CliqueFamily::from_map(m, map))
}

/// `d_M = dim⟨R_M⟩ − min_{j∈M} dim(⟨R_M⟩ ∩ X^(j))`.
pub fn d_m(inst: &IccsiInstance, members: u64) -> usize {
    let rows: Vec<Vec<u32>> = bits(members).map(|i| inst.request(i).to_vec()).collect();
    let span = Subspace::span(inst.field(), inst.n(), &rows);
    let overlap = bits(members)
        .map(|j| span.intersect(inst.side_space(j)).expect("same ambient space").dim())
        .min()
        .unwrap_or(0);
    span.dim() - overlap
}

/// Minimum total cost of a partition of `universe` into parts with a cost.
/// Parts are listed in the order found, each containing the lowest
/// remaining receiver.
pub fn min_partition(universe: u64, cost: impl Fn(u64) -> Option<u64>) -> Option<(u64, Vec<u64>)> {
    let members: Vec<usize> = bits(universe).collect();
    let k = members.len();
    let global = |local: usize| -> u64 { bits(local as u64).fold(0, |acc, b| acc | 1 << members[b]) };
    let costs: Vec<Option<u64>> = (0..1usize << k).map(|s| if s == 0 { None } else { cost(global(s)) }).collect();
    let mut best: Vec<Option<(u64, usize)>> = vec![None; 1 << k];
    best[0] = Some((0, 0));
    for s in 1..1usize << k {
        let low = s & s.wrapping_neg();
        let mut sub = s;
        while sub != 0 {
            if sub & low != 0 {
                if let (Some(c), Some((rest, _))) = (costs[sub], best[s ^ sub]) {
                    if best[s].map_or(true, |(b, _)| c + rest < b) {
                        best[s] = Some((c + rest, sub));
                    }
                }
            }
            sub = (sub - 1) & s;
        }
    }
    let (value, _) = best[(1 << k) - 1]?;
    let mut parts = Vec::new();
    let mut s = (1usize << k) - 1;
    while s != 0 {
        let (_, part) = best[s].expect("reachable");
        parts.push(global(part));
        s ^= part;
    }
    Some((value, parts))
}

/// Fractional partition of `universe` by the given parts: minimum of
/// `Σ cost·a` with every receiver covered exactly once.
fn fractional_partition(universe: u64, parts: &[(u64, Rational)]) -> Result<(Rational, Vec<(u64, Rational)>), CliqueError> {
    let mut lp = LinearProgram::new(Sense::Minimize, parts.iter().map(|(_, c)| c.clone()).collect());
    for j in bits(universe) {
        let terms: Vec<(usize, Rational)> =
            parts.iter().enumerate().filter(|(_, (p, _))| p >> j & 1 == 1).map(|(k, _)| (k, int(1))).collect();
        lp.add_sparse(&terms, Relation::Eq, int(1));
    }
    let sol = lp_solve(&lp)?;
    let chosen = parts.iter().zip(&sol.x).filter(|(_, x)| x.is_positive()).map(|((p, _), x)| (*p, x.clone())).collect();
    Ok((sol.objective, chosen))
}

/// One clique (or multicast group) of a certificate, with its weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverEntry {
    pub members: u64,
    pub weight: Rational,
    pub vector: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEntry {
    pub members: u64,
    pub weight: Rational,
    /// `d_M` for multicast groups, `t_M` for partitioned local groups.
    pub cost: Rational,
    /// The group's own local clique cover (partitioned local only).
    pub cliques: Vec<CoverEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Cliques whose weights cover each receiver exactly once.
    Cover { cliques: Vec<CoverEntry> },
    /// A cover in which each receiver misses at most `k` weighted vectors.
    Local { k: Rational, cliques: Vec<CoverEntry> },
    /// Weighted multicast groups, covering each receiver exactly once.
    Groups { groups: Vec<GroupEntry> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    /// False when a heuristic choice of coding vectors was used because the
    /// exact search ran out of budget.
    pub exact: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    PhiPLf,
    PhiPF,
    PhiLf,
    PhiPL,
    PhiF,
    PhiL,
    PhiP,
    Phi,
    WPhiPLf,
    WPhiLf,
    WPhiPL,
    WPhiF,
    WPhiL,
    WPhi,
}

impl Param {
    /// All parameters, smaller bounds first.
    pub const ALL: [Param; 14] = [
        Param::PhiPLf,
        Param::PhiPF,
        Param::PhiLf,
        Param::PhiPL,
        Param::PhiF,
        Param::PhiL,
        Param::PhiP,
        Param::Phi,
        Param::WPhiPLf,
        Param::WPhiLf,
        Param::WPhiPL,
        Param::WPhiF,
        Param::WPhiL,
        Param::WPhi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Phi => "phi",
            Param::PhiF => "phi_f",
            Param::PhiL => "phi_l",
            Param::PhiLf => "phi_lf",
            Param::PhiP => "phi_p",
            Param::PhiPF => "phi_p_f",
            Param::PhiPL => "phi_p_l",
            Param::PhiPLf => "phi_p_lf",
            Param::WPhi => "w_phi",
            Param::WPhiF => "w_phi_f",
            Param::WPhiL => "w_phi_l",
            Param::WPhiLf => "w_phi_lf",
            Param::WPhiPL => "w_phi_p_l",
            Param::WPhiPLf => "w_phi_p_lf",
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(
            self,
            Param::PhiF | Param::PhiLf | Param::PhiPF | Param::PhiPLf | Param::WPhiF | Param::WPhiLf | Param::WPhiPLf
        )
    }

    pub fn is_weak(self) -> bool {
        self >= Param::WPhiPLf
    }

    fn uses_cliques(self) -> bool {
        !matches!(self, Param::PhiP | Param::PhiPF)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = CliqueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| CliqueError::UnknownParameter(s.to_string()))
    }
}

/// Parameter values with certificates, in [`Param`] order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundReport {
    pub bounds: BTreeMap<Param, Bound>,
}

impl BoundReport {
    pub fn value(&self, p: Param) -> Option<&Rational> {
        self.bounds.get(&p).map(|b| &b.value)
    }
}

/// Computes the clique-based bounds of an instance.
pub struct Bounds<'a> {
    inst: &'a IccsiInstance,
    node_limit: u64,
    family: Option<CliqueFamily>,
    weak: Option<CliqueFamily>,
}

impl<'a> Bounds<'a> {
    pub fn new(inst: &'a IccsiInstance) -> Self {
        Bounds { inst, node_limit: DEFAULT_NODE_LIMIT, family: None, weak: None }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    pub fn family(&mut self) -> Result<&CliqueFamily, CliqueError> {
        if self.family.is_none() {
            self.family = Some(enumerate_cliques(self.inst)?);
        }
        Ok(self.family.as_ref().expect("set"))
    }

    fn family_for(&mut self, p: Param) -> Result<&CliqueFamily, CliqueError> {
        if p.is_weak() {
            if self.weak.is_none() {
                self.weak = Some(weak_cliques(self.inst)?);
            }
            Ok(self.weak.as_ref().expect("set"))
        } else {
            self.family()
        }
    }

    pub fn compute(&mut self, p: Param) -> Result<Bound, CliqueError> {
        let all = full_mask(self.inst.m());
        let limit = self.node_limit;
        if !p.uses_cliques() {
            return partition_multicast(self.inst, p.is_fractional());
        }
        let family = self.family_for(p)?;
        match p {
            Param::Phi | Param::WPhi => Ok(clique_cover(family, all)),
            Param::PhiF | Param::WPhiF => fractional_clique_cover(family, all),
            Param::PhiL | Param::WPhiL => local_clique_cover(family, all, false, limit),
            Param::PhiLf | Param::WPhiLf => local_clique_cover(family, all, true, limit),
            Param::PhiPL | Param::WPhiPL => partitioned_local(family, false, limit),
            Param::PhiPLf | Param::WPhiPLf => partitioned_local(family, true, limit),
            Param::PhiP | Param::PhiPF => unreachable!(),
        }
    }

    pub fn report(&mut self, params: &[Param]) -> Result<BoundReport, CliqueError> {
        let mut report = BoundReport::default();
        for &p in params {
            report.bounds.insert(p, self.compute(p)?);
        }
        Ok(report)
    }
}

/// Convenience wrapper around [`Bounds`].
pub fn compute_bounds(inst: &IccsiInstance, params: &[Param]) -> Result<BoundReport, CliqueError> {
    Bounds::new(inst).report(params)
}

fn entry(family: &CliqueFamily, members: u64, weight: Rational) -> CoverEntry {
    let vector = family.get(members).expect("clique in family").vectors[0].vector.clone();
    CoverEntry { members, weight, vector }
}

/// Minimum number of cliques partitioning `within`.
pub fn clique_cover(family: &CliqueFamily, within: u64) -> Bound {
    let (value, parts) = min_partition(within, |s| family.contains(s).then_some(1)).expect("singletons are cliques");
    Bound {
        value: int(value as i64),
        exact: true,
        certificate: Certificate::Cover { cliques: parts.into_iter().map(|s| entry(family, s, int(1))).collect() },
    }
}

/// Fractional clique cover. Solved as a covering program over maximal
/// cliques, then trimmed to an exact partition using sub-cliques.
pub fn fractional_clique_cover(family: &CliqueFamily, within: u64) -> Result<Bound, CliqueError> {
    let mut maximal: Vec<u64> = Vec::new();
    for c in family.cliques().iter().rev() {
        let s = c.members & within;
        if s != 0 && !maximal.iter().any(|&o| o & s == s) {
            maximal.retain(|&o| o & s != o);
            maximal.push(s);
        }
    }
    maximal.sort_unstable();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![int(1); maximal.len()]);
    for j in bits(within) {
        let terms: Vec<(usize, Rational)> =
            maximal.iter().enumerate().filter(|(_, &s)| s >> j & 1 == 1).map(|(k, _)| (k, int(1))).collect();
        lp.add_sparse(&terms, Relation::Ge, int(1));
    }
    let sol = lp_solve(&lp)?;
    let mut weights: BTreeMap<u64, Rational> =
        maximal.iter().zip(sol.x).filter(|(_, x)| x.is_positive()).map(|(&s, x)| (s, x)).collect();
    for j in bits(within) {
        let mut excess: Rational = weights.iter().filter(|(&s, _)| s >> j & 1 == 1).map(|(_, w)| w.clone()).sum::<Rational>() - int(1);
        while excess.is_positive() {
            let (&s, w) = weights.iter().find(|(&s, _)| s >> j & 1 == 1).expect("over-covered receiver lies in a clique");
            let moved = if *w < excess { w.clone() } else { excess.clone() };
            let left = w - &moved;
            if left.is_zero() {
                weights.remove(&s);
            } else {
                weights.insert(s, left);
            }
            let rest = s & !(1 << j);
            if rest != 0 {
                *weights.entry(rest).or_insert_with(Rational::zero) += &moved;
            }
            excess -= moved;
        }
    }
    let value = weights.values().sum();
    let cliques = weights.into_iter().map(|(s, w)| entry(family, s, w)).collect();
    Ok(Bound { value, exact: true, certificate: Certificate::Cover { cliques } })
}

/// Local clique cover of the receivers in `within`, with cliques and
/// coding vectors restricted to `within`.
///
/// Minimizes `k` subject to an exact clique partition in which every
/// receiver `j` lies outside the span of at most `k` chosen vectors. The
/// choice of one vector per clique is part of the optimization: in the
/// fractional program each clique with several Pareto-minimal vectors gets
/// a binary selector. If branch and bound runs out of nodes there, each
/// clique falls back to a vector with the fewest receivers that miss it,
/// and the bound is marked inexact.
pub fn local_clique_cover(family: &CliqueFamily, within: u64, fractional: bool, node_limit: u64) -> Result<Bound, CliqueError> {
    let items = family.restricted(within);
    match local_program(&items, within, fractional, false, node_limit) {
        Err(CliqueError::Lp(LpError::BudgetExceeded(_))) if fractional => {
            let mut bound = local_program(&items, within, true, true, node_limit)?;
            bound.exact = false;
            Ok(bound)
        }
        other => other,
    }
}

fn local_program(
    items: &[(u64, Vec<CodingVector>)],
    within: u64,
    fractional: bool,
    greedy: bool,
    node_limit: u64,
) -> Result<Bound, CliqueError> {
    let items: Vec<(u64, Vec<&CodingVector>)> = items
        .iter()
        .map(|(s, opts)| {
            let opts: Vec<&CodingVector> = if greedy {
                vec![opts.iter().min_by_key(|o| o.unknown_to.count_ones()).expect("nonempty")]
            } else {
                opts.iter().collect()
            };
            (*s, opts)
        })
        .collect();
    let mut y = Vec::new();
    for (k, (_, opts)) in items.iter().enumerate() {
        for o in 0..opts.len() {
            y.push((k, o));
        }
    }
    let kvar = y.len();
    let selectors: Vec<usize> = if fractional { (0..y.len()).filter(|&v| items[y[v].0].1.len() > 1).collect() } else { Vec::new() };
    let nvars = kvar + 1 + selectors.len();
    let mut objective = vec![Rational::zero(); nvars];
    objective[kvar] = int(1);
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for v in 0..kvar {
        lp.upper[v] = Some(int(1));
    }
    for (z, &v) in selectors.iter().enumerate() {
        let zvar = kvar + 1 + z;
        lp.upper[zvar] = Some(int(1));
        lp.integer[zvar] = true;
        lp.add_sparse(&[(v, int(1)), (zvar, int(-1))], Relation::Le, int(0));
    }
    for (k, (_, opts)) in items.iter().enumerate() {
        if fractional && opts.len() > 1 {
            let terms: Vec<(usize, Rational)> =
                selectors.iter().enumerate().filter(|(_, &v)| y[v].0 == k).map(|(z, _)| (kvar + 1 + z, int(1))).collect();
            lp.add_sparse(&terms, Relation::Le, int(1));
        }
    }
    for j in bits(within) {
        let cover: Vec<(usize, Rational)> =
            y.iter().enumerate().filter(|(_, (k, _))| items[*k].0 >> j & 1 == 1).map(|(v, _)| (v, int(1))).collect();
        lp.add_sparse(&cover, Relation::Eq, int(1));
        let mut missed: Vec<(usize, Rational)> = y
            .iter()
            .enumerate()
            .filter(|(_, (k, o))| items[*k].1[*o].unknown_to >> j & 1 == 1)
            .map(|(v, _)| (v, int(1)))
            .collect();
        missed.push((kvar, int(-1)));
        lp.add_sparse(&missed, Relation::Le, int(0));
    }
    if !fractional {
        lp.set_all_integer(true);
    }
    let sol = if lp.integer.iter().any(|&b| b) { ilp_solve_with_limit(&lp, node_limit)? } else { lp_solve(&lp)? };
    let cliques = y
        .iter()
        .zip(&sol.x)
        .filter(|(_, x)| x.is_positive())
        .map(|(&(k, o), x)| CoverEntry { members: items[k].0, weight: x.clone(), vector: items[k].1[o].vector.clone() })
        .collect();
    Ok(Bound { value: sol.objective.clone(), exact: true, certificate: Certificate::Local { k: sol.objective, cliques } })
}

/// Partition multicast: groups `M` cost `d_M`.
pub fn partition_multicast(inst: &IccsiInstance, fractional: bool) -> Result<Bound, CliqueError> {
    let m = inst.m();
    check_receivers(m, MAX_GROUP_RECEIVERS)?;
    let all = full_mask(m);
    let groups: Vec<(u64, usize)> = (1..=all).map(|s| (s, d_m(inst, s))).collect();
    let group = |members: u64, weight: Rational| GroupEntry {
        members,
        weight,
        cost: int(groups[members as usize - 1].1 as i64),
        cliques: Vec::new(),
    };
    if fractional {
        let parts: Vec<(u64, Rational)> = groups.iter().map(|&(s, d)| (s, int(d as i64))).collect();
        let (value, chosen) = fractional_partition(all, &parts)?;
        let groups = chosen.into_iter().map(|(s, w)| group(s, w)).collect();
        Ok(Bound { value, exact: true, certificate: Certificate::Groups { groups } })
    } else {
        let (value, parts) = min_partition(all, |s| Some(groups[s as usize - 1].1 as u64)).expect("groups cover");
        let groups = parts.into_iter().map(|s| group(s, int(1))).collect();
        Ok(Bound { value: int(value as i64), exact: true, certificate: Certificate::Groups { groups } })
    }
}

/// Partitioned local clique cover: each group `M` is charged its own local
/// clique cover number over the cliques inside `M`.
pub fn partitioned_local(family: &CliqueFamily, fractional: bool, node_limit: u64) -> Result<Bound, CliqueError> {
    let m = family.m();
    check_receivers(m, MAX_GROUP_RECEIVERS)?;
    let all = full_mask(m);
    let mut locals: Vec<Bound> = Vec::with_capacity(all as usize);
    for s in 1..=all {
        locals.push(local_clique_cover(family, s, fractional, node_limit)?);
    }
    let exact = locals.iter().all(|b| b.exact);
    let group = |members: u64, weight: Rational| {
        let local = &locals[members as usize - 1];
        let Certificate::Local { cliques, .. } = &local.certificate else { unreachable!() };
        GroupEntry { members, weight, cost: local.value.clone(), cliques: cliques.clone() }
    };
    if fractional {
        let parts: Vec<(u64, Rational)> = (1..=all).map(|s| (s, locals[s as usize - 1].value.clone())).collect();
        let (value, chosen) = fractional_partition(all, &parts)?;
        let groups = chosen.into_iter().map(|(s, w)| group(s, w)).collect();
        Ok(Bound { value, exact, certificate: Certificate::Groups { groups } })
    } else {
        let cost = |s: u64| locals[s as usize - 1].value.to_integer().try_into().ok();
        let (value, parts) = min_partition(all, cost).expect("groups cover");
        let groups = parts.into_iter().map(|s| group(s, int(1))).collect();
        Ok(Bound { value: int(value as i64), exact, certificate: Certificate::Groups { groups } })
    }
}

fn check_partition(universe: u64, parts: &[(u64, &Rational)], what: &str) -> Result<(), String> {
    for (s, w) in parts {
        if *s == 0 || s & !universe != 0 {
            return Err(format!("{what} {s:#b} is empty or leaves the universe"));
        }
        if !w.is_positive() || **w > int(1) {
            return Err(format!("{what} {s:#b} has weight {w} outside (0, 1]"));
        }
    }
    for j in bits(universe) {
        let total: Rational = parts.iter().filter(|(s, _)| s >> j & 1 == 1).map(|(_, w)| (*w).clone()).sum();
        if !total.is_one() {
            return Err(format!("receiver {} is covered with total weight {total}", j + 1));
        }
    }
    Ok(())
}

fn check_cliques(inst: &IccsiInstance, within: u64, cliques: &[CoverEntry], weak: bool) -> Result<(), String> {
    let parts: Vec<(u64, &Rational)> = cliques.iter().map(|c| (c.members, &c.weight)).collect();
    check_partition(within, &parts, "clique")?;
    let mut seen: HashMap<u64, &[u32]> = HashMap::new();
    for c in cliques {
        if !in_coding_set(inst, c.members, &c.vector) {
            return Err(format!("vector {:?} does not serve clique {:#b}", c.vector, c.members));
        }
        if weak && (!is_weak_clique(inst, c.members) || c.vector != weak_vector(inst, c.members)) {
            return Err(format!("{:#b} is not a weak clique with its canonical vector", c.members));
        }
        if let Some(prev) = seen.insert(c.members, &c.vector) {
            if prev != c.vector.as_slice() {
                return Err(format!("clique {:#b} uses two different vectors", c.members));
            }
        }
    }
    Ok(())
}

/// Largest weight of coding vectors that a receiver in `within` does not
/// already know: the `k` achieved by a fixed local clique cover.
pub fn local_load(inst: &IccsiInstance, within: u64, cliques: &[CoverEntry]) -> Rational {
    bits(within)
        .map(|j| {
            cliques
                .iter()
                .filter(|c| !inst.side_space(j).contains(&c.vector))
                .map(|c| c.weight.clone())
                .sum::<Rational>()
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

fn all_one<'r>(mut ws: impl Iterator<Item = &'r Rational>) -> bool {
    ws.all(|w| w.is_one())
}

impl Bound {
    /// Re-checks the certificate against the instance: exact partitions,
    /// coding vectors in `ℛ(C)`, recomputed `d_M` and loads, and the value.
    pub fn verify(&self, inst: &IccsiInstance, p: Param) -> Result<(), String> {
        let all = full_mask(inst.m());
        let value = match &self.certificate {
            Certificate::Cover { cliques } => {
                check_cliques(inst, all, cliques, p.is_weak())?;
                if !p.is_fractional() && !all_one(cliques.iter().map(|c| &c.weight)) {
                    return Err("integral cover with fractional weights".into());
                }
                cliques.iter().map(|c| c.weight.clone()).sum()
            }
            Certificate::Local { k, cliques } => {
                check_cliques(inst, all, cliques, p.is_weak())?;
                if !p.is_fractional() && !all_one(cliques.iter().map(|c| &c.weight)) {
                    return Err("integral cover with fractional weights".into());
                }
                let load = local_load(inst, all, cliques);
                if &load > k {
                    return Err(format!("some receiver misses {load} > k = {k} vectors"));
                }
                k.clone()
            }
            Certificate::Groups { groups } => {
                let parts: Vec<(u64, &Rational)> = groups.iter().map(|g| (g.members, &g.weight)).collect();
                check_partition(all, &parts, "group")?;
                if !p.is_fractional() && !all_one(groups.iter().map(|g| &g.weight)) {
                    return Err("integral partition with fractional weights".into());
                }
                for g in groups {
                    if p.uses_cliques() {
                        check_cliques(inst, g.members, &g.cliques, p.is_weak())?;
                        let load = local_load(inst, g.members, &g.cliques);
                        if load > g.cost {
                            return Err(format!("group {:#b} has load {load} above t_M = {}", g.members, g.cost));
                        }
                    } else if g.cost != int(d_m(inst, g.members) as i64) {
                        return Err(format!("group {:#b} has the wrong d_M", g.members));
                    }
                }
                groups.iter().map(|g| &g.weight * &g.cost).sum()
            }
        };
        if value != self.value {
            return Err(format!("certificate gives {value}, bound claims {}", self.value));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::matrix::FqMatrix;

    fn iccsi(q: u32, n: usize, v: &[&[Vec<u32>]], r: &[Vec<u32>]) -> IccsiInstance {
        let f = FieldSpec::of_order(q).unwrap();
        let vs = FqMatrix::identity(&f, n);
        let v = v.iter().map(|rows| FqMatrix::from_rows(&f, n, rows)).collect();
        IccsiInstance::new(f.clone(), 1, vs, v, FqMatrix::from_rows(&f, n, r)).unwrap()
    }

    fn comp() -> IccsiInstance {
        iccsi(2, 2, &[&[vec![1, 1]], &[]], &[vec![1, 0], vec![0, 1]])
    }

    fn comp1() -> IccsiInstance {
        iccsi(2, 3, &[&[vec![0, 1, 1]], &[vec![1, 1, 1]], &[vec![1, 1, 1]]], &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
    }

    #[test]
    fn two_receiver_clique() {
        let inst = comp();
        let fam = enumerate_cliques(&inst).unwrap();
        let both = fam.get(0b11).unwrap();
        assert!(both.maximal);
        assert!(both.vectors.iter().any(|c| c.vector == vec![0, 1]));
        let mut b = Bounds::new(&inst);
        assert_eq!(b.compute(Param::Phi).unwrap().value, int(1));
        assert_eq!(b.compute(Param::PhiP).unwrap().value, int(2));
    }

    #[test]
    fn incomparable_multicast_and_partitioned_local() {
        let inst = comp1();
        let fam = enumerate_cliques(&inst).unwrap();
        let masks: Vec<u64> = fam.cliques().iter().map(|c| c.members).collect();
        assert_eq!(masks, vec![0b001, 0b010, 0b100]);
        assert_eq!(d_m(&inst, 0b111), 2);
        let mut b = Bounds::new(&inst);
        assert_eq!(b.compute(Param::PhiP).unwrap().value, int(2));
        assert_eq!(b.compute(Param::PhiPL).unwrap().value, int(3));
    }

    #[test]
    fn four_receiver_partition_multicast() {
        let f = FieldSpec::prime(2).unwrap();
        let icsi = crate::instance::IcsiInstance::canonical_one_based(&[&[2], &[3, 4], &[1, 4], &[1, 3]]).unwrap();
        let inst = icsi.embed(&f);
        let mut b = Bounds::new(&inst);
        assert_eq!(b.compute(Param::PhiP).unwrap().value, int(3));
        let frac = b.compute(Param::PhiPF).unwrap();
        assert_eq!(frac.value, crate::lp::ratio(5, 2));
        frac.verify(&inst, Param::PhiPF).unwrap();
    }

    #[test]
    fn five_cycle() {
        let f = FieldSpec::prime(2).unwrap();
        let icsi =
            crate::instance::IcsiInstance::canonical_one_based(&[&[2, 5], &[1, 3], &[2, 4], &[3, 5], &[4, 1]]).unwrap();
        let inst = icsi.embed(&f);
        let mut b = Bounds::new(&inst);
        assert_eq!(b.compute(Param::Phi).unwrap().value, int(3));
        let frac = b.compute(Param::PhiF).unwrap();
        assert_eq!(frac.value, crate::lp::ratio(5, 2));
        frac.verify(&inst, Param::PhiF).unwrap();
    }

    #[test]
    fn gf4_choice_of_vectors() {
        let e = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<u32>>();
        let v: Vec<Vec<Vec<u32>>> = [
            ["010000", "000011"],
            ["100000", "001100"],
            ["000100", "000011"],
            ["001000", "110000"],
            ["000001", "001100"],
            ["110000", "000010"],
        ]
        .iter()
        .map(|rows| rows.iter().map(|r| e(r)).collect())
        .collect();
        let v: Vec<&[Vec<u32>]> = v.iter().map(|x| x.as_slice()).collect();
        let r: Vec<Vec<u32>> = (0..6).map(|i| crate::matrix::unit(6, i)).collect();
        let inst = iccsi(4, 6, &v, &r);
        let cover = |last: &str| {
            vec![
                CoverEntry { members: 0b000011, weight: int(1), vector: e("110000") },
                CoverEntry { members: 0b001100, weight: int(1), vector: e("001100") },
                CoverEntry { members: 0b110000, weight: int(1), vector: e(last) },
            ]
        };
        for (last, k) in [("000012", 3), ("000011", 2)] {
            let c = cover(last);
            for x in &c {
                assert!(in_coding_set(&inst, x.members, &x.vector));
            }
            assert_eq!(local_load(&inst, 0b111111, &c), int(k));
        }
        let mut b = Bounds::new(&inst);
        let phi_l = b.compute(Param::PhiL).unwrap();
        phi_l.verify(&inst, Param::PhiL).unwrap();
        assert!(phi_l.value <= int(2));
    }

    #[test]
    fn partition_dp_matches_brute_force() {
        let cost = |s: u64| Some(if s.count_ones() == 2 { 1 } else { 2 });
        let (v, parts) = min_partition(0b1111, cost).unwrap();
        assert_eq!(v, 2);
        assert_eq!(parts.iter().fold(0, |a, p| a | p), 0b1111);
        assert_eq!(min_partition(0b101, |s| (s.count_ones() == 1).then_some(3)).unwrap().0, 6);
    }

    #[test]
    fn all_parameters_verify_and_order() {
        for inst in [comp(), comp1()] {
            let report = compute_bounds(&inst, &Param::ALL).unwrap();
            for (p, b) in &report.bounds {
                b.verify(&inst, *p).unwrap_or_else(|e| panic!("{p}: {e}"));
            }
            let v = |p| report.value(p).unwrap().clone();
            assert!(v(Param::PhiPLf) <= v(Param::PhiLf));
            assert!(v(Param::PhiLf) <= v(Param::PhiF));
            assert!(v(Param::PhiP) <= v(Param::WPhi));
        }
    }
}
