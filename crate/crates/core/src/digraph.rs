//! Side-information digraphs and hypergraphs.
//!
//! Vertices are `0..n` in the API and `1..=n` in JSON. Circuits include
//! 2-circuits `u → v → u`; the undirected-graph convention, where a pair of
//! opposite arcs is an edge rather than a circuit, is available separately
//! through [`Digraph::is_acyclic_as_graph`].

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::FieldSpec;
use crate::matrix::FqMatrix;

pub const DEFAULT_TAU_LIMIT: usize = 16;
pub const DEFAULT_NU_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("{n} vertices exceed the exact-search limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("field of order {q} is too small; need q > {need}")]
    FieldTooSmall { q: u32, need: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
}

impl Digraph {
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Self, DigraphError> {
        if n > 64 {
            return Err(DigraphError::Invalid(format!("{n} vertices; at most 64 supported")));
        }
        let mut out = vec![0u64; n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(DigraphError::Invalid(format!("arc ({u},{v}) out of range")));
            }
            if u == v {
                return Err(DigraphError::Invalid(format!("self-loop at {u}")));
            }
            out[u] |= 1 << v;
        }
        Ok(Digraph { n, out })
    }

    /// Arcs given with 1-based vertex labels.
    pub fn from_one_based(n: usize, arcs: &[(usize, usize)]) -> Result<Self, DigraphError> {
        if arcs.iter().any(|&(u, v)| u == 0 || v == 0) {
            return Err(DigraphError::Invalid("vertex labels start at 1".into()));
        }
        let arcs: Vec<_> = arcs.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Self::new(n, &arcs)
    }

    pub fn empty(n: usize) -> Self {
        Digraph { n, out: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let all = full_mask(n);
        Digraph { n, out: (0..n).map(|v| all & !(1 << v)).collect() }
    }

    /// Directed cycle 0 → 1 → … → n−1 → 0.
    pub fn cycle(n: usize) -> Self {
        let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &arcs).expect("valid cycle")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn out_mask(&self, u: usize) -> u64 {
        self.out[u]
    }

    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        bits(self.out[u]).collect()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].count_ones() as usize
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_arc(u, v)).collect()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| bits(self.out[u]).map(move |v| (u, v))).collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().iter().all(|&(u, v)| self.has_arc(v, u))
    }

    /// True iff the subgraph induced on `mask` has no circuit.
    pub fn is_acyclic_on(&self, mask: u64) -> bool {
        // peel vertices with no out-neighbor left in the set
        let mut live = mask;
        loop {
            let sinks = bits(live).filter(|&v| self.out[v] & live == 0).fold(0u64, |a, v| a | 1 << v);
            if sinks == 0 {
                return live == 0;
            }
            live &= !sinks;
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_on(full_mask(self.n))
    }

    /// Acyclicity under the undirected-graph convention: for a symmetric
    /// digraph only circuits through at least 3 vertices count. Non-symmetric
    /// inputs fall back to [`Digraph::is_acyclic`].
    pub fn is_acyclic_as_graph(&self) -> bool {
        if !self.is_symmetric() {
            return self.is_acyclic();
        }
        // a forest: every component has |E| = |V| - 1
        let mut seen = 0u64;
        for s in 0..self.n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << s;
            loop {
                let grown = bits(comp).fold(comp, |a, v| a | self.out[v]);
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            seen |= comp;
            let vertices = comp.count_ones() as usize;
            let edges: usize = bits(comp).map(|v| self.out_degree(v)).sum::<usize>() / 2;
            if edges + 1 != vertices {
                return false;
            }
        }
        true
    }

    /// Vertex set of some circuit inside `mask`, as a cyclic vertex sequence.
    pub fn find_circuit_in(&self, mask: u64) -> Option<Vec<usize>> {
        // shortest circuit through each vertex via BFS; return the first found
        let mut best: Option<Vec<usize>> = None;
        for s in bits(mask) {
            let mut parent = vec![usize::MAX; self.n];
            let mut frontier = vec![s];
            let mut visited = 1u64 << s;
            'bfs: while !frontier.is_empty() {
                let mut next = Vec::new();
                for &u in &frontier {
                    for w in bits(self.out[u] & mask) {
                        if w == s {
                            let mut path = vec![u];
                            let mut x = u;
                            while x != s {
                                x = parent[x];
                                path.push(x);
                            }
                            path.reverse();
                            if best.as_ref().map_or(true, |b| path.len() < b.len()) {
                                best = Some(path);
                            }
                            break 'bfs;
                        }
                        if visited >> w & 1 == 0 {
                            visited |= 1 << w;
                            parent[w] = u;
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
        }
        best
    }

    pub fn induced(&self, keep: &[usize]) -> Digraph {
        let mut out = vec![0u64; keep.len()];
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate() {
                if self.has_arc(u, v) {
                    out[a] |= 1 << b;
                }
            }
        }
        Digraph { n: keep.len(), out }
    }

    /// Feedback vertex number τ, exact.
    pub fn tau(&self) -> Result<usize, DigraphError> {
        self.tau_with_limit(DEFAULT_TAU_LIMIT)
    }

    pub fn tau_with_limit(&self, limit: usize) -> Result<usize, DigraphError> {
        Ok(self.n - self.alpha_with_limit(limit)?)
    }

    /// Largest induced acyclic subgraph, α = n − τ.
    pub fn alpha(&self) -> Result<usize, DigraphError> {
        self.alpha_with_limit(DEFAULT_TAU_LIMIT)
    }

    pub fn alpha_with_limit(&self, limit: usize) -> Result<usize, DigraphError> {
        if self.n > limit {
            return Err(DigraphError::TooLarge { n: self.n, limit });
        }
        Ok(self.max_acyclic_set().count_ones() as usize)
    }

    /// A smallest feedback vertex set, lowest in lexicographic mask order.
    pub fn feedback_vertex_set(&self) -> Result<Vec<usize>, DigraphError> {
        if self.n > DEFAULT_TAU_LIMIT {
            return Err(DigraphError::TooLarge { n: self.n, limit: DEFAULT_TAU_LIMIT });
        }
        let keep = self.max_acyclic_set();
        Ok((0..self.n).filter(|&v| keep >> v & 1 == 0).collect())
    }

    fn max_acyclic_set(&self) -> u64 {
        let full = full_mask(self.n);
        // removal sets by increasing size
        for k in 0..=self.n {
            for removed in subsets_of_size(self.n, k) {
                if self.is_acyclic_on(full & !removed) {
                    return full & !removed;
                }
            }
        }
        0
    }

    /// Whether removing the single vertex `v` leaves an acyclic digraph.
    pub fn acyclic_without(&self, removed: u64) -> bool {
        self.is_acyclic_on(full_mask(self.n) & !removed)
    }

    /// Circuit packing number ν: the most vertex-disjoint circuits, exact.
    pub fn nu(&self) -> Result<usize, DigraphError> {
        Ok(self.circuit_packing_with_limit(DEFAULT_NU_LIMIT)?.len())
    }

    /// A maximum family of vertex-disjoint circuits, each given as a cyclic
    /// vertex sequence.
    pub fn circuit_packing(&self) -> Result<Vec<Vec<usize>>, DigraphError> {
        self.circuit_packing_with_limit(DEFAULT_NU_LIMIT)
    }

    pub fn circuit_packing_with_limit(&self, limit: usize) -> Result<Vec<Vec<usize>>, DigraphError> {
        if self.n > limit {
            return Err(DigraphError::TooLarge { n: self.n, limit });
        }
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        let mut mask = full_mask(self.n);
        // replay memoized choices to recover the packing
        while let (_, Some(c)) = self.pack(mask, &mut memo) {
            mask &= !c.iter().fold(0u64, |a, &v| a | 1 << v);
            out.push(c);
        }
        Ok(out)
    }

    fn pack(&self, mask: u64, memo: &mut HashMap<u64, (usize, Option<Vec<usize>>)>) -> (usize, Option<Vec<usize>>) {
        if let Some(hit) = memo.get(&mask) {
            return hit.clone();
        }
        let result = if self.is_acyclic_on(mask) {
            (0, None)
        } else {
            let v = mask.trailing_zeros() as usize;
            let rest = mask & !(1 << v);
            let mut best = self.pack(rest, memo);
            for c in self.chordless_circuits_through(v, mask) {
                let cm = c.iter().fold(0u64, |a, &x| a | 1 << x);
                let val = 1 + self.pack(mask & !cm, memo).0;
                if val > best.0 {
                    best = (val, Some(c));
                }
            }
            best
        };
        memo.insert(mask, result.clone());
        result
    }

    /// Chordless circuits through `v` using only vertices of `mask` above `v`.
    fn chordless_circuits_through(&self, v: usize, mask: u64) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        let mut path = vec![v];
        self.extend_chordless(v, mask, &mut path, 1u64 << v, &mut found);
        found
    }

    fn extend_chordless(&self, v: usize, mask: u64, path: &mut Vec<usize>, on_path: u64, found: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() > 1 && self.has_arc(last, v) {
            found.push(path.clone());
            return;
        }
        let before_last = on_path & !(1u64 << last);
        let allowed = self.out[last] & mask & !on_path & !((1u64 << (v + 1)) - 1);
        for w in bits(allowed) {
            // no chord from an earlier path vertex into w
            if bits(before_last).any(|u| self.has_arc(u, w)) {
                continue;
            }
            // no chord from w back to an interior path vertex
            let interior = on_path & !(1u64 << v);
            if self.out[w] & interior != 0 {
                continue;
            }
            path.push(w);
            self.extend_chordless(v, mask, path, on_path | 1 << w, found);
            path.pop();
        }
    }

    /// Minimum number of cliques (sets with arcs both ways between every
    /// pair) partitioning the vertices.
    pub fn clique_cover_number(&self) -> Result<usize, DigraphError> {
        Ok(self.clique_cover_with_limit(DEFAULT_NU_LIMIT)?.len())
    }

    pub fn clique_cover(&self) -> Result<Vec<Vec<usize>>, DigraphError> {
        self.clique_cover_with_limit(DEFAULT_NU_LIMIT)
    }

    pub fn clique_cover_with_limit(&self, limit: usize) -> Result<Vec<Vec<usize>>, DigraphError> {
        if self.n > limit {
            return Err(DigraphError::TooLarge { n: self.n, limit });
        }
        let mut memo: HashMap<u64, (usize, u64)> = HashMap::new();
        let mut mask = full_mask(self.n);
        let mut out = Vec::new();
        while mask != 0 {
            let (_, k) = self.cover(mask, &mut memo);
            out.push(bits(k).collect());
            mask &= !k;
        }
        Ok(out)
    }

    fn cover(&self, mask: u64, memo: &mut HashMap<u64, (usize, u64)>) -> (usize, u64) {
        if mask == 0 {
            return (0, 0);
        }
        if let Some(&hit) = memo.get(&mask) {
            return hit;
        }
        let v = mask.trailing_zeros() as usize;
        // vertices mutually adjacent with v
        let cand = bits(mask & !(1 << v)).filter(|&u| self.has_arc(u, v) && self.has_arc(v, u)).fold(0u64, |a, u| a | 1 << u);
        let mut best = (usize::MAX, 0u64);
        let mut sub = cand;
        loop {
            let clique = sub | 1 << v;
            let is_clique = bits(sub).all(|a| bits(sub).all(|b| a == b || self.has_arc(a, b)));
            if is_clique {
                let val = 1 + self.cover(mask & !clique, memo).0;
                if val < best.0 || (val == best.0 && clique < best.1) {
                    best = (val, clique);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & cand;
        }
        memo.insert(mask, best);
        best
    }

    /// True iff `m` is `n×n`, has unit diagonal, and is zero off the arcs.
    pub fn is_fitted_by(&self, m: &FqMatrix) -> bool {
        if m.rows() != self.n || m.cols() != self.n {
            return false;
        }
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = m.get(i, j);
                if i == j {
                    e == 1
                } else {
                    e == 0 || self.has_arc(i, j)
                }
            })
        })
    }

    /// Fitting matrix with rows `e_v − e_next(v)` along each given disjoint
    /// circuit and unit rows elsewhere; its rank is `n − circuits.len()`.
    pub fn circuit_matrix(&self, field: &FieldSpec, circuits: &[Vec<usize>]) -> FqMatrix {
        let mut m = FqMatrix::identity(field, self.n);
        let minus_one = field.neg(1);
        for c in circuits {
            for (k, &v) in c.iter().enumerate() {
                let next = c[(k + 1) % c.len()];
                m.set(v, next, minus_one);
            }
        }
        m
    }

    /// Contraction along the arc `(i1, i2)`; see [`Contraction`].
    pub fn contract_arc(&self, i1: usize, i2: usize) -> Result<Contraction, DigraphError> {
        if i1 >= self.n || i2 >= self.n || !self.has_arc(i1, i2) {
            return Err(DigraphError::PreconditionViolated(format!("({i1},{i2}) is not an arc")));
        }
        if self.out_degree(i1) != 1 {
            return Err(DigraphError::PreconditionViolated(format!(
                "out-degree of {i1} is {}, not 1",
                self.out_degree(i1)
            )));
        }
        if self.has_arc(i2, i1) {
            return Err(DigraphError::PreconditionViolated(format!("reciprocal arc ({i2},{i1}) present")));
        }
        let mut arcs = BTreeSet::new();
        for (u, v) in self.arcs() {
            if u == i1 {
                continue;
            }
            if v == i1 {
                if u != i2 {
                    arcs.insert((u, i2));
                }
            } else {
                arcs.insert((u, v));
            }
        }
        let relabel = relabel_without(self.n, i1);
        let arcs: Vec<_> = arcs.iter().map(|&(u, v)| (relabel[u].unwrap(), relabel[v].unwrap())).collect();
        Ok(Contraction { graph: Digraph::new(self.n - 1, &arcs)?, i1, i2, relabel })
    }

    /// Deletes a vertex; returns the induced digraph and the relabeling.
    pub fn delete_vertex(&self, v: usize) -> (Digraph, Vec<Option<usize>>) {
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        (self.induced(&keep), relabel_without(self.n, v))
    }
}

fn relabel_without(n: usize, gone: usize) -> Vec<Option<usize>> {
    (0..n).map(|v| match v.cmp(&gone) {
        std::cmp::Ordering::Less => Some(v),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(v - 1),
    }).collect()
}

/// Extends a row of the smaller graph to the original vertex set, with zero at the removed vertex.
fn extend_row(row: &[u32], relabel: &[Option<usize>]) -> Vec<u32> {
    relabel.iter().map(|r| r.map_or(0, |i| row[i])).collect()
}

/// The result of contracting an arc, with what is needed to lift
/// certificates back to the original digraph.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: Digraph,
    pub i1: usize,
    pub i2: usize,
    /// Original vertex to contracted vertex; `None` for `i1`.
    pub relabel: Vec<Option<usize>>,
}

impl Contraction {
    /// Lifts a matrix fitting the contracted graph to one fitting the
    /// original, raising the rank by exactly one.
    pub fn lift(&self, original: &Digraph, m: &FqMatrix) -> FqMatrix {
        let f = m.field();
        let n = self.relabel.len();
        let mut top = vec![0; n];
        top[self.i1] = 1;
        top[self.i2] = f.neg(1);
        let i2_new = self.relabel[self.i2].unwrap();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|j| {
                if j == self.i1 {
                    return top.clone();
                }
                let src = m.row(self.relabel[j].unwrap());
                let mut row = extend_row(src, &self.relabel);
                if original.has_arc(j, self.i1) {
                    crate::matrix::vec_axpy(f, &mut row, src[i2_new], &top);
                }
                row
            })
            .collect();
        FqMatrix::from_rows(f, n, &rows)
    }
}

/// Lifts a certificate through the deletion of an out-degree-0 vertex.
pub fn lift_deletion(v: usize, relabel: &[Option<usize>], m: &FqMatrix) -> FqMatrix {
    let n = relabel.len();
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            if j == v {
                crate::matrix::unit(n, v)
            } else {
                extend_row(m.row(relabel[j].unwrap()), relabel)
            }
        })
        .collect();
    FqMatrix::from_rows(m.field(), n, &rows)
}

#[derive(Serialize, Deserialize)]
struct DigraphRepr {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Serialize for Digraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let arcs = self.arcs().into_iter().map(|(u, v)| (u + 1, v + 1)).collect();
        DigraphRepr { n: self.n, arcs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DigraphRepr::deserialize(d)?;
        Digraph::from_one_based(r.n, &r.arcs).map_err(serde::de::Error::custom)
    }
}

/// Hyperarc `(tail, head)`: receiver wants `tail` and knows `head`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperarc {
    pub tail: usize,
    pub head: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    hyperarcs: Vec<Hyperarc>,
}

impl Hypergraph {
    pub fn new(n: usize, hyperarcs: Vec<Hyperarc>) -> Result<Self, DigraphError> {
        let mut clean = Vec::with_capacity(hyperarcs.len());
        for (k, mut h) in hyperarcs.into_iter().enumerate() {
            if h.tail >= n || h.head.iter().any(|&v| v >= n) {
                return Err(DigraphError::Invalid(format!("hyperarc {k} out of range")));
            }
            h.head.sort_unstable();
            h.head.dedup();
            if h.head.contains(&h.tail) {
                return Err(DigraphError::Invalid(format!("hyperarc {k}: tail lies in its head")));
            }
            clean.push(h);
        }
        Ok(Hypergraph { n, hyperarcs: clean })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.hyperarcs.len()
    }

    pub fn hyperarcs(&self) -> &[Hyperarc] {
        &self.hyperarcs
    }

    /// `m×n`, 1 at each tail, 0 outside tail and head.
    pub fn is_fitted_by(&self, m: &FqMatrix) -> bool {
        if m.rows() != self.m() || m.cols() != self.n {
            return false;
        }
        self.hyperarcs.iter().enumerate().all(|(i, h)| {
            (0..self.n).all(|j| {
                let e = m.get(i, j);
                if j == h.tail {
                    e == 1
                } else {
                    e == 0 || h.head.contains(&j)
                }
            })
        })
    }
}

impl From<&Digraph> for Hypergraph {
    fn from(g: &Digraph) -> Self {
        let hyperarcs = (0..g.n()).map(|v| Hyperarc { tail: v, head: g.out_neighbors(v) }).collect();
        Hypergraph { n: g.n(), hyperarcs }
    }
}

#[derive(Serialize, Deserialize)]
struct HyperarcRepr {
    tail: usize,
    head: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphRepr {
    n: usize,
    hyperarcs: Vec<HyperarcRepr>,
}

impl Serialize for Hypergraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HypergraphRepr {
            n: self.n,
            hyperarcs: self
                .hyperarcs
                .iter()
                .map(|h| HyperarcRepr { tail: h.tail + 1, head: h.head.iter().map(|v| v + 1).collect() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = HypergraphRepr::deserialize(d)?;
        let mut arcs = Vec::new();
        for h in r.hyperarcs {
            if h.tail == 0 || h.head.contains(&0) {
                return Err(D::Error::custom("vertex labels start at 1"));
            }
            arcs.push(Hyperarc { tail: h.tail - 1, head: h.head.iter().map(|v| v - 1).collect() });
        }
        Hypergraph::new(r.n, arcs).map_err(D::Error::custom)
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Set bits of a mask in increasing order.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// All `k`-subsets of `0..n` as masks, in colexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = full_mask(n);
    let mut cur = if k == 0 { Some(0u64) } else if k > n { None } else { Some((1u64 << k) - 1) };
    std::iter::from_fn(move || {
        let out = cur?;
        cur = if out == 0 {
            None
        } else {
            // Gosper's hack
            let c = out & out.wrapping_neg();
            let r = out + c;
            let next = (((r ^ out) >> 2) / c) | r;
            (next <= limit && next.count_ones() as usize == k && r != 0).then_some(next)
        };
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::from_one_based(n, arcs).unwrap()
    }

    #[test]
    fn acyclicity() {
        assert!(Digraph::empty(1).is_acyclic());
        assert!(!Digraph::cycle(3).is_acyclic());
        assert!(g(3, &[(1, 2), (1, 3), (2, 3)]).is_acyclic());
        assert!(!Digraph::complete(2).is_acyclic());
        assert!(Digraph::complete(2).is_acyclic_as_graph());
        assert!(!Digraph::complete(3).is_acyclic_as_graph());
        let path = g(3, &[(1, 2), (2, 1), (2, 3), (3, 2)]);
        assert!(path.is_acyclic_as_graph());
    }

    #[test]
    fn parameters_of_small_graphs() {
        let acyclic = g(4, &[(1, 2), (2, 3), (1, 4)]);
        assert_eq!((acyclic.tau().unwrap(), acyclic.nu().unwrap(), acyclic.alpha().unwrap()), (0, 0, 4));
        let c3 = Digraph::cycle(3);
        assert_eq!(c3.tau().unwrap(), 1);
        assert_eq!(c3.nu().unwrap(), 1);
        assert_eq!(c3.alpha().unwrap(), 2);
        assert_eq!(c3.clique_cover_number().unwrap(), 3);
        let k4 = Digraph::complete(4);
        assert_eq!(k4.tau().unwrap(), 3);
        assert_eq!(k4.nu().unwrap(), 2);
        assert_eq!(k4.clique_cover_number().unwrap(), 1);
    }

    #[test]
    fn packing_is_disjoint_circuits() {
        let two_triangles = g(6, &[(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4), (1, 4)]);
        let p = two_triangles.circuit_packing().unwrap();
        assert_eq!(p.len(), 2);
        let f = FieldSpec::prime(2).unwrap();
        let m = two_triangles.circuit_matrix(&f, &p);
        assert!(two_triangles.is_fitted_by(&m));
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn too_large_is_reported() {
        let big = Digraph::cycle(20);
        assert_eq!(big.tau(), Err(DigraphError::TooLarge { n: 20, limit: 16 }));
        assert!(big.nu().is_err());
    }

    #[test]
    fn contraction_example() {
        // 1→2, 2→3, 2→4, 3→1, 3→4, 4→1, 4→3
        let graph = g(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (3, 4), (4, 1), (4, 3)]);
        let c = graph.contract_arc(0, 1).unwrap();
        assert_eq!(c.graph, Digraph::complete(3));
        let path = g(2, &[(1, 2)]);
        assert_eq!(path.contract_arc(0, 1).unwrap().graph, Digraph::empty(1));
        assert!(matches!(Digraph::complete(2).contract_arc(0, 1), Err(DigraphError::PreconditionViolated(_))));
        assert!(matches!(graph.contract_arc(1, 2), Err(DigraphError::PreconditionViolated(_))));
    }

    #[test]
    fn contraction_lift_fits_and_adds_one() {
        let graph = g(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (3, 4), (4, 1), (4, 3)]);
        let c = graph.contract_arc(0, 1).unwrap();
        for q in [2, 3, 5] {
            let f = FieldSpec::prime(q).unwrap();
            let ones = FqMatrix::from_entries(&f, 3, 3, vec![1; 9]).unwrap();
            let lifted = c.lift(&graph, &ones);
            assert!(graph.is_fitted_by(&lifted), "{lifted:?}");
            assert_eq!(lifted.rank(), 2);
        }
    }

    #[test]
    fn deletion_lift() {
        let graph = g(3, &[(1, 2), (2, 1), (1, 3)]);
        let (small, relabel) = graph.delete_vertex(2);
        let f = FieldSpec::prime(3).unwrap();
        let m = FqMatrix::from_entries(&f, 2, 2, vec![1, 1, 1, 1]).unwrap();
        assert!(small.is_fitted_by(&m));
        let lifted = lift_deletion(2, &relabel, &m);
        assert!(graph.is_fitted_by(&lifted));
        assert_eq!(lifted.rank(), 2);
    }

    #[test]
    fn gosper_enumeration() {
        assert_eq!(subsets_of_size(4, 2).count(), 6);
        assert_eq!(subsets_of_size(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets_of_size(3, 3).collect::<Vec<_>>(), vec![7]);
        assert_eq!(subsets_of_size(2, 3).count(), 0);
    }

    #[test]
    fn json_is_one_based() {
        let graph = g(3, &[(1, 2), (3, 1)]);
        let s = serde_json::to_string(&graph).unwrap();
        assert_eq!(s, r#"{"n":3,"arcs":[[1,2],[3,1]]}"#);
        assert_eq!(serde_json::from_str::<Digraph>(&s).unwrap(), graph);
        let h = Hypergraph::from(&graph);
        let hs = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<Hypergraph>(&hs).unwrap(), h);
        assert!(serde_json::from_str::<Digraph>(r#"{"n":2,"arcs":[[1,1]]}"#).is_err());
    }
}
