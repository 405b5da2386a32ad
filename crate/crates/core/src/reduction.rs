//! Deciding whether a digraph has min-rank `n − 1`, and building rank
//! `n − 2` fitting matrices for digraphs with feedback number 2, by
//! repeated arc contraction.

use crate::digraph::{lift_deletion, Contraction, Digraph, DigraphError};
use crate::field::FieldSpec;
use crate::instance::{IcsiInstance, Validity};
use crate::matrix::{vec_axpy, FqMatrix};
use crate::minrank::multicast_matrix;

/// Outcome of [`decide_minrank_n_minus_1`].
#[derive(Clone, Debug)]
pub enum Decision {
    /// `τ = 1`; a fitting matrix of rank `n − 1`.
    Yes { certificate: FqMatrix },
    No(NoReason),
}

#[derive(Clone, Debug)]
pub enum NoReason {
    /// No circuit at all, so the min-rank is `n`.
    Acyclic,
    /// At least two vertices are needed to break every circuit. When exactly
    /// two suffice, a fitting matrix of rank `n − 2` is attached.
    TauAtLeastTwo { tau2_certificate: Option<FqMatrix> },
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes { .. })
    }
}

fn require_large_field(g: &Digraph, field: &FieldSpec) -> Result<(), DigraphError> {
    if (field.q() as usize) <= g.n() {
        return Err(DigraphError::FieldTooSmall { q: field.q(), need: g.n() });
    }
    Ok(())
}

/// Whether some set of at most two vertices breaks every circuit, in
/// polynomial time. Returns the smallest such `τ`, or `None` when `τ > 2`.
fn tau_at_most_two(g: &Digraph) -> Option<usize> {
    if g.is_acyclic() {
        return Some(0);
    }
    if (0..g.n()).any(|v| g.acyclic_without(1 << v)) {
        return Some(1);
    }
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.acyclic_without(1 << u | 1 << v) {
                return Some(2);
            }
        }
    }
    None
}

/// Decides `minrk_q(G) = n − 1` for `q > n`, which holds exactly when
/// `τ(G) = 1`. Runs in polynomial time; the attached `τ = 2` certificate is
/// extra work done only in that case.
pub fn decide_minrank_n_minus_1(g: &Digraph, field: &FieldSpec) -> Result<Decision, DigraphError> {
    require_large_field(g, field)?;
    match tau_at_most_two(g) {
        Some(0) => Ok(Decision::No(NoReason::Acyclic)),
        Some(1) => {
            let circuit = g.find_circuit_in(crate::digraph::full_mask(g.n())).expect("cyclic");
            Ok(Decision::Yes { certificate: g.circuit_matrix(field, &[circuit]) })
        }
        Some(_) => Ok(Decision::No(NoReason::TauAtLeastTwo { tau2_certificate: Some(reduce_tau2(g, field)?) })),
        None => Ok(Decision::No(NoReason::TauAtLeastTwo { tau2_certificate: None })),
    }
}

/// Converts a valid encoder of the embedded instance into a fitting
/// matrix: row `i` is `b^(i)·L = e_i − a^(i)·V^(i)`.
pub fn fitting_matrix_from_code(g: &Digraph, validity: &Validity) -> Option<FqMatrix> {
    let l = &validity.encoder;
    let f = l.field();
    let mut rows = Vec::with_capacity(g.n());
    for w in &validity.witnesses {
        let w = w.as_ref()?;
        let mut row = vec![0; g.n()];
        for (r, &c) in w.b.iter().enumerate() {
            vec_axpy(f, &mut row, c, l.row(r));
        }
        rows.push(row);
    }
    let m = FqMatrix::from_rows(f, g.n(), &rows);
    g.is_fitted_by(&m).then_some(m)
}

enum Step {
    Delete { v: usize, relabel: Vec<Option<usize>> },
    Contract(Contraction),
}

/// Rank `n − 2` fitting matrix for a digraph with `τ = 2` and `q > n`.
///
/// Out-degree-0 vertices are deleted and the lowest vertex with out-degree
/// 1 and no reciprocal arc is contracted into its out-neighbour, until every
/// vertex has out-degree at least 2. The reduced graph gets the multicast
/// matrix, which is lifted back one step at a time. If the reduction stops
/// at an out-degree-1 vertex whose arc is reciprocated, the graph has two
/// disjoint circuits and their circuit matrix is lifted instead.
pub fn reduce_tau2(g: &Digraph, field: &FieldSpec) -> Result<FqMatrix, DigraphError> {
    require_large_field(g, field)?;
    if tau_at_most_two(g) != Some(2) {
        return Err(DigraphError::PreconditionViolated("τ(G) is not 2".into()));
    }
    let mut steps: Vec<(Digraph, Step)> = Vec::new();
    let mut cur = g.clone();
    let base = loop {
        if let Some(v) = (0..cur.n()).find(|&v| cur.out_degree(v) == 0) {
            let (next, relabel) = cur.delete_vertex(v);
            steps.push((cur, Step::Delete { v, relabel }));
            cur = next;
            continue;
        }
        let eligible = (0..cur.n()).find(|&v| {
            cur.out_degree(v) == 1 && {
                let w = cur.out_neighbors(v)[0];
                !cur.has_arc(w, v)
            }
        });
        if let Some(i1) = eligible {
            let i2 = cur.out_neighbors(i1)[0];
            let c = cur.contract_arc(i1, i2)?;
            let next = c.graph.clone();
            steps.push((cur, Step::Contract(c)));
            cur = next;
            continue;
        }
        if (0..cur.n()).all(|v| cur.out_degree(v) >= 2) {
            let inst = IcsiInstance::from_digraph(&cur).embed(field);
            let l = multicast_matrix(&inst)
                .map_err(|e| DigraphError::PreconditionViolated(format!("multicast construction failed: {e}")))?;
            let validity = inst.validate_code(&l).expect("dimensions agree");
            break fitting_matrix_from_code(&cur, &validity)
                .ok_or_else(|| DigraphError::PreconditionViolated("multicast code does not decode".into()))?;
        }
        let packing = cur.circuit_packing()?;
        if packing.len() < 2 {
            return Err(DigraphError::PreconditionViolated("reduction stalled without two disjoint circuits".into()));
        }
        break cur.circuit_matrix(field, &packing[..2]);
    };
    let mut m = base;
    while let Some((parent, step)) = steps.pop() {
        m = match step {
            Step::Delete { v, relabel } => lift_deletion(v, &relabel, &m),
            Step::Contract(c) => c.lift(&parent, &m),
        };
    }
    debug_assert!(g.is_fitted_by(&m));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, arcs: &[(usize, usize)]) -> Digraph {
        Digraph::from_one_based(n, arcs).unwrap()
    }

    #[test]
    fn decisions_on_basic_graphs() {
        let f5 = FieldSpec::prime(5).unwrap();
        match decide_minrank_n_minus_1(&Digraph::cycle(3), &f5).unwrap() {
            Decision::Yes { certificate } => {
                assert_eq!(certificate.rank(), 2);
                assert!(Digraph::cycle(3).is_fitted_by(&certificate));
            }
            other => panic!("{other:?}"),
        }
        let path = g(3, &[(1, 2), (2, 3)]);
        assert!(matches!(decide_minrank_n_minus_1(&path, &f5).unwrap(), Decision::No(NoReason::Acyclic)));
        assert!(matches!(
            decide_minrank_n_minus_1(&Digraph::complete(4), &f5).unwrap(),
            Decision::No(NoReason::TauAtLeastTwo { tau2_certificate: None })
        ));
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(matches!(
            decide_minrank_n_minus_1(&Digraph::cycle(3), &f3),
            Err(DigraphError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn two_triangles_sharing_a_vertex() {
        // the shared vertex alone is a feedback set, so no τ = 2 certificate exists
        let bowtie = g(5, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(bowtie.tau().unwrap(), 1);
        // a chord-closing circuit through 1, 2, 4, 5 avoids vertex 3
        let graph = g(5, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 3), (2, 4), (5, 1)]);
        assert_eq!(graph.tau().unwrap(), 2);
        let f7 = FieldSpec::prime(7).unwrap();
        let m = reduce_tau2(&graph, &f7).unwrap();
        assert!(graph.is_fitted_by(&m));
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn four_receiver_graph() {
        let graph = g(4, &[(1, 2), (3, 1), (3, 4), (4, 1), (4, 3), (2, 4), (2, 3)]);
        assert_eq!(graph.tau().unwrap(), 2);
        let f5 = FieldSpec::prime(5).unwrap();
        let m = reduce_tau2(&graph, &f5).unwrap();
        assert!(graph.is_fitted_by(&m));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn out_degree_two_skips_contraction() {
        let graph = g(4, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 1), (4, 1), (4, 2)]);
        assert_eq!(graph.tau().unwrap(), 2);
        let f5 = FieldSpec::prime(5).unwrap();
        let m = reduce_tau2(&graph, &f5).unwrap();
        assert_eq!(m.rank(), 2);
        assert!(graph.is_fitted_by(&m));
    }

    #[test]
    fn rejects_wrong_tau() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert!(matches!(reduce_tau2(&Digraph::cycle(3), &f5), Err(DigraphError::PreconditionViolated(_))));
    }
}
