//! Deciding min-rank n−1 and building rank n−2 fitting matrices by arc
//! contraction.

use icbound::digraph::Digraph;
use icbound::field::FieldSpec;
use icbound::reduction::{decide_minrank_n_minus_1, Decision, NoReason};

fn main() {
    let f = FieldSpec::prime(7).unwrap();
    let graphs = [
        ("3-cycle", Digraph::cycle(3)),
        ("K4", Digraph::complete(4)),
        ("two circuits", Digraph::from_one_based(5, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 3), (2, 4), (5, 1)]).unwrap()),
    ];
    for (name, g) in graphs {
        match decide_minrank_n_minus_1(&g, &f).unwrap() {
            Decision::Yes { certificate } => println!("{name}: minrk = n-1, certificate rank {}", certificate.rank()),
            Decision::No(NoReason::Acyclic) => println!("{name}: acyclic, minrk = n"),
            Decision::No(NoReason::TauAtLeastTwo { tau2_certificate: Some(m) }) => {
                println!("{name}: tau = 2, fitting matrix of rank {} (n = {})", m.rank(), g.n())
            }
            Decision::No(NoReason::TauAtLeastTwo { tau2_certificate: None }) => println!("{name}: tau > 2"),
        }
    }
}
