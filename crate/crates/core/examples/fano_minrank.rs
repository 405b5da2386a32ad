//! Min-rank of the Fano instance over GF(2), with the full rank distribution
//! of its fitting matrices.

use icbound::field::FieldSpec;
use icbound::instance::IcsiInstance;
use icbound::minrank::{default_budget, minrank_hypergraph, rank_distribution, FittingPattern};

fn main() {
    let fano = IcsiInstance::canonical_one_based(&[&[2, 3], &[6, 7], &[5, 7], &[2, 5], &[1, 6], &[3, 4], &[1, 4]])
        .expect("valid instance");
    let gf2 = FieldSpec::prime(2).unwrap();
    let h = fano.to_hypergraph();

    let best = minrank_hypergraph(&h, &gf2, default_budget()).expect("within budget");
    println!("minrk_2 = {}", best.value);
    for r in 0..best.certificate.rows() {
        println!("  {:?}", best.certificate.row(r));
    }

    let pattern = FittingPattern::of_hypergraph(&h).to_row_pattern(&gf2);
    let dist = rank_distribution(&pattern, default_budget()).unwrap();
    println!("rank distribution over {} fitting matrices:", dist.values().sum::<u64>());
    for (rank, count) in dist {
        println!("  rank {rank}: {count}");
    }
}
