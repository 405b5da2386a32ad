//! Codes of projective planes: p-ranks, Klemm's bound, weight enumeration,
//! and the index code a plane gives its own instance.

use icbound::design::{design_bound, klemm_check, projective_plane, secrecy_check, weight_checks};
use icbound::instance::IcsiInstance;

fn main() {
    for (order, p) in [(2, 2), (3, 3)] {
        let plane = projective_plane(order).unwrap();
        let klemm = klemm_check(&plane, p).unwrap();
        let weights = weight_checks(&plane, p).unwrap();
        println!(
            "PG(2,{order}): v = {}, {}-rank {}, Klemm {}, min weight {}, {} codewords",
            plane.v(),
            p,
            klemm.rank,
            if klemm.passes() { "holds" } else { "fails" },
            weights.min_weight,
            weights.codewords,
        );

        // receiver i wants one point of line i and knows the rest of the line
        let side: Vec<Vec<usize>> = plane.blocks().iter().map(|b| b[1..].to_vec()).collect();
        let demands: Vec<usize> = plane.blocks().iter().map(|b| b[0]).collect();
        let Ok(inst) = IcsiInstance::new(plane.v(), 1, demands, side) else { continue };
        match design_bound(&inst, &plane, p) {
            Ok(b) => println!("  index code of length {} from the plane's incidence rows", b.encoder.rows()),
            Err(e) => println!("  design bound: {e}"),
        }
        if let Ok(s) = secrecy_check(&inst, &plane, p) {
            println!("  {} receiver/message pairs checked, {} leaks", s.pairs_checked, s.leaks.len());
        }
    }
}
