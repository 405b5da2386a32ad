//! MDS generators over small fields and the smallest extension that admits
//! a given length and dimension.

use icbound::field::FieldSpec;
use icbound::mds::{field_for_mds, is_mds, rs_generator};

fn main() {
    let gf2 = FieldSpec::prime(2).unwrap();
    let parity = rs_generator(3, 2, &gf2).unwrap();
    println!("[3,2] over GF(2): {:?}, MDS: {}", parity.row_vecs(), is_mds(&parity));
    for (s, k) in [(4, 2), (6, 3), (9, 4)] {
        let f = field_for_mds(&gf2, s, k).unwrap();
        let g = rs_generator(s, k, &f).unwrap();
        println!("[{s},{k}] needs GF({}); MDS: {}", f.q(), is_mds(&g));
    }
}
