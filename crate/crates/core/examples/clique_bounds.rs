//! Every clique-based bound of a small instance, printed as a table.

use icbound::clique::{compute_bounds, Param};
use icbound::field::FieldSpec;
use icbound::instance::IcsiInstance;
use icbound::report::bounds_table;

fn main() {
    let inst = IcsiInstance::canonical_one_based(&[&[2], &[3, 4], &[1, 4], &[1, 3]])
        .unwrap()
        .embed(&FieldSpec::prime(2).unwrap());
    let report = compute_bounds(&inst, &Param::ALL).expect("bounds");
    print!("{}", bounds_table(&report));
    for (p, b) in &report.bounds {
        b.verify(&inst, *p).expect("certificate checks out");
    }
}
