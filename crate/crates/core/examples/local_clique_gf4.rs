//! Local clique cover over GF(4): the choice of coding vector for one
//! clique decides whether two or three transmissions suffice.

use icbound::clique::{local_load, CoverEntry};
use icbound::field::FieldSpec;
use icbound::instance::IccsiInstance;
use icbound::lp::int;
use icbound::matrix::{unit, FqMatrix};
use icbound::schemes::Scheme;

fn digits(s: &str) -> Vec<u32> {
    s.chars().map(|c| c.to_digit(10).unwrap()).collect()
}

fn main() {
    let f = FieldSpec::of_order(4).unwrap();
    let side = [
        ["010000", "000011"],
        ["100000", "001100"],
        ["000100", "000011"],
        ["001000", "110000"],
        ["000001", "001100"],
        ["110000", "000010"],
    ];
    let v = side.iter().map(|rows| FqMatrix::from_rows(&f, 6, &rows.map(digits))).collect();
    let r: Vec<Vec<u32>> = (0..6).map(|i| unit(6, i)).collect();
    let inst = IccsiInstance::new(f.clone(), 1, FqMatrix::identity(&f, 6), v, FqMatrix::from_rows(&f, 6, &r)).unwrap();

    // 2 encodes α in GF(4)
    for last in ["000012", "000011"] {
        let cover = vec![
            CoverEntry { members: 0b000011, weight: int(1), vector: digits("110000") },
            CoverEntry { members: 0b001100, weight: int(1), vector: digits("001100") },
            CoverEntry { members: 0b110000, weight: int(1), vector: digits(last) },
        ];
        let k = local_load(&inst, 0b111111, &cover);
        let scheme = Scheme::local_clique(&inst, &k, &cover, false).unwrap();
        let sim = scheme.simulate(50, 1);
        println!("v_C3 = {last}: k = {k}, {} transmissions, {} failures", sim.scheme.transmissions, sim.failures);
    }
}
