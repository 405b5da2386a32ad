//! Fractional partition multicast at rate 5/2, and what goes wrong when the
//! sub-packets are sent without an MDS combination.

use icbound::clique::{Bounds, Param};
use icbound::field::FieldSpec;
use icbound::instance::IcsiInstance;
use icbound::schemes::Scheme;

fn main() {
    let inst = IcsiInstance::canonical_one_based(&[&[2], &[3, 4], &[1, 4], &[1, 3]])
        .unwrap()
        .embed(&FieldSpec::prime(2).unwrap());
    let bound = Bounds::new(&inst).compute(Param::PhiPF).unwrap();
    println!("phi_p_f = {}", bound.value);

    let scheme = Scheme::from_bound(&inst, &bound, true).unwrap();
    let sim = scheme.simulate(100, 42);
    println!(
        "mixed: {} symbols over {} sub-packets, {} failures in {} trials",
        sim.scheme.transmissions, sim.scheme.sub_packets, sim.failures, sim.trials
    );

    let icbound::clique::Certificate::Groups { groups } = &bound.certificate else { unreachable!() };
    let copies = sim.scheme.groups.len();
    for sel in 0..1usize << copies {
        let selection: Vec<usize> = (0..copies).map(|b| sel >> b & 1).collect();
        let unmixed = Scheme::unmixed_multicast(&inst, groups, &selection).unwrap();
        let sim = unmixed.simulate(5, 42);
        println!("unmixed {selection:?}: receivers failing {:?}", sim.failed_receivers.iter().map(|j| j + 1).collect::<Vec<_>>());
    }
}
