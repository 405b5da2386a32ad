mod common;

use common::{arcs_from_mask, brute_minrank, brute_tau, random_iccsi, rank_mod_p, PartitionProgram};
use icbound::clique::min_partition;
use icbound::digraph::Digraph;
use icbound::field::FieldSpec;
use icbound::instance::{IcsiInstance, Instance};
use icbound::lp::{ilp_solve, int, lp_solve, LinearProgram, Relation, Sense};
use icbound::matrix::FqMatrix;
use icbound::mds::rs_generator;
use icbound::minrank::{default_budget, kappa};
use icbound::subspace::Subspace;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORDERS: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

fn matrix(f: &FieldSpec, rows: usize, cols: usize, seed: &[u32]) -> FqMatrix {
    let rows: Vec<Vec<u32>> =
        (0..rows).map(|r| (0..cols).map(|c| seed[(r * cols + c) % seed.len()] % f.q()).collect()).collect();
    FqMatrix::from_rows(f, cols, &rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0..ORDERS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = FieldSpec::of_order(ORDERS[qi]).unwrap();
        let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            prop_assert_eq!(f.pow(a, u64::from(f.q()) - 1), 1);
        }
        prop_assert_eq!(f.pow(a, u64::from(f.p())), {
            let mut x = 1;
            for _ in 0..f.p() { x = f.mul(x, a); }
            x
        });
    }

    #[test]
    fn rank_matches_oracle(pi in 0..3usize, rows in 1..7usize, cols in 1..7usize, seed in prop::collection::vec(any::<u32>(), 1..50)) {
        let p = [2u32, 3, 5][pi];
        let f = FieldSpec::prime(p).unwrap();
        let m = matrix(&f, rows, cols, &seed);
        let oracle = rank_mod_p(m.row_vecs().into_iter().map(|r| r.into_iter().map(u64::from).collect()).collect(), u64::from(p));
        prop_assert_eq!(m.rank(), oracle);
        prop_assert_eq!(m.transpose().rank(), oracle);
        prop_assert_eq!(m.kernel().len(), cols - oracle);
    }

    #[test]
    fn subspace_dimension_formula(qi in 0..4usize, n in 1..6usize, a in 0..5usize, b in 0..5usize, seed in prop::collection::vec(any::<u32>(), 1..60)) {
        let f = FieldSpec::of_order(ORDERS[qi]).unwrap();
        let u = Subspace::row_space(&matrix(&f, a, n, &seed));
        let w = Subspace::row_space(&matrix(&f, b, n, &seed[seed.len() / 2..]));
        let sum = u.sum(&w).unwrap();
        let cap = u.intersect(&w).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + w.dim());
        prop_assert!(cap.is_subspace_of(&u) && cap.is_subspace_of(&w));
        prop_assert!(u.is_subspace_of(&sum) && w.is_subspace_of(&sum));
        prop_assert_eq!(u.orthogonal().dim(), n - u.dim());
    }

    #[test]
    fn reed_solomon_generators_are_mds(pi in 0..4usize, s in 1..8usize, k in 0..8usize) {
        let p = [2u32, 3, 5, 7][pi];
        prop_assume!(k <= s);
        let f = FieldSpec::prime(p).unwrap();
        match rs_generator(s, k, &f) {
            Ok(g) => {
                prop_assert_eq!((g.rows(), g.cols()), (k, s));
                // every k columns independent, checked with the oracle rank
                for mask in 0u32..1 << s {
                    if mask.count_ones() as usize != k { continue; }
                    let cols: Vec<usize> = (0..s).filter(|c| mask >> c & 1 == 1).collect();
                    let sub = g.select_cols(&cols).row_vecs().into_iter().map(|r| r.into_iter().map(u64::from).collect()).collect();
                    prop_assert_eq!(rank_mod_p(sub, u64::from(p)), k);
                }
            }
            Err(_) => prop_assert!(s > p as usize + 1 && k >= 2 && k + 2 <= s),
        }
    }

    #[test]
    fn min_partition_matches_exhaustive_search(n in 1..7usize, costs in prop::collection::vec(prop::option::weighted(0.7, 1..20u64), 64)) {
        let full = (1u64 << n) - 1;
        let cost = |s: u64| costs[s as usize];
        // exhaustive: every set partition via restricted growth strings
        fn best(rest: u64, cost: &dyn Fn(u64) -> Option<u64>) -> Option<u64> {
            if rest == 0 { return Some(0); }
            let low = rest & rest.wrapping_neg();
            let mut out: Option<u64> = None;
            let others = rest ^ low;
            let mut sub = others;
            loop {
                let part = sub | low;
                if let (Some(c), Some(r)) = (cost(part), best(rest ^ part, cost)) {
                    out = Some(out.map_or(c + r, |o| o.min(c + r)));
                }
                if sub == 0 { break; }
                sub = (sub - 1) & others;
            }
            out
        }
        let got = min_partition(full, cost);
        prop_assert_eq!(got.as_ref().map(|g| g.0), best(full, &cost));
        if let Some((total, parts)) = got {
            prop_assert_eq!(parts.iter().fold(0, |a, p| a | p), full);
            prop_assert_eq!(parts.iter().map(|p| p.count_ones()).sum::<u32>(), n as u32);
            prop_assert_eq!(parts.iter().map(|&p| cost(p).unwrap()).sum::<u64>(), total);
        }
    }

    #[test]
    fn relaxation_never_exceeds_integral_optimum(seed in any::<u64>()) {
        let prog = PartitionProgram::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut lp = LinearProgram::new(Sense::Minimize, prog.columns.iter().map(|(_, c)| c.clone()).collect());
        for e in 0..prog.elements {
            let row = prog.columns.iter().map(|(s, _)| if s >> e & 1 == 1 { int(1) } else { int(0) }).collect();
            lp.add_constraint(row, Relation::Eq, int(1));
        }
        let relaxed = lp_solve(&lp).unwrap();
        prop_assert!(lp.is_feasible(&relaxed.x));
        prop_assert_eq!(lp.evaluate(&relaxed.x), relaxed.objective.clone());
        lp.set_all_integer(true);
        let integral = ilp_solve(&lp).unwrap();
        prop_assert!(integral.x.iter().all(|v| v.is_integer()));
        prop_assert!(relaxed.objective <= integral.objective);
        prop_assert_eq!(integral.objective, prog.brute_integral());
    }

    #[test]
    fn instance_json_round_trip(seed in any::<u64>(), qi in 0..3usize) {
        let inst = random_iccsi(&mut ChaCha8Rng::seed_from_u64(seed), [2, 3, 4][qi]);
        let text = serde_json::to_string(&Instance::Iccsi(inst.clone())).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, Instance::Iccsi(inst));
    }

    #[test]
    fn kappa_of_a_digraph_is_its_minrank(n in 2..5usize, mask in any::<u64>(), pi in 0..2usize) {
        let p = [2u32, 3][pi];
        let arcs = arcs_from_mask(n, mask & ((1 << (n * (n - 1))) - 1));
        prop_assume!(arcs.len() <= 7);
        let side: Vec<Vec<usize>> = (0..n).map(|u| arcs.iter().filter(|a| a.0 == u).map(|a| a.1 + 1).collect()).collect();
        let side: Vec<&[usize]> = side.iter().map(Vec::as_slice).collect();
        let inst = IcsiInstance::canonical_one_based(&side).unwrap();
        let k = kappa(&inst.embed(&FieldSpec::prime(p).unwrap()), default_budget()).unwrap();
        prop_assert_eq!(k.value, brute_minrank(n, &arcs, u64::from(p)));
        prop_assert_eq!(k.certificate.rank(), k.value);
    }

    #[test]
    fn feedback_number_matches_oracle(n in 1..6usize, mask in any::<u64>()) {
        let arcs = arcs_from_mask(n, mask & ((1u64 << (n * (n - 1))) - 1));
        let one_based: Vec<(usize, usize)> = arcs.iter().map(|&(u, v)| (u + 1, v + 1)).collect();
        let g = Digraph::from_one_based(n, &one_based).unwrap();
        prop_assert_eq!(g.tau().unwrap(), brute_tau(n, &arcs));
    }
}
