//! Exact rational linear and integer programming: the fractional clique
//! cover of a 5-cycle.

use icbound::lp::{ilp_solve, int, lp_solve, LinearProgram, Relation, Sense};

fn main() {
    // cliques {i, i+1} of C5, each vertex covered exactly once
    let mut p = LinearProgram::new(Sense::Minimize, vec![int(1); 5]);
    for v in 0..5 {
        p.add_sparse(&[(v, int(1)), ((v + 4) % 5, int(1))], Relation::Ge, int(1));
    }
    let lp = lp_solve(&p).unwrap();
    println!("LP optimum {} at {:?}", lp.objective, lp.x.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    p.set_all_integer(true);
    let ilp = ilp_solve(&p).unwrap();
    println!("ILP optimum {}", ilp.objective);
}
