//! The degree-2 binary CSP solver on its own: paths are solved by list
//! pruning, cycles by guessing one variable, and parallel constraints are
//! merged by intersection.
//!
//! Run with: cargo run --example auxiliary_csp

use clawdom::csp::{
    brute_force_satisfiable, merge_parallel_constraints, solve_degree2, Constraint,
    ConstraintTag, CspInstance,
};
use clawdom::packs::PackKey;

fn differ() -> Vec<(usize, usize)> {
    vec![(0, 1), (1, 0)]
}

fn main() {
    // A 4-cycle of "must differ" constraints over two values is a proper
    // 2-coloring problem: feasible on even cycles.
    let vars: Vec<PackKey> = (0..4).map(PackKey::One).collect();
    let even_cycle = CspInstance {
        variables: vars.clone(),
        values: vec![vec![0, 1]; 4],
        constraints: vec![
            Constraint::new(0, 1, differ(), ConstraintTag::Independence),
            Constraint::new(1, 2, differ(), ConstraintTag::Independence),
            Constraint::new(2, 3, differ(), ConstraintTag::Independence),
            Constraint::new(3, 0, differ(), ConstraintTag::Independence),
        ],
    };
    let assignment = solve_degree2(&even_cycle).unwrap().unwrap();
    println!("even cycle: {:?}", assignment.values);

    // The odd cycle has no 2-coloring.
    let odd_cycle = CspInstance {
        variables: vars[..3].to_vec(),
        values: vec![vec![0, 1]; 3],
        constraints: vec![
            Constraint::new(0, 1, differ(), ConstraintTag::Independence),
            Constraint::new(1, 2, differ(), ConstraintTag::Independence),
            Constraint::new(2, 0, differ(), ConstraintTag::Independence),
        ],
    };
    println!("odd cycle feasible: {}", solve_degree2(&odd_cycle).unwrap().is_some());
    assert!(!brute_force_satisfiable(&odd_cycle));

    // Two parallel constraints on the same pair merge by intersecting
    // their allowed sets.
    let parallel = CspInstance {
        variables: vars[..2].to_vec(),
        values: vec![vec![0, 1], vec![0, 1]],
        constraints: vec![
            Constraint::new(0, 1, vec![(0, 0), (0, 1)], ConstraintTag::Independence),
            Constraint::new(1, 0, vec![(0, 0), (1, 0)], ConstraintTag::Independence),
        ],
    };
    let merged = merge_parallel_constraints(parallel);
    println!(
        "merged allowed set: {:?}",
        merged.constraints[0].allowed
    );
    let assignment = solve_degree2(&merged).unwrap().unwrap();
    println!("merged instance assignment: {:?}", assignment.values);
}
