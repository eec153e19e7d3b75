//! Decide k-domination on generated claw-free graphs and cross-check the
//! answers against the brute-force oracle.
//!
//! Run with: cargo run --example solve_dominating_set

use clawdom::gen;
use clawdom::oracle;
use clawdom::rng::SplitMix64;
use clawdom::solver::{solve_with, SolveOptions};

fn main() {
    let mut rng = SplitMix64::new(2024);
    let opts = SolveOptions {
        deterministic: true,
        ..SolveOptions::default()
    };
    for round in 0..5 {
        let g = gen::random_claw_free(&mut rng, 18);
        let brute = oracle::brute_mds(&g, 5).expect("desk-scale instance");
        println!(
            "instance {round}: n = {}, m = {}, optimum {}",
            g.n(),
            g.edge_count(),
            brute
                .optimum
                .map_or("> 5".to_string(), |o| o.to_string())
        );
        for k in 0..=5 {
            let outcome = solve_with(&g, k, &opts).expect("claw-free by construction");
            match outcome.solution {
                Some(sol) => {
                    println!(
                        "  k = {k}: YES, witness {:?} ({} branch nodes)",
                        sol.vertices.to_vec(),
                        outcome.stats.branch_nodes
                    );
                    assert!(g.dominates(&sol.vertices, &g.vertex_set()));
                    break;
                }
                None => println!("  k = {k}: NO ({} branch nodes)", outcome.stats.branch_nodes),
            }
        }
    }
}
