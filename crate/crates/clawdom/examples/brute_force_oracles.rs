//! The brute-force oracles on small fixtures, including the coincidence
//! of minimum dominating and minimum independent dominating sets on
//! claw-free graphs.
//!
//! Run with: cargo run --example brute_force_oracles

use clawdom::gen;
use clawdom::graph::Graph;
use clawdom::oracle;
use clawdom::rng::SplitMix64;

fn main() {
    let p4 = Graph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let ans = oracle::brute_mds(&p4, 2).unwrap();
    println!(
        "P4: minimum dominating set {:?} (size {})",
        ans.witness.as_ref().unwrap().to_vec(),
        ans.optimum.unwrap()
    );

    let c5 = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    println!(
        "C5: max clique size {}",
        oracle::brute_max_clique(&c5).unwrap().optimum.unwrap()
    );

    // On claw-free graphs the minimum dominating set and the minimum
    // independent dominating set always have the same size.
    let mut rng = SplitMix64::new(11);
    for round in 0..6 {
        let g = gen::random_claw_free(&mut rng, 12);
        let mds = oracle::brute_mds(&g, g.n()).unwrap().optimum.unwrap();
        let mids = oracle::brute_mids(&g, g.n()).unwrap().optimum.unwrap();
        println!("claw-free instance {round}: n = {}, mds = {mds}, mids = {mids}", g.n());
        assert_eq!(mds, mids);
    }
}
