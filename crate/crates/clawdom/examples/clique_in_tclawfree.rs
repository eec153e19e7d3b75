//! Clique search in t-claw-free graphs: the Ramsey degree threshold and
//! the neighborhood enumeration, checked against the brute-force oracle.
//!
//! Run with: cargo run --example clique_in_tclawfree

use clawdom::clique::{find_k_clique_tclawfree, ramsey_threshold};
use clawdom::gen;
use clawdom::oracle;

fn main() {
    for (t, k) in [(3, 2), (3, 3), (4, 3), (5, 4)] {
        println!(
            "threshold(t={t}, k={k}) = {}",
            ramsey_threshold(t, k).unwrap()
        );
    }

    for t in [3usize, 4, 5] {
        for seed in 0..3u64 {
            let g = gen::random_tclawfree(14, t, seed).unwrap();
            let omega = oracle::brute_max_clique(&g)
                .unwrap()
                .optimum
                .unwrap();
            print!("t = {t}, seed = {seed}: n = {}, omega = {omega};", g.n());
            for k in 1..=5 {
                match find_k_clique_tclawfree(&g, t, k).unwrap() {
                    Some(w) => {
                        assert!(g.is_clique(&w) && w.len() == k);
                        assert!(omega >= k);
                        print!(" k={k}:{:?}", w.to_vec());
                    }
                    None => {
                        assert!(omega < k);
                        print!(" k={k}:-");
                    }
                }
            }
            println!();
        }
    }
}
