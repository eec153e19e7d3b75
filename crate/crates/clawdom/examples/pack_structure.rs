//! Inspect the pack decomposition of a claw-free graph: the partition of
//! the vertices outside a maximum independent set, the inner/bridge/hub
//! split of 1-packs, and the clusters of the hub graph.
//!
//! Run with: cargo run --example pack_structure

use clawdom::gen;
use clawdom::graph::Graph;
use clawdom::mis;
use clawdom::packs::{cluster_domination_profile, OnePackClassification, PackDecomposition};

fn main() {
    // Three 1-packs of two vertices each, wired into two hub triangles,
    // plus a 2-pack on legs 0 and 3.
    let g = Graph::build(
        11,
        &[
            (0, 4),
            (0, 5),
            (1, 6),
            (1, 7),
            (2, 8),
            (2, 9),
            (0, 10),
            (3, 10),
            (4, 5),
            (6, 7),
            (8, 9),
            (4, 6),
            (4, 8),
            (6, 8),
            (5, 7),
            (5, 9),
            (7, 9),
        ],
    )
    .unwrap();
    assert!(g.is_claw_free());

    let i = mis::maximum_independent_set(&g).unwrap();
    println!("maximum independent set: {:?}", i.to_vec());

    let pd = PackDecomposition::decompose(&g, &i).unwrap();
    print!("{}", pd.dump(&g));

    let cls = OnePackClassification::classify(&g, &pd).unwrap();
    for a in pd.one_pack_legs() {
        println!(
            "1-pack {a}: inner {:?}, hubs {:?}",
            cls.inner(a).unwrap().to_vec(),
            cls.hub(a).unwrap().to_vec()
        );
        for (b, set) in cls.bridges_from(a) {
            println!("  bridge toward {b}: {:?}", set.to_vec());
        }
    }
    for (idx, cluster) in cls.clusters.iter().enumerate() {
        println!("cluster {idx}: {:?}", cluster.to_vec());
    }

    // A hub vertex dominates exactly the rest of its cluster beyond its
    // leg's neighborhood.
    for v in cls.hub(0).unwrap().iter() {
        let profile = cluster_domination_profile(&g, &pd, &cls, v).unwrap();
        println!("hub vertex {v} additionally dominates {:?}", profile.to_vec());
    }

    // The same derivations on a generated instance.
    let mut rng = clawdom::rng::SplitMix64::new(7);
    let random = gen::random_claw_free(&mut rng, 16);
    let i = mis::maximum_independent_set(&random).unwrap();
    let pd = PackDecomposition::decompose(&random, &i).unwrap();
    println!(
        "random instance: n = {}, |I| = {}, {} packs",
        random.n(),
        i.len(),
        pd.pack_count()
    );
}
