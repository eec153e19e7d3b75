//! The reduction chain from red-blue domination through its colourful
//! variant to plain domination on a 4-claw-free graph, with witness
//! lifting back to the bipartite side.
//!
//! Run with: cargo run --example hardness_reduction

use clawdom::graph::Graph;
use clawdom::oracle;
use clawdom::reductions::{
    crbds_to_ds_4clawfree, lift_ds_solution, rbds_to_crbds, RbdsToCrbds, RedBlueInstance,
};

fn main() {
    // Reds 0..3, blues 3..6, budget 2.
    let graph = Graph::build(6, &[(0, 3), (0, 4), (1, 4), (1, 5), (2, 5)]).unwrap();
    let source = RedBlueInstance::new(graph, 3, 2, None).unwrap();
    let direct = oracle::brute_rbds(&source, source.k).unwrap();
    println!(
        "source: |R| = {}, |B| = {}, k = {}, feasible = {}",
        source.n_red(),
        source.n_blue(),
        source.k,
        direct.feasible
    );

    let colourful = match rbds_to_crbds(&source) {
        RbdsToCrbds::Reduced(inst) => inst,
        RbdsToCrbds::TrivialAnswer(ans) => {
            println!("trivially {} (shortcut)", if ans { "YES" } else { "NO" });
            return;
        }
    };
    println!(
        "colourful copy blow-up: |R'| = {}, edges = {}",
        colourful.n_red(),
        colourful.graph.edge_count()
    );

    let reduced = crbds_to_ds_4clawfree(&colourful).unwrap();
    println!(
        "domination gadget: n = {}, k = {}, 4-claw-free = {}",
        reduced.graph.n(),
        reduced.k,
        reduced.graph.find_induced_star(4).is_none()
    );
    assert!(reduced.neighborhoods_split_into_cliques());

    let answer = oracle::brute_mds(&reduced.graph, reduced.k).unwrap();
    println!("reduced instance feasible at k = {}: {}", reduced.k, answer.feasible);
    assert_eq!(answer.feasible, direct.feasible);

    if let Some(witness) = answer.witness {
        println!("reduced witness: {:?}", witness.to_vec());
        assert!(reduced.graph.is_clique(&witness), "witness induces a clique");
        let lifted = lift_ds_solution(&reduced, &colourful, &witness).unwrap();
        println!("lifted colourful witness: {:?}", lifted.to_vec());
        assert!(colourful.graph.dominates(&lifted, &colourful.blues));
    }
}
