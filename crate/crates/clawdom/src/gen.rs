//! Seeded instance generators.
//!
//! Three claw-free families (line graphs, complements of triangle-free
//! graphs, unit interval graphs) plus a t-claw-free family built from
//! glued cliques. Every generator is a deterministic function of its
//! parameters and a 64-bit seed through the project RNG, so fixtures are
//! reproducible byte for byte.

use crate::graph::Graph;
use crate::rng::SplitMix64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("line graph needs at least one edge in the base graph")]
    NoEdges,
    #[error("base graph has a triangle ({0}, {1}, {2})")]
    HasTriangle(usize, usize, usize),
    #[error("generation failed after {0} retries")]
    GenerationFailed(usize),
}

/// Line graph of `h`: one vertex per edge of `h` (in ascending `(min, max)`
/// order), adjacent iff the edges share an endpoint. Line graphs are
/// claw-free: three edges meeting a common edge pairwise-disjointly would
/// need three distinct endpoints on that edge.
pub fn line_graph(h: &Graph) -> Result<Graph, GenError> {
    let base_edges = h.edges();
    if base_edges.is_empty() {
        return Err(GenError::NoEdges);
    }
    let mut edges = Vec::new();
    for (i, &(a, b)) in base_edges.iter().enumerate() {
        for (j, &(c, d)) in base_edges.iter().enumerate().skip(i + 1) {
            if a == c || a == d || b == c || b == d {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::build(base_edges.len(), &edges).expect("line graph construction");
    debug_assert!(g.is_claw_free());
    Ok(g)
}

/// Complement of a triangle-free graph. An induced claw in the complement
/// would be a triangle among the leaves in `h`, so the output is claw-free.
pub fn complement_of_triangle_free(h: &Graph) -> Result<Graph, GenError> {
    if let Some((a, b, c)) = h.find_triangle() {
        return Err(GenError::HasTriangle(a, b, c));
    }
    let g = h.complement();
    debug_assert!(g.is_claw_free());
    Ok(g)
}

/// Random unit interval graph: `n` unit-length intervals with left
/// endpoints uniform in `[0, 1)`, scaled so `density` close to 1 gives a
/// complete graph and close to 0 an edgeless one. Unit interval graphs are
/// claw-free.
pub fn random_unit_interval(n: usize, density: f64, seed: u64) -> Graph {
    assert!(n >= 1);
    assert!((0.0..=1.0).contains(&density));
    let mut rng = SplitMix64::new(seed);
    let points: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).abs() < density {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::build(n, &edges).expect("interval construction");
    debug_assert!(g.is_claw_free());
    g
}

const TCLAW_RETRIES: usize = 1000;

/// Random t-claw-free graph built from random cliques glued on shared
/// vertices, with each vertex in at most `t - 1` cliques so every
/// neighborhood is a union of at most `t - 1` cliques. The output is
/// re-verified with the induced-star detector and resampled on failure.
pub fn random_tclawfree(n: usize, t: usize, seed: u64) -> Result<Graph, GenError> {
    assert!(t >= 3, "star order must be at least 3");
    assert!(n >= 1);
    let mut rng = SplitMix64::new(seed);
    for _ in 0..TCLAW_RETRIES {
        let g = sample_glued_cliques(n, t, &mut rng);
        if g.find_induced_star(t).is_none() {
            return Ok(g);
        }
    }
    Err(GenError::GenerationFailed(TCLAW_RETRIES))
}

fn sample_glued_cliques(n: usize, t: usize, rng: &mut SplitMix64) -> Graph {
    let mut capacity = vec![t - 1; n];
    let mut edges = Vec::new();
    let clique_count = 1 + n / 2 + rng.next_usize(n.max(1));
    for _ in 0..clique_count {
        let want = 2 + rng.next_usize(3);
        let mut open: Vec<usize> = (0..n).filter(|&v| capacity[v] > 0).collect();
        if open.len() < 2 {
            break;
        }
        rng.shuffle(&mut open);
        let members = &open[..want.min(open.len())];
        for (i, &u) in members.iter().enumerate() {
            capacity[u] -= 1;
            for &v in &members[i + 1..] {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    Graph::build(n, &edges).expect("clique gluing construction")
}

/// Samples one graph from the mixed claw-free corpus (line graphs,
/// complements of bipartite graphs, unit interval graphs) with at most
/// `max_n` vertices. Used by test sweeps and the bench command.
pub fn random_claw_free(rng: &mut SplitMix64, max_n: usize) -> Graph {
    debug_assert!(max_n >= 4);
    match rng.next_usize(3) {
        0 => {
            // Line graph of a random base graph with at most max_n edges.
            for _ in 0..50 {
                let base_n = 3 + rng.next_usize(6);
                let p = 0.25 + 0.5 * rng.next_f64();
                let base = random_base_graph(rng, base_n, p);
                let m = base.edge_count();
                if m >= 1 && m <= max_n {
                    return line_graph(&base).expect("base has edges");
                }
            }
            let path = Graph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
            line_graph(&path).unwrap()
        }
        1 => {
            // Complement of a random bipartite (hence triangle-free) graph.
            let n = 4 + rng.next_usize(max_n.min(14) - 3);
            let split = 1 + rng.next_usize(n - 1);
            let p = rng.next_f64();
            let mut edges = Vec::new();
            for u in 0..split {
                for v in split..n {
                    if rng.next_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            let bipartite = Graph::build(n, &edges).unwrap();
            complement_of_triangle_free(&bipartite).expect("bipartite graphs are triangle-free")
        }
        _ => {
            let n = 4 + rng.next_usize(max_n - 3);
            let density = rng.next_f64();
            random_unit_interval(n, density, rng.next_u64())
        }
    }
}

/// Erdos-Renyi style base graph used to seed line graphs.
pub fn random_base_graph(rng: &mut SplitMix64, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::build(n, &edges).expect("random base construction")
}
