//! Exact maximum independent set oracle.
//!
//! Branch and bound with a greedy lower bound and degree-based branching,
//! followed by a lexicographic extraction pass so the returned set is the
//! lexicographically least among all maximum independent sets. The solver
//! consumes only the returned set, so the oracle can be swapped for a
//! specialized polynomial algorithm later without touching anything else.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MisError {
    #[error("instance too large for the branch-and-bound oracle: n = {n} > {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
}

/// Strategy marker for the pluggable oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisStrategy {
    ExactBranchAndBound,
}

#[derive(Debug, Clone)]
pub struct MisOracle {
    pub strategy: MisStrategy,
    /// Branch-and-bound guard; inputs beyond this are rejected.
    pub max_vertices: usize,
}

impl Default for MisOracle {
    fn default() -> Self {
        MisOracle {
            strategy: MisStrategy::ExactBranchAndBound,
            max_vertices: 512,
        }
    }
}

impl MisOracle {
    pub fn maximum_independent_set(&self, g: &Graph) -> Result<VertexSet, MisError> {
        if g.n() > self.max_vertices {
            return Err(MisError::InstanceTooLarge {
                n: g.n(),
                limit: self.max_vertices,
            });
        }
        Ok(lex_least_maximum_independent_set(g))
    }
}

/// Maximum independent set with the default oracle configuration.
pub fn maximum_independent_set(g: &Graph) -> Result<VertexSet, MisError> {
    MisOracle::default().maximum_independent_set(g)
}

fn lex_least_maximum_independent_set(g: &Graph) -> VertexSet {
    let mut pool = g.vertex_set();
    let mut need = independent_set_size(g, &pool);
    let mut chosen = VertexSet::new(g.n());
    for v in 0..g.n() {
        if need == 0 {
            break;
        }
        if !pool.contains(v) {
            continue;
        }
        let mut without_nv = pool.clone();
        without_nv.difference_with(&g.closed_neighborhood(v));
        if independent_set_size(g, &without_nv) == need - 1 {
            chosen.insert(v);
            pool = without_nv;
            need -= 1;
        } else {
            // v is in no maximum independent set of the remaining pool.
            pool.remove(v);
        }
    }
    debug_assert!(g.is_independent(&chosen));
    chosen
}

/// Size of a maximum independent set within `pool`.
fn independent_set_size(g: &Graph, pool: &VertexSet) -> usize {
    let mut best = greedy_independent(g, pool);
    branch(g, pool.clone(), 0, &mut best);
    best
}

fn greedy_independent(g: &Graph, pool: &VertexSet) -> usize {
    let mut remaining = pool.clone();
    let mut size = 0;
    while let Some(v) = min_degree_vertex(g, &remaining) {
        size += 1;
        remaining.difference_with(&g.closed_neighborhood(v));
    }
    size
}

fn min_degree_vertex(g: &Graph, pool: &VertexSet) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for v in pool.iter() {
        let d = g.neighbors(v).intersection(pool).len();
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, v));
        }
    }
    best.map(|(_, v)| v)
}

fn branch(g: &Graph, mut pool: VertexSet, mut current: usize, best: &mut usize) {
    loop {
        if current + pool.len() <= *best {
            return;
        }
        // Vertices with at most one neighbor in the pool are always safe
        // to take; loop until only branching candidates remain.
        let mut took_forced = false;
        for v in pool.clone().iter() {
            if !pool.contains(v) {
                continue;
            }
            if g.neighbors(v).intersection(&pool).len() <= 1 {
                current += 1;
                pool.difference_with(&g.closed_neighborhood(v));
                took_forced = true;
            }
        }
        if took_forced {
            if pool.is_empty() {
                *best = (*best).max(current);
                return;
            }
            continue;
        }
        break;
    }
    if pool.is_empty() {
        *best = (*best).max(current);
        return;
    }
    // Branch on a maximum-degree vertex: either it is in the set or not.
    let pivot = max_degree_vertex(g, &pool);
    let mut with = pool.clone();
    with.difference_with(&g.closed_neighborhood(pivot));
    branch(g, with, current + 1, best);
    pool.remove(pivot);
    branch(g, pool, current, best);
}

fn max_degree_vertex(g: &Graph, pool: &VertexSet) -> usize {
    let mut best = (0usize, usize::MAX);
    for v in pool.iter() {
        let d = g.neighbors(v).intersection(pool).len();
        if best.1 == usize::MAX || d > best.0 {
            best = (d, v);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle;
    use crate::rng::SplitMix64;
    use itertools::Itertools;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::build(n, &e).unwrap()
    }

    /// Exhaustive reference: lexicographically least maximum independent
    /// set by scanning all subsets in size-then-lex order.
    fn brute_mis(g: &Graph) -> VertexSet {
        let n = g.n();
        let mut best = VertexSet::new(n);
        for size in (1..=n).rev() {
            for combo in (0..n).combinations(size) {
                let s = VertexSet::from_iter(n, combo);
                if g.is_independent(&s) {
                    best = s;
                    break;
                }
            }
            if !best.is_empty() {
                break;
            }
        }
        best
    }

    /// Brute-force maximum matching size, for the line graph cross-check.
    fn brute_matching(g: &Graph) -> usize {
        fn go(edges: &[(usize, usize)], used: u64, idx: usize) -> usize {
            if idx == edges.len() {
                return 0;
            }
            let skip = go(edges, used, idx + 1);
            let (u, v) = edges[idx];
            if used & (1 << u) == 0 && used & (1 << v) == 0 {
                let take = 1 + go(edges, used | (1 << u) | (1 << v), idx + 1);
                return take.max(skip);
            }
            skip
        }
        go(&g.edges(), 0, 0)
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((5 + i, 5 + (i + 2) % 5));
            e.push((i, 5 + i));
        }
        Graph::build(10, &e).unwrap()
    }

    #[test]
    fn complete_graph_takes_least_vertex() {
        let s = maximum_independent_set(&complete(3)).unwrap();
        assert_eq!(s.to_vec(), vec![0]);
    }

    #[test]
    fn disjoint_edges_take_one_endpoint_each() {
        let g = Graph::build(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let s = maximum_independent_set(&g).unwrap();
        assert_eq!(s.to_vec(), vec![0, 2, 4]);
    }

    #[test]
    fn line_graph_of_petersen() {
        let lg = gen::line_graph(&petersen()).unwrap();
        let s = maximum_independent_set(&lg).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.len(), brute_matching(&petersen()));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = SplitMix64::new(0x315);
        for _ in 0..60 {
            let n = 2 + rng.next_usize(11);
            let g = gen::random_base_graph(&mut rng, n, 0.4);
            let fast = maximum_independent_set(&g).unwrap();
            let slow = brute_mis(&g);
            assert_eq!(fast, slow, "graph {g:?}");
        }
    }

    #[test]
    fn output_is_independent_and_maximal() {
        let mut rng = SplitMix64::new(0xABCD);
        for _ in 0..40 {
            let g = gen::random_claw_free(&mut rng, 16);
            let s = maximum_independent_set(&g).unwrap();
            assert!(g.is_independent(&s));
            // Maximality: every vertex outside has a neighbor inside.
            for v in 0..g.n() {
                if !s.contains(v) {
                    assert!(g.neighbors(v).intersects(&s));
                }
            }
        }
    }

    #[test]
    fn dominating_sets_need_half_the_independence_number() {
        let mut rng = SplitMix64::new(0x7777);
        for _ in 0..25 {
            let g = gen::random_claw_free(&mut rng, 14);
            if g.n() == 0 || g.n() > 14 {
                continue;
            }
            let i = maximum_independent_set(&g).unwrap();
            let mds = oracle::brute_mds(&g, g.n()).unwrap();
            let opt = mds.optimum.unwrap();
            assert!(2 * opt >= i.len(), "graph {g:?}");
        }
    }

    #[test]
    fn size_guard() {
        let oracle = MisOracle {
            strategy: MisStrategy::ExactBranchAndBound,
            max_vertices: 4,
        };
        let g = complete(5);
        assert_eq!(
            oracle.maximum_independent_set(&g),
            Err(MisError::InstanceTooLarge { n: 5, limit: 4 })
        );
    }
}
