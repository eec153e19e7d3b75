//! Immutable undirected graphs over dense vertex ids `0..n`.
//!
//! A graph is frozen after construction; all algorithm state elsewhere in
//! the crate lives in [`VertexSet`] values over a fixed graph. Induced
//! subgraphs renumber vertices to `0..|S|` and carry a label table mapping
//! each new id back to the id it had in the graph the chain started from,
//! so certificates can always be reported in original ids.

use crate::bitset::VertexSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint {vertex} out of range (n = {n})")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
}

#[derive(Clone)]
pub struct Graph {
    adjacency: Vec<VertexSet>,
    /// `labels[v]` is the id `v` had in the graph this one was induced from.
    /// `None` means ids are original.
    labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges may repeat and appear in
    /// either orientation; the adjacency is deduplicated and symmetric.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut adjacency = vec![VertexSet::new(n); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::EndpointOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::EndpointOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(Graph {
            adjacency,
            labels: None,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for v in self.adjacency[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adjacency[v]
    }

    pub fn closed_neighborhood(&self, v: usize) -> VertexSet {
        let mut s = self.adjacency[v].clone();
        s.insert(v);
        s
    }

    /// Closed neighborhood of a set: the set itself plus all neighbors.
    pub fn closed_neighborhood_of_set(&self, xs: &VertexSet) -> VertexSet {
        let mut acc = xs.clone();
        for v in xs.iter() {
            acc.union_with(&self.adjacency[v]);
        }
        acc
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    /// The id vertex `v` maps back to in the original graph.
    pub fn label(&self, v: usize) -> usize {
        match &self.labels {
            Some(l) => l[v],
            None => v,
        }
    }

    pub fn labels_of(&self, s: &VertexSet) -> Vec<usize> {
        let mut out: Vec<usize> = s.iter().map(|v| self.label(v)).collect();
        out.sort_unstable();
        out
    }

    /// True iff the members of `s` are pairwise adjacent. Empty sets and
    /// singletons are cliques vacuously.
    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let members: Vec<usize> = s.iter().collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff the members of `s` are pairwise nonadjacent.
    pub fn is_independent(&self, s: &VertexSet) -> bool {
        for u in s.iter() {
            if self.adjacency[u].intersects(s) {
                return false;
            }
        }
        true
    }

    /// True iff every vertex of `target` lies in the closed neighborhood of
    /// `dominators`, i.e. each target vertex outside the set has a neighbor
    /// inside it.
    pub fn dominates(&self, dominators: &VertexSet, target: &VertexSet) -> bool {
        target.is_subset_of(&self.closed_neighborhood_of_set(dominators))
    }

    /// Induced subgraph on `s`, with vertices renumbered to `0..|s|` in
    /// ascending original order and labels composed through this graph.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Graph {
        let members: Vec<usize> = s.iter().collect();
        let mut index = vec![usize::MAX; self.n()];
        for (new, &old) in members.iter().enumerate() {
            index[old] = new;
        }
        let mut adjacency = vec![VertexSet::new(members.len()); members.len()];
        for (new, &old) in members.iter().enumerate() {
            for w in self.adjacency[old].intersection(s).iter() {
                adjacency[new].insert(index[w]);
            }
        }
        let labels = members.iter().map(|&old| self.label(old)).collect();
        Graph {
            adjacency,
            labels: Some(labels),
        }
    }

    /// Complement graph on the same vertices (labels dropped).
    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut adjacency = Vec::with_capacity(n);
        for v in 0..n {
            let mut row = self.adjacency[v].complement();
            row.remove(v);
            adjacency.push(row);
        }
        Graph {
            adjacency,
            labels: None,
        }
    }

    /// First triangle in lexicographic order, if any.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        for u in 0..self.n() {
            for v in self.adjacency[u].iter() {
                if v <= u {
                    continue;
                }
                let common = self.adjacency[u].intersection(&self.adjacency[v]);
                for w in common.iter() {
                    if w > v {
                        return Some((u, v, w));
                    }
                }
            }
        }
        None
    }

    /// Finds an induced star `K_{1,t}`: a center together with `t` pairwise
    /// nonadjacent neighbors. Deterministic: lowest center first, then the
    /// lexicographically least leaf set for that center. Returns `None` when
    /// the graph has no induced `K_{1,t}`.
    pub fn find_induced_star(&self, t: usize) -> Option<(usize, VertexSet)> {
        assert!(t >= 1, "star order must be at least 1");
        for center in 0..self.n() {
            if self.degree(center) < t {
                continue;
            }
            let nbrs: Vec<usize> = self.adjacency[center].iter().collect();
            let mut chosen = Vec::new();
            if self.grow_independent_leaves(&nbrs, 0, t, &mut chosen) {
                return Some((center, VertexSet::from_iter(self.n(), chosen)));
            }
        }
        None
    }

    /// Depth-first search for an independent `t`-subset of `nbrs[from..]`,
    /// extending ascending so the first hit is lexicographically least.
    fn grow_independent_leaves(
        &self,
        nbrs: &[usize],
        from: usize,
        t: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == t {
            return true;
        }
        // Not enough candidates left to reach t.
        if nbrs.len() - from < t - chosen.len() {
            return false;
        }
        for i in from..nbrs.len() {
            let cand = nbrs[i];
            if chosen.iter().any(|&c| self.has_edge(c, cand)) {
                continue;
            }
            chosen.push(cand);
            if self.grow_independent_leaves(nbrs, i + 1, t, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// Convenience claw check: an induced `K_{1,3}` witness, if one exists.
    pub fn find_claw(&self) -> Option<(usize, VertexSet)> {
        self.find_induced_star(3)
    }

    pub fn is_claw_free(&self) -> bool {
        self.find_claw().is_none()
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::build(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        Graph::build(n, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn build_triangle() {
        let g = Graph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn build_dedups_reversed_edges() {
        let g = Graph::build(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_rejects_self_loop_and_bad_endpoint() {
        assert!(matches!(
            Graph::build(1, &[(0, 0)]),
            Err(GraphError::SelfLoop { vertex: 0 })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 5)]),
            Err(GraphError::EndpointOutOfRange { vertex: 5, n: 2 })
        ));
    }

    #[test]
    fn star_detection_on_claw() {
        let g = Graph::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (center, leaves) = g.find_induced_star(3).unwrap();
        assert_eq!(center, 0);
        assert_eq!(leaves.to_vec(), vec![1, 2, 3]);
        assert!(!g.is_claw_free());
    }

    #[test]
    fn star_detection_on_triangle() {
        assert_eq!(complete(3).find_induced_star(3), None);
    }

    /// Exhaustive reference for induced-star existence.
    fn star_by_enumeration(g: &Graph, t: usize) -> Option<(usize, Vec<usize>)> {
        use itertools::Itertools;
        for c in 0..g.n() {
            let nbrs: Vec<usize> = g.neighbors(c).iter().collect();
            for combo in nbrs.iter().copied().combinations(t) {
                let s = VertexSet::from_iter(g.n(), combo.clone());
                if g.is_independent(&s) {
                    return Some((c, combo));
                }
            }
        }
        None
    }

    #[test]
    fn star_detection_on_p4_matches_enumeration() {
        let g = path(4);
        assert_eq!(g.find_induced_star(3), None);
        assert_eq!(star_by_enumeration(&g, 3), None);
        let (center, leaves) = g.find_induced_star(2).unwrap();
        let (ec, el) = star_by_enumeration(&g, 2).unwrap();
        assert_eq!((center, leaves.to_vec()), (ec, el));
        assert_eq!((center, leaves.to_vec()), (1, vec![0, 2]));
    }

    #[test]
    fn clique_and_independent() {
        let g = complete(3);
        let all = g.vertex_set();
        assert!(g.is_clique(&all));
        assert!(!g.is_independent(&all));
        assert!(g.is_clique(&VertexSet::new(3)));
        assert!(g.is_independent(&VertexSet::new(3)));
        let single = VertexSet::from_iter(3, [1]);
        assert!(g.is_clique(&single) && g.is_independent(&single));

        let c5 = cycle(5);
        let s = VertexSet::from_iter(5, [0, 2]);
        assert!(!c5.is_clique(&s));
        assert!(c5.is_independent(&s));
    }

    #[test]
    fn domination_examples() {
        let star = Graph::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(star.dominates(&VertexSet::from_iter(4, [0]), &star.vertex_set()));

        let p4 = path(4);
        let d = VertexSet::from_iter(4, [1]);
        assert!(!p4.dominates(&d, &p4.vertex_set()));
        // Direct closed-neighborhood computation: N[1] = {0,1,2}, misses 3.
        assert_eq!(p4.closed_neighborhood_of_set(&d).to_vec(), vec![0, 1, 2]);

        let empty = VertexSet::new(4);
        assert!(p4.dominates(&empty, &empty));
    }

    #[test]
    fn induced_subgraph_examples() {
        let g = complete(3);
        let sub = g.induced_subgraph(&VertexSet::from_iter(3, [0, 1]));
        assert_eq!(sub.n(), 2);
        assert_eq!(sub.edges(), vec![(0, 1)]);

        let all = g.induced_subgraph(&g.vertex_set());
        assert_eq!(all.edges(), g.edges());
        assert_eq!((0..3).map(|v| all.label(v)).collect::<Vec<_>>(), vec![0, 1, 2]);

        let c5 = cycle(5);
        let sub = c5.induced_subgraph(&VertexSet::from_iter(5, [1, 2, 3]));
        assert_eq!(sub.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(sub.label(0), 1);

        // Labels compose through nested induction.
        let deeper = sub.induced_subgraph(&VertexSet::from_iter(3, [1, 2]));
        assert_eq!(deeper.label(0), 2);
        assert_eq!(deeper.label(1), 3);
    }

    /// Deterministic edge sampler used by small structural sweeps in tests.
    fn random_graph(n: usize, seed: u64, keep_mod: u64) -> Graph {
        let mut state = seed;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (state >> 33) % 10 < keep_mod {
                    edges.push((u, v));
                }
            }
        }
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn clique_complement_duality() {
        for seed in 0..40u64 {
            let g = random_graph(9, seed, 4);
            let comp = g.complement();
            let mut state = seed.wrapping_add(99);
            let mut s = VertexSet::new(9);
            for v in 0..9 {
                state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                if state % 3 == 0 {
                    s.insert(v);
                }
            }
            assert_eq!(comp.is_clique(&s), g.is_independent(&s));
        }
    }

    #[test]
    fn claw_free_iff_neighborhood_complements_triangle_free() {
        for seed in 0..60u64 {
            let g = random_graph(10, seed, 5);
            let claw_free = g.find_induced_star(3).is_none();
            let by_triangles = (0..g.n()).all(|v| {
                g.induced_subgraph(g.neighbors(v))
                    .complement()
                    .find_triangle()
                    .is_none()
            });
            assert_eq!(claw_free, by_triangles, "seed {seed}");
        }
    }

    #[test]
    fn dominates_iff_closed_neighborhood_covers() {
        for seed in 0..30u64 {
            let g = random_graph(8, seed, 3);
            let d = VertexSet::from_iter(8, (0..8).filter(|v| (seed >> v) & 1 == 1));
            let covered = g.closed_neighborhood_of_set(&d);
            assert_eq!(g.dominates(&d, &g.vertex_set()), covered == g.vertex_set());
        }
    }
}
