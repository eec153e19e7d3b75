//! Hardness reduction gadgets: red-blue domination to its colourful
//! variant, and the colourful variant to plain domination on 4-claw-free
//! graphs, with witness lifting back to the bipartite side.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("edge ({u}, {v}) does not cross the red/blue bipartition")]
    NotBipartite { u: usize, v: usize },
    #[error("colour {colour} for red {red} out of range 1..={k}")]
    ColourOutOfRange { red: usize, colour: usize, k: usize },
    #[error("red vertex {red} has no colour")]
    MissingColour { red: usize },
    #[error("witness lift failed: {0}")]
    LiftFailed(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}

/// A red-blue domination instance: a bipartite graph whose reds occupy ids
/// `0..n_red` and blues the rest, a budget `k`, and (for the colourful
/// variant) a colour per red vertex in `1..=k`.
#[derive(Debug, Clone)]
pub struct RedBlueInstance {
    pub graph: Graph,
    pub reds: VertexSet,
    pub blues: VertexSet,
    pub k: usize,
    pub colors: Option<BTreeMap<usize, usize>>,
}

impl RedBlueInstance {
    pub fn new(
        graph: Graph,
        n_red: usize,
        k: usize,
        colors: Option<BTreeMap<usize, usize>>,
    ) -> Result<Self, ReduceError> {
        let n = graph.n();
        assert!(n_red <= n, "red count exceeds vertex count");
        let reds = VertexSet::from_iter(n, 0..n_red);
        let blues = VertexSet::from_iter(n, n_red..n);
        for (u, v) in graph.edges() {
            if (u < n_red) == (v < n_red) {
                return Err(ReduceError::NotBipartite { u, v });
            }
        }
        if let Some(colors) = &colors {
            for (&r, &c) in colors {
                if r >= n_red {
                    return Err(ReduceError::LiftFailed(format!(
                        "colour assigned to non-red vertex {r}"
                    )));
                }
                if c == 0 || c > k {
                    return Err(ReduceError::ColourOutOfRange {
                        red: r,
                        colour: c,
                        k,
                    });
                }
            }
        }
        Ok(RedBlueInstance {
            graph,
            reds,
            blues,
            k,
            colors,
        })
    }

    pub fn n_red(&self) -> usize {
        self.reds.len()
    }

    pub fn n_blue(&self) -> usize {
        self.blues.len()
    }

    /// True iff some blue vertex has no red neighbor, i.e. no red set of any
    /// size dominates all blues.
    pub fn has_isolated_blue(&self) -> bool {
        self.blues.iter().any(|b| self.graph.degree(b) == 0)
    }
}

/// Outcome of the red-blue to colourful red-blue reduction. Instances with
/// fewer reds than the budget are answered on the spot instead of padded.
#[derive(Debug)]
pub enum RbdsToCrbds {
    Reduced(RedBlueInstance),
    /// `true` means the source instance is a YES instance.
    TrivialAnswer(bool),
}

/// Blows the red side up into `k` colour-coded copies. A red set of size
/// `k` hitting every colour in the output corresponds to a red dominating
/// set of size at most `k` in the input and vice versa.
pub fn rbds_to_crbds(inst: &RedBlueInstance) -> RbdsToCrbds {
    let n_red = inst.n_red();
    let n_blue = inst.n_blue();
    let k = inst.k;
    if n_red < k {
        return RbdsToCrbds::TrivialAnswer(!inst.has_isolated_blue());
    }
    let new_n = k * n_red + n_blue;
    let mut edges = Vec::with_capacity(k * inst.graph.edge_count());
    for (r, b) in inst.graph.edges() {
        let blue = k * n_red + (b - n_red);
        for copy in 0..k {
            edges.push((copy * n_red + r, blue));
        }
    }
    let graph = Graph::build(new_n, &edges).expect("copy construction is well formed");
    let mut colors = BTreeMap::new();
    for copy in 0..k {
        for r in 0..n_red {
            colors.insert(copy * n_red + r, copy + 1);
        }
    }
    let reduced = RedBlueInstance::new(graph, k * n_red, k, Some(colors))
        .expect("copy construction is bipartite");
    RbdsToCrbds::Reduced(reduced)
}

/// Where a vertex of the reduced domination graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedRole {
    /// Original blue id (instance numbering).
    Blue(usize),
    /// Original red id (instance numbering).
    Red(usize),
    /// Apex for colour class `c` (1-based).
    Apex(usize),
}

/// Explicit id tables between the colourful instance and the reduced
/// domination graph. Layout is frozen: blues first, then reds, then one
/// apex per colour in colour order.
#[derive(Debug, Clone)]
pub struct ReductionCertificate {
    pub red_to_reduced: Vec<usize>,
    pub blue_to_reduced: Vec<usize>,
    pub backward: Vec<ReducedRole>,
    /// Reduced ids of each colour class, index `c - 1`.
    pub color_classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct DsReduction {
    pub graph: Graph,
    pub k: usize,
    pub certificate: ReductionCertificate,
}

/// Builds the 4-claw-free domination instance: both sides become cliques
/// and each colour class gets a private apex vertex. Every neighborhood in
/// the output is a union of at most three vertex-disjoint cliques, which is
/// re-verified before returning.
pub fn crbds_to_ds_4clawfree(inst: &RedBlueInstance) -> Result<DsReduction, ReduceError> {
    let n_red = inst.n_red();
    let n_blue = inst.n_blue();
    let k = inst.k;
    let colors = inst.colors.as_ref();
    let mut class_of = vec![0usize; n_red];
    for r in 0..n_red {
        match colors.and_then(|c| c.get(&r)) {
            Some(&c) => class_of[r] = c,
            None => return Err(ReduceError::MissingColour { red: r }),
        }
    }

    let blue_to_reduced: Vec<usize> = (0..n_blue).collect();
    let red_to_reduced: Vec<usize> = (0..n_red).map(|r| n_blue + r).collect();
    let apex = |c: usize| n_blue + n_red + (c - 1);
    let n = n_blue + n_red + k;

    let mut edges = Vec::new();
    for (r, b) in inst.graph.edges() {
        edges.push((red_to_reduced[r], blue_to_reduced[b - n_red]));
    }
    for u in 0..n_blue {
        for v in u + 1..n_blue {
            edges.push((u, v));
        }
    }
    for u in 0..n_red {
        for v in u + 1..n_red {
            edges.push((red_to_reduced[u], red_to_reduced[v]));
        }
    }
    let mut color_classes = vec![Vec::new(); k];
    for r in 0..n_red {
        let c = class_of[r];
        edges.push((apex(c), red_to_reduced[r]));
        color_classes[c - 1].push(red_to_reduced[r]);
    }
    let graph = Graph::build(n, &edges).expect("gadget construction is well formed");

    let mut backward = Vec::with_capacity(n);
    backward.extend((0..n_blue).map(|b| ReducedRole::Blue(n_red + b)));
    backward.extend((0..n_red).map(ReducedRole::Red));
    backward.extend((1..=k).map(ReducedRole::Apex));

    if let Some((center, leaves)) = graph.find_induced_star(4) {
        return Err(ReduceError::InternalContradiction(format!(
            "reduced graph contains a 4-claw at {center} with leaves {leaves:?}"
        )));
    }

    Ok(DsReduction {
        graph,
        k,
        certificate: ReductionCertificate {
            red_to_reduced,
            blue_to_reduced,
            backward,
            color_classes,
        },
    })
}

impl DsReduction {
    /// Direct form of the structural guarantee: each vertex's neighborhood
    /// splits into at most three vertex-disjoint cliques (its blue part,
    /// red part, and apex part).
    pub fn neighborhoods_split_into_cliques(&self) -> bool {
        let n = self.graph.n();
        let n_blue = self.certificate.blue_to_reduced.len();
        let n_red = self.certificate.red_to_reduced.len();
        let blues = VertexSet::from_iter(n, 0..n_blue);
        let reds = VertexSet::from_iter(n, n_blue..n_blue + n_red);
        let apexes = VertexSet::from_iter(n, n_blue + n_red..n);
        (0..n).all(|v| {
            let nbrs = self.graph.neighbors(v);
            self.graph.is_clique(&nbrs.intersection(&blues))
                && self.graph.is_clique(&nbrs.intersection(&reds))
                && self.graph.is_clique(&nbrs.intersection(&apexes))
        })
    }
}

/// Maps a size-`k` dominating set of the reduced graph back to a colourful
/// red-blue dominating set of the source instance. Apex vertices are
/// swapped for the least-id member of their colour class. The lifted set is
/// verified (size `k`, pairwise distinct colours, dominates all blues)
/// before it is returned.
pub fn lift_ds_solution(
    reduction: &DsReduction,
    source: &RedBlueInstance,
    solution: &VertexSet,
) -> Result<VertexSet, ReduceError> {
    let g = &reduction.graph;
    if solution.len() != reduction.k {
        return Err(ReduceError::LiftFailed(format!(
            "expected a solution of size {}, got {}",
            reduction.k,
            solution.len()
        )));
    }
    if !g.dominates(solution, &g.vertex_set()) {
        return Err(ReduceError::LiftFailed(
            "input set does not dominate the reduced graph".into(),
        ));
    }
    let mut lifted = VertexSet::new(source.graph.n());
    for v in solution.iter() {
        match reduction.certificate.backward[v] {
            ReducedRole::Red(r) => lifted.insert(r),
            ReducedRole::Apex(c) => {
                let class = &reduction.certificate.color_classes[c - 1];
                let least = class.first().ok_or_else(|| {
                    ReduceError::LiftFailed(format!("colour class {c} is empty"))
                })?;
                match reduction.certificate.backward[*least] {
                    ReducedRole::Red(r) => lifted.insert(r),
                    _ => unreachable!("colour classes contain reds only"),
                }
            }
            ReducedRole::Blue(b) => {
                return Err(ReduceError::LiftFailed(format!(
                    "solution contains blue vertex {b}"
                )))
            }
        }
    }
    // Verify: k distinctly coloured reds dominating every blue.
    if lifted.len() != reduction.k {
        return Err(ReduceError::LiftFailed(
            "lifted set collapsed below size k".into(),
        ));
    }
    if let Some(colors) = &source.colors {
        let mut seen = std::collections::BTreeSet::new();
        for r in lifted.iter() {
            let c = colors
                .get(&r)
                .ok_or_else(|| ReduceError::LiftFailed(format!("red {r} has no colour")))?;
            if !seen.insert(*c) {
                return Err(ReduceError::LiftFailed(format!("colour {c} repeated")));
            }
        }
    }
    if !source.graph.dominates(&lifted, &source.blues) {
        return Err(ReduceError::LiftFailed(
            "lifted set does not dominate the blue side".into(),
        ));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng::SplitMix64;

    fn instance(
        n_red: usize,
        n_blue: usize,
        edges: &[(usize, usize)],
        k: usize,
    ) -> RedBlueInstance {
        let graph = Graph::build(n_red + n_blue, edges).unwrap();
        RedBlueInstance::new(graph, n_red, k, None).unwrap()
    }

    pub(crate) fn random_instance(rng: &mut SplitMix64, max_side: usize, max_k: usize) -> RedBlueInstance {
        let n_red = 1 + rng.next_usize(max_side);
        let n_blue = 1 + rng.next_usize(max_side);
        let k = 1 + rng.next_usize(max_k);
        let mut edges = Vec::new();
        for r in 0..n_red {
            for b in 0..n_blue {
                if rng.next_bool(0.45) {
                    edges.push((r, n_red + b));
                }
            }
        }
        instance(n_red, n_blue, &edges, k)
    }

    #[test]
    fn copy_arithmetic() {
        let inst = instance(2, 1, &[(0, 2), (1, 2)], 2);
        match rbds_to_crbds(&inst) {
            RbdsToCrbds::Reduced(red) => {
                assert_eq!(red.n_red(), 4);
                assert_eq!(red.n_blue(), 1);
                assert_eq!(red.graph.edge_count(), 4);
                let colors = red.colors.as_ref().unwrap();
                assert_eq!(colors[&0], 1);
                assert_eq!(colors[&2], 2);
            }
            RbdsToCrbds::TrivialAnswer(_) => panic!("should reduce"),
        }
    }

    #[test]
    fn k_equal_one_is_identity_up_to_colors() {
        let inst = instance(2, 2, &[(0, 2), (1, 3)], 1);
        match rbds_to_crbds(&inst) {
            RbdsToCrbds::Reduced(red) => {
                assert_eq!(red.graph.edges(), inst.graph.edges());
                assert!(red.colors.as_ref().unwrap().values().all(|&c| c == 1));
            }
            RbdsToCrbds::TrivialAnswer(_) => panic!("should reduce"),
        }
    }

    #[test]
    fn small_red_side_shortcut() {
        let inst = instance(1, 2, &[(0, 1), (0, 2)], 3);
        match rbds_to_crbds(&inst) {
            RbdsToCrbds::TrivialAnswer(ans) => assert!(ans),
            RbdsToCrbds::Reduced(_) => panic!("should shortcut"),
        }
        let isolated = instance(1, 2, &[(0, 1)], 3);
        match rbds_to_crbds(&isolated) {
            RbdsToCrbds::TrivialAnswer(ans) => assert!(!ans),
            RbdsToCrbds::Reduced(_) => panic!("should shortcut"),
        }
    }

    #[test]
    fn gadget_shape() {
        // |R| = 3, |B| = 2, k = 2: n = 7 and each apex degree equals its
        // class size.
        let graph = Graph::build(5, &[(0, 3), (1, 4), (2, 4)]).unwrap();
        let colors = [(0, 1), (1, 1), (2, 2)].into_iter().collect();
        let inst = RedBlueInstance::new(graph, 3, 2, Some(colors)).unwrap();
        let red = crbds_to_ds_4clawfree(&inst).unwrap();
        assert_eq!(red.graph.n(), 7);
        let apex1 = 5;
        let apex2 = 6;
        assert_eq!(red.graph.degree(apex1), 2);
        assert_eq!(red.graph.degree(apex2), 1);
        assert!(red.graph.find_induced_star(4).is_none());
        assert!(red.neighborhoods_split_into_cliques());
    }

    #[test]
    fn missing_colour_rejected() {
        let graph = Graph::build(2, &[(0, 1)]).unwrap();
        let inst = RedBlueInstance::new(graph, 1, 1, None).unwrap();
        assert!(matches!(
            crbds_to_ds_4clawfree(&inst),
            Err(ReduceError::MissingColour { red: 0 })
        ));
    }

    #[test]
    fn reduced_outputs_are_4_claw_free_and_split() {
        let mut rng = SplitMix64::new(0xC1A0);
        for _ in 0..60 {
            let inst = random_instance(&mut rng, 6, 3);
            if let RbdsToCrbds::Reduced(crbds) = rbds_to_crbds(&inst) {
                let red = crbds_to_ds_4clawfree(&crbds).unwrap();
                assert!(red.graph.find_induced_star(4).is_none());
                assert!(red.neighborhoods_split_into_cliques());
            }
        }
    }

    #[test]
    fn lift_replaces_apexes_and_verifies() {
        let mut rng = SplitMix64::new(0x11F7);
        let mut lifted_count = 0;
        for _ in 0..80 {
            let inst = random_instance(&mut rng, 5, 2);
            let crbds = match rbds_to_crbds(&inst) {
                RbdsToCrbds::Reduced(c) => c,
                RbdsToCrbds::TrivialAnswer(_) => continue,
            };
            let red = crbds_to_ds_4clawfree(&crbds).unwrap();
            if red.graph.n() > 16 {
                continue;
            }
            let answer = oracle::brute_mds(&red.graph, red.k).unwrap();
            if let Some(witness) = answer.witness {
                if witness.len() != red.k {
                    continue;
                }
                let lifted = lift_ds_solution(&red, &crbds, &witness).unwrap();
                assert_eq!(lifted.len(), red.k);
                assert!(crbds.graph.dominates(&lifted, &crbds.blues));
                lifted_count += 1;
            }
        }
        assert!(lifted_count > 3, "sweep never exercised the lift");
    }

    #[test]
    fn lift_keeps_red_solutions_unchanged() {
        let graph = Graph::build(3, &[(0, 2), (1, 2)]).unwrap();
        let colors = [(0, 1), (1, 2)].into_iter().collect();
        let inst = RedBlueInstance::new(graph, 2, 2, Some(colors)).unwrap();
        let red = crbds_to_ds_4clawfree(&inst).unwrap();
        // Reduced layout: blue 0, reds 1..=2, apexes 3..=4.
        let d = VertexSet::from_iter(red.graph.n(), [1, 2]);
        assert!(red.graph.dominates(&d, &red.graph.vertex_set()));
        let lifted = lift_ds_solution(&red, &inst, &d).unwrap();
        assert_eq!(lifted.to_vec(), vec![0, 1]);

        // A solution through an apex swaps in the least member of the class.
        let via_apex = VertexSet::from_iter(red.graph.n(), [2, 3]);
        if red.graph.dominates(&via_apex, &red.graph.vertex_set()) {
            let lifted = lift_ds_solution(&red, &inst, &via_apex).unwrap();
            assert_eq!(lifted.to_vec(), vec![0, 1]);
        }
    }
}
