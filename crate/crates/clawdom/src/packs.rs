//! Pack decomposition of the vertices outside a maximum independent set,
//! the inner/bridge/hub split of 1-packs, and cluster computation.
//!
//! Every vertex outside a maximal independent set `I` of a claw-free graph
//! sees one or two members of `I`; the packs are the classes of that map.
//! A 1-pack vertex is `inner` if it sees no other 1-pack, a `bridge`
//! toward `b` if it sees exactly one other 1-pack `V_b`, and a `hub` if it
//! sees at least two. Clusters are the connected components of the graph on
//! hub vertices using only edges between different 1-packs; each cluster
//! induces a clique.
//!
//! The derivations here double as claw-freeness verifiers: when a
//! structural property fails the input was not claw-free, and the error
//! carries an induced claw as the witness.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackError {
    #[error("vertex {vertex} has no neighbor in the independent set; the set is not maximal")]
    NotMaximal { vertex: usize },
    #[error("vertex {center} sees three independent-set vertices {leaves:?}: induced claw")]
    ClawWitness { center: usize, leaves: VertexSet },
    #[error("pack structure violated ({message}); witness claw {claw:?}")]
    StructureViolation {
        message: String,
        claw: Option<(usize, VertexSet)>,
    },
}

fn structure_violation(g: &Graph, message: impl Into<String>) -> PackError {
    PackError::StructureViolation {
        message: message.into(),
        claw: g.find_claw(),
    }
}

/// Identity of a pack: a 1-pack by its leg, or a 2-pack by its ordered leg
/// pair. The derived order (all 1-packs by leg, then 2-packs by pair) is
/// the canonical iteration order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PackKey {
    One(usize),
    Two(usize, usize),
}

impl PackKey {
    pub fn two(a: usize, b: usize) -> PackKey {
        PackKey::Two(a.min(b), a.max(b))
    }

    pub fn legs(&self) -> Vec<usize> {
        match *self {
            PackKey::One(a) => vec![a],
            PackKey::Two(a, b) => vec![a, b],
        }
    }

    pub fn has_leg(&self, leg: usize) -> bool {
        match *self {
            PackKey::One(a) => a == leg,
            PackKey::Two(a, b) => a == leg || b == leg,
        }
    }

    pub fn shares_leg(&self, other: &PackKey) -> bool {
        self.legs().iter().any(|&a| other.has_leg(a))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, PackKey::One(_))
    }
}

impl fmt::Display for PackKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PackKey::One(a) => write!(f, "one({a})"),
            PackKey::Two(a, b) => write!(f, "two({a},{b})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PackDecomposition {
    pub independent_set: VertexSet,
    one_packs: BTreeMap<usize, VertexSet>,
    two_packs: BTreeMap<(usize, usize), VertexSet>,
    vertex_to_pack: Vec<Option<PackKey>>,
}

impl PackDecomposition {
    /// Partitions `V \ I` into packs by each vertex's neighborhood in `I`.
    /// `I` must be independent (asserted) and maximal (checked: a vertex
    /// with no `I`-neighbor is a `NotMaximal` error). A vertex with three
    /// or more `I`-neighbors is an induced claw and reported as such.
    pub fn decompose(g: &Graph, independent_set: &VertexSet) -> Result<Self, PackError> {
        assert!(
            g.is_independent(independent_set),
            "pack decomposition requires an independent set"
        );
        let n = g.n();
        let mut one_packs: BTreeMap<usize, VertexSet> = BTreeMap::new();
        let mut two_packs: BTreeMap<(usize, usize), VertexSet> = BTreeMap::new();
        let mut vertex_to_pack = vec![None; n];
        for v in 0..n {
            if independent_set.contains(v) {
                continue;
            }
            let legs = g.neighbors(v).intersection(independent_set);
            match legs.len() {
                0 => return Err(PackError::NotMaximal { vertex: v }),
                1 => {
                    let a = legs.first().unwrap();
                    one_packs
                        .entry(a)
                        .or_insert_with(|| VertexSet::new(n))
                        .insert(v);
                    vertex_to_pack[v] = Some(PackKey::One(a));
                }
                2 => {
                    let mut it = legs.iter();
                    let a = it.next().unwrap();
                    let b = it.next().unwrap();
                    two_packs
                        .entry((a, b))
                        .or_insert_with(|| VertexSet::new(n))
                        .insert(v);
                    vertex_to_pack[v] = Some(PackKey::two(a, b));
                }
                _ => {
                    let leaves = VertexSet::from_iter(n, legs.iter().take(3));
                    return Err(PackError::ClawWitness { center: v, leaves });
                }
            }
        }
        Ok(PackDecomposition {
            independent_set: independent_set.clone(),
            one_packs,
            two_packs,
            vertex_to_pack,
        })
    }

    /// Nonempty packs in canonical order.
    pub fn pack_keys(&self) -> Vec<PackKey> {
        let mut keys: Vec<PackKey> = self.one_packs.keys().map(|&a| PackKey::One(a)).collect();
        keys.extend(self.two_packs.keys().map(|&(a, b)| PackKey::Two(a, b)));
        keys
    }

    pub fn pack_count(&self) -> usize {
        self.one_packs.len() + self.two_packs.len()
    }

    pub fn members(&self, key: PackKey) -> Option<&VertexSet> {
        match key {
            PackKey::One(a) => self.one_packs.get(&a),
            PackKey::Two(a, b) => self.two_packs.get(&(a, b)),
        }
    }

    pub fn pack_of(&self, v: usize) -> Option<PackKey> {
        self.vertex_to_pack.get(v).copied().flatten()
    }

    pub fn one_pack(&self, a: usize) -> Option<&VertexSet> {
        self.one_packs.get(&a)
    }

    pub fn one_pack_legs(&self) -> Vec<usize> {
        self.one_packs.keys().copied().collect()
    }

    pub fn packs_with_leg(&self, leg: usize) -> Vec<PackKey> {
        self.pack_keys()
            .into_iter()
            .filter(|k| k.has_leg(leg))
            .collect()
    }

    /// Union of all 1-pack members.
    pub fn one_pack_union(&self, n: usize) -> VertexSet {
        let mut all = VertexSet::new(n);
        for members in self.one_packs.values() {
            all.union_with(members);
        }
        all
    }

    /// Debug dump in the `pack 1 <a>: v...` / `pack 2 <a> <b>: v...`
    /// format consumed by the trace stream. Ids are reported through the
    /// graph's labels.
    pub fn dump(&self, g: &Graph) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (&a, members) in &self.one_packs {
            let _ = write!(out, "pack 1 {}:", g.label(a));
            for v in members.iter() {
                let _ = write!(out, " {}", g.label(v));
            }
            out.push('\n');
        }
        for (&(a, b), members) in &self.two_packs {
            let _ = write!(out, "pack 2 {} {}:", g.label(a), g.label(b));
            for v in members.iter() {
                let _ = write!(out, " {}", g.label(v));
            }
            out.push('\n');
        }
        out
    }
}

/// The inner/bridge/hub split of every 1-pack plus the clusters of the hub
/// graph.
#[derive(Debug, Clone)]
pub struct OnePackClassification {
    /// Per 1-pack leg: vertices seeing no other 1-pack.
    inner: BTreeMap<usize, VertexSet>,
    /// Key `(a, b)`: vertices of `V_a` seeing exactly the other 1-pack
    /// `V_b`. Only nonempty sets are stored.
    bridges: BTreeMap<(usize, usize), VertexSet>,
    /// Per 1-pack leg: vertices seeing at least two other 1-packs.
    hubs: BTreeMap<usize, VertexSet>,
    /// Connected components of the hub graph, each a clique, sorted by
    /// least vertex.
    pub clusters: Vec<VertexSet>,
    cluster_of: Vec<Option<usize>>,
}

impl OnePackClassification {
    /// Splits every 1-pack and computes clusters, re-deriving the
    /// structural lemmas as checks. Any violation means the input graph
    /// was not claw-free and is reported with a claw witness.
    pub fn classify(g: &Graph, pd: &PackDecomposition) -> Result<Self, PackError> {
        let n = g.n();
        let legs = pd.one_pack_legs();
        let mut inner: BTreeMap<usize, VertexSet> = BTreeMap::new();
        let mut bridges: BTreeMap<(usize, usize), VertexSet> = BTreeMap::new();
        let mut hubs: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for &a in &legs {
            inner.insert(a, VertexSet::new(n));
            hubs.insert(a, VertexSet::new(n));
        }
        for &a in &legs {
            let members = pd.one_pack(a).unwrap().clone();
            for v in members.iter() {
                let mut seen: Vec<usize> = Vec::new();
                for &b in &legs {
                    if b != a && g.neighbors(v).intersects(pd.one_pack(b).unwrap()) {
                        seen.push(b);
                    }
                }
                match seen.len() {
                    0 => inner.get_mut(&a).unwrap().insert(v),
                    1 => bridges
                        .entry((a, seen[0]))
                        .or_insert_with(|| VertexSet::new(n))
                        .insert(v),
                    _ => hubs.get_mut(&a).unwrap().insert(v),
                }
            }
        }

        // Bridge reciprocity: the neighbors of bridge(a, b) inside V_b are
        // exactly bridge(b, a); hub neighborhoods stay within hubs.
        for (&(a, b), set) in &bridges {
            let mut seen_in_b = VertexSet::new(n);
            for v in set.iter() {
                seen_in_b.union_with(&g.neighbors(v).intersection(pd.one_pack(b).unwrap()));
            }
            let reciprocal = bridges.get(&(b, a)).cloned().unwrap_or_else(|| VertexSet::new(n));
            if seen_in_b != reciprocal {
                return Err(structure_violation(
                    g,
                    format!("bridge reciprocity fails between 1-packs {a} and {b}"),
                ));
            }
        }
        for (&a, hub) in &hubs {
            for v in hub.iter() {
                for &b in &legs {
                    if b == a {
                        continue;
                    }
                    let into_b = g.neighbors(v).intersection(pd.one_pack(b).unwrap());
                    if !into_b.is_subset_of(hubs.get(&b).unwrap()) {
                        return Err(structure_violation(
                            g,
                            format!("hub vertex {v} of 1-pack {a} reaches a non-hub vertex of {b}"),
                        ));
                    }
                }
            }
        }

        // Clusters: components of the graph on hub vertices with edges
        // between different 1-packs only.
        let mut all_hubs = VertexSet::new(n);
        for hub in hubs.values() {
            all_hubs.union_with(hub);
        }
        let mut cluster_of = vec![None; n];
        let mut clusters = Vec::new();
        for start in all_hubs.iter() {
            if cluster_of[start].is_some() {
                continue;
            }
            let id = clusters.len();
            let mut component = VertexSet::new(n);
            let mut queue = vec![start];
            cluster_of[start] = Some(id);
            component.insert(start);
            while let Some(v) = queue.pop() {
                let pack_v = pd.pack_of(v);
                for w in g.neighbors(v).intersection(&all_hubs).iter() {
                    if cluster_of[w].is_none() && pd.pack_of(w) != pack_v {
                        cluster_of[w] = Some(id);
                        component.insert(w);
                        queue.push(w);
                    }
                }
            }
            clusters.push(component);
        }

        for cluster in &clusters {
            if !g.is_clique(cluster) {
                return Err(structure_violation(g, "cluster does not induce a clique"));
            }
            let mut packs: Vec<PackKey> = cluster.iter().filter_map(|v| pd.pack_of(v)).collect();
            packs.sort();
            packs.dedup();
            if packs.len() < 3 {
                return Err(structure_violation(
                    g,
                    format!("cluster {cluster:?} meets only {} 1-packs", packs.len()),
                ));
            }
        }

        // Hub adjacency across packs coincides with cluster membership.
        let hub_list: Vec<usize> = all_hubs.iter().collect();
        for (i, &v) in hub_list.iter().enumerate() {
            for &w in &hub_list[i + 1..] {
                if pd.pack_of(v) == pd.pack_of(w) {
                    continue;
                }
                let same_cluster = cluster_of[v] == cluster_of[w];
                if g.has_edge(v, w) != same_cluster {
                    return Err(structure_violation(
                        g,
                        format!("hub vertices {v}, {w}: edge and cluster membership disagree"),
                    ));
                }
            }
        }

        Ok(OnePackClassification {
            inner,
            bridges,
            hubs,
            clusters,
            cluster_of,
        })
    }

    pub fn inner(&self, a: usize) -> Option<&VertexSet> {
        self.inner.get(&a)
    }

    pub fn hub(&self, a: usize) -> Option<&VertexSet> {
        self.hubs.get(&a)
    }

    pub fn bridge(&self, a: usize, b: usize) -> Option<&VertexSet> {
        self.bridges.get(&(a, b))
    }

    /// Bridge targets of 1-pack `a` in ascending order of the partner leg.
    pub fn bridges_from(&self, a: usize) -> impl Iterator<Item = (usize, &VertexSet)> {
        self.bridges
            .range((a, 0)..(a, usize::MAX))
            .map(|(&(_, b), set)| (b, set))
    }

    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.cluster_of.get(v).copied().flatten()
    }
}

/// The domination footprint of a hub vertex: everything `v` dominates
/// beyond its leg's closed neighborhood is exactly the rest of its cluster.
/// Returns `N[v] \ N[a]` after asserting it equals `C \ V_a`.
pub fn cluster_domination_profile(
    g: &Graph,
    pd: &PackDecomposition,
    cls: &OnePackClassification,
    v: usize,
) -> Result<VertexSet, PackError> {
    let key = pd
        .pack_of(v)
        .filter(|k| k.is_one())
        .unwrap_or_else(|| panic!("vertex {v} is not in a 1-pack"));
    let a = key.legs()[0];
    assert!(
        cls.hub(a).is_some_and(|h| h.contains(v)),
        "vertex {v} is not a hub vertex"
    );
    let cluster = &cls.clusters[cls.cluster_of(v).expect("hub vertices lie in clusters")];
    let mut profile = g.closed_neighborhood(v);
    profile.difference_with(&g.closed_neighborhood(a));
    let mut expected = cluster.clone();
    expected.difference_with(pd.one_pack(a).unwrap());
    if profile != expected {
        return Err(structure_violation(
            g,
            format!("domination profile of hub vertex {v} differs from its cluster"),
        ));
    }
    Ok(profile)
}

/// One edge of a pack-structure audit: the clique property of 1-packs and
/// the shared-leg property of edges leaving 2-packs.
pub fn validate_pack_lemmas(g: &Graph, pd: &PackDecomposition) -> Result<(), PackError> {
    // Every vertex outside I is in exactly one pack.
    let mut seen = pd.independent_set.clone();
    for key in pd.pack_keys() {
        for v in pd.members(key).unwrap().iter() {
            if seen.contains(v) {
                return Err(structure_violation(g, format!("vertex {v} in two packs")));
            }
            seen.insert(v);
        }
    }
    if seen != g.vertex_set() {
        return Err(structure_violation(g, "packs do not cover V \\ I"));
    }

    for &a in &pd.one_pack_legs() {
        if !g.is_clique(pd.one_pack(a).unwrap()) {
            return Err(structure_violation(g, format!("1-pack {a} is not a clique")));
        }
    }

    // Edges leaving a 2-pack stay among packs sharing one of its legs.
    for key in pd.pack_keys() {
        let PackKey::Two(a, b) = key else { continue };
        for v in pd.members(key).unwrap().iter() {
            for w in g.neighbors(v).iter() {
                if let Some(other) = pd.pack_of(w) {
                    if other != key && !other.has_leg(a) && !other.has_leg(b) {
                        return Err(structure_violation(
                            g,
                            format!("edge ({v}, {w}) leaves 2-pack ({a},{b}) without a shared leg"),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// For an edge `vw` of a claw-free graph, the private neighborhood
/// `N[w] \ N[v]` together with `w` induces a clique.
pub fn private_neighborhood_is_clique(g: &Graph, v: usize, w: usize) -> bool {
    debug_assert!(g.has_edge(v, w));
    let mut set = g.closed_neighborhood(w);
    set.difference_with(&g.closed_neighborhood(v));
    set.insert(w);
    g.is_clique(&set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::mis;
    use crate::rng::SplitMix64;

    fn decompose_with_mis(g: &Graph) -> (VertexSet, PackDecomposition) {
        let i = mis::maximum_independent_set(g).unwrap();
        let pd = PackDecomposition::decompose(g, &i).unwrap();
        (i, pd)
    }

    #[test]
    fn p3_has_single_two_pack() {
        let g = Graph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let i = VertexSet::from_iter(3, [0, 2]);
        let pd = PackDecomposition::decompose(&g, &i).unwrap();
        assert_eq!(pd.pack_keys(), vec![PackKey::Two(0, 2)]);
        assert_eq!(pd.members(PackKey::Two(0, 2)).unwrap().to_vec(), vec![1]);
    }

    #[test]
    fn triangle_has_single_one_pack() {
        let g = Graph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let i = VertexSet::from_iter(3, [0]);
        let pd = PackDecomposition::decompose(&g, &i).unwrap();
        assert_eq!(pd.pack_keys(), vec![PackKey::One(0)]);
        assert_eq!(pd.members(PackKey::One(0)).unwrap().to_vec(), vec![1, 2]);
    }

    #[test]
    fn line_graph_of_p5_matches_recomputation() {
        let p5 = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let lg = gen::line_graph(&p5).unwrap();
        let (i, pd) = decompose_with_mis(&lg);
        // Independent recomputation straight from N(v) ∩ I.
        for v in 0..lg.n() {
            if i.contains(v) {
                assert_eq!(pd.pack_of(v), None);
                continue;
            }
            let legs: Vec<usize> = lg.neighbors(v).intersection(&i).to_vec();
            let expected = match legs.as_slice() {
                [a] => PackKey::One(*a),
                [a, b] => PackKey::two(*a, *b),
                other => panic!("unexpected leg count {other:?}"),
            };
            assert_eq!(pd.pack_of(v), Some(expected));
        }
        assert_eq!(pd.pack_keys(), vec![PackKey::One(2), PackKey::Two(0, 2)]);
    }

    #[test]
    fn not_maximal_detected() {
        let g = Graph::build(3, &[(0, 1)]).unwrap();
        let i = VertexSet::from_iter(3, [0]);
        assert!(matches!(
            PackDecomposition::decompose(&g, &i),
            Err(PackError::NotMaximal { vertex: 2 })
        ));
    }

    #[test]
    fn claw_center_detected() {
        let g = Graph::build(4, &[(3, 0), (3, 1), (3, 2)]).unwrap();
        let i = VertexSet::from_iter(4, [0, 1, 2]);
        match PackDecomposition::decompose(&g, &i) {
            Err(PackError::ClawWitness { center: 3, leaves }) => {
                assert_eq!(leaves.to_vec(), vec![0, 1, 2]);
            }
            other => panic!("expected claw witness, got {other:?}"),
        }
    }

    /// Three 1-packs wired into a single hub triangle.
    fn hub_triangle() -> (Graph, PackDecomposition, OnePackClassification) {
        let g = Graph::build(6, &[(0, 3), (1, 4), (2, 5), (3, 4), (4, 5), (3, 5)]).unwrap();
        let i = VertexSet::from_iter(6, [0, 1, 2]);
        let pd = PackDecomposition::decompose(&g, &i).unwrap();
        let cls = OnePackClassification::classify(&g, &pd).unwrap();
        (g, pd, cls)
    }

    #[test]
    fn classification_of_hub_triangle() {
        let (_, _, cls) = hub_triangle();
        assert_eq!(cls.hub(0).unwrap().to_vec(), vec![3]);
        assert_eq!(cls.hub(1).unwrap().to_vec(), vec![4]);
        assert_eq!(cls.hub(2).unwrap().to_vec(), vec![5]);
        assert_eq!(cls.clusters.len(), 1);
        assert_eq!(cls.clusters[0].to_vec(), vec![3, 4, 5]);
    }

    #[test]
    fn two_bridged_one_packs() {
        // Two 1-packs joined by a single edge: both endpoints are bridges.
        let g = Graph::build(4, &[(0, 2), (1, 3), (2, 3)]).unwrap();
        let i = VertexSet::from_iter(4, [0, 1]);
        let pd = PackDecomposition::decompose(&g, &i).unwrap();
        let cls = OnePackClassification::classify(&g, &pd).unwrap();
        assert_eq!(cls.bridge(0, 1).unwrap().to_vec(), vec![2]);
        assert_eq!(cls.bridge(1, 0).unwrap().to_vec(), vec![3]);
        assert!(cls.clusters.is_empty());
    }

    #[test]
    fn isolated_one_packs_are_inner() {
        let g = Graph::build(4, &[(0, 2), (1, 3)]).unwrap();
        let i = VertexSet::from_iter(4, [0, 1]);
        let pd = PackDecomposition::decompose(&g, &i).unwrap();
        let cls = OnePackClassification::classify(&g, &pd).unwrap();
        assert_eq!(cls.inner(0).unwrap().to_vec(), vec![2]);
        assert_eq!(cls.inner(1).unwrap().to_vec(), vec![3]);
        assert!(cls.clusters.is_empty());
    }

    #[test]
    fn cluster_domination_profile_on_hub_triangle() {
        let (g, pd, cls) = hub_triangle();
        let profile = cluster_domination_profile(&g, &pd, &cls, 3).unwrap();
        assert_eq!(profile.to_vec(), vec![4, 5]);
        // The profile never reaches back into the vertex's own pack.
        assert!(profile.is_disjoint(pd.one_pack(0).unwrap()));
    }

    #[test]
    fn structural_sweep_on_generated_graphs() {
        let mut rng = SplitMix64::new(0x9A75);
        let mut hubs_seen = 0;
        for _ in 0..100 {
            let g = gen::random_claw_free(&mut rng, 18);
            if g.n() == 0 {
                continue;
            }
            let (_, pd) = decompose_with_mis(&g);
            validate_pack_lemmas(&g, &pd).unwrap();
            let cls = OnePackClassification::classify(&g, &pd).unwrap();
            for &a in &pd.one_pack_legs() {
                for v in cls.hub(a).unwrap().iter() {
                    cluster_domination_profile(&g, &pd, &cls, v).unwrap();
                    hubs_seen += 1;
                }
            }
            // Classification partitions each 1-pack.
            for &a in &pd.one_pack_legs() {
                let mut union = cls.inner(a).unwrap().clone();
                union.union_with(cls.hub(a).unwrap());
                for (_, set) in cls.bridges_from(a) {
                    union.union_with(set);
                }
                assert_eq!(&union, pd.one_pack(a).unwrap());
            }
        }
        assert!(hubs_seen > 0, "sweep never generated hub vertices");
    }

    #[test]
    fn private_neighborhood_clique_on_sampled_edges() {
        let mut rng = SplitMix64::new(0x1CE);
        for _ in 0..60 {
            let g = gen::random_claw_free(&mut rng, 16);
            for (v, w) in g.edges().into_iter().take(20) {
                assert!(private_neighborhood_is_clique(&g, v, w));
                assert!(private_neighborhood_is_clique(&g, w, v));
            }
        }
    }

    #[test]
    fn pack_count_bound() {
        let mut rng = SplitMix64::new(0xB0B);
        for _ in 0..50 {
            let g = gen::random_claw_free(&mut rng, 20);
            if g.n() == 0 {
                continue;
            }
            let (i, pd) = decompose_with_mis(&g);
            let s = i.len();
            assert!(pd.pack_count() <= s + s * (s - 1) / 2);
        }
    }

    #[test]
    fn dump_format() {
        let (g, pd, _) = hub_triangle();
        let dump = pd.dump(&g);
        assert_eq!(dump, "pack 1 0: 3\npack 1 1: 4\npack 1 2: 5\n");
    }
}
