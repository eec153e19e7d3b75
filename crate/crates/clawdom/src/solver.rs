//! The budgeted branching solver for dominating sets in claw-free graphs.
//!
//! The search is organized around a maximum independent set `I`. If the
//! solution meets `I` we guess one vertex, delete its closed neighborhood
//! and restart on the reduced graph; otherwise the solution is disjoint
//! from `I`, lives inside the packs of the decomposition, and takes at most
//! one vertex per pack. The solver then guesses a family of at most `k`
//! packs, maintains an Active/Passive/Done partition that every candidate
//! must dominate, prunes the 1-packs through their inner/bridge/hub
//! structure, and hands the surviving choices to the auxiliary CSP, whose
//! constraint graph is first reduced to maximum degree two by binary
//! clique-split guesses.
//!
//! Branching is depth-first in canonical order; the first verified
//! solution wins. Sibling branches may run on worker threads, in which
//! case the YES/NO answer is unchanged but the witness may differ;
//! deterministic mode forces the sequential order.

use crate::bitset::VertexSet;
use crate::csp;
use crate::graph::Graph;
use crate::mis::{self, MisError};
use crate::packs::{OnePackClassification, PackDecomposition, PackError, PackKey};
use crate::rng::SplitMix64;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("input graph is not claw-free: center {center}, leaves {leaves:?}")]
    NotClawFree { center: usize, leaves: VertexSet },
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}

impl From<MisError> for SolveError {
    fn from(e: MisError) -> Self {
        SolveError::InstanceTooLarge(e.to_string())
    }
}

fn internal(msg: impl Into<String>) -> SolveError {
    SolveError::InternalContradiction(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexState {
    /// May be chosen into the solution and must be dominated.
    Active,
    /// May not be chosen but must be dominated.
    Passive,
    /// May not be chosen and is guaranteed dominated by every candidate.
    Done,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Force sequential canonical-order search; makes the witness (and the
    /// trace) byte-stable across runs and thread counts.
    pub deterministic: bool,
    /// Worker cap; 0 means the machine's available parallelism.
    pub threads: usize,
    /// Re-derive the structural facts the search relies on and fail with
    /// an internal-contradiction error on any violation.
    pub check_lemmas: bool,
    /// When nonzero, sample this many dominating candidates after every
    /// state change and verify each dominates Active ∪ Done.
    pub candidate_samples: usize,
    /// After building each auxiliary CSP, replay the guess log from the
    /// branch root and require it to reproduce the context exactly.
    pub verify_replay: bool,
    /// Stream one line per guess (plus pack and CSP dumps) to stderr.
    /// Forces sequential search.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            deterministic: false,
            threads: 0,
            check_lemmas: true,
            candidate_samples: 0,
            verify_replay: false,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    /// Number of guesses applied over the whole search.
    pub branch_nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    DominatingSet,
}

/// Verification outcome recorded on every returned solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transcript {
    pub dominates_all: bool,
    pub within_budget: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Witness vertices in original ids.
    pub vertices: VertexSet,
    pub kind: SolutionKind,
    pub transcript: Transcript,
}

#[derive(Debug)]
pub struct SolveOutcome {
    pub solution: Option<Solution>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassGuess {
    /// The solution vertex of this 1-pack lies in its bridge toward the
    /// given leg.
    Bridge(usize),
    /// The solution vertex lies among the pack's hub vertices.
    Hub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuessChoice {
    PickVertex(usize),
    DisjointFromI,
    PackFamily(Vec<PackKey>),
    OnePackClass { leg: usize, class: ClassGuess },
    BridgeTarget { leg: usize, colour: Option<usize> },
    HubCovered { leg: usize, covered: bool },
    ClusterDominator { cluster: usize, leg: usize },
    DominatesFrom { w: PackKey, x: PackKey, dominates: bool },
    CliqueSide { x: PackKey, w1: PackKey, w2: PackKey, first: bool },
}

impl fmt::Display for GuessChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuessChoice::PickVertex(v) => write!(f, "pick({v})"),
            GuessChoice::DisjointFromI => write!(f, "disjoint"),
            GuessChoice::PackFamily(packs) => {
                write!(f, "family[")?;
                for (i, p) in packs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            GuessChoice::OnePackClass { leg, class } => match class {
                ClassGuess::Bridge(b) => write!(f, "class(a={leg},bridge({b}))"),
                ClassGuess::Hub => write!(f, "class(a={leg},hub)"),
            },
            GuessChoice::BridgeTarget { leg, colour } => match colour {
                Some(c) => write!(f, "bridge-dom(a={leg},c={c})"),
                None => write!(f, "bridge-dom(a={leg},none)"),
            },
            GuessChoice::HubCovered { leg, covered } => {
                write!(f, "hub-dom(a={leg},{})", if *covered { "yes" } else { "no" })
            }
            GuessChoice::ClusterDominator { cluster, leg } => {
                write!(f, "cluster({cluster})->one({leg})")
            }
            GuessChoice::DominatesFrom { w, x, dominates } => {
                write!(f, "dom(w={w},x={x},{})", if *dominates { "yes" } else { "no" })
            }
            GuessChoice::CliqueSide { x, w1, w2, first } => {
                write!(f, "split(x={x},w1={w1},w2={w2},{})", if *first { "K1" } else { "K2" })
            }
        }
    }
}

/// One guess in the audit trail. `step` follows the solver's fixed step
/// numbering; ids inside the choice are reported in original-graph ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessRecord {
    pub step: u8,
    pub choice: GuessChoice,
}

/// Verdict of the independence-number bounds check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Witness in original ids (forced vertices plus the independent set).
    Yes(VertexSet),
    No,
    Continue,
}

// ---------------------------------------------------------------------------
// Root of one recursion level: the graph at this level, its maximum
// independent set, and the budget left.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RootInstance {
    pub graph: Arc<Graph>,
    pub k: usize,
    /// Vertices already committed to the solution, in original ids.
    pub forced: Vec<usize>,
    pub i_set: VertexSet,
    original: Arc<Graph>,
    k0: usize,
}

/// Children of the intersection branching: either a restart on a reduced
/// graph or the branch whose solution avoids the independent set.
#[derive(Debug, Clone)]
pub enum BranchChild {
    Restart {
        graph: Arc<Graph>,
        k: usize,
        forced: Vec<usize>,
        picked_label: usize,
    },
    Disjoint(BranchContext),
}

impl RootInstance {
    /// Computes the maximum independent set of `graph`; the entry point of
    /// one recursion level.
    pub fn new(graph: Graph, k: usize) -> Result<Self, SolveError> {
        let graph = Arc::new(graph);
        let original = graph.clone();
        Self::with_budget(graph, k, Vec::new(), original, k)
    }

    fn with_budget(
        graph: Arc<Graph>,
        k: usize,
        forced: Vec<usize>,
        original: Arc<Graph>,
        k0: usize,
    ) -> Result<Self, SolveError> {
        let i_set = mis::maximum_independent_set(&graph)?;
        Ok(RootInstance {
            graph,
            k,
            forced,
            i_set,
            original,
            k0,
        })
    }

    /// Bounds check on the independence number: a maximal independent set
    /// within budget is itself a dominating set, and no dominating set can
    /// be smaller than half the independence number.
    pub fn step_bounds(&self) -> Verdict {
        if self.i_set.len() <= self.k {
            let mut witness: Vec<usize> = self.forced.clone();
            witness.extend(self.graph.labels_of(&self.i_set));
            return Verdict::Yes(VertexSet::from_iter(self.original.n(), witness));
        }
        if self.i_set.len() > 2 * self.k {
            return Verdict::No;
        }
        Verdict::Continue
    }

    /// The intersection branching: one restart child per vertex of the
    /// independent set (delete its closed neighborhood, spend one budget
    /// unit) plus the disjoint child that proceeds to pack guessing.
    pub fn branch_on_independent_set(&self) -> Result<Vec<BranchChild>, SolveError> {
        debug_assert!(self.k >= 1, "bounds verdict admits no zero-budget continue");
        let mut children = Vec::with_capacity(self.i_set.len() + 1);
        for v in self.i_set.iter() {
            let mut keep = self.graph.vertex_set();
            keep.difference_with(&self.graph.closed_neighborhood(v));
            let reduced = self.graph.induced_subgraph(&keep);
            let mut forced = self.forced.clone();
            forced.push(self.graph.label(v));
            children.push(BranchChild::Restart {
                graph: Arc::new(reduced),
                k: self.k - 1,
                forced,
                picked_label: self.graph.label(v),
            });
        }
        children.push(BranchChild::Disjoint(BranchContext::at_root(self)?));
        Ok(children)
    }
}

// ---------------------------------------------------------------------------
// Branch context: one node of the pack-guessing search.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BranchContext {
    graph: Arc<Graph>,
    k: usize,
    forced: Vec<usize>,
    i_set: VertexSet,
    pd: Arc<PackDecomposition>,
    cls: Arc<OnePackClassification>,
    family: Vec<PackKey>,
    state: Vec<VertexState>,
    guess_log: Vec<GuessRecord>,
    class_guess: BTreeMap<usize, ClassGuess>,
    cluster_assignments: BTreeMap<usize, usize>,
    bridge_processed: BTreeSet<usize>,
    hub_processed: BTreeSet<usize>,
    dom_guessed: BTreeSet<(PackKey, PackKey)>,
    /// Set once the safe-state steps have run; the partition-safety
    /// sampling only applies from then on.
    safe: bool,
    /// Guesses consumed above this context (vertex picks and the disjoint
    /// guess), for trace depth reporting.
    depth_offset: usize,
    original: Arc<Graph>,
    k0: usize,
}

/// Reports a vertex set in original ids, sized to hold them.
fn labeled_set(g: &Graph, set: &VertexSet) -> VertexSet {
    let labels: Vec<usize> = set.iter().map(|v| g.label(v)).collect();
    let cap = labels.iter().max().map_or(0, |&m| m + 1);
    VertexSet::from_iter(cap.max(g.n()), labels)
}

fn pack_error_to_solve(g: &Graph, e: PackError) -> SolveError {
    match e {
        PackError::ClawWitness { center, leaves } => SolveError::NotClawFree {
            center: g.label(center),
            leaves: labeled_set(g, &leaves),
        },
        PackError::StructureViolation {
            claw: Some((center, leaves)),
            ..
        } => SolveError::NotClawFree {
            center: g.label(center),
            leaves: labeled_set(g, &leaves),
        },
        other => internal(other.to_string()),
    }
}

impl BranchContext {
    /// Context at the branch root, before any pack family is chosen:
    /// the independent set is Done, everything else Passive.
    pub fn at_root(root: &RootInstance) -> Result<Self, SolveError> {
        let g = &root.graph;
        let pd = PackDecomposition::decompose(g, &root.i_set)
            .map_err(|e| pack_error_to_solve(g, e))?;
        let cls = OnePackClassification::classify(g, &pd)
            .map_err(|e| pack_error_to_solve(g, e))?;
        let mut state = vec![VertexState::Passive; g.n()];
        for v in root.i_set.iter() {
            state[v] = VertexState::Done;
        }
        Ok(BranchContext {
            graph: root.graph.clone(),
            k: root.k,
            forced: root.forced.clone(),
            i_set: root.i_set.clone(),
            pd: Arc::new(pd),
            cls: Arc::new(cls),
            family: Vec::new(),
            state,
            guess_log: Vec::new(),
            class_guess: BTreeMap::new(),
            cluster_assignments: BTreeMap::new(),
            bridge_processed: BTreeSet::new(),
            hub_processed: BTreeSet::new(),
            dom_guessed: BTreeSet::new(),
            safe: false,
            depth_offset: root.forced.len() + 1,
            original: root.original.clone(),
            k0: root.k0,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn budget(&self) -> usize {
        self.k
    }

    pub fn forced(&self) -> &[usize] {
        &self.forced
    }

    pub fn independent_set(&self) -> &VertexSet {
        &self.i_set
    }

    pub fn packs(&self) -> &PackDecomposition {
        &self.pd
    }

    pub fn classification(&self) -> &OnePackClassification {
        &self.cls
    }

    pub fn family(&self) -> &[PackKey] {
        &self.family
    }

    pub fn state(&self, v: usize) -> VertexState {
        self.state[v]
    }

    pub fn guess_log(&self) -> &[GuessRecord] {
        &self.guess_log
    }

    pub fn cluster_assignments(&self) -> &BTreeMap<usize, usize> {
        &self.cluster_assignments
    }

    pub fn active_set(&self) -> VertexSet {
        VertexSet::from_iter(
            self.graph.n(),
            (0..self.graph.n()).filter(|&v| self.state[v] == VertexState::Active),
        )
    }

    pub fn passive_set(&self) -> VertexSet {
        VertexSet::from_iter(
            self.graph.n(),
            (0..self.graph.n()).filter(|&v| self.state[v] == VertexState::Passive),
        )
    }

    pub fn active_in(&self, key: PackKey) -> VertexSet {
        match self.pd.members(key) {
            Some(members) => members.intersection(&self.active_set()),
            None => VertexSet::new(self.graph.n()),
        }
    }

    pub fn passive_in(&self, key: PackKey) -> VertexSet {
        match self.pd.members(key) {
            Some(members) => members.intersection(&self.passive_set()),
            None => VertexSet::new(self.graph.n()),
        }
    }

    /// Packs outside the family that still hold passive vertices, in
    /// canonical order.
    pub fn passive_packs(&self) -> Vec<PackKey> {
        self.pd
            .pack_keys()
            .into_iter()
            .filter(|key| !self.family.contains(key) && !self.passive_in(*key).is_empty())
            .collect()
    }

    fn set_done(&mut self, v: usize) {
        self.state[v] = VertexState::Done;
    }

    fn move_all_done(&mut self, set: &VertexSet) {
        for v in set.iter() {
            self.set_done(v);
        }
    }

    fn record(&mut self, step: u8, choice: GuessChoice) {
        self.guess_log.push(GuessRecord { step, choice });
    }

    fn labeled_key(&self, key: PackKey) -> PackKey {
        match key {
            PackKey::One(a) => PackKey::One(self.graph.label(a)),
            PackKey::Two(a, b) => PackKey::two(self.graph.label(a), self.graph.label(b)),
        }
    }

    /// Trace depth of the most recent guess: guesses above this context
    /// plus the log position.
    pub fn depth(&self) -> usize {
        self.depth_offset + self.guess_log.len().saturating_sub(1)
    }

    /// Chooses the pack family: the partition is initialized with the
    /// family active, the independent set done, and the rest passive.
    pub fn with_family(mut self, family: Vec<PackKey>) -> BranchContext {
        debug_assert!(self.family.is_empty(), "family chosen once per branch");
        let labeled: Vec<PackKey> = family.iter().map(|&k| self.labeled_key(k)).collect();
        for &key in &family {
            for v in self.pd.members(key).expect("family packs exist").clone().iter() {
                self.state[v] = VertexState::Active;
            }
        }
        self.family = family;
        self.record(4, GuessChoice::PackFamily(labeled));
        self
    }

    /// The unique family pack with the given leg; the caller guarantees
    /// uniqueness (shared-leg packs are handled by the safe-state step).
    fn unique_family_pack_with_leg(&self, a: usize) -> Result<PackKey, SolveError> {
        let mut with_leg = self.family.iter().copied().filter(|k| k.has_leg(a));
        let first = with_leg
            .next()
            .ok_or_else(|| internal(format!("no family pack has leg {a}")))?;
        if with_leg.next().is_some() {
            return Err(internal(format!(
                "leg {a} has two family packs but its 1-pack still has passive vertices"
            )));
        }
        Ok(first)
    }

    /// The two family packs whose actives can dominate the passive part of
    /// `w`. Fails with an internal contradiction if the passive vertices do
    /// not agree on exactly two packs.
    pub fn dominator_pair(&self, w: PackKey) -> Result<(PackKey, PackKey), SolveError> {
        let passive = self.passive_in(w);
        debug_assert!(!passive.is_empty());
        let mut common: Option<BTreeSet<PackKey>> = None;
        for v in passive.iter() {
            let mut packs = BTreeSet::new();
            for &key in &self.family {
                if self.graph.neighbors(v).intersects(&self.active_in(key)) {
                    packs.insert(key);
                }
            }
            if packs.len() != 2 {
                return Err(internal(format!(
                    "passive vertex {} of pack {w} sees active vertices in {} packs, expected 2",
                    self.graph.label(v),
                    packs.len()
                )));
            }
            match &common {
                None => common = Some(packs),
                Some(existing) if *existing == packs => {}
                Some(_) => {
                    return Err(internal(format!(
                        "passive vertices of pack {w} disagree on their dominator packs"
                    )))
                }
            }
        }
        let pair = common.expect("nonempty passive set");
        let mut it = pair.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }
}

// ---------------------------------------------------------------------------
// Step 5 filter and family enumeration.
// ---------------------------------------------------------------------------

/// Enumerates every family of at most `k` nonempty packs in which each
/// independent-set vertex has one or two covering packs. Families are
/// emitted in lexicographic order of their canonical pack lists.
///
/// Legs are processed in ascending order and every pack is added exactly
/// at its minimum leg's turn, so each family is generated once and each
/// leg's covering count is final when its turn comes.
pub fn enumerate_pack_families(ctx: &BranchContext) -> Vec<Vec<PackKey>> {
    let legs: Vec<usize> = ctx.i_set.to_vec();
    let mut by_min_leg: BTreeMap<usize, Vec<PackKey>> = BTreeMap::new();
    for key in ctx.pd.pack_keys() {
        let min_leg = key.legs().into_iter().min().expect("packs have legs");
        by_min_leg.entry(min_leg).or_default().push(key);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<PackKey> = Vec::new();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    cover_legs(
        ctx.k,
        &legs,
        0,
        &by_min_leg,
        &mut chosen,
        &mut counts,
        &mut out,
    );
    out.sort();
    out
}

fn cover_legs(
    k: usize,
    legs: &[usize],
    idx: usize,
    by_min_leg: &BTreeMap<usize, Vec<PackKey>>,
    chosen: &mut Vec<PackKey>,
    counts: &mut BTreeMap<usize, usize>,
    out: &mut Vec<Vec<PackKey>>,
) {
    if idx == legs.len() {
        let mut family = chosen.clone();
        family.sort();
        out.push(family);
        return;
    }
    let leg = legs[idx];
    // Packs with this leg added at earlier turns; final after this turn.
    let have = counts.get(&leg).copied().unwrap_or(0);
    if have > 2 {
        return;
    }
    let candidates: Vec<PackKey> = by_min_leg.get(&leg).cloned().unwrap_or_default();

    let mut try_additions = |added: &[PackKey]| {
        if have + added.len() < 1 || have + added.len() > 2 || chosen.len() + added.len() > k {
            return;
        }
        // Other legs of the added packs must stay within two covering
        // packs as well.
        for p in added {
            for l in p.legs() {
                if l == leg {
                    continue;
                }
                let extra = added.iter().filter(|q| q.has_leg(l)).count();
                if counts.get(&l).copied().unwrap_or(0) + extra > 2 {
                    return;
                }
            }
        }
        for p in added {
            chosen.push(*p);
            for l in p.legs() {
                *counts.entry(l).or_insert(0) += 1;
            }
        }
        cover_legs(k, legs, idx + 1, by_min_leg, chosen, counts, out);
        for p in added {
            chosen.pop();
            for l in p.legs() {
                *counts.get_mut(&l).unwrap() -= 1;
            }
        }
    };

    try_additions(&[]);
    for (i, &p) in candidates.iter().enumerate() {
        try_additions(&[p]);
        for &q in candidates.iter().skip(i + 1) {
            try_additions(&[p, q]);
        }
    }
}

// ---------------------------------------------------------------------------
// Safe state (steps 7-9) and liveness (step 10).
// ---------------------------------------------------------------------------

/// Applies the three deterministic safe-state moves, once each in order:
/// family 1-pack vertices confined to their leg's neighborhood go Done;
/// alone family 2-packs keep only vertices dominating the whole pack; and
/// when two family packs share a leg, every non-family pack with that leg
/// goes Done entirely.
pub fn propagate_safe_state(mut ctx: BranchContext) -> BranchContext {
    // Step 7.
    for key in ctx.family.clone() {
        let PackKey::One(a) = key else { continue };
        let closed_a = ctx.graph.closed_neighborhood(a);
        for v in ctx.active_in(key).iter() {
            if ctx.graph.closed_neighborhood(v).is_subset_of(&closed_a) {
                ctx.set_done(v);
            }
        }
    }
    // Step 8.
    for key in ctx.family.clone() {
        let PackKey::Two(..) = key else { continue };
        let alone = !ctx
            .family
            .iter()
            .any(|&other| other != key && other.shares_leg(&key));
        if !alone {
            continue;
        }
        let members = ctx.pd.members(key).expect("family packs exist").clone();
        for v in ctx.active_in(key).iter() {
            if !members.is_subset_of(&ctx.graph.closed_neighborhood(v)) {
                ctx.set_done(v);
            }
        }
    }
    // Step 9.
    for leg in ctx.i_set.clone().iter() {
        let family_with_leg = ctx.family.iter().filter(|k| k.has_leg(leg)).count();
        if family_with_leg < 2 {
            continue;
        }
        for key in ctx.pd.packs_with_leg(leg) {
            if !ctx.family.contains(&key) {
                let members = ctx.pd.members(key).unwrap().clone();
                ctx.move_all_done(&members);
            }
        }
    }
    ctx.safe = true;
    ctx
}

/// A branch stays alive while every family pack has an active vertex and
/// every passive vertex has an active neighbor.
pub fn check_liveness(ctx: &BranchContext) -> bool {
    let active = ctx.active_set();
    for &key in &ctx.family {
        if !ctx.pd.members(key).expect("family packs exist").intersects(&active) {
            return false;
        }
    }
    for v in ctx.passive_set().iter() {
        if !ctx.graph.neighbors(v).intersects(&active) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// 1-pack machinery: steps 11-17.
// ---------------------------------------------------------------------------

impl BranchContext {
    /// Step 11: confine a family 1-pack's solution vertex to one class.
    fn apply_class_guess(&mut self, a: usize, class: ClassGuess) {
        let keep = match class {
            ClassGuess::Bridge(b) => self.cls.bridge(a, b).expect("guessed bridge exists").clone(),
            ClassGuess::Hub => self.cls.hub(a).expect("1-pack has a hub set").clone(),
        };
        let mut gone = self.pd.one_pack(a).expect("family 1-pack exists").clone();
        gone.difference_with(&keep);
        self.move_all_done(&gone);
        self.class_guess.insert(a, class.clone());
        let labeled_class = match class {
            ClassGuess::Bridge(b) => ClassGuess::Bridge(self.graph.label(b)),
            ClassGuess::Hub => ClassGuess::Hub,
        };
        self.record(
            11,
            GuessChoice::OnePackClass {
                leg: self.graph.label(a),
                class: labeled_class,
            },
        );
    }

    /// Step 12: for each leftover 1-pack, the inner vertices (plus bridges
    /// whose partner class lost all active vertices) can only be dominated
    /// from the unique family 2-pack on the same leg, whose actives are
    /// pruned accordingly.
    fn apply_inner_extension(&mut self) -> Result<(), SolveError> {
        for a in self.pd.one_pack_legs() {
            if self.family.contains(&PackKey::One(a)) {
                continue;
            }
            if self.passive_in(PackKey::One(a)).is_empty() {
                continue;
            }
            let key = self.unique_family_pack_with_leg(a)?;
            debug_assert!(matches!(key, PackKey::Two(..)));
            let mut extended = self.cls.inner(a).expect("1-pack classified").clone();
            for (c, bridge) in self.cls.bridges_from(a) {
                let reciprocal_active = self
                    .cls
                    .bridge(c, a)
                    .map(|r| r.intersects(&self.active_set()))
                    .unwrap_or(false);
                if !reciprocal_active {
                    extended.union_with(bridge);
                }
            }
            if extended.is_empty() {
                continue;
            }
            for v in self.active_in(key).iter() {
                if !extended.is_subset_of(&self.graph.closed_neighborhood(v)) {
                    self.set_done(v);
                }
            }
            self.move_all_done(&extended);
        }
        Ok(())
    }

    /// Step 13 trigger: a leftover 1-pack with passive bridge vertices
    /// toward some leg other than its 2-pack partner.
    fn next_bridge_pack(&self) -> Result<Option<(usize, PackKey, usize)>, SolveError> {
        let passive = self.passive_set();
        for a in self.pd.one_pack_legs() {
            if self.bridge_processed.contains(&a)
                || self.family.contains(&PackKey::One(a))
                || self.passive_in(PackKey::One(a)).is_empty()
            {
                continue;
            }
            let key = self.unique_family_pack_with_leg(a)?;
            let partner = key
                .legs()
                .into_iter()
                .find(|&l| l != a)
                .expect("2-pack has a second leg");
            let triggered = self
                .cls
                .bridges_from(a)
                .any(|(c, set)| c != partner && set.intersects(&passive));
            if triggered {
                return Ok(Some((a, key, partner)));
            }
        }
        Ok(None)
    }

    /// Step 13 choices: one guess per bridge target (the family 2-pack's
    /// vertex dominates into that bridge) plus the dominate-nothing guess.
    fn bridge_choices(&self, a: usize, partner: usize) -> Vec<Option<usize>> {
        let mut choices: Vec<Option<usize>> = self
            .cls
            .bridges_from(a)
            .filter(|&(c, _)| c != partner)
            .map(|(c, _)| Some(c))
            .collect();
        choices.push(None);
        choices
    }

    fn apply_bridge_guess(
        &mut self,
        a: usize,
        key: PackKey,
        partner: usize,
        colour: Option<usize>,
    ) {
        match colour {
            Some(c) => {
                let target = self.cls.bridge(a, c).expect("enumerated bridge exists").clone();
                for v in self.active_in(key).iter() {
                    if self.graph.neighbors(v).is_disjoint(&target) {
                        self.set_done(v);
                    }
                }
                let mut gone = self.pd.one_pack(a).unwrap().clone();
                gone.difference_with(&target);
                self.move_all_done(&gone);
            }
            None => {
                let mut other_bridges = VertexSet::new(self.graph.n());
                for (c, set) in self.cls.bridges_from(a) {
                    if c != partner {
                        other_bridges.union_with(set);
                    }
                }
                for v in self.active_in(key).iter() {
                    if self.graph.neighbors(v).intersects(&other_bridges) {
                        self.set_done(v);
                    }
                }
                let targets: Vec<(usize, VertexSet)> = self
                    .cls
                    .bridges_from(a)
                    .filter(|&(c, _)| c != partner)
                    .map(|(c, set)| (c, set.clone()))
                    .collect();
                for (c, set) in targets {
                    let t_passive = set.intersection(&self.passive_set());
                    if t_passive.is_empty() {
                        continue;
                    }
                    for u in self.active_in(PackKey::One(c)).iter() {
                        if !t_passive.is_subset_of(&self.graph.closed_neighborhood(u)) {
                            self.set_done(u);
                        }
                    }
                    if !self.active_in(PackKey::One(c)).is_empty() {
                        self.move_all_done(&t_passive);
                    }
                    // Otherwise the bridge vertices stay passive with no
                    // active neighbors and liveness ends the branch.
                }
            }
        }
        self.bridge_processed.insert(a);
        self.record(
            13,
            GuessChoice::BridgeTarget {
                leg: self.graph.label(a),
                colour: colour.map(|c| self.graph.label(c)),
            },
        );
    }

    /// Steps 14/15 trigger: a leftover 1-pack with passive hub vertices.
    fn next_hub_pack(&self) -> Result<Option<(usize, PackKey, usize)>, SolveError> {
        let passive = self.passive_set();
        for a in self.pd.one_pack_legs() {
            if self.hub_processed.contains(&a)
                || self.family.contains(&PackKey::One(a))
                || self.passive_in(PackKey::One(a)).is_empty()
            {
                continue;
            }
            let hub = self.cls.hub(a).expect("1-pack classified");
            if !hub.intersects(&passive) {
                continue;
            }
            let key = self.unique_family_pack_with_leg(a)?;
            let hub_passive = hub.intersection(&passive);
            let mut clusters: Vec<usize> = hub_passive
                .iter()
                .filter_map(|v| self.cls.cluster_of(v))
                .collect();
            clusters.sort_unstable();
            clusters.dedup();
            return Ok(Some((a, key, clusters.len())));
        }
        Ok(None)
    }

    /// Steps 14/15: guess whether the family 2-pack's solution vertex
    /// covers the leftover pack's passive hub vertices. With hub vertices
    /// in two or more clusters a 2-pack vertex covers all of them or none,
    /// so the negative guess drops every active vertex touching them; with
    /// a single cluster only the full-coverage vertices are dropped.
    fn apply_hub_guess(
        &mut self,
        a: usize,
        key: PackKey,
        cluster_count: usize,
        covered: bool,
    ) -> Result<(), SolveError> {
        let hub_passive = self
            .cls
            .hub(a)
            .expect("1-pack classified")
            .intersection(&self.passive_set());
        let step = if cluster_count >= 2 { 14 } else { 15 };
        if covered {
            for v in self.active_in(key).iter() {
                if !hub_passive.is_subset_of(&self.graph.closed_neighborhood(v)) {
                    self.set_done(v);
                }
            }
            self.move_all_done(&hub_passive);
        } else if cluster_count >= 2 {
            for v in self.active_in(key).iter() {
                let touched = self.graph.neighbors(v).intersection(&hub_passive);
                if !touched.is_empty() {
                    if touched != hub_passive {
                        return Err(internal(format!(
                            "2-pack vertex {} covers part of a multi-cluster hub set",
                            self.graph.label(v)
                        )));
                    }
                    self.set_done(v);
                }
            }
        } else {
            for v in self.active_in(key).iter() {
                if hub_passive.is_subset_of(&self.graph.closed_neighborhood(v)) {
                    self.set_done(v);
                }
            }
        }
        self.hub_processed.insert(a);
        self.record(
            step,
            GuessChoice::HubCovered {
                leg: self.graph.label(a),
                covered,
            },
        );
        Ok(())
    }

    /// Clusters that still hold passive vertices, ascending.
    fn passive_clusters(&self) -> Vec<usize> {
        let passive = self.passive_set();
        (0..self.cls.clusters.len())
            .filter(|&i| self.cls.clusters[i].intersects(&passive))
            .collect()
    }

    /// Step 16: commit a family 1-pack to cover one passive cluster. The
    /// pack keeps only its intersection with the cluster; the cluster's
    /// passive vertices outside the pack are covered by any of them.
    fn apply_cluster_assignment(&mut self, cluster: usize, leg: usize) {
        let cluster_set = self.cls.clusters[cluster].clone();
        let pack_members = self.pd.one_pack(leg).expect("family 1-pack exists").clone();
        let mut outside = pack_members.clone();
        outside.difference_with(&cluster_set);
        self.move_all_done(&outside);
        let mut covered = cluster_set;
        covered.difference_with(&pack_members);
        covered.intersect_with(&self.passive_set());
        self.move_all_done(&covered);
        self.cluster_assignments.insert(cluster, leg);
        self.record(
            16,
            GuessChoice::ClusterDominator {
                cluster,
                leg: self.graph.label(leg),
            },
        );
    }

    /// Step 17: a family 1-pack confined to its hub vertices but never
    /// committed to a cluster would make this branch redundant (a solution
    /// here implies one that meets the independent set, found elsewhere).
    fn useless_hub_pack_exists(&self) -> bool {
        self.class_guess.iter().any(|(leg, class)| {
            *class == ClassGuess::Hub && !self.cluster_assignments.values().any(|l| l == leg)
        })
    }

    /// End-state of the 1-pack machinery: leftover packs have their
    /// passive vertices inside a single bridge class; family 1-packs keep
    /// actives inside one bridge class or one cluster.
    fn check_one_packs_final(&self) -> Result<(), SolveError> {
        let passive = self.passive_set();
        for a in self.pd.one_pack_legs() {
            let key = PackKey::One(a);
            if self.family.contains(&key) {
                let active = self.active_in(key);
                if active.is_empty() {
                    continue;
                }
                let in_one_bridge = self
                    .cls
                    .bridges_from(a)
                    .any(|(_, set)| active.is_subset_of(set));
                let in_one_cluster = self
                    .cls
                    .clusters
                    .iter()
                    .any(|cluster| active.is_subset_of(cluster));
                if !in_one_bridge && !in_one_cluster {
                    return Err(internal(format!(
                        "family 1-pack {} keeps actives across classes",
                        self.graph.label(a)
                    )));
                }
            } else {
                let pack_passive = self.pd.one_pack(a).unwrap().intersection(&passive);
                if pack_passive.is_empty() {
                    continue;
                }
                let confined = self
                    .cls
                    .bridges_from(a)
                    .any(|(_, set)| pack_passive.is_subset_of(set));
                if !confined {
                    return Err(internal(format!(
                        "leftover 1-pack {} keeps passive vertices outside a single bridge",
                        self.graph.label(a)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Step 18 to a fixed point: a passive vertex whose active neighbors
    /// all sit in one family pack can only be dominated from there, so it
    /// goes Done and that pack keeps only its dominators. Returns `false`
    /// when a passive vertex has no active neighbors at all or a family
    /// pack empties (the liveness conditions).
    fn apply_cleaning(&mut self) -> bool {
        loop {
            let mut changed = false;
            for v in 0..self.graph.n() {
                if self.state[v] != VertexState::Passive {
                    continue;
                }
                let mut holder: Option<PackKey> = None;
                let mut count = 0;
                for &key in &self.family {
                    if self.graph.neighbors(v).intersects(&self.active_in(key)) {
                        count += 1;
                        holder = Some(key);
                        if count > 1 {
                            break;
                        }
                    }
                }
                match count {
                    0 => return false,
                    1 => {
                        let x = holder.unwrap();
                        self.set_done(v);
                        for u in self.active_in(x).iter() {
                            if !self.graph.neighbors(u).contains(v) {
                                self.set_done(u);
                            }
                        }
                        if self.active_in(x).is_empty() {
                            return false;
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Step 19 single guess: does the solution vertex of family pack `x`
    /// dominate anything from the passive part of `w`? Both outcomes prune
    /// `x` and re-run the cleaning fixed point.
    fn apply_dom_guess(&mut self, w: PackKey, x: PackKey, dominates: bool) -> bool {
        self.dom_guessed.insert((w, x));
        let passive_w = self.passive_in(w);
        for u in self.active_in(x).iter() {
            let touches = self.graph.neighbors(u).intersects(&passive_w);
            if touches != dominates {
                self.set_done(u);
            }
        }
        self.record(
            19,
            GuessChoice::DominatesFrom {
                w: self.labeled_key(w),
                x: self.labeled_key(x),
                dominates,
            },
        );
        self.apply_cleaning()
    }

    /// The guess queue for the domination phase, frozen at phase entry:
    /// each leftover pack with passive vertices contributes its two
    /// dominator packs, in canonical order.
    fn dom_guess_queue(&self) -> Result<Vec<(PackKey, PackKey)>, SolveError> {
        let mut queue = Vec::new();
        for w in self.passive_packs() {
            let (y, z) = self.dominator_pair(w)?;
            queue.push((w, y));
            queue.push((w, z));
        }
        Ok(queue)
    }

    /// Every surviving active vertex of a dominating-constraint pack pair
    /// still has a neighbor inside the constrained pack.
    fn check_after_dom_guess(&self) -> Result<(), SolveError> {
        for w in self.passive_packs() {
            let (y, z) = self.dominator_pair(w)?;
            let members = self.pd.members(w).unwrap();
            for &side in &[y, z] {
                for u in self.active_in(side).iter() {
                    if !self.graph.neighbors(u).intersects(members) {
                        return Err(internal(format!(
                            "active vertex {} of {side} has no neighbor in constrained pack {w}",
                            self.graph.label(u)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Degree of each family pack in the CSP multigraph: distinct partners
    /// over independence constraints (shared legs) and dominating
    /// constraints (one per leftover pack with passive vertices).
    fn csp_degrees(&self) -> Result<Vec<(PackKey, BTreeSet<PackKey>)>, SolveError> {
        let mut partners: BTreeMap<PackKey, BTreeSet<PackKey>> = self
            .family
            .iter()
            .map(|&k| (k, BTreeSet::new()))
            .collect();
        for (i, &x) in self.family.iter().enumerate() {
            for &y in self.family.iter().skip(i + 1) {
                if x.shares_leg(&y) {
                    partners.get_mut(&x).unwrap().insert(y);
                    partners.get_mut(&y).unwrap().insert(x);
                }
            }
        }
        for w in self.passive_packs() {
            let (y, z) = self.dominator_pair(w)?;
            partners.get_mut(&y).unwrap().insert(z);
            partners.get_mut(&z).unwrap().insert(y);
        }
        Ok(partners.into_iter().collect())
    }

    /// Step 20 eligibility: three packs on a common leg (one in the
    /// family, two leftover packs with passive vertices) such that every
    /// relevant vertex has a private neighbor outside the triple whose
    /// whole reach into the triple stays in that vertex's own pack.
    fn eligible_split(&self, x: PackKey, w1: PackKey, w2: PackKey) -> bool {
        let mut union = self.pd.members(x).unwrap().clone();
        union.union_with(self.pd.members(w1).unwrap());
        union.union_with(self.pd.members(w2).unwrap());
        for &key in &[x, w1, w2] {
            let own = self.pd.members(key).unwrap();
            for v in own.iter() {
                if self.state[v] == VertexState::Done {
                    continue;
                }
                let mut outside = self.graph.neighbors(v).clone();
                outside.difference_with(&union);
                let found = outside.iter().any(|n| {
                    self.graph.neighbors(n).intersection(&union).is_subset_of(own)
                });
                if !found {
                    return false;
                }
            }
        }
        true
    }

    fn find_split_triple(&self) -> Result<Option<(PackKey, PackKey, PackKey)>, SolveError> {
        let degrees = self.csp_degrees()?;
        for (x, partners) in degrees {
            if partners.len() < 3 {
                continue;
            }
            for leg in x.legs() {
                let candidates: Vec<PackKey> = self
                    .pd
                    .packs_with_leg(leg)
                    .into_iter()
                    .filter(|w| !self.family.contains(w) && !self.passive_in(*w).is_empty())
                    .collect();
                for (i, &w1) in candidates.iter().enumerate() {
                    for &w2 in candidates.iter().skip(i + 1) {
                        if self.eligible_split(x, w1, w2) {
                            return Ok(Some((x, w1, w2)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// The two-clique split of an eligible triple: the components of the
    /// cross-pack graph on the triple's surviving vertices. There are at
    /// most two, each a clique, with no cross-pack edges between them.
    fn split_components(
        &self,
        x: PackKey,
        w1: PackKey,
        w2: PackKey,
    ) -> Result<(VertexSet, VertexSet), SolveError> {
        let mut vh = self.pd.members(x).unwrap().clone();
        vh.union_with(self.pd.members(w1).unwrap());
        vh.union_with(self.pd.members(w2).unwrap());
        let survivors: Vec<usize> = vh
            .iter()
            .filter(|&v| self.state[v] != VertexState::Done)
            .collect();
        let index: BTreeMap<usize, usize> =
            survivors.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut component = vec![usize::MAX; survivors.len()];
        let mut count = 0;
        for i in 0..survivors.len() {
            if component[i] != usize::MAX {
                continue;
            }
            let id = count;
            count += 1;
            let mut queue = vec![i];
            component[i] = id;
            while let Some(ci) = queue.pop() {
                let cv = survivors[ci];
                for w in self.graph.neighbors(cv).iter() {
                    if let Some(&wi) = index.get(&w) {
                        if component[wi] == usize::MAX
                            && self.pd.pack_of(w) != self.pd.pack_of(cv)
                        {
                            component[wi] = id;
                            queue.push(wi);
                        }
                    }
                }
            }
        }
        if count > 2 {
            return Err(internal(format!(
                "split triple ({x}, {w1}, {w2}) falls into {count} components"
            )));
        }
        let n = self.graph.n();
        let mut k1 = VertexSet::new(n);
        let mut k2 = VertexSet::new(n);
        for (i, &v) in survivors.iter().enumerate() {
            if component[i] == 0 {
                k1.insert(v);
            } else {
                k2.insert(v);
            }
        }
        Ok((k1, k2))
    }

    fn check_split(&self, k1: &VertexSet, k2: &VertexSet) -> Result<(), SolveError> {
        for side in [k1, k2] {
            if !self.graph.is_clique(side) {
                return Err(internal("two-clique split side is not a clique"));
            }
        }
        for v in k1.iter() {
            for w in k2.iter() {
                if self.pd.pack_of(v) != self.pd.pack_of(w) && self.graph.has_edge(v, w) {
                    return Err(internal(
                        "cross-pack edge between the two sides of a clique split",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Step 20 single guess: the solution vertex of `x` lies in the chosen
    /// side. The other side of `x` goes Done; the chosen side's passive
    /// vertices in `w1`/`w2` are covered by it; the rest is handled by the
    /// cleaning fixed point.
    fn apply_clique_split(
        &mut self,
        x: PackKey,
        w1: PackKey,
        w2: PackKey,
        keep: &VertexSet,
        first: bool,
    ) -> bool {
        for u in self.active_in(x).iter() {
            if !keep.contains(u) {
                self.set_done(u);
            }
        }
        let mut covered = self.pd.members(w1).unwrap().clone();
        covered.union_with(self.pd.members(w2).unwrap());
        covered.intersect_with(keep);
        covered.intersect_with(&self.passive_set());
        self.move_all_done(&covered);
        self.record(
            20,
            GuessChoice::CliqueSide {
                x: self.labeled_key(x),
                w1: self.labeled_key(w1),
                w2: self.labeled_key(w2),
                first,
            },
        );
        self.apply_cleaning()
    }

    /// True when the states, family, and bookkeeping agree; the graph and
    /// decomposition are shared per branch root.
    pub fn same_search_state(&self, other: &BranchContext) -> bool {
        self.state == other.state
            && self.family == other.family
            && self.class_guess == other.class_guess
            && self.cluster_assignments == other.cluster_assignments
            && self.bridge_processed == other.bridge_processed
            && self.hub_processed == other.hub_processed
            && self.dom_guessed == other.dom_guessed
            && self.guess_log == other.guess_log
    }
}

/// Step 18 as a self-contained operation: the cleaning fixed point. The
/// result is idempotent; a branch killed by stranded passive vertices is
/// left for `check_liveness` to report.
pub fn normalize_passive(mut ctx: BranchContext) -> BranchContext {
    let _ = ctx.apply_cleaning();
    ctx
}

// ---------------------------------------------------------------------------
// Search driver.
// ---------------------------------------------------------------------------

struct Env<'a> {
    opts: &'a SolveOptions,
    nodes: &'a AtomicU64,
    parallel: bool,
}

impl Env<'_> {
    fn on_guess(&self, ctx: &BranchContext) -> Result<(), SolveError> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if self.opts.trace {
            if let Some(rec) = ctx.guess_log.last() {
                eprintln!("step={} choice={} depth={}", rec.step, rec.choice, ctx.depth());
            }
        }
        self.after_state_change(ctx)
    }

    fn on_restart_guess(&self, picked_label: usize, depth: usize) {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if self.opts.trace {
            eprintln!(
                "step=3 choice={} depth={depth}",
                GuessChoice::PickVertex(picked_label)
            );
        }
    }

    fn on_disjoint_guess(&self, depth: usize) {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        if self.opts.trace {
            eprintln!("step=3 choice={} depth={depth}", GuessChoice::DisjointFromI);
        }
    }

    fn after_state_change(&self, ctx: &BranchContext) -> Result<(), SolveError> {
        if self.opts.candidate_samples > 0 && ctx.safe {
            sampled_candidate_check(ctx, self.opts.candidate_samples)?;
        }
        Ok(())
    }
}

/// Samples dominating candidates (one active vertex per family pack,
/// nonadjacent across shared-leg pairs) and verifies each dominates
/// Active ∪ Done — the safety property of the partition.
fn sampled_candidate_check(ctx: &BranchContext, samples: usize) -> Result<(), SolveError> {
    let mut seed = 0x5AFE_u64;
    for rec in &ctx.guess_log {
        seed = seed
            .wrapping_mul(0x100000001B3)
            .wrapping_add(rec.step as u64 + rec.choice.to_string().len() as u64);
    }
    let mut rng = SplitMix64::new(seed);
    let actives: Vec<Vec<usize>> = ctx
        .family
        .iter()
        .map(|&key| ctx.active_in(key).to_vec())
        .collect();
    if actives.iter().any(|a| a.is_empty()) {
        return Ok(());
    }
    let mut target = ctx.active_set();
    for v in 0..ctx.graph.n() {
        if ctx.state[v] == VertexState::Done {
            target.insert(v);
        }
    }
    let mut found = 0;
    for _ in 0..samples * 20 {
        if found == samples {
            break;
        }
        let candidate: Vec<usize> = actives
            .iter()
            .map(|vals| vals[rng.next_usize(vals.len())])
            .collect();
        let mut valid = true;
        'pairs: for (i, &x) in ctx.family.iter().enumerate() {
            for (j, &y) in ctx.family.iter().enumerate().skip(i + 1) {
                if x.shares_leg(&y) && ctx.graph.has_edge(candidate[i], candidate[j]) {
                    valid = false;
                    break 'pairs;
                }
            }
        }
        if !valid {
            continue;
        }
        found += 1;
        let set = VertexSet::from_iter(ctx.graph.n(), candidate.iter().copied());
        if !ctx.graph.dominates(&set, &target) {
            return Err(internal(format!(
                "sampled dominating candidate {:?} misses Active ∪ Done",
                ctx.graph.labels_of(&set)
            )));
        }
    }
    Ok(())
}

type Sink<'s> = dyn FnMut(&Env, BranchContext) -> Result<Option<Solution>, SolveError> + 's;

/// Steps 11-17 as one composed enumeration. Children that fail liveness
/// (or the step 17 redundancy condition) are dropped when `prune_dead`.
fn one_packs_phase(
    env: &Env,
    ctx: BranchContext,
    prune_dead: bool,
    sink: &mut Sink,
) -> Result<Option<Solution>, SolveError> {
    // Step 11, one family 1-pack at a time.
    let unguessed = ctx
        .family
        .iter()
        .find_map(|&key| match key {
            PackKey::One(a) if !ctx.class_guess.contains_key(&a) => Some(a),
            _ => None,
        });
    if let Some(a) = unguessed {
        let mut classes: Vec<ClassGuess> = ctx
            .cls
            .bridges_from(a)
            .map(|(b, _)| ClassGuess::Bridge(b))
            .collect();
        if !ctx.cls.hub(a).expect("family 1-pack classified").is_empty() {
            classes.push(ClassGuess::Hub);
        }
        for class in classes {
            let mut child = ctx.clone();
            child.apply_class_guess(a, class);
            env.on_guess(&child)?;
            if prune_dead && !check_liveness(&child) {
                continue;
            }
            if let Some(sol) = one_packs_phase(env, child, prune_dead, sink)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }

    // Step 12, then the per-pack guesses of steps 13-15, then clusters.
    let mut ctx = ctx;
    if ctx.bridge_processed.is_empty() && ctx.hub_processed.is_empty() {
        // Entering the leftover-pack stages for the first time.
        ctx.apply_inner_extension()?;
        env.after_state_change(&ctx)?;
        if prune_dead && !check_liveness(&ctx) {
            return Ok(None);
        }
    }

    if let Some((a, key, partner)) = ctx.next_bridge_pack()? {
        for colour in ctx.bridge_choices(a, partner) {
            let mut child = ctx.clone();
            child.apply_bridge_guess(a, key, partner, colour);
            env.on_guess(&child)?;
            if prune_dead && !check_liveness(&child) {
                continue;
            }
            if let Some(sol) = one_packs_phase(env, child, prune_dead, sink)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }

    if let Some((a, key, cluster_count)) = ctx.next_hub_pack()? {
        for covered in [true, false] {
            let mut child = ctx.clone();
            child.apply_hub_guess(a, key, cluster_count, covered)?;
            env.on_guess(&child)?;
            if prune_dead && !check_liveness(&child) {
                continue;
            }
            if let Some(sol) = one_packs_phase(env, child, prune_dead, sink)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }

    // Step 16: assign a distinct family 1-pack to every passive cluster.
    let pending: Vec<usize> = ctx
        .passive_clusters()
        .into_iter()
        .filter(|c| !ctx.cluster_assignments.contains_key(c))
        .collect();
    if let Some(&cluster) = pending.first() {
        if ctx.passive_clusters().len() > ctx.k {
            return Ok(None);
        }
        let candidates: Vec<usize> = ctx
            .family
            .iter()
            .filter_map(|&key| match key {
                PackKey::One(a)
                    if !ctx.cluster_assignments.values().any(|&l| l == a)
                        && ctx.active_in(key).intersects(&ctx.cls.clusters[cluster]) =>
                {
                    Some(a)
                }
                _ => None,
            })
            .collect();
        for leg in candidates {
            let mut child = ctx.clone();
            child.apply_cluster_assignment(cluster, leg);
            env.on_guess(&child)?;
            if prune_dead && !check_liveness(&child) {
                continue;
            }
            if let Some(sol) = one_packs_phase(env, child, prune_dead, sink)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }

    // Step 17 and the end-state checks.
    if ctx.useless_hub_pack_exists() {
        return Ok(None);
    }
    if env.opts.check_lemmas {
        ctx.check_one_packs_final()?;
    }
    sink(env, ctx)
}

/// Public collector for the 1-pack machinery: every leaf context of steps
/// 11-17. Children failing liveness or the step 17 condition are dropped.
pub fn branch_one_packs(ctx: &BranchContext) -> Result<Vec<BranchContext>, SolveError> {
    let opts = SolveOptions {
        check_lemmas: false,
        ..SolveOptions::default()
    };
    let nodes = AtomicU64::new(0);
    let env = Env {
        opts: &opts,
        nodes: &nodes,
        parallel: false,
    };
    let mut out = Vec::new();
    one_packs_phase(&env, ctx.clone(), true, &mut |_, leaf| {
        out.push(leaf);
        Ok(None)
    })?;
    Ok(out)
}

/// Step 19 enumeration: a cascade of binary guesses over the frozen queue
/// of (leftover pack, family pack) pairs, each followed by the cleaning
/// fixed point.
fn dom_guess_phase(
    env: &Env,
    ctx: BranchContext,
    queue: &[(PackKey, PackKey)],
    pos: usize,
    prune_dead: bool,
    sink: &mut Sink,
) -> Result<Option<Solution>, SolveError> {
    if let Some(&(w, x)) = queue.get(pos) {
        for dominates in [true, false] {
            let mut child = ctx.clone();
            let alive = child.apply_dom_guess(w, x, dominates);
            env.on_guess(&child)?;
            if prune_dead && !(alive && check_liveness(&child)) {
                continue;
            }
            if let Some(sol) = dom_guess_phase(env, child, queue, pos + 1, prune_dead, sink)? {
                return Ok(Some(sol));
            }
        }
        return Ok(None);
    }
    if env.opts.check_lemmas {
        ctx.check_after_dom_guess()?;
    }
    sink(env, ctx)
}

/// Public collector for step 19, the full cross product over the frozen
/// pair queue, unfiltered.
pub fn branch_dom_guess(ctx: &BranchContext) -> Result<Vec<BranchContext>, SolveError> {
    let opts = SolveOptions {
        check_lemmas: false,
        ..SolveOptions::default()
    };
    let nodes = AtomicU64::new(0);
    let env = Env {
        opts: &opts,
        nodes: &nodes,
        parallel: false,
    };
    let queue = ctx.dom_guess_queue()?;
    let mut out = Vec::new();
    dom_guess_phase(&env, ctx.clone(), &queue, 0, false, &mut |_, leaf| {
        out.push(leaf);
        Ok(None)
    })?;
    Ok(out)
}

/// Step 20 loop: while some CSP variable binds three or more others, find
/// an eligible triple, split it into two cliques, and guess the side
/// containing the solution vertex.
fn degree_reduce_phase(
    env: &Env,
    ctx: BranchContext,
    prune_dead: bool,
    sink: &mut Sink,
) -> Result<Option<Solution>, SolveError> {
    let max_degree = ctx
        .csp_degrees()?
        .into_iter()
        .map(|(_, p)| p.len())
        .max()
        .unwrap_or(0);
    if max_degree <= 2 {
        return sink(env, ctx);
    }
    let (x, w1, w2) = ctx.find_split_triple()?.ok_or_else(|| {
        internal("constraint degree exceeds 2 but no eligible clique-split triple exists")
    })?;
    let (k1, k2) = ctx.split_components(x, w1, w2)?;
    if env.opts.check_lemmas {
        ctx.check_split(&k1, &k2)?;
    }
    for (keep, first) in [(&k1, true), (&k2, false)] {
        let mut child = ctx.clone();
        let alive = child.apply_clique_split(x, w1, w2, keep, first);
        env.on_guess(&child)?;
        if prune_dead && !(alive && check_liveness(&child)) {
            continue;
        }
        if env.opts.check_lemmas && alive {
            // The two constrained packs hold no passive vertices anymore.
            let mut leftover = child.passive_in(w1);
            leftover.union_with(&child.passive_in(w2));
            if !leftover.is_empty() {
                return Err(internal(
                    "clique split left passive vertices in its constrained packs",
                ));
            }
        }
        if let Some(sol) = degree_reduce_phase(env, child, prune_dead, sink)? {
            return Ok(Some(sol));
        }
    }
    Ok(None)
}

/// Public collector for step 20, unfiltered leaves of the whole loop.
pub fn reduce_csp_degree(ctx: &BranchContext) -> Result<Vec<BranchContext>, SolveError> {
    let opts = SolveOptions {
        check_lemmas: false,
        ..SolveOptions::default()
    };
    let nodes = AtomicU64::new(0);
    let env = Env {
        opts: &opts,
        nodes: &nodes,
        parallel: false,
    };
    let mut out = Vec::new();
    degree_reduce_phase(&env, ctx.clone(), false, &mut |_, leaf| {
        out.push(leaf);
        Ok(None)
    })?;
    Ok(out)
}

/// Builds the auxiliary CSP for a fully reduced context, solves it, and
/// assembles the verified solution.
pub fn finish_via_csp(ctx: &BranchContext) -> Result<Option<Solution>, SolveError> {
    finish_via_csp_inner(None, ctx)
}

fn finish_via_csp_inner(
    env: Option<&Env>,
    ctx: &BranchContext,
) -> Result<Option<Solution>, SolveError> {
    let inst = csp::build_csp(ctx)?;
    if let Some(env) = env {
        if env.opts.trace {
            eprint!("{}", inst.dump(&ctx.graph));
        }
        if env.opts.verify_replay {
            verify_replay(ctx)?;
        }
    }
    let assignment = csp::solve_degree2(&inst)
        .map_err(|e| internal(format!("CSP degree bound violated after reduction: {e}")))?;
    let Some(assignment) = assignment else {
        return Ok(None);
    };
    let mut vertices: Vec<usize> = ctx.forced.clone();
    vertices.extend(assignment.values.iter().map(|&v| ctx.graph.label(v)));
    assemble_solution(&ctx.original, ctx.k0, vertices)
}

fn assemble_solution(
    original: &Graph,
    k0: usize,
    vertices: Vec<usize>,
) -> Result<Option<Solution>, SolveError> {
    let set = VertexSet::from_iter(original.n(), vertices);
    let transcript = Transcript {
        dominates_all: original.dominates(&set, &original.vertex_set()),
        within_budget: set.len() <= k0,
    };
    if !transcript.dominates_all || !transcript.within_budget {
        return Err(internal(format!(
            "assembled solution {:?} fails verification (dominates: {}, budget: {})",
            set.to_vec(),
            transcript.dominates_all,
            transcript.within_budget
        )));
    }
    Ok(Some(Solution {
        vertices: set,
        kind: SolutionKind::DominatingSet,
        transcript,
    }))
}

/// Re-runs the recorded guesses from a fresh branch root and checks that
/// the replay reproduces this context exactly.
fn verify_replay(ctx: &BranchContext) -> Result<(), SolveError> {
    let root = RootInstance {
        graph: ctx.graph.clone(),
        k: ctx.k,
        forced: ctx.forced.clone(),
        i_set: ctx.i_set.clone(),
        original: ctx.original.clone(),
        k0: ctx.k0,
    };
    let fresh = BranchContext::at_root(&root)?;
    let replayed = replay_guesses(&fresh, &ctx.guess_log)?;
    if !replayed.same_search_state(ctx) {
        return Err(internal("guess-log replay does not reproduce the context"));
    }
    Ok(())
}

/// Replays a guess log against a branch-root context by re-running the
/// same pipeline with choices scripted from the log.
pub fn replay_guesses(
    root: &BranchContext,
    log: &[GuessRecord],
) -> Result<BranchContext, SolveError> {
    let mut iter = log.iter().peekable();
    let family_rec = iter
        .next()
        .ok_or_else(|| internal("replay log is empty"))?;
    let GuessChoice::PackFamily(labeled) = &family_rec.choice else {
        return Err(internal("replay log does not start with a family guess"));
    };
    // Family keys are recorded with labeled legs; map them back.
    let mut label_to_id: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..root.graph.n() {
        label_to_id.insert(root.graph.label(v), v);
    }
    let unlabel = |key: &PackKey| -> PackKey {
        match *key {
            PackKey::One(a) => PackKey::One(label_to_id[&a]),
            PackKey::Two(a, b) => PackKey::two(label_to_id[&a], label_to_id[&b]),
        }
    };
    let family: Vec<PackKey> = labeled.iter().map(&unlabel).collect();
    let mut ctx = propagate_safe_state(root.clone().with_family(family));

    let mut inner_extension_done = false;
    for rec in iter {
        match &rec.choice {
            GuessChoice::OnePackClass { leg, class } => {
                let a = label_to_id[leg];
                let class = match class {
                    ClassGuess::Bridge(b) => ClassGuess::Bridge(label_to_id[b]),
                    ClassGuess::Hub => ClassGuess::Hub,
                };
                ctx.apply_class_guess(a, class);
            }
            GuessChoice::BridgeTarget { leg, colour } => {
                if !inner_extension_done {
                    ctx.apply_inner_extension()?;
                    inner_extension_done = true;
                }
                let a = label_to_id[leg];
                let key = ctx.unique_family_pack_with_leg(a)?;
                let partner = key.legs().into_iter().find(|&l| l != a).unwrap();
                ctx.apply_bridge_guess(a, key, partner, colour.map(|c| label_to_id[&c]));
            }
            GuessChoice::HubCovered { leg, covered } => {
                if !inner_extension_done {
                    ctx.apply_inner_extension()?;
                    inner_extension_done = true;
                }
                let a = label_to_id[leg];
                let key = ctx.unique_family_pack_with_leg(a)?;
                let hub_passive = ctx
                    .cls
                    .hub(a)
                    .expect("classified")
                    .intersection(&ctx.passive_set());
                let mut clusters: Vec<usize> = hub_passive
                    .iter()
                    .filter_map(|v| ctx.cls.cluster_of(v))
                    .collect();
                clusters.sort_unstable();
                clusters.dedup();
                ctx.apply_hub_guess(a, key, clusters.len(), *covered)?;
            }
            GuessChoice::ClusterDominator { cluster, leg } => {
                if !inner_extension_done {
                    ctx.apply_inner_extension()?;
                    inner_extension_done = true;
                }
                ctx.apply_cluster_assignment(*cluster, label_to_id[leg]);
            }
            GuessChoice::DominatesFrom { w, x, dominates } => {
                if !inner_extension_done {
                    ctx.apply_inner_extension()?;
                    inner_extension_done = true;
                }
                let _ = ctx.apply_cleaning();
                let _ = ctx.apply_dom_guess(unlabel(w), unlabel(x), *dominates);
            }
            GuessChoice::CliqueSide { x, w1, w2, first } => {
                let (x, w1, w2) = (unlabel(x), unlabel(w1), unlabel(w2));
                let (k1, k2) = ctx.split_components(x, w1, w2)?;
                let keep = if *first { &k1 } else { &k2 };
                let _ = ctx.apply_clique_split(x, w1, w2, keep, *first);
            }
            other => return Err(internal(format!("unexpected guess in replay: {other}"))),
        }
    }
    if !inner_extension_done {
        ctx.apply_inner_extension()?;
    }
    let _ = ctx.apply_cleaning();
    Ok(ctx)
}

// The replay applies the cleaning fixed point after the 1-pack stage and
// before each dom guess; apply_dom_guess also runs it, so an extra pass is
// idempotent.

fn explore_disjoint(env: &Env, ctx: BranchContext) -> Result<Option<Solution>, SolveError> {
    if env.opts.trace {
        eprint!("{}", ctx.pd.dump(&ctx.graph));
    }
    let families = enumerate_pack_families(&ctx);
    let run = |family: Vec<PackKey>| -> Result<Option<Solution>, SolveError> {
        let child = ctx.clone().with_family(family);
        env.on_guess(&child)?;
        let child = propagate_safe_state(child);
        env.after_state_change(&child)?;
        if !check_liveness(&child) {
            return Ok(None);
        }
        one_packs_phase(env, child, true, &mut |env, ctx| after_one_packs(env, ctx))
    };
    search_first(env, families, run)
}

fn after_one_packs(env: &Env, mut ctx: BranchContext) -> Result<Option<Solution>, SolveError> {
    let alive = ctx.apply_cleaning();
    env.after_state_change(&ctx)?;
    if !(alive && check_liveness(&ctx)) {
        return Ok(None);
    }
    let queue = ctx.dom_guess_queue()?;
    dom_guess_phase(env, ctx, &queue, 0, true, &mut |env, ctx| {
        degree_reduce_phase(env, ctx, true, &mut |env, ctx| {
            finish_via_csp_inner(Some(env), &ctx)
        })
    })
}

fn solve_level(
    env: &Env,
    graph: Arc<Graph>,
    k: usize,
    forced: Vec<usize>,
    original: Arc<Graph>,
    k0: usize,
) -> Result<Option<Solution>, SolveError> {
    if graph.n() == 0 {
        return assemble_solution(&original, k0, forced);
    }
    let root = RootInstance::with_budget(graph, k, forced, original, k0)?;
    match root.step_bounds() {
        Verdict::Yes(witness) => {
            return assemble_solution(&root.original, root.k0, witness.to_vec())
        }
        Verdict::No => return Ok(None),
        Verdict::Continue => {}
    }
    let children = root.branch_on_independent_set()?;
    let depth = root.forced.len();
    let run = |child: BranchChild| -> Result<Option<Solution>, SolveError> {
        match child {
            BranchChild::Restart {
                graph,
                k,
                forced,
                picked_label,
            } => {
                env.on_restart_guess(picked_label, depth);
                solve_level(env, graph, k, forced, root.original.clone(), root.k0)
            }
            BranchChild::Disjoint(ctx) => {
                env.on_disjoint_guess(depth);
                explore_disjoint(env, ctx)
            }
        }
    };
    search_first(env, children, run)
}

/// Runs `f` over the children, first hit wins. Parallel when the
/// environment allows it; the YES/NO answer is schedule-independent, the
/// witness only under sequential order.
fn search_first<T, F>(env: &Env, items: Vec<T>, f: F) -> Result<Option<Solution>, SolveError>
where
    T: Send,
    F: Fn(T) -> Result<Option<Solution>, SolveError> + Sync + Send,
{
    if env.parallel && items.len() > 1 {
        items
            .into_par_iter()
            .find_map_any(|item| f(item).transpose())
            .transpose()
    } else {
        for item in items {
            if let Some(sol) = f(item)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }
}

/// Decides whether the claw-free graph `g` has a dominating set of at most
/// `k` vertices, returning a verified witness on YES.
pub fn solve(g: &Graph, k: usize) -> Result<Option<Solution>, SolveError> {
    solve_with(g, k, &SolveOptions::default()).map(|o| o.solution)
}

pub fn solve_with(
    g: &Graph,
    k: usize,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolveError> {
    if let Some((center, leaves)) = g.find_claw() {
        return Err(SolveError::NotClawFree {
            center: g.label(center),
            leaves: labeled_set(g, &leaves),
        });
    }
    let nodes = AtomicU64::new(0);
    let sequential = opts.deterministic || opts.trace;
    let threads = if sequential {
        1
    } else if opts.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        opts.threads
    };
    let env = Env {
        opts,
        nodes: &nodes,
        parallel: threads > 1,
    };
    let graph = Arc::new(g.clone());
    let original = graph.clone();
    let solution = if threads > 1 && opts.threads != 0 {
        // Explicit cap: run on a dedicated pool of that size.
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| internal(format!("worker pool: {e}")))?;
        pool.install(|| solve_level(&env, graph, k, Vec::new(), original, k))?
    } else {
        // Sequential, or the default cap on the global pool.
        solve_level(&env, graph, k, Vec::new(), original, k)?
    };
    Ok(SolveOutcome {
        solution,
        stats: SolveStats {
            branch_nodes: nodes.load(Ordering::Relaxed),
        },
    })
}
