//! Brute-force ground truth for every problem in the toolkit.
//!
//! These solvers exist to be obviously correct: plain subset enumeration in
//! increasing size and lexicographic order, with hard instance-size guards
//! that fail loudly instead of hanging. Everything else in the crate is
//! tested against them.

use crate::bitset::VertexSet;
use crate::graph::Graph;
use crate::reductions::RedBlueInstance;
use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for brute force: {0}")]
    InstanceTooLarge(String),
    #[error("colourful oracle needs a colouring")]
    MissingColours,
}

/// Answer of a brute-force search. When `feasible` the witness is present,
/// re-verified, and lexicographically least among optimum solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub feasible: bool,
    pub witness: Option<VertexSet>,
    pub optimum: Option<usize>,
}

impl OracleAnswer {
    fn no() -> Self {
        OracleAnswer {
            feasible: false,
            witness: None,
            optimum: None,
        }
    }

    fn yes(witness: VertexSet) -> Self {
        OracleAnswer {
            feasible: true,
            optimum: Some(witness.len()),
            witness: Some(witness),
        }
    }
}

/// Number of subsets the search would visit; used by the size guards.
fn subset_budget(n: usize, kmax: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 0..=kmax.min(n) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((n - s) as u128) / (s as u128 + 1);
    }
    total
}

const DOMINATION_VERTEX_LIMIT: usize = 24;
const SUBSET_BUDGET_LIMIT: u128 = 1 << 26;
const CLIQUE_VERTEX_LIMIT: usize = 32;

fn guard_domination(n: usize, kmax: usize, what: &str) -> Result<(), OracleError> {
    if n <= DOMINATION_VERTEX_LIMIT || subset_budget(n, kmax) <= SUBSET_BUDGET_LIMIT {
        Ok(())
    } else {
        Err(OracleError::InstanceTooLarge(format!(
            "{what} on n = {n}, kmax = {kmax} exceeds the enumeration budget"
        )))
    }
}

/// Minimum dominating set by exhaustive search over subsets of size at most
/// `kmax`, in increasing size then lexicographic order.
pub fn brute_mds(g: &Graph, kmax: usize) -> Result<OracleAnswer, OracleError> {
    brute_domination(g, kmax, false)
}

/// As [`brute_mds`] but restricted to independent witnesses.
pub fn brute_mids(g: &Graph, kmax: usize) -> Result<OracleAnswer, OracleError> {
    brute_domination(g, kmax, true)
}

fn brute_domination(
    g: &Graph,
    kmax: usize,
    independent: bool,
) -> Result<OracleAnswer, OracleError> {
    let n = g.n();
    let kmax = kmax.min(n);
    guard_domination(n, kmax, if independent { "brute_mids" } else { "brute_mds" })?;
    let all = g.vertex_set();
    for size in 0..=kmax {
        for combo in (0..n).combinations(size) {
            let d = VertexSet::from_iter(n, combo);
            if independent && !g.is_independent(&d) {
                continue;
            }
            if g.dominates(&d, &all) {
                assert!(g.dominates(&d, &all));
                return Ok(OracleAnswer::yes(d));
            }
        }
    }
    Ok(OracleAnswer::no())
}

/// Maximum clique by depth-first enumeration of all cliques in ascending
/// vertex order; the first clique of each record size is the
/// lexicographically least one of that size.
pub fn brute_max_clique(g: &Graph) -> Result<OracleAnswer, OracleError> {
    let n = g.n();
    if n > CLIQUE_VERTEX_LIMIT {
        return Err(OracleError::InstanceTooLarge(format!(
            "brute_max_clique on n = {n} > {CLIQUE_VERTEX_LIMIT}"
        )));
    }
    let mut best = VertexSet::new(n);
    let mut current = Vec::new();
    let candidates = g.vertex_set();
    extend_clique(g, &mut current, &candidates, &mut best);
    assert!(g.is_clique(&best));
    Ok(OracleAnswer {
        feasible: true,
        optimum: Some(best.len()),
        witness: Some(best),
    })
}

fn extend_clique(g: &Graph, current: &mut Vec<usize>, candidates: &VertexSet, best: &mut VertexSet) {
    if current.len() > best.len() {
        *best = VertexSet::from_iter(g.n(), current.iter().copied());
    }
    if current.len() + candidates.len() <= best.len() {
        return;
    }
    for v in candidates.iter() {
        let mut next = candidates.intersection(g.neighbors(v));
        for w in 0..=v {
            next.remove(w);
        }
        current.push(v);
        extend_clique(g, current, &next, best);
        current.pop();
    }
}

/// Red-blue domination: a red set of size at most `kmax` dominating every
/// blue vertex, by exhaustive search over red subsets.
pub fn brute_rbds(inst: &RedBlueInstance, kmax: usize) -> Result<OracleAnswer, OracleError> {
    let reds: Vec<usize> = inst.reds.iter().collect();
    let kmax = kmax.min(reds.len());
    guard_domination(reds.len(), kmax, "brute_rbds")?;
    for size in 0..=kmax {
        for combo in reds.iter().copied().combinations(size) {
            let d = VertexSet::from_iter(inst.graph.n(), combo);
            if inst.graph.dominates(&d, &inst.blues) {
                assert!(inst.graph.dominates(&d, &inst.blues));
                return Ok(OracleAnswer::yes(d));
            }
        }
    }
    Ok(OracleAnswer::no())
}

/// Colourful red-blue domination: exactly one red per colour `1..=k`, all
/// colours distinct, dominating every blue vertex.
pub fn brute_colourful_rbds(inst: &RedBlueInstance) -> Result<OracleAnswer, OracleError> {
    let colors = inst.colors.as_ref().ok_or(OracleError::MissingColours)?;
    let k = inst.k;
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (&r, &c) in colors {
        classes[c - 1].push(r);
    }
    if classes.iter().any(|class| class.is_empty()) {
        return Ok(OracleAnswer::no());
    }
    let budget: u128 = classes.iter().map(|c| c.len() as u128).product();
    if budget > SUBSET_BUDGET_LIMIT {
        return Err(OracleError::InstanceTooLarge(format!(
            "brute_colourful_rbds would enumerate {budget} tuples"
        )));
    }
    let mut pick = vec![0usize; k];
    loop {
        let d = VertexSet::from_iter(
            inst.graph.n(),
            pick.iter().enumerate().map(|(c, &i)| classes[c][i]),
        );
        if d.len() == k && inst.graph.dominates(&d, &inst.blues) {
            return Ok(OracleAnswer::yes(d));
        }
        // Advance the class-wise odometer.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(OracleAnswer::no());
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < classes[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}
