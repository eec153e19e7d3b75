//! The auxiliary binary CSP that finishes a solver branch.
//!
//! One variable per chosen pack, values are the pack's surviving active
//! vertices, and two constraint families: independence constraints between
//! chosen packs sharing a leg, and dominating constraints forcing the two
//! dominator packs of a leftover pack to jointly cover its passive
//! vertices. Once the constraint multigraph has maximum degree two the
//! instance decomposes into paths and cycles and is solved by list pruning.

use crate::graph::Graph;
use crate::packs::PackKey;
use crate::solver::{BranchContext, SolveError};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CspError {
    #[error("variable {variable} is bound to more than two other variables")]
    DegreeTooHigh { variable: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintTag {
    Independence,
    /// Dominating constraint induced by the passive vertices of this pack.
    Dominating(PackKey),
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Variable indices with `x < y`; allowed pairs are oriented the same
    /// way.
    pub x: usize,
    pub y: usize,
    /// Extensional allowed set, sorted.
    pub allowed: Vec<(usize, usize)>,
    pub tags: Vec<ConstraintTag>,
}

impl Constraint {
    pub fn new(x: usize, y: usize, mut allowed: Vec<(usize, usize)>, tag: ConstraintTag) -> Self {
        assert_ne!(x, y, "constraints bind two distinct variables");
        let (x, y) = if x < y {
            (x, y)
        } else {
            allowed = allowed.into_iter().map(|(a, b)| (b, a)).collect();
            (y, x)
        };
        allowed.sort_unstable();
        allowed.dedup();
        Constraint {
            x,
            y,
            allowed,
            tags: vec![tag],
        }
    }

    pub fn allows(&self, val_x: usize, val_y: usize) -> bool {
        self.allowed.binary_search(&(val_x, val_y)).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct CspInstance {
    /// Variables in canonical pack order.
    pub variables: Vec<PackKey>,
    /// Sorted value list (vertex ids) per variable.
    pub values: Vec<Vec<usize>>,
    pub constraints: Vec<Constraint>,
}

/// A chosen value per variable, indexed like `CspInstance::variables`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn satisfies(&self, inst: &CspInstance) -> bool {
        self.values.len() == inst.variables.len()
            && self
                .values
                .iter()
                .enumerate()
                .all(|(i, v)| inst.values[i].contains(v))
            && inst
                .constraints
                .iter()
                .all(|c| c.allows(self.values[c.x], self.values[c.y]))
    }
}

impl CspInstance {
    /// Debug serialization consumed by the trace stream: one `v` line per
    /// variable and one `c` line per constraint, ids mapped through graph
    /// labels.
    pub fn dump(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (i, key) in self.variables.iter().enumerate() {
            let _ = write!(out, "v {key} :");
            for &val in &self.values[i] {
                let _ = write!(out, " {}", g.label(val));
            }
            out.push('\n');
        }
        for c in &self.constraints {
            let tags = c
                .tags
                .iter()
                .map(|t| match t {
                    ConstraintTag::Independence => "indep".to_string(),
                    ConstraintTag::Dominating(w) => format!("dom({w})"),
                })
                .collect::<Vec<_>>()
                .join("+");
            let _ = write!(out, "c {} {} {tags} :", self.variables[c.x], self.variables[c.y]);
            for &(a, b) in &c.allowed {
                let _ = write!(out, " ({},{})", g.label(a), g.label(b));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the auxiliary CSP for a fully reduced branch context: a variable
/// per chosen pack with its active vertices as values, an independence
/// constraint per shared-leg pair of chosen packs, and a dominating
/// constraint per leftover pack that still has passive vertices.
pub fn build_csp(ctx: &BranchContext) -> Result<CspInstance, SolveError> {
    let g = ctx.graph();
    let variables = ctx.family().to_vec();
    let index: BTreeMap<PackKey, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, i))
        .collect();
    let values: Vec<Vec<usize>> = variables
        .iter()
        .map(|&key| ctx.active_in(key).to_vec())
        .collect();
    let mut constraints = Vec::new();

    for (i, &x) in variables.iter().enumerate() {
        for (j, &y) in variables.iter().enumerate().skip(i + 1) {
            if !x.shares_leg(&y) {
                continue;
            }
            let mut allowed = Vec::new();
            for &v in &values[i] {
                for &w in &values[j] {
                    if !g.has_edge(v, w) {
                        allowed.push((v, w));
                    }
                }
            }
            constraints.push(Constraint::new(i, j, allowed, ConstraintTag::Independence));
        }
    }

    for w_key in ctx.passive_packs() {
        let (y, z) = ctx.dominator_pair(w_key)?;
        let passive = ctx.passive_in(w_key);
        let yi = index[&y];
        let zi = index[&z];
        let mut allowed = Vec::new();
        for &v in &values[yi] {
            let mut missed_by_v = passive.clone();
            missed_by_v.difference_with(&g.closed_neighborhood(v));
            for &u in &values[zi] {
                if missed_by_v.is_subset_of(&g.closed_neighborhood(u)) {
                    allowed.push((v, u));
                }
            }
        }
        constraints.push(Constraint::new(
            yi,
            zi,
            allowed,
            ConstraintTag::Dominating(w_key),
        ));
    }

    Ok(CspInstance {
        variables,
        values,
        constraints,
    })
}

/// Collapses parallel constraints: after orienting every constraint to the
/// canonical variable order, all constraints on the same pair are replaced
/// by one whose allowed set is the intersection.
pub fn merge_parallel_constraints(inst: CspInstance) -> CspInstance {
    let mut merged: BTreeMap<(usize, usize), Constraint> = BTreeMap::new();
    for c in inst.constraints {
        match merged.entry((c.x, c.y)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let existing = e.get_mut();
                existing.allowed.retain(|pair| c.allowed.binary_search(pair).is_ok());
                existing.tags.extend(c.tags);
            }
        }
    }
    CspInstance {
        variables: inst.variables,
        values: inst.values,
        constraints: merged.into_values().collect(),
    }
}

/// Solves an instance whose merged constraint graph has maximum degree two.
/// Components are paths and cycles: paths by a forward list-pruning sweep
/// and a backward extraction, cycles by guessing the least variable's value
/// and reducing to a path. Deterministic: lowest-id values win.
pub fn solve_degree2(inst: &CspInstance) -> Result<Option<Assignment>, CspError> {
    let inst = merge_parallel_constraints(inst.clone());
    let n = inst.variables.len();
    if inst.values.iter().any(|vals| vals.is_empty()) {
        return Ok(None);
    }
    let mut adjacent: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ci, c) in inst.constraints.iter().enumerate() {
        adjacent[c.x].push((c.y, ci));
        adjacent[c.y].push((c.x, ci));
    }
    for (v, nbrs) in adjacent.iter().enumerate() {
        if nbrs.len() > 2 {
            return Err(CspError::DegreeTooHigh { variable: v });
        }
    }

    let mut assignment = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let component = collect_component(start, &adjacent, &mut visited);
        let solved = if component.len() == 1 && adjacent[start].is_empty() {
            // Isolated variable: least value.
            Some(vec![(start, inst.values[start][0])])
        } else if component.iter().all(|&v| adjacent[v].len() == 2) {
            solve_cycle(&inst, &adjacent, &component)
        } else {
            let path = order_path(&adjacent, &component);
            solve_path(&inst, &adjacent, &path, None, None)
        };
        match solved {
            None => return Ok(None),
            Some(values) => {
                for (var, val) in values {
                    assignment[var] = val;
                }
            }
        }
    }
    let assignment = Assignment { values: assignment };
    debug_assert!(assignment.satisfies(&inst));
    Ok(Some(assignment))
}

fn collect_component(
    start: usize,
    adjacent: &[Vec<(usize, usize)>],
    visited: &mut [bool],
) -> Vec<usize> {
    let mut queue = vec![start];
    let mut component = Vec::new();
    visited[start] = true;
    while let Some(v) = queue.pop() {
        component.push(v);
        for &(w, _) in &adjacent[v] {
            if !visited[w] {
                visited[w] = true;
                queue.push(w);
            }
        }
    }
    component.sort_unstable();
    component
}

/// Orders a path component from its lex-least endpoint.
fn order_path(adjacent: &[Vec<(usize, usize)>], component: &[usize]) -> Vec<usize> {
    let endpoints: Vec<usize> = component
        .iter()
        .copied()
        .filter(|&v| adjacent[v].len() <= 1)
        .collect();
    let start = endpoints[0];
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < component.len() {
        let next = adjacent[cur]
            .iter()
            .map(|&(w, _)| w)
            .find(|&w| w != prev)
            .expect("path continues");
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

/// List-prunes along `path` and extracts a lowest-id solution backwards.
/// `head_filter` / `tail_filter` restrict the endpoint lists (used when a
/// cycle is cut open at a guessed variable).
fn solve_path(
    inst: &CspInstance,
    adjacent: &[Vec<(usize, usize)>],
    path: &[usize],
    head_filter: Option<&dyn Fn(usize) -> bool>,
    tail_filter: Option<&dyn Fn(usize) -> bool>,
) -> Option<Vec<(usize, usize)>> {
    let mut lists: Vec<Vec<usize>> = path.iter().map(|&v| inst.values[v].clone()).collect();
    if let Some(f) = head_filter {
        lists[0].retain(|&v| f(v));
    }
    if let Some(f) = tail_filter {
        lists.last_mut().unwrap().retain(|&v| f(v));
    }
    for i in 1..path.len() {
        let constraint = constraint_between(inst, adjacent, path[i - 1], path[i]);
        let (prev, rest) = lists.split_at_mut(i);
        let prev = &prev[i - 1];
        rest[0].retain(|&y| prev.iter().any(|&x| allows_ordered(constraint, path[i - 1], x, y)));
        // Pruning soundness: every kept value has a supporting predecessor.
        debug_assert!(rest[0]
            .iter()
            .all(|&y| prev.iter().any(|&x| allows_ordered(constraint, path[i - 1], x, y))));
    }
    if lists.iter().any(|l| l.is_empty()) {
        return None;
    }
    let mut chosen = vec![0usize; path.len()];
    chosen[path.len() - 1] = lists[path.len() - 1][0];
    for i in (0..path.len() - 1).rev() {
        let constraint = constraint_between(inst, adjacent, path[i], path[i + 1]);
        chosen[i] = lists[i]
            .iter()
            .copied()
            .find(|&x| allows_ordered(constraint, path[i], x, chosen[i + 1]))
            .expect("forward pruning guarantees support");
    }
    Some(path.iter().copied().zip(chosen).collect())
}

fn solve_cycle(
    inst: &CspInstance,
    adjacent: &[Vec<(usize, usize)>],
    component: &[usize],
) -> Option<Vec<(usize, usize)>> {
    // Cut the cycle at its least variable and guess that variable's value.
    let pivot = component[0];
    let mut nbrs: Vec<usize> = adjacent[pivot].iter().map(|&(w, _)| w).collect();
    nbrs.sort_unstable();
    let (first, last) = (nbrs[0], nbrs[nbrs.len() - 1]);
    // Path from `first` around to `last`, excluding the pivot.
    let mut path = vec![first];
    let mut prev = pivot;
    let mut cur = first;
    while path.len() < component.len() - 1 {
        let next = adjacent[cur]
            .iter()
            .map(|&(w, _)| w)
            .find(|&w| w != prev)
            .expect("cycle continues");
        path.push(next);
        prev = cur;
        cur = next;
    }
    let head_constraint = constraint_between(inst, adjacent, pivot, first);
    let tail_constraint = constraint_between(inst, adjacent, pivot, last);
    for &guess in &inst.values[pivot] {
        let head = |v: usize| allows_ordered(head_constraint, pivot, guess, v);
        let tail = |v: usize| allows_ordered(tail_constraint, pivot, guess, v);
        // A two-vertex "cycle" (pivot plus one neighbor bound by one merged
        // constraint) degenerates to a single filtered list.
        let solved = if first == last {
            let both = |v: usize| head(v) && tail(v);
            solve_path(inst, adjacent, &path, Some(&both), None)
        } else {
            solve_path(inst, adjacent, &path, Some(&head), Some(&tail))
        };
        if let Some(mut values) = solved {
            values.push((pivot, guess));
            return Some(values);
        }
    }
    None
}

fn constraint_between<'a>(
    inst: &'a CspInstance,
    adjacent: &[Vec<(usize, usize)>],
    a: usize,
    b: usize,
) -> &'a Constraint {
    let (_, ci) = adjacent[a]
        .iter()
        .find(|&&(w, _)| w == b)
        .expect("adjacent variables share a constraint");
    &inst.constraints[*ci]
}

/// True iff assigning `val_a` to `var_a` and `val_b` to the other endpoint
/// satisfies `c`.
fn allows_ordered(c: &Constraint, var_a: usize, val_a: usize, val_b: usize) -> bool {
    if c.x == var_a {
        c.allows(val_a, val_b)
    } else {
        c.allows(val_b, val_a)
    }
}

/// Exhaustive feasibility check over all value tuples; the test oracle for
/// the degree-2 solver.
pub fn brute_force_satisfiable(inst: &CspInstance) -> bool {
    let n = inst.variables.len();
    if inst.values.iter().any(|v| v.is_empty()) {
        return false;
    }
    let mut pick = vec![0usize; n];
    loop {
        let asg = Assignment {
            values: pick.iter().enumerate().map(|(i, &j)| inst.values[i][j]).collect(),
        };
        if asg.satisfies(inst) {
            return true;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < inst.values[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn vars(n: usize) -> Vec<PackKey> {
        (0..n).map(PackKey::One).collect()
    }

    #[test]
    fn two_variable_example() {
        let inst = CspInstance {
            variables: vars(2),
            values: vec![vec![1, 2], vec![7]],
            constraints: vec![Constraint::new(
                0,
                1,
                vec![(2, 7)],
                ConstraintTag::Independence,
            )],
        };
        let asg = solve_degree2(&inst).unwrap().unwrap();
        assert_eq!(asg.values, vec![2, 7]);
    }

    #[test]
    fn odd_cycle_two_coloring_is_infeasible() {
        // Three variables, two values each, all constraints "must differ".
        let differ = vec![(0, 1), (1, 0)];
        let inst = CspInstance {
            variables: vars(3),
            values: vec![vec![0, 1]; 3],
            constraints: vec![
                Constraint::new(0, 1, differ.clone(), ConstraintTag::Independence),
                Constraint::new(1, 2, differ.clone(), ConstraintTag::Independence),
                Constraint::new(0, 2, differ.clone(), ConstraintTag::Independence),
            ],
        };
        assert_eq!(solve_degree2(&inst).unwrap(), None);
        assert!(!brute_force_satisfiable(&inst));
    }

    #[test]
    fn even_cycle_two_coloring_is_feasible() {
        let differ = vec![(0, 1), (1, 0)];
        let inst = CspInstance {
            variables: vars(4),
            values: vec![vec![0, 1]; 4],
            constraints: vec![
                Constraint::new(0, 1, differ.clone(), ConstraintTag::Independence),
                Constraint::new(1, 2, differ.clone(), ConstraintTag::Independence),
                Constraint::new(2, 3, differ.clone(), ConstraintTag::Independence),
                Constraint::new(3, 0, differ.clone(), ConstraintTag::Independence),
            ],
        };
        let asg = solve_degree2(&inst).unwrap().unwrap();
        assert!(asg.satisfies(&inst));
        assert_eq!(asg.values, vec![0, 1, 0, 1]);
    }

    #[test]
    fn merge_intersects_parallel_constraints() {
        let inst = CspInstance {
            variables: vars(2),
            values: vec![vec![0, 1], vec![0, 1]],
            constraints: vec![
                Constraint::new(0, 1, vec![(0, 0), (0, 1)], ConstraintTag::Independence),
                // Reversed orientation, canonicalized by the constructor.
                Constraint::new(1, 0, vec![(1, 0), (0, 0)], ConstraintTag::Independence),
            ],
        };
        let merged = merge_parallel_constraints(inst);
        assert_eq!(merged.constraints.len(), 1);
        assert_eq!(merged.constraints[0].allowed, vec![(0, 0), (0, 1)]);

        // Empty intersections make the instance infeasible.
        let inst = CspInstance {
            variables: vars(2),
            values: vec![vec![0], vec![0]],
            constraints: vec![
                Constraint::new(0, 1, vec![(0, 0)], ConstraintTag::Independence),
                Constraint::new(0, 1, vec![], ConstraintTag::Independence),
            ],
        };
        assert_eq!(solve_degree2(&inst).unwrap(), None);
    }

    #[test]
    fn degree_guard() {
        let any = vec![(0, 0)];
        let inst = CspInstance {
            variables: vars(4),
            values: vec![vec![0]; 4],
            constraints: vec![
                Constraint::new(0, 1, any.clone(), ConstraintTag::Independence),
                Constraint::new(0, 2, any.clone(), ConstraintTag::Independence),
                Constraint::new(0, 3, any.clone(), ConstraintTag::Independence),
            ],
        };
        assert_eq!(
            solve_degree2(&inst),
            Err(CspError::DegreeTooHigh { variable: 0 })
        );
    }

    /// Random instance whose merged constraint graph is a disjoint union of
    /// paths and cycles, to exercise the degree-2 solver against the brute
    /// force.
    pub(crate) fn random_degree2_instance(rng: &mut SplitMix64) -> CspInstance {
        let n = 1 + rng.next_usize(8);
        let variables = vars(n);
        let values: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..1 + rng.next_usize(5)).collect())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        fn add(
            rng: &mut SplitMix64,
            values: &[Vec<usize>],
            constraints: &mut Vec<Constraint>,
            x: usize,
            y: usize,
        ) {
            let mut allowed = Vec::new();
            for &a in &values[x] {
                for &b in &values[y] {
                    if rng.next_bool(0.55) {
                        allowed.push((a, b));
                    }
                }
            }
            constraints.push(Constraint::new(x, y, allowed, ConstraintTag::Independence));
        }
        let mut constraints = Vec::new();
        let mut pos = 0;
        while pos < n {
            // Carve off a segment and wire it as a path or a cycle.
            let len = 1 + rng.next_usize((n - pos).min(5));
            let segment: Vec<usize> = order[pos..pos + len].to_vec();
            pos += len;
            for w in segment.windows(2) {
                add(rng, &values, &mut constraints, w[0], w[1]);
            }
            if len >= 3 && rng.next_bool(0.5) {
                add(rng, &values, &mut constraints, segment[len - 1], segment[0]);
            }
            // Occasionally add a parallel constraint to exercise merging.
            if len >= 2 && rng.next_bool(0.3) {
                add(rng, &values, &mut constraints, segment[0], segment[1]);
            }
        }
        CspInstance {
            variables,
            values,
            constraints,
        }
    }

    #[test]
    fn random_instances_match_exhaustive_enumeration() {
        let mut rng = SplitMix64::new(0xC59);
        for round in 0..300 {
            let inst = random_degree2_instance(&mut rng);
            let fast = solve_degree2(&inst).unwrap();
            let slow = brute_force_satisfiable(&inst);
            assert_eq!(fast.is_some(), slow, "round {round}: {inst:?}");
            if let Some(asg) = fast {
                assert!(asg.satisfies(&inst));
            }
        }
    }

    #[test]
    fn isolated_variables_take_least_value() {
        let inst = CspInstance {
            variables: vars(2),
            values: vec![vec![4, 9], vec![3]],
            constraints: vec![],
        };
        let asg = solve_degree2(&inst).unwrap().unwrap();
        assert_eq!(asg.values, vec![4, 3]);
    }
}
