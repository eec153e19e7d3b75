//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with:
//!
//!     cargo test -p clawdom --test acceptance -- --nocapture

use clawdom::bitset::VertexSet;
use clawdom::clique::{find_k_clique_tclawfree, ramsey_threshold};
use clawdom::csp::{
    brute_force_satisfiable, solve_degree2, Constraint, ConstraintTag, CspInstance,
};
use clawdom::gen;
use clawdom::graph::Graph;
use clawdom::io;
use clawdom::mis;
use clawdom::oracle;
use clawdom::packs::{
    cluster_domination_profile, private_neighborhood_is_clique, validate_pack_lemmas,
    OnePackClassification, PackDecomposition, PackKey,
};
use clawdom::reductions::{
    crbds_to_ds_4clawfree, lift_ds_solution, rbds_to_crbds, RbdsToCrbds, RedBlueInstance,
};
use clawdom::rng::SplitMix64;
use clawdom::solver::{solve_with, BranchContext, RootInstance, SolveOptions, Verdict};
use itertools::Itertools;
use std::time::Instant;

fn criterion(name: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(summary) => println!("ACCEPTANCE {name}: PASS ({summary})"),
        Err(message) => {
            println!("ACCEPTANCE {name}: FAIL ({message})");
            panic!("acceptance criterion {name} failed: {message}");
        }
    }
}

/// The shared claw-free corpus: line graphs, complements of triangle-free
/// graphs, and unit interval graphs, all with at most 24 vertices.
fn corpus(seed: u64, count: usize) -> Vec<Graph> {
    let mut rng = SplitMix64::new(seed);
    (0..count).map(|_| gen::random_claw_free(&mut rng, 24)).collect()
}

fn quiet_options() -> SolveOptions {
    SolveOptions {
        deterministic: true,
        check_lemmas: false,
        ..SolveOptions::default()
    }
}

#[test]
fn oracle_equivalence_for_domination() {
    criterion("oracle-equivalence (solve vs brute force)", || {
        let start = Instant::now();
        let graphs = corpus(0xACCE97, 500);
        let opts = quiet_options();
        let mut yes = 0u32;
        let mut no = 0u32;
        for (idx, g) in graphs.iter().enumerate() {
            let brute = oracle::brute_mds(g, 5).map_err(|e| e.to_string())?;
            for k in 0..=5usize {
                let feasible = brute.optimum.is_some_and(|o| o <= k);
                let outcome =
                    solve_with(g, k, &opts).map_err(|e| format!("instance {idx}, k={k}: {e}"))?;
                if outcome.solution.is_some() != feasible {
                    return Err(format!(
                        "mismatch on instance {idx} (n={}, k={k}): solver {}, oracle {}",
                        g.n(),
                        outcome.solution.is_some(),
                        feasible
                    ));
                }
                match outcome.solution {
                    Some(sol) => {
                        if !g.dominates(&sol.vertices, &g.vertex_set())
                            || sol.vertices.len() > k
                        {
                            return Err(format!("witness fails to verify on instance {idx}"));
                        }
                        yes += 1;
                    }
                    None => no += 1,
                }
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs_f64() >= 120.0 {
            return Err(format!("suite took {elapsed:?}, budget is 120 s"));
        }
        Ok(format!(
            "500 instances x 6 budgets, {yes} YES / {no} NO, 0 mismatches, {elapsed:?}"
        ))
    });
}

#[test]
fn mds_and_mids_optima_coincide() {
    criterion("mds = mids on claw-free graphs", || {
        let mut rng = SplitMix64::new(0x3D53);
        let mut checked = 0;
        while checked < 200 {
            let g = gen::random_claw_free(&mut rng, 14);
            if g.n() > 14 || g.n() == 0 {
                continue;
            }
            let kmax = g.n().min(8);
            let mds = oracle::brute_mds(&g, kmax).map_err(|e| e.to_string())?;
            let mids = oracle::brute_mids(&g, kmax).map_err(|e| e.to_string())?;
            if mds.optimum != mids.optimum {
                return Err(format!(
                    "optima differ on {g:?}: mds {:?}, mids {:?}",
                    mds.optimum, mids.optimum
                ));
            }
            checked += 1;
        }
        Ok(format!("{checked} instances, 0 mismatches"))
    });
}

#[test]
fn structural_counts_are_exact() {
    criterion("structural counts (bounds cut, pack bound)", || {
        let graphs = corpus(0x57C7, 200);
        let opts = quiet_options();
        let mut no_branch_cases = 0;
        let mut pack_checks = 0;
        for g in &graphs {
            if g.n() == 0 {
                continue;
            }
            let i = mis::maximum_independent_set(g).map_err(|e| e.to_string())?;
            // Budgets below half the independence number are rejected
            // before any branching.
            if i.len() >= 3 {
                let k = (i.len() - 1) / 2;
                let outcome = solve_with(g, k, &opts).map_err(|e| e.to_string())?;
                if outcome.solution.is_some() {
                    return Err(format!("bounds cut missed a YES on {g:?} at k={k}"));
                }
                if outcome.stats.branch_nodes != 0 {
                    return Err(format!(
                        "solver branched {} times despite |I| = {} > 2k = {}",
                        outcome.stats.branch_nodes,
                        i.len(),
                        2 * k
                    ));
                }
                no_branch_cases += 1;
            }
            // Wherever the search continues, the pack count obeys the
            // closed-form bound.
            for k in 1..=5usize {
                let root = RootInstance::new(g.clone(), k).map_err(|e| e.to_string())?;
                if root.step_bounds() != Verdict::Continue {
                    continue;
                }
                let ctx = BranchContext::at_root(&root).map_err(|e| e.to_string())?;
                let bound = 2 * k + (2 * k) * (2 * k - 1) / 2;
                if ctx.packs().pack_count() > bound {
                    return Err(format!(
                        "{} packs exceed the bound {bound} at k={k} on {g:?}",
                        ctx.packs().pack_count()
                    ));
                }
                pack_checks += 1;
            }
        }
        if no_branch_cases < 50 {
            return Err(format!("only {no_branch_cases} bounds-cut cases exercised"));
        }
        Ok(format!(
            "{no_branch_cases} bounds cuts with zero branching, {pack_checks} pack-bound checks"
        ))
    });
}

/// A clique of hub vertices spanning `m` singleton 1-packs; every hub's
/// cluster is the whole clique.
fn hub_clique(m: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..m).map(|i| (i, m + i)).collect();
    for i in 0..m {
        for j in i + 1..m {
            edges.push((m + i, m + j));
        }
    }
    Graph::build(2 * m, &edges).unwrap()
}

#[test]
fn pack_lemma_invariants_hold() {
    criterion("pack structure lemma suite", || {
        let mut graphs = corpus(0x1E44A, 220);
        graphs.extend((3..=6).map(hub_clique));
        let mut rng = SplitMix64::new(0xED6E);
        let mut graphs_checked = 0;
        let mut profiles = 0;
        let mut edges_sampled = 0;
        for g in &graphs {
            if g.n() == 0 {
                continue;
            }
            let i = mis::maximum_independent_set(g).map_err(|e| e.to_string())?;
            let pd = PackDecomposition::decompose(g, &i).map_err(|e| e.to_string())?;
            // 1-packs are cliques and 2-pack edges share legs.
            validate_pack_lemmas(g, &pd).map_err(|e| e.to_string())?;
            // Bridge reciprocity, hub containment, cluster cliques and the
            // edge/component coincidence are re-derived inside classify.
            let cls = OnePackClassification::classify(g, &pd).map_err(|e| e.to_string())?;
            for a in pd.one_pack_legs() {
                for v in cls.hub(a).expect("classified").iter() {
                    cluster_domination_profile(g, &pd, &cls, v).map_err(|e| e.to_string())?;
                    profiles += 1;
                }
            }
            let edges = g.edges();
            for _ in 0..edges.len().min(12) {
                let (v, w) = edges[rng.next_usize(edges.len())];
                if !private_neighborhood_is_clique(g, v, w)
                    || !private_neighborhood_is_clique(g, w, v)
                {
                    return Err(format!("private neighborhood not a clique on {g:?}"));
                }
                edges_sampled += 1;
            }
            graphs_checked += 1;
        }
        if graphs_checked < 200 {
            return Err(format!("only {graphs_checked} graphs checked"));
        }
        Ok(format!(
            "{graphs_checked} graphs, {profiles} cluster profiles, {edges_sampled} sampled edges, 0 violations"
        ))
    });
}

/// Random CSP whose merged constraint graph is a union of paths and
/// cycles, mirroring what the solver hands the endgame.
fn random_degree2_instance(rng: &mut SplitMix64) -> CspInstance {
    let n = 1 + rng.next_usize(8);
    let variables: Vec<PackKey> = (0..n).map(PackKey::One).collect();
    let values: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..1 + rng.next_usize(5)).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut constraints = Vec::new();
    let add = |rng: &mut SplitMix64, constraints: &mut Vec<Constraint>, x: usize, y: usize| {
        let mut allowed = Vec::new();
        for &a in &values[x] {
            for &b in &values[y] {
                if rng.next_bool(0.55) {
                    allowed.push((a, b));
                }
            }
        }
        constraints.push(Constraint::new(x, y, allowed, ConstraintTag::Independence));
    };
    let mut pos = 0;
    while pos < n {
        let len = 1 + rng.next_usize((n - pos).min(5));
        let segment: Vec<usize> = order[pos..pos + len].to_vec();
        pos += len;
        for w in segment.windows(2) {
            add(rng, &mut constraints, w[0], w[1]);
        }
        if len >= 3 && rng.next_bool(0.5) {
            add(rng, &mut constraints, segment[len - 1], segment[0]);
        }
        if len >= 2 && rng.next_bool(0.3) {
            add(rng, &mut constraints, segment[0], segment[1]);
        }
    }
    CspInstance {
        variables,
        values,
        constraints,
    }
}

#[test]
fn csp_solver_matches_enumeration() {
    criterion("degree-2 CSP solver vs exhaustive enumeration", || {
        let mut rng = SplitMix64::new(0xC5B);
        let mut feasible = 0;
        for round in 0..1000 {
            let inst = random_degree2_instance(&mut rng);
            let fast = solve_degree2(&inst).map_err(|e| format!("round {round}: {e}"))?;
            let slow = brute_force_satisfiable(&inst);
            if fast.is_some() != slow {
                return Err(format!("round {round}: solver {} vs enumeration {slow}", fast.is_some()));
            }
            if let Some(assignment) = fast {
                if !assignment.satisfies(&inst) {
                    return Err(format!("round {round}: returned assignment violates a constraint"));
                }
                feasible += 1;
            }
        }
        Ok(format!("1000 instances, {feasible} feasible, 0 mismatches"))
    });
}

#[test]
fn reduction_chain_preserves_feasibility() {
    criterion("red-blue to 4-claw-free reduction chain", || {
        let mut rng = SplitMix64::new(0xBD5);
        let mut reduced_count = 0;
        let mut shortcut_count = 0;
        let mut lifted = 0;
        let mut instances = 0;
        while instances < 200 {
            let n_red = 1 + rng.next_usize(8);
            let n_blue = 1 + rng.next_usize(8);
            let k = 1 + rng.next_usize(3);
            let mut edges = Vec::new();
            for r in 0..n_red {
                for b in 0..n_blue {
                    if rng.next_bool(0.4) {
                        edges.push((r, n_red + b));
                    }
                }
            }
            let graph = Graph::build(n_red + n_blue, &edges).map_err(|e| e.to_string())?;
            let source = RedBlueInstance::new(graph, n_red, k, None).map_err(|e| e.to_string())?;
            instances += 1;
            let direct = oracle::brute_rbds(&source, k).map_err(|e| e.to_string())?;
            let colourful = match rbds_to_crbds(&source) {
                RbdsToCrbds::Reduced(inst) => inst,
                RbdsToCrbds::TrivialAnswer(ans) => {
                    if ans != direct.feasible {
                        return Err(format!("shortcut answer {ans} disagrees with the oracle"));
                    }
                    shortcut_count += 1;
                    continue;
                }
            };
            let reduction = crbds_to_ds_4clawfree(&colourful).map_err(|e| e.to_string())?;
            if reduction.graph.find_induced_star(4).is_some() {
                return Err("reduced graph contains a 4-claw".to_string());
            }
            if !reduction.neighborhoods_split_into_cliques() {
                return Err("a reduced neighborhood is not a union of three cliques".to_string());
            }
            let reduced_ans =
                oracle::brute_mds(&reduction.graph, k).map_err(|e| e.to_string())?;
            if reduced_ans.feasible != direct.feasible {
                return Err(format!(
                    "chain broke feasibility: source {} vs reduced {}",
                    direct.feasible, reduced_ans.feasible
                ));
            }
            reduced_count += 1;
            if let Some(witness) = reduced_ans.witness {
                if witness.len() != k {
                    return Err(format!("reduced witness has size {} != k = {k}", witness.len()));
                }
                // The dominating-clique corollary: swapping apexes for class
                // members yields a size-k dominating set inducing a clique.
                let mut clique_witness = VertexSet::new(reduction.graph.n());
                for v in witness.iter() {
                    match reduction.certificate.backward[v] {
                        clawdom::reductions::ReducedRole::Red(_) => clique_witness.insert(v),
                        clawdom::reductions::ReducedRole::Apex(c) => {
                            let least = reduction.certificate.color_classes[c - 1]
                                .first()
                                .ok_or("apex with empty class in a YES instance")?;
                            clique_witness.insert(*least);
                        }
                        clawdom::reductions::ReducedRole::Blue(_) => {
                            return Err("reduced witness contains a blue vertex".to_string())
                        }
                    }
                }
                if clique_witness.len() != k
                    || !reduction.graph.is_clique(&clique_witness)
                    || !reduction
                        .graph
                        .dominates(&clique_witness, &reduction.graph.vertex_set())
                {
                    return Err("no size-k dominating clique found on a YES instance".to_string());
                }
                let lifted_set = lift_ds_solution(&reduction, &colourful, &witness)
                    .map_err(|e| e.to_string())?;
                if !colourful.graph.dominates(&lifted_set, &colourful.blues) {
                    return Err("lifted witness fails to dominate the blue side".to_string());
                }
                lifted += 1;
            }
        }
        Ok(format!(
            "{instances} instances ({reduced_count} reduced, {shortcut_count} shortcuts), {lifted} witnesses lifted, 0 mismatches"
        ))
    });
}

#[test]
fn clique_search_matches_oracle() {
    criterion("t-claw-free clique search vs brute force", || {
        if ramsey_threshold(4, 3).map_err(|e| e.to_string())? != 125 {
            return Err("ramsey_threshold(4, 3) != 125".to_string());
        }
        let mut graphs: Vec<(usize, Graph)> = Vec::new();
        for t in [3usize, 4, 5] {
            for seed in 0..102u64 {
                let n = 8 + (seed as usize % 13);
                let g = gen::random_tclawfree(n, t, seed.wrapping_mul(31) ^ t as u64)
                    .map_err(|e| e.to_string())?;
                graphs.push((t, g));
            }
        }
        // Dense claw-free graphs exercise the Ramsey degree threshold.
        for n in [12usize, 16, 20] {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            graphs.push((3, Graph::build(n, &edges).map_err(|e| e.to_string())?));
            // Complete graph minus a perfect matching is still claw-free.
            let minus_matching: Vec<(usize, usize)> = (0..n)
                .tuple_combinations()
                .filter(|&(u, v)| !(u % 2 == 0 && v == u + 1))
                .collect();
            graphs.push((3, Graph::build(n, &minus_matching).map_err(|e| e.to_string())?));
        }
        let total = graphs.len();
        let mut heavy_hits = 0;
        for (t, g) in &graphs {
            let omega = oracle::brute_max_clique(g)
                .map_err(|e| e.to_string())?
                .optimum
                .unwrap();
            for k in 1..=5usize {
                let threshold = ramsey_threshold(*t, k).map_err(|e| e.to_string())?;
                let has_heavy = (0..g.n()).any(|v| g.degree(v) as u64 >= threshold);
                let found = find_k_clique_tclawfree(g, *t, k).map_err(|e| e.to_string())?;
                if found.is_some() != (omega >= k) {
                    return Err(format!(
                        "disagreement at t={t}, k={k}, omega={omega} on n={}",
                        g.n()
                    ));
                }
                if let Some(w) = &found {
                    if w.len() != k || !g.is_clique(w) {
                        return Err("clique witness fails verification".to_string());
                    }
                }
                if has_heavy {
                    if found.is_none() {
                        return Err(format!(
                            "heavy vertex at t={t}, k={k} did not yield a witness"
                        ));
                    }
                    heavy_hits += 1;
                }
            }
        }
        if total < 300 {
            return Err(format!("only {total} graphs tested"));
        }
        if heavy_hits == 0 {
            return Err("the Ramsey threshold case never occurred".to_string());
        }
        Ok(format!(
            "{total} graphs x 5 budgets, {heavy_hits} Ramsey-threshold witnesses, 0 mismatches"
        ))
    });
}

#[test]
fn deterministic_solve_output_is_byte_stable() {
    criterion("deterministic CLI output across runs and threads", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let instance = dir.path().join("instance.gr");
        let g = gen::random_unit_interval(20, 0.3, 0x5EED);
        io::write_graph(&instance, &g).map_err(|e| e.to_string())?;
        let bin = env!("CARGO_BIN_EXE_clawdom");
        let mut outputs: Vec<(String, i32)> = Vec::new();
        for threads in ["1", "4"] {
            for _ in 0..3 {
                let out = std::process::Command::new(bin)
                    .args(["solve"])
                    .arg(&instance)
                    .args(["--k", "4", "--deterministic"])
                    .env("CLAWDOM_THREADS", threads)
                    .output()
                    .map_err(|e| e.to_string())?;
                outputs.push((
                    String::from_utf8_lossy(&out.stdout).to_string(),
                    out.status.code().unwrap_or(-1),
                ));
            }
        }
        let (first_out, first_code) = outputs[0].clone();
        for (out, code) in &outputs {
            if *out != first_out || *code != first_code {
                return Err(format!(
                    "outputs diverged: {:?} vs {:?}",
                    (out, code),
                    (&first_out, first_code)
                ));
            }
        }
        if !(first_code == 0 || first_code == 1) {
            return Err(format!("solver errored with code {first_code}: {first_out}"));
        }
        Ok(format!(
            "6 runs byte-identical (exit {first_code}, {} bytes)",
            first_out.len()
        ))
    });
}
