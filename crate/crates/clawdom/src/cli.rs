//! Batch command-line surface over the library.
//!
//! Exit codes: `0` for YES (or a passing verification), `1` for NO (or a
//! failing verification), `2` for errors, including non-claw-free inputs,
//! which are reported with their star witness on stderr.

use crate::clique;
use crate::gen;
use crate::graph::Graph;
use crate::io::{self, SolutionFile};
use crate::oracle;
use crate::reductions::{self, RbdsToCrbds};
use crate::rng::SplitMix64;
use crate::solver::{self, SolveOptions};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "clawdom",
    version,
    about = "Exact parameterized domination toolkit for claw-free graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a claw-free graph has a dominating set of size <= k.
    Solve {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Stream one line per guess to stderr (forces sequential search).
        #[arg(long)]
        trace: bool,
        /// Byte-stable output across runs and thread counts.
        #[arg(long)]
        deterministic: bool,
    },
    /// Brute-force ground-truth solvers.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Find a k-clique in a t-claw-free graph.
    Clique {
        file: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
    },
    /// Reduction gadgets between domination problems.
    Reduce {
        #[arg(value_enum)]
        which: ReduceKind,
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded instance generators.
    Gen {
        #[arg(value_enum)]
        family: GenFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        t: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Structural and solution verifiers.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
    /// Timed suites printing one line per run.
    Bench {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Minimum dominating set of size <= k.
    Mds { file: PathBuf, #[arg(long)] k: usize },
    /// Minimum independent dominating set of size <= k.
    Mids { file: PathBuf, #[arg(long)] k: usize },
    /// Maximum clique; YES iff it reaches size k.
    Clique { file: PathBuf, #[arg(long)] k: usize },
    /// Red-blue dominating set; k defaults to the file header.
    Rbds {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    /// Red-blue domination to its colourful variant.
    RbdsToCrbds,
    /// Colourful red-blue domination to domination on a 4-claw-free graph.
    CrbdsToDs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    /// Line graph of a random base graph on n vertices (density = edge
    /// probability of the base).
    Line,
    /// Complement of a random bipartite graph on n vertices.
    Cotf,
    /// Random unit interval graph on n vertices.
    Interval,
    /// Random t-claw-free graph from glued cliques.
    Tclaw,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check that a graph has no induced K_{1,t}.
    ClawFree {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        t: usize,
    },
    /// Check a solution file against a graph file.
    Solution { solution: PathBuf, file: PathBuf },
}

/// Worker cap from the environment; `0` lets the solver pick.
fn thread_cap() -> usize {
    std::env::var("CLAWDOM_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Parses arguments from the process environment and runs one command,
/// returning the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn run(command: Command) -> Result<i32, String> {
    match command {
        Command::Solve {
            file,
            k,
            trace,
            deterministic,
        } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            let opts = SolveOptions {
                deterministic,
                trace,
                threads: thread_cap(),
                check_lemmas: false,
                ..SolveOptions::default()
            };
            let outcome = solver::solve_with(&g, k, &opts).map_err(|e| e.to_string())?;
            match outcome.solution {
                Some(sol) => {
                    print!("{}", io::format_solution(&SolutionFile::Yes(sol.vertices.to_vec())));
                    Ok(0)
                }
                None => {
                    print!("{}", io::format_solution(&SolutionFile::No));
                    Ok(1)
                }
            }
        }
        Command::Oracle { which } => run_oracle(which),
        Command::Clique { file, t, k } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            match clique::find_k_clique_tclawfree(&g, t, k).map_err(|e| e.to_string())? {
                Some(w) => {
                    print!("{}", io::format_solution(&SolutionFile::Yes(w.to_vec())));
                    Ok(0)
                }
                None => {
                    print!("{}", io::format_solution(&SolutionFile::No));
                    Ok(1)
                }
            }
        }
        Command::Reduce { which, input, out } => run_reduce(which, &input, &out),
        Command::Gen {
            family,
            n,
            t,
            density,
            seed,
            out,
        } => {
            let g = generate(family, n, t, density, seed)?;
            io::write_graph(&out, &g).map_err(|e| e.to_string())?;
            println!("generated n={} m={} -> {}", g.n(), g.edge_count(), out.display());
            Ok(0)
        }
        Command::Verify { which } => run_verify(which),
        Command::Bench {
            suite,
            seed,
            repeat,
        } => run_bench(&suite, seed, repeat),
    }
}

fn run_oracle(which: OracleCmd) -> Result<i32, String> {
    let answer = |ans: oracle::OracleAnswer| -> i32 {
        match ans.witness {
            Some(w) => {
                print!("{}", io::format_solution(&SolutionFile::Yes(w.to_vec())));
                0
            }
            None => {
                print!("{}", io::format_solution(&SolutionFile::No));
                1
            }
        }
    };
    match which {
        OracleCmd::Mds { file, k } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            Ok(answer(oracle::brute_mds(&g, k).map_err(|e| e.to_string())?))
        }
        OracleCmd::Mids { file, k } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            Ok(answer(oracle::brute_mids(&g, k).map_err(|e| e.to_string())?))
        }
        OracleCmd::Clique { file, k } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            let ans = oracle::brute_max_clique(&g).map_err(|e| e.to_string())?;
            if ans.optimum.unwrap_or(0) >= k {
                let w = ans.witness.expect("clique oracle always has a witness");
                print!("{}", io::format_solution(&SolutionFile::Yes(w.to_vec())));
                Ok(0)
            } else {
                print!("{}", io::format_solution(&SolutionFile::No));
                Ok(1)
            }
        }
        OracleCmd::Rbds { file, k } => {
            let inst = io::read_rbds(&file).map_err(|e| e.to_string())?;
            let k = k.unwrap_or(inst.k);
            Ok(answer(oracle::brute_rbds(&inst, k).map_err(|e| e.to_string())?))
        }
    }
}

fn run_reduce(which: ReduceKind, input: &PathBuf, out: &PathBuf) -> Result<i32, String> {
    match which {
        ReduceKind::RbdsToCrbds => {
            let inst = io::read_rbds(input).map_err(|e| e.to_string())?;
            match reductions::rbds_to_crbds(&inst) {
                RbdsToCrbds::Reduced(reduced) => {
                    io::write_rbds(out, &reduced).map_err(|e| e.to_string())?;
                    println!(
                        "reduced nR={} nB={} k={} -> {}",
                        reduced.n_red(),
                        reduced.n_blue(),
                        reduced.k,
                        out.display()
                    );
                    Ok(0)
                }
                RbdsToCrbds::TrivialAnswer(yes) => {
                    println!("trivially {} (shortcut)", if yes { "YES" } else { "NO" });
                    Ok(if yes { 0 } else { 1 })
                }
            }
        }
        ReduceKind::CrbdsToDs => {
            let inst = io::read_rbds(input).map_err(|e| e.to_string())?;
            let red = reductions::crbds_to_ds_4clawfree(&inst).map_err(|e| e.to_string())?;
            io::write_graph(out, &red.graph).map_err(|e| e.to_string())?;
            println!("reduced n={} k={} -> {}", red.graph.n(), red.k, out.display());
            Ok(0)
        }
    }
}

fn generate(family: GenFamily, n: usize, t: usize, density: f64, seed: u64) -> Result<Graph, String> {
    match family {
        GenFamily::Line => {
            let mut rng = SplitMix64::new(seed);
            let base = gen::random_base_graph(&mut rng, n, density);
            gen::line_graph(&base).map_err(|e| e.to_string())
        }
        GenFamily::Cotf => {
            let mut rng = SplitMix64::new(seed);
            let split = n / 2;
            let mut edges = Vec::new();
            for u in 0..split {
                for v in split..n {
                    if rng.next_bool(density) {
                        edges.push((u, v));
                    }
                }
            }
            let bipartite = Graph::build(n, &edges).map_err(|e| e.to_string())?;
            gen::complement_of_triangle_free(&bipartite).map_err(|e| e.to_string())
        }
        GenFamily::Interval => Ok(gen::random_unit_interval(n, density, seed)),
        GenFamily::Tclaw => gen::random_tclawfree(n, t, seed).map_err(|e| e.to_string()),
    }
}

fn run_verify(which: VerifyCmd) -> Result<i32, String> {
    match which {
        VerifyCmd::ClawFree { file, t } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            match g.find_induced_star(t) {
                None => {
                    println!("claw-free t={t}: ok");
                    Ok(0)
                }
                Some((center, leaves)) => {
                    println!(
                        "induced K_1_{t}: center {} leaves {:?}",
                        center + 1,
                        leaves.iter().map(|v| v + 1).collect::<Vec<_>>()
                    );
                    Ok(1)
                }
            }
        }
        VerifyCmd::Solution { solution, file } => {
            let g = io::read_graph(&file).map_err(|e| e.to_string())?;
            match io::read_solution(&solution).map_err(|e| e.to_string())? {
                SolutionFile::No => {
                    println!("solution NO: nothing to verify");
                    Ok(0)
                }
                SolutionFile::Yes(vertices) => {
                    if let Some(&v) = vertices.iter().find(|&&v| v >= g.n()) {
                        println!("vertex {} outside graph", v + 1);
                        return Ok(1);
                    }
                    let set = crate::bitset::VertexSet::from_iter(g.n(), vertices);
                    if g.dominates(&set, &g.vertex_set()) {
                        println!("solution verifies: {} vertices dominate all", set.len());
                        Ok(0)
                    } else {
                        println!("solution does not dominate the graph");
                        Ok(1)
                    }
                }
            }
        }
    }
}

fn run_bench(suite: &str, seed: u64, repeat: usize) -> Result<i32, String> {
    match suite {
        "solve" => {
            let mut rng = SplitMix64::new(seed);
            let opts = SolveOptions {
                threads: thread_cap(),
                check_lemmas: false,
                ..SolveOptions::default()
            };
            for i in 0..20 {
                let g = gen::random_claw_free(&mut rng, 22);
                let k = 1 + rng.next_usize(5);
                for rep in 0..repeat {
                    let start = Instant::now();
                    let outcome = solver::solve_with(&g, k, &opts).map_err(|e| e.to_string())?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    println!(
                        "bench solve i={i} rep={rep} n={} m={} k={k} answer={} nodes={} ms={ms:.3}",
                        g.n(),
                        g.edge_count(),
                        if outcome.solution.is_some() { "yes" } else { "no" },
                        outcome.stats.branch_nodes
                    );
                }
            }
            Ok(0)
        }
        "clique" => {
            let mut rng = SplitMix64::new(seed);
            for i in 0..20 {
                let t = 3 + rng.next_usize(3);
                let g = gen::random_tclawfree(16, t, rng.next_u64()).map_err(|e| e.to_string())?;
                let k = 1 + rng.next_usize(5);
                for rep in 0..repeat {
                    let start = Instant::now();
                    let found = clique::find_k_clique_tclawfree(&g, t, k)
                        .map_err(|e| e.to_string())?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    println!(
                        "bench clique i={i} rep={rep} n={} m={} t={t} k={k} answer={} ms={ms:.3}",
                        g.n(),
                        g.edge_count(),
                        if found.is_some() { "yes" } else { "no" }
                    );
                }
            }
            Ok(0)
        }
        other => Err(format!("unknown bench suite {other:?} (expected solve|clique)")),
    }
}
