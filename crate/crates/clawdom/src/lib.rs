//! Exact parameterized domination toolkit for claw-free graphs.
//!
//! The crate answers "does this claw-free graph have a dominating set of at
//! most `k` vertices?" exactly, with a verified witness, by a budgeted
//! branching search over the pack structure induced by a maximum
//! independent set. Around that core it bundles:
//!
//! - brute-force oracles for domination, independent domination, clique,
//!   and red-blue domination ([`oracle`]), used as ground truth everywhere;
//! - the hardness gadgets turning red-blue domination into plain
//!   domination on 4-claw-free graphs, with witness lifting
//!   ([`reductions`]);
//! - a Ramsey-threshold clique search for t-claw-free graphs ([`clique`]);
//! - seeded generators of claw-free and t-claw-free instances ([`gen`])
//!   and the text formats tying the command-line tools together ([`io`]).
//!
//! Every runnable capability has an example under `examples/`; the
//! `clawdom` binary exposes the same operations as batch subcommands.

pub mod bitset;
pub mod clique;
pub mod csp;
pub mod gen;
pub mod graph;
pub mod io;
pub mod mis;
pub mod oracle;
pub mod packs;
pub mod reductions;
pub mod rng;
pub mod solver;

pub mod cli;

pub use bitset::VertexSet;
pub use graph::{Graph, GraphError};
pub use solver::{solve, solve_with, Solution, SolveError, SolveOptions};
