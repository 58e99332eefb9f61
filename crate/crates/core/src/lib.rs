//! Derangement-to-permutation ratios in digraphs.
//!
//! A *permutation* of a digraph is a bijection of its vertices in which every
//! vertex is either fixed or sent along one of its out-edges; a *derangement*
//! is a permutation with no fixed vertex. This crate builds blown-up directed
//! cycles `D(k, ell)`, samples uniformly random `m`-edge subgraphs of them,
//! counts derangements and permutations exactly, solves for the density that
//! steers the expected ratio towards a target `r` in `(0, 1/2)`, and computes
//! the exact first and second moments that certify concentration.
//!
//! Module map:
//!
//! * [`digraph`]: graphs, the blow-up construction, uniform subgraph sampling
//!   and the edge-list / JSON formats.
//! * [`count`]: three exact counters (brute force, Ryser permanent, layered
//!   transfer matrices) plus closed forms for the full blow-up.
//! * [`special`]: the series `f_ell`, the forbidden-matching count `h`, and the
//!   falling-factorial edge-survival kernel.
//! * [`params`]: picks `ell` and `p` from a target ratio and assembles a plan.
//! * [`moments`]: exact rational moments and their asymptotic counterparts.
//! * [`experiment`]: Monte Carlo trials, convergence sweeps and the
//!   self-verification runner behind the CLI.

pub mod count;
pub mod digraph;
mod error;
pub mod experiment;
pub mod moments;
pub mod numeric;
pub mod params;
pub mod seed;
pub mod special;

pub use count::{
    closed_form_counts, closed_form_ratio, count_bruteforce, count_layered, count_permanent,
    permanent, BinaryMatrix, CountPair,
};
pub use digraph::{
    build_blowup, enumerate_subgraphs, sample_subgraph, BlowupDigraph, Digraph, SampledSubgraph,
};
pub use error::{Error, Result};
pub use experiment::{convergence_sweep, run_mc, verify_all, McReport, Profile, SweepRow};
pub use moments::{moment_report, MomentReport};
pub use params::{choose_ell, plan, solve_p, ConstructionPlan};
pub use seed::Seed;
