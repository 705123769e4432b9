//! Symmetry-aware ("lifted") probabilistic inference for discrete factor
//! graphs.
//!
//! The library is organized around one pipeline:
//!
//! 1. [`model`] describes a distribution over binary variables as weighted
//!    clauses and symmetric count-table factors.
//! 2. [`symgraph`] turns a model (and an assignment to its variables) into a
//!    colored graph whose color automorphisms are exactly the symmetries of
//!    the distribution.
//! 3. [`canon`] computes canonical forms and automorphism generators of
//!    colored graphs with an individualization-refinement search.
//! 4. [`group`] is the permutation-group kernel: Schreier-Sims stabilizer
//!    chains (exact orders, membership, enumeration), point orbits, and
//!    product-replacement random sampling.
//! 5. [`exact`] runs an isomorph-pruned breadth-first search over assignment
//!    orbits, producing the partition function, evidence probabilities, MPE
//!    states, and a full orbit census.
//! 6. [`sampler`] implements orbit-jump MCMC (a Metropolized independence
//!    sampler whose proposal is a Burnside-process walk) together with
//!    lifted-MCMC and plain Gibbs baselines.
//! 7. [`eval`] holds the ground-truth machinery: brute-force oracles, exact
//!    dense transition kernels for every chain, total-variation curves, and
//!    the closed-form mixing bound.

pub mod canon;
pub mod eval;
pub mod exact;
pub mod group;
pub mod model;
pub mod sampler;
pub mod symgraph;

mod bitset;
