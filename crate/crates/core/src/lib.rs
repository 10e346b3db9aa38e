//! Star discrepancy of point sets in the unit cube, and a constructive
//! adversary that answers a claim `D*(X) <= ε` with either a chain
//! certificate proving `n >= ⌊d/2⌋·⌊1/(βε)⌋` or a box whose local
//! discrepancy exceeds `ε`.
//!
//! * [`point_set`]: point sets, anchored boxes, closed/open counts, CSV.
//! * [`discrepancy`]: exact evaluation on the critical grid, and sampling.
//! * [`adversary`]: the chain construction, witnesses, certificate checks.
//! * [`generators`]: random, Halton, Hammersley and grid point sets.
//! * [`bench`]: lower bound vs. empirical cardinalities vs. upper references.
//! * [`cli`]: the `stardisc` binary.

pub mod adversary;
pub mod bench;
pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod generators;
pub mod point_set;

pub use adversary::{
    certify, chain_step, extract_witness, run_chain, verify_certificate, verify_witness,
    ChainCertificate, ChainParameters, ChainResult, ChainStep, IndexedCorner, StepOutcome,
    ViolationWitness, WitnessSide,
};
pub use discrepancy::{
    star_discrepancy_exact, star_discrepancy_sampled, DiscrepancyResult, ExactOptions, Side,
};
pub use error::{Error, Result};
pub use generators::{generate, GeneratorKind, GeneratorSpec};
pub use point_set::{AnchoredBox, PointSet};
