//! Exact synthesis of qubit and qutrit unitaries into circuits.
//!
//! The pipeline is [`reck::reck_decompose`] (two-level factorization),
//! [`reck::pair_three_level`] for qutrits, [`routing`] plans that move each
//! rotation onto the last wire, and the [`controlled`] constructions for the
//! remaining controlled gate. [`synth::synthesize`] ties them together and
//! [`synth::verify`] checks the result by full matrix reconstruction.

pub mod circuit;
pub mod controlled;
pub mod embedding;
pub mod error;
pub mod linalg;
pub mod reck;
pub mod routing;
pub mod synth;

pub use circuit::{
    apply_state, circuit_unitary, gate_stats, parse, serialize, Circuit, Control, Gate, GateStats,
    NamedGate, Radix,
};
pub use embedding::{embed, SubspaceRotation};
pub use error::{Error, Result};
pub use linalg::{dist_phase, haar_random_unitary, ComplexMatrix, PhaseShift, DEFAULT_TOL};
pub use reck::{pair_three_level, reck_decompose, reck_reconstruct, DecompositionResult};
pub use routing::{plan_binary_routing, plan_ternary_routing, RoutingPlan, RoutingStep};
pub use synth::{synthesize, verify, SynthOptions, VerifyReport};
