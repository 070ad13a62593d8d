//! Quantum oracle synthesis from `.pla` switching functions.
//!
//! Tables are parsed and expanded in [`pla`], embedded into permutations in
//! [`embed`], and synthesized either with transformation-based synthesis
//! ([`tbs`], minimal qubit count) or from an ESOP cover ([`esop`], inputs
//! preserved). [`sim`] checks every result; [`grover`] wraps oracles in a
//! search circuit and [`emit`] writes QASM and JSON.

pub mod bench;
pub mod circuit;
pub mod embed;
pub mod emit;
pub mod esop;
pub mod grover;
pub mod pipeline;
pub mod pla;
pub mod sim;
pub mod tbs;

pub use circuit::{Circuit, Gate, MetricsReport, Status};
pub use pipeline::{synthesize, Method, SynthOptions, Synthesis};
pub use pla::{parse_pla, PlaTable, SpecTable};
