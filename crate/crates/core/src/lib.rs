//! Heat transport through two transversely coupled qubits.
//!
//! Each side of the qubit pair couples to a thermal reservoir, either one
//! reservoir shared by both qubits ([`Topology::Common`]) or one per qubit
//! ([`Topology::Independent`]). The library builds the Born–Markov–secular
//! population dynamics in the eigenbasis, solves for steady states, computes
//! heat currents and their direct/cross channel split, simulates the
//! dark-state modulator and evaluates concurrence of assistance.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` aliases
//! below cover the common case.
//!
//! Sign convention: a heat current `Q_α` is positive when energy flows from
//! reservoir `α` into the qubits.

// `!(x > 0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dissipators;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod modulator;
pub mod ode;
pub mod sampling;
pub mod scalar;
pub mod steadystate;
pub mod transport;

pub use dissipators::{RateMatrix, RateTable, Regime, ReservoirLabel, ReservoirSpec, Scenario, Topology};
pub use error::{Error, Result};
pub use model::{diagonalize, DensityMatrix, EigenSystem, SystemParams};
pub use scalar::Real;
pub use steadystate::{PopulationVector, SteadyStateResult};
pub use transport::HeatCurrentReport;

pub type SystemParamsF64 = SystemParams<f64>;
pub type EigenSystemF64 = EigenSystem<f64>;
pub type ScenarioF64 = Scenario<f64>;
pub type ReservoirSpecF64 = ReservoirSpec<f64>;
pub type RateTableF64 = RateTable<f64>;
pub type RateMatrixF64 = RateMatrix<f64>;
pub type PopulationVectorF64 = PopulationVector<f64>;
pub type HeatCurrentReportF64 = HeatCurrentReport<f64>;
pub type TimeSeriesF64 = modulator::TimeSeries<f64>;

pub type SystemParamsF32 = SystemParams<f32>;
pub type ScenarioF32 = Scenario<f32>;
