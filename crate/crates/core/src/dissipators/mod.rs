//! Reservoirs, scenarios, population rate matrices and the full Liouvillian.

pub mod liouvillian;
pub mod rates;
pub mod reservoir;
pub mod scenario;

pub use liouvillian::{build_liouvillian, Liouvillian};
pub use rates::{
    rate_elements, rate_matrix, rate_matrix_common_detuned, rate_matrix_independent, rate_matrix_resonant,
    ChannelRates, RateElements, RateMatrix,
};
pub use reservoir::{bose_occupation, spectral_density, Direction, RateTable, ReservoirLabel, ReservoirSpec};
pub use scenario::{Regime, Scenario, Topology};
