//! Monte Carlo simulator for buffer-aided relay selection in a multi-user
//! MIMO network observed by passive eavesdroppers.
//!
//! A slot draws fresh channels, lets a selection policy pick either a set of
//! relays to receive from the source or a set of buffered relays to forward
//! to the users, and records the resulting secrecy rate. [`simulation::sweep`]
//! repeats this over SNR grids and independent trials.

pub mod buffer;
pub mod channel;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod precoding;
pub mod rates;
pub mod selection;
pub mod simulation;

pub use error::{Error, Result};
pub use selection::{Phase, Policy};
pub use simulation::{sweep, sweep_with, Execution, ResultTable, ScenarioConfig};
