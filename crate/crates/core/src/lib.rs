//! Matrix-free Chernoff-approximation propagators for Schrödinger equations
//! on periodic grids, with independent reference solvers and a property
//! harness for the approximation hypotheses.

pub mod error;
pub mod grid;
pub mod linear;
pub mod operators;
pub mod propagator;
pub mod random;
pub mod reference;
pub mod verify;

pub use error::{ChernoffError, Result};
pub use grid::{Grid, WaveFunction};
pub use linear::LinearOp;
pub use operators::{HamiltonianSpec, Preset, RegulatorFn};
pub use propagator::{Propagator, PropagatorConfig, SeriesTrace};

#[cfg(test)]
pub(crate) mod testing {
    pub use crate::random::random_wave;
}
