//! Ideal quantum clocks on a truncated click basis: characteristic
//! functions, the time operator `T_C`, and numerical checks of its
//! canonical relations with the Hamiltonian.

pub mod charfn;
pub mod cli;
pub mod clock;
pub mod error;
pub mod models;
pub mod numerics;
pub mod operators;
pub mod output;
pub mod theorems;
pub mod tolerance;

pub use charfn::{ClockModel, Support};
pub use clock::{ClockGrid, ClockState};
pub use error::{Error, Result};
pub use models::{ModelConfig, ModelKind};
pub use numerics::QuadratureRule;
pub use operators::OperatorMatrix;
pub use tolerance::Tolerances;
