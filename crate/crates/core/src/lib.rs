//! Compiles matrix product states into log-depth state-preparation circuits
//! through binary tree tensor networks, and builds overlap verifier circuits
//! from matrix product operators.

pub mod circuit;
pub mod error;
pub mod json;
pub mod mps;
pub mod stats;
pub mod tensor;
pub mod transpiler;
pub mod ttn;
pub mod verifier;

pub use circuit::{Circuit, Gate};
pub use error::{Error, Result};
pub use mps::{Mpo, Mps, Statevector};
pub use ttn::Ttn;
