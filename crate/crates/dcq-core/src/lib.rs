//! Numerics for the quantum advantage of dense coding under restricted
//! classes of encoding operations: coherent information, optimized
//! advantage values and filter bounds for global / local-product /
//! one-way-feedback encodings, entanglement of purification with its
//! monogamy identity, and a heuristic symmetric-extension search.

pub mod advantage;
pub mod channels;
pub mod error;
pub mod extension;
pub mod optimize;
pub mod protocols;
pub mod purification;
pub mod qcore;
pub mod report;
pub mod states;

pub use error::{Error, Result};
pub use qcore::{C64, PartitionedState, PureState, QMatrix, Sampler};
