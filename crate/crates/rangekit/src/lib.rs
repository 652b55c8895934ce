//! IO, file formats, and the pipeline orchestration for the rangekit
//! toolkit. All algorithms live in [`rangekit_core`]; this crate moves bytes
//! and wires stages together.

pub use rangekit_core as core;

pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod preview;
