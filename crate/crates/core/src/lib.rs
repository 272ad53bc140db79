//! Exact-arithmetic toolkit for the prime-dimensional qudit ZH-calculus.

pub mod ring;

pub mod diagram;
pub mod eval;
pub mod extract;
pub mod revcomp;
pub mod rewrite;
pub mod suite;
pub mod synth;

pub use diagram::{Diagram, Dir, Endpoint, NodeKind};
pub use eval::{contract, Tensor};
pub use ring::{CycInt, RingError, Scalar};
