//! Quantum BCH codes and symmetry-optimized distillation of logical ancillas.
//!
//! The crate covers the whole pipeline: GF(2) algebra and BCH construction,
//! CSS lifting, Clifford circuits with Pauli-frame propagation, distillation
//! protocol assembly, strict fault-tolerance verification, Monte Carlo noise
//! simulation and closed-form threshold estimates.

pub mod analysis;
pub mod bits;
pub mod circuit;
pub mod code;
pub mod combin;
pub mod distill;
pub mod error;
pub mod gf2;
pub mod matrix;
pub mod mc;
pub mod symmetry;
pub mod verify;

pub use bits::BitVec;
pub use code::{CssCode, CyclicCode, PauliType, TargetState, WeightEnumerator};
pub use error::{Error, Result};
pub use gf2::{BitPoly, FieldSpec};
pub use matrix::GF2Matrix;
