//! Pole placement for MIMO LTI systems by block-triangular canonical
//! transformations.
//!
//! The toolkit decomposes a controllable (observable) system into
//! constrained cyclic-subspace chains, assembles the similarity transform
//! that exposes a block-triangular form with companion diagonal blocks,
//! places the closed-loop poles block by block through a triangular
//! coefficient-matching relation, and verifies and simulates the resulting
//! observer-based controller.
//!
//! Start with [`synthesis::design_controller`] / [`synthesis::design_observer`]
//! for gain design, [`verification::verify_design`] for an independent check
//! and [`simulation::simulate`] for closed-loop traces. The `examples/`
//! directory holds one runnable program per capability.

pub mod decomposition;
pub mod error;
pub mod matrix;
pub mod model;
pub mod poly;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::StateSpaceModel;
pub use poly::Polynomial;
