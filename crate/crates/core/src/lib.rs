//! Operator-algebraic quantum mechanics on periodic grids.
//!
//! Wavefunctions live on a uniform periodic box. Shifts, rotations, Galilei
//! transformations and Weyl operators act spectrally, and every identity of the
//! formalism (covariance, canonical commutation, cocycle laws, projection
//! idempotency) is exposed as a measurable residual.

// negated float comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod error;
pub mod fourier;
pub mod galilei;
pub mod grid;
pub mod io;
pub mod numeric;
pub mod operators;
pub mod spin;
pub mod states;
pub mod uniqueness;

pub use error::{Error, Result};
pub use grid::{inner, make_grid, norm, normalize, sample_gaussian, GridFunction, GridSpec, Wavefunction};
pub use fourier::{forward, inverse, SpectralFunction};
pub use galilei::{FreeDynamics, GalileiElement};
pub use operators::{EuclideanElement, Operator, Rotation};
pub use spin::{SU2Element, SpinorField};
pub use states::{PhaseSpaceKind, PhaseSpaceTable};
pub use uniqueness::VNProjection;
