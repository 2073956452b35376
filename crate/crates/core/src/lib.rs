//! Finite-dimensional machinery for building families of tensor-product
//! projections whose diagonals are uniformly suppressed in a given basis.
//!
//! * [`hilbert`]: complex vectors, the inner product (linear in the first
//!   slot), rank-one projections, random unit vectors and bases, and a dense
//!   operator used as a test oracle.
//! * [`index`]: the index set `B^A` of `ℓ₂(B^A)` and its block views.
//! * [`projection`]: `I ⊗ … ⊗ R_v ⊗ … ⊗ I` and products over distinct axes.
//! * [`incline`]: certified search for directions inclined to a family.
//! * [`family`]: stages, leakage sets, branch projections and certificates.
//! * [`formats`]: JSON file formats shared with the command-line tool.

pub mod error;
pub mod exact;
pub mod family;
pub mod formats;
pub mod hilbert;
pub mod incline;
pub mod index;
pub mod projection;
pub mod rng;

pub use error::{Error, Result};
pub use hilbert::{inner, rank_one_apply, ComplexVector, Projection};
