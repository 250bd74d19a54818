//! Discrete symmetric multi-marginal optimal transport.
//!
//! Everything operates on weighted point clouds in `R^d`. The toolkit solves
//! the multi-marginal Kantorovich problem exactly by linear programming
//! (with dual certificates), its cyclically symmetric variant, and the
//! combinatorial problems sitting underneath: optimization over
//! measure-preserving m-involutions, polar factorization of sampled vector
//! fields, and monotonicity tests backed by Fitzpatrick functions and
//! self-dual Lagrangians tabulated on grids.
//!
//! The crate is `no_std` (with `alloc`); all I/O lives in the companion
//! `symot` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod costs;
pub mod duality;
pub mod error;
pub mod involution;
pub mod measures;
pub mod monotone;
pub mod tensor;
pub mod transport;

pub use error::Error;

/// Dense tensors larger than this many entries are rejected.
pub const DENSE_CAP: usize = 1_000_000;

/// Exhaustive involution enumeration is refused above this support size.
pub const ENUMERATION_CAP: usize = 10;

pub type Result<T> = core::result::Result<T, Error>;
