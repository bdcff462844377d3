//! Exact, budgeted constructions on a computable copy of the rationals.
//!
//! Rationals are finite bit-strings under the dense string order
//! ([`qspace`]). On top of that sit pair and point colorings
//! ([`colorings`]), the two-case homogeneous-set construction
//! ([`ersolver`]), staged selection of disjoint intervals ([`disjsel`]),
//! a diagonalization game against enumerations ([`diagforge`]) and the
//! calculus of matrices, types and valuations behind fair partitions
//! ([`fairness`]).
//!
//! Every notion that is not finitely decidable ("dense", "positive",
//! "essential", "almost every") is checked relative to an explicit bound,
//! and running out of budget is always reported as an error.

#![no_std]

extern crate alloc;

pub mod colorings;
pub mod diagforge;
pub mod disjsel;
pub mod ersolver;
pub mod fairness;
pub mod qspace;

pub use qspace::{DepthBound, Endpoint, Interval, QPoint, SimplePartition};
