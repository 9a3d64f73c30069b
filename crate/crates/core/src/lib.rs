//! Deterministic hierarchical scale-free graphs.
//!
//! The family `G(t;m)` starts from a star with `m` leaves; each generation
//! makes `m` copies of the previous graph and joins one new vertex (the hub)
//! to every bottom-level vertex of every copy. Two variants exist: a wheel
//! seed (`G₁`) whose bottom vertices carry rim cycles, and a wheel seed with
//! rim edges deleted independently with probability `p` (`G₂`).
//!
//! The crate is split into four layers:
//!
//! * [`model`] builds instances,
//! * [`analytic`] evaluates closed-form structural and walk quantities exactly,
//! * [`empirical`] measures the same quantities on a built graph,
//! * [`walk`] solves and simulates the trapping problem with the trap on the hub.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod empirical;
mod error;
pub mod exact;
pub mod graph;
pub mod model;
pub mod walk;

pub use error::{Error, Result};
pub use exact::ExactScalar;
pub use graph::Graph;
pub use model::{
    build_base, build_deleted, build_wheel, BuildOptions, DegreeClass, GraphInstance, ModelParams, Variant,
};
