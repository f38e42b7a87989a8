//! Numerics for matrix product state (MPS) tensors and their parent
//! Hamiltonians.
//!
//! An MPS tensor is a family of `d` complex `D x D` matrices. Contracting a
//! chain of them against a boundary matrix produces a state on `n` sites, and
//! the span of those states over all boundaries is the physical MPS subspace.
//! This crate computes those subspaces exactly at desk scale, assembles the
//! frustration-free parent Hamiltonians they generate, searches for stability
//! witnesses (the certificate that the parent ground space is exactly the MPS
//! subspace), builds the boundary-pushing operator associated with a witness,
//! and verifies the intersection property and its generalized variant.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable the default
//! `std` feature to use it without the standard library. File IO, the report
//! schema, and the command-line front end live in the companion CLI crate.
//!
//! Modules:
//! - [`linalg`]: tolerance-aware subspace arithmetic over complex matrices.
//! - [`mps`]: MPS tensors, contracted states, physical/virtual/periodic
//!   subspaces, gauge transformations, block decomposition.
//! - [`hamiltonian`]: parent Hamiltonians and exact ground spaces.
//! - [`certify`]: injectivity, nilpotency, stability witnesses, pushing
//!   operators, intersection checks.
//! - [`gallery`]: built-in example tensors with their expected behavior.
//! - [`format`]: the JSON wire format for tensors.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod certify;
pub mod error;
pub mod format;
pub mod gallery;
pub mod hamiltonian;
pub mod linalg;
pub mod mps;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, DenseCap, Subspace, Tolerance};
pub use mps::{MpsTensor, StateVector};
