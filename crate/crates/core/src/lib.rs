//! Dynamics of a two-level atom coupled to the edge of a photonic band gap
//! and to a defect mode inside the gap.
//!
//! The band-edge continuum is replaced by a finite set of discrete modes
//! ([`dos`]); the far part of the continuum is eliminated and survives only
//! as a shift of the excited level. The Schrödinger amplitudes of the one- and
//! two-excitation sectors ([`statespace`]) are propagated in time
//! ([`dynamics`]) and reduced to populations ([`observables`]). Single
//! excitation decay is cross-checked against the exact memory-kernel
//! equation ([`oracle`]).
//!
//! Frequencies are in units of `C^(2/3)` and times in `C^(-2/3)`, with `C`
//! the effective atom-reservoir coupling and `hbar = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dos;
pub mod dynamics;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod statespace;

pub use error::{Error, Result};
