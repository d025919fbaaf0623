//! Exact computation with the derivation algebra of a truncated polynomial
//! ring over a small finite field.
//!
//! The crate is built around a handful of layers:
//!
//! * [`gf`] — arithmetic in `F_{p^m}` with deterministic moduli, plus the
//!   dual-number extension used for directional derivatives;
//! * [`poly`], [`charpoly`], [`linalg`] — exact univariate polynomials,
//!   division-free characteristic polynomials and dense matrix kernels;
//! * [`oring`] — the truncated polynomial ring `O_n = k[x_1..x_n]/(x_i^p)`;
//! * [`witt`] — derivations of `O_n`: brackets, p-th powers, gradings and
//!   the semisimple/nilpotent decomposition;
//! * [`autgrp`] — the automorphism group of `O_n` and its action on
//!   derivations;
//! * [`invar`] — the invariants `psi_i`, the semiinvariants `delta`,
//!   `delta_0..delta_n` and their directional derivatives;
//! * [`reglab`] — regularity certificates, tori and weight tables,
//!   canonical forms of regular derivations, and fibre scans;
//! * [`suites`] — the deterministic verification suites driven by the CLI
//!   and by the acceptance tests.
//!
//! The crate is `no_std` (alloc required); IO and the command line live in
//! the companion `wittlab` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod autgrp;
pub mod charpoly;
pub mod embed;
pub mod error;
pub mod gf;
pub mod invar;
pub mod linalg;
pub mod oring;
pub mod parse;
pub mod poly;
pub mod reglab;
pub mod sample;
pub mod suites;
pub mod witt;

pub use error::{Error, Result};
