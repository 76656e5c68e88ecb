//! Adoption equilibria for two network services with positive externalities,
//! offered either separately or as a bundle.
//!
//! Each consumer holds a pair of affinities `(U1, U2)` with uniform marginals
//! on `[0, 1]`. A service adopted by a fraction `x` of the population yields
//! utility `U + e*x - c`; a consumer adopts when that utility is positive.
//! The aggregate best-response `h(x)` is then the survival function of the
//! affinity evaluated at `c - e*x`, and market outcomes are fixed points
//! `h(x*) = x*`.
//!
//! The crate covers:
//!
//! * [`continuous`]: affinity pairs coupled through a Gaussian copula with
//!   parameter `rho`, including the closed forms at `rho` in `{-1, 0, +1}`
//!   and quadrature-based evaluation elsewhere;
//! * [`discrete`]: Bernoulli affinity pairs with correlation `1 - 2p`;
//! * [`equilibrium`]: fixed-point solvers, stability classification, and the
//!   closed-form catalog of lowest stable equilibria (lseq);
//! * [`comparison`]: separate-vs-bundle outcome comparison and the
//!   feasibility tables over joint outcome classes;
//! * [`simulation`]: seeded finite-population best-response dynamics used as
//!   an independent oracle for every closed form.
//!
//! The crate is `no_std` (with `alloc`) so the model layer can be embedded;
//! IO, file formats, and the CLI live in the companion `netbundle-cli` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::excessive_precision)] // reference constants keep their full printed precision

extern crate alloc;

pub mod comparison;
pub mod continuous;
pub mod curve;
pub mod discrete;
pub mod equilibrium;
pub mod error;
pub mod numerics;
pub mod simulation;

pub use error::{Error, Result};
