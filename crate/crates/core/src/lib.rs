//! Semiclassical Gaussian wave-packet dynamics on `R^2d x H_d` (the Siegel
//! upper half space of width matrices), Gaussian Wigner-moment dynamics on
//! `R^2d x sym(2d)`, and the covariance momentum map that bridges the two.
//!
//! The crate provides
//!
//! * [`geometry`] — the Siegel upper half space, the symplectic group and its
//!   Möbius action, the `sym(2d)` Lie algebra with its (co)adjoint structure,
//!   and the covariance map `sigma` together with the differential forms
//!   needed to verify its momentum-map properties numerically;
//! * [`brackets`] — finite-difference and closed-form Poisson-bracket
//!   evaluators for the canonical, width-space, Lie–Poisson, and
//!   semidirect-product brackets, plus the moment maps and untangling maps
//!   that relate them;
//! * [`potentials`] — the potential-energy interface (value, gradient,
//!   Hessian, and the contracted third derivative used by the width-corrected
//!   force) with torsional, harmonic, and quadratic instances;
//! * [`dynamics`] — Hamiltonians and vector fields: classical, corrected
//!   wave-packet, covariance Lie–Poisson, and the linearized symplectic flow;
//! * [`integrators`] — structure-preserving steppers: Störmer–Verlet, an
//!   exact-subflow Strang splitting for wave packets and its congruence image
//!   for covariance matrices, a Cayley midpoint step for symplectic frames,
//!   and an RK4 reference;
//! * [`egorov`] — classical transport of phase-space ensembles sampled from
//!   Gaussian Wigner densities, with deterministic counter-based sampling.
//!
//! All state types are immutable after construction and every operation is a
//! pure function of its inputs, so values can be shared freely across
//! threads. The crate is `no_std`-compatible (it requires `alloc`); disable
//! the default `std` feature to build for targets without a standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod brackets;
pub mod dynamics;
pub mod egorov;
pub mod error;
mod fmath;
pub mod geometry;
pub mod integrators;
pub mod linalg;
pub mod potentials;
pub mod rng;
pub mod sampling;

pub use error::{CoreError, Result};
