//! Finite-precision p-adic machinery for two-dimensional crystabelian
//! representations of `Gal(Q̄_p/Q_p)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic_core`]: scalars of `Q_p` or a ramified extension with tracked
//!   absolute precision, and the cyclotomic algebras `L[X]/Φ_{p^m}`;
//! * [`characters`]: smooth and continuous characters of `Q_p^×`, Gauss sums
//!   and the intertwining constant;
//! * [`series`]: truncated Laurent series with the `φ`, `ψ`, `Γ` and
//!   restriction operators, residues and norms;
//! * [`distributions`]: local moment models of distributions on `Z_p`, the
//!   Amice transform and the `w`-involution;
//! * [`intertwine`]: the smooth intertwining integral on elementary
//!   functions and moment transfer between the two charts;
//! * [`modcris`]: filtered `φ`-modules and the trianguline classifier;
//! * [`refinements`]: refinements, their torus characters and Jacquet
//!   exponents.
//!
//! With the default `parallel` feature, grid sweeps and per-class maps run
//! on rayon; without it the same code runs sequentially and produces
//! identical results.

pub mod characters;
pub mod distributions;
pub mod error;
pub mod intertwine;
pub mod modcris;
pub mod padic_core;
pub mod par;
pub mod refinements;
pub mod series;

pub use error::{Error, Result};
