//! Near-field focusing of cylindrical dipole arrays.
//!
//! Rings of z-polarized dipoles on a cylinder are driven with
//! conjugate-phase weights. The crate evaluates the discrete field sums
//! ([`field`]), their continuum closed forms and a quadrature oracle
//! ([`analytic`]), beam-profile resolution metrics ([`resolution`]) and
//! deterministic CSV/JSON output ([`io`], [`report`]). [`validation`] holds
//! the acceptance checks.

pub mod analytic;
pub mod array;
pub mod field;
pub mod io;
pub mod quad;
pub mod report;
pub mod resolution;
pub mod specfun;
pub mod validation;
