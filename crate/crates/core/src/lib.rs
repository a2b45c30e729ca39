//! Branched hexagonal circle packings as discrete analytic functions.
//!
//! Given a Jordan domain, a positive boundary modulus `λ`, a finite set of
//! critical points and a normalisation point `ξ`, this crate builds the
//! hexagonal subcomplex of mesh `1/n` filling the domain, solves the
//! circle-packing boundary-value problem with boundary radii `λ(z_v)/n` and the
//! prescribed branch vertices, and evaluates the resulting circle-packing map
//! `f_n` and its ratio function `f_n♯`. As `n` grows these converge to the
//! analytic function `F` with `|F'| = λ` on the boundary and to `|F'|`.
//!
//! The modules follow the pipeline:
//!
//! * [`complex`]: lattice patches, domains and branch-point snapping.
//! * [`branch_check`]: exact branch-structure verification plus a brute-force oracle.
//! * [`solver`]: radius iteration, layout of centres, normalisation.
//! * [`cpmap`]: point location, the cp-map, the ratio function and audits.
//! * [`oracle`]: the exact `F` on the unit disk.
//! * [`pipeline`]: problem files, per-mesh runs, reports and SVG output.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch_check;
pub mod complex;
pub mod cpmap;
pub mod oracle;
pub mod pipeline;
pub mod solver;

pub use num_complex::Complex64;
