//! Pseudo-cones over pointed convex cones.
//!
//! A `C`-pseudo-cone is a closed convex set `K ⊂ C` avoiding the origin
//! whose recession cone is `C`. This crate represents them as Wulff shapes of
//! finitely many facets and provides
//!
//! * cones, dual cones and equal-weight spherical quadrature on `Omega_C`
//!   ([`geometry`]);
//! * radial and support functions, the radial Gauss map ([`pseudocone`]);
//! * `J_G`, dual volumes, `F`-radial and dual curvature measures
//!   ([`measures`]);
//! * the derivative of `J_G` under Wulff perturbations and the functional
//!   `Φ` ([`variational`]);
//! * a solver for the discrete dual Minkowski problem with `q < 0`
//!   ([`solver`]).
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix double precision, which the file formats in [`io`] use.

// `!(a <= b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod pseudocone;
pub mod radial_table;
pub mod scalar;
pub mod solver;
pub mod variational;

pub use error::{ConeDefect, Error, FacetDefect, Result};
pub use geometry::{sphere_grid, Cone, ConeKind, GridScheme, MonteCarloEstimate, QuadratureGrid};
pub use measures::{
    dual_curvature, dual_curvature_for, dual_volume, j_g, radial_measure, Atom, DecayKind,
    DecayPair, DiscreteMeasure,
};
pub use pseudocone::{Facet, NodeValue, PseudoCone, RadialGaussResult};
pub use radial_table::{Piece, RadialTable};
pub use scalar::Real;
pub use solver::{
    distance_upper_bound, solve_dual_minkowski, solve_on_grid, SolverOptions, SolverResult,
    SolverStatus, TraceRow,
};
pub use variational::{
    jg_derivative_exact, jg_derivative_fd, phi, phi_gradient, phi_of, FdSample, PhiEval,
    PhiObjective, VariationalReport,
};

pub type Cone64 = Cone<f64>;
pub type Cone32 = Cone<f32>;
pub type PseudoCone64 = PseudoCone<f64>;
pub type PseudoCone32 = PseudoCone<f32>;
pub type QuadratureGrid64 = QuadratureGrid<f64>;
pub type QuadratureGrid32 = QuadratureGrid<f32>;
pub type DiscreteMeasure64 = DiscreteMeasure<f64>;
pub type DiscreteMeasure32 = DiscreteMeasure<f32>;
pub type DecayPair64 = DecayPair<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type SolverResult64 = SolverResult<f64>;
