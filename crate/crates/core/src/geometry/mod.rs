//! Pointed convex cones, their duals, and quadrature on the open spherical
//! domain `Omega_C = S^{n-1} ∩ int C`.

mod cone;
mod grid;

pub use cone::{sphere_area, Cone, ConeKind, MonteCarloEstimate};
pub use grid::{sphere_grid, ArcCells, GridScheme, QuadratureGrid};
