//! Grids, quadrature, finite differences, interpolation and the tridiagonal eigensolver.

mod diff;
mod eigen;
mod grid;
mod interp;
mod quadrature;

pub use diff::{derivative, derivative_values, derivative_with, Stencil};
pub use eigen::{inf_norm, residual_inf, solve_tridiag_eigen, EigenPair};
pub use grid::{segments_where, Field, Grid1D, WindowedField, WindowedField2D};
pub use interp::cubic_interpolate;
pub use quadrature::{
    gaussian_truncation_radius, integrate, richardson_even, richardson_even_complex, simpson,
    simpson_weights, Integrand, DEFAULT_TRUNCATION,
};

/// Convenience wrapper for [`Grid1D::new`].
pub fn make_uniform_grid(x_min: f64, x_max: f64, n: usize) -> crate::Result<Grid1D> {
    Grid1D::new(x_min, x_max, n)
}

/// Number of boundary samples dropped from every reported residual.
pub const RESIDUAL_MARGIN: usize = 2;
