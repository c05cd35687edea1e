//! Reference distributions shared by the verification suites, the
//! acceptance run and the examples.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{Field, Grid1D};
use crate::phase_space::{DensityFields, PhaseSpaceDistribution};

fn gauss(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Bivariate normal density with correlation `r`.
fn gauss2(x: f64, p: f64, (mx, mp): (f64, f64), (vx, vp): (f64, f64), r: f64) -> f64 {
    let (sx, sp) = (vx.sqrt(), vp.sqrt());
    let (u, w) = ((x - mx) / sx, (p - mp) / sp);
    let q = (u * u - 2.0 * r * u * w + w * w) / (1.0 - r * r);
    (-0.5 * q).exp() / (2.0 * PI * sx * sp * (1.0 - r * r).sqrt())
}

/// Grids used by [`equivalence_family`].
pub fn equivalence_grids() -> (Grid1D, Grid1D) {
    (
        Grid1D::symmetric(8.0, 161).expect("valid grid"),
        Grid1D::symmetric(12.0, 961).expect("valid grid"),
    )
}

/// Smooth distributions with known structure: Gaussian products, shifted and
/// correlated Gaussians, and mixtures that are bimodal in momentum.
pub fn equivalence_family() -> Result<Vec<(&'static str, PhaseSpaceDistribution)>> {
    let (xg, pg) = equivalence_grids();
    let v = Field::from_fn(xg, |x| 0.5 * x * x);
    type Shape = fn(f64, f64) -> f64;
    let shapes: [(&'static str, Shape); 12] = [
        ("product", |x, p| gauss(x, 0.0, 1.0) * gauss(p, 0.0, 1.0)),
        ("product_drifting", |x, p| gauss(x, 0.0, 0.8) * gauss(p, 1.5, 0.5)),
        ("shifted_wide", |x, p| gauss(x, 1.0, 1.5) * gauss(p, -0.5, 2.0)),
        ("correlated_positive", |x, p| gauss2(x, p, (0.0, 0.0), (1.0, 1.0), 0.5)),
        ("correlated_negative", |x, p| gauss2(x, p, (0.5, 0.3), (1.2, 0.7), -0.8)),
        ("bimodal_symmetric", |x, p| {
            gauss(x, 0.0, 1.0) * 0.5 * (gauss(p, -1.5, 0.3) + gauss(p, 1.5, 0.3))
        }),
        ("bimodal_weighted", |x, p| {
            gauss(x, 0.0, 1.0) * (0.3 * gauss(p, -1.0, 0.4) + 0.7 * gauss(p, 2.0, 0.6))
        }),
        ("bimodal_position_dependent", |x, p| {
            let a = 1.0 + 0.2 * x;
            gauss(x, 0.0, 1.0) * 0.5 * (gauss(p, -a, 0.3) + gauss(p, a, 0.3))
        }),
        ("correlated_shifted", |x, p| gauss2(x, p, (-0.7, 1.0), (0.6, 1.5), 0.3)),
        ("position_dependent_width", |x, p| {
            gauss(x, 0.0, 1.0) * gauss(p, 0.0, 0.5 + 0.2 * x * x / (1.0 + x * x))
        }),
        ("trimodal", |x, p| {
            gauss(x, 0.0, 1.0) * (0.25 * gauss(p, -2.0, 0.3) + 0.5 * gauss(p, 0.0, 0.3) + 0.25 * gauss(p, 2.0, 0.3))
        }),
        ("spatial_mixture", |x, p| {
            0.5 * gauss(x, -1.5, 0.5) * gauss(p, 1.0, 0.4) + 0.5 * gauss(x, 1.5, 0.5) * gauss(p, -1.0, 0.8)
        }),
    ];
    shapes
        .into_iter()
        .map(|(name, f)| Ok((name, PhaseSpaceDistribution::from_fn_normalized(xg, pg, 0.0, 1.0, v.clone(), f)?)))
        .collect()
}

/// Free flight of a Gaussian ensemble, `F(x, p, t) = F₀(x - pt/m, p)`.
pub fn free_flow(t: f64, mass: f64) -> Result<PhaseSpaceDistribution> {
    let x = Grid1D::symmetric(10.0, 401)?;
    let p = Grid1D::symmetric(6.0, 241)?;
    PhaseSpaceDistribution::from_fn(x, p, t, mass, Field::from_fn(x, |_| 0.0), |x, p| {
        gauss(x - p * t / mass, 0.0, 1.0) * gauss(p, 0.5, 0.4)
    })
}

/// `F ∝ e^{-2βH}` for the unit oscillator with `K_B T = 1/2`.
pub fn canonical_oscillator(t: f64) -> Result<PhaseSpaceDistribution> {
    let x = Grid1D::symmetric(7.0, 281)?;
    let p = Grid1D::symmetric(7.0, 281)?;
    let v = Field::from_fn(x, |x| 0.5 * x * x);
    PhaseSpaceDistribution::from_fn_normalized(x, p, t, 1.0, v, |x, p| (-(p * p + x * x)).exp())
}

/// Dispersion-free ensemble in `V = mω²x²/2` with every member starting at
/// rest: `p(x, t) = -mωx tan(ωt)` and `ρ` the contracting initial Gaussian.
pub fn cold_oscillator(grid: Grid1D, t: f64, mass: f64, omega: f64) -> Result<DensityFields> {
    let c = (omega * t).cos();
    let rho = Field::from_fn(grid, |x| gauss(x / c, 0.0, 1.0) / c.abs());
    let p = Field::from_fn(grid, |x| -mass * omega * x * (omega * t).tan());
    DensityFields::dispersion_free(rho, p, t)
}

/// Dispersion-free free flow at uniform momentum `p0`: a rigidly translating density.
pub fn uniform_drift(grid: Grid1D, t: f64, mass: f64, p0: f64) -> Result<DensityFields> {
    let rho = Field::from_fn(grid, |x| gauss(x - p0 * t / mass, 0.0, 1.0));
    let p = Field::from_fn(grid, |_| p0);
    DensityFields::dispersion_free(rho, p, t)
}
