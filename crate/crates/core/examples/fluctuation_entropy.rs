//! Entropy of a density, Gaussian fluctuations about its maximum and the
//! resulting position-momentum product.

use std::f64::consts::PI;

use madelung_lab::equilibrium::{
    entropy_field, fluctuation_density, fluctuation_model, mean_square_displacement,
    mean_square_displacement_quadrature, momentum_dispersion_entropy,
};
use madelung_lab::numerics::{Field, Grid1D};
use madelung_lab::Error;

fn main() -> madelung_lab::Result<()> {
    let g = Grid1D::symmetric(4.0, 401)?;
    for var in [0.25, 0.5, 2.0] {
        let rho = Field::from_fn(g, |x| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt());
        let s = entropy_field(&rho, 1.0)?;
        let model = fluctuation_model(&s)?;
        let msd = mean_square_displacement(&model)?;
        let disp = momentum_dispersion_entropy(&rho, 1.0)?;
        let i = g.nearest_index(0.0);
        let gamma = model.gamma.values()[i];
        println!(
            "σ² = {var}: γ = {gamma:.4}, <δx²> = {:.6} (quadrature {:.6}), <δp²> = {:.6}, product = {:.12}",
            msd.values()[i],
            mean_square_displacement_quadrature(gamma)?,
            disp.values()[i],
            msd.values()[i] * disp.values()[i]
        );
        let w = fluctuation_density(&rho, 1.0, i, &[0.0, 0.5, 1.0])?;
        println!("    ρ(0, δx) for δx = 0, 0.5, 1: {:.5} {:.5} {:.5}", w[0], w[1], w[2]);
    }

    // a double well has a local entropy minimum between its peaks
    let rho = Field::from_fn(g, |x| {
        0.5 * ((-(x - 1.5).powi(2) * 2.0).exp() + (-(x + 1.5).powi(2) * 2.0).exp()) * (2.0 / PI).sqrt()
    });
    match fluctuation_model(&entropy_field(&rho, 1.0)?) {
        Err(Error::FlatDirection { x, curvature }) => {
            println!("double well: entropy is not concave at x = {x:.2} (curvature {curvature:.3})")
        }
        other => println!("double well: {other:?}"),
    }
    Ok(())
}
