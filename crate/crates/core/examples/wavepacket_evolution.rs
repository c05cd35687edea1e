//! A displaced ground state in the oscillator, propagated with Crank-Nicolson
//! and followed through its Madelung fields.

use std::f64::consts::PI;

use madelung_lab::numerics::{integrate, Field, Grid1D};
use madelung_lab::schrodinger_madelung::{evolve, madelung_decompose, Wavefunction, DEFAULT_DENSITY_FLOOR};
use madelung_lab::Units;

fn main() -> madelung_lab::Result<()> {
    let units = Units::natural();
    let g = Grid1D::symmetric(10.0, 2001)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let shift = 1.5;
    let values: Vec<f64> = g.points().map(|x| PI.powf(-0.25) * (-(x - shift).powi(2) / 2.0).exp()).collect();
    let mut psi = Wavefunction::from_real(g, &values, 0.0, &units)?;

    let quarter = 0.25 * PI;
    let steps = 400;
    println!("{:>6} {:>9} {:>9} {:>9} {:>9} {:>12}", "t", "<x>", "<p>", "x_cl", "p_cl", "norm - 1");
    for k in 0..=8 {
        let t = k as f64 * quarter;
        // tails below the floor are left out, so moments are weighted by the resolved mass
        let (mut mass, mut mean_x, mut mean_p) = (0.0, 0.0, 0.0);
        for seg in madelung_decompose(&psi, DEFAULT_DENSITY_FLOOR)?.segments {
            let rho = seg.density();
            let x = Field::from_fn(*rho.grid(), |x| x);
            mass += integrate(&rho);
            mean_x += integrate(&x.zip_map(&rho, |x, r| x * r)?);
            mean_p += integrate(&seg.p_field.zip_map(&rho, |p, r| p * r)?);
        }
        println!(
            "{t:>6.3} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>12.2e}",
            mean_x / mass,
            mean_p / mass,
            shift * t.cos(),
            -shift * t.sin(),
            psi.norm() - 1.0
        );
        psi = evolve(&psi, &v, quarter / steps as f64, steps)?;
    }
    Ok(())
}
