//! The statistical Hamilton balance: ground-state bracket, entropic closure on
//! a moving density, and the dispersion-free limit.

use std::f64::consts::PI;

use madelung_lab::families::cold_oscillator;
use madelung_lab::numerics::{Field, Grid1D};
use madelung_lab::phase_space::{
    hamilton_terms, statistical_bracket, statistical_hamiltonian, DensityFields, FluctuationClosure,
};
use madelung_lab::Units;

fn main() -> madelung_lab::Result<()> {
    let units = Units::natural();
    let g = Grid1D::symmetric(6.0, 2401)?;
    let rho = Field::from_fn(g, |x| (-x * x).exp() / PI.sqrt());
    let ground = DensityFields::dispersion_free(rho, Field::from_fn(g, |_| 0.0), 0.0)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let h = statistical_hamiltonian(&ground, &v, &units)?;
    let b = statistical_bracket(&ground, &v, &units)?;
    for x in [-2.0, 0.0, 1.0] {
        let i = g.nearest_index(x);
        println!("x = {x:>4}: H = {:.6}, bracket = {:.8}", h.values()[i], b.values()[i]);
    }

    let g = Grid1D::symmetric(4.0, 401)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let dt = 1e-4;
    let f: Vec<_> = [0.5 - dt, 0.5, 0.5 + dt]
        .iter()
        .map(|&t| cold_oscillator(g, t, 1.0, 1.0))
        .collect::<Result<_, _>>()?;
    let refs = [&f[0], &f[1], &f[2]];
    let measured = hamilton_terms(refs, &v, 1.0, FluctuationClosure::Measured)?;
    let entropic = hamilton_terms(refs, &v, 1.0, FluctuationClosure::Entropic { hbar: 1.0 })?;
    println!("cold ensemble, measured closure: classical {:.1e}, fluctuation term {:.1e}", measured.classical.max_abs(), measured.statistical.max_abs());
    println!("same fields, entropic closure: fluctuation term {:.3}", entropic.statistical.max_abs());
    Ok(())
}
