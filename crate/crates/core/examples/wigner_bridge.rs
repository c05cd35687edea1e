//! Momentum statistics read off the characteristic function, checked against
//! direct moments for a family of distributions.

use madelung_lab::cli::{equivalence_dx_grid, equivalence_gap};
use madelung_lab::families::{canonical_oscillator, equivalence_family};
use madelung_lab::phase_space::{extract_moments, momentum_dispersion_direct};
use madelung_lab::schrodinger_madelung::ho_eigenstate;
use madelung_lab::numerics::Grid1D;
use madelung_lab::wigner_moyal::{
    characteristic_function, factorization_residual, momentum_partition_stats,
};
use madelung_lab::Units;

fn main() -> madelung_lab::Result<()> {
    let dx = equivalence_dx_grid()?;
    for (name, f) in equivalence_family()? {
        let d = extract_moments(&f)?;
        let direct = momentum_dispersion_direct(&f, &d)?;
        let z = characteristic_function(&f, dx, 1.0)?;
        println!("{name:<28} max relative gap {:.2e}", equivalence_gap(&z, &direct, &d.rho)?);
    }

    // the oscillator ground state factorizes exactly
    let f = canonical_oscillator(0.0)?;
    let z = characteristic_function(&f, Grid1D::centered(2.0 * f.x_grid().spacing(), 1)?, 1.0)?;
    let psi = ho_eigenstate(0, *f.x_grid(), &Units::natural())?.psi;
    println!("ground-state factorization residual {:.2e}", factorization_residual(&z, &psi)?.max_abs());

    let z = characteristic_function(&f, dx, 1.0)?;
    let stats = momentum_partition_stats(&z)?;
    let mid = stats.len() / 2;
    let s = stats[mid];
    println!("at x = {:.2}: <p> = {:.3e}, <p²> = {:.6}, dispersion = {:.6}", s.x, s.mean_p, s.mean_p2, s.dispersion);

    let mut out = Vec::new();
    z.write_csv(&mut out)?;
    println!("Z export: {} lines, header {:?}", out.split(|b| *b == b'\n').count() - 1, String::from_utf8_lossy(&out[..out.iter().position(|b| *b == b'\n').unwrap()]));
    Ok(())
}
