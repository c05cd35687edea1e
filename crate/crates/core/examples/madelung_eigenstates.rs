//! `V + Q = E` on the node-free pieces of oscillator eigenstates, analytic and
//! from the finite-difference solver.

use madelung_lab::cli::solver_identity_gap;
use madelung_lab::numerics::{Field, Grid1D};
use madelung_lab::schrodinger_madelung::{
    ho_eigenstate, madelung_decompose, quantum_potential_from_curvature, solve_stationary,
    DEFAULT_DENSITY_FLOOR,
};
use madelung_lab::Units;

fn main() -> madelung_lab::Result<()> {
    let units = Units::natural();
    let g = Grid1D::symmetric(12.0, 2001)?;
    for n in 0..=5 {
        let s = ho_eigenstate(n, g, &units)?;
        let d = madelung_decompose(&s.psi, DEFAULT_DENSITY_FLOOR)?;
        let mut worst = 0.0f64;
        for seg in &d.segments {
            let curv = s.modulus_curvature(seg.offset..seg.offset + seg.r.len())?;
            let q = quantum_potential_from_curvature(&seg.r, &curv, &units)?;
            for (x, qv) in seg.r.grid().points().zip(q.values()) {
                worst = worst.max((0.5 * x * x + qv - s.energy).abs() / s.energy);
            }
        }
        println!("n = {n}: {} segments, max |V + Q - E|/E = {worst:.1e}", d.segments.len());
    }

    let g = Grid1D::symmetric(10.0, 4001)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    for s in solve_stationary(&v, &units, 6)? {
        println!(
            "solver n = {}: E = {:.8}, max |V + Q - E|/E = {:.1e}",
            s.index,
            s.energy,
            solver_identity_gap(&s.psi, &v, s.energy)?
        );
    }
    Ok(())
}
