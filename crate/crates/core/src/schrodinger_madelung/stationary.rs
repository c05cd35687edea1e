use num_complex::Complex64;

use super::Wavefunction;
use crate::error::{Error, Result};
use crate::numerics::{integrate, solve_tridiag_eigen, Field};
use crate::units::Units;

/// One eigenpair of the discretised Hamiltonian.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    pub index: usize,
    pub energy: f64,
    pub psi: Wavefunction,
}

impl Eigenstate {
    /// Real amplitude of the (real) eigenfunction.
    pub fn amplitude(&self) -> Field {
        self.psi.field().map(|z| z.re)
    }
}

/// Relative magnitude a sample must exceed before it fixes the sign convention.
const SIGN_THRESHOLD: f64 = 1e-8;

/// Lowest `k` eigenpairs of `-(ħ²/2m) d²/dx² + V` with the three-point
/// Laplacian and zero values at both grid ends.
///
/// Eigenfunctions are real, normalised under Simpson quadrature, and signed so
/// that the first significant interior sample is positive.
pub fn solve_stationary(potential: &Field, units: &Units, k: usize) -> Result<Vec<Eigenstate>> {
    if !potential.is_finite() {
        return Err(Error::invalid("potential", "potential must be finite"));
    }
    let grid = *potential.grid();
    let n = grid.len();
    if n < 5 {
        return Err(Error::invalid("potential", "need at least 5 grid points"));
    }
    let h = grid.spacing();
    let kinetic = units.hbar * units.hbar / (2.0 * units.mass * h * h);
    let interior = &potential.values()[1..n - 1];
    let diagonal: Vec<f64> = interior.iter().map(|v| 2.0 * kinetic + v).collect();
    let off = vec![-kinetic; interior.len() - 1];
    let pairs = solve_tridiag_eigen(&diagonal, &off, k)?;

    pairs
        .into_iter()
        .enumerate()
        .map(|(index, pair)| {
            let mut values = Vec::with_capacity(n);
            values.push(0.0);
            values.extend_from_slice(&pair.vector);
            values.push(0.0);
            let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sign = values
                .iter()
                .find(|v| v.abs() > SIGN_THRESHOLD * peak)
                .map_or(1.0, |v| v.signum());
            let density = Field::new(grid, values.iter().map(|v| v * v).collect())?;
            let scale = sign / integrate(&density).sqrt();
            let psi = Wavefunction::new(
                grid,
                values.iter().map(|v| Complex64::new(v * scale, 0.0)).collect(),
                0.0,
                units,
            )?;
            Ok(Eigenstate {
                index,
                energy: pair.value,
                psi,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;

    #[test]
    fn harmonic_spectrum() {
        let g = Grid1D::symmetric(10.0, 4001).unwrap();
        let v = Field::from_fn(g, |x| 0.5 * x * x);
        let states = solve_stationary(&v, &Units::natural(), 6).unwrap();
        for (n, s) in states.iter().enumerate() {
            assert!((s.energy - (n as f64 + 0.5)).abs() < 1e-4, "E_{n} = {}", s.energy);
            assert!((s.psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn particle_in_box_scales_as_n_squared() {
        // walls at ±1 via large potential outside
        let g = Grid1D::symmetric(1.5, 1501).unwrap();
        let v = Field::from_fn(g, |x| if x.abs() > 1.0 { 1e6 } else { 0.0 });
        let states = solve_stationary(&v, &Units::natural(), 4).unwrap();
        let e1 = states[0].energy;
        for (i, s) in states.iter().enumerate() {
            let ratio = s.energy / e1;
            let want = ((i + 1) * (i + 1)) as f64;
            assert!((ratio - want).abs() / want < 2e-2, "ratio {ratio} vs {want}");
        }
        let exact = std::f64::consts::PI.powi(2) / 8.0;
        assert!((e1 - exact).abs() / exact < 2e-2);
    }

    #[test]
    fn free_box_ground_state_has_no_interior_node() {
        let g = Grid1D::new(0.0, 1.0, 201).unwrap();
        let v = Field::from_fn(g, |_| 0.0);
        let states = solve_stationary(&v, &Units::natural(), 2).unwrap();
        let ground = states[0].amplitude();
        assert!(ground.values()[1..200].iter().all(|&v| v > 0.0));
        let first = states[1].amplitude();
        let changes = first.values()[1..200]
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        assert_eq!(changes, 1);
    }

    #[test]
    fn sign_convention() {
        let g = Grid1D::symmetric(10.0, 801).unwrap();
        let v = Field::from_fn(g, |x| 0.5 * x * x);
        for s in solve_stationary(&v, &Units::natural(), 4).unwrap() {
            let amp = s.amplitude();
            let peak = amp.max_abs();
            let first = amp.values().iter().find(|v| v.abs() > 1e-8 * peak).unwrap();
            assert!(*first > 0.0);
        }
    }
}
