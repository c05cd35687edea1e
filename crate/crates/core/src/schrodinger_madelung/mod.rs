//! Wavefunctions, harmonic-oscillator eigenstates, the stationary and
//! time-dependent Schrödinger solvers, the Madelung (R, s) decomposition with
//! its quantum Hamilton-Jacobi residual, and metastable decay.

mod decay;
mod evolve;
mod hermite;
mod madelung;
mod stationary;

pub use decay::{
    decay_rate, master_zq_residual, metastable_state, reduced_continuity_residual,
    sink_continuity_residual, DecaySpec, DecayingState, Lifetime,
};
pub use evolve::evolve;
pub use hermite::{ho_eigenstate, hermite_functions, HoEigenstate, MAX_HO_LEVEL};
pub use madelung::{
    madelung_decompose, qhj_residual, quantum_potential, quantum_potential_from_curvature,
    quantum_potential_with, MadelungDecomposition, MadelungFields, DEFAULT_DENSITY_FLOOR,
    NODE_EXCLUSION,
};
pub use stationary::{solve_stationary, Eigenstate};

pub(crate) use madelung::time_step;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, Field, Grid1D};
use crate::units::Units;

/// Tolerance on `∫|ψ|² dx = 1` accepted by [`Wavefunction::new`].
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Complex amplitude sampled on a grid at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    field: Field<Complex64>,
    pub time: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl Wavefunction {
    /// Normalised wavefunction; fails if the norm differs from 1 by more than
    /// [`NORM_TOLERANCE`].
    pub fn new(grid: Grid1D, values: Vec<Complex64>, time: f64, units: &Units) -> Result<Self> {
        let psi = Self::unnormalized(grid, values, time, units)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(
                "values",
                format!("wavefunction norm {norm} differs from 1"),
            ));
        }
        Ok(psi)
    }

    /// Amplitude without the normalisation check (decaying or trial states).
    pub fn unnormalized(grid: Grid1D, values: Vec<Complex64>, time: f64, units: &Units) -> Result<Self> {
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("values", "wavefunction samples must be finite"));
        }
        Ok(Self {
            field: Field::new(grid, values)?,
            time,
            hbar: units.hbar,
            mass: units.mass,
        })
    }

    pub fn from_real(grid: Grid1D, values: &[f64], time: f64, units: &Units) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            time,
            units,
        )
    }

    pub fn grid(&self) -> &Grid1D {
        self.field.grid()
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

    pub fn field(&self) -> &Field<Complex64> {
        &self.field
    }

    pub fn units(&self) -> Units {
        Units {
            hbar: self.hbar,
            mass: self.mass,
            ..Units::default()
        }
    }

    /// `|ψ|²` as a real field.
    pub fn density(&self) -> Field {
        self.field.map(|z| z.norm_sqr())
    }

    /// `∫|ψ|² dx`.
    pub fn norm(&self) -> f64 {
        integrate(&self.density())
    }

    /// `⟨self|other⟩` by quadrature.
    pub fn inner(&self, other: &Wavefunction) -> Result<Complex64> {
        let prod = self.field.zip_map(&other.field, |a, b| a.conj() * b)?;
        Ok(integrate(&prod))
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            field: self.field.map(|z| z * factor),
            ..self.clone()
        }
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `e^{-iEt/ħ} ψ`, the stationary-state time dependence, stamped with time `t`.
    pub fn evolved_phase(&self, energy: f64, t: f64) -> Self {
        let phase = Complex64::from_polar(1.0, -energy * (t - self.time) / self.hbar);
        self.scaled(phase).with_time(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnormalised_rejected() {
        let g = Grid1D::symmetric(8.0, 801).unwrap();
        let vals: Vec<f64> = g.points().map(|x| (-x * x / 2.0).exp()).collect();
        assert!(Wavefunction::from_real(g, &vals, 0.0, &Units::natural()).is_err());
        let norm = std::f64::consts::PI.sqrt().sqrt();
        let vals: Vec<f64> = vals.iter().map(|v| v / norm).collect();
        assert!(Wavefunction::from_real(g, &vals, 0.0, &Units::natural()).is_ok());
    }
}
