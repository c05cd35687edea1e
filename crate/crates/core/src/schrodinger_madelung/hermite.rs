use num_complex::Complex64;

use super::Wavefunction;
use crate::error::{Error, Result};
use crate::numerics::{Field, Grid1D};
use crate::units::Units;

/// Highest oscillator level supported by the recurrence at double precision.
pub const MAX_HO_LEVEL: usize = 30;

/// Normalised Hermite functions `φ_0 ..= φ_{n_max}` at `xi` (dimensionless).
///
/// Uses the three-term recurrence on the normalised functions, which stays
/// bounded where the raw Hermite polynomials overflow.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let phi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(phi0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * xi * phi0);
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Analytic harmonic-oscillator eigenstate with its exact second derivative.
#[derive(Debug, Clone)]
pub struct HoEigenstate {
    pub n: usize,
    pub energy: f64,
    pub psi: Wavefunction,
    /// `ψ''(x)` from the ladder-operator identity, independent of the potential.
    pub curvature: Field,
}

impl HoEigenstate {
    pub fn amplitude(&self) -> Field {
        self.psi.field().map(|z| z.re)
    }

    /// `R''` for `R = |ψ|` on the index window `range`: the analytic `ψ''`
    /// carrying the sign of `ψ`.
    pub fn modulus_curvature(&self, range: std::ops::Range<usize>) -> Result<Field> {
        let psi = self.amplitude().window(range.clone())?;
        let curv = self.curvature.window(range)?;
        psi.zip_map(&curv, |p, c| if p < 0.0 { -c } else { c })
    }
}

/// Oscillator eigenstate `n` for `V = m ω² x² / 2` on `grid`, energy `ħω(n + 1/2)`.
pub fn ho_eigenstate(n: usize, grid: Grid1D, units: &Units) -> Result<HoEigenstate> {
    if n > MAX_HO_LEVEL {
        return Err(Error::invalid(
            "n",
            format!("level {n} exceeds the supported maximum {MAX_HO_LEVEL}"),
        ));
    }
    let alpha = units.mass * units.omega / units.hbar;
    let scale = alpha.powf(0.25);
    let nf = n as f64;
    let mut psi = Vec::with_capacity(grid.len());
    let mut curv = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let xi = alpha.sqrt() * x;
        let phis = hermite_functions(n + 2, xi);
        let lower = if n >= 2 {
            (nf * (nf - 1.0)).sqrt() * phis[n - 2]
        } else {
            0.0
        };
        let upper = ((nf + 1.0) * (nf + 2.0)).sqrt() * phis[n + 2];
        // d²/dξ² = (a - a†)² / 2
        let d2 = 0.5 * (lower - (2.0 * nf + 1.0) * phis[n] + upper);
        psi.push(Complex64::new(scale * phis[n], 0.0));
        curv.push(scale * alpha * d2);
    }
    let psi = Wavefunction::unnormalized(grid, psi, 0.0, units)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > super::NORM_TOLERANCE {
        return Err(Error::invalid(
            "grid",
            format!("grid does not cover the support of level {n} (norm {norm})"),
        ));
    }
    Ok(HoEigenstate {
        n,
        energy: units.hbar * units.omega * (nf + 0.5),
        psi,
        curvature: Field::new(grid, curv)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::symmetric(12.0, 2001).unwrap()
    }

    #[test]
    fn ground_state_closed_form() {
        let s = ho_eigenstate(0, grid(), &Units::natural()).unwrap();
        assert_eq!(s.energy, 0.5);
        for (x, z) in grid().points().zip(s.psi.values()) {
            let exact = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
            assert!((z.re - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn first_excited_has_node_at_origin() {
        let s = ho_eigenstate(1, grid(), &Units::natural()).unwrap();
        assert_eq!(s.energy, 1.5);
        assert_eq!(s.psi.values()[1000].re, 0.0);
        assert!(s.psi.values()[999].re < 0.0 && s.psi.values()[1001].re > 0.0);
    }

    #[test]
    fn orthonormal_up_to_ten() {
        let states: Vec<_> = (0..=10)
            .map(|n| ho_eigenstate(n, grid(), &Units::natural()).unwrap())
            .collect();
        for m in 0..=10 {
            for n in 0..=10 {
                let z = states[m].psi.inner(&states[n].psi).unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((z.re - want).abs() < 1e-8 && z.im.abs() < 1e-15, "<{m}|{n}> = {z}");
            }
        }
    }

    #[test]
    fn curvature_satisfies_oscillator_equation() {
        // ψ'' = (x² - (2n+1)) ψ in natural units
        for n in [0, 3, 7] {
            let s = ho_eigenstate(n, grid(), &Units::natural()).unwrap();
            for (i, x) in grid().points().enumerate() {
                let want = (x * x - (2 * n + 1) as f64) * s.psi.values()[i].re;
                assert!((s.curvature.values()[i] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn physical_units_scale() {
        let units = Units {
            mass: 2.0,
            omega: 3.0,
            hbar: 0.5,
            ..Units::default()
        };
        let g = Grid1D::symmetric(4.0, 2001).unwrap();
        let s = ho_eigenstate(2, g, &units).unwrap();
        assert!((s.energy - 0.5 * 3.0 * 2.5).abs() < 1e-15);
        assert!((s.psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn level_limit() {
        assert!(ho_eigenstate(31, grid(), &Units::natural()).is_err());
        assert!(ho_eigenstate(30, grid(), &Units::natural()).is_ok());
    }

    #[test]
    fn narrow_grid_rejected() {
        let g = Grid1D::symmetric(1.0, 201).unwrap();
        assert!(ho_eigenstate(0, g, &Units::natural()).is_err());
    }
}
