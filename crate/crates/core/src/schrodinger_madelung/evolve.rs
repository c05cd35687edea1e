use num_complex::Complex64;

use super::Wavefunction;
use crate::error::{Error, Result};
use crate::numerics::Field;

/// Crank-Nicolson propagation of `ψ` under `-(ħ²/2m) ∂² + V` for `steps`
/// steps of size `dt`, with `ψ = 0` held at both grid ends.
///
/// The Cayley form `(1 + iHΔt/2ħ) ψ' = (1 - iHΔt/2ħ) ψ` is unitary, so the
/// discrete norm is conserved to round-off.
pub fn evolve(psi: &Wavefunction, potential: &Field, dt: f64, steps: usize) -> Result<Wavefunction> {
    if !potential.grid().same_as(psi.grid()) {
        return Err(Error::invalid("potential", "potential and wavefunction grids differ"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("time step must be positive, got {dt}")));
    }
    let vmax = potential.max_abs();
    if dt * vmax / psi.hbar >= 0.5 {
        return Err(Error::invalid(
            "dt",
            format!("dt·max|V|/ħ = {} must stay below 0.5", dt * vmax / psi.hbar),
        ));
    }
    let n = psi.grid().len();
    let h = psi.grid().spacing();
    let kin = psi.hbar * psi.hbar / (2.0 * psi.mass * h * h);
    let half = Complex64::new(0.0, dt / (2.0 * psi.hbar));

    // interior unknowns 1..n-1
    let m = n - 2;
    let v = &potential.values()[1..n - 1];
    let diag_h: Vec<f64> = v.iter().map(|vi| 2.0 * kin + vi).collect();
    let off_h = -kin;

    // LHS = 1 + half·H, factorised once (Thomas)
    let lower = half * off_h;
    let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
    let mut denom = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        let d = Complex64::new(1.0, 0.0) + half * diag_h[i];
        let den = if i == 0 { d } else { d - lower * c_prime[i - 1] };
        denom[i] = den;
        c_prime[i] = lower / den;
    }

    let mut state: Vec<Complex64> = psi.values()[1..n - 1].to_vec();
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..steps {
        for i in 0..m {
            let mut hpsi = diag_h[i] * state[i];
            if i > 0 {
                hpsi += off_h * state[i - 1];
            }
            if i + 1 < m {
                hpsi += off_h * state[i + 1];
            }
            rhs[i] = state[i] - half * hpsi;
        }
        // forward sweep
        state[0] = rhs[0] / denom[0];
        for i in 1..m {
            state[i] = (rhs[i] - lower * state[i - 1]) / denom[i];
        }
        for i in (0..m - 1).rev() {
            let next = state[i + 1];
            state[i] -= c_prime[i] * next;
        }
    }

    let mut values = Vec::with_capacity(n);
    values.push(Complex64::new(0.0, 0.0));
    values.extend(state);
    values.push(Complex64::new(0.0, 0.0));
    Wavefunction::unnormalized(*psi.grid(), values, psi.time + dt * steps as f64, &psi.units())
}
