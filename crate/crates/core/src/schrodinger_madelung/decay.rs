use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{time_step, Wavefunction};
use crate::error::{Error, Result};
use crate::numerics::{
    derivative_values, Field, Stencil, WindowedField, WindowedField2D, RESIDUAL_MARGIN,
};
use crate::units::Units;
use crate::wigner_moyal::CharacteristicFunction;

/// Initial level, level energies and transition rates out of the initial level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub initial: String,
    /// Energies by level label; levels without an entry skip the ordering check.
    #[serde(default)]
    pub energies: BTreeMap<String, f64>,
    /// `R(i → f)` by final level label.
    pub rates: BTreeMap<String, f64>,
}

impl DecaySpec {
    /// Anonymous final levels `f0, f1, ...` with the given rates and no energies.
    pub fn from_rates(rates: &[f64]) -> Self {
        Self {
            initial: "i".to_string(),
            energies: BTreeMap::new(),
            rates: rates
                .iter()
                .enumerate()
                .map(|(k, &r)| (format!("f{k}"), r))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Lifetime {
    Finite(f64),
    /// No open channel: the level does not decay.
    Infinite,
}

impl Lifetime {
    /// `1/τ`, zero for an infinite lifetime.
    pub fn rate(&self) -> f64 {
        match self {
            Lifetime::Finite(tau) => 1.0 / tau,
            Lifetime::Infinite => 0.0,
        }
    }
}

/// `1/τ = Σ_{f≠i} R(i → f)`.
pub fn decay_rate(spec: &DecaySpec) -> Result<Lifetime> {
    let e_i = spec.energies.get(&spec.initial).copied();
    let mut total = 0.0;
    for (label, &rate) in &spec.rates {
        if *label == spec.initial {
            return Err(Error::invalid("rates", "a rate from the initial level to itself"));
        }
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::invalid("rates", format!("rate to {label} is {rate}")));
        }
        if let (Some(e_i), Some(&e_f)) = (e_i, spec.energies.get(label)) {
            if e_f > e_i {
                return Err(Error::invalid(
                    "energies",
                    format!("final level {label} ({e_f}) lies above the initial level ({e_i})"),
                ));
            }
        }
        total += rate;
    }
    Ok(if total > 0.0 {
        Lifetime::Finite(1.0 / total)
    } else {
        Lifetime::Infinite
    })
}

/// `φ = ψ e^{-t/τ}` at time `t`.
#[derive(Debug, Clone)]
pub struct DecayingState {
    pub phi: Wavefunction,
    pub tau: f64,
}

impl DecayingState {
    pub fn time(&self) -> f64 {
        self.phi.time
    }

    pub fn norm(&self) -> f64 {
        self.phi.norm()
    }

    /// `|φ| e^{t/τ}`, the amplitude with the decay factor removed.
    pub fn undamped_density(&self) -> Field {
        let f = (2.0 * self.time() / self.tau).exp();
        self.phi.density().map(|r| r * f)
    }
}

/// Multiplies `psi` by `e^{-t/τ}` and stamps it with time `t`.
pub fn metastable_state(psi: &Wavefunction, tau: f64, t: f64) -> Result<DecayingState> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid("tau", "lifetime must be positive and finite"));
    }
    let phi = psi
        .scaled(Complex64::new((-t / tau).exp(), 0.0))
        .with_time(t);
    Ok(DecayingState { phi, tau })
}

fn complex_derivative(values: &[Complex64], h: f64, order: u8, stencil: Stencil) -> Result<Vec<Complex64>> {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    let dre = derivative_values(&re, h, order, stencil)?;
    let dim = derivative_values(&im, h, order, stencil)?;
    Ok(dre.into_iter().zip(dim).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// `R² ∂s/∂x / m = (ħ/m) Im(φ* ∂φ/∂x)`, which needs no phase unwrapping.
fn current(psi: &Wavefunction) -> Result<Vec<f64>> {
    let h = psi.grid().spacing();
    let d = complex_derivative(psi.values(), h, 1, Stencil::Fourth)?;
    Ok(psi
        .values()
        .iter()
        .zip(&d)
        .map(|(z, dz)| psi.hbar / psi.mass * (z.conj() * dz).im)
        .collect())
}

fn check_triple(states: [&DecayingState; 3]) -> Result<f64> {
    let [a, b, c] = states;
    if !a.phi.grid().same_as(b.phi.grid()) || !b.phi.grid().same_as(c.phi.grid()) {
        return Err(Error::invalid("states", "snapshots live on different grids"));
    }
    if a.tau != b.tau || b.tau != c.tau {
        return Err(Error::invalid("states", "snapshots carry different lifetimes"));
    }
    time_step(a.time(), b.time(), c.time())
}

fn continuity_with(
    states: [&DecayingState; 3],
    density: impl Fn(&DecayingState) -> Vec<f64>,
    current_scale: impl Fn(&DecayingState) -> f64,
    sink: f64,
) -> Result<WindowedField> {
    let dt = check_triple(states)?;
    let [before, mid, after] = states;
    let (r0, r1, r2) = (density(before), density(mid), density(after));
    let scale = current_scale(mid);
    let j: Vec<f64> = current(&mid.phi)?.iter().map(|v| v * scale).collect();
    let h = mid.phi.grid().spacing();
    let dj = derivative_values(&j, h, 1, Stencil::Fourth)?;
    let values: Vec<f64> = (0..r1.len())
        .map(|i| (r2[i] - r0[i]) / (2.0 * dt) + dj[i] + sink * r1[i])
        .collect();
    Ok(WindowedField::from_interior(*mid.phi.grid(), &values, RESIDUAL_MARGIN))
}

/// `∂R²/∂t + ∂(R² s'/m)/∂x + R²/τ` at the middle snapshot.
pub fn sink_continuity_residual(states: [&DecayingState; 3]) -> Result<WindowedField> {
    let rate = 1.0 / states[1].tau;
    continuity_with(states, |s| s.phi.density().into_values(), |_| 1.0, rate)
}

/// `∂R₁²/∂t + ∂(R₁² s'/m)/∂x` with `R₁ = R e^{t/τ}`, at the middle snapshot.
pub fn reduced_continuity_residual(states: [&DecayingState; 3]) -> Result<WindowedField> {
    continuity_with(
        states,
        |s| s.undamped_density().into_values(),
        |s| (2.0 * s.time() / s.tau).exp(),
        0.0,
    )
}

/// Modulus of `-iħ ∂Z/∂t - (ħ²/m) ∂²Z/∂x∂δx + δx V'(x) Z - iħ Z/τ` at the
/// middle snapshot.
///
/// Rows are restricted to those where every snapshot's displaced points stay
/// inside the grid, less the usual stencil margin.
pub fn master_zq_residual(
    snapshots: [&CharacteristicFunction; 3],
    potential: &Field,
    units: &Units,
    lifetime: Lifetime,
) -> Result<WindowedField2D> {
    let [before, mid, after] = snapshots;
    if !before.compatible(mid) || !mid.compatible(after) {
        return Err(Error::invalid("snapshots", "snapshots do not share grids and ħ"));
    }
    if !potential.grid().same_as(mid.x_grid()) {
        return Err(Error::invalid("potential", "potential must share the x grid of Z"));
    }
    let dt = time_step(before.time, mid.time, after.time)?;
    let hbar = mid.hbar;
    let mass = units.mass;
    let xg = *mid.x_grid();
    let dg = *mid.dx_grid();
    let (nx, nd) = mid.values().dim();
    let stencil = |n: usize| if n >= 6 { Stencil::Fourth } else { Stencil::Second };

    let mut dz_dd = Array2::<Complex64>::zeros((nx, nd));
    for (i, row) in mid.values().axis_iter(Axis(0)).enumerate() {
        let d = complex_derivative(&row.to_vec(), dg.spacing(), 1, stencil(nd))?;
        dz_dd.row_mut(i).assign(&Array1::from(d));
    }
    let mut mixed = Array2::<Complex64>::zeros((nx, nd));
    for (j, col) in dz_dd.axis_iter(Axis(1)).enumerate() {
        let d = complex_derivative(&col.to_vec(), xg.spacing(), 1, Stencil::Fourth)?;
        mixed.column_mut(j).assign(&Array1::from(d));
    }
    let dv = derivative_values(potential.values(), xg.spacing(), 1, Stencil::Fourth)?;

    let safe = mid.safe_rows()?;
    let lo = safe.start + RESIDUAL_MARGIN;
    let hi = safe.end.saturating_sub(RESIDUAL_MARGIN);
    if hi <= lo {
        return Err(Error::invalid("snapshots", "no interior rows left for the residual"));
    }
    let ds = dg.to_vec();
    let i_hbar = Complex64::new(0.0, hbar);
    let sink = lifetime.rate();
    let values = Array2::from_shape_fn((hi - lo, nd), |(a, j)| {
        let i = lo + a;
        let z = mid.values()[[i, j]];
        let dzdt = (after.values()[[i, j]] - before.values()[[i, j]]) / (2.0 * dt);
        let lhs = -i_hbar * dzdt - mixed[[i, j]] * (hbar * hbar / mass) + z * (ds[j] * dv[i]);
        (lhs - i_hbar * z * sink).norm()
    });
    Ok(WindowedField2D {
        x_grid: xg,
        y_grid: dg,
        x_start: lo,
        y_start: 0,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;
    use crate::schrodinger_madelung::ho_eigenstate;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rates_to_lifetime() {
        assert_eq!(decay_rate(&DecaySpec::from_rates(&[0.5, 0.5])).unwrap(), Lifetime::Finite(1.0));
        match decay_rate(&DecaySpec::from_rates(&[0.2])).unwrap() {
            Lifetime::Finite(t) => assert_abs_diff_eq!(t, 5.0, epsilon = 1e-12),
            Lifetime::Infinite => panic!("finite lifetime expected"),
        }
        assert_eq!(decay_rate(&DecaySpec::from_rates(&[0.0, 0.0])).unwrap(), Lifetime::Infinite);
        assert!(decay_rate(&DecaySpec::from_rates(&[-0.1])).is_err());
    }

    #[test]
    fn upward_transition_rejected() {
        let mut spec = DecaySpec::from_rates(&[0.3]);
        spec.energies.insert("i".into(), 1.0);
        spec.energies.insert("f0".into(), 2.0);
        assert!(decay_rate(&spec).is_err());
        spec.energies.insert("f0".into(), 0.5);
        assert!(decay_rate(&spec).is_ok());
    }

    fn ground() -> Wavefunction {
        ho_eigenstate(0, Grid1D::symmetric(8.0, 801).unwrap(), &Units::natural())
            .unwrap()
            .psi
    }

    #[test]
    fn norm_follows_exponential() {
        let psi = ground();
        let s = metastable_state(&psi, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-10);
        let s = metastable_state(&psi, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.norm(), (-2.0f64).exp(), epsilon = 1e-10);
        assert!(metastable_state(&psi, 0.0, 1.0).is_err());
        assert!(metastable_state(&psi, -1.0, 1.0).is_err());
    }

    fn triple(psi: &Wavefunction, tau: f64, t: f64, dt: f64) -> Vec<DecayingState> {
        [t - dt, t, t + dt]
            .iter()
            .map(|&s| metastable_state(&psi.evolved_phase(0.5, s), tau, s).unwrap())
            .collect()
    }

    #[test]
    fn reduced_continuity_vanishes_and_sink_form_keeps_half_the_loss() {
        let psi = ground();
        let s = triple(&psi, 1.0, 0.5, 1e-4);
        let reduced = reduced_continuity_residual([&s[0], &s[1], &s[2]]).unwrap();
        assert!(reduced.max_abs() < 1e-7, "{}", reduced.max_abs());
        // a norm falling as e^{-2t/τ} loses density at 2R²/τ, twice the sink
        let sink = sink_continuity_residual([&s[0], &s[1], &s[2]]).unwrap();
        let rho = s[1].phi.density();
        for (k, v) in sink.values.iter().enumerate() {
            let expect = -rho.values()[sink.start + k];
            assert!((v - expect).abs() < 1e-6);
        }
    }

    fn z_triple(psi: &Wavefunction, amplitude_rate: f64, t: f64, dt: f64) -> Vec<CharacteristicFunction> {
        // δx/2 on grid nodes keeps interpolation error out of the mixed derivative
        let d = Grid1D::centered(2.0 * psi.grid().spacing(), 5).unwrap();
        [t - dt, t, t + dt]
            .iter()
            .map(|&s| {
                let phi = psi
                    .evolved_phase(0.5, s)
                    .scaled(Complex64::new((-amplitude_rate * s).exp(), 0.0));
                CharacteristicFunction::from_ansatz(&phi, d).unwrap()
            })
            .collect()
    }

    #[test]
    fn master_residual_undamped_eigenstate() {
        let psi = ground();
        let v = Field::from_fn(*psi.grid(), |x| 0.5 * x * x);
        let z = z_triple(&psi, 0.0, 0.3, 1e-3);
        let r = master_zq_residual([&z[0], &z[1], &z[2]], &v, &Units::natural(), Lifetime::Infinite).unwrap();
        assert!(r.max_abs() < 1e-6, "{}", r.max_abs());
    }

    #[test]
    fn master_residual_decay_rates() {
        let psi = ground();
        let v = Field::from_fn(*psi.grid(), |x| 0.5 * x * x);
        let tau = 1.0;
        let units = Units::natural();
        // amplitude falling as e^{-t/2τ} satisfies the damped equation
        let z = z_triple(&psi, 0.5 / tau, 0.3, 1e-3);
        let r = master_zq_residual([&z[0], &z[1], &z[2]], &v, &units, Lifetime::Finite(tau)).unwrap();
        assert!(r.max_abs() < 1e-6, "{}", r.max_abs());
        // feeding 2τ leaves an ħ|Z|/2τ floor
        let r = master_zq_residual([&z[0], &z[1], &z[2]], &v, &units, Lifetime::Finite(2.0 * tau)).unwrap();
        let peak = z[1].density().max();
        assert!((r.max_abs() - 0.5 * peak / tau).abs() < 1e-3 * peak);
        // an amplitude falling as e^{-t/τ} overshoots by ħ|Z|/τ
        let z = z_triple(&psi, 1.0 / tau, 0.3, 1e-3);
        let peak = z[1].density().max();
        let r = master_zq_residual([&z[0], &z[1], &z[2]], &v, &units, Lifetime::Finite(tau)).unwrap();
        assert!((r.max_abs() - peak / tau).abs() < 1e-3 * peak);
    }
}
