//! Canonical ensembles `F = C e^{-2βH}` of separable systems, their
//! characteristic function, and the conditions under which it factorizes into
//! an amplitude.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, richardson_even, simpson_weights, Field, Grid1D};
use crate::schrodinger_madelung::Wavefunction;
use crate::units::Units;
use crate::wigner_moyal::{
    displaced_density_residual, estimate_order, factorization_residual, CharacteristicFunction,
    OrderEstimate,
};

/// Tolerance on the gradient and curvature residuals of an equilibrium point.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-6;

/// Finite-difference step for potential derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// `K_B T` below which the ensemble description is flagged as unphysical.
pub const LOW_TEMPERATURE_THRESHOLD: f64 = 1e-6;

/// Quadrature points per degree of freedom for normalisation integrals.
const QUADRATURE_POINTS: usize = 8001;

/// Exponent of the Boltzmann factor at which integration windows are cut.
const WINDOW_EXPONENT: f64 = 80.0;

/// One-dimensional polynomial potential `Σ c_k q^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    /// `m ω² (q - q0)² / 2`.
    pub fn harmonic(mass: f64, omega: f64, center: f64) -> Self {
        let k = mass * omega * omega;
        Self::new(vec![0.5 * k * center * center, -k * center, 0.5 * k])
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    fn leading(&self) -> Option<(usize, f64)> {
        self.coefficients
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| **c != 0.0)
            .map(|(k, c)| (k, *c))
    }

    /// True when `V → +∞` in both directions.
    pub fn is_confining(&self) -> bool {
        matches!(self.leading(), Some((k, c)) if k >= 2 && k % 2 == 0 && c > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct DofNorm {
    /// `1 / ∫ e^{-2βV} dq`.
    c1: f64,
    /// `1 / ∫∫ e^{-2βH} dq dp`.
    c: f64,
    q_window: (f64, f64),
    p_half_width: f64,
}

/// `F(q, p) = C e^{-2β H(q, p)}` for a separable `H = Σ p_n²/2m_n + V_n(q_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalEnsemble {
    /// `2β = 1/(K_B T)`.
    pub beta2: f64,
    pub temperature: f64,
    pub kb: f64,
    pub hbar: f64,
    pub masses: Vec<f64>,
    pub potentials: Vec<Polynomial>,
    norms: Vec<DofNorm>,
}

impl CanonicalEnsemble {
    pub fn new(
        temperature: f64,
        units: &Units,
        masses: Vec<f64>,
        potentials: Vec<Polynomial>,
    ) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::invalid("temperature", "temperature must be positive and finite"));
        }
        if !(units.kb > 0.0) || !(units.hbar > 0.0) {
            return Err(Error::invalid("units", "K_B and ħ must be positive"));
        }
        if masses.is_empty() || masses.len() != potentials.len() {
            return Err(Error::invalid(
                "masses",
                "need one mass and one potential per degree of freedom",
            ));
        }
        if masses.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::invalid("masses", "masses must be positive"));
        }
        let beta2 = 1.0 / (units.kb * temperature);
        let norms = masses
            .iter()
            .zip(&potentials)
            .enumerate()
            .map(|(n, (&m, v))| dof_norm(n, beta2, m, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            beta2,
            temperature,
            kb: units.kb,
            hbar: units.hbar,
            masses,
            potentials,
            norms,
        })
    }

    /// `n_dof` independent oscillators with the given frequencies, centred at 0.
    pub fn harmonic(temperature: f64, units: &Units, masses: Vec<f64>, omegas: &[f64]) -> Result<Self> {
        if masses.len() != omegas.len() {
            return Err(Error::invalid("omegas", "one frequency per degree of freedom"));
        }
        let potentials = masses
            .iter()
            .zip(omegas)
            .map(|(&m, &w)| Polynomial::harmonic(m, w, 0.0))
            .collect();
        Self::new(temperature, units, masses, potentials)
    }

    pub fn n_dof(&self) -> usize {
        self.masses.len()
    }

    /// `β`, half of `2β`.
    pub fn beta(&self) -> f64 {
        0.5 * self.beta2
    }

    pub fn kbt(&self) -> f64 {
        self.kb * self.temperature
    }

    /// Product of the per-dof `C`.
    pub fn c(&self) -> f64 {
        self.norms.iter().map(|n| n.c).product()
    }

    /// Product of the per-dof `C₁`.
    pub fn c1(&self) -> f64 {
        self.norms.iter().map(|n| n.c1).product()
    }

    pub fn potential(&self, q: &[f64]) -> Result<f64> {
        self.check_len(q, "q")?;
        Ok(self.potentials.iter().zip(q).map(|(v, &x)| v.eval(x)).sum())
    }

    /// `ρ_eq(q) = C₁ e^{-2βV(q)}`.
    pub fn equilibrium_density(&self, q: &[f64]) -> Result<f64> {
        Ok(self.c1() * (-self.beta2 * self.potential(q)?).exp())
    }

    fn check_len(&self, v: &[f64], what: &'static str) -> Result<()> {
        if v.len() != self.n_dof() {
            return Err(Error::invalid(
                what,
                format!("expected {} components, got {}", self.n_dof(), v.len()),
            ));
        }
        Ok(())
    }

    fn single_dof(&self) -> Result<()> {
        if self.n_dof() != 1 {
            return Err(Error::invalid("ensemble", "grid builders need a single degree of freedom"));
        }
        Ok(())
    }

    /// `Z(q, δq)` for a single degree of freedom on `x_grid × dx_grid`, by
    /// quadrature or in closed form.
    pub fn characteristic_function(
        &self,
        x_grid: Grid1D,
        dx_grid: Grid1D,
        closed_form: bool,
    ) -> Result<CharacteristicFunction> {
        self.single_dof()?;
        let xs = x_grid.to_vec();
        let ds = dx_grid.to_vec();
        let kernel: Vec<f64> = ds
            .iter()
            .map(|&d| {
                if closed_form {
                    self.gaussian_factor(0, d)
                } else {
                    self.momentum_transform(0, d) / self.momentum_transform(0, 0.0)
                }
            })
            .collect();
        let values = ndarray::Array2::from_shape_fn((xs.len(), ds.len()), |(i, j)| {
            let rho = self.norms[0].c1 * (-self.beta2 * self.potentials[0].eval(xs[i])).exp();
            Complex64::new(rho * kernel[j], 0.0)
        });
        CharacteristicFunction::new(x_grid, dx_grid, values, 0.0, self.hbar)
    }

    /// `ψ(q) = √C₁ e^{-βV} e^{-iEt/ħ}` sampled on `grid` (single degree of freedom).
    pub fn amplitude_on(&self, grid: Grid1D, energy: f64, t: f64) -> Result<Wavefunction> {
        self.single_dof()?;
        let values = grid
            .points()
            .map(|x| boltzmann_amplitude(self, &[x], energy, t))
            .collect::<Result<Vec<_>>>()?;
        let units = Units {
            hbar: self.hbar,
            mass: self.masses[0],
            ..Units::default()
        };
        Wavefunction::unnormalized(grid, values, t, &units)
    }

    /// `e^{-m δq² / 4βħ²}` for dof `n`.
    fn gaussian_factor(&self, n: usize, dq: f64) -> f64 {
        (-self.masses[n] * dq * dq / (4.0 * self.beta() * self.hbar * self.hbar)).exp()
    }

    /// `∫ cos(p δq/ħ) e^{-2β p²/2m} dp` for dof `n` (the sine part vanishes).
    fn momentum_transform(&self, n: usize, dq: f64) -> f64 {
        let half = self.norms[n].p_half_width;
        let grid = Grid1D::symmetric(half, QUADRATURE_POINTS).expect("positive width");
        let m = self.masses[n];
        let f = Field::from_fn(grid, |p| (p * dq / self.hbar).cos() * (-self.beta2 * p * p / (2.0 * m)).exp());
        integrate(&f)
    }
}

fn dof_norm(n: usize, beta2: f64, mass: f64, v: &Polynomial) -> Result<DofNorm> {
    if !v.is_confining() {
        return Err(Error::InvalidModel(format!(
            "potential of degree of freedom {n} does not confine: e^(-2βV) is not normalisable"
        )));
    }
    let (lo, hi, v_min) = confining_window(beta2, v);
    let grid = Grid1D::new(lo, hi, QUADRATURE_POINTS)?;
    let weight = Field::from_fn(grid, |q| (-beta2 * (v.eval(q) - v_min)).exp());
    let iq = integrate(&weight) * (-beta2 * v_min).exp();
    if !(iq > 0.0) || !iq.is_finite() {
        return Err(Error::InvalidModel(format!(
            "normalisation integral of degree of freedom {n} is {iq}"
        )));
    }
    // Gaussian momentum factor, cut where the exponent reaches WINDOW_EXPONENT
    let p_half = (2.0 * mass * WINDOW_EXPONENT / beta2).sqrt();
    let pgrid = Grid1D::symmetric(p_half, QUADRATURE_POINTS)?;
    let ip = integrate(&Field::from_fn(pgrid, |p| (-beta2 * p * p / (2.0 * mass)).exp()));
    Ok(DofNorm {
        c1: 1.0 / iq,
        c: 1.0 / (iq * ip),
        q_window: (lo, hi),
        p_half_width: p_half,
    })
}

/// Window outside which `2β(V - V_min)` exceeds [`WINDOW_EXPONENT`].
fn confining_window(beta2: f64, v: &Polynomial) -> (f64, f64, f64) {
    let mut radius: f64 = 1.0;
    loop {
        let samples = Grid1D::symmetric(radius, 4001).expect("positive radius");
        let v_min = samples.points().map(|q| v.eval(q)).fold(f64::INFINITY, f64::min);
        let edge = v.eval(-radius).min(v.eval(radius));
        if beta2 * (edge - v_min) > WINDOW_EXPONENT || radius > 1e12 {
            // trim to the part of the window that carries weight
            let keep: Vec<f64> = samples
                .points()
                .filter(|&q| beta2 * (v.eval(q) - v_min) <= WINDOW_EXPONENT)
                .collect();
            let h = samples.spacing();
            let lo = (keep[0] - h).max(-radius);
            let hi = (keep[keep.len() - 1] + h).min(radius);
            return (lo, hi, v_min);
        }
        radius *= 2.0;
    }
}

/// `F(q, p) = C e^{-2βH}`.
pub fn canonical_f(ensemble: &CanonicalEnsemble, q: &[f64], p: &[f64]) -> Result<f64> {
    ensemble.check_len(p, "p")?;
    let kinetic: f64 = p
        .iter()
        .zip(&ensemble.masses)
        .map(|(p, m)| p * p / (2.0 * m))
        .sum();
    let h = kinetic + ensemble.potential(q)?;
    Ok(ensemble.c() * (-ensemble.beta2 * h).exp())
}

/// Variance of the momentum marginal of dof `n`, by quadrature.
pub fn momentum_variance(ensemble: &CanonicalEnsemble, n: usize) -> Result<f64> {
    if n >= ensemble.n_dof() {
        return Err(Error::invalid("n", "degree of freedom out of range"));
    }
    let half = ensemble.norms[n].p_half_width;
    let grid = Grid1D::symmetric(half, QUADRATURE_POINTS)?;
    let m = ensemble.masses[n];
    let w = Field::from_fn(grid, |p| (-ensemble.beta2 * p * p / (2.0 * m)).exp());
    let w2 = Field::from_fn(grid, |p| p * p * (-ensemble.beta2 * p * p / (2.0 * m)).exp());
    Ok(integrate(&w2) / integrate(&w))
}

/// `Z(q, δq) = ∫ e^{iΣp_nδq_n/ħ} F dp` by quadrature over each momentum.
pub fn boltzmann_zq(ensemble: &CanonicalEnsemble, q: &[f64], dq: &[f64]) -> Result<f64> {
    ensemble.check_len(dq, "dq")?;
    let v = ensemble.potential(q)?;
    let p_part: f64 = (0..ensemble.n_dof())
        .map(|n| ensemble.momentum_transform(n, dq[n]))
        .product();
    Ok(ensemble.c() * (-ensemble.beta2 * v).exp() * p_part)
}

/// `Z(q, δq) = C₁ e^{-2βV(q)} e^{-Σ m_n δq_n² / 4βħ²}`.
pub fn boltzmann_zq_closed_form(ensemble: &CanonicalEnsemble, q: &[f64], dq: &[f64]) -> Result<f64> {
    ensemble.check_len(dq, "dq")?;
    let gauss: f64 = (0..ensemble.n_dof())
        .map(|n| ensemble.gaussian_factor(n, dq[n]))
        .product();
    Ok(ensemble.equilibrium_density(q)? * gauss)
}

/// Gradient and curvature-lock residuals at a candidate equilibrium point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumPointReport {
    pub q0: Vec<f64>,
    /// `|∂V/∂q_n|` per dof.
    pub gradient_check: Vec<f64>,
    /// `|∂²V/∂q_n² - m_n/(β²ħ²)|` per dof.
    pub curvature_lock: Vec<f64>,
    pub passes: bool,
}

impl EquilibriumPointReport {
    pub fn gradient_passes(&self) -> bool {
        self.gradient_check.iter().all(|r| *r <= EQUILIBRIUM_TOLERANCE)
    }

    pub fn curvature_passes(&self) -> bool {
        self.curvature_lock.iter().all(|r| *r <= EQUILIBRIUM_TOLERANCE)
    }
}

/// Central first and second differences with step `h`, refined once by
/// Richardson extrapolation against step `2h`.
fn numeric_derivatives(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let d1 = |s: f64| (f(x + s) - f(x - s)) / (2.0 * s);
    let d2 = |s: f64| (f(x + s) - 2.0 * f(x) + f(x - s)) / (s * s);
    (
        richardson_even(&[d1(h), d1(2.0 * h)]),
        richardson_even(&[d2(h), d2(2.0 * h)]),
    )
}

pub fn equilibrium_conditions(ensemble: &CanonicalEnsemble, q0: &[f64]) -> Result<EquilibriumPointReport> {
    ensemble.check_len(q0, "q0")?;
    let beta = ensemble.beta();
    let hb = ensemble.hbar;
    let (mut grad, mut curv) = (Vec::new(), Vec::new());
    for (n, v) in ensemble.potentials.iter().enumerate() {
        let (d1, d2) = numeric_derivatives(|q| v.eval(q), q0[n], DERIVATIVE_STEP);
        grad.push(d1.abs());
        curv.push((d2 - ensemble.masses[n] / (beta * beta * hb * hb)).abs());
    }
    let passes = grad.iter().chain(&curv).all(|r| *r <= EQUILIBRIUM_TOLERANCE);
    Ok(EquilibriumPointReport {
        q0: q0.to_vec(),
        gradient_check: grad,
        curvature_lock: curv,
        passes,
    })
}

/// `ψ(q, t) = √C₁ e^{-βV(q)} e^{-iEt/ħ}`.
pub fn boltzmann_amplitude(ensemble: &CanonicalEnsemble, q: &[f64], energy: f64, t: f64) -> Result<Complex64> {
    let r = ensemble.c1().sqrt() * (-ensemble.beta() * ensemble.potential(q)?).exp();
    Ok(Complex64::from_polar(r, -energy * t / ensemble.hbar))
}

/// Energies from substituting the amplitude into the stationary equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRelation {
    /// `Σ(βħ²/2m_n) V'' + V - Σ(β²ħ²/2m_n) (V')²`.
    pub e_full: f64,
    /// `V(q⁰) + N K_B T`.
    pub e_equilibrium: f64,
}

/// `Σ(βħ²/2m_n) ∂²V/∂q_n² + V - Σ(β²ħ²/2m_n) (∂V/∂q_n)²` at `q`.
pub fn full_energy(ensemble: &CanonicalEnsemble, q: &[f64]) -> Result<f64> {
    let v = ensemble.potential(q)?;
    let beta = ensemble.beta();
    let hb2 = ensemble.hbar * ensemble.hbar;
    let mut e = v;
    for (n, pot) in ensemble.potentials.iter().enumerate() {
        let (d1, d2) = numeric_derivatives(|x| pot.eval(x), q[n], DERIVATIVE_STEP);
        let m = ensemble.masses[n];
        e += beta * hb2 / (2.0 * m) * d2 - beta * beta * hb2 / (2.0 * m) * d1 * d1;
    }
    Ok(e)
}

/// `V(q⁰) + N K_B T`; at zero temperature this is the mechanical energy `V(q⁰)`.
pub fn equilibrium_energy(v0: f64, n_dof: usize, kbt: f64) -> f64 {
    v0 + n_dof as f64 * kbt
}

/// Both energies at `q0`, which must be an equilibrium point.
pub fn energy_relation(ensemble: &CanonicalEnsemble, q0: &[f64]) -> Result<EnergyRelation> {
    let report = equilibrium_conditions(ensemble, q0)?;
    if !report.passes {
        return Err(Error::PreconditionViolation(format!(
            "q0 = {q0:?} is not an equilibrium point (gradient {:?}, curvature {:?})",
            report.gradient_check, report.curvature_lock
        )));
    }
    Ok(EnergyRelation {
        e_full: full_energy(ensemble, q0)?,
        e_equilibrium: equilibrium_energy(ensemble.potential(q0)?, ensemble.n_dof(), ensemble.kbt()),
    })
}

/// How the characteristic function compares with the amplitude near `q0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationStudy {
    pub report: EquilibriumPointReport,
    /// `|Z - ψ*(q - δq/2) ψ(q + δq/2)|` against `δq`.
    pub ansatz: OrderEstimate,
    /// `max_± |Z - ρ_eq(q ± δq/2)|` against `δq`.
    pub displaced: OrderEstimate,
    /// Pointwise maximum of the two.
    pub bridge: OrderEstimate,
}

impl FactorizationStudy {
    /// The combined residual vanishes at least as fast as `δq³`.
    pub fn is_cubic(&self) -> bool {
        self.bridge.is_at_least(2.5)
    }
}

/// Order of the factorization residuals at `q0` for a single degree of
/// freedom, with `Z` from quadrature.
///
/// The grid spacing is `h`, and `δq` runs over `2h, 4h, .., 2h·shells` so that
/// the displaced points fall on grid nodes.
pub fn factorization_study(
    ensemble: &CanonicalEnsemble,
    q0: f64,
    h: f64,
    shells: usize,
) -> Result<FactorizationStudy> {
    ensemble.single_dof()?;
    let report = equilibrium_conditions(ensemble, &[q0])?;
    let half_points = shells + 8;
    let x_grid = Grid1D::new(q0 - half_points as f64 * h, q0 + half_points as f64 * h, 2 * half_points + 1)?;
    let dx_grid = Grid1D::centered(2.0 * h, shells)?;
    let z = ensemble.characteristic_function(x_grid, dx_grid, false)?;
    let psi = ensemble.amplitude_on(x_grid, 0.0, 0.0)?;
    let ansatz = factorization_residual(&z, &psi)?;
    let displaced = displaced_density_residual(&z, &psi.density())?;
    let row = half_points;
    let ds = dx_grid.to_vec();
    let c = shells;
    let a = ansatz.row_at(row).expect("centre row is interior");
    let b = displaced.row_at(row).expect("centre row is interior");
    let both: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
    let floor = 1e-11 * z.values()[[row, c]].re;
    let est = |r: &[f64]| estimate_order(&ds[c + 1..], &r[c + 1..], floor);
    Ok(FactorizationStudy {
        ansatz: est(&a),
        displaced: est(&b),
        bridge: est(&both),
        report,
    })
}

/// Oscillator ensemble at the temperature where the characteristic function
/// factorizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoSpecialCase {
    pub n_dof: usize,
    /// `K_B T = ħω/2`.
    pub kbt_lock: f64,
    pub temperature_lock: f64,
    /// `N ħω/2`.
    pub energy: f64,
    /// `⟨(δp)²⟩/m = ħω/2`.
    pub dispersion_per_mass: f64,
    pub momentum_dispersion: f64,
    /// `⟨(δx)²⟩ = K_B T / |V''|` from the entropy curvature.
    pub position_msd: f64,
    pub uncertainty_product: f64,
    pub uncertainty_target: f64,
    /// Set when `K_B T` falls below [`LOW_TEMPERATURE_THRESHOLD`].
    pub low_temperature_pathology: bool,
}

pub fn ho_special_case(mass: f64, omega: f64, units: &Units, n_dof: usize) -> Result<HoSpecialCase> {
    for (name, v) in [("mass", mass), ("omega", omega), ("hbar", units.hbar), ("kb", units.kb)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid("parameters", format!("{name} must be positive, got {v}")));
        }
    }
    if n_dof == 0 {
        return Err(Error::invalid("n_dof", "need at least one degree of freedom"));
    }
    let hb = units.hbar;
    let kbt = 0.5 * hb * omega;
    let momentum_dispersion = mass * kbt;
    // entropy S = -V/T has curvature -mω²/T, so ⟨(δx)²⟩ = K_B T / (mω²)
    let position_msd = kbt / (mass * omega * omega);
    Ok(HoSpecialCase {
        n_dof,
        kbt_lock: kbt,
        temperature_lock: kbt / units.kb,
        energy: n_dof as f64 * kbt,
        dispersion_per_mass: kbt,
        momentum_dispersion,
        position_msd,
        uncertainty_product: momentum_dispersion * position_msd,
        uncertainty_target: 0.25 * hb * hb,
        low_temperature_pathology: kbt < LOW_TEMPERATURE_THRESHOLD,
    })
}

/// Everything the `boltzmann` command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoltzmannReport {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub kb: f64,
    pub n_dof: usize,
    pub special_case: HoSpecialCase,
    pub equilibrium: EquilibriumPointReport,
    pub energies: EnergyRelation,
}

/// Builds the locked oscillator ensemble and evaluates it at the origin.
pub fn boltzmann_report(mass: f64, omega: f64, units: &Units, n_dof: usize) -> Result<BoltzmannReport> {
    let special_case = ho_special_case(mass, omega, units, n_dof)?;
    let ens = CanonicalEnsemble::harmonic(
        special_case.temperature_lock,
        units,
        vec![mass; n_dof],
        &vec![omega; n_dof],
    )?;
    let q0 = vec![0.0; n_dof];
    let equilibrium = equilibrium_conditions(&ens, &q0)?;
    let energies = energy_relation(&ens, &q0)?;
    Ok(BoltzmannReport {
        mass,
        omega,
        hbar: units.hbar,
        kb: units.kb,
        n_dof,
        special_case,
        equilibrium,
        energies,
    })
}

/// Simpson weights over the momentum window of dof `n`, for callers building
/// their own momentum quadratures.
pub fn momentum_window(ensemble: &CanonicalEnsemble, n: usize) -> Result<(Grid1D, Vec<f64>)> {
    if n >= ensemble.n_dof() {
        return Err(Error::invalid("n", "degree of freedom out of range"));
    }
    let g = Grid1D::symmetric(ensemble.norms[n].p_half_width, QUADRATURE_POINTS)?;
    let w = simpson_weights(g.len(), g.spacing());
    Ok((g, w))
}

/// Window of dof `n` carrying the configuration-space weight.
pub fn configuration_window(ensemble: &CanonicalEnsemble, n: usize) -> Result<(f64, f64)> {
    ensemble
        .norms
        .get(n)
        .map(|d| d.q_window)
        .ok_or_else(|| Error::invalid("n", "degree of freedom out of range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::entropy_field;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn natural() -> Units {
        Units::natural()
    }

    fn ho(kbt: f64, omega: f64) -> CanonicalEnsemble {
        CanonicalEnsemble::harmonic(kbt, &natural(), vec![1.0], &[omega]).unwrap()
    }

    #[test]
    fn momentum_marginal_variance() {
        assert_abs_diff_eq!(momentum_variance(&ho(0.25, 1.0), 0).unwrap(), 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(momentum_variance(&ho(0.5, 1.0), 0).unwrap(), 0.5, epsilon = 1e-10);
        assert!(momentum_variance(&ho(1e4, 1.0), 0).unwrap() > 1e3);
    }

    #[test]
    fn normalisation_constants() {
        let e = ho(0.5, 1.0);
        // 2β = 2: ∫e^{-x²} = √π, ∫e^{-p²} = √π
        assert_abs_diff_eq!(e.c1(), 1.0 / PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.c(), 1.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn separable_factorizes() {
        let e = CanonicalEnsemble::harmonic(0.7, &natural(), vec![1.0, 2.0], &[1.0, 0.5]).unwrap();
        let a = ho(0.7, 1.0);
        let b = CanonicalEnsemble::harmonic(0.7, &natural(), vec![2.0], &[0.5]).unwrap();
        let joint = canonical_f(&e, &[0.3, -0.4], &[0.1, 0.9]).unwrap();
        let prod = canonical_f(&a, &[0.3], &[0.1]).unwrap() * canonical_f(&b, &[-0.4], &[0.9]).unwrap();
        assert!((joint - prod).abs() < 1e-12 * prod);
    }

    #[test]
    fn non_confining_rejected() {
        let bad = CanonicalEnsemble::new(1.0, &natural(), vec![1.0], vec![Polynomial::new(vec![0.0, 1.0])]);
        assert!(matches!(bad, Err(Error::InvalidModel(_))));
        let inverted = CanonicalEnsemble::new(1.0, &natural(), vec![1.0], vec![Polynomial::new(vec![0.0, 0.0, -1.0])]);
        assert!(matches!(inverted, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (kbt, omega) in [(0.5, 1.0), (0.3, 2.0), (2.0, 0.7)] {
            let e = ho(kbt, omega);
            for &q in &[0.0, 0.4, -1.1] {
                for &d in &[0.0, 0.01, 0.05, 0.1] {
                    let a = boltzmann_zq(&e, &[q], &[d]).unwrap();
                    let b = boltzmann_zq_closed_form(&e, &[q], &[d]).unwrap();
                    assert!((a - b).abs() <= 1e-8 * b, "{a} {b}");
                }
            }
            let rho = e.equilibrium_density(&[0.4]).unwrap();
            assert_abs_diff_eq!(boltzmann_zq_closed_form(&e, &[0.4], &[0.0]).unwrap(), rho, epsilon = 1e-15);
        }
    }

    #[test]
    fn flat_potential_is_pure_gaussian() {
        // a very weak confinement stands in for V = 0 over the sampled range
        let e = CanonicalEnsemble::new(1.0, &natural(), vec![1.0], vec![Polynomial::new(vec![0.0, 0.0, 1e-12])]).unwrap();
        let a = boltzmann_zq_closed_form(&e, &[0.0], &[0.05]).unwrap();
        let b = boltzmann_zq_closed_form(&e, &[1.0], &[0.05]).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn equilibrium_examples() {
        let locked = ho(0.5, 1.0);
        assert!(equilibrium_conditions(&locked, &[0.0]).unwrap().passes);
        let unlocked = ho(0.5, 1.5);
        let r = equilibrium_conditions(&unlocked, &[0.0]).unwrap();
        assert!(r.gradient_passes() && !r.curvature_passes() && !r.passes);
        let r = equilibrium_conditions(&locked, &[0.3]).unwrap();
        assert!(!r.gradient_passes() && !r.passes);
    }

    #[test]
    fn amplitude_density_and_phase() {
        let e = ho(0.5, 1.0);
        for &q in &[0.0, 0.7] {
            let a = boltzmann_amplitude(&e, &[q], 0.5, 0.0).unwrap();
            let b = boltzmann_amplitude(&e, &[q], 0.5, 2.3).unwrap();
            let rho = e.equilibrium_density(&[q]).unwrap();
            assert_abs_diff_eq!(a.norm_sqr(), rho, epsilon = 1e-15);
            assert_abs_diff_eq!(b.norm_sqr(), rho, epsilon = 1e-15);
        }
    }

    #[test]
    fn amplitude_second_order_coefficient() {
        // ψ(q - δ/2) ψ(q + δ/2) = C₁ e^{-2β[V + δ² V''/8]} for quadratic V
        let e = ho(0.8, 1.3);
        let q = 0.4;
        let d: f64 = 0.05;
        let prod = boltzmann_amplitude(&e, &[q - d / 2.0], 0.0, 0.0).unwrap()
            * boltzmann_amplitude(&e, &[q + d / 2.0], 0.0, 0.0).unwrap();
        let v2 = 1.3 * 1.3;
        let v = e.potential(&[q]).unwrap();
        let expect = e.c1() * (-e.beta2 * (v + d * d * v2 / 8.0)).exp();
        assert!((prod.re - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn energies() {
        let e = ho(0.5, 1.0);
        let r = energy_relation(&e, &[0.0]).unwrap();
        assert_abs_diff_eq!(r.e_full, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(r.e_equilibrium, 0.5, epsilon = 1e-15);
        assert!(matches!(energy_relation(&e, &[0.2]), Err(Error::PreconditionViolation(_))));
        assert!(matches!(energy_relation(&ho(0.5, 2.0), &[0.0]), Err(Error::PreconditionViolation(_))));
        assert_eq!(equilibrium_energy(0.0, 1, 0.0), 0.0);
        let three = CanonicalEnsemble::harmonic(0.5, &natural(), vec![1.0; 3], &[1.0; 3]).unwrap();
        let r = energy_relation(&three, &[0.0; 3]).unwrap();
        assert_abs_diff_eq!(r.e_full, 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(r.e_equilibrium, 1.5, epsilon = 1e-15);
    }

    #[test]
    fn shifted_minimum_energy() {
        let units = natural();
        let v = Polynomial::new(vec![0.3, 0.0, 0.5]);
        let e = CanonicalEnsemble::new(0.5, &units, vec![1.0], vec![v]).unwrap();
        let r = energy_relation(&e, &[0.0]).unwrap();
        assert_abs_diff_eq!(r.e_full, r.e_equilibrium, epsilon = 1e-8);
        assert_abs_diff_eq!(r.e_equilibrium, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn special_case_values() {
        let s = ho_special_case(1.0, 1.0, &natural(), 1).unwrap();
        assert_eq!(s.kbt_lock, 0.5);
        assert_eq!(s.energy, 0.5);
        assert_eq!(s.dispersion_per_mass, 0.5);
        assert_abs_diff_eq!(s.uncertainty_product, 0.25, epsilon = 1e-15);
        assert!(!s.low_temperature_pathology);
        assert_eq!(ho_special_case(1.0, 2.0, &natural(), 1).unwrap().kbt_lock, 1.0);
        let cold = ho_special_case(1.0, 1e-9, &natural(), 1).unwrap();
        assert!(cold.low_temperature_pathology);
        assert!(cold.kbt_lock < 1e-9 && cold.energy < 1e-9 && cold.dispersion_per_mass < 1e-9);
        assert!(ho_special_case(0.0, 1.0, &natural(), 1).is_err());
    }

    #[test]
    fn entropy_is_minus_v_over_t() {
        let e = ho(0.7, 1.2);
        let g = Grid1D::symmetric(3.0, 301).unwrap();
        let rho = Field::from_fn(g, |q| e.equilibrium_density(&[q]).unwrap());
        let s = entropy_field(&rho, e.kb).unwrap();
        let i0 = g.nearest_index(0.0);
        let s0 = s.entropy.values()[i0];
        for (i, q) in g.points().enumerate() {
            let v = e.potential(&[q]).unwrap();
            assert_abs_diff_eq!(s.entropy.values()[i] - s0, -v / e.temperature, epsilon = 1e-10);
        }
    }

    #[test]
    fn factorization_orders() {
        let study = |kbt: f64, omega: f64, q0: f64| factorization_study(&ho(kbt, omega), q0, 0.005, 10).unwrap();
        let pass = study(0.5, 1.0, 0.0);
        assert!(pass.report.passes && pass.is_cubic(), "{pass:?}");
        let unlocked = study(0.5, 1.5, 0.0);
        assert!(!unlocked.report.passes && !unlocked.is_cubic());
        assert!((unlocked.ansatz.slope.unwrap() - 2.0).abs() < 0.1);
        let off = study(0.5, 1.0, 0.4);
        assert!(!off.report.passes && !off.is_cubic());
        assert!(off.bridge.quadratic_coefficient > 1e-3);
    }
}
