//! Entropy of a density, Gaussian fluctuations about its maximum, the entropic
//! momentum dispersion, and Gibbs entropies of oscillator levels.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    derivative, gaussian_truncation_radius, integrate, simpson, Field, Grid1D,
};
use crate::schrodinger_madelung::{hermite_functions, solve_stationary, MAX_HO_LEVEL};
use crate::units::Units;

/// Curvatures with magnitude below this are treated as flat.
pub const FLAT_CURVATURE: f64 = 1e-10;

/// Accepted deviation of `∫ρ dx` from one in [`gibbs_entropy`].
pub const GIBBS_NORM_TOLERANCE: f64 = 1e-6;

/// Densities at or below this are dropped from `∫ρ ln ρ dx`.
pub const GIBBS_DENSITY_CUTOFF: f64 = 1e-300;

/// Reference Gibbs entropies of oscillator levels 0 through 10 (five decimals).
pub const REFERENCE_GIBBS_ENTROPIES: [f64; 11] = [
    -1.07237, -1.34273, -1.49859, -1.60978, -1.69650, -1.76803, -1.82901, -1.88216, -1.92927,
    -1.97179, -2.01020,
];

/// `S(x) = k ln ρ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyField {
    pub entropy: Field,
    pub k_const: f64,
}

impl EntropyField {
    pub fn grid(&self) -> &Grid1D {
        self.entropy.grid()
    }

    /// `e^{S/k}`.
    pub fn density(&self) -> Field {
        let k = self.k_const;
        self.entropy.map(|s| (s / k).exp())
    }
}

fn require_positive(rho: &Field) -> Result<()> {
    for (x, &r) in rho.grid().points().zip(rho.values()) {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("density {r} is not positive at x = {x}")));
        }
    }
    Ok(())
}

pub fn entropy_field(rho: &Field, k: f64) -> Result<EntropyField> {
    if !(k > 0.0) {
        return Err(Error::invalid("k", "k must be positive"));
    }
    require_positive(rho)?;
    Ok(EntropyField {
        entropy: rho.map(|r| k * r.ln()),
        k_const: k,
    })
}

/// Gaussian fluctuation model about the entropy maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationModel {
    /// `γ = |∂²S/∂x²| / 2k`.
    pub gamma: Field,
    pub curvature: Field,
    /// `⟨(δx)²⟩ = 1/2γ`.
    pub msd: Field,
}

fn check_curvature(x: f64, c: f64) -> Result<()> {
    if !(c < -FLAT_CURVATURE) {
        return Err(Error::FlatDirection { x, curvature: c });
    }
    Ok(())
}

/// Builds the model from `∂²S/∂x²`, which must be negative everywhere.
pub fn fluctuation_model(entropy: &EntropyField) -> Result<FluctuationModel> {
    let curvature = derivative(&entropy.entropy, 2)?;
    for (x, &c) in curvature.grid().points().zip(curvature.values()) {
        check_curvature(x, c)?;
    }
    let k = entropy.k_const;
    let gamma = curvature.map(|c| c.abs() / (2.0 * k));
    let msd = gamma.map(|g| 1.0 / (2.0 * g));
    Ok(FluctuationModel {
        gamma,
        curvature,
        msd,
    })
}

/// `ρ(x, δx) = ρ_eq(x) e^{-|∂²S/∂x²| δx² / 2k}` at `x = grid[x_index]`.
pub fn fluctuation_density(rho_eq: &Field, k: f64, x_index: usize, dx_samples: &[f64]) -> Result<Vec<f64>> {
    if x_index >= rho_eq.len() {
        return Err(Error::invalid("x_index", "index outside the grid"));
    }
    let s = entropy_field(rho_eq, k)?;
    let curv = derivative(&s.entropy, 2)?.values()[x_index];
    check_curvature(rho_eq.grid().point(x_index), curv)?;
    let r = rho_eq.values()[x_index];
    Ok(dx_samples
        .iter()
        .map(|d| r * (-curv.abs() * d * d / (2.0 * k)).exp())
        .collect())
}

/// `1/2γ` pointwise.
pub fn mean_square_displacement(model: &FluctuationModel) -> Result<Field> {
    for (x, &g) in model.gamma.grid().points().zip(model.gamma.values()) {
        if !(g > 0.0) {
            return Err(Error::Domain(format!("γ = {g} is not positive at x = {x}")));
        }
    }
    Ok(model.gamma.map(|g| 1.0 / (2.0 * g)))
}

/// `∫δx² e^{-γδx²} / ∫e^{-γδx²}` by direct quadrature.
pub fn mean_square_displacement_quadrature(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("γ = {gamma} is not positive")));
    }
    let half = gaussian_truncation_radius(1.0 / (2.0 * gamma), 1e-20);
    let grid = Grid1D::symmetric(half, 4001)?;
    let w = Field::from_fn(grid, |d| (-gamma * d * d).exp());
    let w2 = Field::from_fn(grid, |d| d * d * (-gamma * d * d).exp());
    Ok(integrate(&w2) / integrate(&w))
}

/// `⟨(δp)²⟩ = -(ħ²/4) ∂² ln ρ/∂x²`.
pub fn momentum_dispersion_entropy(rho: &Field, hbar: f64) -> Result<Field> {
    require_positive(rho)?;
    let curv = derivative(&rho.map(f64::ln), 2)?;
    Ok(curv.map(|c| -0.25 * hbar * hbar * c))
}

/// `G = ∫ρ ln ρ dx` with `0 ln 0 = 0`.
///
/// Near a zero of the underlying amplitude `ρ ≈ a²(x - x₀)²`, so the
/// integrand carries a `u² ln|u|` cusp that degrades Simpson's rule. Such zeros
/// are located from the samples, the cusp `2a²u² ln|u|` is subtracted before
/// quadrature and its exact integral added back.
pub fn gibbs_entropy(rho: &Field) -> Result<f64> {
    if rho.values().iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::invalid("rho", "density must be finite and non-negative"));
    }
    let norm = integrate(rho);
    if (norm - 1.0).abs() > GIBBS_NORM_TOLERANCE {
        return Err(Error::invalid("rho", format!("density integrates to {norm}, expected 1")));
    }
    let grid = rho.grid();
    let nodes = amplitude_zeros(rho);
    let integrand: Vec<f64> = rho
        .values()
        .iter()
        .zip(grid.points())
        .map(|(&r, x)| {
            let f = if r > GIBBS_DENSITY_CUTOFF { r * r.ln() } else { 0.0 };
            f - nodes.iter().map(|n| n.cusp(x)).sum::<f64>()
        })
        .collect();
    let (a, b) = (grid.x_min(), grid.x_max());
    let exact: f64 = nodes.iter().map(|n| n.cusp_integral(a, b)).sum();
    Ok(simpson(&integrand, grid.spacing()) + exact)
}

/// A simple zero of the amplitude, `ρ ≈ slope² (x - x0)²`.
#[derive(Debug, Clone, Copy)]
struct AmplitudeZero {
    x0: f64,
    slope2: f64,
}

impl AmplitudeZero {
    fn cusp(&self, x: f64) -> f64 {
        let u = x - self.x0;
        if u == 0.0 {
            0.0
        } else {
            2.0 * self.slope2 * u * u * u.abs().ln()
        }
    }

    fn cusp_integral(&self, a: f64, b: f64) -> f64 {
        let prim = |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                u * u * u * (u.abs().ln() / 3.0 - 1.0 / 9.0)
            }
        };
        2.0 * self.slope2 * (prim(b - self.x0) - prim(a - self.x0))
    }
}

/// Sharp interior minima of `ρ` that are zeros of a signed amplitude: the
/// signed square root, with the sign flipped on one side of the minimum, is
/// fitted by a quadratic through five samples whose root lies next to the
/// minimum.
fn amplitude_zeros(rho: &Field) -> Vec<AmplitudeZero> {
    let v = rho.values();
    let g = rho.grid();
    let h = g.spacing();
    let peak = rho.max();
    let mut out = Vec::new();
    if v.len() < 5 {
        return out;
    }
    for i in 2..v.len() - 2 {
        let r = v[i];
        if !(r <= v[i - 1] && r < v[i + 1]) {
            continue;
        }
        let outer = v[i - 2].min(v[i + 2]);
        if !(outer > 4.0 * r) || outer < 1e-12 * peak {
            continue;
        }
        let amp: Vec<f64> = (0..5).map(|k| v[i + k - 2].sqrt()).collect();
        let mut best: Option<(f64, AmplitudeZero)> = None;
        for flip in [2usize, 3] {
            // samples before `flip` are negated
            let y: Vec<f64> = (0..5).map(|k| if k < flip { -amp[k] } else { amp[k] }).collect();
            let (c0, c1, c2, misfit) = quadratic_fit(&y);
            // root of c0 + c1 t + c2 t² nearest t = 0, in units of h about x_i
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc < 0.0 || c1 == 0.0 {
                continue;
            }
            let t = if c2.abs() < 1e-14 * c1.abs() {
                -c0 / c1
            } else {
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                c0 / q
            };
            if t.abs() > 1.0 {
                continue;
            }
            let slope = (c1 + 2.0 * c2 * t) / h;
            let zero = AmplitudeZero {
                x0: g.point(i) + t * h,
                slope2: slope * slope,
            };
            if best.is_none_or(|(m, _)| misfit < m) {
                best = Some((misfit, zero));
            }
        }
        if let Some((misfit, zero)) = best {
            let scale = amp.iter().fold(0.0_f64, |m, a| m.max(*a));
            if misfit <= 1e-2 * scale {
                out.push(zero);
            }
        }
    }
    out
}

/// Least-squares quadratic through `y` at `t = -2..=2`; returns the
/// coefficients and the largest misfit.
fn quadratic_fit(y: &[f64]) -> (f64, f64, f64, f64) {
    // orthogonal polynomials on -2..=2: 1, t, t² - 2
    let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let s0: f64 = y.iter().sum::<f64>() / 5.0;
    let s1: f64 = y.iter().zip(&ts).map(|(y, t)| y * t).sum::<f64>() / 10.0;
    let s2: f64 = y.iter().zip(&ts).map(|(y, t)| y * (t * t - 2.0)).sum::<f64>() / 14.0;
    let (c0, c1, c2) = (s0 - 2.0 * s2, s1, s2);
    let misfit = y
        .iter()
        .zip(&ts)
        .map(|(y, t)| (y - (c0 + c1 * t + c2 * t * t)).abs())
        .fold(0.0, f64::max);
    (c0, c1, c2, misfit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetastabilityDelta {
    pub delta: f64,
    /// True when the transition lowers G.
    pub metastable_transition: bool,
}

/// `ΔG = G_n - G_m`.
pub fn metastability_delta(g_n: f64, g_m: f64) -> MetastabilityDelta {
    let delta = g_n - g_m;
    MetastabilityDelta {
        delta,
        metastable_transition: delta < 0.0,
    }
}

/// One row of the oscillator Gibbs-entropy table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsLevel {
    pub n: usize,
    pub g: f64,
    /// `|G_n - G_{n-1}|`, absent for the ground state.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsEntropyReport {
    pub grid: Grid1D,
    pub levels: Vec<GibbsLevel>,
}

impl GibbsEntropyReport {
    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.g).collect()
    }

    /// G strictly decreasing with strictly shrinking gaps.
    pub fn is_monotone_with_shrinking_gaps(&self) -> bool {
        let g = self.values();
        let decreasing = g.windows(2).all(|w| w[1] < w[0]);
        let gaps: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        decreasing && gaps.windows(2).all(|w| w[1] < w[0])
    }

    /// Writes `n, G_n, gap` with five decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "G_n", "gap"])?;
        for l in &self.levels {
            w.write_record([
                l.n.to_string(),
                format!("{:.5}", l.g),
                l.gap.map_or(String::new(), |g| format!("{g:.5}")),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Default window for oscillator entropies: `[-12, 12]` with 4001 points.
pub fn default_table_grid() -> Grid1D {
    Grid1D::symmetric(12.0, 4001).expect("valid default grid")
}

/// Oscillator densities `|φ_n(x)|²` for `n = 0..=n_max` in units with `mω/ħ = 1`.
fn oscillator_densities(n_max: usize, grid: &Grid1D) -> Vec<Field> {
    let table: Vec<Vec<f64>> = grid.points().map(|x| hermite_functions(n_max, x)).collect();
    (0..=n_max)
        .map(|n| Field::new(*grid, table.iter().map(|row| row[n] * row[n]).collect()).expect("grid length"))
        .collect()
}

/// Gibbs entropies of oscillator levels `0..=n_max` on the default window.
pub fn table2_report(n_max: usize) -> Result<GibbsEntropyReport> {
    table2_report_on(n_max, default_table_grid())
}

pub fn table2_report_on(n_max: usize, grid: Grid1D) -> Result<GibbsEntropyReport> {
    if n_max > MAX_HO_LEVEL {
        return Err(Error::invalid(
            "n_max",
            format!("n_max = {n_max} exceeds the supported maximum {MAX_HO_LEVEL}"),
        ));
    }
    let densities = oscillator_densities(n_max, &grid);
    let g: Vec<f64> = densities
        .par_iter()
        .map(gibbs_entropy)
        .collect::<Result<Vec<_>>>()?;
    let levels = g
        .iter()
        .enumerate()
        .map(|(n, &v)| GibbsLevel {
            n,
            g: v,
            gap: (n > 0).then(|| (v - g[n - 1]).abs()),
        })
        .collect();
    Ok(GibbsEntropyReport { grid, levels })
}

/// Analytic and eigensolver Gibbs entropies side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverCrossCheck {
    pub n: usize,
    pub analytic: f64,
    pub solver: f64,
}

/// Repeats the table with densities from the finite-difference eigensolver
/// for `V = x²/2`.
pub fn table2_solver_crosscheck(n_max: usize, grid: Grid1D) -> Result<Vec<SolverCrossCheck>> {
    let analytic = table2_report_on(n_max, grid)?;
    let v = Field::from_fn(grid, |x| 0.5 * x * x);
    let states = solve_stationary(&v, &Units::natural(), n_max + 1)?;
    states
        .iter()
        .zip(&analytic.levels)
        .map(|(s, l)| {
            Ok(SolverCrossCheck {
                n: l.n,
                analytic: l.g,
                solver: gibbs_entropy(&s.psi.density())?,
            })
        })
        .collect()
}
