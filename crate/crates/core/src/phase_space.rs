//! Phase-space densities `F(x, p; t)`, their momentum moments, and residuals of
//! the transport equations those moments obey.

use ndarray::{Array2, Axis};

use crate::equilibrium::momentum_dispersion_entropy;
use crate::error::{Error, Result};
use crate::numerics::{
    derivative, derivative_values, simpson, Field, Grid1D, Stencil, WindowedField, WindowedField2D,
    RESIDUAL_MARGIN,
};
use crate::schrodinger_madelung::MadelungFields;
use crate::units::Units;

/// Below this density the macroscopic momentum and dispersion are set to zero.
pub const DENSITY_EPSILON: f64 = 1e-12;

/// Accepted deviation of `∬F dx dp` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Samples of `F(x, p)` at a fixed time, indexed `[x, p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceDistribution {
    x_grid: Grid1D,
    p_grid: Grid1D,
    values: Array2<f64>,
    pub time: f64,
    pub mass: f64,
    potential: Field,
}

impl PhaseSpaceDistribution {
    pub fn new(
        x_grid: Grid1D,
        p_grid: Grid1D,
        values: Array2<f64>,
        time: f64,
        mass: f64,
        potential: Field,
    ) -> Result<Self> {
        if values.dim() != (x_grid.len(), p_grid.len()) {
            return Err(Error::invalid(
                "values",
                format!(
                    "shape {:?} does not match grids ({}, {})",
                    values.dim(),
                    x_grid.len(),
                    p_grid.len()
                ),
            ));
        }
        if !potential.grid().same_as(&x_grid) {
            return Err(Error::invalid("potential", "potential must be sampled on x_grid"));
        }
        if !(mass > 0.0) {
            return Err(Error::invalid("mass", "mass must be positive"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("values", "F must be finite and non-negative"));
        }
        let dist = Self {
            x_grid,
            p_grid,
            values,
            time,
            mass,
            potential,
        };
        let total = dist.total_probability();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid(
                "values",
                format!("∬F dx dp = {total}, expected 1"),
            ));
        }
        Ok(dist)
    }

    /// Samples `f(x, p)` on the grids without rescaling.
    pub fn from_fn(
        x_grid: Grid1D,
        p_grid: Grid1D,
        time: f64,
        mass: f64,
        potential: Field,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let values = Self::sample(&x_grid, &p_grid, f);
        Self::new(x_grid, p_grid, values, time, mass, potential)
    }

    /// Samples `f(x, p)` and rescales so the quadrature total is exactly one.
    pub fn from_fn_normalized(
        x_grid: Grid1D,
        p_grid: Grid1D,
        time: f64,
        mass: f64,
        potential: Field,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Self::sample(&x_grid, &p_grid, f);
        let total = double_integral(&values, &x_grid, &p_grid);
        if !(total > 0.0) {
            return Err(Error::invalid("f", "distribution integrates to zero"));
        }
        values.mapv_inplace(|v| v / total);
        Self::new(x_grid, p_grid, values, time, mass, potential)
    }

    fn sample(x_grid: &Grid1D, p_grid: &Grid1D, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        let xs = x_grid.to_vec();
        let ps = p_grid.to_vec();
        Array2::from_shape_fn((xs.len(), ps.len()), |(i, j)| f(xs[i], ps[j]))
    }

    pub fn x_grid(&self) -> &Grid1D {
        &self.x_grid
    }

    pub fn p_grid(&self) -> &Grid1D {
        &self.p_grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn potential(&self) -> &Field {
        &self.potential
    }

    pub fn total_probability(&self) -> f64 {
        double_integral(&self.values, &self.x_grid, &self.p_grid)
    }

    /// `∫ p^k F(x, p) dp` for every x.
    pub fn momentum_moment(&self, k: i32) -> Vec<f64> {
        let ps = self.p_grid.to_vec();
        let h = self.p_grid.spacing();
        self.values
            .axis_iter(Axis(0))
            .map(|row| {
                let integrand: Vec<f64> = row.iter().zip(&ps).map(|(f, p)| f * p.powi(k)).collect();
                simpson(&integrand, h)
            })
            .collect()
    }

    fn compatible(&self, other: &Self) -> bool {
        self.x_grid.same_as(&other.x_grid)
            && self.p_grid.same_as(&other.p_grid)
            && self.mass == other.mass
            && self.potential.values() == other.potential.values()
    }
}

fn double_integral(values: &Array2<f64>, x_grid: &Grid1D, p_grid: &Grid1D) -> f64 {
    let hp = p_grid.spacing();
    let rows: Vec<f64> = values
        .axis_iter(Axis(0))
        .map(|row| simpson(&row.to_vec(), hp))
        .collect();
    simpson(&rows, x_grid.spacing())
}

/// Momentum moments of `F` on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFields {
    /// `ρ(x) = ∫F dp`.
    pub rho: Field,
    /// Macroscopic momentum `p(x) = ∫pF dp / ρ`.
    pub momentum: Field,
    /// `M2(x) = ∫p²F dp`.
    pub m2: Field,
    /// Conditional momentum variance `⟨(δp)²⟩(x)`.
    pub dispersion: Field,
    pub time: f64,
}

impl DensityFields {
    /// Fields of an ensemble with zero momentum spread at every x.
    pub fn dispersion_free(rho: Field, momentum: Field, time: f64) -> Result<Self> {
        let m2 = rho.zip_map(&momentum, |r, p| r * p * p)?;
        let dispersion = rho.map(|_| 0.0);
        Ok(Self {
            rho,
            momentum,
            m2,
            dispersion,
            time,
        })
    }

    /// Fields implied by a Madelung segment: `ρ = R²`, `p = ∂s/∂x`, with the
    /// entropic dispersion `-(ħ²/4) ∂² ln ρ`.
    pub fn from_madelung(fields: &MadelungFields) -> Result<Self> {
        let rho = fields.density();
        let dispersion = momentum_dispersion_entropy(&rho, fields.hbar)?;
        let momentum = fields.p_field.clone();
        let m2 = Field::new(
            *rho.grid(),
            rho.values()
                .iter()
                .zip(momentum.values())
                .zip(dispersion.values())
                .map(|((r, p), d)| r * (p * p + d))
                .collect(),
        )?;
        Ok(Self {
            rho,
            momentum,
            m2,
            dispersion,
            time: fields.time,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        self.rho.grid()
    }

    /// Restriction of every field to `range`.
    pub fn window(&self, range: std::ops::Range<usize>) -> Result<Self> {
        Ok(Self {
            rho: self.rho.window(range.clone())?,
            momentum: self.momentum.window(range.clone())?,
            m2: self.m2.window(range.clone())?,
            dispersion: self.dispersion.window(range)?,
            time: self.time,
        })
    }
}

/// `ρ`, `p`, `M2` and `⟨(δp)²⟩ = M2/ρ - p²` from `F`.
pub fn extract_moments(f: &PhaseSpaceDistribution) -> Result<DensityFields> {
    let rho = f.momentum_moment(0);
    if rho.iter().all(|&r| r <= DENSITY_EPSILON) {
        return Err(Error::DegenerateDistribution {
            threshold: DENSITY_EPSILON,
        });
    }
    let j = f.momentum_moment(1);
    let m2 = f.momentum_moment(2);
    let momentum: Vec<f64> = rho
        .iter()
        .zip(&j)
        .map(|(&r, &j)| if r > DENSITY_EPSILON { j / r } else { 0.0 })
        .collect();
    let dispersion: Vec<f64> = rho
        .iter()
        .zip(&m2)
        .zip(&momentum)
        .map(|((&r, &m), &p)| if r > DENSITY_EPSILON { m / r - p * p } else { 0.0 })
        .collect();
    let g = f.x_grid;
    Ok(DensityFields {
        rho: Field::new(g, rho)?,
        momentum: Field::new(g, momentum)?,
        m2: Field::new(g, m2)?,
        dispersion: Field::new(g, dispersion)?,
        time: f.time,
    })
}

/// `∫[p - p(x)]² F dp / ρ(x)`, the centred form of the dispersion.
pub fn momentum_dispersion_direct(f: &PhaseSpaceDistribution, fields: &DensityFields) -> Result<Field> {
    if !fields.grid().same_as(&f.x_grid) {
        return Err(Error::invalid("fields", "fields were not extracted from this distribution"));
    }
    let ps = f.p_grid.to_vec();
    let h = f.p_grid.spacing();
    let values = f
        .values
        .axis_iter(Axis(0))
        .enumerate()
        .map(|(i, row)| {
            let rho = fields.rho.values()[i];
            if rho <= DENSITY_EPSILON {
                return 0.0;
            }
            let mean = fields.momentum.values()[i];
            let integrand: Vec<f64> = row
                .iter()
                .zip(&ps)
                .map(|(f, p)| (p - mean).powi(2) * f)
                .collect();
            simpson(&integrand, h) / rho
        })
        .collect();
    Field::new(f.x_grid, values)
}

fn snapshot_step(snapshots: [&PhaseSpaceDistribution; 3]) -> Result<f64> {
    let [a, b, c] = snapshots;
    if !a.compatible(b) || !b.compatible(c) {
        return Err(Error::invalid("snapshots", "snapshots do not share grids, mass and potential"));
    }
    crate::schrodinger_madelung::time_step(a.time, b.time, c.time)
}

/// `∂F/∂t + (p/m) ∂F/∂x - V'(x) ∂F/∂p` at the middle snapshot.
pub fn liouville_residual(snapshots: [&PhaseSpaceDistribution; 3]) -> Result<WindowedField2D> {
    let dt = snapshot_step(snapshots)?;
    let [before, mid, after] = snapshots;
    let (nx, np) = mid.values.dim();
    let hx = mid.x_grid.spacing();
    let hp = mid.p_grid.spacing();
    let dv = derivative(&mid.potential, 1)?;
    let ps = mid.p_grid.to_vec();

    let mut dfdx = Array2::<f64>::zeros((nx, np));
    for (j, col) in mid.values.axis_iter(Axis(1)).enumerate() {
        let d = derivative_values(&col.to_vec(), hx, 1, Stencil::Fourth)?;
        dfdx.column_mut(j).assign(&ndarray::Array1::from(d));
    }
    let mut dfdp = Array2::<f64>::zeros((nx, np));
    for (i, row) in mid.values.axis_iter(Axis(0)).enumerate() {
        let d = derivative_values(&row.to_vec(), hp, 1, Stencil::Fourth)?;
        dfdp.row_mut(i).assign(&ndarray::Array1::from(d));
    }

    let m = RESIDUAL_MARGIN;
    let values = Array2::from_shape_fn((nx - 2 * m, np - 2 * m), |(a, b)| {
        let (i, j) = (a + m, b + m);
        let dfdt = (after.values[[i, j]] - before.values[[i, j]]) / (2.0 * dt);
        dfdt + ps[j] / mid.mass * dfdx[[i, j]] - dv.values()[i] * dfdp[[i, j]]
    });
    Ok(WindowedField2D {
        x_grid: mid.x_grid,
        y_grid: mid.p_grid,
        x_start: m,
        y_start: m,
        values,
    })
}

fn fields_step(fields: [&DensityFields; 3]) -> Result<f64> {
    let [a, b, c] = fields;
    if !a.grid().same_as(b.grid()) || !b.grid().same_as(c.grid()) {
        return Err(Error::invalid("fields", "snapshots live on different grids"));
    }
    crate::schrodinger_madelung::time_step(a.time, b.time, c.time)
}

/// `∂ρ/∂t + (1/m) ∂(pρ)/∂x` at the middle snapshot.
pub fn continuity_residual(fields: [&DensityFields; 3], mass: f64) -> Result<WindowedField> {
    let dt = fields_step(fields)?;
    let [before, mid, after] = fields;
    let flux = mid.rho.zip_map(&mid.momentum, |r, p| r * p / mass)?;
    let dflux = derivative(&flux, 1)?;
    let values: Vec<f64> = (0..mid.rho.len())
        .map(|i| (after.rho.values()[i] - before.rho.values()[i]) / (2.0 * dt) + dflux.values()[i])
        .collect();
    Ok(WindowedField::from_interior(*mid.grid(), &values, RESIDUAL_MARGIN))
}

/// `∂(ρp)/∂t + (1/m) ∂M2/∂x + V'ρ` at the middle snapshot.
pub fn momentum_transport_residual(snapshots: [&PhaseSpaceDistribution; 3]) -> Result<WindowedField> {
    let dt = snapshot_step(snapshots)?;
    let moments = snapshots
        .iter()
        .map(|f| extract_moments(f))
        .collect::<Result<Vec<_>>>()?;
    let mid = snapshots[1];
    let current = |d: &DensityFields, i: usize| d.rho.values()[i] * d.momentum.values()[i];
    let dm2 = derivative(&moments[1].m2, 1)?;
    let dv = derivative(&mid.potential, 1)?;
    let values: Vec<f64> = (0..mid.x_grid.len())
        .map(|i| {
            (current(&moments[2], i) - current(&moments[0], i)) / (2.0 * dt)
                + dm2.values()[i] / mid.mass
                + dv.values()[i] * moments[1].rho.values()[i]
        })
        .collect();
    Ok(WindowedField::from_interior(mid.x_grid, &values, RESIDUAL_MARGIN))
}

fn require_positive_density(rho: &Field) -> Result<()> {
    for (x, &r) in rho.grid().points().zip(rho.values()) {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("density {r} is not positive at x = {x}")));
        }
    }
    Ok(())
}

fn require_same_grid(a: &Field, b: &Field, what: &str) -> Result<()> {
    if !a.grid().same_as(b.grid()) {
        return Err(Error::invalid("potential", format!("{what} must share the fields' grid")));
    }
    Ok(())
}

/// Mean energy per unit density at x:
/// `H(x) = p(x)²/2m + V(x) - (ħ²/8m) ∂² ln ρ / ∂x²`.
pub fn statistical_hamiltonian(fields: &DensityFields, potential: &Field, units: &Units) -> Result<Field> {
    require_positive_density(&fields.rho)?;
    require_same_grid(&fields.rho, potential, "potential")?;
    let log_rho = fields.rho.map(f64::ln);
    let curv = derivative(&log_rho, 2)?;
    let m = units.mass;
    let c = units.hbar * units.hbar / (8.0 * m);
    Field::new(
        *fields.grid(),
        (0..fields.rho.len())
            .map(|i| {
                let p = fields.momentum.values()[i];
                p * p / (2.0 * m) + potential.values()[i] - c * curv.values()[i]
            })
            .collect(),
    )
}

/// `H(x) - (ħ²/8mρ) ∂²ρ/∂x²`, the quantity whose gradient drives `∂p/∂t`.
///
/// Equals the energy for a real stationary eigenstate.
pub fn statistical_bracket(fields: &DensityFields, potential: &Field, units: &Units) -> Result<Field> {
    let h = statistical_hamiltonian(fields, potential, units)?;
    let rho2 = derivative(&fields.rho, 2)?;
    let c = units.hbar * units.hbar / (8.0 * units.mass);
    Field::new(
        *fields.grid(),
        (0..h.len())
            .map(|i| h.values()[i] - c * rho2.values()[i] / fields.rho.values()[i])
            .collect(),
    )
}

/// `∂p/∂t + ∂/∂x [H - (ħ²/8mρ) ∂²ρ/∂x²]` at the middle snapshot.
pub fn statistical_hamilton_residual(
    fields: [&DensityFields; 3],
    potential: &Field,
    units: &Units,
) -> Result<WindowedField> {
    let dt = fields_step(fields)?;
    let [before, mid, after] = fields;
    let bracket = statistical_bracket(mid, potential, units)?;
    let grad = derivative(&bracket, 1)?;
    let values: Vec<f64> = (0..mid.rho.len())
        .map(|i| {
            (after.momentum.values()[i] - before.momentum.values()[i]) / (2.0 * dt) + grad.values()[i]
        })
        .collect();
    Ok(WindowedField::from_interior(*mid.grid(), &values, RESIDUAL_MARGIN))
}

/// How the momentum-fluctuation force in the `∂p/∂t` equation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluctuationClosure {
    /// Dispersion from the entropy restriction, `-(ħ²/4) ∂² ln ρ`.
    Entropic { hbar: f64 },
    /// Dispersion as carried by the fields themselves.
    Measured,
}

/// Split of the `∂p/∂t` balance into its Newtonian part and the fluctuation force.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonTerms {
    /// `∂p/∂t + ∂/∂x (p²/2m + V)`.
    pub classical: WindowedField,
    /// `(1/mρ) ∂(ρ ⟨(δp)²⟩)/∂x` under the chosen closure.
    pub statistical: WindowedField,
    pub total: WindowedField,
}

/// Evaluates the momentum balance `∂p/∂t + ∂(p²/2m + V)/∂x + (1/mρ)∂(ρ⟨(δp)²⟩)/∂x`
/// term by term.
pub fn hamilton_terms(
    fields: [&DensityFields; 3],
    potential: &Field,
    mass: f64,
    closure: FluctuationClosure,
) -> Result<HamiltonTerms> {
    let dt = fields_step(fields)?;
    let [before, mid, after] = fields;
    require_same_grid(&mid.rho, potential, "potential")?;
    let energy = mid
        .momentum
        .zip_map(potential, |p, v| p * p / (2.0 * mass) + v)?;
    let grad_energy = derivative(&energy, 1)?;
    let classical: Vec<f64> = (0..mid.rho.len())
        .map(|i| {
            (after.momentum.values()[i] - before.momentum.values()[i]) / (2.0 * dt)
                + grad_energy.values()[i]
        })
        .collect();

    let dispersion = match closure {
        FluctuationClosure::Entropic { hbar } => momentum_dispersion_entropy(&mid.rho, hbar)?,
        FluctuationClosure::Measured => mid.dispersion.clone(),
    };
    let pressure = mid.rho.zip_map(&dispersion, |r, d| r * d)?;
    let grad_pressure = derivative(&pressure, 1)?;
    let statistical: Vec<f64> = (0..mid.rho.len())
        .map(|i| {
            let g = grad_pressure.values()[i];
            if g == 0.0 {
                0.0
            } else {
                g / (mass * mid.rho.values()[i])
            }
        })
        .collect();
    let total: Vec<f64> = classical.iter().zip(&statistical).map(|(a, b)| a + b).collect();
    let grid = *mid.grid();
    Ok(HamiltonTerms {
        classical: WindowedField::from_interior(grid, &classical, RESIDUAL_MARGIN),
        statistical: WindowedField::from_interior(grid, &statistical, RESIDUAL_MARGIN),
        total: WindowedField::from_interior(grid, &total, RESIDUAL_MARGIN),
    })
}
