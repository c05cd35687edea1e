//! The infinitesimal Wigner-Moyal transform `Z(x, δx) = ∫ e^{ipδx/ħ} F(x, p) dp`
//! and the momentum statistics generated by its small-δx behaviour.

use std::io::Write;

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::equilibrium::momentum_dispersion_entropy;
use crate::error::{Error, Result};
use crate::numerics::{
    cubic_interpolate, richardson_even_complex, simpson_weights, Field, Grid1D,
    WindowedField2D,
};
use crate::phase_space::{DensityFields, PhaseSpaceDistribution, DENSITY_EPSILON};
use crate::schrodinger_madelung::Wavefunction;

/// Largest `|δx|` accepted by [`characteristic_function`].
pub const DEFAULT_MAX_DISPLACEMENT: f64 = 0.1;

/// Tolerated `|Im Z(x, 0)|` and conjugate-symmetry defect.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// `Z(x, δx)` sampled on an `x × δx` grid, indexed `[x, δx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction {
    x_grid: Grid1D,
    dx_grid: Grid1D,
    values: Array2<Complex64>,
    pub time: f64,
    pub hbar: f64,
}

fn check_dx_grid(dx_grid: &Grid1D, min_points: usize) -> Result<()> {
    if !dx_grid.is_symmetric_about_zero() {
        return Err(Error::invalid(
            "dx_grid",
            "δx axis must be symmetric about 0 with an odd number of points",
        ));
    }
    if dx_grid.len() < min_points {
        return Err(Error::invalid(
            "dx_grid",
            format!("need at least {min_points} δx points, got {}", dx_grid.len()),
        ));
    }
    Ok(())
}

impl CharacteristicFunction {
    pub fn new(
        x_grid: Grid1D,
        dx_grid: Grid1D,
        values: Array2<Complex64>,
        time: f64,
        hbar: f64,
    ) -> Result<Self> {
        check_dx_grid(&dx_grid, 3)?;
        if values.dim() != (x_grid.len(), dx_grid.len()) {
            return Err(Error::invalid("values", "shape does not match the grids"));
        }
        if !(hbar > 0.0) {
            return Err(Error::invalid("hbar", "ħ must be positive"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("values", "Z must be finite"));
        }
        Ok(Self {
            x_grid,
            dx_grid,
            values,
            time,
            hbar,
        })
    }

    /// Samples `z(x, δx)` on the grids.
    pub fn from_fn(
        x_grid: Grid1D,
        dx_grid: Grid1D,
        time: f64,
        hbar: f64,
        z: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let xs = x_grid.to_vec();
        let ds = dx_grid.to_vec();
        let values = Array2::from_shape_fn((xs.len(), ds.len()), |(i, j)| z(xs[i], ds[j]));
        Self::new(x_grid, dx_grid, values, time, hbar)
    }

    /// `ψ*(x - δx/2) ψ(x + δx/2)` on the wavefunction's own grid.
    ///
    /// Rows whose displaced points leave the grid are filled from the nearest
    /// row that stays inside; use [`safe_rows`](Self::safe_rows) to restrict
    /// to the exact part.
    pub fn from_ansatz(psi: &Wavefunction, dx_grid: Grid1D) -> Result<Self> {
        check_dx_grid(&dx_grid, 3)?;
        let grid = *psi.grid();
        let rows = interpolation_rows(&grid, &dx_grid)?;
        let ds = dx_grid.to_vec();
        let mut values = Array2::zeros((grid.len(), ds.len()));
        for i in 0..grid.len() {
            let src = i.clamp(rows.start, rows.end - 1);
            let x = grid.point(src);
            for (j, d) in ds.iter().enumerate() {
                values[[i, j]] = ansatz_value(psi, x, *d);
            }
        }
        Self::new(grid, dx_grid, values, psi.time, psi.hbar)
    }

    pub fn x_grid(&self) -> &Grid1D {
        &self.x_grid
    }

    pub fn dx_grid(&self) -> &Grid1D {
        &self.dx_grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// Index of the `δx = 0` column.
    pub fn zero_column(&self) -> usize {
        self.dx_grid.len() / 2
    }

    /// `Z(x, 0)` as a real field.
    pub fn density(&self) -> Field {
        let c = self.zero_column();
        Field::new(self.x_grid, self.values.column(c).iter().map(|z| z.re).collect())
            .expect("column length matches x grid")
    }

    /// Rows whose displaced points `x ± max|δx|/2` stay inside the grid with a
    /// one-spacing margin, so cubic interpolation is well posed.
    pub fn safe_rows(&self) -> Result<std::ops::Range<usize>> {
        interpolation_rows(&self.x_grid, &self.dx_grid)
    }

    /// Largest `|Im Z(x, 0)|` and `|Z(x, -δx) - conj Z(x, δx)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dx_grid.len();
        let c = self.zero_column();
        let mut worst: f64 = 0.0;
        for row in self.values.axis_iter(Axis(0)) {
            worst = worst.max(row[c].im.abs());
            for j in 0..n {
                worst = worst.max((row[n - 1 - j] - row[j].conj()).norm());
            }
        }
        worst
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.x_grid.same_as(&other.x_grid) && self.dx_grid.same_as(&other.dx_grid) && self.hbar == other.hbar
    }

    /// Writes `x, δx, Re Z, Im Z` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "dx", "re_z", "im_z"])?;
        let ds = self.dx_grid.to_vec();
        for (i, x) in self.x_grid.points().enumerate() {
            for (j, d) in ds.iter().enumerate() {
                let z = self.values[[i, j]];
                w.write_record([
                    x.to_string(),
                    d.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn interpolation_rows(grid: &Grid1D, dx_grid: &Grid1D) -> Result<std::ops::Range<usize>> {
    let half = 0.5 * dx_grid.x_max();
    let margin = (half / grid.spacing() - 1e-9).ceil() as usize + 1;
    if grid.len() < 2 * margin + 3 {
        return Err(Error::invalid(
            "dx_grid",
            format!(
                "|δx|/2 = {half} leaves no interior rows on a grid of {} points",
                grid.len()
            ),
        ));
    }
    Ok(margin..grid.len() - margin)
}

fn ansatz_value(psi: &Wavefunction, x: f64, d: f64) -> Complex64 {
    let g = psi.grid();
    let lo = cubic_interpolate(g, psi.values(), x - 0.5 * d).unwrap_or_default();
    let hi = cubic_interpolate(g, psi.values(), x + 0.5 * d).unwrap_or_default();
    lo.conj() * hi
}

/// `Z(x, δx) = ∫ e^{ipδx/ħ} F(x, p) dp` by Simpson quadrature, with
/// `max |δx|` limited to [`DEFAULT_MAX_DISPLACEMENT`].
pub fn characteristic_function(
    f: &PhaseSpaceDistribution,
    dx_grid: Grid1D,
    hbar: f64,
) -> Result<CharacteristicFunction> {
    characteristic_function_with_limit(f, dx_grid, hbar, DEFAULT_MAX_DISPLACEMENT)
}

pub fn characteristic_function_with_limit(
    f: &PhaseSpaceDistribution,
    dx_grid: Grid1D,
    hbar: f64,
    max_displacement: f64,
) -> Result<CharacteristicFunction> {
    check_dx_grid(&dx_grid, 3)?;
    if dx_grid.x_max() > max_displacement * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "dx_grid",
            format!(
                "max |δx| = {} exceeds the small-displacement limit {max_displacement}",
                dx_grid.x_max()
            ),
        ));
    }
    if !(hbar > 0.0) {
        return Err(Error::invalid("hbar", "ħ must be positive"));
    }
    let ps = f.p_grid().to_vec();
    let w = simpson_weights(ps.len(), f.p_grid().spacing());
    let ds = dx_grid.to_vec();
    let cos = Array2::from_shape_fn((ps.len(), ds.len()), |(j, k)| w[j] * (ps[j] * ds[k] / hbar).cos());
    let sin = Array2::from_shape_fn((ps.len(), ds.len()), |(j, k)| w[j] * (ps[j] * ds[k] / hbar).sin());
    let re = f.values().dot(&cos);
    let im = f.values().dot(&sin);
    let values = Array2::from_shape_fn(re.dim(), |(i, k)| Complex64::new(re[[i, k]], im[[i, k]]));
    CharacteristicFunction::new(*f.x_grid(), dx_grid, values, f.time, hbar)
}

/// Richardson-extrapolated first and second δx-derivatives of `g` at 0, from
/// the centred differences over the smallest shells.
fn limit_derivatives(row: &[Complex64], c: usize, h: f64) -> (Complex64, Complex64) {
    let shells = c.min(3);
    let mut d1 = Vec::with_capacity(shells);
    let mut d2 = Vec::with_capacity(shells);
    for k in 1..=shells {
        let step = k as f64 * h;
        let (plus, minus) = (row[c + k], row[c - k]);
        d1.push((plus - minus) / (2.0 * step));
        d2.push((plus - row[c] * 2.0 + minus) / (step * step));
    }
    (richardson_even_complex(&d1), richardson_even_complex(&d2))
}

fn shell_values(row: ndarray::ArrayView1<Complex64>, c: usize) -> Vec<Complex64> {
    let shells = c.min(3);
    row.iter().skip(c - shells).take(2 * shells + 1).copied().collect()
}

/// `ρ`, `pρ = Re(-iħ ∂Z/∂δx)`, `M2 = -ħ² Re ∂²Z/∂δx²` at `δx = 0`.
pub fn zq_limit_moments(z: &CharacteristicFunction) -> Result<DensityFields> {
    check_dx_grid(&z.dx_grid, 5)?;
    let c = z.zero_column();
    let h = z.dx_grid.spacing();
    let hbar = z.hbar;
    let n = z.x_grid.len();
    let (mut rho, mut momentum, mut m2, mut dispersion) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (i, row) in z.values.axis_iter(Axis(0)).enumerate() {
        let local = shell_values(row, c);
        let lc = local.len() / 2;
        let (d1, d2) = limit_derivatives(&local, lc, h);
        let r = row[c].re;
        rho[i] = r;
        m2[i] = -hbar * hbar * d2.re;
        if r > DENSITY_EPSILON {
            momentum[i] = hbar * d1.im / r;
            dispersion[i] = m2[i] / r - momentum[i] * momentum[i];
        }
    }
    let g = z.x_grid;
    Ok(DensityFields {
        rho: Field::new(g, rho)?,
        momentum: Field::new(g, momentum)?,
        m2: Field::new(g, m2)?,
        dispersion: Field::new(g, dispersion)?,
        time: z.time,
    })
}

/// Per-x momentum statistics read off `Z` the way an energy partition
/// function yields energy statistics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MomentumStats {
    pub x: f64,
    /// `-iħ ∂ ln Z/∂δx` at 0.
    pub mean_p: f64,
    /// `-(ħ²/Z) ∂²Z/∂δx²` at 0.
    pub mean_p2: f64,
    /// `-ħ² ∂² ln Z/∂δx²` at 0.
    pub dispersion: f64,
}

fn log_row(local: &[Complex64], x: f64) -> Result<Vec<Complex64>> {
    local
        .iter()
        .map(|z| {
            if z.re > 0.0 {
                Ok(z.ln())
            } else {
                Err(Error::Domain(format!(
                    "Z = {z} leaves the right half-plane at x = {x}"
                )))
            }
        })
        .collect()
}

/// Momentum statistics at every x. Rows with `Z(x, 0) ≤` [`DENSITY_EPSILON`]
/// are reported as zeros.
pub fn momentum_partition_stats(z: &CharacteristicFunction) -> Result<Vec<MomentumStats>> {
    check_dx_grid(&z.dx_grid, 5)?;
    let c = z.zero_column();
    let h = z.dx_grid.spacing();
    let hbar = z.hbar;
    z.values
        .axis_iter(Axis(0))
        .zip(z.x_grid.points())
        .map(|(row, x)| {
            if row[c].re <= DENSITY_EPSILON {
                return Ok(MomentumStats {
                    x,
                    mean_p: 0.0,
                    mean_p2: 0.0,
                    dispersion: 0.0,
                });
            }
            let local = shell_values(row, c);
            let lc = local.len() / 2;
            let (_, d2) = limit_derivatives(&local, lc, h);
            let logs = log_row(&local, x)?;
            let (l1, l2) = limit_derivatives(&logs, lc, h);
            Ok(MomentumStats {
                x,
                mean_p: (Complex64::new(0.0, -hbar) * l1).re,
                mean_p2: -hbar * hbar * (d2 / row[c]).re,
                dispersion: -hbar * hbar * l2.re,
            })
        })
        .collect()
}

/// `⟨(δp)²⟩(x) = -ħ² ∂² ln Z/∂δx²` at `δx = 0`.
pub fn dispersion_from_zq(z: &CharacteristicFunction) -> Result<Field> {
    let stats = momentum_partition_stats(z)?;
    Field::new(z.x_grid, stats.iter().map(|s| s.dispersion).collect())
}

/// `-(ħ²/4) ∂² ln ρ/∂x²`.
pub fn closed_form_dispersion(rho: &Field, hbar: f64) -> Result<Field> {
    momentum_dispersion_entropy(rho, hbar)
}

fn ensure_same_grid(z: &CharacteristicFunction, g: &Grid1D, what: &'static str) -> Result<()> {
    if !z.x_grid.same_as(g) {
        return Err(Error::invalid(what, "must be sampled on the x grid of Z"));
    }
    Ok(())
}

/// `|Z(x, δx) - ψ*(x - δx/2) ψ(x + δx/2)|` on the rows where cubic
/// interpolation of ψ is well posed.
pub fn factorization_residual(z: &CharacteristicFunction, psi: &Wavefunction) -> Result<WindowedField2D> {
    ensure_same_grid(z, psi.grid(), "psi")?;
    let rows = z.safe_rows()?;
    let ds = z.dx_grid.to_vec();
    let values = Array2::from_shape_fn((rows.len(), ds.len()), |(a, j)| {
        let i = rows.start + a;
        (z.values[[i, j]] - ansatz_value(psi, z.x_grid.point(i), ds[j])).norm()
    });
    Ok(WindowedField2D {
        x_grid: z.x_grid,
        y_grid: z.dx_grid,
        x_start: rows.start,
        y_start: 0,
        values,
    })
}

/// `max_± |Z(x, δx) - ρ(x ± δx/2)|`: the equality of `Z` with the density at
/// the displaced points.
pub fn displaced_density_residual(z: &CharacteristicFunction, rho: &Field) -> Result<WindowedField2D> {
    ensure_same_grid(z, rho.grid(), "rho")?;
    let rows = z.safe_rows()?;
    let ds = z.dx_grid.to_vec();
    let complex: Vec<Complex64> = rho.values().iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let at = |x: f64| cubic_interpolate(&z.x_grid, &complex, x).unwrap_or_default();
    let values = Array2::from_shape_fn((rows.len(), ds.len()), |(a, j)| {
        let i = rows.start + a;
        let x = z.x_grid.point(i);
        let zij = z.values[[i, j]];
        (zij - at(x + 0.5 * ds[j])).norm().max((zij - at(x - 0.5 * ds[j])).norm())
    });
    Ok(WindowedField2D {
        x_grid: z.x_grid,
        y_grid: z.dx_grid,
        x_start: rows.start,
        y_start: 0,
        values,
    })
}

/// Pointwise maximum of [`factorization_residual`] and
/// [`displaced_density_residual`] with `ρ = |ψ|²`.
pub fn bridge_residual(z: &CharacteristicFunction, psi: &Wavefunction) -> Result<WindowedField2D> {
    let mut a = factorization_residual(z, psi)?;
    let b = displaced_density_residual(z, &psi.density())?;
    a.values.zip_mut_with(&b.values, |x, y| *x = x.max(*y));
    Ok(a)
}

/// Scaling of a residual with the displacement.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `ln r` against `ln |δx|` over samples above the
    /// noise floor; `None` when fewer than two samples clear it.
    pub slope: Option<f64>,
    /// `r / δx²` at the smallest displacement.
    pub quadratic_coefficient: f64,
    pub max_residual: f64,
}

impl OrderEstimate {
    /// At least cubic: either the slope is at least `min_order` or the
    /// residual never rises above the noise floor.
    pub fn is_at_least(&self, min_order: f64) -> bool {
        self.slope.is_none_or(|s| s >= min_order)
    }
}

/// Fits the power law of `residuals[k]` against `displacements[k]` (both
/// positive; zero displacements are skipped).
pub fn estimate_order(displacements: &[f64], residuals: &[f64], noise_floor: f64) -> OrderEstimate {
    let pts: Vec<(f64, f64)> = displacements
        .iter()
        .zip(residuals)
        .filter(|(d, _)| d.abs() > 0.0)
        .map(|(d, r)| (d.abs(), *r))
        .collect();
    let max_residual = pts.iter().fold(0.0_f64, |m, (_, r)| m.max(*r));
    let quadratic_coefficient = pts
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map_or(0.0, |(d, r)| r / (d * d));
    let logs: Vec<(f64, f64)> = pts
        .iter()
        .filter(|(_, r)| *r > noise_floor)
        .map(|(d, r)| (d.ln(), r.ln()))
        .collect();
    let slope = if logs.len() < 2 {
        None
    } else {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    OrderEstimate {
        slope,
        quadratic_coefficient,
        max_residual,
    }
}

/// Order estimate for one row of a residual field over the positive δx samples.
pub fn row_order(residual: &WindowedField2D, row: usize, noise_floor: f64) -> Option<OrderEstimate> {
    let values = residual.row_at(row)?;
    let ds = residual.y_grid.to_vec();
    let c = ds.len() / 2;
    Some(estimate_order(&ds[c + 1..], &values[c + 1..], noise_floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Units;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gauss(x: f64, mean: f64, var: f64) -> f64 {
        (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
    }

    fn dist(f: impl Fn(f64, f64) -> f64) -> PhaseSpaceDistribution {
        let x = Grid1D::symmetric(6.0, 121).unwrap();
        let p = Grid1D::symmetric(8.0, 401).unwrap();
        PhaseSpaceDistribution::from_fn_normalized(x, p, 0.0, 1.0, Field::from_fn(x, |_| 0.0), f).unwrap()
    }

    fn dx() -> Grid1D {
        Grid1D::centered(0.01, 5).unwrap()
    }

    #[test]
    fn gaussian_transform_closed_form() {
        let var_p = 0.7;
        let f = dist(|x, p| gauss(x, 0.0, 1.0) * gauss(p, 0.0, var_p));
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        let rho = extract(&f);
        for (i, _) in f.x_grid().points().enumerate() {
            for (j, d) in dx().points().enumerate() {
                let expect = rho[i] * (-var_p * d * d / 2.0).exp();
                assert!((z.values()[[i, j]] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        assert!(z.hermiticity_defect() < HERMITIAN_TOLERANCE);
    }

    fn extract(f: &PhaseSpaceDistribution) -> Vec<f64> {
        f.momentum_moment(0)
    }

    #[test]
    fn zero_column_is_density() {
        let f = dist(|x, p| gauss(x, 0.5, 1.0) * gauss(p, 1.0 + 0.2 * x, 0.4));
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        for (a, b) in z.density().values().iter().zip(extract(&f)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let f = dist(|x, p| gauss(x, 0.0, 1.0) * gauss(p, 0.0, 1.0));
        let bad = Grid1D::new(-0.02, 0.04, 7).unwrap();
        assert!(characteristic_function(&f, bad, 1.0).is_err());
        let wide = Grid1D::centered(0.1, 3).unwrap();
        assert!(characteristic_function(&f, wide, 1.0).is_err());
    }

    #[test]
    fn limit_moments_match_direct_moments() {
        let f = dist(|x, p| gauss(x, 0.2, 1.1) * gauss(p, 0.8 - 0.3 * x, 0.5 + 0.1 * x * x));
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        let a = zq_limit_moments(&z).unwrap();
        let b = crate::phase_space::extract_moments(&f).unwrap();
        for i in 0..a.rho.len() {
            assert_abs_diff_eq!(a.rho.values()[i], b.rho.values()[i], epsilon = 1e-12);
            assert_abs_diff_eq!(a.m2.values()[i], b.m2.values()[i], epsilon = 1e-8);
            if b.rho.values()[i] > 1e-6 {
                assert_abs_diff_eq!(a.momentum.values()[i], b.momentum.values()[i], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn symmetric_in_p_has_zero_mean() {
        let f = dist(|x, p| gauss(x, 0.0, 1.0) * (gauss(p, -1.5, 0.3) + gauss(p, 1.5, 0.3)));
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        let stats = momentum_partition_stats(&z).unwrap();
        for s in &stats {
            assert!(s.mean_p.abs() < 1e-10);
        }
        let d = zq_limit_moments(&z).unwrap();
        assert!(d.momentum.max_abs() < 1e-10);
    }

    #[test]
    fn gaussian_statistics() {
        let f = dist(|x, p| gauss(x, 0.0, 1.0) * gauss(p, 1.25, 0.6));
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        for s in momentum_partition_stats(&z).unwrap() {
            if s.x.abs() < 4.0 {
                assert_abs_diff_eq!(s.mean_p, 1.25, epsilon = 1e-8);
                assert_abs_diff_eq!(s.dispersion, 0.6, epsilon = 1e-8);
                assert_abs_diff_eq!(s.dispersion, s.mean_p2 - s.mean_p * s.mean_p, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn dispersion_free_gives_zero() {
        let p = Grid1D::symmetric(8.0, 401).unwrap();
        let p0 = p.point(230);
        let h = p.spacing();
        let f = dist(|x, pp| if (pp - p0).abs() < 0.5 * h { gauss(x, 0.0, 1.0) } else { 0.0 });
        let z = characteristic_function(&f, dx(), 1.0).unwrap();
        let disp = dispersion_from_zq(&z).unwrap();
        assert!(disp.max_abs() < 1e-8, "{}", disp.max_abs());
        for s in momentum_partition_stats(&z).unwrap() {
            if s.mean_p != 0.0 {
                assert_abs_diff_eq!(s.mean_p, p0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn closed_form_gaussian_density() {
        let g = Grid1D::symmetric(4.0, 401).unwrap();
        let rho = Field::from_fn(g, |x| gauss(x, 0.0, 0.5));
        let d = closed_form_dispersion(&rho, 1.0).unwrap();
        for v in d.values() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-9);
        }
    }

    fn ground(grid: Grid1D) -> Wavefunction {
        let vals: Vec<f64> = grid
            .points()
            .map(|x| PI.powf(-0.25) * (-x * x / 2.0).exp())
            .collect();
        Wavefunction::from_real(grid, &vals, 0.0, &Units::natural()).unwrap()
    }

    #[test]
    fn ansatz_matches_for_oscillator_ground_state() {
        // F ∝ e^{-x²-p²} is factorized by the ground state with ħ = 1
        let g = Grid1D::symmetric(7.0, 1401).unwrap();
        let d = Grid1D::centered(0.01, 10).unwrap();
        let z = CharacteristicFunction::from_fn(g, d, 0.0, 1.0, |x, dx| {
            Complex64::new((-x * x).exp() / PI.sqrt() * (-dx * dx / 4.0).exp(), 0.0)
        })
        .unwrap();
        let psi = ground(g);
        let res = factorization_residual(&z, &psi).unwrap();
        assert!(res.max_abs() < 1e-9, "{}", res.max_abs());
        // δx = 0 column reduces to the Born-rule match
        let c = d.len() / 2;
        for a in 0..res.values.nrows() {
            assert!(res.values[[a, c]] < 1e-12);
        }

        // same density, twice the momentum variance: mismatch enters at δx²
        let wide = CharacteristicFunction::from_fn(g, d, 0.0, 1.0, |x, dx| {
            Complex64::new((-x * x).exp() / PI.sqrt() * (-dx * dx / 2.0).exp(), 0.0)
        })
        .unwrap();
        let res = factorization_residual(&wide, &psi).unwrap();
        let row = g.nearest_index(0.0);
        let est = row_order(&res, row, 1e-12).unwrap();
        let slope = est.slope.unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
        assert_abs_diff_eq!(est.quadratic_coefficient, 0.25 / PI.sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn interpolation_margin_enforced() {
        let g = Grid1D::symmetric(0.05, 5).unwrap();
        let d = Grid1D::centered(0.01, 5).unwrap();
        let z = CharacteristicFunction::from_fn(g, d, 0.0, 1.0, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(z.safe_rows().is_err());
    }

    #[test]
    fn order_estimates() {
        let ds = [0.01, 0.02, 0.04, 0.08];
        let quad: Vec<f64> = ds.iter().map(|d| 0.3 * d * d).collect();
        let e = estimate_order(&ds, &quad, 1e-14);
        assert_abs_diff_eq!(e.slope.unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.quadratic_coefficient, 0.3, epsilon = 1e-12);
        let noise = [1e-16; 4];
        assert!(estimate_order(&ds, &noise, 1e-14).is_at_least(3.0));
    }

    #[test]
    fn csv_export_columns() {
        let g = Grid1D::symmetric(1.0, 3).unwrap();
        let d = Grid1D::centered(0.01, 1).unwrap();
        let z = CharacteristicFunction::from_fn(g, d, 0.0, 1.0, Complex64::new).unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,dx,re_z,im_z");
        assert_eq!(lines.len(), 1 + 9);
        assert_eq!(lines[1], "-1,-0.01,-1,-0.01");
    }
}
