use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Grid1D;
use crate::units::Units;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "MADELUNG_LAB_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Optional grid override; commands fill the gaps with their own defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub window: Option<[f64; 2]>,
    pub points: Option<usize>,
}

impl GridConfig {
    pub fn resolve(&self, default_window: [f64; 2], default_points: usize) -> Result<Grid1D> {
        let [a, b] = self.window.unwrap_or(default_window);
        Grid1D::new(a, b, self.points.unwrap_or(default_points))
    }
}

/// Named tolerances. Every value must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Table row against its reference value.
    pub table2: f64,
    /// Relative agreement of the two momentum dispersions.
    pub dispersion: f64,
    /// Uncertainty product against `ħ²/4`.
    pub uncertainty: f64,
    /// `V + Q` against `E` for analytic eigenstates, relative.
    pub eigen_analytic: f64,
    /// `V + Q` against `E` for solver eigenstates, relative.
    pub eigen_solver: f64,
    /// Solver energies against `ħω(n + 1/2)`.
    pub solver_energy: f64,
    /// Decaying norm against `e^{-2t/τ}`.
    pub norm: f64,
    /// Continuity residuals of decaying states.
    pub continuity: f64,
    /// Quadrature against closed-form characteristic function, relative.
    pub closed_form: f64,
    /// Energy relations of the canonical ensemble.
    pub energy: f64,
    /// Transport-equation residuals limited by discretisation.
    pub residual: f64,
    /// Terms that must vanish identically.
    pub exact_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            table2: 1e-4,
            dispersion: 1e-6,
            uncertainty: 1e-10,
            eigen_analytic: 1e-9,
            eigen_solver: 1e-5,
            solver_energy: 1e-4,
            norm: 1e-10,
            continuity: 1e-6,
            closed_form: 1e-8,
            energy: 1e-8,
            residual: 1e-4,
            exact_zero: 1e-12,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "table2" => &mut self.table2,
            "dispersion" => &mut self.dispersion,
            "uncertainty" => &mut self.uncertainty,
            "eigen_analytic" => &mut self.eigen_analytic,
            "eigen_solver" => &mut self.eigen_solver,
            "solver_energy" => &mut self.solver_energy,
            "norm" => &mut self.norm,
            "continuity" => &mut self.continuity,
            "closed_form" => &mut self.closed_form,
            "energy" => &mut self.energy,
            "residual" => &mut self.residual,
            "exact_zero" => &mut self.exact_zero,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::invalid("tol", format!("unknown tolerance `{name}`")))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::invalid("tol", format!("`{name}` must be positive and finite, got {value}")));
        }
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.table2,
            self.dispersion,
            self.uncertainty,
            self.eigen_analytic,
            self.eigen_solver,
            self.solver_energy,
            self.norm,
            self.continuity,
            self.closed_form,
            self.energy,
            self.residual,
            self.exact_zero,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("tolerances", "every tolerance must be positive and finite"))
        }
    }
}

/// Settings shared by every command, loaded from JSON and overridden by flags.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub units: Units,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Reads `path`, else the file named by [`CONFIG_ENV`], else defaults.
    pub fn discover(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        let u = &self.units;
        for (name, v) in [("hbar", u.hbar), ("mass", u.mass), ("omega", u.omega), ("k", u.k), ("kb", u.kb)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid("units", format!("{name} must be positive, got {v}")));
            }
        }
        if let Some([a, b]) = self.grid.window {
            if !(b > a) {
                return Err(Error::invalid("window", "window must satisfy A < B"));
            }
        }
        if matches!(self.grid.points, Some(n) if n < 5) {
            return Err(Error::invalid("grid-points", "need at least 5 points"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        let text = serde_json::to_string(&RunConfig::default()).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn partial_json() {
        let c = RunConfig::from_json(r#"{"units": {"omega": 2.0}, "tolerances": {"table2": 1e-3}, "format": "json"}"#).unwrap();
        assert_eq!(c.units.omega, 2.0);
        assert_eq!(c.units.hbar, 1.0);
        assert_eq!(c.tolerances.table2, 1e-3);
        assert_eq!(c.tolerances.norm, 1e-10);
        assert_eq!(c.format, OutputFormat::Json);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_json(r#"{"tolerances": {"norm": 0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"units": {"hbar": -1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"grid": {"window": [2, 1]}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour": "red"}"#).is_err());
        let mut t = Tolerances::default();
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("norm", -1.0).is_err());
        t.set("table2", 5e-4).unwrap();
        assert_eq!(t.table2, 5e-4);
    }
}
