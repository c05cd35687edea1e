use serde::{Deserialize, Serialize};

/// Physical constants used across the crate. Natural units (all ones) by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    /// Entropy constant in `S = k ln rho`.
    pub k: f64,
    /// Boltzmann constant used by the canonical ensemble.
    pub kb: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            k: 1.0,
            kb: 1.0,
        }
    }
}

impl Units {
    pub fn natural() -> Self {
        Self::default()
    }

    /// Oscillator length scale `sqrt(hbar / (m omega))`.
    pub fn oscillator_length(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }
}
