use std::time::Duration;

use serde::Serialize;

use super::fmt6;

/// One named comparison of a computed value against a target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub target: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `|computed - target| <= tolerance`.
    pub fn near(suite: &'static str, name: impl Into<String>, target: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            target,
            computed,
            tolerance,
            pass: (computed - target).abs() <= tolerance,
        }
    }

    /// Passes when `computed <= tolerance`; for residuals with target zero.
    pub fn below(suite: &'static str, name: impl Into<String>, computed: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            target: 0.0,
            computed,
            tolerance,
            pass: computed <= tolerance,
        }
    }

    /// A yes/no property, recorded as 1 or 0.
    pub fn holds(suite: &'static str, name: impl Into<String>, value: bool) -> Self {
        Self {
            suite,
            name: name.into(),
            target: 1.0,
            computed: if value { 1.0 } else { 0.0 },
            tolerance: 0.0,
            pass: value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Not serialised, so reports stay byte-identical between runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>, wall_time: Duration) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            checks,
            pass,
            wall_time,
        }
    }

    pub fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let rows = self
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.suite.to_string(),
                    c.name.clone(),
                    fmt6(c.target),
                    fmt6(c.computed),
                    fmt6(c.tolerance),
                    if c.pass { "pass" } else { "FAIL" }.to_string(),
                ]
            })
            .collect();
        (vec!["suite", "check", "target", "computed", "tolerance", "status"], rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_flag() {
        let ok = Check::below("s", "a", 1e-9, 1e-8);
        let bad = Check::near("s", "b", 1.0, 1.1, 1e-3);
        assert!(VerificationReport::new(vec![ok.clone()], Duration::ZERO).pass);
        assert!(!VerificationReport::new(vec![ok, bad], Duration::ZERO).pass);
        assert!(!Check::holds("s", "c", false).pass);
    }

    #[test]
    fn wall_time_not_serialised() {
        let r = VerificationReport::new(vec![], Duration::from_secs(3));
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("wall"));
    }
}
