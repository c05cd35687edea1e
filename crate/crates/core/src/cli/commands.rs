use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use super::report::Check;
use super::{fmt6, Rendered};
use crate::boltzmann::{boltzmann_report, BoltzmannReport};
use crate::equilibrium::{table2_report_on, REFERENCE_GIBBS_ENTROPIES};
use crate::error::{Error, Result};
use crate::io::write_wavefunction;
use crate::numerics::Field;
use crate::schrodinger_madelung::{
    decay_rate, ho_eigenstate, metastable_state, solve_stationary, DecaySpec, Lifetime,
};

#[derive(Debug, Clone, Serialize)]
struct TableRow {
    n: usize,
    g: f64,
    gap: Option<f64>,
    reference: Option<f64>,
    abs_delta: Option<f64>,
    status: &'static str,
}

#[derive(Debug, Clone, Serialize)]
struct TableOutput {
    window: [f64; 2],
    points: usize,
    tolerance: f64,
    rows: Vec<TableRow>,
    decreasing_with_shrinking_gaps: bool,
    pass: bool,
}

pub fn table2(n_max: usize, cfg: &RunConfig) -> Result<Rendered> {
    let grid = cfg.grid.resolve([-12.0, 12.0], 4001)?;
    let report = table2_report_on(n_max, grid)?;
    let tol = cfg.tolerances.table2;
    let rows: Vec<TableRow> = report
        .levels
        .iter()
        .map(|l| {
            let reference = REFERENCE_GIBBS_ENTROPIES.get(l.n).copied();
            let abs_delta = reference.map(|r| (l.g - r).abs());
            let status = match abs_delta {
                None => "no reference",
                Some(d) if d <= tol => "pass",
                Some(_) => "FAIL",
            };
            TableRow {
                n: l.n,
                g: l.g,
                gap: l.gap,
                reference,
                abs_delta,
                status,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.status != "FAIL");
    let out = TableOutput {
        window: [grid.x_min(), grid.x_max()],
        points: grid.len(),
        tolerance: tol,
        decreasing_with_shrinking_gaps: report.is_monotone_with_shrinking_gaps(),
        rows,
        pass,
    };
    let opt = |v: Option<f64>| v.map_or(String::new(), fmt6);
    let csv_rows = out
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt6(r.g),
                opt(r.gap),
                opt(r.reference),
                opt(r.abs_delta),
                r.status.to_string(),
            ]
        })
        .collect();
    Rendered::new(
        &out,
        None,
        &["n", "G_n", "gap", "reference", "abs_delta", "status"],
        csv_rows,
        if pass { 0 } else { 1 },
    )
}

#[derive(Debug, Clone, Serialize)]
struct DecayHeader {
    n: usize,
    energy: f64,
    /// Absent when the rates sum to zero.
    tau: Option<f64>,
    lifetime_source: &'static str,
    tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DecaySample {
    t: f64,
    norm: f64,
    predicted: f64,
    residual: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DecayOutput {
    #[serde(flatten)]
    header: DecayHeader,
    series: Vec<DecaySample>,
    pass: bool,
}

pub struct DecayArgs {
    pub n: usize,
    pub tau: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: usize,
    pub rates: Option<Vec<f64>>,
}

pub fn decay(args: &DecayArgs, cfg: &RunConfig) -> Result<Rendered> {
    let (lifetime, source) = match (&args.rates, args.tau) {
        (Some(_), Some(_)) => {
            return Err(Error::invalid("rates", "give either --tau or --rates, not both"))
        }
        (Some(rates), None) => (decay_rate(&DecaySpec::from_rates(rates))?, "rates"),
        (None, tau) => {
            let tau = tau.unwrap_or(1.0);
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(Error::invalid("tau", "lifetime must be positive and finite"));
            }
            (Lifetime::Finite(tau), "tau")
        }
    };
    if args.steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let tau = match lifetime {
        Lifetime::Finite(t) => Some(t),
        Lifetime::Infinite => None,
    };
    let t_max = args.t_max.unwrap_or(5.0 * tau.unwrap_or(1.0));
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("t-max", "must be finite and non-negative"));
    }
    let grid = cfg.grid.resolve([-10.0, 10.0], 2001)?;
    let state = ho_eigenstate(args.n, grid, &cfg.units)?;
    let tol = cfg.tolerances.norm;
    let series = (0..=args.steps)
        .map(|k| {
            let t = t_max * k as f64 / args.steps as f64;
            let psi = state.psi.evolved_phase(state.energy, t);
            let (norm, predicted) = match tau {
                Some(tau) => (metastable_state(&psi, tau, t)?.norm(), (-2.0 * t / tau).exp()),
                None => (psi.norm(), 1.0),
            };
            Ok(DecaySample {
                t,
                norm,
                predicted,
                residual: (norm - predicted).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = series.iter().all(|s| s.residual <= tol);
    let out = DecayOutput {
        header: DecayHeader {
            n: args.n,
            energy: state.energy,
            tau,
            lifetime_source: source,
            tolerance: tol,
        },
        series,
        pass,
    };
    let rows = out
        .series
        .iter()
        .map(|s| vec![fmt6(s.t), fmt6(s.norm), fmt6(s.predicted), fmt6(s.residual)])
        .collect();
    Rendered::new(
        &out,
        Some(serde_json::to_string(&out.header)?),
        &["t", "norm", "predicted", "residual"],
        rows,
        if pass { 0 } else { 1 },
    )
}

#[derive(Debug, Clone, Serialize)]
struct BoltzmannOutput {
    report: BoltzmannReport,
    checks: Vec<Check>,
    pass: bool,
}

pub fn boltzmann(omega: Option<f64>, mass: Option<f64>, dof: usize, cfg: &RunConfig) -> Result<Rendered> {
    let units = cfg.units;
    let omega = omega.unwrap_or(units.omega);
    let mass = mass.unwrap_or(units.mass);
    let report = boltzmann_report(mass, omega, &units, dof)?;
    let tol = &cfg.tolerances;
    let s = &report.special_case;
    const B: &str = "boltzmann";
    let checks = vec![
        Check::holds(B, "equilibrium_point", report.equilibrium.passes),
        Check::near(B, "energy.full_vs_equilibrium", report.energies.e_equilibrium, report.energies.e_full, tol.energy),
        Check::near(B, "energy.lock", s.energy, report.energies.e_equilibrium, tol.energy),
        Check::near(B, "uncertainty_product", s.uncertainty_target, s.uncertainty_product, tol.uncertainty),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let rows = vec![
        ("omega", fmt6(omega)),
        ("mass", fmt6(mass)),
        ("n_dof", dof.to_string()),
        ("kbt_lock", fmt6(s.kbt_lock)),
        ("temperature_lock", fmt6(s.temperature_lock)),
        ("energy", fmt6(s.energy)),
        ("energy_full", fmt6(report.energies.e_full)),
        ("dispersion_per_mass", fmt6(s.dispersion_per_mass)),
        ("momentum_dispersion", fmt6(s.momentum_dispersion)),
        ("position_msd", fmt6(s.position_msd)),
        ("uncertainty_product", fmt6(s.uncertainty_product)),
        ("uncertainty_target", fmt6(s.uncertainty_target)),
        ("low_temperature_pathology", s.low_temperature_pathology.to_string()),
        ("pass", pass.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), v])
    .collect();
    let out = BoltzmannOutput { report, checks, pass };
    Rendered::new(&out, None, &["quantity", "value"], rows, if pass { 0 } else { 1 })
}

#[derive(Debug, Clone, Serialize)]
struct EigenRow {
    n: usize,
    energy: f64,
    reference: f64,
    abs_error: f64,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct EigenOutput {
    window: [f64; 2],
    points: usize,
    tolerance: f64,
    states: Vec<EigenRow>,
    pass: bool,
}

/// Lowest `k` oscillator eigenpairs from the finite-difference solver.
pub fn eigen(k: usize, wavefunctions: Option<&Path>, cfg: &RunConfig) -> Result<Rendered> {
    if k == 0 {
        return Err(Error::invalid("k", "ask for at least one state"));
    }
    let units = cfg.units;
    let grid = cfg.grid.resolve([-10.0, 10.0], 4001)?;
    let v = Field::from_fn(grid, |x| 0.5 * units.mass * units.omega * units.omega * x * x);
    let states = solve_stationary(&v, &units, k)?;
    if let Some(dir) = wavefunctions {
        std::fs::create_dir_all(dir)?;
        for s in &states {
            let file = std::fs::File::create(dir.join(format!("state_{}.csv", s.index)))?;
            write_wavefunction(std::io::BufWriter::new(file), &s.psi, Some(s.energy))?;
        }
    }
    let tol = cfg.tolerances.solver_energy;
    let rows: Vec<EigenRow> = states
        .iter()
        .map(|s| {
            let reference = units.hbar * units.omega * (s.index as f64 + 0.5);
            let abs_error = (s.energy - reference).abs();
            EigenRow {
                n: s.index,
                energy: s.energy,
                reference,
                abs_error,
                pass: abs_error <= tol,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt6(r.energy),
                fmt6(r.reference),
                fmt6(r.abs_error),
                if r.pass { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let out = EigenOutput {
        window: [grid.x_min(), grid.x_max()],
        points: grid.len(),
        tolerance: tol,
        states: rows,
        pass,
    };
    Rendered::new(
        &out,
        None,
        &["n", "energy", "reference", "abs_error", "status"],
        csv_rows,
        if pass { 0 } else { 1 },
    )
}
