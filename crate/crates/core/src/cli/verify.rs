use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::config::Tolerances;
use super::report::Check;
use crate::boltzmann::{
    boltzmann_zq, boltzmann_zq_closed_form, energy_relation, factorization_study, ho_special_case,
    CanonicalEnsemble,
};
use crate::equilibrium::{
    entropy_field, fluctuation_model, mean_square_displacement, momentum_dispersion_entropy,
    table2_report,
};
use crate::error::Result;
use crate::families::{canonical_oscillator, cold_oscillator, equivalence_family, free_flow, uniform_drift};
use crate::numerics::{Field, Grid1D, Stencil};
use crate::phase_space::{
    continuity_residual, extract_moments, hamilton_terms, liouville_residual,
    momentum_dispersion_direct, momentum_transport_residual, statistical_bracket, DensityFields,
    FluctuationClosure,
};
use crate::schrodinger_madelung::{
    decay_rate, ho_eigenstate, madelung_decompose, metastable_state, quantum_potential_from_curvature,
    quantum_potential_with, reduced_continuity_residual, solve_stationary, DecaySpec, Lifetime,
    DEFAULT_DENSITY_FLOOR,
};
use crate::units::Units;
use crate::wigner_moyal::{
    characteristic_function, closed_form_dispersion, dispersion_from_zq, factorization_residual,
    CharacteristicFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    PhaseSpace,
    Wigner,
    Equilibrium,
    Schrodinger,
    Boltzmann,
}

impl Suite {
    const ORDER: [Suite; 5] = [
        Suite::PhaseSpace,
        Suite::Wigner,
        Suite::Equilibrium,
        Suite::Schrodinger,
        Suite::Boltzmann,
    ];

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::ORDER.to_vec(),
            s => vec![s],
        }
    }
}

/// Runs the selected suites concurrently and returns their checks in a fixed order.
pub fn run_suites(suite: Suite, tol: &Tolerances) -> Result<Vec<Check>> {
    let parts = suite
        .expand()
        .into_par_iter()
        .map(|s| match s {
            Suite::PhaseSpace => phase_space_suite(tol),
            Suite::Wigner => wigner_suite(tol),
            Suite::Equilibrium => equilibrium_suite(tol),
            Suite::Schrodinger => schrodinger_suite(tol),
            Suite::Boltzmann => boltzmann_suite(tol),
            Suite::All => unreachable!("expanded above"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn worst_where(values: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
}

fn triple<T>(f: impl Fn(f64) -> Result<T>, t: f64, dt: f64) -> Result<[T; 3]> {
    Ok([f(t - dt)?, f(t)?, f(t + dt)?])
}

fn phase_space_suite(tol: &Tolerances) -> Result<Vec<Check>> {
    const S: &str = "phase-space";
    let mut out = Vec::new();
    let mass = 1.3;
    let flow = triple(|t| free_flow(t, mass), 0.7, 1e-3)?;
    let refs = [&flow[0], &flow[1], &flow[2]];
    out.push(Check::below(S, "free_flow.liouville", liouville_residual(refs)?.max_abs(), tol.residual));
    let fields = flow.iter().map(extract_moments).collect::<Result<Vec<_>>>()?;
    let cont = continuity_residual([&fields[0], &fields[1], &fields[2]], mass)?;
    out.push(Check::below(S, "free_flow.continuity", cont.max_abs(), tol.residual));
    out.push(Check::below(S, "free_flow.momentum_transport", momentum_transport_residual(refs)?.max_abs(), tol.residual));

    let canon = triple(canonical_oscillator, 0.0, 1e-2)?;
    let refs = [&canon[0], &canon[1], &canon[2]];
    out.push(Check::below(S, "canonical.liouville", liouville_residual(refs)?.max_abs(), tol.residual));
    out.push(Check::below(S, "canonical.momentum_transport", momentum_transport_residual(refs)?.max_abs(), tol.residual));

    let g = Grid1D::symmetric(6.0, 2401)?;
    let rho = Field::from_fn(g, |x| (-x * x).exp() / PI.sqrt());
    let ground = DensityFields::dispersion_free(rho.clone(), Field::from_fn(g, |_| 0.0), 0.0)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let bracket = statistical_bracket(&ground, &v, &Units::natural())?;
    let spread = worst_where(&bracket.map(|b| b - 0.5).into_values(), |i| rho.values()[i] > 1e-8);
    out.push(Check::below(S, "ground_state.bracket_minus_energy", spread, tol.residual));

    let g = Grid1D::symmetric(4.0, 401)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let cold = triple(|t| cold_oscillator(g, t, 1.0, 1.0), 0.3, 1e-4)?;
    let terms = hamilton_terms([&cold[0], &cold[1], &cold[2]], &v, 1.0, FluctuationClosure::Measured)?;
    out.push(Check::below(S, "cold_oscillator.classical", terms.classical.max_abs(), tol.residual));
    out.push(Check::below(S, "cold_oscillator.quantum_term", terms.statistical.max_abs(), tol.exact_zero));
    let flat = Field::from_fn(g, |_| 0.0);
    let drift = triple(|t| uniform_drift(g, t, 1.0, 0.8), 0.2, 1e-4)?;
    let terms = hamilton_terms([&drift[0], &drift[1], &drift[2]], &flat, 1.0, FluctuationClosure::Measured)?;
    out.push(Check::below(S, "uniform_drift.classical", terms.classical.max_abs(), tol.residual));
    out.push(Check::below(S, "uniform_drift.quantum_term", terms.statistical.max_abs(), tol.exact_zero));
    Ok(out)
}

/// Largest relative gap between the two dispersions where `ρ > 1e-6 max ρ`.
pub fn equivalence_gap(z: &CharacteristicFunction, direct: &Field, rho: &Field) -> Result<f64> {
    let zq = dispersion_from_zq(z)?;
    let cut = 1e-6 * rho.max();
    let rel: Vec<f64> = zq
        .values()
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b) / b)
        .collect();
    Ok(worst_where(&rel, |i| rho.values()[i] > cut))
}

/// δx axis used for the momentum-statistics comparison.
pub fn equivalence_dx_grid() -> Result<Grid1D> {
    Grid1D::centered(0.01, 4)
}

fn wigner_suite(tol: &Tolerances) -> Result<Vec<Check>> {
    const S: &str = "wigner";
    let dx = equivalence_dx_grid()?;
    let family = equivalence_family()?;
    let mut out = family
        .par_iter()
        .map(|(name, f)| {
            let d = extract_moments(f)?;
            let direct = momentum_dispersion_direct(f, &d)?;
            let z = characteristic_function(f, dx, 1.0)?;
            Ok(Check::below(S, format!("equivalence.{name}"), equivalence_gap(&z, &direct, &d.rho)?, tol.dispersion))
        })
        .collect::<Result<Vec<_>>>()?;

    let f = canonical_oscillator(0.0)?;
    let z = characteristic_function(&f, dx, 1.0)?;
    let closed = closed_form_dispersion(&z.density(), 1.0)?;
    let from_z = dispersion_from_zq(&z)?;
    let rho = z.density();
    let rel: Vec<f64> = closed.values().iter().zip(from_z.values()).map(|(a, b)| (a - b) / b).collect();
    out.push(Check::below(
        S,
        "ground_state.closed_form_dispersion",
        worst_where(&rel, |i| rho.values()[i] > 1e-6 * rho.max()),
        tol.dispersion,
    ));
    let psi = ho_eigenstate(0, *f.x_grid(), &Units::natural())?.psi;
    let anchored = Grid1D::centered(2.0 * f.x_grid().spacing(), 1)?;
    let z = characteristic_function(&f, anchored, 1.0)?;
    out.push(Check::below(S, "ground_state.factorization", factorization_residual(&z, &psi)?.max_abs(), tol.residual));
    Ok(out)
}

fn equilibrium_suite(tol: &Tolerances) -> Result<Vec<Check>> {
    const S: &str = "equilibrium";
    let report = table2_report(10)?;
    let mut out = vec![
        Check::near(S, "gibbs.ground_state_closed_form", -(1.0 + PI.ln()) / 2.0, report.levels[0].g, tol.closed_form),
        Check::holds(S, "gibbs.decreasing_with_shrinking_gaps", report.is_monotone_with_shrinking_gaps()),
    ];
    let g = Grid1D::symmetric(4.0, 401)?;
    for var in [0.25, 0.5, 1.3] {
        let rho = Field::from_fn(g, |x| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt());
        let disp = momentum_dispersion_entropy(&rho, 1.0)?;
        let msd = mean_square_displacement(&fluctuation_model(&entropy_field(&rho, 1.0)?)?)?;
        let worst = disp
            .values()
            .iter()
            .zip(msd.values())
            .fold(0.0f64, |m, (d, s)| m.max((d * s - 0.25).abs()));
        out.push(Check::below(S, format!("uncertainty_product.variance_{var}"), worst, tol.uncertainty));
    }
    Ok(out)
}

fn schrodinger_suite(tol: &Tolerances) -> Result<Vec<Check>> {
    const S: &str = "schrodinger";
    let units = Units::natural();
    let mut out = Vec::new();
    let g = Grid1D::symmetric(12.0, 2001)?;
    for n in 0..=5 {
        let s = ho_eigenstate(n, g, &units)?;
        let d = madelung_decompose(&s.psi, DEFAULT_DENSITY_FLOOR)?;
        let mut worst = 0.0f64;
        for seg in &d.segments {
            let curv = s.modulus_curvature(seg.offset..seg.offset + seg.r.len())?;
            let q = quantum_potential_from_curvature(&seg.r, &curv, &units)?;
            for (x, qv) in seg.r.grid().points().zip(q.values()) {
                worst = worst.max((0.5 * x * x + qv - s.energy).abs() / s.energy);
            }
        }
        out.push(Check::below(S, format!("identity.analytic_n{n}"), worst, tol.eigen_analytic));
    }
    let g = Grid1D::symmetric(10.0, 4001)?;
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    for s in solve_stationary(&v, &units, 6)? {
        out.push(Check::near(S, format!("solver.energy_n{}", s.index), s.index as f64 + 0.5, s.energy, tol.solver_energy));
        out.push(Check::below(S, format!("identity.solver_n{}", s.index), solver_identity_gap(&s.psi, &v, s.energy)?, tol.eigen_solver));
    }

    let lifetime = decay_rate(&DecaySpec::from_rates(&[0.5, 0.5]))?;
    out.push(Check::holds(S, "decay.tau_from_rates", lifetime == Lifetime::Finite(1.0)));
    let psi = ho_eigenstate(1, Grid1D::symmetric(10.0, 2001)?, &units)?;
    let tau = 1.0;
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let t = 5.0 * tau * k as f64 / 100.0;
        let phi = metastable_state(&psi.psi.evolved_phase(psi.energy, t), tau, t)?;
        worst = worst.max((phi.norm() - (-2.0 * t / tau).exp()).abs());
    }
    out.push(Check::below(S, "decay.norm", worst, tol.norm));
    let states = triple(|t| metastable_state(&psi.psi.evolved_phase(psi.energy, t), tau, t), 0.5, 1e-4)?;
    let reduced = reduced_continuity_residual([&states[0], &states[1], &states[2]])?;
    out.push(Check::below(S, "decay.reduced_continuity", reduced.max_abs(), tol.continuity));
    Ok(out)
}

/// Largest `|V + Q - E| / |E|` over node-free segments of a solver eigenstate,
/// with `Q` from the same three-point Laplacian the solver uses.
pub fn solver_identity_gap(
    psi: &crate::schrodinger_madelung::Wavefunction,
    potential: &Field,
    energy: f64,
) -> Result<f64> {
    let units = psi.units();
    let d = madelung_decompose(psi, DEFAULT_DENSITY_FLOOR)?;
    let mut worst = 0.0f64;
    for seg in &d.segments {
        let q = quantum_potential_with(&seg.r, &units, Stencil::Second)?;
        for i in 1..seg.r.len() - 1 {
            let total = potential.values()[seg.offset + i] + q.values()[i];
            worst = worst.max((total - energy).abs() / energy.abs());
        }
    }
    Ok(worst)
}

fn boltzmann_suite(tol: &Tolerances) -> Result<Vec<Check>> {
    const S: &str = "boltzmann";
    let units = Units::natural();
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for (kbt, omega) in [(0.5, 1.0), (0.3, 2.0), (2.0, 0.7)] {
        let e = CanonicalEnsemble::harmonic(kbt, &units, vec![1.0], &[omega])?;
        for q in [0.0, 0.4, -1.1] {
            for d in [0.01, 0.05, 0.1] {
                let a = boltzmann_zq(&e, &[q], &[d])?;
                let b = boltzmann_zq_closed_form(&e, &[q], &[d])?;
                worst = worst.max((a - b).abs() / b);
            }
        }
    }
    out.push(Check::below(S, "zq.quadrature_vs_closed_form", worst, tol.closed_form));

    let locked = CanonicalEnsemble::harmonic(0.5, &units, vec![1.0], &[1.0])?;
    let unlocked = CanonicalEnsemble::harmonic(0.5, &units, vec![1.0], &[1.5])?;
    let pass = factorization_study(&locked, 0.0, 0.005, 10)?;
    out.push(Check::holds(S, "iff.passing_point_factorizes", pass.report.passes && pass.is_cubic()));
    let curv = factorization_study(&unlocked, 0.0, 0.005, 10)?;
    out.push(Check::holds(S, "iff.curvature_failure_is_quadratic", !curv.report.passes && !curv.is_cubic()));
    let grad = factorization_study(&locked, 0.4, 0.005, 10)?;
    out.push(Check::holds(S, "iff.gradient_failure_is_quadratic", !grad.report.passes && !grad.is_cubic()));

    let r = energy_relation(&locked, &[0.0])?;
    out.push(Check::near(S, "energy.full_vs_equilibrium", r.e_equilibrium, r.e_full, tol.energy));
    out.push(Check::near(S, "energy.lock", 0.5, r.e_equilibrium, tol.energy));
    let three = CanonicalEnsemble::harmonic(0.5, &units, vec![1.0; 3], &[1.0; 3])?;
    let r = energy_relation(&three, &[0.0; 3])?;
    out.push(Check::near(S, "energy.three_oscillators", 1.5, r.e_full, tol.energy));
    let hc = ho_special_case(1.0, 1.0, &units, 1)?;
    out.push(Check::near(S, "lock.uncertainty_product", hc.uncertainty_target, hc.uncertainty_product, tol.uncertainty));
    out.push(Check::holds(S, "lock.cold_limit_flagged", ho_special_case(1.0, 1e-9, &units, 1)?.low_temperature_pathology));
    Ok(out)
}
