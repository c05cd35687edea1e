//! Cross-module checks: a wavefunction, its Madelung fields, its phase-space
//! distribution and the characteristic function built from it must agree.

use std::f64::consts::PI;

use madelung_lab::equilibrium::{table2_solver_crosscheck, GibbsEntropyReport};
use madelung_lab::numerics::{Field, Grid1D};
use madelung_lab::phase_space::{
    continuity_residual, extract_moments, statistical_hamilton_residual, DensityFields, PhaseSpaceDistribution,
};
use madelung_lab::schrodinger_madelung::{evolve, madelung_decompose, qhj_residual, Wavefunction, DEFAULT_DENSITY_FLOOR};
use madelung_lab::wigner_moyal::{
    characteristic_function, factorization_residual, momentum_partition_stats, zq_limit_moments,
};
use madelung_lab::Units;
use num_complex::Complex64;

const AMPLITUDE: f64 = 1.2;

/// Displaced oscillator ground state, exact at time `t` (ħ = m = ω = 1).
fn coherent(grid: Grid1D, t: f64) -> Wavefunction {
    let (xc, pc) = (AMPLITUDE * t.cos(), -AMPLITUDE * t.sin());
    let values = grid
        .points()
        .map(|x| {
            let r = PI.powf(-0.25) * (-(x - xc).powi(2) / 2.0).exp();
            Complex64::from_polar(r, pc * x - 0.5 * xc * pc - 0.5 * t)
        })
        .collect();
    Wavefunction::new(grid, values, t, &Units::natural()).unwrap()
}

fn bulk_max(samples: impl Iterator<Item = (f64, f64)>, centre: f64) -> f64 {
    samples
        .filter(|(x, _)| (x - centre).abs() < 3.0)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
}

#[test]
fn coherent_state_fields_satisfy_hydrodynamics() {
    let g = Grid1D::symmetric(8.0, 1601).unwrap();
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let (t, dt): (f64, f64) = (0.8, 1e-4);
    let fields: Vec<DensityFields> = [t - dt, t, t + dt]
        .iter()
        .map(|&s| {
            let d = madelung_decompose(&coherent(g, s), 1e-300).unwrap();
            let seg = d.single().expect("no nodes").clone();
            assert_eq!(seg.offset, 0);
            DensityFields::from_madelung(&seg).unwrap()
        })
        .collect();
    let refs = [&fields[0], &fields[1], &fields[2]];
    let xc = AMPLITUDE * t.cos();
    let cont = continuity_residual(refs, 1.0).unwrap();
    assert!(bulk_max(cont.samples(), xc) < 1e-6);
    let ham = statistical_hamilton_residual(refs, &v, &Units::natural()).unwrap();
    assert!(bulk_max(ham.samples(), xc) < 1e-5, "{}", bulk_max(ham.samples(), xc));
    // the dispersion is the constant ħ²/2σ² = 1/2
    for (x, d) in fields[1].grid().points().zip(fields[1].dispersion.values()) {
        if (x - xc).abs() < 3.0 {
            assert!((d - 0.5).abs() < 1e-6);
        }
    }
}

#[test]
fn coherent_state_quantum_hamilton_jacobi() {
    let g = Grid1D::symmetric(8.0, 1601).unwrap();
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let (t, dt): (f64, f64) = (0.4, 1e-4);
    let snaps: Vec<_> = [t - dt, t, t + dt]
        .iter()
        .map(|&s| madelung_decompose(&coherent(g, s), 1e-300).unwrap().single().unwrap().clone())
        .collect();
    let res = qhj_residual([&snaps[0], &snaps[1], &snaps[2]], &v).unwrap();
    assert!(bulk_max(res.samples(), AMPLITUDE * t.cos()) < 1e-5);
}

#[test]
fn crank_nicolson_follows_the_exact_orbit() {
    let g = Grid1D::symmetric(10.0, 2001).unwrap();
    let v = Field::from_fn(g, |x| 0.5 * x * x);
    let evolved = evolve(&coherent(g, 0.0), &v, 1e-3, 1000).unwrap();
    let exact = coherent(g, 1.0);
    let overlap = exact.inner(&evolved).unwrap().norm();
    assert!((overlap - 1.0).abs() < 1e-5, "{overlap}");
    assert!((evolved.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn wigner_function_of_coherent_state() {
    // W = e^{-(x - x_c)² - (p - p_c)²} / π
    let t: f64 = 0.6;
    let (xc, pc) = (AMPLITUDE * t.cos(), -AMPLITUDE * t.sin());
    let xg = Grid1D::symmetric(7.0, 561).unwrap();
    let pg = Grid1D::symmetric(8.0, 641).unwrap();
    let v = Field::from_fn(xg, |x| 0.5 * x * x);
    let f = PhaseSpaceDistribution::from_fn_normalized(xg, pg, t, 1.0, v, |x, p| {
        (-(x - xc).powi(2) - (p - pc).powi(2)).exp() / PI
    })
    .unwrap();
    let z = characteristic_function(&f, Grid1D::centered(xg.spacing() * 2.0, 2).unwrap(), 1.0).unwrap();
    assert!(z.hermiticity_defect() < 1e-10);
    let psi = coherent(xg, t);
    let fac = factorization_residual(&z, &psi).unwrap();
    assert!(fac.max_abs() < 1e-8, "{}", fac.max_abs());

    let direct = extract_moments(&f).unwrap();
    let limits = zq_limit_moments(&z).unwrap();
    let stats = momentum_partition_stats(&z).unwrap();
    for (i, s) in stats.iter().enumerate() {
        if direct.rho.values()[i] > 1e-6 {
            assert!((limits.momentum.values()[i] - pc).abs() < 1e-6);
            assert!((s.mean_p - pc).abs() < 1e-6);
            assert!((s.dispersion - 0.5).abs() < 1e-6);
            assert!((direct.dispersion.values()[i] - 0.5).abs() < 1e-8);
        }
    }
}

#[test]
fn gibbs_table_from_solver_states() {
    let rows = table2_solver_crosscheck(6, Grid1D::symmetric(10.0, 4001).unwrap()).unwrap();
    assert_eq!(rows.len(), 7);
    for r in rows {
        assert!((r.analytic - r.solver).abs() < 1e-3, "n = {}", r.n);
    }
}

#[test]
fn gibbs_report_csv_has_five_decimals() {
    let r: GibbsEntropyReport = madelung_lab::equilibrium::table2_report(2).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,G_n,gap");
    assert_eq!(lines[1], "0,-1.07236,");
    assert!(lines[2].starts_with("1,-1.34273,"));
}

#[test]
fn density_floor_controls_segmentation() {
    let g = Grid1D::symmetric(8.0, 801).unwrap();
    let psi = coherent(g, 0.0);
    assert_eq!(madelung_decompose(&psi, DEFAULT_DENSITY_FLOOR).unwrap().segments.len(), 1);
}
