//! Canonical oscillator ensembles: normalisation, characteristic function,
//! equilibrium conditions, energies and the factorization order.

use madelung_lab::boltzmann::{
    boltzmann_report, boltzmann_zq, boltzmann_zq_closed_form, equilibrium_conditions, factorization_study,
    CanonicalEnsemble,
};
use madelung_lab::Units;

fn main() -> madelung_lab::Result<()> {
    let units = Units::natural();
    let report = boltzmann_report(1.0, 1.0, &units, 2)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));

    for (kbt, omega, q0) in [(0.5, 1.0, 0.0), (0.5, 1.5, 0.0), (0.5, 1.0, 0.4)] {
        let e = CanonicalEnsemble::harmonic(kbt, &units, vec![1.0], &[omega])?;
        let a = boltzmann_zq(&e, &[q0], &[0.05])?;
        let b = boltzmann_zq_closed_form(&e, &[q0], &[0.05])?;
        let eq = equilibrium_conditions(&e, &[q0])?;
        let study = factorization_study(&e, q0, 0.005, 10)?;
        println!(
            "K_B T = {kbt}, ω = {omega}, q⁰ = {q0}: Z {a:.10} vs {b:.10}; gradient {:.1e}, lock {:.1e}; bridge {}, cubic {}",
            eq.gradient_check[0],
            eq.curvature_lock[0],
            study.bridge.slope.map_or("below noise".into(), |s| format!("order {s:.2}")),
            study.is_cubic()
        );
    }
    Ok(())
}
