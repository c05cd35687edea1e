//! Gibbs entropies of the first oscillator levels next to reference values,
//! plus the same numbers from eigensolver densities.

use madelung_lab::equilibrium::{
    metastability_delta, table2_report, table2_solver_crosscheck, REFERENCE_GIBBS_ENTROPIES,
};
use madelung_lab::numerics::Grid1D;

fn main() -> madelung_lab::Result<()> {
    let report = table2_report(10)?;
    println!("{:>3} {:>12} {:>10} {:>10} {:>10}", "n", "G_n", "gap", "reference", "|diff|");
    for l in &report.levels {
        let r = REFERENCE_GIBBS_ENTROPIES[l.n];
        println!(
            "{:>3} {:>12.7} {:>10} {:>10.5} {:>10.2e}",
            l.n,
            l.g,
            l.gap.map_or("-".into(), |g| format!("{g:.5}")),
            r,
            (l.g - r).abs()
        );
    }
    println!("decreasing with shrinking gaps: {}", report.is_monotone_with_shrinking_gaps());

    let g = report.values();
    let d = metastability_delta(g[3], g[1]);
    println!("ΔG(3 → 1) = {:.5}, spontaneous: {}", d.delta, d.metastable_transition);

    println!("\nsolver densities on [-10, 10]:");
    for row in table2_solver_crosscheck(5, Grid1D::symmetric(10.0, 4001)?)? {
        println!("{:>3} analytic {:.7} solver {:.7}", row.n, row.analytic, row.solver);
    }

    report.write_csv(std::io::stdout())?;
    Ok(())
}
