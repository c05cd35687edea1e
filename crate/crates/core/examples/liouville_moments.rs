//! Momentum moments of a freely streaming ensemble and the transport equations
//! they obey.

use madelung_lab::families::free_flow;
use madelung_lab::phase_space::{
    continuity_residual, extract_moments, liouville_residual, momentum_dispersion_direct,
    momentum_transport_residual,
};

fn main() -> madelung_lab::Result<()> {
    let (m, t, dt) = (1.3, 0.7, 1e-3);
    let snaps = [free_flow(t - dt, m)?, free_flow(t, m)?, free_flow(t + dt, m)?];
    let refs = [&snaps[0], &snaps[1], &snaps[2]];

    let fields: Vec<_> = snaps.iter().map(extract_moments).collect::<Result<_, _>>()?;
    let mid = &fields[1];
    let direct = momentum_dispersion_direct(&snaps[1], mid)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "x", "rho", "p", "disp", "direct");
    for i in (120..=280).step_by(20) {
        let x = mid.grid().point(i);
        println!(
            "{x:>6.2} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            mid.rho.values()[i],
            mid.momentum.values()[i],
            mid.dispersion.values()[i],
            direct.values()[i]
        );
    }

    let liouville = liouville_residual(refs)?;
    let cont = continuity_residual([&fields[0], &fields[1], &fields[2]], m)?;
    let transport = momentum_transport_residual(refs)?;
    println!("max |Liouville residual|     {:.2e}", liouville.max_abs());
    println!("max |continuity residual|    {:.2e}", cont.max_abs());
    println!("max |momentum transport|     {:.2e}", transport.max_abs());
    Ok(())
}
