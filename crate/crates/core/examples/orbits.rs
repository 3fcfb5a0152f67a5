//! Integrate TTW trajectories: closed orbits for rational k, a quasi-periodic
//! one for k close to √2. Writes the k = 3/2 trajectory to stdout as CSV
//! when run with `--csv`.

use extham::catalog;
use extham::verification::{integrate, orbit_closure, write_trajectory_csv, Dopri5};
use extham::{Expr, PhasePoint};

fn main() -> extham::Result<()> {
    let start = PhasePoint::from_pairs([("u", 1.0), ("pu", 0.1), ("phi", 1.0), ("pphi", 0.5)]);
    for (m, n) in [(2, 1), (3, 2), (7071, 5000)] {
        let ext = catalog::lookup("ttw", m, n, Expr::one())?.extended()?;
        let traj = integrate(&ext.h, &ext.chart, &start, 200.0, &Dopri5::default(), &[("H", &ext.h)])?;
        let c = orbit_closure(&traj, 1e-3);
        println!(
            "k = {m}/{n}: closed {} period {:?} min distance {:.2e}, energy drift {:.1e}",
            c.closed,
            c.period,
            c.min_distance,
            traj.monitor("H").unwrap().relative_drift()
        );
        if (m, n) == (3, 2) && std::env::args().any(|a| a == "--csv") {
            write_trajectory_csv(&traj, &mut std::io::stdout())?;
        }
    }
    Ok(())
}
