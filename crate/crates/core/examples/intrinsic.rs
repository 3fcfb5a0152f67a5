//! Warped-product conditions and the Ricci eigenvector test on a flat and a
//! curved extension.

use extham::catalog;
use extham::intrinsic::{check_extension, check_warp_conditions, extended_metric, extension_ckv};
use extham::Expr;

fn main() -> extham::Result<()> {
    for (name, m, n) in [("ttw", 3, 2), ("sphere", 2, 1)] {
        let ext = catalog::lookup(name, m, n, Expr::one())?.extended()?;
        let rep = check_extension(&ext)?;
        println!("{name}: passed {}", rep.passed);
        for c in &rep.checks {
            println!("    {:<40} {} {}", c.name, c.passed, c.detail);
        }
    }
    let ext = catalog::lookup("ttw", 3, 2, Expr::one())?.extended()?;
    let (g, v) = extended_metric(&ext)?;
    let x = extension_ckv(&ext)?;
    let rep = check_warp_conditions(&g, &x, &(v + Expr::sym("phi")), &ext.sampler())?;
    println!("perturbed potential fails: {:?}", rep.failures());
    Ok(())
}
