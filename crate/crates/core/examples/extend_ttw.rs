//! Extend the angular TTW seed and generate its characteristic integrals.

use extham::catalog;
use extham::Expr;

fn main() -> extham::Result<()> {
    for (m, n, omega) in [(1, 1, 0), (3, 2, 0), (3, 2, 1)] {
        let ext = catalog::lookup("ttw", m, n, Expr::int(omega))?.extended()?;
        let k = ext.characteristic_integral()?;
        let bracket = ext.bracket(&ext.h, &k.expr);
        println!("k = {m}/{n}, Ω = {omega}");
        println!("  H      = {}", ext.h);
        println!("  route  = {:?}, degree {} in the momenta", k.route, k.momentum_degree);
        println!("  {{H,K}}  = 0: {}", ext.seed.zero_test().run(&bracket).is_zero());
    }

    // the recursive and closed-form constructions agree
    let ext = catalog::lookup("ttw", 2, 3, Expr::zero())?.extended()?;
    let diff = (&ext.k_integral()?.expr - &ext.k_closed_form().expr).simplify();
    println!("recursive K_(2,3) equals closed form: {}", diff.is_zero_symbolic());
    Ok(())
}
