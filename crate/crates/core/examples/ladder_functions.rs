//! Classical ladder functions G± of the circle seed and the factorized
//! integrals X± of its extension.

use extham::catalog;
use extham::Expr;

fn main() -> extham::Result<()> {
    let seed = catalog::circle_seed()?;
    let lf = seed.ladder_functions()?;
    println!("regime {:?}", lf.regime);
    println!("G+ = {} + i({})", lf.plus.re, lf.plus.im);
    println!("G- = {} + i({})", lf.minus.re, lf.minus.im);
    let (p, m) = lf.eigen_residuals(&seed);
    println!("X_L G± ∓ f G± vanish: {}", [p.re, p.im, m.re, m.im].iter().all(|e| e.is_zero_symbolic()));

    let ext = catalog::circle(2, 1, Expr::one())?.extended()?;
    let x = ext.factorized_integrals()?;
    let b = x.x_plus.poisson_real(&ext.h, &ext.chart);
    let t = ext.seed.zero_test();
    println!("{{H, X+}} = 0: {}", t.run(&b.re).is_zero() && t.run(&b.im).is_zero());
    Ok(())
}
