//! Numeric verification: bracket residual, Jacobian rank, drift and
//! single-valuedness, collected in a JSON report.

use extham::catalog;
use extham::expr::Symbol;
use extham::verification::{
    bracket_residual, drift_checks, independence_rank, integrate, single_valuedness_2pi, CheckResult, Dopri5,
    VerificationReport,
};
use extham::{Expr, PhasePoint};

fn main() -> extham::Result<()> {
    let ext = catalog::lookup("ttw", 3, 2, Expr::one())?.extended()?;
    let k = ext.characteristic_integral()?.expr;
    let s = ext.sampler();
    let mut rep = VerificationReport::new("ttw k=3/2", s.seed);
    rep.push(bracket_residual(&ext.h, &k, &ext.chart, &s, 100, 1e-9));
    let rank = independence_rank(&[ext.h.clone(), ext.seed.l.clone(), k.clone()], &ext.chart, &s, 200)?;
    rep.push(CheckResult::outcome("rank", rank.fraction(3) >= 0.95, format!("{:?}", rank.histogram)));
    let start = PhasePoint::from_pairs([("u", 1.0), ("pu", 0.1), ("phi", 1.0), ("pphi", 0.5)]);
    let traj = integrate(&ext.h, &ext.chart, &start, 20.0, &Dopri5::default(), &[("H", &ext.h), ("K", &k)])?;
    for c in drift_checks(&traj, 1e-6) {
        rep.push(c);
    }
    let phi = Symbol::new("phi");
    rep.push(single_valuedness_2pi(&k, &ext.chart, &phi, &s));
    println!("{}", rep.to_json());
    // cos(3φ/2) is not a function on the circle
    let bad = single_valuedness_2pi(&(Expr::frac(3, 2) * Expr::sym("phi")).cos(), &ext.chart, &phi, &s);
    println!("cos(3φ/2): passed {} with jump {:.3}", bad.passed, bad.value);
    Ok(())
}
