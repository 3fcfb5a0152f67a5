//! Tagged trigonometric functions and the solutions γ(u) of γ' + cγ² + C = 0.

use extham::expr::{rat, ratio, Symbol};
use extham::tagged_trig::{c_kappa, s_kappa, GammaSpec};

fn main() -> extham::Result<()> {
    for kappa in [-1.0, 0.0, 1.0] {
        let x = 0.7;
        let (s, c) = (s_kappa(kappa, x), c_kappa(kappa, x));
        println!("κ = {kappa:>4}: S = {s:.6}, C = {c:.6}, C² + κS² = {:.15}", c * c + kappa * s * s);
    }
    let u = Symbol::new("u");
    for (c, big_c) in [(rat(0), rat(1)), (rat(1), rat(0)), (rat(1), rat(1)), (rat(1), ratio(-1, 4))] {
        let spec = GammaSpec::new(c.clone(), big_c.clone());
        println!(
            "c = {c}, C = {big_c}: γ = {}, ODE residual zero: {}",
            spec.gamma(&u),
            spec.check_ode(&u).is_zero()
        );
    }
    Ok(())
}
