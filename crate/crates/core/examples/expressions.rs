//! Parse, differentiate and bracket expressions on a phase-space chart.

use extham::expr::{parse, poisson, Chart, PhasePoint, Symbol};

fn main() -> extham::Result<()> {
    let chart = Chart::named(&[("x", "px"), ("y", "py")])?;
    let h = parse("(px^2 + py^2)/2 + (x^2 + 4*y^2)/2", &chart)?;
    let lx = parse("px^2/2 + x^2/2", &chart)?;
    let fradkin = parse("px*py + 4*x*y", &chart)?;

    println!("H          = {}", h.simplify());
    println!("dH/dx      = {}", h.diff_simplified(&Symbol::new("x")));
    println!("{{H, Lx}}    = {}", poisson(&h, &lx, &chart).simplify());
    // not conserved for the 1:2 oscillator
    println!("{{H, pxpy}}  = {}", poisson(&h, &fradkin, &chart).simplify());

    let pt = PhasePoint::from_pairs([("x", 0.3), ("y", -0.2), ("px", 1.0), ("py", 0.5)]);
    println!("H(pt)      = {}", h.eval(&pt)?);
    Ok(())
}
