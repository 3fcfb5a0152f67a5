//! Quantum extension of the free circle: spectra, the symmetry X̂ on the two
//! lowest non-annihilated pairs, and the Ĝ⁺ mode shift.

use extham::catalog;
use extham::expr::rat;
use extham::quantum::{composition_identities, l_hat_spectrum, QuantumSystem, Stencil, WarpedConfig};
use extham::Expr;

fn main() -> extham::Result<()> {
    let ext = catalog::circle(1, 1, Expr::frac(9, 8))?.extended()?;
    let sys = QuantumSystem::new(&ext, rat(1))?;
    println!("ω = {}, c_N = {}", sys.omega_value, sys.c_n());
    println!("L̂₀ spectrum (grid): {:?}", l_hat_spectrum(&sys, 256, 5)?);
    for c in composition_identities(&sys)? {
        println!("{:<20} {}", c.name, c.passed);
    }
    // coarse grids keep this example quick; the acceptance run uses 128/256/512
    let cfg = WarpedConfig {
        grids: vec![64, 128, 256],
        ..WarpedConfig::default()
    };
    let (pairs, skipped) = sys.lowest_pairs(2)?;
    println!("{} pairs annihilated by X̂", skipped.len());
    for p in &pairs {
        let rep = sys.warped_symmetry_residual(p, &cfg)?;
        println!("ℓ = {}, n_r = {}, E = {}: passed {}", p.ell, p.n_r, p.energy, rep.passed);
        for c in &rep.checks {
            println!("    {:<22} {:.3e}", c.name, c.value);
        }
    }
    println!("Ĝ⁺ leakage: {:.1e}", sys.ghat_leakage(1, 1024, Stencil::Spectral)?);
    Ok(())
}
