//! The built-in systems and their published forms.

use extham::catalog;
use extham::Expr;

fn main() -> extham::Result<()> {
    for name in catalog::NAMES {
        let e = catalog::lookup(name, 2, 1, Expr::one())?;
        println!("{name}: {}", e.h);
        for (k, v) in &e.params {
            println!("    {k} = {v}");
        }
        for form in e.forms.keys() {
            println!("    form {form}");
        }
        if let Some(r) = e.dictionary_residual() {
            println!("    H matches build_extended: {}", r.is_zero_symbolic());
        }
    }
    Ok(())
}
