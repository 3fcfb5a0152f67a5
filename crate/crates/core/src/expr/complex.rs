//! Formal complex values `re + i·im` over real expressions.

use std::ops;

use super::{Chart, Expr, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexExpr {
    pub re: Expr,
    pub im: Expr,
}

impl ComplexExpr {
    pub fn new(re: Expr, im: Expr) -> Self {
        ComplexExpr { re, im }
    }

    pub fn real(re: Expr) -> Self {
        ComplexExpr::new(re, Expr::zero())
    }

    pub fn imag(im: Expr) -> Self {
        ComplexExpr::new(Expr::zero(), im)
    }

    pub fn zero() -> Self {
        ComplexExpr::real(Expr::zero())
    }

    pub fn one() -> Self {
        ComplexExpr::real(Expr::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        ComplexExpr::imag(Expr::one())
    }

    pub fn conj(&self) -> Self {
        ComplexExpr::new(self.re.clone(), -&self.im)
    }

    /// `|z|² = re² + im²`.
    pub fn norm_sqr(&self) -> Expr {
        (&self.re * &self.re + &self.im * &self.im).simplify()
    }

    pub fn scale(&self, e: &Expr) -> Self {
        ComplexExpr::new(e * &self.re, e * &self.im)
    }

    pub fn simplify(&self) -> Self {
        ComplexExpr::new(self.re.simplify(), self.im.simplify())
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = ComplexExpr::one();
        for _ in 0..n {
            out = (&out * self).simplify();
        }
        out
    }

    pub fn diff(&self, v: &Symbol) -> Self {
        ComplexExpr::new(self.re.diff_simplified(v), self.im.diff_simplified(v))
    }

    pub fn is_zero_symbolic(&self) -> bool {
        self.re.is_zero_symbolic() && self.im.is_zero_symbolic()
    }

    /// `{self, g}` for a real `g`, computed componentwise.
    pub fn poisson_real(&self, g: &Expr, chart: &Chart) -> Self {
        ComplexExpr::new(
            super::poisson(&self.re, g, chart),
            super::poisson(&self.im, g, chart),
        )
    }
}

impl ops::Add<&ComplexExpr> for &ComplexExpr {
    type Output = ComplexExpr;
    fn add(self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl ops::Sub<&ComplexExpr> for &ComplexExpr {
    type Output = ComplexExpr;
    fn sub(self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl ops::Mul<&ComplexExpr> for &ComplexExpr {
    type Output = ComplexExpr;
    fn mul(self, o: &ComplexExpr) -> ComplexExpr {
        ComplexExpr::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl ops::Neg for &ComplexExpr {
    type Output = ComplexExpr;
    fn neg(self) -> ComplexExpr {
        ComplexExpr::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let z = (&ComplexExpr::i() * &ComplexExpr::i()).simplify();
        assert!(z.re.equivalent(&Expr::int(-1)));
        assert!(z.im.is_zero_symbolic());
    }

    #[test]
    fn modulus_of_product() {
        let a = ComplexExpr::new(Expr::sym("x"), Expr::sym("y"));
        let p = &a * &a.conj();
        assert!(p.im.is_zero_symbolic());
        assert!(p.re.equivalent(&a.norm_sqr()));
    }
}
