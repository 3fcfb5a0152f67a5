//! Exact symbolic kernel for phase-space functions.
//!
//! [`Expr`] is an immutable expression tree. Every node caches the set of
//! symbols it depends on and, once computed, its canonical [`Poly`] form,
//! so repeated simplification is cheap. Differentiation is exact; numeric
//! evaluation happens only in [`Expr::eval`].

mod canonical;
mod chart;
mod complex;
mod eval;
mod parse;
mod zero;

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

pub use canonical::{rat, ratio, rational_from_f64, Atom, Monomial, Poly, Rational, Symbol};
pub use chart::{Chart, PhasePoint};
pub use complex::ComplexExpr;
pub use eval::{norm, CompiledGradient, CompiledPoly};
pub use parse::{parse, parse_with_params};
pub use zero::{ZeroTest, ZeroVerdict};

pub use canonical::rational_to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Expr),
    Recip(Expr),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

struct Inner {
    node: Node,
    free: OnceLock<Arc<BTreeSet<Symbol>>>,
    canon: OnceLock<Arc<Poly>>,
}

/// Immutable symbolic expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(Inner {
            node,
            free: OnceLock::new(),
            canon: OnceLock::new(),
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn num(r: Rational) -> Expr {
        Expr::from_node(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(ratio(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Exact conversion of a finite double (every double is a dyadic rational).
    pub fn float(x: f64) -> Expr {
        Expr::num(rational_from_f64(x).expect("non-finite constant"))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::from_node(Node::Sym(Symbol::new(name)))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr::from_node(Node::Sym(s.clone()))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0.node {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_zero())
    }

    fn is_literal_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    pub fn add_all(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut terms = Vec::new();
        let mut constant = Rational::zero();
        for e in items {
            match &e.0.node {
                Node::Num(r) => constant += r,
                Node::Add(inner) => {
                    for t in inner {
                        match &t.0.node {
                            Node::Num(r) => constant += r,
                            _ => terms.push(t.clone()),
                        }
                    }
                }
                _ => terms.push(e),
            }
        }
        if !constant.is_zero() {
            terms.push(Expr::num(constant));
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::from_node(Node::Add(terms)),
        }
    }

    pub fn mul_all(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut factors = Vec::new();
        let mut constant = Rational::one();
        for e in items {
            match &e.0.node {
                Node::Num(r) => constant *= r,
                Node::Mul(inner) => {
                    for t in inner {
                        match &t.0.node {
                            Node::Num(r) => constant *= r,
                            _ => factors.push(t.clone()),
                        }
                    }
                }
                _ => factors.push(e),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if !constant.is_one() {
            factors.insert(0, Expr::num(constant));
        }
        match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(factors)),
        }
    }

    pub fn neg(&self) -> Expr {
        match &self.0.node {
            Node::Num(r) => Expr::num(-r),
            Node::Neg(inner) => inner.clone(),
            Node::Mul(factors) if factors[0].as_rational().is_some() => {
                let mut v = factors.clone();
                v[0] = Expr::num(-factors[0].as_rational().unwrap());
                Expr::mul_all(v)
            }
            _ => Expr::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn recip(&self) -> Expr {
        match &self.0.node {
            Node::Num(r) if !r.is_zero() => Expr::num(r.recip()),
            Node::Recip(inner) => inner.clone(),
            _ => Expr::from_node(Node::Recip(self.clone())),
        }
    }

    pub fn pow(&self, exponent: Rational) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self.clone();
        }
        if let Node::Num(r) = &self.0.node {
            if exponent.is_integer() && !(r.is_zero() && exponent.is_negative()) {
                let n: i64 = num_traits::ToPrimitive::to_i64(&exponent.to_integer()).unwrap_or(0);
                if n.unsigned_abs() <= 64 {
                    let base = if n < 0 { r.recip() } else { r.clone() };
                    return Expr::num(num_traits::pow(base, n.unsigned_abs() as usize));
                }
            }
        }
        if exponent == -Rational::one() {
            return self.recip();
        }
        Expr::from_node(Node::Pow(self.clone(), exponent))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(rat(n))
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self.clone())
    }
    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self.clone())
    }
    pub fn sinh(&self) -> Expr {
        Expr::apply(Func::Sinh, self.clone())
    }
    pub fn cosh(&self) -> Expr {
        Expr::apply(Func::Cosh, self.clone())
    }
    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self.clone())
    }
    pub fn sqrt(&self) -> Expr {
        match &self.0.node {
            Node::Num(r) if r.is_zero() || r.is_one() => self.clone(),
            _ => Expr::apply(Func::Sqrt, self.clone()),
        }
    }

    /// Symbols this expression actually depends on.
    pub fn free_symbols(&self) -> Arc<BTreeSet<Symbol>> {
        self.0
            .free
            .get_or_init(|| {
                let mut out = BTreeSet::new();
                match &self.0.node {
                    Node::Num(_) => {}
                    Node::Sym(s) => {
                        out.insert(s.clone());
                    }
                    Node::Add(v) | Node::Mul(v) => {
                        for e in v {
                            out.extend(e.free_symbols().iter().cloned());
                        }
                    }
                    Node::Neg(e) | Node::Recip(e) | Node::Pow(e, _) | Node::Func(_, e) => {
                        out.extend(e.free_symbols().iter().cloned());
                    }
                }
                Arc::new(out)
            })
            .clone()
    }

    pub fn depends_on(&self, v: &Symbol) -> bool {
        self.free_symbols().contains(v)
    }

    /// Canonical form (cached).
    pub fn to_poly(&self) -> Arc<Poly> {
        self.0
            .canon
            .get_or_init(|| {
                Arc::new(match &self.0.node {
                    Node::Num(r) => Poly::constant(r.clone()),
                    Node::Sym(s) => Poly::symbol(s),
                    Node::Add(v) => {
                        let polys: Vec<Arc<Poly>> = v.iter().map(|e| e.to_poly()).collect();
                        Poly::sum(polys.iter().map(|p| p.as_ref()))
                    }
                    Node::Mul(v) => v
                        .iter()
                        .fold(Poly::one(), |acc, e| acc.mul(&e.to_poly())),
                    Node::Neg(e) => e.to_poly().neg(),
                    Node::Recip(e) => {
                        let p = e.to_poly();
                        if p.is_zero() {
                            // Division by an identically vanishing expression:
                            // keep the tree as is, evaluation will report it.
                            panic!("reciprocal of identically zero expression `{e}`");
                        }
                        p.invert()
                    }
                    Node::Pow(e, r) => e.to_poly().pow_rational(r),
                    Node::Func(f, e) => {
                        let p = e.to_poly();
                        match f {
                            Func::Sin => p.sin(),
                            Func::Cos => p.cos(),
                            Func::Sinh => p.sinh(),
                            Func::Cosh => p.cosh(),
                            Func::Exp => p.exp(),
                            Func::Sqrt => p.sqrt(),
                        }
                    }
                })
            })
            .clone()
    }

    /// Rebuild a tree from a canonical form; the form is kept as cache.
    pub fn from_poly(p: Poly) -> Expr {
        let tree = poly_to_tree(&p);
        let _ = tree.0.canon.set(Arc::new(p));
        tree
    }

    /// Canonical simplification: expanded sum of monomials with collected
    /// rational coefficients.
    pub fn simplify(&self) -> Expr {
        Expr::from_poly(self.to_poly().as_ref().clone())
    }

    /// Exact partial derivative (unsimplified tree).
    pub fn diff(&self, v: &Symbol) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        match &self.0.node {
            Node::Num(_) => Expr::zero(),
            Node::Sym(s) => {
                if s == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(terms) => Expr::add_all(terms.iter().map(|t| t.diff(v))),
            Node::Mul(factors) => {
                let mut sum = Vec::new();
                for i in 0..factors.len() {
                    let d = factors[i].diff(v);
                    if d.is_literal_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = factors.clone();
                    prod[i] = d;
                    sum.push(Expr::mul_all(prod));
                }
                Expr::add_all(sum)
            }
            Node::Neg(e) => e.diff(v).neg(),
            Node::Recip(e) => {
                // d(1/e) = -e'/e^2
                Expr::mul_all([e.diff(v), e.powi(-2)]).neg()
            }
            Node::Pow(e, r) => Expr::mul_all([
                Expr::num(r.clone()),
                e.pow(r - Rational::one()),
                e.diff(v),
            ]),
            Node::Func(f, e) => {
                let de = e.diff(v);
                let outer = match f {
                    Func::Sin => e.cos(),
                    Func::Cos => e.sin().neg(),
                    Func::Sinh => e.cosh(),
                    Func::Cosh => e.sinh(),
                    Func::Exp => self.clone(),
                    Func::Sqrt => Expr::mul_all([Expr::frac(1, 2), self.recip()]),
                };
                Expr::mul_all([outer, de])
            }
        }
    }

    /// Exact derivative computed on the canonical form.
    pub fn diff_simplified(&self, v: &Symbol) -> Expr {
        Expr::from_poly(self.to_poly().diff(v))
    }

    /// Symbolic zero test on the canonical subring.
    pub fn is_zero_symbolic(&self) -> bool {
        self.to_poly().is_identically_zero()
    }

    /// Canonical structural equality.
    pub fn equivalent(&self, other: &Expr) -> bool {
        self.to_poly().sub(&other.to_poly()).is_identically_zero()
    }

    /// Replace symbols by expressions (result in canonical form).
    pub fn substitute(&self, map: &[(Symbol, Expr)]) -> Expr {
        let m = map
            .iter()
            .map(|(s, e)| (s.clone(), e.to_poly().as_ref().clone()))
            .collect();
        Expr::from_poly(self.to_poly().substitute(&m))
    }

    /// Largest total degree in the given symbols after canonicalization.
    pub fn degree_in(&self, syms: &[Symbol]) -> i32 {
        self.to_poly().degree_in(syms).unwrap_or(0)
    }
}

/// Canonical bracket `{f, g} = Σ ∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q` over every pair
/// of the chart, computed on canonical forms.
pub fn poisson(f: &Expr, g: &Expr, chart: &Chart) -> Expr {
    Expr::from_poly(poisson_poly(&f.to_poly(), &g.to_poly(), chart))
}

pub fn poisson_poly(f: &Poly, g: &Poly, chart: &Chart) -> Poly {
    let mut out = Poly::zero();
    for (q, p) in chart.pairs() {
        let fq = f.diff(q);
        let gp = if fq.is_zero() { Poly::zero() } else { g.diff(p) };
        let fp = f.diff(p);
        let gq = if fp.is_zero() { Poly::zero() } else { g.diff(q) };
        out = out.add(&fq.mul(&gp)).sub(&fp.mul(&gq));
    }
    out
}

/// Hamiltonian vector field of `l` applied to `f`: `X_L(F) = {F, L}`.
pub fn x_flow(l: &Expr, f: &Expr, chart: &Chart) -> Expr {
    poisson(f, l, chart)
}

fn poly_to_tree(p: &Poly) -> Expr {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut factors = vec![Expr::num(c.clone())];
        for (a, e) in m.factors() {
            factors.push(atom_power_to_tree(a, *e));
        }
        terms.push(Expr::mul_all(factors));
    }
    Expr::add_all(terms)
}

fn atom_power_to_tree(a: &Atom, e: i32) -> Expr {
    let (base, scale) = match a {
        Atom::Sym(s) => (Expr::symbol(s), rat(1)),
        Atom::Sin(x) => (poly_to_tree(x).sin(), rat(1)),
        Atom::Cos(x) => (poly_to_tree(x).cos(), rat(1)),
        Atom::Sinh(x) => (poly_to_tree(x).sinh(), rat(1)),
        Atom::Cosh(x) => (poly_to_tree(x).cosh(), rat(1)),
        Atom::Exp(x) => (poly_to_tree(x).exp(), rat(1)),
        Atom::Root(b, q) => {
            if *q == 2 && e == 1 {
                return poly_to_tree(b).sqrt();
            }
            (poly_to_tree(b), ratio(1, *q as i64))
        }
        Atom::Inv(x) => (poly_to_tree(x), rat(-1)),
    };
    let exponent = scale * rat(e as i64);
    if exponent.is_one() {
        base
    } else if exponent == -Rational::one() {
        Expr::from_node(Node::Recip(base))
    } else {
        Expr::from_node(Node::Pow(base, exponent))
    }
}

// Printing: the output re-parses with `parse`.
fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(_) => 1,
        Node::Neg(_) => 2,
        Node::Mul(_) | Node::Recip(_) => 3,
        Node::Num(r) if !r.is_integer() || r.is_negative() => 3,
        Node::Pow(..) => 4,
        _ => 5,
    }
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Node::Sym(s) => write!(f, "{s}"),
            Node::Add(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i == 0 {
                        write_paren(f, t, 2)?;
                        continue;
                    }
                    // Fold a leading negative coefficient into " - ".
                    if let Some(abs) = negated_term(t) {
                        f.write_str(" - ")?;
                        write_paren(f, &abs, 3)?;
                    } else {
                        f.write_str(" + ")?;
                        write_paren(f, t, 2)?;
                    }
                }
                Ok(())
            }
            Node::Mul(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    let needs = match t.node() {
                        Node::Num(r) => i > 0 || !r.is_integer() && factors.len() > 1,
                        _ => prec(t) < 4,
                    };
                    if needs {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
            Node::Neg(e) => {
                f.write_str("-")?;
                write_paren(f, e, 4)
            }
            Node::Recip(e) => {
                f.write_str("1/")?;
                write_paren(f, e, 5)
            }
            Node::Pow(e, r) => {
                write_paren(f, e, 5)?;
                if r.is_integer() && !r.is_negative() {
                    write!(f, "^{}", r.numer())
                } else if r.is_integer() {
                    write!(f, "^({})", r.numer())
                } else {
                    write!(f, "^({}/{})", r.numer(), r.denom())
                }
            }
            Node::Func(func, e) => write!(f, "{}({})", func.name(), e),
        }
    }
}

fn negated_term(t: &Expr) -> Option<Expr> {
    match t.node() {
        Node::Num(r) if r.is_negative() => Some(Expr::num(-r)),
        Node::Neg(inner) => Some(inner.clone()),
        Node::Mul(factors) => match factors[0].node() {
            Node::Num(r) if r.is_negative() => {
                let mut rest = factors.clone();
                rest[0] = Expr::num(-r);
                Some(Expr::mul_all(rest))
            }
            _ => None,
        },
        _ => None,
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, Expr::int(rhs))
            }
        }
        impl ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all([a, b]));
binop!(Sub, sub, |a, b| Expr::add_all([a, b.neg()]));
binop!(Mul, mul, |a, b| Expr::mul_all([a, b]));
binop!(Div, div, |a, b| {
    if b.is_literal_one() {
        a
    } else {
        Expr::mul_all([a, b.recip()])
    }
});

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Self {
        Expr::num(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }

    #[test]
    fn power_rule() {
        let v = Symbol::new("x");
        let d = x().powi(2).diff(&v).simplify();
        assert!(d.equivalent(&(Expr::int(2) * x())));
    }

    #[test]
    fn reciprocal_rule() {
        let c = Expr::sym("c");
        let u = Expr::sym("u");
        let e = (&c * &u).recip();
        let d = e.diff(&Symbol::new("u"));
        let expected = -(&c * u.powi(2)).recip();
        assert!(d.equivalent(&expected));
    }

    #[test]
    fn commutative_cancellation() {
        let (p, q) = (Expr::sym("p"), Expr::sym("q"));
        assert!((&p * &q - &q * &p).is_zero_symbolic());
    }

    #[test]
    fn pythagorean_rule() {
        let e = x().sin().powi(2) + x().cos().powi(2);
        assert_eq!(e.simplify(), Expr::one());
    }

    #[test]
    fn free_symbols_are_tracked() {
        let e = Expr::sym("a") * Expr::sym("x").sin() + Expr::int(3);
        let names: Vec<_> = e.free_symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, vec!["a", "x"]);
    }
}
