//! Numeric evaluation of trees and compiled canonical forms.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::canonical::{rational_to_f64, Atom, Poly};
use super::{Chart, Expr, Func, Node, PhasePoint, Rational, Symbol};
use crate::error::{Error, Result};

fn domain(e: &Expr, reason: &str) -> Error {
    Error::Domain {
        subtree: e.to_string(),
        reason: reason.to_string(),
    }
}

fn real_pow(base: f64, r: &Rational) -> Option<f64> {
    let q = r.denom().to_i64()?;
    let p = r.numer().to_i64()?;
    if q == 1 {
        return Some(base.powi(p as i32));
    }
    if base < 0.0 {
        if q.is_even() {
            return None;
        }
        let mag = (-base).powf(p as f64 / q as f64);
        return Some(if p.is_odd() { -mag } else { mag });
    }
    Some(base.powf(p as f64 / q as f64))
}

impl Expr {
    /// IEEE evaluation. Constant subtrees that reduce to rationals are
    /// evaluated exactly first.
    pub fn eval(&self, pt: &PhasePoint) -> Result<f64> {
        if self.free_symbols().is_empty() && !matches!(self.node(), Node::Num(_)) {
            if let Some(c) = self.to_poly().as_constant() {
                return Ok(rational_to_f64(&c));
            }
        }
        let v = match self.node() {
            Node::Num(r) => rational_to_f64(r),
            Node::Sym(s) => pt.get(s).ok_or_else(|| Error::Unbound(s.to_string()))?,
            Node::Add(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(pt)?;
                }
                acc
            }
            Node::Mul(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.eval(pt)?;
                }
                acc
            }
            Node::Neg(e) => -e.eval(pt)?,
            Node::Recip(e) => {
                let x = e.eval(pt)?;
                if x == 0.0 {
                    return Err(domain(e, "division by zero"));
                }
                1.0 / x
            }
            Node::Pow(e, r) => {
                let x = e.eval(pt)?;
                if x == 0.0 && r.is_negative() {
                    return Err(domain(e, "division by zero"));
                }
                real_pow(x, r).ok_or_else(|| domain(self, "even root of a negative number"))?
            }
            Node::Func(f, e) => {
                let x = e.eval(pt)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(e, "square root of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        Ok(v)
    }
}

#[derive(Clone, Debug)]
enum AtomOp {
    Var(usize),
    Sin(usize),
    Cos(usize),
    Sinh(usize),
    Cosh(usize),
    Exp(usize),
    Root(usize, u32),
    Inv(usize),
}

#[derive(Clone, Debug, Default)]
struct Sum {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

/// A canonical form flattened for fast repeated evaluation.
///
/// Distinct atoms are evaluated once per point in dependency order;
/// the body is a dense list of monomials over atom slots.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    vars: Vec<Symbol>,
    atoms: Vec<AtomOp>,
    sums: Vec<Sum>,
    root: usize,
}

struct Builder {
    vars: Vec<Symbol>,
    var_slot: HashMap<Symbol, usize>,
    atoms: Vec<AtomOp>,
    atom_slot: HashMap<Atom, usize>,
    sums: Vec<Sum>,
    sum_slot: HashMap<Arc<Poly>, usize>,
}

impl Builder {
    fn var(&mut self, s: &Symbol) -> usize {
        if let Some(&i) = self.var_slot.get(s) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(s.clone());
        self.var_slot.insert(s.clone(), i);
        i
    }

    fn sum_arc(&mut self, p: &Arc<Poly>) -> usize {
        if let Some(&i) = self.sum_slot.get(p) {
            return i;
        }
        let i = self.sum(p);
        self.sum_slot.insert(p.clone(), i);
        i
    }

    fn sum(&mut self, p: &Poly) -> usize {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let factors = m
                .factors()
                .iter()
                .map(|(a, e)| (self.atom(a), *e))
                .collect();
            terms.push((rational_to_f64(c), factors));
        }
        self.sums.push(Sum { terms });
        self.sums.len() - 1
    }

    fn atom(&mut self, a: &Atom) -> usize {
        if let Some(&i) = self.atom_slot.get(a) {
            return i;
        }
        let op = match a {
            Atom::Sym(s) => AtomOp::Var(self.var(s)),
            Atom::Sin(x) => AtomOp::Sin(self.sum_arc(x)),
            Atom::Cos(x) => AtomOp::Cos(self.sum_arc(x)),
            Atom::Sinh(x) => AtomOp::Sinh(self.sum_arc(x)),
            Atom::Cosh(x) => AtomOp::Cosh(self.sum_arc(x)),
            Atom::Exp(x) => AtomOp::Exp(self.sum_arc(x)),
            Atom::Root(x, q) => AtomOp::Root(self.sum_arc(x), *q),
            Atom::Inv(x) => AtomOp::Inv(self.sum_arc(x)),
        };
        self.atoms.push(op);
        let i = self.atoms.len() - 1;
        self.atom_slot.insert(a.clone(), i);
        i
    }
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> CompiledPoly {
        let mut b = Builder {
            vars: Vec::new(),
            var_slot: HashMap::new(),
            atoms: Vec::new(),
            atom_slot: HashMap::new(),
            sums: Vec::new(),
            sum_slot: HashMap::new(),
        };
        let root = b.sum(p);
        CompiledPoly {
            vars: b.vars,
            atoms: b.atoms,
            sums: b.sums,
            root,
        }
    }

    pub fn from_expr(e: &Expr) -> CompiledPoly {
        CompiledPoly::new(&e.to_poly())
    }

    /// Symbols read by [`CompiledPoly::eval_slots`], in slot order.
    pub fn variables(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn eval(&self, pt: &PhasePoint) -> Result<f64> {
        let vals: Vec<f64> = self
            .vars
            .iter()
            .map(|s| pt.get(s).ok_or_else(|| Error::Unbound(s.to_string())))
            .collect::<Result<_>>()?;
        self.eval_slots(&vals)
    }

    /// Evaluate with variable values given in [`CompiledPoly::variables`] order.
    pub fn eval_slots(&self, vars: &[f64]) -> Result<f64> {
        // Every atom is pushed after the atoms of its argument, so one
        // forward pass evaluates them in dependency order.
        let atom_vals = self.atom_values(vars)?;
        let mut total = 0.0;
        for (c, factors) in &self.sums[self.root].terms {
            total += c * monomial_value(factors, &atom_vals)?;
        }
        Ok(total)
    }

    /// Value together with the sum of absolute term values, a scale for
    /// judging cancellation.
    pub fn eval_with_scale(&self, pt: &PhasePoint) -> Result<(f64, f64)> {
        let vals: Vec<f64> = self
            .vars
            .iter()
            .map(|s| pt.get(s).ok_or_else(|| Error::Unbound(s.to_string())))
            .collect::<Result<_>>()?;
        let atom_vals = self.atom_values(&vals)?;
        let (mut value, mut scale) = (0.0, 0.0);
        for (c, factors) in &self.sums[self.root].terms {
            let t = c * monomial_value(factors, &atom_vals)?;
            value += t;
            scale += t.abs();
        }
        Ok((value, scale))
    }

    fn atom_values(&self, vars: &[f64]) -> Result<Vec<f64>> {
        let mut atom_vals = vec![0.0; self.atoms.len()];
        let mut sum_vals: Vec<Option<f64>> = vec![None; self.sums.len()];
        for (i, op) in self.atoms.iter().enumerate() {
            atom_vals[i] = self.atom_value(op, vars, &atom_vals, &mut sum_vals)?;
        }
        Ok(atom_vals)
    }

    fn atom_value(
        &self,
        op: &AtomOp,
        vars: &[f64],
        atom_vals: &[f64],
        sum_vals: &mut [Option<f64>],
    ) -> Result<f64> {
        Ok(match *op {
            AtomOp::Var(s) => vars[s],
            AtomOp::Sin(s) => self.sum_value(s, atom_vals, sum_vals).sin(),
            AtomOp::Cos(s) => self.sum_value(s, atom_vals, sum_vals).cos(),
            AtomOp::Sinh(s) => self.sum_value(s, atom_vals, sum_vals).sinh(),
            AtomOp::Cosh(s) => self.sum_value(s, atom_vals, sum_vals).cosh(),
            AtomOp::Exp(s) => self.sum_value(s, atom_vals, sum_vals).exp(),
            AtomOp::Root(s, q) => {
                let x = self.sum_value(s, atom_vals, sum_vals);
                if x < 0.0 {
                    if q % 2 == 0 {
                        return Err(Error::Domain {
                            subtree: format!("root of index {q}"),
                            reason: "even root of a negative number".into(),
                        });
                    }
                    -(-x).powf(1.0 / q as f64)
                } else if q == 2 {
                    x.sqrt()
                } else {
                    x.powf(1.0 / q as f64)
                }
            }
            AtomOp::Inv(s) => {
                let x = self.sum_value(s, atom_vals, sum_vals);
                if x == 0.0 {
                    return Err(Error::Domain {
                        subtree: "reciprocal".into(),
                        reason: "division by zero".into(),
                    });
                }
                1.0 / x
            }
        })
    }

    fn sum_value(&self, s: usize, atoms: &[f64], cache: &mut [Option<f64>]) -> f64 {
        if let Some(v) = cache[s] {
            return v;
        }
        let mut total = 0.0;
        for (c, factors) in &self.sums[s].terms {
            // Inner sums never contain poles of their own atoms at this
            // point: any zero denominator already failed above.
            total += c * monomial_value(factors, atoms).unwrap_or(f64::NAN);
        }
        cache[s] = Some(total);
        total
    }
}

fn monomial_value(factors: &[(usize, i32)], atoms: &[f64]) -> Result<f64> {
    let mut v = 1.0;
    for &(a, e) in factors {
        let x = atoms[a];
        if e < 0 && x == 0.0 {
            return Err(Error::Domain {
                subtree: "monomial".into(),
                reason: "division by zero".into(),
            });
        }
        v *= x.powi(e);
    }
    Ok(v)
}

/// A function together with its compiled gradient over a chart.
#[derive(Clone, Debug)]
pub struct CompiledGradient {
    pub value: CompiledPoly,
    pub partials: Vec<CompiledPoly>,
}

impl CompiledGradient {
    pub fn new(e: &Expr, chart: &Chart) -> CompiledGradient {
        let p = e.to_poly();
        let partials = chart
            .variables()
            .iter()
            .map(|v| CompiledPoly::new(&p.diff(v)))
            .collect();
        CompiledGradient {
            value: CompiledPoly::new(&p),
            partials,
        }
    }

    pub fn gradient(&self, pt: &PhasePoint) -> Result<Vec<f64>> {
        self.partials.iter().map(|d| d.eval(pt)).collect()
    }
}

/// Euclidean norm helper used by residual normalizations.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_evaluates() {
        let e = Expr::sym("q") * Expr::sym("p");
        let pt = PhasePoint::from_pairs([("q", 2.0), ("p", 3.0)]);
        assert_eq!(e.eval(&pt).unwrap(), 6.0);
    }

    #[test]
    fn pole_reports_subtree() {
        let e = (Expr::sym("c") * Expr::sym("u")).recip();
        let pt = PhasePoint::from_pairs([("c", 1.0), ("u", 0.0)]);
        match e.eval(&pt) {
            Err(Error::Domain { subtree, .. }) => assert_eq!(subtree, "c*u"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn compiled_matches_tree() {
        let x = Expr::sym("x");
        let e = x.sin().powi(3) / (Expr::int(2) + x.cos()) + x.powi(2).sqrt() - (x.clone() * 3).exp();
        let c = CompiledPoly::from_expr(&e);
        for i in 1..20 {
            let pt = PhasePoint::from_pairs([("x", 0.13 * i as f64)]);
            let a = e.eval(&pt).unwrap();
            let b = c.eval(&pt).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn negative_under_even_root_is_domain_error() {
        let e = Expr::sym("x").sqrt();
        let pt = PhasePoint::from_pairs([("x", -1.0)]);
        assert!(matches!(e.eval(&pt), Err(Error::Domain { .. })));
        assert!(CompiledPoly::from_expr(&e).eval(&pt).is_err());
    }
}
