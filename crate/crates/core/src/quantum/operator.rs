//! Linear differential operators in `(u, q)` with symbolic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{Expr, Symbol};
use crate::extension::binomial;

/// `Σ a_{ij}(u, q) ∂_u^i ∂_q^j`.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    pub name: String,
    pub u: Symbol,
    pub q: Symbol,
    pub terms: BTreeMap<(u32, u32), Expr>,
    /// Finite-difference order used when the operator is applied on a grid.
    pub order: u8,
}

impl OperatorSpec {
    pub fn zero(name: &str, u: &Symbol, q: &Symbol) -> Self {
        OperatorSpec {
            name: name.to_string(),
            u: u.clone(),
            q: q.clone(),
            terms: BTreeMap::new(),
            order: 2,
        }
    }

    pub fn identity(u: &Symbol, q: &Symbol) -> Self {
        Self::zero("1", u, q).with_term(0, 0, Expr::one())
    }

    /// Multiplication by `f`.
    pub fn multiply(name: &str, u: &Symbol, q: &Symbol, f: Expr) -> Self {
        Self::zero(name, u, q).with_term(0, 0, f)
    }

    pub fn with_term(mut self, i: u32, j: u32, coef: Expr) -> Self {
        self.add_term(i, j, coef);
        self
    }

    pub fn with_order(mut self, order: u8) -> Self {
        self.order = order;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn add_term(&mut self, i: u32, j: u32, coef: Expr) {
        let entry = self.terms.entry((i, j)).or_insert_with(Expr::zero);
        *entry = (&*entry + &coef).simplify();
        if entry.is_literal_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coefficient(&self, i: u32, j: u32) -> Expr {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Expr::zero)
    }

    /// Highest total derivative order.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn depends_on_q(&self) -> bool {
        self.terms
            .iter()
            .any(|(&(_, j), c)| j > 0 || c.depends_on(&self.q))
    }

    pub fn depends_on_u(&self) -> bool {
        self.terms
            .iter()
            .any(|(&(i, _), c)| i > 0 || c.depends_on(&self.u))
    }

    pub fn add(&self, other: &OperatorSpec) -> OperatorSpec {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out.named(format!("{} + {}", self.name, other.name))
    }

    pub fn scale(&self, f: &Expr) -> OperatorSpec {
        let mut out = OperatorSpec::zero(&self.name, &self.u, &self.q).with_order(self.order);
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c * f);
        }
        out
    }

    /// `self - e·1`.
    pub fn shifted(&self, e: &Expr) -> OperatorSpec {
        let mut out = self.clone();
        out.add_term(0, 0, -e);
        out
    }

    /// `self ∘ other`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &OperatorSpec) -> OperatorSpec {
        let mut out = OperatorSpec::zero(&format!("{}∘{}", self.name, other.name), &self.u, &self.q)
            .with_order(self.order.max(other.order));
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                for r in 0..=i {
                    for t in 0..=j {
                        let mut db = b.clone();
                        for _ in 0..(i - r) {
                            db = db.diff(&self.u);
                        }
                        for _ in 0..(j - t) {
                            db = db.diff(&self.q);
                        }
                        if db.is_literal_zero() {
                            continue;
                        }
                        let coef = Expr::num(binomial(i, r) * binomial(j, t)) * a * db;
                        out.add_term(r + k, t + l, coef);
                    }
                }
            }
        }
        out
    }

    /// Apply to a symbolic function of `(u, q)`.
    pub fn apply_expr(&self, f: &Expr) -> Expr {
        Expr::add_all(self.terms.iter().map(|(&(i, j), c)| {
            let mut d = f.clone();
            for _ in 0..i {
                d = d.diff(&self.u);
            }
            for _ in 0..j {
                d = d.diff(&self.q);
            }
            c * d
        }))
        .simplify()
    }

    /// Reduce a one-variable operator modulo the second-order equation
    /// `∂²f = p·∂f + r·f` in `var`, returning `(c₁, c₀)` with
    /// `self ≡ c₁∂ + c₀` on solutions.
    pub fn reduce_mod(&self, var: &Symbol, p: &Expr, r: &Expr) -> (Expr, Expr) {
        let along_u = var == &self.u;
        // coefficient list by order in `var`
        let mut coefs: Vec<Expr> = Vec::new();
        for (&(i, j), c) in &self.terms {
            let k = if along_u { i } else { j } as usize;
            if coefs.len() <= k {
                coefs.resize(k + 1, Expr::zero());
            }
            coefs[k] = &coefs[k] + c;
        }
        // ∂^k f = α_k ∂f + β_k f, with ∂(α∂f + βf) = (α' + αp + β)∂f + (β' + αr)f
        let (mut alpha, mut beta) = (Expr::zero(), Expr::one());
        let (mut c1, mut c0) = (Expr::zero(), Expr::zero());
        for (k, c) in coefs.iter().enumerate() {
            if k > 0 {
                let a2 = (alpha.diff(var) + &alpha * p + &beta).simplify();
                let b2 = (beta.diff(var) + &alpha * r).simplify();
                alpha = a2;
                beta = b2;
            }
            c1 = c1 + c * &alpha;
            c0 = c0 + c * &beta;
        }
        (c1.simplify(), c0.simplify())
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "·∂_{}", self.u)?,
                _ => write!(f, "·∂_{}^{i}", self.u)?,
            }
            match j {
                0 => {}
                1 => write!(f, "·∂_{}", self.q)?,
                _ => write!(f, "·∂_{}^{j}", self.q)?,
            }
        }
        Ok(())
    }
}
