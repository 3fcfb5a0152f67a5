//! Canonical form for phase-space functions.
//!
//! A [`Poly`] is a finite sum of rational multiples of [`Monomial`]s, each a
//! product of integer powers of [`Atom`]s. Atoms are symbols, circular and
//! hyperbolic functions, exponentials, `q`-th roots and reciprocals of sums.
//! Normalization enforces:
//!
//! * `Root(B, q)` exponents lie in `1..q` (higher powers are expanded into `B`);
//! * `Inv(P)` exponents are positive;
//! * exponentials are merged into a single `Exp` atom;
//! * for `sin`/`cos` (resp. `sinh`/`cosh`) of the same argument the exponent
//!   pair `(a, b)` is reduced with `c² = 1 ∓ s²` until `b ∈ {0, 1}` or
//!   (`b < 0` and `a ∈ {0, 1}`), which is a basis of the Laurent ring modulo
//!   the Pythagorean relation.
//!
//! On sums of such monomials with only monomial denominators this is a
//! canonical form. With `Inv` atoms present, [`Poly::numerator`] clears them
//! before zero-testing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Interned-by-value name of a variable or parameter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Symbol),
    Sin(Arc<Poly>),
    Cos(Arc<Poly>),
    Sinh(Arc<Poly>),
    Cosh(Arc<Poly>),
    Exp(Arc<Poly>),
    /// Principal `q`-th root of a normalized radicand.
    Root(Arc<Poly>, u32),
    /// Reciprocal of a non-monomial sum with leading coefficient one.
    Inv(Arc<Poly>),
}

impl Atom {
    pub fn depends_on(&self, v: &Symbol) -> bool {
        match self {
            Atom::Sym(s) => s == v,
            Atom::Sin(a)
            | Atom::Cos(a)
            | Atom::Sinh(a)
            | Atom::Cosh(a)
            | Atom::Exp(a)
            | Atom::Root(a, _)
            | Atom::Inv(a) => a.depends_on(v),
        }
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Atom::Sym(s) => {
                out.insert(s.clone());
            }
            Atom::Sin(a)
            | Atom::Cos(a)
            | Atom::Sinh(a)
            | Atom::Cosh(a)
            | Atom::Exp(a)
            | Atom::Root(a, _)
            | Atom::Inv(a) => a.collect_symbols(out),
        }
    }

    /// Trig/hyperbolic partner key: `(argument, is_sine_like, sigma)`.
    fn pythagorean(&self) -> Option<(&Arc<Poly>, bool, i32)> {
        match self {
            Atom::Sin(a) => Some((a, true, 1)),
            Atom::Cos(a) => Some((a, false, 1)),
            Atom::Sinh(a) => Some((a, true, -1)),
            Atom::Cosh(a) => Some((a, false, -1)),
            _ => None,
        }
    }
}

/// Sorted product of atom powers; exponents are never zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    fn from_unsorted(mut v: Vec<(Atom, i32)>) -> Self {
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, i32)> = Vec::with_capacity(v.len());
        for (a, e) in v {
            match out.last_mut() {
                Some((la, le)) if *la == a => *le += e,
                _ => out.push((a, e)),
            }
        }
        out.retain(|(_, e)| *e != 0);
        Monomial(out)
    }

    fn merge(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn exponent_of(&self, atom: &Atom) -> i32 {
        self.0
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Degree in the given symbols (only direct `Sym` factors count).
    pub fn degree_in(&self, syms: &[Symbol]) -> i32 {
        self.0
            .iter()
            .filter_map(|(a, e)| match a {
                Atom::Sym(s) if syms.contains(s) => Some(*e),
                _ => None,
            })
            .sum()
    }

    /// True when no factor needs the rewriting rules.
    fn is_normal(&self) -> bool {
        let mut exp_count = 0;
        for (idx, (a, e)) in self.0.iter().enumerate() {
            match a {
                Atom::Root(_, q) => {
                    if *e < 0 || *e >= *q as i32 {
                        return false;
                    }
                }
                Atom::Inv(_) => {
                    if *e < 0 {
                        return false;
                    }
                }
                Atom::Exp(_) => {
                    exp_count += 1;
                    if *e != 1 || exp_count > 1 {
                        return false;
                    }
                }
                Atom::Sin(arg) | Atom::Sinh(arg) => {
                    let partner = match a {
                        Atom::Sin(_) => Atom::Cos(arg.clone()),
                        _ => Atom::Cosh(arg.clone()),
                    };
                    let b = self.0[idx..]
                        .iter()
                        .find(|(x, _)| *x == partner)
                        .map(|(_, e)| *e)
                        .unwrap_or(0);
                    if !pyth_is_normal(*e, b) {
                        return false;
                    }
                }
                Atom::Cos(arg) | Atom::Cosh(arg) => {
                    let partner = match a {
                        Atom::Cos(_) => Atom::Sin(arg.clone()),
                        _ => Atom::Sinh(arg.clone()),
                    };
                    let s = self.exponent_of(&partner);
                    if !pyth_is_normal(s, *e) {
                        return false;
                    }
                }
                Atom::Sym(_) => {}
            }
        }
        true
    }
}

fn pyth_is_normal(a: i32, b: i32) -> bool {
    (b == 0 || b == 1) || (b < 0 && (a == 0 || a == 1))
}

/// Sum of rational multiples of monomials.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn symbol(s: &Symbol) -> Self {
        Poly::monomial(Rational::one(), Monomial(vec![(Atom::Sym(s.clone()), 1)]))
    }

    /// Monomial that is already known to be normal.
    fn monomial(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn depends_on(&self, v: &Symbol) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(a, _)| a.depends_on(v)))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                a.collect_symbols(out);
            }
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &Poly, s: &Rational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.merge(m2);
                let c = c1 * c2;
                if m.is_normal() {
                    out.add_term(m, c);
                } else {
                    let p = normalize_monomial(c, m);
                    for (mm, cc) in p.terms {
                        out.add_term(mm, cc);
                    }
                }
            }
        }
        out
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Poly {
        let mut out = Poly::zero();
        for p in items {
            out.add_scaled(p, &Rational::one());
        }
        out
    }

    pub fn pow(&self, n: i64) -> Poly {
        if n == 0 {
            return Poly::one();
        }
        if n < 0 {
            return self.invert().pow(-n);
        }
        if let Some((m, c)) = self.single_term() {
            let mono = Monomial(m.0.iter().map(|(a, e)| (a.clone(), e * n as i32)).collect());
            return normalize_monomial(pow_rat(c, n), mono);
        }
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse. Single terms invert exponent-wise, sums
    /// become `Inv` atoms.
    pub fn invert(&self) -> Poly {
        assert!(!self.is_zero(), "inverting the zero polynomial");
        if let Some((m, c)) = self.single_term() {
            let mono = Monomial(m.0.iter().map(|(a, e)| (a.clone(), -e)).collect());
            return normalize_monomial(c.recip(), mono);
        }
        let (lead, prim) = self.primitive();
        let atom = Atom::Inv(Arc::new(prim));
        Poly::monomial(lead.recip(), Monomial(vec![(atom, 1)]))
    }

    /// `self = lead * prim` with the first coefficient of `prim` equal to one.
    fn primitive(&self) -> (Rational, Poly) {
        let lead = self.terms.values().next().cloned().unwrap_or_else(Rational::one);
        let prim = self.scale(&lead.recip());
        (lead, prim)
    }

    /// Rational power `self^(p/q)`.
    pub fn pow_rational(&self, r: &Rational) -> Poly {
        if r.is_integer() {
            return self.pow(r.to_integer().to_i64().expect("exponent too large"));
        }
        if self.is_zero() {
            return Poly::zero();
        }
        let q = r.denom().to_i64().expect("root index too large");
        let p = r.numer().to_i64().expect("exponent too large");
        let (a, rem) = p.div_mod_floor(&q);
        let base_part = self.pow(a);
        let root = root_of(self, q as u32);
        base_part.mul(&root.pow(rem))
    }

    pub fn sin(&self) -> Poly {
        trig_atom(self, TrigKind::Sin)
    }
    pub fn cos(&self) -> Poly {
        trig_atom(self, TrigKind::Cos)
    }
    pub fn sinh(&self) -> Poly {
        trig_atom(self, TrigKind::Sinh)
    }
    pub fn cosh(&self) -> Poly {
        trig_atom(self, TrigKind::Cosh)
    }
    pub fn exp(&self) -> Poly {
        if self.is_zero() {
            return Poly::one();
        }
        Poly::monomial(Rational::one(), Monomial(vec![(Atom::Exp(Arc::new(self.clone())), 1)]))
    }
    pub fn sqrt(&self) -> Poly {
        self.pow_rational(&ratio(1, 2))
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: &Symbol) -> Poly {
        let mut cache: HashMap<Atom, Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (idx, (a, e)) in m.0.iter().enumerate() {
                if !a.depends_on(v) {
                    continue;
                }
                let da = cache
                    .entry(a.clone())
                    .or_insert_with(|| atom_derivative(a, v))
                    .clone();
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.0.clone();
                rest[idx].1 -= 1;
                rest.retain(|(_, e)| *e != 0);
                let coef = c * rat(*e as i64);
                let rest_poly = normalize_monomial(coef, Monomial(rest));
                let contrib = rest_poly.mul(&da);
                out.add_scaled(&contrib, &Rational::one());
            }
        }
        out
    }

    /// Maximum total degree in the given symbols.
    pub fn degree_in(&self, syms: &[Symbol]) -> Option<i32> {
        self.terms.keys().map(|m| m.degree_in(syms)).max()
    }

    /// Coefficients grouped by the exponent vector of `syms`.
    pub fn coefficients_in(&self, syms: &[Symbol]) -> BTreeMap<Vec<i32>, Poly> {
        let mut out: BTreeMap<Vec<i32>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = vec![0; syms.len()];
            let mut rest = Vec::new();
            for (a, e) in &m.0 {
                match a {
                    Atom::Sym(s) if syms.contains(s) => {
                        let i = syms.iter().position(|x| x == s).unwrap();
                        key[i] = *e;
                    }
                    _ => rest.push((a.clone(), *e)),
                }
            }
            out.entry(key)
                .or_default()
                .add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Substitute symbols by polynomials.
    pub fn substitute(&self, map: &HashMap<Symbol, Poly>) -> Poly {
        if map.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<Atom, Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (a, e) in &m.0 {
                let base = cache
                    .entry(a.clone())
                    .or_insert_with(|| substitute_atom(a, map))
                    .clone();
                term = term.mul(&base.pow(*e as i64));
            }
            out.add_scaled(&term, &Rational::one());
        }
        out
    }

    /// Clear every `Inv` denominator. The result vanishes iff `self` does
    /// (on the open set where the cleared denominators are non-zero).
    pub fn numerator(&self) -> Poly {
        let mut current = self.clone();
        // Bounded: each round removes one Inv atom from the top level.
        for _ in 0..64 {
            let inv = current.terms.keys().find_map(|m| {
                m.0.iter().find_map(|(a, _)| match a {
                    Atom::Inv(p) => Some(a.clone()).filter(|_| !p.is_zero()),
                    _ => None,
                })
            });
            let Some(atom) = inv else { break };
            let Atom::Inv(den) = &atom else { unreachable!() };
            let emax = current
                .terms
                .keys()
                .map(|m| m.exponent_of(&atom))
                .max()
                .unwrap_or(0);
            let mut next = Poly::zero();
            for (m, c) in &current.terms {
                let e = m.exponent_of(&atom);
                let rest: Vec<_> = m.0.iter().filter(|(a, _)| *a != atom).cloned().collect();
                let rest_poly = normalize_monomial(c.clone(), Monomial(rest));
                let factor = den.pow((emax - e) as i64);
                next.add_scaled(&rest_poly.mul(&factor), &Rational::one());
            }
            current = next;
        }
        // Negative powers of ordinary atoms do not affect vanishing.
        current
    }

    /// Symbolic zero test on the canonical subring.
    pub fn is_identically_zero(&self) -> bool {
        self.is_zero() || self.numerator().is_zero()
    }

    /// True when the form contains atoms whose mutual relations the
    /// normalizer does not know (roots of sums, nested reciprocals, or
    /// several circular atoms with commensurate arguments).
    pub fn has_uncertified_atoms(&self) -> bool {
        let mut args: Vec<Arc<Poly>> = Vec::new();
        let mut bad = false;
        self.visit_atoms(&mut |a| match a {
            Atom::Sin(x) | Atom::Cos(x) | Atom::Sinh(x) | Atom::Cosh(x) => {
                if !args.iter().any(|y| y == x) {
                    args.push(x.clone());
                }
            }
            Atom::Root(b, _)
                if b.len() > 1 && b.terms.keys().any(|m| m.0.iter().any(|(a, _)| !matches!(a, Atom::Sym(_)))) => {
                    bad = true;
                }
            _ => {}
        });
        if bad {
            return true;
        }
        // Distinct arguments that are rational multiples of each other
        // (sin x vs sin 2x) are related by identities not applied here.
        for i in 0..args.len() {
            for j in (i + 1)..args.len() {
                if proportional(&args[i], &args[j]) {
                    return true;
                }
            }
        }
        false
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                f(a);
                match a {
                    Atom::Sym(_) => {}
                    Atom::Sin(x)
                    | Atom::Cos(x)
                    | Atom::Sinh(x)
                    | Atom::Cosh(x)
                    | Atom::Exp(x)
                    | Atom::Root(x, _)
                    | Atom::Inv(x) => x.visit_atoms(f),
                }
            }
        }
    }

    /// Structural size: total number of atom factors over all terms.
    pub fn size(&self) -> usize {
        self.terms.keys().map(|m| m.0.len() + 1).sum()
    }
}

fn proportional(a: &Poly, b: &Poly) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ratio_: Option<Rational> = None;
    for ((ma, ca), (mb, cb)) in a.terms.iter().zip(b.terms.iter()) {
        if ma != mb {
            return false;
        }
        let r = ca / cb;
        match &ratio_ {
            None => ratio_ = Some(r),
            Some(x) if *x != r => return false,
            _ => {}
        }
    }
    true
}

fn pow_rat(c: &Rational, n: i64) -> Rational {
    if n >= 0 {
        num_traits::pow(c.clone(), n as usize)
    } else {
        num_traits::pow(c.recip(), (-n) as usize)
    }
}

#[derive(Clone, Copy)]
enum TrigKind {
    Sin,
    Cos,
    Sinh,
    Cosh,
}

fn trig_atom(arg: &Poly, kind: TrigKind) -> Poly {
    if arg.is_zero() {
        return match kind {
            TrigKind::Sin | TrigKind::Sinh => Poly::zero(),
            TrigKind::Cos | TrigKind::Cosh => Poly::one(),
        };
    }
    // Odd/even normalization so that the leading coefficient is positive.
    let negative = arg.terms.values().next().map(|c| c.is_negative()).unwrap_or(false);
    let (arg, sign) = if negative {
        let odd = matches!(kind, TrigKind::Sin | TrigKind::Sinh);
        (arg.neg(), if odd { -1 } else { 1 })
    } else {
        (arg.clone(), 1)
    };
    let a = Arc::new(arg);
    let atom = match kind {
        TrigKind::Sin => Atom::Sin(a),
        TrigKind::Cos => Atom::Cos(a),
        TrigKind::Sinh => Atom::Sinh(a),
        TrigKind::Cosh => Atom::Cosh(a),
    };
    Poly::monomial(rat(sign), Monomial(vec![(atom, 1)]))
}

/// Principal root `B^(1/q)`; numeric content is pulled out when it is a
/// perfect power.
fn root_of(base: &Poly, q: u32) -> Poly {
    if let Some(c) = base.as_constant() {
        return constant_root(&c, q);
    }
    // Pull out the absolute value of the leading coefficient.
    let lead = base.terms.values().next().unwrap().abs();
    let prim = base.scale(&lead.recip());
    let outer = constant_root(&lead, q);
    let atom = Atom::Root(Arc::new(prim), q);
    outer.mul(&Poly::monomial(Rational::one(), Monomial(vec![(atom, 1)])))
}

fn constant_root(c: &Rational, q: u32) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    if c.is_one() {
        return Poly::one();
    }
    if c.is_negative() {
        // Even roots of negatives stay opaque; evaluation reports them.
        if q % 2 == 1 {
            return constant_root(&-c, q).neg();
        }
        let atom = Atom::Root(Arc::new(Poly::constant(c.clone())), q);
        return Poly::monomial(Rational::one(), Monomial(vec![(atom, 1)]));
    }
    // c = n/d  ->  (n d^(q-1))^(1/q) / d
    let n = c.numer().clone();
    let d = c.denom().clone();
    let radicand = &n * num_traits::pow(d.clone(), (q - 1) as usize);
    let (outside, inside) = extract_power(&radicand, q);
    let outer = Rational::new(outside, d);
    if inside.is_one() {
        return Poly::constant(outer);
    }
    let atom = Atom::Root(Arc::new(Poly::constant(Rational::from_integer(inside))), q);
    Poly::monomial(outer, Monomial(vec![(atom, 1)]))
}

/// Split `n = a^q * b` with `b` free of small `q`-th powers.
fn extract_power(n: &BigInt, q: u32) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    let mut inside = n.clone();
    if let Some(r) = exact_root(&inside, q) {
        return (r, BigInt::one());
    }
    let mut p = BigInt::from(2);
    let limit = BigInt::from(10_000);
    while p < limit {
        let pq = num_traits::pow(p.clone(), q as usize);
        if pq > inside {
            break;
        }
        while (&inside % &pq).is_zero() {
            inside /= &pq;
            outside *= &p;
        }
        p += 1;
    }
    if let Some(r) = exact_root(&inside, q) {
        return (outside * r, BigInt::one());
    }
    (outside, inside)
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
}

/// Bring an arbitrary exponent map into normal form.
fn normalize_monomial(c: Rational, m: Monomial) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    let m = Monomial::from_unsorted(m.0);
    if m.is_normal() {
        return Poly::monomial(c, m);
    }
    let mut keep: Vec<(Atom, i32)> = Vec::new();
    let mut factors: Vec<Poly> = Vec::new();
    let mut exp_arg = Poly::zero();
    let mut has_exp = false;
    for (a, e) in m.0.iter() {
        match a {
            Atom::Root(b, q) => {
                let q = *q as i32;
                let (whole, rem) = e.div_mod_floor(&q);
                if whole != 0 {
                    factors.push(b.pow(whole as i64));
                }
                if rem != 0 {
                    let g = rem.gcd(&q);
                    if g > 1 {
                        factors.push(root_of(b, (q / g) as u32).pow((rem / g) as i64));
                    } else {
                        keep.push((a.clone(), rem));
                    }
                }
            }
            Atom::Inv(p) if *e < 0 => {
                factors.push(p.pow(-*e as i64));
            }
            Atom::Exp(x) => {
                has_exp = true;
                exp_arg.add_scaled(x, &rat(*e as i64));
            }
            _ => keep.push((a.clone(), *e)),
        }
    }
    if has_exp && !exp_arg.is_zero() {
        keep.push((Atom::Exp(Arc::new(exp_arg)), 1));
    }
    let keep = Monomial::from_unsorted(keep);
    let base = pythagorean_reduce(c, keep);
    factors.into_iter().fold(base, |acc, f| acc.mul(&f))
}

/// Apply the sin/cos and sinh/cosh relations to a monomial whose other
/// factors are already normal.
fn pythagorean_reduce(c: Rational, m: Monomial) -> Poly {
    // Find the first pair violating the normal-form conditions.
    for (a, _) in m.0.iter() {
        let Some((arg, _, sigma)) = a.pythagorean() else {
            continue;
        };
        let (s_atom, c_atom) = if sigma == 1 {
            (Atom::Sin(arg.clone()), Atom::Cos(arg.clone()))
        } else {
            (Atom::Sinh(arg.clone()), Atom::Cosh(arg.clone()))
        };
        let sa = m.exponent_of(&s_atom);
        let cb = m.exponent_of(&c_atom);
        if pyth_is_normal(sa, cb) {
            continue;
        }
        let rest: Vec<(Atom, i32)> = m
            .0
            .iter()
            .filter(|(x, _)| *x != s_atom && *x != c_atom)
            .cloned()
            .collect();
        let sig = rat(sigma as i64);
        let branches: Vec<(i32, i32, Rational)> = if cb >= 2 {
            // c^b = c^(b-2) (1 - sigma s^2)
            vec![(sa, cb - 2, Rational::one()), (sa + 2, cb - 2, -sig.clone())]
        } else if sa >= 2 {
            // b < 0: s^a = sigma s^(a-2) (1 - c^2)
            vec![(sa - 2, cb, sig.clone()), (sa - 2, cb + 2, -sig.clone())]
        } else {
            // a < 0, b < 0: multiply by 1 = c^2 + sigma s^2
            vec![(sa, cb + 2, Rational::one()), (sa + 2, cb, sig.clone())]
        };
        let mut out = Poly::zero();
        for (na, nb, k) in branches {
            let mut f = rest.clone();
            if na != 0 {
                f.push((s_atom.clone(), na));
            }
            if nb != 0 {
                f.push((c_atom.clone(), nb));
            }
            let sub = pythagorean_reduce(&c * k, Monomial::from_unsorted(f));
            out.add_scaled(&sub, &Rational::one());
        }
        return out;
    }
    Poly::monomial(c, m)
}

fn atom_derivative(a: &Atom, v: &Symbol) -> Poly {
    match a {
        Atom::Sym(s) => {
            if s == v {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Atom::Sin(x) => x.cos().mul(&x.diff(v)),
        Atom::Cos(x) => x.sin().neg().mul(&x.diff(v)),
        Atom::Sinh(x) => x.cosh().mul(&x.diff(v)),
        Atom::Cosh(x) => x.sinh().mul(&x.diff(v)),
        Atom::Exp(x) => x.exp().mul(&x.diff(v)),
        Atom::Root(b, q) => {
            // d B^(1/q) = (1/q) B^(1/q) B^(-1) dB
            let me = Poly::monomial(Rational::one(), Monomial(vec![(a.clone(), 1)]));
            me.mul(&b.invert())
                .mul(&b.diff(v))
                .scale(&ratio(1, *q as i64))
        }
        Atom::Inv(p) => {
            let me = Poly::monomial(Rational::one(), Monomial(vec![(a.clone(), 2)]));
            me.mul(&p.diff(v)).neg()
        }
    }
}

fn substitute_atom(a: &Atom, map: &HashMap<Symbol, Poly>) -> Poly {
    match a {
        Atom::Sym(s) => map.get(s).cloned().unwrap_or_else(|| Poly::symbol(s)),
        Atom::Sin(x) => x.substitute(map).sin(),
        Atom::Cos(x) => x.substitute(map).cos(),
        Atom::Sinh(x) => x.substitute(map).sinh(),
        Atom::Cosh(x) => x.substitute(map).cosh(),
        Atom::Exp(x) => x.substitute(map).exp(),
        Atom::Root(b, q) => b.substitute(map).pow_rational(&ratio(1, *q as i64)),
        Atom::Inv(p) => p.substitute(map).invert(),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a ratio of large integers.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(name: &str) -> Poly {
        Poly::symbol(&Symbol::new(name))
    }

    #[test]
    fn pythagorean_collapses_to_one() {
        let x = s("x");
        let p = x.sin().pow(2).add(&x.cos().pow(2));
        assert_eq!(p, Poly::one());
    }

    #[test]
    fn laurent_trig_is_canonical() {
        let x = s("x");
        // cos^2/sin^2 + 1 == 1/sin^2
        let lhs = x.cos().pow(2).mul(&x.sin().pow(-2)).add(&Poly::one());
        assert_eq!(lhs, x.sin().pow(-2));
        // sin^2/cos^2 == 1/cos^2 - 1
        let lhs = x.sin().pow(2).mul(&x.cos().pow(-2));
        assert_eq!(lhs, x.cos().pow(-2).sub(&Poly::one()));
        // 1/(sin^2 cos^2) == 1/sin^2 + 1/cos^2
        let lhs = x.sin().pow(-2).mul(&x.cos().pow(-2));
        assert_eq!(lhs, x.sin().pow(-2).add(&x.cos().pow(-2)));
    }

    #[test]
    fn hyperbolic_relation() {
        let x = s("x");
        let p = x.cosh().pow(2).sub(&x.sinh().pow(2));
        assert_eq!(p, Poly::one());
    }

    #[test]
    fn roots_square_back() {
        let x = s("x");
        let b = x.pow(2).add(&Poly::int(1));
        let r = b.sqrt();
        assert_eq!(r.pow(2), b);
        assert_eq!(Poly::int(8).sqrt(), Poly::int(2).sqrt().scale(&rat(2)));
        assert_eq!(Poly::constant(ratio(1, 4)).sqrt(), Poly::constant(ratio(1, 2)));
    }

    #[test]
    fn inverse_of_sum_cancels_in_numerator() {
        let x = s("x");
        let b = x.pow(2).add(&Poly::int(1));
        let p = b.mul(&b.invert()).sub(&Poly::one());
        assert!(!p.is_zero());
        assert!(p.is_identically_zero());
    }

    #[test]
    fn odd_even_arguments() {
        let x = s("x");
        assert_eq!(x.neg().sin(), x.sin().neg());
        assert_eq!(x.neg().cos(), x.cos());
    }

    #[test]
    fn derivative_rules() {
        let x = s("x");
        let v = Symbol::new("x");
        assert_eq!(x.sin().diff(&v), x.cos());
        assert_eq!(x.pow(-1).diff(&v), x.pow(-2).neg());
        let t = x.sin().mul(&x.cos().invert());
        // d tan = 1/cos^2
        assert_eq!(t.diff(&v), x.cos().pow(-2));
    }

    #[test]
    fn exponentials_merge() {
        let x = s("x");
        assert_eq!(x.exp().mul(&x.neg().exp()), Poly::one());
    }
}
