//! Exact action of the operators on separated functions
//! `R(u)·A(q)` with `R = u^a e^{-βu²}·(Laurent polynomial)` and `A` a
//! trigonometric polynomial.
//!
//! Every operator built in [`super::operators`] maps this class to itself,
//! so chains such as `X̂` can be applied without discretization error.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::OperatorSpec;
use crate::error::{Error, Result};
use crate::expr::{Expr, PhasePoint, Symbol};

/// Coefficients below this fraction of the magnitude that produced them are
/// cancellation noise and are dropped.
const CANCEL: f64 = 1e-12;

/// Highest Fourier mode retained when sampling coefficient functions.
const BAND: i32 = 24;

/// Sum with the absolute magnitudes that went into each coefficient.
#[derive(Default)]
struct Acc<K: Ord, V> {
    sum: BTreeMap<K, (V, f64)>,
}

impl<K: Ord + Copy> Acc<K, f64> {
    fn add(&mut self, k: K, v: f64) {
        let e = self.sum.entry(k).or_insert((0.0, 0.0));
        e.0 += v;
        e.1 += v.abs();
    }

    fn finish(self) -> BTreeMap<K, f64> {
        self.sum
            .into_iter()
            .filter(|(_, (v, mag))| v.abs() > CANCEL * mag && *v != 0.0)
            .map(|(k, (v, _))| (k, v))
            .collect()
    }
}

impl<K: Ord + Copy> Acc<K, Complex64> {
    fn add_c(&mut self, k: K, v: Complex64) {
        let e = self.sum.entry(k).or_insert((Complex64::new(0.0, 0.0), 0.0));
        e.0 += v;
        e.1 += v.norm();
    }

    fn finish_c(self) -> BTreeMap<K, Complex64> {
        self.sum
            .into_iter()
            .filter(|(_, (v, mag))| v.norm() > CANCEL * mag && v.norm() != 0.0)
            .map(|(k, (v, _))| (k, v))
            .collect()
    }
}

/// `u^a e^{-βu²} Σ_p c_p u^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Radial {
    pub a: f64,
    pub beta: f64,
    pub poly: BTreeMap<i32, f64>,
}

impl Radial {
    pub fn new(a: f64, beta: f64, poly: BTreeMap<i32, f64>) -> Self {
        Radial { a, beta, poly }
    }

    /// `u^a e^{-βu²} L_n^α(2βu²)`.
    pub fn laguerre(a: f64, beta: f64, n: u32, alpha: f64) -> Self {
        let mut poly = BTreeMap::new();
        for i in 0..=n {
            // (-1)^i C(n+α, n-i) x^i / i!
            let mut binom = 1.0;
            for j in 0..(n - i) {
                binom *= (alpha + f64::from(i) + 1.0 + f64::from(j)) / (f64::from(j) + 1.0);
            }
            let mut fact = 1.0;
            for j in 1..=i {
                fact *= f64::from(j);
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let coef = sign * binom / fact * (2.0 * beta).powi(i as i32);
            poly.insert(2 * i as i32, coef);
        }
        Radial { a, beta, poly }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn eval(&self, u: f64) -> f64 {
        let p: f64 = self.poly.iter().map(|(&k, &c)| c * u.powi(k)).sum();
        u.powf(self.a) * (-self.beta * u * u).exp() * p
    }

    /// `d/du`.
    pub fn derivative(&self) -> Radial {
        let mut acc = Acc::default();
        for (&k, &c) in &self.poly {
            acc.add(k - 1, c * (self.a + f64::from(k)));
            acc.add(k + 1, -2.0 * self.beta * c);
        }
        Radial::new(self.a, self.beta, acc.finish())
    }

    fn times_laurent(&self, l: &BTreeMap<i32, f64>, acc: &mut Acc<i32, f64>) {
        for (&k, &c) in &self.poly {
            for (&p, &d) in l {
                acc.add(k + p, c * d);
            }
        }
    }

    /// `Σ_i ℓ_i(u) ∂^i`, coefficients as Laurent polynomials.
    pub fn apply(&self, op: &[BTreeMap<i32, f64>]) -> Radial {
        let mut acc = Acc::default();
        let mut d = self.clone();
        for (i, l) in op.iter().enumerate() {
            if i > 0 {
                d = d.derivative();
            }
            d.times_laurent(l, &mut acc);
        }
        Radial::new(self.a, self.beta, acc.finish())
    }

    fn same_shape(&self, other: &Radial) -> bool {
        self.a == other.a && self.beta == other.beta
    }

    pub fn scaled(&self, t: f64) -> Radial {
        let poly = self.poly.iter().map(|(&k, &c)| (k, c * t)).filter(|(_, c)| *c != 0.0).collect();
        Radial::new(self.a, self.beta, poly)
    }

    pub fn add(&self, other: &Radial) -> Option<Radial> {
        if !self.same_shape(other) {
            return None;
        }
        let mut acc = Acc::default();
        for (&k, &c) in self.poly.iter().chain(&other.poly) {
            acc.add(k, c);
        }
        Some(Radial::new(self.a, self.beta, acc.finish()))
    }
}

/// `Σ_j c_j e^{ijq}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fourier {
    pub coeffs: BTreeMap<i32, Complex64>,
}

impl Fourier {
    pub fn mode(l: i32) -> Self {
        Fourier {
            coeffs: BTreeMap::from([(l, Complex64::new(1.0, 0.0))]),
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != 0.0 {
            coeffs.insert(0, Complex64::new(c, 0.0));
        }
        Fourier { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.coeffs.len() {
            0 => Some(0.0),
            1 => self.coeffs.get(&0).filter(|c| c.im == 0.0).map(|c| c.re),
            _ => None,
        }
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&j, &c)| c * Complex64::from_polar(1.0, f64::from(j) * q))
            .sum()
    }

    pub fn derivative(&self) -> Fourier {
        let mut acc = Acc::default();
        for (&j, &c) in &self.coeffs {
            acc.add_c(j, c * Complex64::new(0.0, f64::from(j)));
        }
        Fourier { coeffs: acc.finish_c() }
    }

    fn times(&self, other: &Fourier, acc: &mut Acc<i32, Complex64>) {
        for (&j, &c) in &self.coeffs {
            for (&k, &d) in &other.coeffs {
                acc.add_c(j + k, c * d);
            }
        }
    }

    /// `Σ_i F_i(q) ∂^i`.
    pub fn apply(&self, op: &[Fourier]) -> Fourier {
        let mut acc = Acc::default();
        let mut d = self.clone();
        for (i, f) in op.iter().enumerate() {
            if i > 0 {
                d = d.derivative();
            }
            d.times(f, &mut acc);
        }
        Fourier { coeffs: acc.finish_c() }
    }

    /// `t` with `self = t·other`, `t` real.
    fn real_multiple_of(&self, other: &Fourier) -> Option<f64> {
        if self.coeffs.len() != other.coeffs.len() || self.coeffs.keys().ne(other.coeffs.keys()) {
            return None;
        }
        let (k0, c0) = other.coeffs.iter().next()?;
        let t = self.coeffs[k0] / c0;
        if t.im.abs() > 1e-14 * t.norm() {
            return None;
        }
        let ok = self
            .coeffs
            .iter()
            .zip(other.coeffs.values())
            .all(|((_, a), b)| (a - b * t.re).norm() <= 1e-14 * a.norm().max(b.norm() * t.re.abs()));
        ok.then_some(t.re)
    }

    /// Modes other than `target`, as a fraction of the total `ℓ²` norm.
    pub fn leakage(&self, target: i32) -> f64 {
        let total: f64 = self.coeffs.values().map(|c| c.norm_sqr()).sum();
        let off: f64 = self
            .coeffs
            .iter()
            .filter(|(&j, _)| j != target)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        if total == 0.0 {
            0.0
        } else {
            (off / total).sqrt()
        }
    }

    /// Modes `j` with non-negligible weight.
    pub fn support(&self) -> Vec<i32> {
        self.coeffs.keys().copied().collect()
    }
}

/// A sum of products `R_t(u)·A_t(q)`.
#[derive(Clone, Debug)]
pub struct Separated {
    pub terms: Vec<(Radial, Fourier)>,
}

/// Coefficient of `∂_u^i ∂_q^j` split as `Σ_p u^p F_p(q)`.
#[derive(Clone, Debug)]
pub struct SeparatedOp {
    pub terms: Vec<((u32, u32), Vec<(i32, Fourier)>)>,
}

impl Separated {
    pub fn product(r: Radial, a: Fourier) -> Self {
        Separated { terms: vec![(r, a)] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(r, a)| r.is_zero() || a.is_zero())
    }

    pub fn eval(&self, u: f64, q: f64) -> Complex64 {
        self.terms.iter().map(|(r, a)| r.eval(u) * a.eval(q)).sum()
    }

    pub fn scale(&self, s: f64) -> Separated {
        Separated {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.clone(), a.apply(&[Fourier::constant(s)])))
                .collect(),
        }
    }

    pub fn add(&self, other: &Separated) -> Separated {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.compact()
    }

    /// Merge terms with equal angular factors.
    fn compact(self) -> Separated {
        let mut out: Vec<(Radial, Fourier)> = Vec::new();
        for (r, a) in self.terms {
            if r.is_zero() || a.is_zero() {
                continue;
            }
            if let Some((slot, t)) = out
                .iter_mut()
                .filter(|(r0, _)| r0.same_shape(&r))
                .find_map(|s| a.real_multiple_of(&s.1).map(|t| (s, t)))
            {
                slot.0 = slot.0.add(&r.scaled(t)).unwrap();
                continue;
            }
            out.push((r, a));
        }
        out.retain(|(r, _)| !r.is_zero());
        Separated { terms: out }
    }

    pub fn apply(&self, op: &SeparatedOp) -> Separated {
        // purely radial or purely angular operators act factor-wise
        if let Some(radial) = op.radial_part() {
            return Separated {
                terms: self.terms.iter().map(|(r, a)| (r.apply(&radial), a.clone())).collect(),
            }
            .compact();
        }
        if let Some(angular) = op.angular_part() {
            return Separated {
                terms: self.terms.iter().map(|(r, a)| (r.clone(), a.apply(&angular))).collect(),
            }
            .compact();
        }
        let mut out = Vec::new();
        for (r, a) in &self.terms {
            for ((i, j), coef) in &op.terms {
                let mut dr = r.clone();
                for _ in 0..*i {
                    dr = dr.derivative();
                }
                let mut da = a.clone();
                for _ in 0..*j {
                    da = da.derivative();
                }
                for (p, f) in coef {
                    let rp = dr.apply(&[BTreeMap::from([(*p, 1.0)])]);
                    out.push((rp, da.apply(std::slice::from_ref(f))));
                }
            }
        }
        Separated { terms: out }.compact()
    }
}

impl SeparatedOp {
    /// Split every coefficient of `op`. Fails when a coefficient is not a
    /// Laurent polynomial in `u` with trigonometric-polynomial coefficients.
    pub fn from_spec(op: &OperatorSpec) -> Result<Self> {
        let mut terms = Vec::new();
        for (&ij, c) in &op.terms {
            terms.push((ij, split_coefficient(c, &op.u, &op.q)?));
        }
        Ok(SeparatedOp { terms })
    }

    /// Laurent coefficients by order in `∂_u` when the operator acts on `u` only.
    fn radial_part(&self) -> Option<Vec<BTreeMap<i32, f64>>> {
        let max = self.terms.iter().map(|((i, _), _)| *i).max()? as usize;
        let mut out = vec![BTreeMap::new(); max + 1];
        for ((i, j), coef) in &self.terms {
            if *j != 0 {
                return None;
            }
            for (p, f) in coef {
                let c = f.as_constant()?;
                *out[*i as usize].entry(*p).or_insert(0.0) += c;
            }
        }
        Some(out)
    }

    fn angular_part(&self) -> Option<Vec<Fourier>> {
        let max = self.terms.iter().map(|((_, j), _)| *j).max()? as usize;
        let mut out = vec![Fourier::constant(0.0); max + 1];
        for ((i, j), coef) in &self.terms {
            if *i != 0 {
                return None;
            }
            for (p, f) in coef {
                if *p != 0 {
                    return None;
                }
                let mut acc = Acc::default();
                for (&k, &v) in out[*j as usize].coeffs.iter().chain(&f.coeffs) {
                    acc.add_c(k, v);
                }
                out[*j as usize] = Fourier { coeffs: acc.finish_c() };
            }
        }
        Some(out)
    }
}

/// `e = Σ_p u^p F_p(q)` with each `F_p` a trigonometric polynomial.
pub fn split_coefficient(e: &Expr, u: &Symbol, q: &Symbol) -> Result<Vec<(i32, Fourier)>> {
    let poly = e.to_poly();
    let mut out = Vec::new();
    for (key, rest) in poly.coefficients_in(std::slice::from_ref(u)) {
        if rest.depends_on(u) {
            return Err(Error::unsupported(format!(
                "coefficient `{e}` is not a Laurent polynomial in {u}"
            )));
        }
        let f = Expr::from_poly(rest);
        out.push((key[0], sample_fourier(&f, q)?));
    }
    Ok(out)
}

/// Fourier coefficients of a `2π`-periodic function of `q` by FFT; fails
/// when the function is not band-limited to `|j| ≤ BAND`.
pub fn sample_fourier(f: &Expr, q: &Symbol) -> Result<Fourier> {
    let free = f.free_symbols();
    if free.iter().any(|s| s != q) {
        return Err(Error::invalid(format!("coefficient `{f}` has free parameters")));
    }
    if !f.depends_on(q) {
        return Ok(Fourier::constant(f.eval(&PhasePoint::new())?));
    }
    let n = 4 * BAND as usize;
    let mut buf = Vec::with_capacity(n);
    for i in 0..n {
        let mut pt = PhasePoint::new();
        pt.set_symbol(q, 2.0 * PI * i as f64 / n as f64);
        buf.push(Complex64::new(f.eval(&pt)?, 0.0));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale: f64 = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut coeffs = BTreeMap::new();
    for (i, c) in buf.iter().enumerate() {
        let j = if i <= n / 2 { i as i32 } else { i as i32 - n as i32 };
        if c.norm() <= 1e-13 * scale.max(1e-300) {
            continue;
        }
        if j.abs() > BAND {
            return Err(Error::unsupported(format!(
                "coefficient `{f}` is not a trigonometric polynomial"
            )));
        }
        coeffs.insert(j, c / n as f64);
    }
    Ok(Fourier { coeffs })
}
