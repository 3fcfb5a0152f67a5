//! The quantum extension and its shift/ladder factors.

use num_traits::{Signed, Zero};

use super::OperatorSpec;
use crate::error::{Error, Result};
use crate::expr::{rat, rational_to_f64, Expr, Rational, Symbol};
use crate::extension::{Extended, SeedSystem};

/// Upper/lower sign of `Ĝ±` and `D̂±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `c_N = -ħ²c(N-1)²/8`.
pub fn c_n(hbar: &Rational, c: &Rational, n: usize) -> Rational {
    let nm1 = rat(n as i64 - 1);
    -(hbar * hbar * c * &nm1 * &nm1) / rat(8)
}

/// `L̂ = -(ħ²/2)Δ + V` for a one-dimensional seed, acting on `q`.
pub fn build_l_hat(seed: &SeedSystem, hbar: &Rational, u: &Symbol) -> Result<OperatorSpec> {
    if seed.chart.dof() != 1 {
        return Err(Error::unsupported(format!(
            "the grid backend handles one-dimensional seeds; `{}` has {} degrees of freedom",
            seed.name,
            seed.chart.dof()
        )));
    }
    let q = seed.chart.coords()[0].clone();
    let g = seed.metric.g()[0][0].clone();
    let ginv = seed.metric.inverse()[0][0].clone();
    // Δf = g^{qq}f'' + (1/√g)(√g g^{qq})' f'
    let sqrt_g = g.sqrt();
    let first = ((&sqrt_g * &ginv).diff(&q) / &sqrt_g).simplify();
    let h2 = Expr::num(-(hbar * hbar) / rat(2));
    Ok(OperatorSpec::zero("L̂", u, &q)
        .with_term(0, 2, (&h2 * &ginv).simplify())
        .with_term(0, 1, (&h2 * first).simplify())
        .with_term(0, 0, seed.potential.clone()))
}

/// A one-dimensional seed extended with `γ = 1/(cu)`, quantized.
#[derive(Clone, Debug)]
pub struct QuantumSystem {
    pub seed: SeedSystem,
    pub m: u32,
    pub n: u32,
    pub k: Rational,
    pub c: Rational,
    pub hbar: Rational,
    /// `ω = √(2Ω)`.
    pub omega: Expr,
    pub omega_value: f64,
    /// Base dimension `N`.
    pub dim: usize,
    pub u: Symbol,
    pub q: Symbol,
    /// Ladder function `G` of the seed and its constant `c₁`.
    pub g: Expr,
    pub c1: Expr,
    pub l_hat: OperatorSpec,
}

impl QuantumSystem {
    pub fn new(ext: &Extended, hbar: Rational) -> Result<Self> {
        let seed = &ext.seed;
        if seed.c.is_zero() {
            return Err(Error::unsupported("the quantum extension needs c ≠ 0"));
        }
        if !ext.spec.gamma.big_c.is_zero() || !ext.spec.gamma.shift.is_zero() {
            return Err(Error::unsupported(
                "the quantum extension is defined only for γ = 1/(cu) (C = 0, no shift)",
            ));
        }
        if !seed.c0.is_zero() {
            return Err(Error::unsupported("the quantum extension needs c₀ = 0"));
        }
        if !hbar.is_positive() {
            return Err(Error::invalid("ħ must be positive"));
        }
        let big_omega = ext
            .spec
            .omega
            .simplify()
            .as_rational()
            .cloned()
            .ok_or_else(|| Error::invalid("the quantum extension needs a numeric Ω"))?;
        if big_omega.is_zero() {
            return Err(Error::invalid("ω = 0: D̂ divides by ω"));
        }
        if big_omega.is_negative() {
            return Err(Error::invalid("Ω must be positive"));
        }
        let omega = (Expr::int(2) * Expr::num(big_omega.clone())).sqrt().simplify();
        let omega_value = (2.0 * rational_to_f64(&big_omega)).sqrt();
        let u = ext.u_symbol().clone();
        let l_hat = build_l_hat(seed, &hbar, &u)?;
        let q = l_hat.q.clone();
        let (g, c1) = match &seed.ladder {
            Some(l) => (l.g.clone(), l.c1.clone()),
            None => {
                if seed.chart.momenta().iter().any(|p| seed.g.depends_on(p)) {
                    return Err(Error::unsupported(format!(
                        "seed `{}` has no momentum-free ladder function",
                        seed.name
                    )));
                }
                (seed.g.clone(), Expr::zero())
            }
        };
        Ok(QuantumSystem {
            seed: seed.clone(),
            m: ext.spec.m,
            n: ext.spec.n,
            k: ext.spec.k(),
            c: seed.c.clone(),
            hbar,
            omega,
            omega_value,
            dim: 1,
            u,
            q,
            g,
            c1,
            l_hat,
        })
    }

    fn hb(&self) -> Expr {
        Expr::num(self.hbar.clone())
    }

    fn c_e(&self) -> Expr {
        Expr::num(self.c.clone())
    }

    fn ue(&self) -> Expr {
        Expr::symbol(&self.u)
    }

    fn sqrt_2c(&self) -> Expr {
        Expr::num(rat(2) * self.c.abs()).sqrt()
    }

    pub fn c_n(&self) -> Rational {
        c_n(&self.hbar, &self.c, self.dim)
    }

    /// `s = √(|c|/2)ħ`.
    pub fn s(&self) -> Expr {
        (Expr::num(self.c.abs() / rat(2)).sqrt() * self.hb()).simplify()
    }

    pub fn s_value(&self) -> f64 {
        (rational_to_f64(&self.c).abs() / 2.0).sqrt() * rational_to_f64(&self.hbar)
    }

    /// `δ = ħcω`.
    pub fn delta(&self) -> Expr {
        (self.hb() * self.c_e() * &self.omega).simplify()
    }

    pub fn delta_value(&self) -> f64 {
        rational_to_f64(&self.hbar) * rational_to_f64(&self.c) * self.omega_value
    }

    /// `-(ħ²/2)(∂²_u + (N/u)∂_u)`.
    fn radial_kinetic(&self) -> OperatorSpec {
        let h2 = Expr::num(-(&self.hbar * &self.hbar) / rat(2));
        OperatorSpec::zero("T_u", &self.u, &self.q)
            .with_term(2, 0, h2.clone())
            .with_term(1, 0, (h2 * Expr::int(self.dim as i64) / self.ue()).simplify())
    }

    /// `1/(cu²)`.
    fn inv_cu2(&self) -> Expr {
        (self.c_e() * self.ue().powi(2)).recip().simplify()
    }

    /// `W = (ω²/2)c²u² + c_N(k²+1)/(cu²)`.
    fn w(&self) -> Expr {
        let k2 = Expr::num(&self.k * &self.k);
        (&self.omega.powi(2) / Expr::int(2) * self.c_e().powi(2) * self.ue().powi(2)
            + Expr::num(self.c_n()) * (k2 + Expr::one()) * self.inv_cu2())
        .simplify()
    }

    /// `Ĥ = -(ħ²/2)(∂²_u + (N/u)∂_u) + (k²/(cu²))L̂₀ + (ω²/2)c²u² + c_N(k²+1)/(cu²)`.
    pub fn h_hat(&self) -> OperatorSpec {
        let k2 = Expr::num(&self.k * &self.k);
        let angular = self.l_hat.scale(&(k2 * self.inv_cu2()).simplify());
        self.radial_kinetic()
            .add(&angular)
            .add(&OperatorSpec::multiply("W", &self.u, &self.q, self.w()))
            .named("Ĥ")
    }

    /// `Ĥ^M = -(ħ²/2)(∂²_u + (N/u)∂_u) + M/(cu²) + W`.
    pub fn h_m_hat(&self, m: &Expr) -> OperatorSpec {
        let pot = (m * self.inv_cu2() + self.w()).simplify();
        self.radial_kinetic()
            .add(&OperatorSpec::multiply("V_M", &self.u, &self.q, pot))
            .named(format!("Ĥ^{{{m}}}"))
    }

    /// `Ĝ±_ε = ∇G·∇ + a₁±G + a₂±` with `a = 1`.
    pub fn ghat(&self, eps: &Expr, sign: Sign) -> Result<OperatorSpec> {
        let sg = Expr::int(sign.value());
        let a1 = (self.c_e() * Expr::int(1 - self.dim as i64) / Expr::int(2)
            - &sg * eps * self.sqrt_2c() / self.hb())
        .simplify();
        let denom = (-(self.c_e()) * self.hb().powi(2)
            + &sg * Expr::int(2) * self.hb() * eps * self.sqrt_2c())
        .simplify();
        if let Ok(v) = denom.eval(&Default::default()) {
            if v.abs() < 1e-14 {
                return Err(Error::Numerical(format!(
                    "Ĝ{}_ε is singular at ε = {eps}: -cħ² ± 2ħε√(2|c|) = 0",
                    sign.symbol()
                )));
            }
        }
        let a2 = if self.c1.is_literal_zero() {
            Expr::zero()
        } else {
            (Expr::int(-2) * &self.c1 / denom).simplify()
        };
        let ginv = self.seed.metric.inverse()[0][0].clone();
        let grad = (ginv * self.g.diff(&self.q)).simplify();
        Ok(OperatorSpec::zero(&format!("Ĝ{}_{{{eps}}}", sign.symbol()), &self.u, &self.q)
            .with_term(0, 1, grad)
            .with_term(0, 0, (a1 * &self.g + a2).simplify()))
    }

    /// Factors of `(Ĝ±_ε)^n` in application order: `ε, ε ± s, …`.
    pub fn ghat_chain(&self, eps: &Expr, sign: Sign, n: u32) -> Result<Vec<OperatorSpec>> {
        (0..n)
            .map(|j| {
                let e = (eps + Expr::int(sign.value() * j as i64) * self.s()).simplify();
                self.ghat(&e, sign)
            })
            .collect()
    }

    /// `(Ĝ±_ε)^n` as a single operator.
    pub fn ghat_power(&self, eps: &Expr, sign: Sign, n: u32) -> Result<OperatorSpec> {
        Ok(compose_chain(&self.ghat_chain(eps, sign, n)?, &self.u, &self.q))
    }

    /// `Â^{σ,τ}_μ = ∂_u + (1/ħ)[σωcu + (ħc(N-1) - 2τ√(2|c|)μ)/(2cu)]`.
    pub fn ahat(&self, sigma: Sign, tau: Sign, mu: &Expr) -> OperatorSpec {
        let c = self.c_e();
        let u = self.ue();
        let inner = Expr::int(sigma.value()) * &self.omega * &c * &u
            + (self.hb() * &c * Expr::int(self.dim as i64 - 1)
                - Expr::int(2 * tau.value()) * self.sqrt_2c() * mu)
                / (Expr::int(2) * &c * &u);
        OperatorSpec::zero(
            &format!("Â^{{{},{}}}_{{{mu}}}", sigma.symbol(), tau.symbol()),
            &self.u,
            &self.q,
        )
        .with_term(1, 0, Expr::one())
        .with_term(0, 0, (inner / self.hb()).simplify())
    }

    /// Factors of `(Â^{σ,τ}_μ)^m` in application order: `μ, μ + τs, …`.
    pub fn ahat_chain(&self, sigma: Sign, tau: Sign, mu: &Expr, m: u32) -> Vec<OperatorSpec> {
        (0..m)
            .map(|j| {
                let mj = (mu + Expr::int(tau.value() * j as i64) * self.s()).simplify();
                self.ahat(sigma, tau, &mj)
            })
            .collect()
    }

    pub fn ahat_power(&self, sigma: Sign, tau: Sign, mu: &Expr, m: u32) -> OperatorSpec {
        compose_chain(&self.ahat_chain(sigma, tau, mu, m), &self.u, &self.q)
    }

    /// `D̂±_E = (ħ/√2)u∂_u + ħ(N+1)/(2√2) ± (E/(√2cω) - (ω/√2)cu²)`.
    pub fn dhat(&self, sign: Sign, e: &Expr) -> OperatorSpec {
        let s2 = Expr::int(2).sqrt();
        let c = self.c_e();
        let u = self.ue();
        let shift = e / (&s2 * &c * &self.omega) - &self.omega / &s2 * &c * u.powi(2);
        let scalar = self.hb() * Expr::int(self.dim as i64 + 1) / (Expr::int(2) * &s2)
            + Expr::int(sign.value()) * shift;
        OperatorSpec::zero(&format!("D̂{}_{{{e}}}", sign.symbol()), &self.u, &self.q)
            .with_term(1, 0, (self.hb() / &s2 * u).simplify())
            .with_term(0, 0, scalar.simplify())
    }

    /// Factors of `(D̂±_E)^m` in application order: `E, E ± 2δ, …`.
    pub fn dhat_chain(&self, sign: Sign, e: &Expr, m: u32) -> Vec<OperatorSpec> {
        (0..m)
            .map(|j| {
                let ej = (e + Expr::int(2 * sign.value() * j as i64) * self.delta()).simplify();
                self.dhat(sign, &ej)
            })
            .collect()
    }

    pub fn dhat_power(&self, sign: Sign, e: &Expr, m: u32) -> OperatorSpec {
        compose_chain(&self.dhat_chain(sign, e, m), &self.u, &self.q)
    }

    /// Factors of `X̂ = (Ĝ⁺_ε)^{2n}∘(Â^{1,1}_{kε})^{2m}∘(D̂⁺_E)^m` in
    /// application order (the `D̂` factors first).
    pub fn x_hat_chain(&self, eps: &Expr, e: &Expr) -> Result<Vec<OperatorSpec>> {
        let mu = (Expr::num(self.k.clone()) * eps).simplify();
        let mut chain = self.dhat_chain(Sign::Plus, e, self.m);
        chain.extend(self.ahat_chain(Sign::Plus, Sign::Plus, &mu, 2 * self.m));
        chain.extend(self.ghat_chain(eps, Sign::Plus, 2 * self.n)?);
        Ok(chain)
    }

    /// `(M, ε)` for the eigenvalue `λ` of `L̂₀`: `M = k²(λ + c_N)`,
    /// `ε = √|λ + c_N|`. Fails when `c(λ + c_N) < 0`.
    pub fn theorem_parameters(&self, lambda: f64) -> Result<(f64, f64)> {
        let shifted = lambda + rational_to_f64(&self.c_n());
        if rational_to_f64(&self.c) * shifted < -1e-12 {
            return Err(Error::invalid(format!(
                "c(λ + c_N) < 0 for λ = {lambda}: outside the theorem's hypothesis"
            )));
        }
        let k = rational_to_f64(&self.k);
        Ok((k * k * shifted, shifted.abs().sqrt()))
    }
}

/// `ops[last] ∘ … ∘ ops[0]`.
pub fn compose_chain(ops: &[OperatorSpec], u: &Symbol, q: &Symbol) -> OperatorSpec {
    let mut out = OperatorSpec::identity(u, q);
    for op in ops {
        out = op.compose(&out);
    }
    let names: Vec<&str> = ops.iter().rev().map(|o| o.name.as_str()).collect();
    out.named(names.join("∘"))
}
