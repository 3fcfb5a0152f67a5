//! Classical ladder functions and factorized first integrals.
//!
//! `f = √(-2(cL + c₀))` is handled through the real quantity
//! `ρ = √(2σ(cL + c₀))` with `σ = sign(c)` (or `sign(c₀)` when `c = 0`):
//! `f = iρ` when `σ = 1` and `f = ρ` when `σ = -1`. All results are pairs of
//! real expressions for the real and imaginary parts.

use num_traits::{Signed, Zero};

use super::{Extended, FirstIntegral, Route, SeedSystem};
use crate::error::{Error, Result};
use crate::expr::{ComplexExpr, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderRegime {
    /// `c(L) + c₀ > 0` on the physical region: `f` imaginary.
    Imaginary,
    /// `f` real.
    Real,
}

impl LadderRegime {
    fn of(seed: &SeedSystem) -> Result<Self> {
        let s = if !seed.c.is_zero() { &seed.c } else { &seed.c0 };
        if s.is_zero() {
            return Err(Error::InvalidSeed("c and c0 are both zero".into()));
        }
        Ok(if s.is_positive() {
            LadderRegime::Imaginary
        } else {
            LadderRegime::Real
        })
    }

    fn sigma(self) -> i64 {
        match self {
            LadderRegime::Imaginary => 1,
            LadderRegime::Real => -1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LadderFunctions {
    pub regime: LadderRegime,
    /// `ρ = √(2σ(cL + c₀))`.
    pub rho: Expr,
    pub f: ComplexExpr,
    pub plus: ComplexExpr,
    pub minus: ComplexExpr,
}

impl SeedSystem {
    /// `ρ` and `f` for this seed.
    pub fn ladder_f(&self) -> Result<(LadderRegime, Expr, ComplexExpr)> {
        let regime = LadderRegime::of(self)?;
        let rho = (Expr::int(2 * regime.sigma()) * self.cl_c0()).sqrt().simplify();
        let f = match regime {
            LadderRegime::Imaginary => ComplexExpr::imag(rho.clone()),
            LadderRegime::Real => ComplexExpr::real(rho.clone()),
        };
        Ok((regime, rho, f))
    }

    /// `G± = ±(∇G)^i p_i + Gf + c₁/f`, after checking the Hessian equation
    /// and VE1 for the ladder data.
    pub fn ladder_functions(&self) -> Result<LadderFunctions> {
        let ladder = self
            .ladder
            .as_ref()
            .ok_or_else(|| Error::unsupported(format!("seed `{}` has no ladder data", self.name)))?;
        for row in self.hessian_residual(&ladder.g)? {
            for e in row {
                if !self.zero_test().run(&e).is_zero() {
                    return Err(Error::InvalidSeed(format!("Hessian equation residual {e}")));
                }
            }
        }
        let ve1 = self.ve1_residual()?;
        if !self.zero_test().run(&ve1).is_zero() {
            return Err(Error::InvalidSeed(format!("VE1 residual {ve1}")));
        }
        let (regime, rho, f) = self.ladder_f()?;
        let grad = self.metric.gradient(&ladder.g);
        let flux = Expr::add_all(
            grad.iter()
                .zip(self.chart.momenta())
                .map(|(gi, p)| gi * Expr::symbol(p)),
        )
        .simplify();
        let g = &ladder.g;
        let c1 = &ladder.c1;
        let (plus, minus) = match regime {
            LadderRegime::Imaginary => {
                // 1/f = -i/ρ
                let im = (g * &rho - c1 / &rho).simplify();
                (
                    ComplexExpr::new(flux.clone(), im.clone()),
                    ComplexExpr::new(-&flux, im),
                )
            }
            LadderRegime::Real => {
                let common = (g * &rho + c1 / &rho).simplify();
                (
                    ComplexExpr::real((&flux + &common).simplify()),
                    ComplexExpr::real((-&flux + &common).simplify()),
                )
            }
        };
        Ok(LadderFunctions {
            regime,
            rho,
            f,
            plus,
            minus,
        })
    }
}

impl LadderFunctions {
    /// `X_L(G±) ∓ f·G±` for both signs.
    pub fn eigen_residuals(&self, seed: &SeedSystem) -> (ComplexExpr, ComplexExpr) {
        let res = |g: &ComplexExpr, sign: i64| {
            let xg = g.poisson_real(&seed.l, &seed.chart);
            let fg = (&self.f * g).scale(&Expr::int(sign));
            (&xg - &fg).simplify()
        };
        (res(&self.plus, 1), res(&self.minus, -1))
    }

    /// `G⁺·G⁻`, a first integral of `L`.
    pub fn product(&self) -> ComplexExpr {
        (&self.plus * &self.minus).simplify()
    }
}

/// `X± = (G±)^{2n}(A∓)^{2m}(D±)^m` and their building blocks.
#[derive(Clone, Debug)]
pub struct FactorizedIntegrals {
    pub ladder: LadderFunctions,
    /// `ω = √(2Ω)`.
    pub omega: Expr,
    /// `M² = 2k²(cL + c₀)`.
    pub m_squared: Expr,
    pub m: ComplexExpr,
    pub a_plus: ComplexExpr,
    pub a_minus: ComplexExpr,
    pub d_plus: ComplexExpr,
    pub d_minus: ComplexExpr,
    pub x_plus: ComplexExpr,
    pub x_minus: ComplexExpr,
}

impl FactorizedIntegrals {
    /// Real first integrals derived from `X±`: `Re X⁺`, `Im X⁺`, and
    /// `X⁺X⁻` (real part).
    pub fn real_integrals(&self, ext: &Extended) -> Vec<FirstIntegral> {
        let prod = (&self.x_plus * &self.x_minus).simplify();
        vec![
            FirstIntegral::new(self.x_plus.re.clone(), Route::FactorizedPlus, &ext.chart, (ext.spec.m, ext.spec.n)),
            FirstIntegral::new(self.x_plus.im.clone(), Route::FactorizedPlus, &ext.chart, (ext.spec.m, ext.spec.n)),
            FirstIntegral::new(self.x_minus.re.clone(), Route::FactorizedMinus, &ext.chart, (ext.spec.m, ext.spec.n)),
            FirstIntegral::new(prod.re, Route::FactorizedMinus, &ext.chart, (ext.spec.m, ext.spec.n)),
        ]
    }
}

impl Extended {
    /// `H = ½p_u² + ½(γ² + C/c)M² + ω²/(2γ²) - (C/c)k²c₀`.
    pub fn m_form(&self) -> Result<Expr> {
        if self.seed.c.is_zero() {
            return Err(Error::unsupported("the M-form needs c ≠ 0"));
        }
        let kappa = Expr::num(&self.spec.gamma.big_c / &self.seed.c);
        let k2 = Expr::num(self.spec.k() * self.spec.k());
        let m2 = Expr::int(2) * &k2 * self.seed.cl_c0();
        Ok((Expr::frac(1, 2) * self.pu().powi(2)
            + Expr::frac(1, 2) * (self.gamma.powi(2) + &kappa) * m2
            + &self.spec.omega / self.gamma.powi(2)
            - kappa * k2 * self.seed.c0_expr())
        .simplify())
    }

    pub fn factorized_integrals(&self) -> Result<FactorizedIntegrals> {
        if self.seed.c.is_zero() {
            return Err(Error::unsupported("factorized integrals need c ≠ 0"));
        }
        if let Some(w) = self.spec.omega.to_poly().as_constant() {
            if !w.is_positive() {
                return Err(Error::invalid("factorized integrals need Ω > 0"));
            }
        }
        let ladder = self.seed.ladder_functions()?;
        let k = Expr::num(self.spec.k());
        let omega = (Expr::int(2) * &self.spec.omega).sqrt().simplify();
        let m_squared = (Expr::int(2) * k.powi(2) * self.seed.cl_c0()).simplify();
        let m = match ladder.regime {
            LadderRegime::Imaginary => ComplexExpr::real((&k * &ladder.rho).simplify()),
            LadderRegime::Real => ComplexExpr::imag((&k * &ladder.rho).simplify()),
        };
        let s2 = Expr::int(2).sqrt();
        let g = &self.gamma;
        let pu = self.pu();
        // A± = ∓(i/√2)p_u + ω/(√2γ) - (M/√2)γ
        let a_real = ComplexExpr::real((&omega / (&s2 * g)).simplify());
        let m_term = m.scale(&(g / &s2));
        let a_base = &a_real - &m_term;
        let a_shift = ComplexExpr::imag((&pu / &s2).simplify());
        let a_plus = (&a_base - &a_shift).simplify();
        let a_minus = (&a_base + &a_shift).simplify();
        // D± = ∓(i/γ)p_u + ω/γ² - H/ω - (C/(cω))(c₀k² - M²/2)
        let kappa = Expr::num(&self.spec.gamma.big_c / &self.seed.c);
        let d_real = (&omega / g.powi(2) - &self.h / &omega
            - kappa / &omega * (self.seed.c0_expr() * k.powi(2) - Expr::frac(1, 2) * &m_squared))
            .simplify();
        let d_shift = ComplexExpr::imag((&pu / g).simplify());
        let d_base = ComplexExpr::real(d_real);
        let d_plus = (&d_base - &d_shift).simplify();
        let d_minus = (&d_base + &d_shift).simplify();
        let (mm, nn) = (self.spec.m, self.spec.n);
        let x_plus = (&(&ladder.plus.powi(2 * nn) * &a_minus.powi(2 * mm)) * &d_plus.powi(mm)).simplify();
        let x_minus = (&(&ladder.minus.powi(2 * nn) * &a_plus.powi(2 * mm)) * &d_minus.powi(mm)).simplify();
        Ok(FactorizedIntegrals {
            ladder,
            omega,
            m_squared,
            m,
            a_plus,
            a_minus,
            d_plus,
            d_minus,
            x_plus,
            x_minus,
        })
    }
}
