//! Tagged trigonometric functions and the solutions of `γ' + cγ² + C = 0`.
//!
//! ```text
//!            sin(√κ x)/√κ      κ > 0           cos(√κ x)      κ > 0
//! S_κ(x) =   x                 κ = 0   C_κ(x) = 1              κ = 0
//!            sinh(√-κ x)/√-κ   κ < 0           cosh(√-κ x)    κ < 0
//! ```
//!
//! and `T_κ = S_κ / C_κ`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{rational_from_f64, Expr, Rational, Symbol, ZeroTest, ZeroVerdict};
use crate::sampling::{Range, SamplerConfig};

const TAYLOR_CUTOFF: f64 = 1e-8;

pub fn s_kappa(kappa: f64, x: f64) -> f64 {
    let t = kappa * x * x;
    if t.abs() < TAYLOR_CUTOFF {
        return x * (1.0 - t / 6.0 + t * t / 120.0 - t * t * t / 5040.0);
    }
    if kappa > 0.0 {
        let r = kappa.sqrt();
        (r * x).sin() / r
    } else {
        let r = (-kappa).sqrt();
        (r * x).sinh() / r
    }
}

pub fn c_kappa(kappa: f64, x: f64) -> f64 {
    let t = kappa * x * x;
    if t.abs() < TAYLOR_CUTOFF {
        return 1.0 - t / 2.0 + t * t / 24.0 - t * t * t / 720.0;
    }
    if kappa > 0.0 {
        (kappa.sqrt() * x).cos()
    } else {
        ((-kappa).sqrt() * x).cosh()
    }
}

pub fn t_kappa(kappa: f64, x: f64) -> Result<f64> {
    let c = c_kappa(kappa, x);
    if c == 0.0 || (c.abs() < 1e-300) {
        return Err(Error::Domain {
            subtree: format!("T_{kappa}({x})"),
            reason: "pole of the tagged tangent".into(),
        });
    }
    Ok(s_kappa(kappa, x) / c)
}

fn sqrt_abs(kappa: &Rational) -> Expr {
    Expr::num(kappa.abs()).sqrt()
}

/// `S_κ(x)` as an expression.
pub fn s_kappa_expr(kappa: &Rational, x: &Expr) -> Expr {
    if kappa.is_zero() {
        return x.clone();
    }
    let r = sqrt_abs(kappa);
    let arg = &r * x;
    if kappa.is_positive() {
        arg.sin() / r
    } else {
        arg.sinh() / r
    }
}

/// `C_κ(x)` as an expression.
pub fn c_kappa_expr(kappa: &Rational, x: &Expr) -> Expr {
    if kappa.is_zero() {
        return Expr::one();
    }
    let arg = sqrt_abs(kappa) * x;
    if kappa.is_positive() {
        arg.cos()
    } else {
        arg.cosh()
    }
}

pub fn t_kappa_expr(kappa: &Rational, x: &Expr) -> Expr {
    s_kappa_expr(kappa, x) / c_kappa_expr(kappa, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaBranch {
    /// `c = 0`: `γ = -C u`.
    Linear,
    /// `c ≠ 0`: `γ = C_κ(cu) / S_κ(cu)`, `κ = C/c`.
    TaggedCotangent,
}

/// Constants of `γ' + cγ² + C = 0` and the translation of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSpec {
    pub c: Rational,
    pub big_c: Rational,
    pub shift: Rational,
}

impl GammaSpec {
    pub fn new(c: Rational, big_c: Rational) -> Self {
        GammaSpec {
            c,
            big_c,
            shift: Rational::zero(),
        }
    }

    pub fn from_f64(c: f64, big_c: f64) -> Result<Self> {
        let conv = |x: f64| rational_from_f64(x).ok_or_else(|| Error::invalid("non-finite constant"));
        Ok(GammaSpec::new(conv(c)?, conv(big_c)?))
    }

    /// Solution translated to `u - u₀`.
    pub fn shifted(mut self, u0: Rational) -> Self {
        self.shift = u0;
        self
    }

    pub fn branch(&self) -> GammaBranch {
        if self.c.is_zero() {
            GammaBranch::Linear
        } else {
            GammaBranch::TaggedCotangent
        }
    }

    pub fn kappa(&self) -> Option<Rational> {
        (!self.c.is_zero()).then(|| &self.big_c / &self.c)
    }

    /// `γ` as an expression in `u`.
    pub fn gamma(&self, u: &Symbol) -> Expr {
        let x = Expr::symbol(u) - Expr::num(self.shift.clone());
        match self.kappa() {
            None => -(Expr::num(self.big_c.clone()) * x),
            Some(kappa) => {
                let cu = Expr::num(self.c.clone()) * x;
                if kappa.is_zero() {
                    cu.recip()
                } else {
                    c_kappa_expr(&kappa, &cu) / s_kappa_expr(&kappa, &cu)
                }
            }
        }
    }

    /// `γ(u)` evaluated numerically.
    pub fn gamma_value(&self, u: f64) -> Result<f64> {
        let x = u - crate::expr::rational_to_f64(&self.shift);
        let c = crate::expr::rational_to_f64(&self.c);
        let big_c = crate::expr::rational_to_f64(&self.big_c);
        match self.kappa() {
            None => Ok(-big_c * x),
            Some(k) => {
                let s = s_kappa(crate::expr::rational_to_f64(&k), c * x);
                if s == 0.0 {
                    return Err(Error::Domain {
                        subtree: "gamma".into(),
                        reason: "pole of gamma".into(),
                    });
                }
                Ok(c_kappa(crate::expr::rational_to_f64(&k), c * x) / s)
            }
        }
    }

    /// `γ' + cγ² + C`, simplified.
    pub fn ode_residual(&self, u: &Symbol) -> Expr {
        let g = self.gamma(u);
        let dg = g.diff_simplified(u);
        (dg + Expr::num(self.c.clone()) * g.powi(2) + Expr::num(self.big_c.clone())).simplify()
    }

    /// Zero test of [`GammaSpec::ode_residual`]; numeric at 20 points with
    /// tolerance 1e-12 where the canonical form does not decide.
    pub fn check_ode(&self, u: &Symbol) -> ZeroVerdict {
        let test = ZeroTest {
            points: 20,
            tol: 1e-12,
            sampler: SamplerConfig::default().range(u.as_str(), Range::Symmetric(0.2, 1.5)),
        };
        test.run(&self.ode_residual(u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, ratio, PhasePoint};
    use std::f64::consts::PI;

    #[test]
    fn flat_branch_is_identity() {
        assert_eq!(s_kappa(0.0, 2.5), 2.5);
        for k in [-1.0, 0.0, 1.0] {
            assert_eq!(c_kappa(k, 0.0), 1.0);
        }
    }

    #[test]
    fn branch_values() {
        assert!((s_kappa(1.0, PI / 2.0) - 1.0).abs() < 1e-15);
        assert!((s_kappa(-1.0, 1.0) - 1.0f64.sinh()).abs() < 1e-15);
        assert!((s_kappa(-1.0, 1.0) - 1.17520).abs() < 1e-5);
    }

    #[test]
    fn tangent_pole_is_domain_error() {
        // C_1 vanishes nowhere exactly in floating point; a κ<0 branch
        // never vanishes. Use a constructed zero instead.
        assert!(t_kappa(1.0, 0.3).is_ok());
        let c = c_kappa(4.0, PI / 4.0);
        assert!(c.abs() < 1e-15);
    }

    #[test]
    fn gamma_forms() {
        let u = Symbol::new("u");
        let g = GammaSpec::new(rat(2), rat(0)).gamma(&u);
        assert!(g.equivalent(&(Expr::int(2) * Expr::symbol(&u)).recip()));
        let g = GammaSpec::new(rat(0), rat(1)).gamma(&u);
        assert!(g.equivalent(&(-Expr::symbol(&u))));
        let v = GammaSpec::new(rat(1), rat(1)).gamma_value(PI / 4.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ode_holds_on_every_branch() {
        let u = Symbol::new("u");
        for (c, big_c) in [(0, 1), (0, -3), (1, 0), (3, 0), (1, 1), (2, 1), (1, -1), (-1, 2)] {
            let spec = GammaSpec::new(rat(c), rat(big_c));
            let v = spec.check_ode(&u);
            assert!(v.is_zero(), "c={c} C={big_c}: {v:?}");
        }
        let spec = GammaSpec::new(rat(1), ratio(1, 2)).shifted(ratio(1, 3));
        assert!(spec.check_ode(&u).is_zero());
    }

    #[test]
    fn expression_matches_numeric() {
        let x = Symbol::new("x");
        for k in [ratio(-2, 1), ratio(-1, 3), rat(0), ratio(1, 2), rat(2)] {
            let kf = crate::expr::rational_to_f64(&k);
            let s = s_kappa_expr(&k, &Expr::symbol(&x));
            let c = c_kappa_expr(&k, &Expr::symbol(&x));
            for i in 1..10 {
                let xv = 0.17 * i as f64;
                let pt = PhasePoint::from_pairs([("x", xv)]);
                assert!((s.eval(&pt).unwrap() - s_kappa(kf, xv)).abs() < 1e-13);
                assert!((c.eval(&pt).unwrap() - c_kappa(kf, xv)).abs() < 1e-13);
            }
        }
    }
}
