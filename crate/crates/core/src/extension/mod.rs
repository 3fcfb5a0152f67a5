//! Seeds, extended Hamiltonians and their characteristic first integrals.
//!
//! A [`SeedSystem`] is a natural Hamiltonian `L = ½g^{ij}p_ip_j + V` with a
//! function `G` solving `X_L²(G) = -2(cL + c₀)G`. For an [`ExtensionSpec`]
//! `(m, n, Ω, γ)` the extension is
//!
//! ```text
//! H = ½p_u² - k²γ'L + k²c₀γ² + Ω/γ²,   k = m/n
//! ```
//!
//! and `U_{m,n} = p_u + (m/n²)γX_L` generates its first integrals.

mod integrals;
mod ladder;

use serde::Serialize;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{
    poisson, rat, x_flow, Chart, Expr, PhasePoint, Rational, Symbol, ZeroTest, ZeroVerdict,
};
use crate::geometry::{Matrix, MetricData};
use crate::sampling::SamplerConfig;
use crate::tagged_trig::GammaSpec;

pub use integrals::{eigen_identity_residuals, g_closed_form, g_recursion, warped_product};
pub use ladder::{FactorizedIntegrals, LadderFunctions, LadderRegime};

/// Momentum-free function and constant `c₁` for the ladder construction.
#[derive(Clone, Debug)]
pub struct LadderSeed {
    pub g: Expr,
    pub c1: Expr,
}

#[derive(Clone, Debug)]
pub struct SeedSystem {
    pub name: String,
    pub chart: Chart,
    pub metric: MetricData,
    pub potential: Expr,
    pub l: Expr,
    pub g: Expr,
    pub c: Rational,
    pub c0: Rational,
    pub ladder: Option<LadderSeed>,
    /// Sampling box and guards for numeric checks on this seed.
    pub sampler: SamplerConfig,
}

/// Outcome of [`SeedSystem::check_extension_condition`].
#[derive(Clone, Debug)]
pub struct ConditionCheck {
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

impl ConditionCheck {
    pub fn holds(&self) -> bool {
        self.verdict.is_zero()
    }
}

impl SeedSystem {
    /// Natural seed `L = ½g^{ij}p_ip_j + V` on `chart`.
    pub fn natural(
        name: &str,
        chart: Chart,
        metric: Matrix,
        potential: Expr,
        g: Expr,
        c: Rational,
        c0: Rational,
    ) -> Result<Self> {
        if chart.has_extension() {
            return Err(Error::invalid("seed chart must not contain the extension pair"));
        }
        if c.is_zero() && c0.is_zero() {
            return Err(Error::InvalidSeed("c and c0 are both zero".into()));
        }
        let metric = MetricData::new(chart.coords().to_vec(), metric)?;
        let l = (metric.kinetic(chart.momenta()) + &potential).simplify();
        Ok(SeedSystem {
            name: name.to_string(),
            chart,
            metric,
            potential,
            l,
            g,
            c,
            c0,
            ladder: None,
            sampler: SamplerConfig::default(),
        })
    }

    pub fn with_ladder(mut self, g: Expr, c1: Expr) -> Self {
        self.ladder = Some(LadderSeed { g, c1 });
        self
    }

    pub fn with_sampler(mut self, sampler: SamplerConfig) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn c_expr(&self) -> Expr {
        Expr::num(self.c.clone())
    }

    pub fn c0_expr(&self) -> Expr {
        Expr::num(self.c0.clone())
    }

    /// `cL + c₀`.
    pub fn cl_c0(&self) -> Expr {
        (self.c_expr() * &self.l + self.c0_expr()).simplify()
    }

    /// `X_L(F) = {F, L}`.
    pub fn x_l(&self, f: &Expr) -> Expr {
        x_flow(&self.l, f, &self.chart)
    }

    pub fn zero_test(&self) -> ZeroTest {
        ZeroTest::default().with_sampler(self.sampler.clone())
    }

    /// `X_L²(G) + 2(cL + c₀)G`, simplified and zero-tested.
    pub fn check_extension_condition(&self) -> ConditionCheck {
        let xg = self.x_l(&self.g);
        let residual = (self.x_l(&xg) + Expr::int(2) * self.cl_c0() * &self.g).simplify();
        let verdict = self.zero_test().run(&residual);
        ConditionCheck { residual, verdict }
    }

    /// Reject seeds whose extension condition fails, reporting a witness.
    pub fn validate(&self) -> Result<()> {
        let check = self.check_extension_condition();
        match check.verdict {
            ZeroVerdict::Zero | ZeroVerdict::ProbablyZero { .. } => Ok(()),
            ZeroVerdict::NonZero { witness, value } => Err(Error::InvalidSeed(format!(
                "extension condition residual {} = {value:e} at {:?}",
                check.residual, witness
            ))),
            ZeroVerdict::Undecided => Err(Error::InvalidSeed(
                "extension condition could not be evaluated at any sample point".into(),
            )),
        }
    }

    /// `∇_i∇_j G + cG g_{ij}` for momentum-free `G`.
    pub fn check_hessian(&self) -> Result<Matrix> {
        self.hessian_residual(&self.g)
    }

    pub fn hessian_residual(&self, g: &Expr) -> Result<Matrix> {
        if self.chart.momenta().iter().any(|p| g.depends_on(p)) {
            return Err(Error::unsupported(
                "Hessian equation applies only to momentum-free G",
            ));
        }
        let hess = self.metric.hessian(g);
        let n = self.metric.dim();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (&hess[i][j] + self.c_expr() * g * &self.metric.g()[i][j]).simplify())
                    .collect()
            })
            .collect())
    }

    /// `∇V·∇G - 2(cV + c₀)G + c₁` for the ladder data.
    pub fn ve1_residual(&self) -> Result<Expr> {
        let ladder = self
            .ladder
            .as_ref()
            .ok_or_else(|| Error::unsupported(format!("seed `{}` has no ladder data", self.name)))?;
        let cv = self.c_expr() * &self.potential + self.c0_expr();
        Ok((self.metric.dot_gradients(&self.potential, &ladder.g)
            - Expr::int(2) * cv * &ladder.g
            + &ladder.c1)
            .simplify())
    }

    /// Value of `c₁` solving VE1 when the residual without it is constant.
    pub fn solve_ve1_c1(&self, g: &Expr) -> Result<Expr> {
        let cv = self.c_expr() * &self.potential + self.c0_expr();
        let rest = (self.metric.dot_gradients(&self.potential, g) - Expr::int(2) * cv * g).simplify();
        if self.chart.coords().iter().any(|q| !rest.diff_simplified(q).is_zero_symbolic()) {
            return Err(Error::InvalidSeed(format!(
                "∇V·∇G - 2(cV+c₀)G = {rest} is not constant"
            )));
        }
        Ok((-rest).simplify())
    }
}

#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    pub m: u32,
    pub n: u32,
    pub omega: Expr,
    pub gamma: GammaSpec,
}

impl ExtensionSpec {
    pub fn new(m: u32, n: u32, omega: Expr, gamma: GammaSpec) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m and n must be positive"));
        }
        Ok(ExtensionSpec { m, n, omega, gamma })
    }

    pub fn k(&self) -> Rational {
        Rational::new(self.m.into(), self.n.into())
    }

    /// `gcd(m, n) = 1`. Non-reduced pairs are accepted but flagged.
    pub fn is_reduced(&self) -> bool {
        num_integer::gcd(self.m, self.n) == 1
    }

    pub fn omega_is_zero(&self) -> bool {
        self.omega.is_zero_symbolic()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    RecursiveK,
    RecursiveKbar,
    ClosedForm,
    FactorizedPlus,
    FactorizedMinus,
}

#[derive(Clone, Debug)]
pub struct FirstIntegral {
    pub expr: Expr,
    pub route: Route,
    pub momentum_degree: i32,
    /// Indices of the operator `U_{a,b}` and the power of `G_b` used.
    pub indices: (u32, u32),
}

impl FirstIntegral {
    pub fn new(expr: Expr, route: Route, chart: &Chart, indices: (u32, u32)) -> Self {
        let momentum_degree = expr.degree_in(&chart.all_momenta());
        FirstIntegral {
            expr,
            route,
            momentum_degree,
            indices,
        }
    }
}

/// The extension of a seed for one spec.
#[derive(Clone, Debug)]
pub struct Extended {
    pub seed: SeedSystem,
    pub spec: ExtensionSpec,
    pub chart: Chart,
    pub gamma: Expr,
    pub h: Expr,
}

impl Extended {
    pub fn u(&self) -> Expr {
        Expr::symbol(self.chart.u().expect("extended chart"))
    }

    pub fn pu(&self) -> Expr {
        Expr::symbol(self.chart.pu().expect("extended chart"))
    }

    pub fn u_symbol(&self) -> &Symbol {
        self.chart.u().expect("extended chart")
    }

    /// `{F, G}` over the extended chart.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Expr {
        poisson(f, g, &self.chart)
    }

    /// Sampler for the extended phase space.
    pub fn sampler(&self) -> SamplerConfig {
        self.seed.sampler.clone()
    }

    /// Default parameter values merged into samples.
    pub fn with_params(&self, pt: &PhasePoint) -> PhasePoint {
        self.seed.sampler.fixed.merged(pt)
    }
}

/// `H = ½p_u² - k²γ'L + k²c₀γ² + Ω/γ²` on the chart extended by `(u, pu)`.
pub fn build_extended(seed: &SeedSystem, spec: &ExtensionSpec) -> Result<Extended> {
    if spec.gamma.c != seed.c {
        return Err(Error::invalid(format!(
            "γ uses c = {} but the seed has c = {}",
            spec.gamma.c, seed.c
        )));
    }
    let chart = seed.chart.extended();
    let u = chart.u().unwrap().clone();
    let pu = Expr::symbol(chart.pu().unwrap());
    let gamma = spec.gamma.gamma(&u).simplify();
    if gamma.is_zero_symbolic() {
        return Err(Error::invalid("γ vanishes identically (c = C = 0)"));
    }
    let dgamma = gamma.diff_simplified(&u);
    let k2 = Expr::num(spec.k() * spec.k());
    let h = (Expr::frac(1, 2) * pu.powi(2) - &k2 * &dgamma * &seed.l
        + &k2 * seed.c0_expr() * gamma.powi(2)
        + &spec.omega / gamma.powi(2))
        .simplify();
    Ok(Extended {
        seed: seed.clone(),
        spec: spec.clone(),
        chart,
        gamma,
        h,
    })
}

/// The extension's warped-product split `[(1, ½p_u² + k²c₀γ² + Ω/γ²), (-k²γ', L)]`.
pub fn warped_factors(ext: &Extended) -> Vec<(Expr, Expr)> {
    let k2 = Expr::num(ext.spec.k() * ext.spec.k());
    let dgamma = ext.gamma.diff_simplified(ext.u_symbol());
    let radial = Expr::frac(1, 2) * ext.pu().powi(2)
        + &k2 * ext.seed.c0_expr() * ext.gamma.powi(2)
        + &ext.spec.omega / ext.gamma.powi(2);
    vec![(Expr::one(), radial), (-(k2 * dgamma), ext.seed.l.clone())]
}

pub(crate) fn binomial(n: u32, k: u32) -> Rational {
    let mut r = rat(1);
    for i in 0..k {
        r = r * rat(i64::from(n - i)) / rat(i64::from(i + 1));
    }
    r
}

#[cfg(test)]
mod tests;
