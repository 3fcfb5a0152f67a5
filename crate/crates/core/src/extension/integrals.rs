use super::{binomial, Extended, FirstIntegral, Route, SeedSystem};
use crate::error::{Error, Result};
use crate::expr::{rat, Expr, Rational};

/// `G_1, …, G_n` from `G_1 = G`, `G_{j+1} = X_L(G)G_j + (1/j)G X_L(G_j)`.
pub fn g_recursion(seed: &SeedSystem, n: u32) -> Vec<Expr> {
    assert!(n >= 1, "recursion index starts at 1");
    let xg = seed.x_l(&seed.g).simplify();
    let mut out = vec![seed.g.simplify()];
    for j in 1..n {
        let gj = &out[j as usize - 1];
        let next = (&xg * gj + Expr::frac(1, j as i64) * &seed.g * seed.x_l(gj)).simplify();
        out.push(next);
    }
    out
}

/// `G_n = Σ_j C(n, 2j+1) G^{2j+1} (X_L G)^{n-2j-1} (-2)^j (cL + c₀)^j`.
pub fn g_closed_form(seed: &SeedSystem, n: u32) -> Expr {
    assert!(n >= 1, "recursion index starts at 1");
    let xg = seed.x_l(&seed.g);
    let cl = seed.cl_c0();
    let terms = (0..=(n - 1) / 2).map(|j| {
        let coef = binomial(n, 2 * j + 1) * num_traits::pow(rat(-2), j as usize);
        Expr::num(coef)
            * seed.g.powi(i64::from(2 * j + 1))
            * xg.powi(i64::from(n - 2 * j - 1))
            * cl.powi(i64::from(j))
    });
    Expr::add_all(terms).simplify()
}

/// `H = Σ αᵏ Hₖ` with `α¹ = 1`.
pub fn warped_product(factors: &[(Expr, Expr)]) -> Result<Expr> {
    let first = factors
        .first()
        .ok_or_else(|| Error::invalid("warped product of no factors"))?;
    if !(&first.0 - Expr::one()).is_zero_symbolic() {
        return Err(Error::invalid("the first warping function must be 1"));
    }
    Ok(Expr::add_all(factors.iter().map(|(a, h)| a * h)).simplify())
}

impl Extended {
    /// One application of `U_{a,b} = p_u + (a/b²)γX_L`.
    pub fn u_step(&self, f: &Expr, a: u32, b: u32) -> Expr {
        let coef = Expr::num(Rational::new(a.into(), (b * b).into()));
        (self.pu() * f + coef * &self.gamma * self.seed.x_l(f)).simplify()
    }

    /// `U_{a,b}^r(F)`.
    pub fn u_apply(&self, f: &Expr, a: u32, b: u32, r: u32) -> Expr {
        let mut out = f.simplify();
        for _ in 0..r {
            out = self.u_step(&out, a, b);
        }
        out
    }

    fn k_ratio(&self, a: u32, b: u32) -> Expr {
        Expr::num(Rational::new(a.into(), b.into()))
    }

    /// `P_{a,b,r} = Σ_j C(r,2j) ((a/b)γ)^{2j} p_u^{r-2j} (-2)^j (cL+c₀)^j`.
    pub fn p_closed(&self, a: u32, b: u32, r: u32) -> Expr {
        let kg = self.k_ratio(a, b) * &self.gamma;
        let cl = self.seed.cl_c0();
        let terms = (0..=r / 2).map(|j| {
            Expr::num(binomial(r, 2 * j) * num_traits::pow(rat(-2), j as usize))
                * kg.powi(i64::from(2 * j))
                * self.pu().powi(i64::from(r - 2 * j))
                * cl.powi(i64::from(j))
        });
        Expr::add_all(terms).simplify()
    }

    /// `D_{a,b,r} = (1/b) Σ_j C(r,2j+1) ((a/b)γ)^{2j+1} p_u^{r-2j-1} (-2)^j (cL+c₀)^j`.
    ///
    /// For `a = r = 1` this is `γ/b²`.
    pub fn d_closed(&self, a: u32, b: u32, r: u32) -> Expr {
        if r == 0 {
            return Expr::zero();
        }
        let kg = self.k_ratio(a, b) * &self.gamma;
        let cl = self.seed.cl_c0();
        let terms = (0..=(r - 1) / 2).map(|j| {
            Expr::num(binomial(r, 2 * j + 1) * num_traits::pow(rat(-2), j as usize))
                * kg.powi(i64::from(2 * j + 1))
                * self.pu().powi(i64::from(r - 2 * j - 1))
                * cl.powi(i64::from(j))
        });
        (Expr::frac(1, i64::from(b)) * Expr::add_all(terms)).simplify()
    }

    /// `P_{a,b,r}G_b + D_{a,b,r}X_L(G_b)`.
    pub fn u_closed_form(&self, g_b: &Expr, a: u32, b: u32, r: u32) -> Expr {
        (self.p_closed(a, b, r) * g_b + self.d_closed(a, b, r) * self.seed.x_l(g_b)).simplify()
    }

    /// `K_{m,n} = U_{m,n}^m(G_n)`; requires `Ω = 0`.
    pub fn k_integral(&self) -> Result<FirstIntegral> {
        if !self.spec.omega_is_zero() {
            return Err(Error::invalid(
                "K_{m,n} needs Ω = 0; use the K̄ integral for Ω ≠ 0",
            ));
        }
        let (m, n) = (self.spec.m, self.spec.n);
        let gn = g_recursion(&self.seed, n).pop().unwrap();
        let k = self.u_apply(&gn, m, n, m);
        Ok(FirstIntegral::new(k, Route::RecursiveK, &self.chart, (m, n)))
    }

    /// `K_{m,n}` through the closed forms for `G_n`, `P` and `D`.
    pub fn k_closed_form(&self) -> FirstIntegral {
        let (m, n) = (self.spec.m, self.spec.n);
        let gn = g_closed_form(&self.seed, n);
        let k = self.u_closed_form(&gn, m, n, m);
        FirstIntegral::new(k, Route::ClosedForm, &self.chart, (m, n))
    }

    /// `K̄_{2s,r} = (U_{2s,r}² + 2Ω/γ²)^s (G_r)`.
    pub fn kbar_integral(&self, s: u32, r: u32) -> FirstIntegral {
        let a = 2 * s;
        let g_r = g_recursion(&self.seed, r).pop().unwrap();
        let two_omega = (Expr::int(2) * &self.spec.omega / self.gamma.powi(2)).simplify();
        let mut f = g_r;
        for _ in 0..s {
            let uu = self.u_apply(&f, a, r, 2);
            f = (uu + &two_omega * &f).simplify();
        }
        FirstIntegral::new(f, Route::RecursiveKbar, &self.chart, (a, r))
    }

    /// `K̄_{2s,r} = Σ_j C(s,j) (2Ω/γ²)^j U_{2s,r}^{2(s-j)}(G_r)`.
    pub fn kbar_expansion(&self, s: u32, r: u32) -> Expr {
        let a = 2 * s;
        let g_r = g_recursion(&self.seed, r).pop().unwrap();
        let two_omega = (Expr::int(2) * &self.spec.omega / self.gamma.powi(2)).simplify();
        // powers[i] = U^{2i}(G_r)
        let mut powers = vec![g_r];
        for i in 1..=s as usize {
            let next = self.u_apply(&powers[i - 1], a, r, 2);
            powers.push(next);
        }
        let terms = (0..=s).map(|j| {
            Expr::num(binomial(s, j)) * two_omega.powi(i64::from(j)) * &powers[(s - j) as usize]
        });
        Expr::add_all(terms).simplify()
    }

    /// The characteristic integral for this spec: `K_{m,n}` when `Ω = 0`,
    /// otherwise `K̄_{m,n}` for even `m` and `K̄_{2m,2n}` for odd `m`.
    pub fn characteristic_integral(&self) -> Result<FirstIntegral> {
        let (m, n) = (self.spec.m, self.spec.n);
        if self.spec.omega_is_zero() {
            return self.k_integral();
        }
        Ok(if m % 2 == 0 {
            self.kbar_integral(m / 2, n)
        } else {
            self.kbar_integral(m, 2 * n)
        })
    }

    /// `X_L²(G_n) + 2n²(cL + c₀)G_n` for `n = 1..=max`.
    pub fn eigen_identity_residuals(&self, max: u32) -> Vec<Expr> {
        eigen_identity_residuals(&self.seed, max)
    }
}

/// `X_L²(G_n) + 2n²(cL + c₀)G_n` for `n = 1..=max`.
pub fn eigen_identity_residuals(seed: &SeedSystem, max: u32) -> Vec<Expr> {
    let cl = seed.cl_c0();
    g_recursion(seed, max)
        .iter()
        .enumerate()
        .map(|(i, gn)| {
            let n = (i + 1) as i64;
            let x2 = seed.x_l(&seed.x_l(gn));
            (x2 + Expr::int(2 * n * n) * &cl * gn).simplify()
        })
        .collect()
}
