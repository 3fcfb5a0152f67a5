//! Warped-symmetry verification, mode leakage and shift/ladder
//! classification.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::grid::{apply_on_grid, h_m_spectrum, l_hat_spectrum, GridFunction, GridSpec, Stencil};
use super::{Fourier, OperatorSpec, QuantumSystem, Radial, Separated, SeparatedOp, Sign};
use crate::error::{Error, Result};
use crate::expr::{rational_to_f64, Expr, ZeroTest};
use crate::verification::{CheckResult, VerificationReport};

pub const WARPED_TOL: f64 = 1e-4;
pub const RATIO_RANGE: (f64, f64) = (3.5, 4.5);
pub const CONTROL_MIN: f64 = 1e-1;
pub const LEAKAGE_TOL: f64 = 1e-6;
/// Residual of the exact (undiscretized) chain, relative.
pub const EXACT_TOL: f64 = 1e-9;

/// How `X̂` is applied before `Ĥ` is evaluated on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainMode {
    /// In closed form on the separated representation.
    Exact,
    /// Factor by factor with finite differences.
    Grid,
}

#[derive(Clone, Debug, Serialize)]
pub struct WarpedConfig {
    /// Square grid sizes for the refinement study, coarse to fine.
    pub grids: Vec<usize>,
    /// `U` in units of the oscillator length `1/√b`.
    pub u_extent: f64,
    pub interior: f64,
    /// Stencil for the residual bound at the finest grid.
    pub fine_order: u8,
    /// Stencil for the refinement study.
    pub study_order: u8,
    pub chain: ChainMode,
}

impl Default for WarpedConfig {
    fn default() -> Self {
        WarpedConfig {
            grids: vec![128, 256, 512],
            u_extent: 7.0,
            interior: 0.8,
            fine_order: 4,
            study_order: 2,
            chain: ChainMode::Exact,
        }
    }
}

/// A partially separated eigenfunction `φ_E(u)e^{iℓq}`.
#[derive(Clone, Debug, Serialize)]
pub struct Mode {
    pub ell: i32,
    pub n_r: u32,
    pub lambda: f64,
    /// `M = k²(λ + c_N)`.
    pub m: f64,
    pub eps: f64,
    pub energy: f64,
    /// Radial exponent `ν = √(2M/c)/ħ`.
    pub nu: f64,
    #[serde(skip)]
    pub f: Separated,
}

impl QuantumSystem {
    fn hb_f(&self) -> f64 {
        rational_to_f64(&self.hbar)
    }

    fn c_f(&self) -> f64 {
        rational_to_f64(&self.c)
    }

    /// `b = ωc/(2ħ)`.
    pub fn oscillator_b(&self) -> f64 {
        self.omega_value * self.c_f() / (2.0 * self.hb_f())
    }

    /// `L̂₀` must be `-(ħ²/2)∂²_q` for the analytic angular modes.
    fn require_free_circle(&self) -> Result<()> {
        let flat = self.l_hat.coefficient(0, 1).is_literal_zero()
            && self.l_hat.coefficient(0, 0).is_zero_symbolic()
            && self.l_hat.coefficient(0, 2).free_symbols().is_empty();
        if !flat {
            return Err(Error::unsupported(
                "analytic separated modes need V = 0 and a constant metric",
            ));
        }
        if self.c_f() <= 0.0 {
            return Err(Error::unsupported("analytic radial modes need c > 0"));
        }
        Ok(())
    }

    /// `ψ_ℓ = e^{iℓq}` and its eigenvalue `λ = ħ²ℓ²/(2g)`.
    pub fn angular_mode(&self, ell: i32) -> Result<(f64, Fourier)> {
        self.require_free_circle()?;
        let a = -self.l_hat.coefficient(0, 2).eval(&Default::default())?;
        Ok((a * f64::from(ell * ell), Fourier::mode(ell)))
    }

    /// Radial eigenfunction of `Ĥ^M` with `n_r` nodes and its energy
    /// `E = ħωc(2n_r + ν + 1)`, `ν = √(2M/c)/ħ` (`N = 1`).
    pub fn radial_mode(&self, m: f64, n_r: u32) -> Result<(f64, Radial)> {
        if self.dim != 1 {
            return Err(Error::unsupported("radial modes are implemented for N = 1"));
        }
        let c = self.c_f();
        if c <= 0.0 || m / c < 0.0 {
            return Err(Error::invalid("radial modes need c > 0 and M/c ≥ 0"));
        }
        let nu = (2.0 * m / c).sqrt() / self.hb_f();
        let b = self.oscillator_b();
        let e = self.hb_f() * self.omega_value * c * (2.0 * f64::from(n_r) + nu + 1.0);
        Ok((e, Radial::laguerre(nu, b, n_r, nu)))
    }

    pub fn mode(&self, ell: i32, n_r: u32) -> Result<Mode> {
        let (lambda, psi) = self.angular_mode(ell)?;
        let (m, eps) = self.theorem_parameters(lambda)?;
        let (energy, phi) = self.radial_mode(m, n_r)?;
        Ok(Mode {
            ell,
            n_r,
            lambda,
            m,
            eps,
            energy,
            nu: phi.a,
            f: Separated::product(phi, psi),
        })
    }

    /// `X̂` factors for a mode, in application order.
    pub fn mode_chain(&self, mode: &Mode) -> Result<Vec<OperatorSpec>> {
        self.x_hat_chain(&Expr::float(mode.eps), &Expr::float(mode.energy))
    }

    /// `X̂f` on the separated representation.
    pub fn apply_chain_exact(&self, chain: &[OperatorSpec], f: &Separated) -> Result<Separated> {
        let mut g = f.clone();
        for op in chain {
            g = g.apply(&SeparatedOp::from_spec(op)?);
        }
        Ok(g)
    }

    /// The lowest `count` distinct `(λ, E)` pairs with `X̂f ≠ 0`, and the
    /// pairs skipped because `X̂` annihilates them.
    pub fn lowest_pairs(&self, count: usize) -> Result<(Vec<Mode>, Vec<Mode>)> {
        let mut cands = Vec::new();
        let max_l = 2 * count as i32 + 2;
        for ell in 0..=max_l {
            for n_r in 0..=(self.m + count as u32 + 1) {
                cands.push(self.mode(ell, n_r)?);
            }
        }
        cands.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.lambda.total_cmp(&b.lambda)));
        let (mut kept, mut skipped) = (Vec::new(), Vec::new());
        for m in cands {
            if kept.len() == count {
                break;
            }
            let g = self.apply_chain_exact(&self.mode_chain(&m)?, &m.f)?;
            if g.is_zero() {
                skipped.push(m);
            } else {
                kept.push(m);
            }
        }
        Ok((kept, skipped))
    }

    /// Radial extent `U` for a configuration.
    pub fn u_max(&self, cfg: &WarpedConfig) -> f64 {
        cfg.u_extent / self.oscillator_b().sqrt()
    }

    /// `‖Ĥg - E·g‖/‖g‖` over the radial interior, with `g = X̂f`.
    pub fn grid_residual(
        &self,
        mode: &Mode,
        f: &Separated,
        n: usize,
        stencil: Stencil,
        cfg: &WarpedConfig,
    ) -> Result<f64> {
        let grid = GridSpec::new(n, n, self.u_max(cfg));
        let chain = self.mode_chain(mode)?;
        let g = match cfg.chain {
            ChainMode::Exact => GridFunction::from_separated(&grid, &self.apply_chain_exact(&chain, f)?),
            ChainMode::Grid => {
                let mut g = GridFunction::from_separated(&grid, f);
                for op in &chain {
                    g = apply_on_grid(op, &g, stencil, stencil)?;
                }
                g
            }
        };
        let hg = apply_on_grid(&self.h_hat(), &g, stencil, stencil)?;
        let r = hg.axpy(Complex64::new(-mode.energy, 0.0), &g);
        let denom = g.interior_norm(cfg.interior);
        if denom == 0.0 {
            return Err(Error::Numerical("X̂f vanishes on the grid interior".into()));
        }
        Ok(r.interior_norm(cfg.interior) / denom)
    }

    /// `‖Ĥ(X̂f) - E·X̂f‖/‖X̂f‖` evaluated exactly at sample points.
    pub fn exact_residual(&self, mode: &Mode, f: &Separated) -> Result<f64> {
        let g = self.apply_chain_exact(&self.mode_chain(mode)?, f)?;
        let hg = g.apply(&SeparatedOp::from_spec(&self.h_hat())?);
        let r = hg.add(&g.scale(-mode.energy));
        let b = self.oscillator_b();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 1..=40 {
            let u = 3.0 * i as f64 / 40.0 / b.sqrt();
            for j in 0..16 {
                let q = 0.3 + j as f64 * 0.39;
                num += r.eval(u, q).norm_sqr();
                den += g.eval(u, q).norm_sqr();
            }
        }
        Ok((num / den.max(1e-300)).sqrt())
    }

    /// Full report for one mode: spectra, exact chain, grid residual at the
    /// finest grid and the refinement study.
    pub fn warped_symmetry_residual(&self, mode: &Mode, cfg: &WarpedConfig) -> Result<VerificationReport> {
        let mut rep = VerificationReport::new(
            format!("warped symmetry, k = {}, ℓ = {}, n_r = {}", self.k, mode.ell, mode.n_r),
            0,
        );
        // spectra from dense eigensolves
        let n_eig = 400;
        let ls = l_hat_spectrum(self, n_eig, 2 * mode.ell.unsigned_abs() as usize + 1)?;
        let lam_grid = ls.last().copied().unwrap_or(f64::NAN);
        rep.push(
            CheckResult::new("spectrum:L0", (lam_grid - mode.lambda).abs() / mode.lambda.abs().max(1.0), 1e-3, n_eig)
                .with_detail(format!("grid λ = {lam_grid:.8}, analytic λ = {:.8}", mode.lambda)),
        );
        let es = h_m_spectrum(self, mode.m, n_eig, self.u_max(cfg), mode.n_r as usize + 1)?;
        let e_grid = es.last().copied().unwrap_or(f64::NAN);
        rep.push(
            CheckResult::new("spectrum:HM", (e_grid - mode.energy).abs() / mode.energy.abs(), 1e-3, n_eig)
                .with_detail(format!("grid E = {e_grid:.8}, analytic E = {:.8}", mode.energy)),
        );
        // separated eigenfunction and exact chain
        let hf = mode.f.apply(&SeparatedOp::from_spec(&self.h_hat())?);
        let sep = hf.add(&mode.f.scale(-mode.energy));
        rep.push(CheckResult::outcome(
            "separation",
            sep.is_zero(),
            "Ĥ(φψ) - Eφψ vanishes in closed form",
        ));
        let exact = self.exact_residual(mode, &mode.f)?;
        rep.push(CheckResult::new("warped-exact", exact, EXACT_TOL, 640));
        // grid residual at the finest size
        let fine = *cfg.grids.last().ok_or_else(|| Error::invalid("empty grid list"))?;
        let r_fine = self.grid_residual(mode, &mode.f, fine, Stencil::from_order(cfg.fine_order)?, cfg)?;
        rep.push(
            CheckResult::new("warped-grid", r_fine, WARPED_TOL, fine * fine)
                .with_detail(format!("{fine}² grid, order-{} stencil, {:?} chain", cfg.fine_order, cfg.chain)),
        );
        // refinement study
        let study = Stencil::from_order(cfg.study_order)?;
        let rs: Vec<f64> = cfg
            .grids
            .iter()
            .map(|&n| self.grid_residual(mode, &mode.f, n, study, cfg))
            .collect::<Result<_>>()?;
        for (n, r) in cfg.grids.iter().zip(&rs) {
            rep.push(
                CheckResult::outcome(&format!("residual@{n}"), true, format!("order-{} residual {r:.3e}", cfg.study_order))
                    .with_value(*r),
            );
        }
        for w in rs.windows(2).zip(cfg.grids.windows(2)) {
            let ((a, b), g) = ((w.0[0], w.0[1]), w.1);
            let ratio = a / b;
            let ok = ratio >= RATIO_RANGE.0 && ratio <= RATIO_RANGE.1;
            rep.push(
                CheckResult::outcome(&format!("refinement:{}→{}", g[0], g[1]), ok, format!("ratio {ratio:.3}"))
                    .with_value(ratio),
            );
        }
        Ok(rep)
    }

    /// `X̂` applied to `φ_{n_r} + φ_{n_r+1}`, which is not an eigenfunction,
    /// with the parameters of the first mode.
    pub fn negative_control(&self, mode: &Mode, cfg: &WarpedConfig) -> Result<CheckResult> {
        let (_, next) = self.radial_mode(mode.m, mode.n_r + 1)?;
        let mixed = mode.f.add(&Separated::product(next, Fourier::mode(mode.ell)));
        let fine = *cfg.grids.last().ok_or_else(|| Error::invalid("empty grid list"))?;
        let r = self.grid_residual(mode, &mixed, fine, Stencil::from_order(cfg.fine_order)?, cfg)?;
        let mut out = CheckResult::outcome("negative-control", r > CONTROL_MIN, format!("residual {r:.3e} (must exceed {CONTROL_MIN})"));
        out.value = r;
        out.tolerance = CONTROL_MIN;
        Ok(out)
    }

    /// `Ĝ⁺_ε e^{iℓq}` on a periodic grid of `n` nodes with spectral
    /// derivatives; FFT weight outside mode `ℓ+1`, relative.
    pub fn ghat_leakage(&self, ell: i32, n: usize, stencil: Stencil) -> Result<f64> {
        let (lambda, _) = self.angular_mode(ell)?;
        let (_, eps) = self.theorem_parameters(lambda)?;
        let op = self.ghat(&Expr::float(eps), Sign::Plus)?;
        let grid = GridSpec::angular(n);
        let f = GridFunction::from_fn(&grid, |_, q| Complex64::from_polar(1.0, f64::from(ell) * q));
        let g = apply_on_grid(&op, &f, Stencil::Fd2, stencil)?;
        let mut row = g.values.clone();
        rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut row);
        let target = (ell + 1).rem_euclid(n as i32) as usize;
        let total: f64 = row.iter().map(|c| c.norm_sqr()).sum();
        let off: f64 = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != target)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        Ok((off / total).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `λ̄ = λ`, same family member.
    Symmetry,
    /// Same family member, eigenvalue changed.
    Ladder,
    /// Maps into a different family member.
    Shift,
}

/// Operator family the classification is measured against.
#[derive(Clone, Debug)]
pub enum Family {
    /// `L̂₀` alone.
    Angular,
    /// `Ĥ^M`, `M` free.
    Radial,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyResult {
    pub kind: Classification,
    pub m_from: f64,
    pub m_to: f64,
    pub e_from: f64,
    pub e_to: f64,
    pub residual: f64,
}

/// Decide whether `op` is a symmetry, ladder or shift operator by fitting
/// `(M̄, Ē)` with `Ĥ_{M̄}(Ŝf) = Ē·Ŝf` for an eigenfunction `f` of `Ĥ_M`
/// with eigenvalue `E`.
pub fn shift_ladder_classify(
    sys: &QuantumSystem,
    op: &OperatorSpec,
    family: &Family,
    m: f64,
    e: f64,
    f: &Separated,
) -> Result<ClassifyResult> {
    let g = f.apply(&SeparatedOp::from_spec(op)?);
    if g.is_zero() {
        return Err(Error::Numerical("the operator annihilates the test function".into()));
    }
    let (base, coupling): (OperatorSpec, Option<OperatorSpec>) = match family {
        Family::Angular => (sys.l_hat.clone(), None),
        Family::Radial => {
            let base = sys.h_m_hat(&Expr::zero());
            let one = sys.h_m_hat(&Expr::one());
            let mut diff = one.clone();
            for (&ij, c) in &base.terms {
                diff.add_term(ij.0, ij.1, -c);
            }
            (base, Some(diff))
        }
    };
    let bg = g.apply(&SeparatedOp::from_spec(&base)?);
    let cg = match &coupling {
        Some(c) => Some(g.apply(&SeparatedOp::from_spec(c)?)),
        None => None,
    };
    // rows: Re/Im of  Ē·g - M̄·(C g) = B g
    let b = sys.oscillator_b().max(1e-3);
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for i in 1..=30 {
        let u = 0.3 / b.sqrt() + 2.5 * i as f64 / 30.0 / b.sqrt();
        for q in [0.4, 1.3, 2.9] {
            let gv = g.eval(u, q);
            let bv = bg.eval(u, q);
            let cv = cg.as_ref().map(|c| c.eval(u, q)).unwrap_or_default();
            rows.push((gv.re, -cv.re, bv.re));
            rows.push((gv.im, -cv.im, bv.im));
        }
    }
    let scale = rows.iter().map(|r| r.2.abs().max(r.0.abs())).fold(0.0, f64::max).max(1e-300);
    let (e_to, m_to) = if coupling.is_some() {
        let (s11, s12, s22, t1, t2) = rows.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, r| {
            (a.0 + r.0 * r.0, a.1 + r.0 * r.1, a.2 + r.1 * r.1, a.3 + r.0 * r.2, a.4 + r.1 * r.2)
        });
        let det = s11 * s22 - s12 * s12;
        if det.abs() < 1e-300 {
            return Err(Error::Numerical("degenerate fit for (M̄, Ē)".into()));
        }
        ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
    } else {
        let (s11, t1) = rows.iter().fold((0.0, 0.0), |a, r| (a.0 + r.0 * r.0, a.1 + r.0 * r.2));
        (t1 / s11, m)
    };
    let residual = rows
        .iter()
        .map(|r| (r.0 * e_to + r.1 * m_to - r.2).abs())
        .fold(0.0, f64::max)
        / scale;
    if residual > 1e-7 {
        return Err(Error::Numerical(format!(
            "no family member fits the image (residual {residual:.3e})"
        )));
    }
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0);
    let kind = if !same(m, m_to) {
        Classification::Shift
    } else if same(e, e_to) {
        Classification::Symmetry
    } else {
        Classification::Ladder
    };
    Ok(ClassifyResult {
        kind,
        m_from: m,
        m_to,
        e_from: e,
        e_to,
        residual,
    })
}

/// Coefficient-level identities behind the composition rules, checked
/// symbolically with `ε`, `μ`, `M`, `E` free:
///
/// * `(L̂₀ - λ(ε ± s))Ĝ±_ε ≡ 0` modulo `L̂₀ - λ(ε)`, `λ(ε) = ε²sgn(c) - c_N`,
///   and the same for the two-fold power with `ε ± 2s`;
/// * `(Ĥ^{M̄} - (E - δ))Â^{1,1}_μ ≡ 0` modulo `Ĥ^M - E`, `M = μ²`,
///   `M̄ = (μ + s)²`, and the two-fold power;
/// * `(Ĥ^M - (E ± 2δ))D̂±_E ≡ 0` modulo `Ĥ^M - E`, and the two-fold power.
pub fn composition_identities(sys: &QuantumSystem) -> Result<Vec<CheckResult>> {
    let eps = Expr::sym("eps");
    let mu = Expr::sym("mu");
    let big_m = Expr::sym("M");
    let e = Expr::sym("E");
    let sgn = Expr::int(if sys.c_f() > 0.0 { 1 } else { -1 });
    let cn = Expr::num(sys.c_n());
    let lam = |x: &Expr| (&sgn * x.powi(2) - &cn).simplify();
    let s = sys.s();
    let test = ZeroTest::default().with_points(24);
    let mut out = Vec::new();
    let mut record = |name: &str, c1: Expr, c0: Expr| {
        let v1 = test.run(&c1);
        let v0 = test.run(&c0);
        let ok = v1.is_zero() && v0.is_zero();
        out.push(CheckResult::outcome(name, ok, format!("∂-coefficient {v1:?}, 1-coefficient {v0:?}")));
    };
    // Ĝ± on L̂₀
    let reduce_q = |op: &OperatorSpec, lam_in: &Expr| {
        let a = sys.l_hat.coefficient(0, 2);
        let b = sys.l_hat.coefficient(0, 1);
        let v = sys.l_hat.coefficient(0, 0);
        let p = (-(&b) / &a).simplify();
        let r = ((lam_in - &v) / &a).simplify();
        op.reduce_mod(&sys.q, &p, &r)
    };
    for (sign, label) in [(Sign::Plus, "+"), (Sign::Minus, "-")] {
        let step = Expr::int(sign.value()) * &s;
        let g1 = sys.ghat(&eps, sign)?;
        let lhs = sys.l_hat.shifted(&lam(&(&eps + &step))).compose(&g1);
        let (c1, c0) = reduce_q(&lhs, &lam(&eps));
        record(&format!("Ĝ{label} ladder"), c1, c0);
        let g2 = sys.ghat_power(&eps, sign, 2)?;
        let lhs = sys.l_hat.shifted(&lam(&(&eps + Expr::int(2) * &step))).compose(&g2);
        let (c1, c0) = reduce_q(&lhs, &lam(&eps));
        record(&format!("(Ĝ{label})² ladder"), c1, c0);
    }
    // Â and D̂ on Ĥ^M
    let reduce_u = |op: &OperatorSpec, m: &Expr, energy: &Expr| {
        let h = sys.h_m_hat(m);
        let a = h.coefficient(2, 0);
        let p = (-h.coefficient(1, 0) / &a).simplify();
        let r = ((energy - h.coefficient(0, 0)) / &a).simplify();
        op.reduce_mod(&sys.u, &p, &r)
    };
    let delta = sys.delta();
    let m_of = |x: &Expr| (&sgn * x.powi(2)).simplify();
    let a1 = sys.ahat(Sign::Plus, Sign::Plus, &mu);
    let lhs = sys.h_m_hat(&m_of(&(&mu + &s))).shifted(&(&e - &delta)).compose(&a1);
    let (c1, c0) = reduce_u(&lhs, &m_of(&mu), &e);
    record("Â^{+,+} shift", c1, c0);
    let a2 = sys.ahat_power(Sign::Plus, Sign::Plus, &mu, 2);
    let lhs = sys
        .h_m_hat(&m_of(&(&mu + Expr::int(2) * &s)))
        .shifted(&(&e - Expr::int(2) * &delta))
        .compose(&a2);
    let (c1, c0) = reduce_u(&lhs, &m_of(&mu), &e);
    record("(Â^{+,+})² shift", c1, c0);
    for (sign, label) in [(Sign::Plus, "+"), (Sign::Minus, "-")] {
        let step = Expr::int(2 * sign.value()) * &delta;
        let d1 = sys.dhat(sign, &e);
        let lhs = sys.h_m_hat(&big_m).shifted(&(&e + &step)).compose(&d1);
        let (c1, c0) = reduce_u(&lhs, &big_m, &e);
        record(&format!("D̂{label} ladder"), c1, c0);
        let d2 = sys.dhat_power(sign, &e, 2);
        let lhs = sys.h_m_hat(&big_m).shifted(&(&e + Expr::int(2) * &step)).compose(&d2);
        let (c1, c0) = reduce_u(&lhs, &big_m, &e);
        record(&format!("(D̂{label})² ladder"), c1, c0);
    }
    Ok(out)
}

/// Radial and angular factors of `f` on the `(u, q)` symbols, for display.
pub fn describe(f: &Separated) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (t, (r, a)) in f.terms.iter().enumerate() {
        out.insert(
            format!("term{t}"),
            format!("u^{:.4} e^(-{:.4}u²) × {:?} × modes {:?}", r.a, r.beta, r.poly, a.support()),
        );
    }
    out
}
