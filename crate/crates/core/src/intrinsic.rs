//! Intrinsic characterization of extended metrics.
//!
//! An extended Hamiltonian lives on a warped manifold `(Q̃, g̃)` carrying a
//! conformal Killing vector `X` (`ℒ_X g̃ = φg̃`). The warp conditions are
//!
//! ```text
//! dX♭ ∧ X♭ = 0,   dφ ∧ X♭ = 0,   d‖X‖ ∧ X♭ = 0,   d(X(Ṽ) + φṼ) ∧ X♭ = 0
//! ```
//!
//! and extended metrics additionally have `X` as a Ricci eigenvector,
//! `R̃(X) = aX`. Forms are handled as antisymmetric component arrays.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol, ZeroTest};
use crate::extension::Extended;
use crate::geometry::{Matrix, MetricData};
use crate::sampling::SamplerConfig;
use crate::tagged_trig::s_kappa_expr;
use crate::verification::{CheckResult, VerificationReport};

/// Components `Xᵃ` over the coordinates of a metric.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub components: Vec<Expr>,
}

impl VectorField {
    pub fn new(components: Vec<Expr>) -> Self {
        VectorField { components }
    }

    /// `X♭_a = g_{ab}Xᵇ`.
    pub fn flat(&self, g: &MetricData) -> Vec<Expr> {
        g.lower(&self.components)
    }

    /// `X(f) = Xᵃ∂_a f`.
    pub fn apply(&self, g: &MetricData, f: &Expr) -> Expr {
        Expr::add_all(
            self.components
                .iter()
                .zip(g.coords())
                .map(|(x, q)| x * f.diff_simplified(q)),
        )
        .simplify()
    }
}

#[derive(Clone, Debug)]
pub struct ConformalFactor {
    pub phi: Expr,
    /// `ℒ_X g - φg`.
    pub residual: Matrix,
    pub conformal: bool,
}

fn check_dim(g: &MetricData, x: &VectorField) -> Result<()> {
    if x.components.len() != g.dim() {
        return Err(Error::invalid(format!(
            "vector field has {} components, metric dimension is {}",
            x.components.len(),
            g.dim()
        )));
    }
    Ok(())
}

/// `(ℒ_X g)_{ab} = Xᶜ∂_c g_{ab} + g_{cb}∂_a Xᶜ + g_{ac}∂_b Xᶜ`.
pub fn lie_derivative_metric(g: &MetricData, x: &VectorField) -> Matrix {
    let n = g.dim();
    let q = g.coords();
    let gm = g.g();
    let dx: Vec<Vec<Expr>> = x
        .components
        .iter()
        .map(|xc| q.iter().map(|qa| xc.diff_simplified(qa)).collect())
        .collect(); // dx[c][a] = ∂_a Xᶜ
    let mut out = vec![vec![Expr::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let transport = Expr::add_all((0..n).map(|c| &x.components[c] * gm[a][b].diff_simplified(&q[c])));
            let rot = Expr::add_all((0..n).map(|c| &gm[c][b] * &dx[c][a] + &gm[a][c] * &dx[c][b]));
            let v = (transport + rot).simplify();
            out[a][b] = v.clone();
            out[b][a] = v;
        }
    }
    out
}

/// `φ = tr(g⁻¹ℒ_X g)/n`, with the deviation `ℒ_X g - φg`.
pub fn conformal_factor(g: &MetricData, x: &VectorField, test: &ZeroTest) -> Result<ConformalFactor> {
    check_dim(g, x)?;
    let n = g.dim();
    let lie = lie_derivative_metric(g, x);
    let ginv = g.inverse();
    let trace = Expr::add_all((0..n).flat_map(|a| {
        let (lie, ginv) = (&lie, ginv);
        (0..n).map(move |b| &ginv[a][b] * &lie[a][b])
    }));
    let phi = (trace / Expr::int(n as i64)).simplify();
    let residual: Matrix = (0..n)
        .map(|a| (0..n).map(|b| (&lie[a][b] - &phi * &g.g()[a][b]).simplify()).collect())
        .collect();
    let conformal = residual.iter().flatten().all(|e| test.run(e).is_zero());
    Ok(ConformalFactor {
        phi,
        residual,
        conformal,
    })
}

/// `(dα)_{ij} = ∂_iα_j - ∂_jα_i` for `i < j`.
fn exterior_d(alpha: &[Expr], q: &[Symbol]) -> Vec<((usize, usize), Expr)> {
    let n = alpha.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(((i, j), (alpha[j].diff_simplified(&q[i]) - alpha[i].diff_simplified(&q[j])).simplify()));
        }
    }
    out
}

/// Components of `a ∧ b` for one-forms.
fn wedge11(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let n = a.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((&a[i] * &b[j] - &a[j] * &b[i]).simplify());
        }
    }
    out
}

/// Components of `ω ∧ b` for a two-form `ω` and a one-form `b`.
fn wedge21(omega: &[((usize, usize), Expr)], b: &[Expr]) -> Vec<Expr> {
    let n = b.len();
    let get = |i: usize, j: usize| -> Expr {
        omega
            .iter()
            .find(|((a, c), _)| *a == i && *c == j)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(Expr::zero)
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((get(i, j) * &b[k] + get(j, k) * &b[i] - get(i, k) * &b[j]).simplify());
            }
        }
    }
    out
}

fn gradient_form(f: &Expr, q: &[Symbol]) -> Vec<Expr> {
    q.iter().map(|x| f.diff_simplified(x)).collect()
}

fn form_check(name: &str, comps: &[Expr], test: &ZeroTest) -> CheckResult {
    let mut worst = CheckResult::new(name, 0.0, test.tol, 0).with_detail("symbolic");
    for c in comps {
        let r = CheckResult::from_verdict(name, &test.run(c), test.tol);
        if !r.passed {
            return r;
        }
        if r.value >= worst.value {
            worst = r;
        }
    }
    worst
}

/// The four warp conditions. `d‖X‖` is replaced by `d(‖X‖²)`, which has the
/// same wedge with `X♭` wherever `X ≠ 0`.
pub fn check_warp_conditions(g: &MetricData, x: &VectorField, v: &Expr, sampler: &SamplerConfig) -> Result<VerificationReport> {
    check_dim(g, x)?;
    let test = ZeroTest::default().with_sampler(sampler.clone());
    let q = g.coords();
    let cf = conformal_factor(g, x, &test)?;
    let xb = x.flat(g);
    let mut rep = VerificationReport::new("warp-conditions", sampler.seed);
    rep.push(CheckResult::outcome(
        "conformal",
        cf.conformal,
        format!("phi = {}", cf.phi),
    ));
    rep.push(form_check("dX^X", &wedge21(&exterior_d(&xb, q), &xb), &test));
    rep.push(form_check("dphi^X", &wedge11(&gradient_form(&cf.phi, q), &xb), &test));
    let norm2 = Expr::add_all(xb.iter().zip(&x.components).map(|(a, b)| a * b)).simplify();
    rep.push(form_check("dnorm^X", &wedge11(&gradient_form(&norm2, q), &xb), &test));
    let pot = (x.apply(g, v) + &cf.phi * v).simplify();
    rep.push(form_check("dV^X", &wedge11(&gradient_form(&pot, q), &xb), &test));
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct RicciEigen {
    #[serde(serialize_with = "ser_expr")]
    pub a: Expr,
    pub check: CheckResult,
    /// `X(a) = 0`.
    pub constant_along_x: bool,
}

fn ser_expr<S: serde::Serializer>(e: &Expr, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

/// `R̃ᵃ_b Xᵇ = aXᵃ`, with `a` read off the first component of `X` that is
/// not identically zero.
pub fn ricci_eigen(g: &MetricData, x: &VectorField, sampler: &SamplerConfig) -> Result<RicciEigen> {
    check_dim(g, x)?;
    let test = ZeroTest::default().with_sampler(sampler.clone());
    let n = g.dim();
    let ric = g.ricci();
    let ginv = g.inverse();
    let rx: Vec<Expr> = (0..n)
        .map(|a| {
            Expr::add_all((0..n).flat_map(|c| {
                let (ric, ginv, x) = (ric, ginv, &x.components);
                (0..n).map(move |b| &ginv[a][c] * &ric[c][b] * &x[b])
            }))
            .simplify()
        })
        .collect();
    let lead = (0..n)
        .find(|&i| !x.components[i].is_zero_symbolic())
        .ok_or_else(|| Error::invalid("X vanishes identically"))?;
    let a = (&rx[lead] / &x.components[lead]).simplify();
    let residual: Vec<Expr> = (0..n)
        .map(|i| (&rx[i] - &a * &x.components[i]).simplify())
        .collect();
    let check = form_check("ricci-eigen", &residual, &test);
    let xa = x.apply(g, &a);
    let constant_along_x = test.run(&xa).is_zero();
    Ok(RicciEigen {
        a,
        check,
        constant_along_x,
    })
}

/// Metric `g̃` and potential `Ṽ` of an extended Hamiltonian, read off the
/// momentum Hessian of `H`, on the coordinates `(q.., u)`.
pub fn extended_metric(ext: &Extended) -> Result<(MetricData, Expr)> {
    let p = ext.chart.all_momenta();
    let n = p.len();
    let inv: Matrix = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| ext.h.diff_simplified(&p[a]).diff_simplified(&p[b]))
                .collect()
        })
        .collect();
    let g = crate::geometry::invert(&inv);
    let metric = MetricData::new(ext.chart.all_positions(), g)?;
    let zero: Vec<(Symbol, Expr)> = p.iter().map(|s| (s.clone(), Expr::zero())).collect();
    let v = ext.h.substitute(&zero);
    Ok((metric, v))
}

/// The conformal Killing vector `S_κ(c(u - u₀))∂_u` (`∂_u` when `c = 0`).
pub fn extension_ckv(ext: &Extended) -> Result<VectorField> {
    let gs = &ext.spec.gamma;
    let n = ext.chart.all_positions().len();
    let mut comps = vec![Expr::zero(); n];
    comps[n - 1] = match gs.kappa() {
        None => Expr::one(),
        Some(kappa) => {
            if num_traits::Signed::is_negative(&gs.c) {
                return Err(Error::unsupported("c < 0 gives an indefinite extended metric"));
            }
            let x = Expr::num(gs.c.clone()) * (ext.u() - Expr::num(gs.shift.clone()));
            s_kappa_expr(&kappa, &x)
        }
    };
    Ok(VectorField::new(comps))
}

/// Warp conditions and the Ricci eigen test for an extended Hamiltonian.
pub fn check_extension(ext: &Extended) -> Result<VerificationReport> {
    let (g, v) = extended_metric(ext)?;
    let x = extension_ckv(ext)?;
    let sampler = ext.sampler();
    let mut rep = check_warp_conditions(&g, &x, &v, &sampler)?;
    rep.subject = format!("intrinsic:{}", ext.seed.name);
    let re = ricci_eigen(&g, &x, &sampler)?;
    rep.push(re.check.clone().with_detail(format!("a = {}", re.a)));
    rep.push(CheckResult::outcome("ricci-eigenvalue-constant-along-X", re.constant_along_x, ""));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn polar() -> MetricData {
        MetricData::diagonal(&["r", "phi"], vec![Expr::one(), Expr::sym("r").powi(2)]).unwrap()
    }

    fn sampler() -> SamplerConfig {
        SamplerConfig::default().range("r", crate::sampling::Range::Interval(0.2, 2.0))
    }

    #[test]
    fn radial_field_is_homothetic() {
        let t = ZeroTest::default().with_sampler(sampler());
        let x = VectorField::new(vec![Expr::sym("r"), Expr::zero()]);
        let cf = conformal_factor(&polar(), &x, &t).unwrap();
        assert!(cf.conformal);
        assert!(cf.phi.equivalent(&Expr::int(2)));
        let rot = VectorField::new(vec![Expr::zero(), Expr::one()]);
        let cf = conformal_factor(&polar(), &rot, &t).unwrap();
        assert!(cf.conformal && cf.phi.is_zero_symbolic());
        let dr = VectorField::new(vec![Expr::one(), Expr::zero()]);
        assert!(!conformal_factor(&polar(), &dr, &t).unwrap().conformal);
    }

    #[test]
    fn cartesian_chart_agrees() {
        let t = ZeroTest::default();
        let flat = MetricData::diagonal(&["x", "y"], vec![Expr::one(), Expr::one()]).unwrap();
        let x = VectorField::new(vec![Expr::sym("x"), Expr::sym("y")]);
        let cf = conformal_factor(&flat, &x, &t).unwrap();
        assert!(cf.conformal && cf.phi.equivalent(&Expr::int(2)));
    }

    #[test]
    fn ttw_passes_and_mutation_breaks_potential_condition() {
        let e = catalog::lookup("ttw", 3, 2, Expr::one()).unwrap().extended().unwrap();
        let rep = check_extension(&e).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        let (g, v) = extended_metric(&e).unwrap();
        let x = extension_ckv(&e).unwrap();
        let bad = &v + Expr::sym("phi");
        let rep = check_warp_conditions(&g, &x, &bad, &e.sampler()).unwrap();
        assert_eq!(rep.failures(), vec!["dV^X".to_string()]);
        let re = ricci_eigen(&g, &x, &e.sampler()).unwrap();
        assert!(re.a.is_zero_symbolic());
    }

    #[test]
    fn omega_zero_potential_is_homogeneous() {
        let e = catalog::lookup("ttw", 1, 1, Expr::zero()).unwrap().extended().unwrap();
        let (g, v) = extended_metric(&e).unwrap();
        let x = extension_ckv(&e).unwrap();
        let cf = conformal_factor(&g, &x, &ZeroTest::default()).unwrap();
        assert!((x.apply(&g, &v) + &cf.phi * &v).simplify().is_zero_symbolic());
    }

    #[test]
    fn sphere_extension_is_ricci_eigen() {
        let e = catalog::lookup("sphere", 2, 1, Expr::zero()).unwrap().extended().unwrap();
        let rep = check_extension(&e).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        let (g, _) = extended_metric(&e).unwrap();
        let re = ricci_eigen(&g, &extension_ckv(&e).unwrap(), &e.sampler()).unwrap();
        assert!(re.a.equivalent(&Expr::int(2)), "a = {}", re.a);
    }

    #[test]
    fn unit_sphere_every_field_is_eigen() {
        let theta = Expr::sym("theta");
        let g = MetricData::diagonal(&["theta", "phi"], vec![Expr::one(), theta.sin().powi(2)]).unwrap();
        let s = SamplerConfig::default().guard_sin("theta", 1.0, 0.05);
        let x = VectorField::new(vec![theta.cos(), Expr::sym("phi")]);
        let re = ricci_eigen(&g, &x, &s).unwrap();
        assert!(re.check.passed);
        assert!(re.a.equivalent(&Expr::one()));
    }
}
