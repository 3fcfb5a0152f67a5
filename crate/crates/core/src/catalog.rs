//! Built-in systems.
//!
//! Every entry carries its Hamiltonian `H` and, where the system is an
//! extension, the seed and spec realizing it. Published parameters are kept in
//! a dictionary next to the internal ones so that the correspondence can be
//! checked symbolically.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::expr::{rat, Chart, Expr, Rational, Symbol, ZeroTest};
use crate::extension::{build_extended, Extended, ExtensionSpec, SeedSystem};
use crate::sampling::SamplerConfig;
use crate::tagged_trig::GammaSpec;

/// Names accepted by [`lookup`].
pub const NAMES: &[&str] = &["ttw", "pw", "kepler", "jacobi-calogero", "aniso", "circle", "sphere"];

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub chart: Chart,
    pub h: Expr,
    pub seed: Option<SeedSystem>,
    pub spec: Option<ExtensionSpec>,
    /// Published symbol → value or expression in internal parameters.
    pub params: BTreeMap<String, Expr>,
    /// Equivalent forms of `H` on their own charts.
    pub forms: BTreeMap<String, (Chart, Expr)>,
    /// Angular coordinate of the seed, period `2π`.
    pub angular: Option<Symbol>,
    pub notes: Vec<String>,
}

impl CatalogEntry {
    pub fn extended(&self) -> Result<Extended> {
        match (&self.seed, &self.spec) {
            (Some(seed), Some(spec)) => build_extended(seed, spec),
            _ => Err(Error::unsupported(format!(
                "`{}` is not realized as an extension",
                self.name
            ))),
        }
    }

    /// The same entry with a new spec (same seed and `γ`).
    pub fn with_spec(&self, m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
        let spec = self
            .spec
            .as_ref()
            .ok_or_else(|| Error::unsupported(format!("`{}` has no extension spec", self.name)))?;
        let spec = ExtensionSpec::new(m, n, omega, spec.gamma.clone())?;
        let mut out = self.clone();
        out.h = build_extended(self.seed.as_ref().unwrap(), &spec)?.h;
        out.spec = Some(spec);
        Ok(out)
    }

    /// `H - build_extended(seed, spec).h`, or `None` without a seed.
    pub fn dictionary_residual(&self) -> Option<Expr> {
        let ext = self.extended().ok()?;
        Some((&self.h - &ext.h).simplify())
    }

    pub fn sampler(&self) -> SamplerConfig {
        self.seed.as_ref().map(|s| s.sampler.clone()).unwrap_or_default()
    }

    pub fn zero_test(&self) -> ZeroTest {
        ZeroTest::default().with_sampler(self.sampler())
    }
}

fn angle_chart(q: &str, p: &str) -> Chart {
    Chart::named(&[(q, p)]).expect("fixed chart names")
}

fn polar_chart(r: &str, pr: &str, q: &str, p: &str) -> Chart {
    Chart::named(&[(q, p)]).expect("fixed chart names").extended_with(r, pr)
}

fn guarded(name: &str) -> SamplerConfig {
    SamplerConfig::default().guard_sin(name, 1.0, 0.05)
}

/// `L = ½p_φ² + (c₁ + c₂cos φ)/sin²φ` with `G = sin φ·p_φ`, `c = 1`,
/// `c₀ = 0`, and the ladder data `cos φ` with its VE1 constant.
pub fn ttw_seed(c1: Expr, c2: Expr) -> Result<SeedSystem> {
    let chart = angle_chart("phi", "pphi");
    let phi = Expr::sym("phi");
    let v = ((c1 + c2 * phi.cos()) / phi.sin().powi(2)).simplify();
    let g = phi.sin() * Expr::sym("pphi");
    let seed = SeedSystem::natural("ttw-angular", chart, vec![vec![Expr::one()]], v, g, rat(1), rat(0))?
        .with_sampler(guarded("phi"));
    let lc1 = seed.solve_ve1_c1(&phi.cos())?;
    Ok(seed.with_ladder(phi.cos(), lc1))
}

/// `γ = 1/u`, the choice for which the extended metric is the Euclidean plane.
fn polar_gamma() -> GammaSpec {
    GammaSpec::new(rat(1), rat(0))
}

/// TTW as the extension of [`ttw_seed`] with `U_{m,n}`:
/// `H = ½p_u² + (m/n)²L/u² + Ωu²`.
pub fn ttw_extension(c1: Expr, c2: Expr, m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
    let seed = ttw_seed(c1.clone(), c2.clone())?;
    let spec = ExtensionSpec::new(m, n, omega.clone(), polar_gamma())?;
    let ext = build_extended(&seed, &spec)?;
    let mut params = BTreeMap::new();
    params.insert("c1".into(), c1);
    params.insert("c2".into(), c2);
    params.insert("omega".into(), omega);
    // the published TTW2 k multiplies L by 1/k²
    params.insert("k".into(), Expr::num(Rational::new(n.into(), m.into())));
    Ok(CatalogEntry {
        name: "ttw".into(),
        chart: ext.chart.clone(),
        h: ext.h.clone(),
        seed: Some(seed),
        spec: Some(spec),
        params,
        forms: BTreeMap::new(),
        angular: Some(Symbol::new("phi")),
        notes: vec![
            "u plays the role of r; Ω/γ² = Ωu², so Ω = ω".into(),
            "U_{m,n} uses m/n = 1/k with k the coefficient in 1/(k²r²)".into(),
        ],
    })
}

/// `H = ½p_r² + (1/r²)(½p_Φ² + α₁/cos²hΦ + α₂/sin²hΦ) + ωr²`, stored in its
/// extension form with `k = 1/(2h)`, `Φ = kφ`, `c₁ = (α₁+α₂)/(2h²)`,
/// `c₂ = (α₂-α₁)/(2h²)`.
pub fn ttw(alpha1: Rational, alpha2: Rational, omega: Rational, h: Rational) -> Result<CatalogEntry> {
    if !h.is_positive() {
        return Err(Error::invalid("h must be positive"));
    }
    let two_h2 = rat(2) * &h * &h;
    let c1 = (&alpha1 + &alpha2) / &two_h2;
    let c2 = (&alpha2 - &alpha1) / &two_h2;
    let ratio = rat(2) * &h;
    let m = u32::try_from(ratio.numer()).map_err(|_| Error::invalid("h too large"))?;
    let n = u32::try_from(ratio.denom()).map_err(|_| Error::invalid("h too large"))?;
    let mut entry = ttw_extension(Expr::num(c1.clone()), Expr::num(c2.clone()), m, n, Expr::num(omega.clone()))?;
    let k = Rational::new(n.into(), m.into());

    let (r, pr) = (Expr::sym("r"), Expr::sym("pr"));
    let (cap, pcap) = (Expr::sym("Phi"), Expr::sym("pPhi"));
    let hphi = Expr::num(h.clone()) * &cap;
    let ttw1 = (Expr::frac(1, 2) * pr.powi(2)
        + (Expr::frac(1, 2) * pcap.powi(2)
            + Expr::num(alpha1.clone()) / hphi.cos().powi(2)
            + Expr::num(alpha2.clone()) / hphi.sin().powi(2))
            / r.powi(2)
        + Expr::num(omega.clone()) * r.powi(2))
    .simplify();
    entry.forms.insert("ttw1".into(), (polar_chart("r", "pr", "Phi", "pPhi"), ttw1));

    // same system in Φ with c̃ᵢ = cᵢ/k²; the trig argument is φ = Φ/k
    let k2 = Expr::num(&k * &k);
    let phi_of_cap = &cap / Expr::num(k.clone());
    let ttw3 = (Expr::frac(1, 2) * pr.powi(2)
        + (Expr::frac(1, 2) * pcap.powi(2)
            + (Expr::num(c1.clone()) / &k2 + Expr::num(c2.clone()) / &k2 * phi_of_cap.cos())
                / phi_of_cap.sin().powi(2))
            / r.powi(2)
        + Expr::num(omega.clone()) * r.powi(2))
    .simplify();
    entry.forms.insert("ttw3".into(), (polar_chart("r", "pr", "Phi", "pPhi"), ttw3));

    for (name, v) in [("alpha1", alpha1), ("alpha2", alpha2), ("h", h)] {
        entry.params.insert(name.into(), Expr::num(v));
    }
    entry.params.insert("c1~".into(), Expr::num(&c1 / (&k * &k)));
    entry.params.insert("c2~".into(), Expr::num(&c2 / (&k * &k)));
    Ok(entry)
}

/// Maps a form on `(r, pr, Phi, pPhi)` to the extension chart `(u, pu, phi, pphi)`
/// through `Φ = kφ`, `p_Φ = p_φ/k`.
pub fn ttw_form_in_extension_chart(form: &Expr, k: &Rational) -> Expr {
    let phi = Expr::sym("phi");
    let pphi = Expr::sym("pphi");
    form.substitute(&[
        (Symbol::new("r"), Expr::sym("u")),
        (Symbol::new("pr"), Expr::sym("pu")),
        (Symbol::new("Phi"), Expr::num(k.clone()) * phi),
        (Symbol::new("pPhi"), pphi / Expr::num(k.clone())),
    ])
}

/// `H = ½p_r² + (k²/4r²)(½p_φ² + (c₁ + c₂cos φ)/sin²φ) - E/(2r)`.
/// Not an extension; `E` is a fixed coupling.
pub fn pw(c1: Expr, c2: Expr, k: Rational, e: Expr) -> Result<CatalogEntry> {
    let chart = polar_chart("u", "pu", "phi", "pphi");
    let (u, pu, phi, pphi) = (Expr::sym("u"), Expr::sym("pu"), Expr::sym("phi"), Expr::sym("pphi"));
    let inner = Expr::frac(1, 2) * pphi.powi(2) + (c1.clone() + c2.clone() * phi.cos()) / phi.sin().powi(2);
    let h = (Expr::frac(1, 2) * pu.powi(2)
        + Expr::num(&k * &k / rat(4)) / u.powi(2) * inner
        - e.clone() / (Expr::int(2) * &u))
        .simplify();
    let mut params = BTreeMap::new();
    params.insert("c1".into(), c1);
    params.insert("c2".into(), c2);
    params.insert("k".into(), Expr::num(k));
    params.insert("E".into(), e);
    Ok(CatalogEntry {
        name: "pw".into(),
        chart,
        h,
        seed: None,
        spec: None,
        params,
        forms: BTreeMap::new(),
        angular: Some(Symbol::new("phi")),
        notes: vec!["u plays the role of r".into()],
    })
}

pub fn kepler(k: Rational, e: Expr) -> Result<CatalogEntry> {
    let mut entry = pw(Expr::zero(), Expr::zero(), k, e)?;
    entry.name = "kepler".into();
    Ok(entry)
}

/// Three particles on a line with `V = Σ (xᵢ - xⱼ)⁻²`.
///
/// The main form is the translation-reduced polar one,
/// `H = ½p_r² + p_φ²/(2r²) + l/(r²sin²3φ)` with `l = 9/2` for unit coupling
/// (Jacobi coordinates `y₁ = r sin φ`, `y₂ = r cos φ`). Its seed is the TTW
/// seed in `ψ = 3φ` with `c₁ = l/9`, `c₂ = 0`, extended with `m/n = 3`.
pub fn jacobi_calogero() -> Result<CatalogEntry> {
    let l = rat(9) / rat(2);
    let cart = Chart::named(&[("x1", "p1"), ("x2", "p2"), ("x3", "p3")])?;
    let x: Vec<Expr> = ["x1", "x2", "x3"].iter().map(|s| Expr::sym(s)).collect();
    let p: Vec<Expr> = ["p1", "p2", "p3"].iter().map(|s| Expr::sym(s)).collect();
    let v = Expr::add_all((0..3).map(|i| {
        let j = (i + 1) % 3;
        (&x[i] - &x[j]).powi(-2)
    }));
    let h_cart = (Expr::frac(1, 2) * Expr::add_all(p.iter().map(|pi| pi.powi(2))) + v).simplify();

    let (r, pr, phi, pphi) = (Expr::sym("r"), Expr::sym("pr"), Expr::sym("phi"), Expr::sym("pphi"));
    let three_phi = Expr::int(3) * &phi;
    let h_polar = (Expr::frac(1, 2) * pr.powi(2)
        + pphi.powi(2) / (Expr::int(2) * r.powi(2))
        + Expr::num(l.clone()) / (r.powi(2) * three_phi.sin().powi(2)))
    .simplify();

    let mut entry = ttw_extension(Expr::num(&l / rat(9)), Expr::zero(), 3, 1, Expr::zero())?;
    entry.name = "jacobi-calogero".into();
    entry.angular = Some(Symbol::new("phi"));
    entry.params.insert("l".into(), Expr::num(l));
    entry.forms.insert("cartesian".into(), (cart, h_cart));
    entry.forms.insert("polar".into(), (polar_chart("r", "pr", "phi", "pphi"), h_polar));
    entry.notes = vec![
        "seed angle is ψ = 3φ; 3 is the analogue of k".into(),
        "polar form uses Jacobi coordinates y1 = r sin φ, y2 = r cos φ with Σx = 0".into(),
    ];
    Ok(entry)
}

/// Polar form of [`jacobi_calogero`] expressed in the extension chart (`ψ = 3φ`).
pub fn jacobi_polar_in_extension_chart(polar: &Expr) -> Expr {
    let psi = Expr::sym("phi");
    polar.substitute(&[
        (Symbol::new("r"), Expr::sym("u")),
        (Symbol::new("pr"), Expr::sym("pu")),
        (Symbol::new("phi"), psi / Expr::int(3)),
        (Symbol::new("pphi"), Expr::int(3) * Expr::sym("pphi")),
    ])
}

/// `L = ½p² + ½x²`, `G = x`, `c = 0`, `c₀ = ½`.
pub fn oscillator_seed() -> Result<SeedSystem> {
    let chart = angle_chart("x", "px");
    let x = Expr::sym("x");
    SeedSystem::natural(
        "oscillator",
        chart,
        vec![vec![Expr::one()]],
        Expr::frac(1, 2) * x.powi(2),
        x,
        rat(0),
        Rational::new(1.into(), 2.into()),
    )
}

/// `H = ½p_u² + k²(½p² + ½x²) + k²u²/2 + Ω/u²` via `γ = -u` (`C = 1`),
/// frequencies `k` in `u` and `k²` in `x`.
pub fn anisotropic_oscillator(m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
    let seed = oscillator_seed()?;
    let spec = ExtensionSpec::new(m, n, omega.clone(), GammaSpec::new(rat(0), rat(1)))?;
    let ext = build_extended(&seed, &spec)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), Expr::num(spec.k()));
    params.insert("Omega".into(), omega);
    Ok(CatalogEntry {
        name: "aniso".into(),
        chart: ext.chart.clone(),
        h: ext.h,
        seed: Some(seed),
        spec: Some(spec),
        params,
        forms: BTreeMap::new(),
        angular: None,
        notes: vec!["γ = -Cu with C = 1".into()],
    })
}

/// Free motion on the unit circle, `G = sin φ`, ladder data `cos φ`.
pub fn circle_seed() -> Result<SeedSystem> {
    let chart = angle_chart("phi", "pphi");
    let phi = Expr::sym("phi");
    Ok(SeedSystem::natural("circle", chart, vec![vec![Expr::one()]], Expr::zero(), phi.sin(), rat(1), rat(0))?
        .with_ladder(phi.cos(), Expr::zero()))
}

pub fn circle(m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
    let seed = circle_seed()?;
    let spec = ExtensionSpec::new(m, n, omega.clone(), polar_gamma())?;
    let ext = build_extended(&seed, &spec)?;
    let mut params = BTreeMap::new();
    params.insert("Omega".into(), omega);
    Ok(CatalogEntry {
        name: "circle".into(),
        chart: ext.chart.clone(),
        h: ext.h,
        seed: Some(seed),
        spec: Some(spec),
        params,
        forms: BTreeMap::new(),
        angular: Some(Symbol::new("phi")),
        notes: vec![],
    })
}

/// Geodesics on the unit sphere `diag(1, sin²θ)`, `G = cos θ`, `c = 1`.
pub fn sphere_seed() -> Result<SeedSystem> {
    let chart = Chart::named(&[("theta", "ptheta"), ("phi", "pphi")])?;
    let theta = Expr::sym("theta");
    let metric = vec![
        vec![Expr::one(), Expr::zero()],
        vec![Expr::zero(), theta.sin().powi(2)],
    ];
    Ok(SeedSystem::natural("sphere", chart, metric, Expr::zero(), theta.cos(), rat(1), rat(0))?
        .with_sampler(guarded("theta"))
        .with_ladder(theta.cos(), Expr::zero()))
}

/// Extension of the sphere with `γ = cot u` (`C = 1`), a round 3-sphere.
pub fn sphere(m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
    let seed = sphere_seed()?;
    let spec = ExtensionSpec::new(m, n, omega.clone(), GammaSpec::new(rat(1), rat(1)))?;
    let ext = build_extended(&seed, &spec)?;
    let mut params = BTreeMap::new();
    params.insert("Omega".into(), omega);
    Ok(CatalogEntry {
        name: "sphere".into(),
        chart: ext.chart.clone(),
        h: ext.h,
        seed: Some(seed),
        spec: Some(spec),
        params,
        forms: BTreeMap::new(),
        angular: Some(Symbol::new("phi")),
        notes: vec!["non-flat; the extended metric has constant curvature".into()],
    })
}

/// Default TTW couplings `α₁ = α₂ = 3/10`.
pub fn default_alpha() -> Rational {
    Rational::new(3.into(), 10.into())
}

/// Entry by CLI name with indices `(m, n)` and `Ω`.
pub fn lookup(name: &str, m: u32, n: u32, omega: Expr) -> Result<CatalogEntry> {
    match name {
        "ttw" => {
            let om = omega
                .as_rational()
                .ok_or_else(|| Error::invalid("TTW needs a numeric Ω"))?;
            let h = Rational::new(m.into(), (2 * n).into());
            ttw(default_alpha(), default_alpha(), om.clone(), h)
        }
        "pw" => pw(Expr::frac(1, 2), Expr::frac(1, 4), Rational::new(m.into(), n.into()), Expr::one()),
        "kepler" => kepler(Rational::new(m.into(), n.into()), Expr::one()),
        "jacobi-calogero" => jacobi_calogero()?.with_spec(m, n, omega),
        "aniso" => anisotropic_oscillator(m, n, omega),
        "circle" => circle(m, n, omega),
        "sphere" => sphere(m, n, omega),
        other => Err(Error::invalid(format!(
            "unknown catalog entry `{other}` (known: {})",
            NAMES.join(", ")
        ))),
    }
}

/// Every seed in the catalog.
pub fn seeds() -> Result<Vec<SeedSystem>> {
    Ok(vec![
        ttw_seed(Expr::frac(3, 5), Expr::frac(1, 5))?,
        ttw_seed(Expr::sym("c1"), Expr::sym("c2"))?,
        circle_seed()?,
        sphere_seed()?,
        oscillator_seed()?,
        jacobi_calogero()?.seed.unwrap(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::PhasePoint;

    #[test]
    fn every_seed_satisfies_condition() {
        for seed in seeds().unwrap() {
            let check = seed.check_extension_condition();
            assert!(check.residual.is_zero_symbolic(), "{}: {}", seed.name, check.residual);
        }
    }

    #[test]
    fn dictionaries_hold() {
        for name in ["ttw", "jacobi-calogero", "aniso", "circle", "sphere"] {
            let e = lookup(name, 3, 2, Expr::one()).unwrap();
            assert!(e.dictionary_residual().unwrap().is_zero_symbolic(), "{name}");
        }
    }

    #[test]
    fn ttw_forms_agree() {
        let e = ttw(rat(1) / rat(5), rat(2) / rat(5), rat(1), Rational::new(3.into(), 4.into())).unwrap();
        let k = Rational::new(2.into(), 3.into());
        for form in ["ttw1", "ttw3"] {
            let mapped = ttw_form_in_extension_chart(&e.forms[form].1, &k);
            let d = (&mapped - &e.h).simplify();
            assert!(e.zero_test().run(&d).is_zero(), "{form}: {d}");
        }
    }

    #[test]
    fn ttw_h_half_is_k_one() {
        let e = ttw(rat(1), rat(2), rat(1), Rational::new(1.into(), 2.into())).unwrap();
        assert_eq!(e.spec.as_ref().unwrap().k(), rat(1));
        let mapped = ttw_form_in_extension_chart(&e.forms["ttw1"].1, &rat(1));
        assert!(e.zero_test().run(&(&mapped - &e.h)).is_zero());
    }

    #[test]
    fn ttw1_evaluates() {
        let e = ttw(rat(0), rat(0), rat(1), Rational::new(1.into(), 2.into())).unwrap();
        let pt = PhasePoint::from_pairs([
            ("r", 1.0),
            ("Phi", std::f64::consts::FRAC_PI_4),
            ("pr", 0.0),
            ("pPhi", 1.0),
        ]);
        let v = e.forms["ttw1"].1.eval(&pt).unwrap();
        assert!((v - 1.5).abs() < 1e-14);
    }

    #[test]
    fn ttw_angular_ladder_constant() {
        let seed = ttw_seed(Expr::sym("c1"), Expr::sym("c2")).unwrap();
        let c1 = &seed.ladder.as_ref().unwrap().c1;
        assert!((c1 + Expr::sym("c2")).simplify().is_zero_symbolic(), "{c1}");
    }

    #[test]
    fn pw_specializes_to_kepler() {
        let k = Rational::new(3.into(), 2.into());
        let e = kepler(k.clone(), Expr::sym("E")).unwrap();
        let (u, pu, pphi) = (Expr::sym("u"), Expr::sym("pu"), Expr::sym("pphi"));
        let expected = Expr::frac(1, 2) * pu.powi(2)
            + Expr::num(&k * &k / rat(8)) * pphi.powi(2) / u.powi(2)
            - Expr::sym("E") / (Expr::int(2) * u);
        assert!(e.h.equivalent(&expected));
        let p = pw(Expr::sym("c1"), Expr::sym("c2"), k, Expr::one()).unwrap();
        let b = crate::expr::poisson(&p.h, &pphi, &p.chart);
        assert!(!b.is_zero_symbolic());
    }

    #[test]
    fn jacobi_calogero_forms() {
        let e = jacobi_calogero().unwrap();
        let (chart, h) = &e.forms["cartesian"];
        let v = h.substitute(&chart.momenta().iter().map(|p| (p.clone(), Expr::zero())).collect::<Vec<_>>());
        let pt = PhasePoint::from_pairs([("x1", 0.0), ("x2", 1.0), ("x3", 3.0)]);
        assert_eq!(v.eval(&pt).unwrap(), 49.0 / 36.0);
        let polar = &e.forms["polar"].1;
        let shifted = polar.substitute(&[(
            Symbol::new("phi"),
            Expr::sym("phi") + Expr::int(2) * Expr::sym("pi_3"),
        )]);
        let mut pt = PhasePoint::from_pairs([("r", 1.3), ("pr", 0.2), ("phi", 0.4), ("pphi", 0.7)]);
        pt.set("pi_3", std::f64::consts::PI / 3.0);
        assert!((shifted.eval(&pt).unwrap() - polar.eval(&pt).unwrap()).abs() < 1e-9);
        let mapped = jacobi_polar_in_extension_chart(polar);
        assert!(e.zero_test().run(&(&mapped - &e.h)).is_zero());
    }

    #[test]
    fn aniso_shape() {
        let e = anisotropic_oscillator(2, 1, Expr::zero()).unwrap();
        let (u, pu, x, px) = (Expr::sym("u"), Expr::sym("pu"), Expr::sym("x"), Expr::sym("px"));
        let expected = Expr::frac(1, 2) * pu.powi(2)
            + Expr::int(4) * (Expr::frac(1, 2) * px.powi(2) + Expr::frac(1, 2) * x.powi(2))
            + Expr::int(2) * u.powi(2);
        assert!(e.h.equivalent(&expected), "{}", e.h);
    }

    #[test]
    fn sphere_hessian_vanishes() {
        let s = sphere_seed().unwrap();
        for row in s.check_hessian().unwrap() {
            for e in row {
                assert!(e.is_zero_symbolic(), "{e}");
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(lookup("nope", 1, 1, Expr::zero()).is_err());
        assert!(ttw(rat(0), rat(0), rat(1), rat(0)).is_err());
    }
}
