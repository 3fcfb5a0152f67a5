use proptest::prelude::*;

use extham::catalog;
use extham::cli::{parse_k, parse_seed};
use extham::expr::{parse, poisson, rat, ratio, Chart, Expr, PhasePoint, Symbol};
use extham::extension::{eigen_identity_residuals, g_closed_form, g_recursion};
use extham::quantum::{c_n, Fourier, Radial};
use extham::sampling::SamplerConfig;
use extham::tagged_trig::{c_kappa, s_kappa, GammaSpec};

fn chart() -> Chart {
    Chart::standard(2)
}

/// Smooth expressions in `q1, q2, p1, p2` with small rational constants.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Expr::frac(n, d)),
        prop::sample::select(vec!["q1", "q2", "p1", "p2"]).prop_map(Expr::sym),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.prop_map(|a| (a.powi(2) + Expr::one()).recip()),
        ]
    })
}

fn arb_point() -> impl Strategy<Value = PhasePoint> {
    prop::array::uniform4(-1.5f64..1.5).prop_map(|v| {
        PhasePoint::from_pairs([("q1", v[0]), ("q2", v[1]), ("p1", v[2]), ("p2", v[3])])
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back(e in arb_expr()) {
        let back = parse(&e.to_string(), &chart()).unwrap();
        prop_assert!(back.equivalent(&e), "{e} → {back}");
    }

    #[test]
    fn simplify_preserves_value(e in arb_expr(), pt in arb_point()) {
        let (a, b) = (e.eval(&pt).unwrap(), e.simplify().eval(&pt).unwrap());
        prop_assert!(close(a, b, 1e-10), "{a} vs {b}");
    }

    #[test]
    fn derivative_matches_central_difference(e in arb_expr(), pt in arb_point()) {
        let q1 = Symbol::new("q1");
        let d = e.diff(&q1).eval(&pt).unwrap();
        let x = pt.get(&q1).unwrap();
        let h = 1e-6;
        let plus = e.eval(&pt.clone().with("q1", x + h)).unwrap();
        let minus = e.eval(&pt.clone().with("q1", x - h)).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        prop_assert!(close(d, fd, 1e-5), "{d} vs {fd} for {e}");
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(f in arb_expr(), g in arb_expr(), h in arb_expr()) {
        let c = chart();
        let anti = (poisson(&f, &g, &c) + poisson(&g, &f, &c)).simplify();
        prop_assert!(anti.is_zero_symbolic());
        let leibniz = (poisson(&f, &(&g * &h), &c) - poisson(&f, &g, &c) * &h - &g * poisson(&f, &h, &c)).simplify();
        prop_assert!(leibniz.is_zero_symbolic());
    }

    #[test]
    fn tagged_pythagoras_and_derivatives(kappa in -3.0f64..3.0, x in -1.2f64..1.2) {
        let (s, c) = (s_kappa(kappa, x), c_kappa(kappa, x));
        prop_assert!((c * c + kappa * s * s - 1.0).abs() < 1e-12);
        let h = 1e-6;
        let ds = (s_kappa(kappa, x + h) - s_kappa(kappa, x - h)) / (2.0 * h);
        let dc = (c_kappa(kappa, x + h) - c_kappa(kappa, x - h)) / (2.0 * h);
        prop_assert!(close(ds, c, 1e-6));
        prop_assert!(close(dc, -kappa * s, 1e-6));
    }

    #[test]
    fn gamma_solves_its_ode(c in -3i64..=3, big_c in -3i64..=3, u in 0.1f64..0.7) {
        prop_assume!(c != 0 || big_c != 0);
        let spec = GammaSpec::new(rat(c), rat(big_c));
        let g = |x: f64| spec.gamma_value(x);
        let (Ok(g0), Ok(gp), Ok(gm)) = (g(u), g(u + 1e-6), g(u - 1e-6)) else { return Ok(()) };
        prop_assume!(g0.abs() < 1e3);
        let dg = (gp - gm) / 2e-6;
        let res = dg + c as f64 * g0 * g0 + big_c as f64;
        prop_assert!(res.abs() < 1e-5 * (1.0 + g0 * g0), "residual {res}");
    }

    #[test]
    fn seed_sampling_is_deterministic(seed in any::<u64>()) {
        let cfg = SamplerConfig::default().with_seed(seed);
        let vars = chart().variables();
        let a = cfg.sampler().next_point(&vars);
        let b = cfg.sampler().next_point(&vars);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cli_parsers_round_trip(seed in any::<u64>(), m in 1u32..50, n in 1u32..50, s in 1u32..5) {
        prop_assert_eq!(parse_seed(&seed.to_string()).unwrap(), seed);
        prop_assert_eq!(parse_seed(&format!("0x{seed:X}")).unwrap(), seed);
        let (a, b) = parse_k(&format!("{}/{}", m * s, n * s)).unwrap();
        prop_assert_eq!(a * n, b * m);
        prop_assert_eq!(num_gcd(a, b), 1);
    }

    #[test]
    fn c_n_vanishes_at_n_one(hn in 1i64..9, hd in 1i64..9, cn in -9i64..9) {
        prop_assert_eq!(c_n(&ratio(hn, hd), &rat(cn), 1), rat(0));
    }

    #[test]
    fn radial_derivative_matches_difference(n in 0u32..4, alpha in 0.0f64..3.0, a in 0.0f64..3.0, u in 0.3f64..2.5) {
        let r = Radial::laguerre(a, 0.7, n, alpha);
        let d = r.derivative().eval(u);
        let fd = (r.eval(u + 1e-6) - r.eval(u - 1e-6)) / 2e-6;
        prop_assert!(close(d, fd, 1e-5), "{d} vs {fd}");
    }

    #[test]
    fn fourier_mode_has_no_leakage(l in -6i32..6, q in 0.0f64..6.3) {
        let f = Fourier::mode(l);
        prop_assert_eq!(f.leakage(l), 0.0);
        let d = f.derivative().eval(q);
        let expect = f.eval(q) * num_complex::Complex64::new(0.0, f64::from(l));
        prop_assert!((d - expect).norm() < 1e-12);
    }
}

fn num_gcd(a: u32, b: u32) -> u32 {
    if b == 0 { a } else { num_gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Random TTW couplings: recursion and closed form agree, and the
    /// eigen-identity holds.
    #[test]
    fn ttw_recursion_for_random_couplings(a in -5i64..5, b in -5i64..5, d in 1i64..4) {
        let seed = catalog::ttw_seed(Expr::frac(a, d), Expr::frac(b, d)).unwrap();
        for (i, g) in g_recursion(&seed, 3).iter().enumerate() {
            prop_assert!((g - g_closed_form(&seed, i as u32 + 1)).simplify().is_zero_symbolic());
        }
        for r in eigen_identity_residuals(&seed, 3) {
            prop_assert!(r.is_zero_symbolic());
        }
    }
}
