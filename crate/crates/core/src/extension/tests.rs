use super::*;
use crate::expr::{parse, rat};

fn circle() -> SeedSystem {
    let chart = Chart::standard(1);
    let g = parse("sin(q1)", &chart).unwrap();
    SeedSystem::natural("circle", chart, vec![vec![Expr::one()]], Expr::zero(), g, rat(1), rat(0))
        .unwrap()
        .with_ladder(Expr::cos(&Expr::sym("q1")), Expr::zero())
}

fn oscillator() -> SeedSystem {
    let chart = Chart::standard(1);
    let v = parse("q1^2/2", &chart).unwrap();
    let g = parse("q1", &chart).unwrap();
    SeedSystem::natural("osc", chart, vec![vec![Expr::one()]], v, g, rat(0), Rational::new(1.into(), 2.into()))
        .unwrap()
}

fn ext(seed: &SeedSystem, m: u32, n: u32, omega: i64, big_c: i64) -> Extended {
    let spec = ExtensionSpec::new(m, n, Expr::int(omega), GammaSpec::new(seed.c.clone(), rat(big_c))).unwrap();
    build_extended(seed, &spec).unwrap()
}

fn vanishes(ext: &Extended, e: &Expr) -> bool {
    ZeroTest::default().with_sampler(ext.sampler()).run(e).is_zero()
}

#[test]
fn seeds_satisfy_condition() {
    assert!(circle().check_extension_condition().holds());
    assert!(oscillator().check_extension_condition().holds());
}

#[test]
fn bad_seed_is_rejected() {
    let mut s = circle();
    s.c = rat(2);
    assert!(matches!(s.validate(), Err(Error::InvalidSeed(_))));
}

#[test]
fn recursion_matches_closed_form() {
    for seed in [circle(), oscillator()] {
        let rec = g_recursion(&seed, 4);
        for (i, gn) in rec.iter().enumerate() {
            let d = (gn - g_closed_form(&seed, i as u32 + 1)).simplify();
            assert!(d.is_zero_symbolic(), "n = {}: {d}", i + 1);
        }
        for r in eigen_identity_residuals(&seed, 4) {
            assert!(r.is_zero_symbolic(), "{r}");
        }
    }
}

#[test]
fn u_power_matches_p_and_d() {
    let seed = circle();
    let e = ext(&seed, 3, 2, 0, 1);
    let g2 = g_recursion(&seed, 2).pop().unwrap();
    for r in 0..4 {
        let d = (e.u_apply(&g2, 3, 2, r) - e.u_closed_form(&g2, 3, 2, r)).simplify();
        assert!(vanishes(&e, &d), "r = {r}: {d}");
    }
    let d1 = (e.d_closed(1, 2, 1) - &e.gamma / Expr::int(4)).simplify();
    assert!(d1.is_zero_symbolic());
}

#[test]
fn k_commutes_with_h() {
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let e = ext(&circle(), m, n, 0, 1);
        let k = e.k_integral().unwrap();
        assert_eq!(k.momentum_degree, (m + n - 1) as i32);
        let b = e.bracket(&e.h, &k.expr).simplify();
        assert!(vanishes(&e, &b), "({m},{n}): {b}");
        let cf = (&k.expr - &e.k_closed_form().expr).simplify();
        assert!(vanishes(&e, &cf));
    }
}

#[test]
fn kbar_commutes_with_h() {
    for (m, n) in [(1, 1), (2, 1), (1, 2)] {
        let e = ext(&circle(), m, n, 3, 1);
        assert!(e.k_integral().is_err());
        let k = e.characteristic_integral().unwrap();
        let b = e.bracket(&e.h, &k.expr).simplify();
        assert!(vanishes(&e, &b), "({m},{n}): {b}");
    }
    let e = ext(&circle(), 2, 1, 3, 1);
    let d = (e.kbar_integral(1, 1).expr - e.kbar_expansion(1, 1)).simplify();
    assert!(vanishes(&e, &d));
}

#[test]
fn zero_c_extension() {
    let e = ext(&oscillator(), 2, 1, 0, 1);
    let k = e.k_integral().unwrap();
    let b = e.bracket(&e.h, &k.expr).simplify();
    assert!(vanishes(&e, &b), "{b}");
    assert!(e.factorized_integrals().is_err());
}

#[test]
fn ladder_functions_are_eigenfunctions() {
    let seed = circle();
    let lf = seed.ladder_functions().unwrap();
    assert_eq!(lf.regime, LadderRegime::Imaginary);
    let (p, m) = lf.eigen_residuals(&seed);
    let e = ext(&seed, 1, 1, 1, 1);
    assert!(vanishes(&e, &p.re) && vanishes(&e, &p.im));
    assert!(vanishes(&e, &m.re) && vanishes(&e, &m.im));
}

#[test]
fn m_form_matches_h() {
    let e = ext(&circle(), 2, 3, 2, 1);
    let d = (e.m_form().unwrap() - &e.h).simplify();
    assert!(vanishes(&e, &d), "{d}");
}

#[test]
fn factorized_integrals_commute_with_h() {
    for (m, n) in [(1, 1), (2, 1), (1, 2)] {
        let e = ext(&circle(), m, n, 1, 1);
        let f = e.factorized_integrals().unwrap();
        for x in [&f.x_plus, &f.x_minus] {
            let b = x.poisson_real(&e.h, &e.chart);
            assert!(vanishes(&e, &b.re) && vanishes(&e, &b.im), "({m},{n})");
        }
    }
}

#[test]
fn warped_split_recovers_h() {
    let e = ext(&circle(), 1, 2, 1, 0);
    let h = warped_product(&warped_factors(&e)).unwrap();
    assert!((h - &e.h).simplify().is_zero_symbolic());
}
