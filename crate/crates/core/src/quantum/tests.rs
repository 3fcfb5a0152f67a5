use super::*;
use crate::catalog;
use crate::expr::{rat, Expr, Symbol};
use crate::extension::build_extended;

fn circle_system(m: u32, n: u32) -> QuantumSystem {
    let entry = catalog::circle(m, n, Expr::frac(9, 8)).unwrap();
    let ext = entry.extended().unwrap();
    QuantumSystem::new(&ext, rat(1)).unwrap()
}

#[test]
fn c_n_vanishes_for_one_dimensional_base() {
    assert_eq!(c_n(&rat(1), &rat(1), 1), rat(0));
    assert_eq!(c_n(&rat(2), &rat(3), 1), rat(0));
    // N = 3: -ħ²c·4/8
    assert_eq!(c_n(&rat(1), &rat(1), 3), -crate::expr::ratio(1, 2));
}

#[test]
fn omega_from_big_omega() {
    let sys = circle_system(1, 1);
    // Ω = 9/8 → ω = 3/2
    assert!((sys.omega_value - 1.5).abs() < 1e-15);
    assert!((sys.delta_value() - 1.5).abs() < 1e-15);
}

#[test]
fn rejects_unsupported_regimes() {
    let seed = catalog::circle_seed().unwrap();
    let spec = crate::extension::ExtensionSpec::new(
        1,
        1,
        Expr::one(),
        crate::tagged_trig::GammaSpec::new(rat(1), rat(1)),
    )
    .unwrap();
    let ext = build_extended(&seed, &spec).unwrap();
    assert!(matches!(QuantumSystem::new(&ext, rat(1)), Err(crate::Error::Unsupported(_))));

    let zero = catalog::circle(1, 1, Expr::zero()).unwrap().extended().unwrap();
    assert!(matches!(QuantumSystem::new(&zero, rat(1)), Err(crate::Error::InvalidArgument(_))));

    let sphere = catalog::sphere(1, 1, Expr::one()).unwrap().extended().unwrap();
    assert!(QuantumSystem::new(&sphere, rat(1)).is_err());
}

#[test]
fn l_hat_circle_coefficients() {
    let sys = circle_system(1, 1);
    assert!(sys.l_hat.coefficient(0, 2).equivalent(&Expr::frac(-1, 2)));
    assert!(sys.l_hat.coefficient(0, 1).is_zero_symbolic());
    assert!(sys.l_hat.coefficient(0, 0).is_zero_symbolic());
}

#[test]
fn n1_reduces_ghat_constant() {
    // N = 1: a₁⁺ = -ε√(2|c|)/ħ, no c(1-N)/2 term
    let sys = circle_system(1, 1);
    let g = sys.ghat(&Expr::sym("eps"), Sign::Plus).unwrap();
    let phi = Expr::sym("phi");
    let expected = -(Expr::sym("eps") * Expr::int(2).sqrt()) * phi.cos();
    assert!((&g.coefficient(0, 0) - &expected).zero_test().is_zero());
    assert!((&g.coefficient(0, 1) + phi.sin()).zero_test().is_zero());
}

#[test]
fn compose_matches_sequential_application() {
    let sys = circle_system(2, 1);
    let e = Expr::sym("E");
    let d2 = sys.dhat_power(Sign::Plus, &e, 2);
    let chain = sys.dhat_chain(Sign::Plus, &e, 2);
    let u = Expr::sym("u");
    let f = u.powi(3) * Expr::sym("phi").sin() + u;
    let seq = chain[1].apply_expr(&chain[0].apply_expr(&f));
    assert!((d2.apply_expr(&f) - seq).zero_test().is_zero());
    // stepped index: E, E + 2δ
    let direct = sys.dhat(Sign::Plus, &(&e + Expr::int(2) * sys.delta())).compose(&sys.dhat(Sign::Plus, &e));
    for (k, c) in &d2.terms {
        let other = direct.coefficient(k.0, k.1);
        assert!((c - &other).zero_test().is_zero(), "term {k:?}");
    }
}

#[test]
fn composition_identities_hold_on_circle() {
    for (m, n) in [(1, 1), (2, 1)] {
        let sys = circle_system(m, n);
        for check in composition_identities(&sys).unwrap() {
            assert!(check.passed, "{} failed: {}", check.name, check.detail);
        }
    }
}

#[test]
fn printed_a_hat_coefficient_is_not_a_shift() {
    // Â with +τ√(2|c|)μ/(2cu), as printed, fails the shift identity
    let sys = circle_system(1, 1);
    let mu = Expr::sym("mu");
    let u = Expr::sym("u");
    let printed = OperatorSpec::zero("Â", &sys.u, &sys.q)
        .with_term(1, 0, Expr::one())
        .with_term(0, 0, (&sys.omega * &u + Expr::int(2).sqrt() * &mu / (Expr::int(2) * &u)).simplify());
    let h = sys.h_m_hat(&(&mu + sys.s()).powi(2));
    let e = Expr::sym("E");
    let lhs = h.shifted(&(&e - sys.delta())).compose(&printed);
    let hm = sys.h_m_hat(&mu.powi(2));
    let a = hm.coefficient(2, 0);
    let p = (-hm.coefficient(1, 0) / &a).simplify();
    let r = ((&e - hm.coefficient(0, 0)) / &a).simplify();
    let (c1, c0) = lhs.reduce_mod(&sys.u, &p, &r);
    assert!(!(c1.zero_test().is_zero() && c0.zero_test().is_zero()));
}

#[test]
fn laguerre_mode_is_radial_eigenfunction() {
    let sys = circle_system(1, 1);
    for ell in [1, 2] {
        for n_r in 0..3 {
            let mode = sys.mode(ell, n_r).unwrap();
            let hf = mode.f.apply(&SeparatedOp::from_spec(&sys.h_hat()).unwrap());
            let r = hf.add(&mode.f.scale(-mode.energy));
            assert!(r.is_zero(), "ℓ={ell} n_r={n_r}: {r:?}");
        }
    }
}

#[test]
fn dense_spectra_match_analytic() {
    let sys = circle_system(1, 1);
    let ls = l_hat_spectrum(&sys, 400, 5).unwrap();
    // 0, ½, ½, 2, 2
    for (got, want) in ls.iter().zip([0.0, 0.5, 0.5, 2.0, 2.0]) {
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }
    let (e0, _) = sys.radial_mode(0.5, 0).unwrap();
    let (e1, _) = sys.radial_mode(0.5, 1).unwrap();
    let es = h_m_spectrum(&sys, 0.5, 400, 7.0 / sys.oscillator_b().sqrt(), 2).unwrap();
    assert!((es[0] - e0).abs() / e0 < 1e-3, "{} vs {e0}", es[0]);
    assert!((es[1] - e1).abs() / e1 < 1e-3, "{} vs {e1}", es[1]);
}

#[test]
fn exact_chain_is_warped_symmetry() {
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let sys = circle_system(m, n);
        for ell in [1, 2] {
            let mode = sys.mode(ell, m).unwrap();
            let r = sys.exact_residual(&mode, &mode.f).unwrap();
            assert!(r < EXACT_TOL, "(m,n)=({m},{n}) ℓ={ell}: {r:e}");
        }
    }
}

#[test]
fn chain_annihilates_low_radial_modes() {
    let sys = circle_system(2, 1);
    let mode = sys.mode(1, 1).unwrap();
    let g = sys.apply_chain_exact(&sys.mode_chain(&mode).unwrap(), &mode.f).unwrap();
    assert!(g.is_zero());
    let (kept, skipped) = sys.lowest_pairs(2).unwrap();
    assert_eq!(kept.len(), 2);
    assert!(kept.iter().all(|m| m.n_r >= 2 && m.ell >= 1));
    assert!(!skipped.is_empty());
}

#[test]
fn ghat_raises_circle_mode_without_leakage() {
    let sys = circle_system(1, 1);
    for ell in [1, 2, 5] {
        let leak = sys.ghat_leakage(ell, 1024, Stencil::Spectral).unwrap();
        assert!(leak < LEAKAGE_TOL, "ℓ={ell}: {leak:e}");
    }
    // with an ε that does not match the mode, both neighbours are hit
    let op = sys.ghat(&Expr::float(0.3), Sign::Plus).unwrap();
    let f = Separated::product(Radial::new(0.0, 0.0, [(0, 1.0)].into()), Fourier::mode(2));
    let img = f.apply(&SeparatedOp::from_spec(&op).unwrap());
    assert!(img.terms[0].1.leakage(3) > 1e-2);
}

#[test]
fn classify_identity_ladder_shift() {
    let sys = circle_system(1, 1);
    let mode = sys.mode(1, 1).unwrap();
    let id = OperatorSpec::identity(&sys.u, &sys.q);
    let r = shift_ladder_classify(&sys, &id, &Family::Radial, mode.m, mode.energy, &mode.f).unwrap();
    assert_eq!(r.kind, Classification::Symmetry);

    let (lam, psi) = sys.angular_mode(2).unwrap();
    let (_, eps) = sys.theorem_parameters(lam).unwrap();
    let g = sys.ghat(&Expr::float(eps), Sign::Plus).unwrap();
    let f = Separated::product(Radial::new(0.0, 0.0, [(0, 1.0)].into()), psi);
    let r = shift_ladder_classify(&sys, &g, &Family::Angular, 0.0, lam, &f).unwrap();
    assert_eq!(r.kind, Classification::Ladder);
    assert!(r.e_to > lam);
    assert!((r.e_to - 4.5).abs() < 1e-9);

    let a = sys.ahat(Sign::Plus, Sign::Plus, &Expr::float(mode.m.sqrt()));
    let r = shift_ladder_classify(&sys, &a, &Family::Radial, mode.m, mode.energy, &mode.f).unwrap();
    assert_eq!(r.kind, Classification::Shift);
    let mbar = (mode.m.sqrt() + sys.s_value()).powi(2);
    assert!((r.m_to - mbar).abs() < 1e-8, "{} vs {mbar}", r.m_to);
    assert!((r.e_to - (mode.energy - sys.delta_value())).abs() < 1e-8);
}

#[test]
fn grid_residual_converges_at_second_order() {
    let sys = circle_system(1, 1);
    let mode = sys.mode(1, 1).unwrap();
    let cfg = WarpedConfig {
        grids: vec![64, 128],
        ..WarpedConfig::default()
    };
    let a = sys.grid_residual(&mode, &mode.f, 64, Stencil::Fd2, &cfg).unwrap();
    let b = sys.grid_residual(&mode, &mode.f, 128, Stencil::Fd2, &cfg).unwrap();
    let ratio = a / b;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn non_eigenfunction_breaks_the_relation() {
    let sys = circle_system(1, 1);
    let mode = sys.mode(1, 1).unwrap();
    let cfg = WarpedConfig {
        grids: vec![128],
        ..WarpedConfig::default()
    };
    let c = sys.negative_control(&mode, &cfg).unwrap();
    assert!(c.passed, "{}", c.detail);
}

#[test]
fn grid_csv_header() {
    let grid = GridSpec::new(2, 3, 1.0);
    let f = GridFunction::from_fn(&grid, num_complex::Complex64::new);
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("u,q,re,im\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn ttw_angular_spectrum_runs() {
    let seed = catalog::ttw_seed(Expr::frac(3, 5), Expr::frac(1, 5)).unwrap();
    let l = build_l_hat(&seed, &rat(1), &Symbol::new("u")).unwrap();
    assert!(l.coefficient(0, 0).depends_on(&Symbol::new("phi")));
    let entry = catalog::ttw_extension(Expr::frac(3, 5), Expr::frac(1, 5), 1, 1, Expr::one()).unwrap();
    let sys = QuantumSystem::new(&entry.extended().unwrap(), rat(1)).unwrap();
    let a = l_hat_spectrum(&sys, 200, 2).unwrap();
    let b = l_hat_spectrum(&sys, 400, 2).unwrap();
    assert!(a[0] > 0.0);
    assert!((a[0] - b[0]).abs() / b[0] < 1e-2);
    // no analytic angular modes for V ≠ 0
    assert!(matches!(sys.angular_mode(1), Err(crate::Error::Unsupported(_))));
}
