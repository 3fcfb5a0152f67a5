//! Acceptance battery: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extham::catalog;
use extham::cli::default_start;
use extham::expr::{rat, ratio, Rational, ZeroTest};
use extham::extension::{build_extended, eigen_identity_residuals, g_closed_form, g_recursion, Extended, ExtensionSpec, SeedSystem};
use extham::intrinsic::{check_extension, check_warp_conditions, extended_metric, extension_ckv};
use extham::quantum::{QuantumSystem, Stencil, WarpedConfig};
use extham::tagged_trig::{c_kappa, s_kappa, GammaSpec};
use extham::verification::{
    bracket_residual, independence_rank, integrate, orbit_closure, single_valuedness_2pi, Dopri5,
};
use extham::{Expr, Symbol};

const SEED_CONDITION_BUDGET: Duration = Duration::from_secs(5);
const BRACKET_TOL: f64 = 1e-9;
const BRACKET_POINTS: usize = 100;
const BRACKET_CASE_BUDGET: Duration = Duration::from_secs(30);
const RANK_POINTS: usize = 200;
const RANK_FRACTION: f64 = 0.95;
const CLOSURE_EPS: f64 = 1e-3;
const CLOSURE_T: f64 = 200.0;
const DRIFT_TOL: f64 = 1e-6;
const DRIFT_T: f64 = 20.0;
const TRIG_TOL: f64 = 1e-12;
const TRIG_FD_TOL: f64 = 1e-6;
const TRIG_FD_STEP: f64 = 1e-6;
const QUANTUM_BUDGET: Duration = Duration::from_secs(600);
const LEAKAGE_GRID: usize = 1024;
const LEAKAGE_TOL: f64 = 1e-6;

const BATTERY: [(u32, u32); 5] = [(1, 1), (1, 2), (2, 1), (3, 2), (2, 3)];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn vanishes(e: &Expr, test: &ZeroTest) -> (bool, bool) {
    let v = test.run(e);
    (v.is_zero(), v.is_symbolic())
}

/// `(name, extension)` for every battery case of criteria 2, 6 and 7.
fn battery() -> Vec<(String, Extended)> {
    let mut out = Vec::new();
    for name in ["ttw", "aniso"] {
        for (m, n) in BATTERY {
            for om in [0, 1] {
                let e = catalog::lookup(name, m, n, Expr::int(om)).unwrap().extended().unwrap();
                out.push((format!("{name}({m},{n},Ω={om})"), e));
            }
        }
    }
    out
}

/// An extension of `seed` with the simplest `γ` on its branch.
fn plain_extension(seed: &SeedSystem, m: u32, n: u32) -> Extended {
    let big_c = if seed.c == rat(0) { rat(1) } else { rat(0) };
    let spec = ExtensionSpec::new(m, n, Expr::zero(), GammaSpec::new(seed.c.clone(), big_c)).unwrap();
    build_extended(seed, &spec).unwrap()
}

fn c1_extension_condition() -> Outcome {
    let seeds = catalog::seeds().unwrap();
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for s in &seeds {
        let t = Instant::now();
        let check = s.check_extension_condition();
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        if !check.verdict.is_symbolic() || dt > SEED_CONDITION_BUDGET {
            bad.push(format!("{} ({:?}, {dt:.2?})", s.name, check.verdict));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} seeds symbolic zero, slowest {slowest:.2?}; failing: {bad:?}", seeds.len()),
    )
}

fn c2_involution(cases: &[(String, Extended)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut bad = Vec::new();
    for (name, e) in cases {
        let t = Instant::now();
        let k = e.characteristic_integral().unwrap();
        let r = bracket_residual(&e.h, &k.expr, &e.chart, &e.sampler(), BRACKET_POINTS, BRACKET_TOL);
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        worst = worst.max(r.value);
        if !r.passed || r.points < BRACKET_POINTS || dt > BRACKET_CASE_BUDGET {
            bad.push(format!("{name}: {:.2e} at {} points, {dt:.2?}", r.value, r.points));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} cases, worst residual {worst:.2e} (tol {BRACKET_TOL:e}), slowest {slowest:.2?}; failing: {bad:?}", cases.len()),
    )
}

fn c3_recursion_closed_form() -> Outcome {
    let mut bad = Vec::new();
    let mut numeric = 0;
    let mut checked = 0;
    for s in catalog::seeds().unwrap() {
        let test = s.zero_test();
        for (i, g) in g_recursion(&s, 6).iter().enumerate() {
            let d = (g - g_closed_form(&s, i as u32 + 1)).simplify();
            checked += 1;
            if !d.is_zero_symbolic() {
                bad.push(format!("{} G_{}", s.name, i + 1));
            }
        }
        for n in 1..=2u32 {
            let gn = g_recursion(&s, n).pop().unwrap();
            for m in 1..=4u32 {
                let e = plain_extension(&s, m, n);
                for r in 0..=m {
                    let d = (e.u_apply(&gn, m, n, r) - e.u_closed_form(&gn, m, n, r)).simplify();
                    let (zero, symbolic) = vanishes(&d, &test);
                    checked += 1;
                    numeric += usize::from(zero && !symbolic);
                    if !zero {
                        bad.push(format!("{} U^{r}_({m},{n})", s.name));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} identities, {numeric} by numeric zero test; failing: {bad:?}"),
    )
}

fn c4_eigen_identity() -> Outcome {
    let mut bad = Vec::new();
    let seeds = catalog::seeds().unwrap();
    for s in &seeds {
        for (i, r) in eigen_identity_residuals(s, 5).iter().enumerate() {
            if !r.is_zero_symbolic() {
                bad.push(format!("{} n={}", s.name, i + 1));
            }
        }
    }
    outcome(bad.is_empty(), format!("n=1..5 on {} seeds; failing: {bad:?}", seeds.len()))
}

fn ttw_start() -> extham::PhasePoint {
    extham::PhasePoint::from_pairs([("u", 1.0), ("pu", 0.1), ("phi", 1.0), ("pphi", 0.5)])
}

fn c5_superintegrability() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, n) in [(1, 2), (2, 1), (3, 2)] {
        let e = catalog::lookup("ttw", m, n, Expr::one()).unwrap().extended().unwrap();
        let k = e.characteristic_integral().unwrap().expr;
        let rank = independence_rank(&[e.h.clone(), e.seed.l.clone(), k], &e.chart, &e.sampler(), RANK_POINTS).unwrap();
        let f = rank.fraction(3);
        ok &= f >= RANK_FRACTION && rank.points == RANK_POINTS;
        parts.push(format!("rank3 k={m}/{n} {:.1}%", 100.0 * f));
    }
    for (m, n) in [(2, 1), (3, 2)] {
        let e = catalog::lookup("ttw", m, n, Expr::one()).unwrap().extended().unwrap();
        let traj = integrate(&e.h, &e.chart, &ttw_start(), CLOSURE_T, &Dopri5::default(), &[]).unwrap();
        let c = orbit_closure(&traj, CLOSURE_EPS);
        ok &= c.closed && c.bounded;
        parts.push(format!("closure k={m}/{n} {} (d={:.1e}, T={:?})", c.closed, c.min_distance, c.period.map(|p| (p * 1e3).round() / 1e3)));
    }
    // k ≈ √2: irrational-looking ratio, the orbit must not close
    let e = catalog::lookup("ttw", 7071, 5000, Expr::one()).unwrap().extended().unwrap();
    let traj = integrate(&e.h, &e.chart, &ttw_start(), CLOSURE_T, &Dopri5::default(), &[]).unwrap();
    let c = orbit_closure(&traj, CLOSURE_EPS);
    ok &= !c.closed && traj.truncated.is_none();
    parts.push(format!("control k=7071/5000 closed={} (min d={:.1e})", c.closed, c.min_distance));
    outcome(ok, parts.join("; "))
}

fn c6_conservation(cases: &[(String, Extended)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, e) in cases {
        let k = e.characteristic_integral().unwrap().expr;
        let start = default_start(&e.chart);
        let traj = integrate(&e.h, &e.chart, &start, DRIFT_T, &Dopri5::default(), &[("K", &k)]).unwrap();
        let d = traj.monitor("K").unwrap().relative_drift();
        worst = worst.max(d);
        if d >= DRIFT_TOL || traj.truncated.is_some() {
            bad.push(format!("{name}: {d:.2e} {:?}", traj.truncated));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} trajectories to t={DRIFT_T}, worst K drift {worst:.2e} (tol {DRIFT_TOL:e}); failing: {bad:?}", cases.len()),
    )
}

fn c7_single_valued(cases: &[(String, Extended)]) -> Outcome {
    let phi = Symbol::new("phi");
    let mut bad = Vec::new();
    let mut n = 0;
    for (name, e) in cases.iter().filter(|(n, _)| n.starts_with("ttw")) {
        let k = e.characteristic_integral().unwrap().expr;
        let r = single_valuedness_2pi(&k, &e.chart, &phi, &e.sampler());
        n += 1;
        if !r.passed {
            bad.push(name.clone());
        }
    }
    let e = catalog::lookup("ttw", 3, 2, Expr::zero()).unwrap().extended().unwrap();
    let counter = (Expr::frac(3, 2) * Expr::sym("phi")).cos();
    let r = single_valuedness_2pi(&counter, &e.chart, &phi, &e.sampler());
    outcome(
        bad.is_empty() && !r.passed,
        format!("{n} generated K single-valued; cos(3φ/2) jump {:.2e} rejected={}; failing: {bad:?}", r.value, !r.passed),
    )
}

fn c8_tagged_trig() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (mut pyth, mut dsd, mut dcd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for kappa in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.5..1.5);
            let (s, c) = (s_kappa(kappa, x), c_kappa(kappa, x));
            pyth = pyth.max((c * c + kappa * s * s - 1.0).abs());
            let h = TRIG_FD_STEP;
            let ds = (s_kappa(kappa, x + h) - s_kappa(kappa, x - h)) / (2.0 * h);
            let dc = (c_kappa(kappa, x + h) - c_kappa(kappa, x - h)) / (2.0 * h);
            dsd = dsd.max((ds - c).abs() / c.abs().max(1.0));
            dcd = dcd.max((dc + kappa * s).abs() / (kappa * s).abs().max(1.0));
        }
    }
    let u = Symbol::new("u");
    let branches: [(i64, Rational); 8] = [
        (0, rat(1)),
        (0, rat(-3)),
        (1, rat(0)),
        (2, rat(0)),
        (1, rat(1)),
        (1, rat(-1)),
        (2, ratio(1, 2)),
        (-1, rat(2)),
    ];
    let mut ode_bad = Vec::new();
    for (c, big_c) in branches.iter().cloned() {
        if !GammaSpec::new(rat(c), big_c.clone()).check_ode(&u).is_zero() {
            ode_bad.push(format!("c={c} C={big_c}"));
        }
    }
    outcome(
        pyth < TRIG_TOL && dsd < TRIG_FD_TOL && dcd < TRIG_FD_TOL && ode_bad.is_empty(),
        format!(
            "C²+κS²-1 {pyth:.1e} (tol {TRIG_TOL:e}), dS-C {dsd:.1e}, dC+κS {dcd:.1e} (tol {TRIG_FD_TOL:e}), γ-ODE on {} branches; failing: {ode_bad:?}",
            branches.len()
        ),
    )
}

fn c9_intrinsic() -> Outcome {
    let ttw = catalog::lookup("ttw", 3, 2, Expr::one()).unwrap().extended().unwrap();
    let flat = check_extension(&ttw).unwrap();
    let sphere = catalog::lookup("sphere", 2, 1, Expr::one()).unwrap().extended().unwrap();
    let curved = check_extension(&sphere).unwrap();
    let (g, v) = extended_metric(&ttw).unwrap();
    let x = extension_ckv(&ttw).unwrap();
    let mutated = check_warp_conditions(&g, &x, &(&v + Expr::sym("phi")), &ttw.sampler()).unwrap();
    let detail = |r: &extham::verification::VerificationReport| {
        r.checks.iter().find(|c| c.name == "ricci-eigen").map(|c| c.detail.clone()).unwrap_or_default()
    };
    let broken = mutated.failures();
    outcome(
        flat.passed && curved.passed && broken == ["dV^X"],
        format!(
            "ttw {} checks pass={} ({}); sphere pass={} ({}); mutated Ṽ breaks {broken:?}",
            flat.checks.len(),
            flat.passed,
            detail(&flat),
            curved.passed,
            detail(&curved)
        ),
    )
}

fn c10_quantum() -> Outcome {
    let t = Instant::now();
    let cfg = WarpedConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [1, 2] {
        let ext = catalog::circle(m, 1, Expr::frac(9, 8)).unwrap().extended().unwrap();
        let sys = QuantumSystem::new(&ext, rat(1)).unwrap();
        ok &= sys.c_n() == rat(0);
        let (pairs, skipped) = sys.lowest_pairs(2).unwrap();
        ok &= pairs.len() == 2;
        for p in &pairs {
            let rep = sys.warped_symmetry_residual(p, &cfg).unwrap();
            let grid = rep.check("warped-grid").map_or(f64::NAN, |c| c.value);
            let ratios: Vec<String> = rep
                .checks
                .iter()
                .filter(|c| c.name.starts_with("refinement"))
                .map(|c| format!("{:.3}", c.value))
                .collect();
            ok &= rep.passed;
            parts.push(format!("k={m} (ℓ={},n_r={}) res {grid:.1e} ratios {}", p.ell, p.n_r, ratios.join("/")));
        }
        let control = sys.negative_control(&pairs[0], &cfg).unwrap();
        ok &= control.passed;
        parts.push(format!("k={m} control {:.2} skipped {}", control.value, skipped.len()));
    }
    let dt = t.elapsed();
    ok &= dt < QUANTUM_BUDGET;
    parts.push(format!("c_N=0, {dt:.1?}"));
    outcome(ok, parts.join("; "))
}

fn c11_ladder() -> Outcome {
    let mut bad = Vec::new();
    for s in catalog::seeds().unwrap() {
        let Ok(lf) = s.ladder_functions() else { continue };
        let (p, m) = lf.eigen_residuals(&s);
        for (sign, r) in [("+", p), ("-", m)] {
            if !(r.re.is_zero_symbolic() && r.im.is_zero_symbolic()) {
                bad.push(format!("{} G{sign}", s.name));
            }
        }
    }
    let ext = catalog::circle(1, 1, Expr::frac(9, 8)).unwrap().extended().unwrap();
    let sys = QuantumSystem::new(&ext, rat(1)).unwrap();
    let leak = (1..=3)
        .map(|l| sys.ghat_leakage(l, LEAKAGE_GRID, Stencil::Spectral).unwrap())
        .fold(0.0, f64::max);
    outcome(
        bad.is_empty() && leak < LEAKAGE_TOL,
        format!("X_L G± ∓ fG± symbolic zero; Ĝ⁺ leakage {leak:.1e} at {LEAKAGE_GRID} nodes (tol {LEAKAGE_TOL:e}); failing: {bad:?}"),
    )
}

fn main() -> ExitCode {
    let cases = battery();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("extension condition", Box::new(c1_extension_condition)),
        ("involution", Box::new(|| c2_involution(&cases))),
        ("recursion = closed form", Box::new(c3_recursion_closed_form)),
        ("eigen-identity", Box::new(c4_eigen_identity)),
        ("superintegrability signature", Box::new(c5_superintegrability)),
        ("conservation", Box::new(|| c6_conservation(&cases))),
        ("global definition", Box::new(|| c7_single_valued(&cases))),
        ("tagged-trig identities", Box::new(c8_tagged_trig)),
        ("intrinsic conditions", Box::new(c9_intrinsic)),
        ("quantum warped symmetry", Box::new(c10_quantum)),
        ("ladder relations", Box::new(c11_ladder)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        println!(
            "criterion {:>2} {}: {} [{:.1?}] {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            name,
            t.elapsed(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
