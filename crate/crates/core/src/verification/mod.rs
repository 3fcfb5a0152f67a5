//! Numeric verification harness: bracket residuals, functional independence,
//! trajectories, orbit closure and single-valuedness.
//!
//! Every check returns a [`CheckResult`] line; reports collect them and
//! serialize to JSON.

mod integrate;
mod report;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{norm, Chart, CompiledGradient, CompiledPoly, Expr, PhasePoint, Symbol};
use crate::sampling::SamplerConfig;

pub use integrate::{
    integrate, orbit_closure, write_trajectory_csv, Closure, Dopri5, Monitor, Trajectory,
};
pub use report::{CheckResult, VerificationReport};

pub const BRACKET_TOL: f64 = 1e-9;
pub const RANK_THRESHOLD: f64 = 1e-8;
pub const SINGLE_VALUED_TOL: f64 = 1e-10;

/// `{f, g}` from numeric gradients in `chart.variables()` order.
fn bracket_from_gradients(df: &[f64], dg: &[f64], dof: usize) -> f64 {
    (0..dof)
        .map(|i| df[i] * dg[dof + i] - df[dof + i] * dg[i])
        .sum()
}

/// Normalized residual `|{H,K}| / (1 + ‖∇H‖‖∇K‖)` at `points` sampled points.
pub fn bracket_residual(
    h: &Expr,
    k: &Expr,
    chart: &Chart,
    sampler: &SamplerConfig,
    points: usize,
    tol: f64,
) -> CheckResult {
    let gh = CompiledGradient::new(h, chart);
    let gk = CompiledGradient::new(k, chart);
    let vars = sample_symbols(&[h, k], chart);
    let dof = chart.dim() / 2;
    let mut s = sampler.sampler();
    let mut worst = 0.0f64;
    let mut worst_pt = None;
    let mut n = 0;
    let mut tries = 0;
    while n < points && tries < 50 * points {
        tries += 1;
        let pt = s.next_point(&vars);
        let (Ok(dh), Ok(dk)) = (gh.gradient(&pt), gk.gradient(&pt)) else { continue };
        let b = bracket_from_gradients(&dh, &dk, dof);
        let r = b.abs() / (1.0 + norm(&dh) * norm(&dk));
        if !r.is_finite() {
            continue;
        }
        n += 1;
        if r > worst {
            worst = r;
            worst_pt = Some(pt);
        }
    }
    if n == 0 {
        return CheckResult::outcome("bracket", false, "no admissible sample point");
    }
    let mut out = CheckResult::new("bracket", worst, tol, n);
    if !out.passed {
        out.witness = worst_pt.as_ref().map(report::point_map);
    }
    out
}

/// Chart variables plus any free parameters of the expressions.
fn sample_symbols(exprs: &[&Expr], chart: &Chart) -> Vec<Symbol> {
    let mut vars = chart.variables();
    for e in exprs {
        for s in e.free_symbols().iter() {
            if !vars.contains(s) {
                vars.push(s.clone());
            }
        }
    }
    vars
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub points: usize,
    pub min: usize,
    pub max: usize,
    pub modal: usize,
    pub histogram: BTreeMap<usize, usize>,
}

impl RankReport {
    /// Fraction of points with rank exactly `r`.
    pub fn fraction(&self, r: usize) -> f64 {
        *self.histogram.get(&r).unwrap_or(&0) as f64 / self.points.max(1) as f64
    }
}

/// Rank of the Jacobian of `funcs` at sampled points; singular values below
/// `1e-8` times the largest are treated as zero.
pub fn independence_rank(
    funcs: &[Expr],
    chart: &Chart,
    sampler: &SamplerConfig,
    points: usize,
) -> Result<RankReport> {
    if funcs.len() < 2 {
        return Err(Error::invalid("rank needs at least two functions"));
    }
    let grads: Vec<CompiledGradient> = funcs.iter().map(|f| CompiledGradient::new(f, chart)).collect();
    let refs: Vec<&Expr> = funcs.iter().collect();
    let vars = sample_symbols(&refs, chart);
    let dim = chart.dim();
    let mut s = sampler.sampler();
    let mut histogram = BTreeMap::new();
    let mut n = 0;
    let mut tries = 0;
    while n < points && tries < 50 * points {
        tries += 1;
        let pt = s.next_point(&vars);
        let rows: Result<Vec<Vec<f64>>> = grads.iter().map(|g| g.gradient(&pt)).collect();
        let Ok(rows) = rows else { continue };
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            continue;
        }
        // unit rows: the rank is scale-free, the singular value ratio is not
        let scales: Vec<f64> = rows.iter().map(|r| norm(r)).collect();
        let m = DMatrix::from_fn(rows.len(), dim, |i, j| {
            if scales[i] > 0.0 { rows[i][j] / scales[i] } else { 0.0 }
        });
        let sv = m.singular_values();
        let top = sv.max();
        let rank = if top == 0.0 {
            0
        } else {
            sv.iter().filter(|&&x| x > RANK_THRESHOLD * top).count()
        };
        *histogram.entry(rank).or_insert(0) += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::Numerical("no admissible sample point".into()));
    }
    let min = *histogram.keys().next().unwrap();
    let max = *histogram.keys().last().unwrap();
    let modal = *histogram.iter().max_by_key(|(r, c)| (**c, **r)).unwrap().0;
    Ok(RankReport {
        points: n,
        min,
        max,
        modal,
        histogram,
    })
}

/// `|K(…, φ + period, …) - K(…, φ, …)| / max(1, |K|)` at sampled points.
pub fn single_valuedness(
    k: &Expr,
    chart: &Chart,
    angular: &Symbol,
    period: f64,
    sampler: &SamplerConfig,
    points: usize,
) -> CheckResult {
    let ck = CompiledPoly::from_expr(k);
    let vars = sample_symbols(&[k], chart);
    let mut s = sampler.sampler();
    let mut worst = 0.0f64;
    let mut worst_pt = None;
    let mut n = 0;
    let mut tries = 0;
    while n < points && tries < 50 * points {
        tries += 1;
        let pt = s.next_point(&vars);
        let phi = pt.get(angular).unwrap_or(0.0);
        let mut moved = pt.clone();
        moved.set_symbol(angular, phi + period);
        let (Ok(a), Ok(b)) = (ck.eval(&pt), ck.eval(&moved)) else { continue };
        let r = (b - a).abs() / a.abs().max(1.0);
        if !r.is_finite() {
            continue;
        }
        n += 1;
        if r > worst {
            worst = r;
            worst_pt = Some(pt);
        }
    }
    let mut out = CheckResult::new("single-valued", worst, SINGLE_VALUED_TOL, n);
    if !out.passed {
        out.witness = worst_pt.as_ref().map(report::point_map);
    }
    out.detail = format!("period {period}");
    out
}

/// Period `2π` in the angular variable.
pub fn single_valuedness_2pi(k: &Expr, chart: &Chart, angular: &Symbol, sampler: &SamplerConfig) -> CheckResult {
    single_valuedness(k, chart, angular, 2.0 * PI, sampler, 100)
}

/// Drift of each monitor along a trajectory, relative to `max(1, |M(0)|)`.
pub fn drift_checks(traj: &Trajectory, tol: f64) -> Vec<CheckResult> {
    traj.monitors
        .iter()
        .map(|m| {
            CheckResult::new(&format!("drift:{}", m.name), m.relative_drift(), tol, m.values.len())
        })
        .collect()
}

/// Evaluate `e` at `pt` merged over fixed parameter values.
pub fn eval_with(e: &Expr, pt: &PhasePoint, params: &PhasePoint) -> Result<f64> {
    e.eval(&params.merged(pt))
}
