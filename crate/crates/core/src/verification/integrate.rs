//! Hamilton's equations with the Dormand–Prince 5(4) pair.

use std::io::Write;

use serde::Serialize;

use super::{CheckResult, CompiledGradient};
use crate::error::{Error, Result};
use crate::expr::{norm, Chart, CompiledPoly, Expr, PhasePoint};

/// Step control for [`integrate`].
#[derive(Clone, Debug, Serialize)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// States with a component beyond this are reported as unbounded.
    pub bound: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-12,
            atol: 1e-12,
            h0: 1e-3,
            h_max: 0.05,
            max_steps: 2_000_000,
            bound: 1e6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Monitor {
    pub name: String,
    pub values: Vec<f64>,
    compiled: CompiledPoly,
}

impl Monitor {
    /// `max_t |M(t) - M(0)| / max(1, |M(0)|)`.
    pub fn relative_drift(&self) -> f64 {
        let Some(&v0) = self.values.first() else { return 0.0 };
        let d = self.values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
        d / v0.abs().max(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Names in `chart.variables()` order.
    pub vars: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
    pub monitors: Vec<Monitor>,
    /// Reason the integration stopped before `t_end`.
    pub truncated: Option<String>,
}

impl Trajectory {
    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn monitor(&self, name: &str) -> Option<&Monitor> {
        self.monitors.iter().find(|m| m.name == name)
    }

    /// Cubic Hermite interpolation on step `i` (between samples `i` and `i+1`).
    fn hermite(&self, i: usize, s: f64) -> Vec<f64> {
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let (y0, y1) = (&self.states[i], &self.states[i + 1]);
        let (f0, f1) = (&self.rates[i], &self.rates[i + 1]);
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        (0..y0.len())
            .map(|j| h00 * y0[j] + h10 * h * f0[j] + h01 * y1[j] + h11 * h * f1[j])
            .collect()
    }
}

struct Flow {
    grad: CompiledGradient,
    dof: usize,
    chart: Chart,
    base: PhasePoint,
}

impl Flow {
    fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut pt = self.base.clone();
        pt.set_phase_vector(&self.chart, x);
        let g = self.grad.gradient(&pt)?;
        let mut out = vec![0.0; 2 * self.dof];
        for i in 0..self.dof {
            out[i] = g[self.dof + i];
            out[self.dof + i] = -g[i];
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite vector field".into()));
        }
        Ok(out)
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate Hamilton's equations of `h` from `start` to `t_end`.
///
/// `start` must assign every chart variable; any other entries are held
/// fixed as parameters. The trajectory is truncated, with a reason, when the
/// vector field cannot be evaluated (a pole of `γ`, for instance), the step
/// size collapses, or the state leaves the bound.
pub fn integrate(
    h: &Expr,
    chart: &Chart,
    start: &PhasePoint,
    t_end: f64,
    opts: &Dopri5,
    monitors: &[(&str, &Expr)],
) -> Result<Trajectory> {
    let x0 = start.phase_vector(chart)?;
    let flow = Flow {
        grad: CompiledGradient::new(h, chart),
        dof: chart.dim() / 2,
        chart: chart.clone(),
        base: start.clone(),
    };
    let mut mons: Vec<Monitor> = monitors
        .iter()
        .map(|(n, e)| Monitor {
            name: n.to_string(),
            values: Vec::new(),
            compiled: CompiledPoly::from_expr(e),
        })
        .collect();
    let record = |mons: &mut Vec<Monitor>, x: &[f64]| -> Result<()> {
        let mut pt = flow.base.clone();
        pt.set_phase_vector(chart, x);
        for m in mons.iter_mut() {
            let v = m.compiled.eval(&pt)?;
            m.values.push(v);
        }
        Ok(())
    };
    let f0 = flow.rhs(&x0).map_err(|e| Error::Numerical(format!("vector field at start: {e}")))?;
    record(&mut mons, &x0)?;
    let mut traj = Trajectory {
        vars: chart.variables().iter().map(|s| s.to_string()).collect(),
        times: vec![0.0],
        states: vec![x0.clone()],
        rates: vec![f0.clone()],
        monitors: Vec::new(),
        truncated: None,
    };
    let n = x0.len();
    let (mut t, mut x, mut fx) = (0.0, x0, f0);
    let mut step = opts.h0.min(opts.h_max);
    let mut steps = 0;
    while t < t_end {
        if steps >= opts.max_steps {
            traj.truncated = Some("step budget exhausted".into());
            break;
        }
        steps += 1;
        step = step.min(t_end - t).min(opts.h_max);
        if step < 1e-12 * t.abs().max(1.0) {
            traj.truncated = Some(format!("step size collapsed at t = {t}"));
            break;
        }
        let mut k: Vec<Vec<f64>> = vec![fx.clone()];
        let mut failed = None;
        for s in 1..7 {
            let y: Vec<f64> = (0..n)
                .map(|j| x[j] + step * (0..s).map(|r| A[s][r] * k[r][j]).sum::<f64>())
                .collect();
            match flow.rhs(&y) {
                Ok(v) => k.push(v),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if failed.is_some() {
            step *= 0.25;
            continue;
        }
        let y: Vec<f64> = (0..n)
            .map(|j| x[j] + step * (0..6).map(|r| A[6][r] * k[r][j]).sum::<f64>())
            .collect();
        let err = ((0..n)
            .map(|j| {
                let e = step * (0..7).map(|r| E[r] * k[r][j]).sum::<f64>();
                let sc = opts.atol + opts.rtol * x[j].abs().max(y[j].abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n as f64)
            .sqrt();
        if err <= 1.0 {
            t += step;
            x = y;
            fx = k.pop().unwrap();
            record(&mut mons, &x)?;
            traj.times.push(t);
            traj.states.push(x.clone());
            traj.rates.push(fx.clone());
            if x.iter().any(|v| v.abs() > opts.bound) {
                traj.truncated = Some(format!("unbounded at t = {t}"));
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        step *= factor;
    }
    traj.monitors = mons;
    Ok(traj)
}

#[derive(Clone, Debug, Serialize)]
pub struct Closure {
    pub closed: bool,
    pub period: Option<f64>,
    /// Smallest scaled return distance after leaving the start.
    pub min_distance: f64,
    pub eps: f64,
    pub bounded: bool,
}

impl Closure {
    pub fn check(&self) -> CheckResult {
        CheckResult::new("orbit-closure", self.min_distance, self.eps, 0).with_detail(match self.period {
            Some(p) => format!("period ≈ {p:.6}"),
            None if !self.bounded => "trajectory not bounded".into(),
            None => "no return within budget".into(),
        })
    }
}

/// First return of the trajectory to within `eps` of its start, distances
/// scaled by `1 + ‖x₀‖`. Local minima are refined on the Hermite interpolant.
pub fn orbit_closure(traj: &Trajectory, eps: f64) -> Closure {
    let x0 = &traj.states[0];
    let scale = 1.0 + norm(x0);
    let dist = |x: &[f64]| {
        let d: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        norm(&d) / scale
    };
    let bounded = !traj.truncated.as_deref().is_some_and(|r| r.starts_with("unbounded"));
    let d: Vec<f64> = traj.states.iter().map(|x| dist(x)).collect();
    let mut left = false;
    let mut best = f64::INFINITY;
    for i in 1..d.len().saturating_sub(1) {
        if d[i] > 10.0 * eps {
            left = true;
        }
        if !left || !(d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
            continue;
        }
        // refine on the two adjacent steps
        let mut local = d[i];
        let mut t_local = traj.times[i];
        for (seg, _) in [(i - 1, 0), (i, 1)] {
            for q in 0..=64 {
                let s = q as f64 / 64.0;
                let v = dist(&traj.hermite(seg, s));
                if v < local {
                    local = v;
                    t_local = traj.times[seg] + s * (traj.times[seg + 1] - traj.times[seg]);
                }
            }
        }
        best = best.min(local);
        if local < eps {
            return Closure {
                closed: true,
                period: Some(t_local),
                min_distance: local,
                eps,
                bounded,
            };
        }
    }
    Closure {
        closed: false,
        period: None,
        min_distance: best,
        eps,
        bounded,
    }
}

/// `t,<vars>,<monitors>` rows.
pub fn write_trajectory_csv(traj: &Trajectory, out: &mut dyn Write) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.vars.iter().cloned());
    header.extend(traj.monitors.iter().map(|m| m.name.clone()));
    writeln!(out, "{}", header.join(","))?;
    for (i, (t, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![format!("{t:.12e}")];
        row.extend(x.iter().map(|v| format!("{v:.12e}")));
        row.extend(traj.monitors.iter().map(|m| format!("{:.12e}", m.values[i])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
