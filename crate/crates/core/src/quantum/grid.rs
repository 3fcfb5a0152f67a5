//! Finite-difference backend on `(0, U] × [0, 2π)`: Dirichlet in `u`,
//! periodic in `q`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{OperatorSpec, QuantumSystem, Separated};
use crate::error::{Error, Result};
use crate::expr::{Expr, PhasePoint, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    Fd2,
    Fd4,
    /// FFT differentiation; periodic axis only.
    Spectral,
}

impl Stencil {
    pub fn from_order(order: u8) -> Result<Self> {
        match order {
            2 => Ok(Stencil::Fd2),
            4 => Ok(Stencil::Fd4),
            o => Err(Error::invalid(format!("discretization order {o} (expected 2 or 4)"))),
        }
    }

    fn first(self) -> &'static [(isize, f64)] {
        match self {
            Stencil::Fd2 => &[(-1, -0.5), (1, 0.5)],
            _ => &[(-2, 1.0 / 12.0), (-1, -2.0 / 3.0), (1, 2.0 / 3.0), (2, -1.0 / 12.0)],
        }
    }

    fn second(self) -> &'static [(isize, f64)] {
        match self {
            Stencil::Fd2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
            _ => &[
                (-2, -1.0 / 12.0),
                (-1, 4.0 / 3.0),
                (0, -5.0 / 2.0),
                (1, 4.0 / 3.0),
                (2, -1.0 / 12.0),
            ],
        }
    }
}

/// Interior nodes `u_i = (i+1)h_u`, `h_u = U/(n_u+1)`; periodic nodes
/// `q_j = q₀ + j·2π/n_q`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nq: usize,
    pub u_max: f64,
    pub q_offset: f64,
}

impl GridSpec {
    pub fn new(nu: usize, nq: usize, u_max: f64) -> Self {
        GridSpec {
            nu,
            nq,
            u_max,
            q_offset: 0.0,
        }
    }

    /// A single `u` node, for operators acting on `q` only.
    pub fn angular(nq: usize) -> Self {
        GridSpec::new(1, nq, 2.0)
    }

    pub fn hu(&self) -> f64 {
        self.u_max / (self.nu + 1) as f64
    }

    pub fn hq(&self) -> f64 {
        2.0 * PI / self.nq as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.hu()
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_offset + j as f64 * self.hq()
    }

    /// `u`-rows of the central `frac` of the radial range.
    pub fn interior(&self, frac: f64) -> std::ops::Range<usize> {
        let skip = ((1.0 - frac) / 2.0 * self.nu as f64).round() as usize;
        skip..self.nu - skip
    }
}

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: GridSpec,
    /// Row-major: index `i·n_q + j`.
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: &GridSpec) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.nu * grid.nq],
        }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut out = Self::zeros(grid);
        for i in 0..grid.nu {
            for j in 0..grid.nq {
                out.values[i * grid.nq + j] = f(grid.u(i), grid.q(j));
            }
        }
        out
    }

    /// Sample a separated function; radial and angular factors are tabulated once.
    pub fn from_separated(grid: &GridSpec, f: &Separated) -> Self {
        let mut out = Self::zeros(grid);
        for (r, a) in &f.terms {
            let rv: Vec<f64> = (0..grid.nu).map(|i| r.eval(grid.u(i))).collect();
            let av: Vec<Complex64> = (0..grid.nq).map(|j| a.eval(grid.q(j))).collect();
            for i in 0..grid.nu {
                for j in 0..grid.nq {
                    out.values[i * grid.nq + j] += rv[i] * av[j];
                }
            }
        }
        out
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.nq + j]
    }

    pub fn axpy(&self, a: Complex64, other: &GridFunction) -> GridFunction {
        let mut out = self.clone();
        for (x, y) in out.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
        out
    }

    /// `ℓ²` norm over the radial interior (all `q`).
    pub fn interior_norm(&self, frac: f64) -> f64 {
        let nq = self.grid.nq;
        self.grid
            .interior(frac)
            .flat_map(|i| (0..nq).map(move |j| i * nq + j))
            .map(|k| self.values[k].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn d_u(&self, stencil: Stencil, second: bool) -> Result<GridFunction> {
        if stencil == Stencil::Spectral {
            return Err(Error::invalid("spectral differentiation needs a periodic axis"));
        }
        let (nu, nq, h) = (self.grid.nu, self.grid.nq, self.grid.hu());
        let (w, scale) = if second {
            (stencil.second(), 1.0 / (h * h))
        } else {
            (stencil.first(), 1.0 / h)
        };
        let mut out = Self::zeros(&self.grid);
        for i in 0..nu {
            for &(off, c) in w {
                let k = i as isize + off;
                if k < 0 || k >= nu as isize {
                    continue; // Dirichlet ghost
                }
                let k = k as usize;
                for j in 0..nq {
                    out.values[i * nq + j] += c * scale * self.values[k * nq + j];
                }
            }
        }
        Ok(out)
    }

    fn d_q(&self, stencil: Stencil, second: bool) -> GridFunction {
        let (nu, nq, h) = (self.grid.nu, self.grid.nq, self.grid.hq());
        let mut out = Self::zeros(&self.grid);
        if stencil == Stencil::Spectral {
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(nq);
            let inv = planner.plan_fft_inverse(nq);
            for i in 0..nu {
                let mut row: Vec<Complex64> = self.values[i * nq..(i + 1) * nq].to_vec();
                fwd.process(&mut row);
                for (m, c) in row.iter_mut().enumerate() {
                    let mut kk = if m <= nq / 2 { m as f64 } else { m as f64 - nq as f64 };
                    if !second && nq % 2 == 0 && m == nq / 2 {
                        kk = 0.0;
                    }
                    let factor = if second {
                        Complex64::new(-kk * kk, 0.0)
                    } else {
                        Complex64::new(0.0, kk)
                    };
                    *c *= factor / nq as f64;
                }
                inv.process(&mut row);
                out.values[i * nq..(i + 1) * nq].copy_from_slice(&row);
            }
            return out;
        }
        let (w, scale) = if second {
            (stencil.second(), 1.0 / (h * h))
        } else {
            (stencil.first(), 1.0 / h)
        };
        for i in 0..nu {
            for j in 0..nq {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(off, c) in w {
                    let k = (j as isize + off).rem_euclid(nq as isize) as usize;
                    acc += c * self.values[i * nq + k];
                }
                out.values[i * nq + j] = acc * scale;
            }
        }
        out
    }

    /// `∂_u^i ∂_q^j`, built from first and second differences.
    fn partial(&self, i: u32, j: u32, su: Stencil, sq: Stencil) -> Result<GridFunction> {
        let mut f = self.clone();
        let mut left = j;
        while left >= 2 {
            f = f.d_q(sq, true);
            left -= 2;
        }
        if left == 1 {
            f = f.d_q(sq, false);
        }
        let mut left = i;
        while left >= 2 {
            f = f.d_u(su, true)?;
            left -= 2;
        }
        if left == 1 {
            f = f.d_u(su, false)?;
        }
        Ok(f)
    }

    /// `(u, q, Re f, Im f)` rows.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "u,q,re,im")?;
        for i in 0..self.grid.nu {
            for j in 0..self.grid.nq {
                let v = self.at(i, j);
                writeln!(
                    out,
                    "{:.12e},{:.12e},{:.12e},{:.12e}",
                    self.grid.u(i),
                    self.grid.q(j),
                    v.re,
                    v.im
                )?;
            }
        }
        Ok(())
    }
}

/// Coefficient tabulated on the grid as `Σ_p u^p F_p(q)` when possible.
fn tabulate(c: &Expr, u: &Symbol, q: &Symbol, grid: &GridSpec) -> Result<Vec<f64>> {
    let (nu, nq) = (grid.nu, grid.nq);
    let mut out = vec![0.0; nu * nq];
    let poly = c.to_poly();
    let split = poly.coefficients_in(std::slice::from_ref(u));
    if split.values().all(|r| !r.depends_on(u)) {
        for (key, rest) in split {
            let f = Expr::from_poly(rest);
            let fq: Vec<f64> = (0..nq)
                .map(|j| {
                    let mut pt = PhasePoint::new();
                    pt.set_symbol(q, grid.q(j));
                    f.eval(&pt)
                })
                .collect::<Result<_>>()?;
            for i in 0..nu {
                let up = grid.u(i).powi(key[0]);
                for j in 0..nq {
                    out[i * nq + j] += up * fq[j];
                }
            }
        }
        return Ok(out);
    }
    for i in 0..nu {
        for j in 0..nq {
            let mut pt = PhasePoint::new();
            pt.set_symbol(u, grid.u(i));
            pt.set_symbol(q, grid.q(j));
            out[i * nq + j] = c.eval(&pt)?;
        }
    }
    Ok(out)
}

/// Apply `op` on the grid; `u` uses `su`, `q` uses `sq`.
pub fn apply_on_grid(op: &OperatorSpec, f: &GridFunction, su: Stencil, sq: Stencil) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(&f.grid);
    for (&(i, j), c) in &op.terms {
        let coef = tabulate(c, &op.u, &op.q, &f.grid)?;
        let d = f.partial(i, j, su, sq)?;
        for (k, v) in out.values.iter_mut().enumerate() {
            *v += coef[k] * d.values[k];
        }
    }
    Ok(out)
}

/// Lowest `count` eigenvalues of the one-dimensional `L̂` on a periodic grid
/// of `n` nodes, from the symmetric conservative discretization of the
/// Laplace–Beltrami operator.
pub fn l_hat_spectrum(sys: &QuantumSystem, n: usize, count: usize) -> Result<Vec<f64>> {
    let seed = &sys.seed;
    let q = &sys.q;
    let h = 2.0 * PI / n as f64;
    let hb = crate::expr::rational_to_f64(&sys.hbar);
    let g = &seed.metric.g()[0][0];
    let at = |e: &Expr, x: f64| {
        let mut pt = PhasePoint::new();
        pt.set_symbol(q, x);
        e.eval(&pt)
    };
    // nodes off the poles of sin-type potentials
    let node = |j: usize| (j as f64 + 0.5) * h;
    let mut sqrt_g = Vec::with_capacity(n);
    let mut pot = Vec::with_capacity(n);
    let mut w_half = Vec::with_capacity(n);
    for j in 0..n {
        sqrt_g.push(at(g, node(j))?.sqrt());
        pot.push(at(&seed.potential, node(j))?);
        w_half.push(1.0 / at(g, node(j) + 0.5 * h)?.sqrt());
    }
    // (1/√g_j)[w_{j+½}(f_{j+1}-f_j) - w_{j-½}(f_j-f_{j-1})]/h², symmetrized by √(√g)
    let mut a = DMatrix::<f64>::zeros(n, n);
    let kin = -hb * hb / 2.0 / (h * h);
    for j in 0..n {
        let jp = (j + 1) % n;
        let jm = (j + n - 1) % n;
        let wp = w_half[j];
        let wm = w_half[jm];
        let dj = sqrt_g[j];
        a[(j, j)] += -kin * (wp + wm) / dj + pot[j];
        a[(j, jp)] += kin * wp / (dj * sqrt_g[jp]).sqrt();
        a[(j, jm)] += kin * wm / (dj * sqrt_g[jm]).sqrt();
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("L̂ matrix has non-finite entries".into()));
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.truncate(count);
    Ok(ev)
}

/// Lowest `count` eigenvalues of `Ĥ^M` on `(0, U]` with `n` interior nodes,
/// via `χ = u^{N/2}φ`, which makes the radial operator symmetric.
pub fn h_m_spectrum(sys: &QuantumSystem, m: f64, n: usize, u_max: f64, count: usize) -> Result<Vec<f64>> {
    let hb = crate::expr::rational_to_f64(&sys.hbar);
    let c = crate::expr::rational_to_f64(&sys.c);
    let k = crate::expr::rational_to_f64(&sys.k);
    let cn = crate::expr::rational_to_f64(&sys.c_n());
    let nn = sys.dim as f64;
    let w = sys.omega_value;
    let h = u_max / (n + 1) as f64;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let u = (i + 1) as f64 * h;
        let pot = hb * hb * nn * (nn - 2.0) / (8.0 * u * u)
            + m / (c * u * u)
            + cn * (k * k + 1.0) / (c * u * u)
            + 0.5 * w * w * c * c * u * u;
        a[(i, i)] = hb * hb / (h * h) + pot;
        if i + 1 < n {
            a[(i, i + 1)] = -hb * hb / (2.0 * h * h);
            a[(i + 1, i)] = -hb * hb / (2.0 * h * h);
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.truncate(count);
    Ok(ev)
}
