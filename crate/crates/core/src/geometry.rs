//! Riemannian metrics in coordinates: inverse, Christoffel symbols, Ricci
//! tensor, covariant Hessian and the Laplace–Beltrami operator.
//!
//! Index conventions: `christoffel()[k][i][j] = Γ^k_{ij}`,
//! `R_{ij} = ∂_k Γ^k_{ij} - ∂_j Γ^k_{ik} + Γ^k_{kl} Γ^l_{ij} - Γ^k_{jl} Γ^l_{ik}`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::expr::{Expr, PhasePoint, Symbol};

pub type Matrix = Vec<Vec<Expr>>;

/// A metric `g_{ij}` over named coordinates, with derived tensors computed
/// once on first use.
#[derive(Debug)]
pub struct MetricData {
    coords: Vec<Symbol>,
    g: Matrix,
    inverse: OnceLock<Matrix>,
    christoffel: OnceLock<Vec<Matrix>>,
    ricci: OnceLock<Matrix>,
}

impl Clone for MetricData {
    fn clone(&self) -> Self {
        MetricData::new(self.coords.clone(), self.g.clone()).expect("validated on construction")
    }
}

impl MetricData {
    pub fn new(coords: Vec<Symbol>, g: Matrix) -> Result<Self> {
        let n = coords.len();
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!("metric must be {n}×{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if !g[i][j].equivalent(&g[j][i]) {
                    return Err(Error::invalid(format!("metric not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(MetricData {
            coords,
            g: g.iter().map(|r| r.iter().map(Expr::simplify).collect()).collect(),
            inverse: OnceLock::new(),
            christoffel: OnceLock::new(),
            ricci: OnceLock::new(),
        })
    }

    pub fn diagonal(coords: &[&str], diag: Vec<Expr>) -> Result<Self> {
        let n = diag.len();
        let mut g = vec![vec![Expr::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            g[i][i] = d;
        }
        MetricData::new(coords.iter().map(|s| Symbol::new(s)).collect(), g)
    }

    /// Euclidean metric on `n` coordinates.
    pub fn flat(coords: &[Symbol]) -> Self {
        let n = coords.len();
        let g = (0..n)
            .map(|i| (0..n).map(|j| Expr::int(i64::from(i == j))).collect())
            .collect();
        MetricData::new(coords.to_vec(), g).expect("identity is a metric")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn determinant(&self) -> Expr {
        determinant(&self.g).simplify()
    }

    /// `g^{ij}` by cofactors.
    pub fn inverse(&self) -> &Matrix {
        self.inverse.get_or_init(|| invert(&self.g))
    }

    pub fn christoffel(&self) -> &Vec<Matrix> {
        self.christoffel.get_or_init(|| {
            let n = self.dim();
            let ginv = self.inverse();
            // dg[l][i][j] = ∂_l g_{ij}
            let dg: Vec<Matrix> = self
                .coords
                .iter()
                .map(|x| {
                    self.g
                        .iter()
                        .map(|row| row.iter().map(|e| e.diff_simplified(x)).collect())
                        .collect()
                })
                .collect();
            let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let terms = (0..n).map(|l| {
                            &ginv[k][l] * (&dg[i][j][l] + &dg[j][i][l] - &dg[l][i][j])
                        });
                        let v = (Expr::frac(1, 2) * Expr::add_all(terms)).simplify();
                        gamma[k][i][j] = v.clone();
                        gamma[k][j][i] = v;
                    }
                }
            }
            gamma
        })
    }

    pub fn ricci(&self) -> &Matrix {
        self.ricci.get_or_init(|| {
            let n = self.dim();
            let gam = self.christoffel();
            let mut r = vec![vec![Expr::zero(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let mut terms = Vec::new();
                    for k in 0..n {
                        terms.push(gam[k][i][j].diff_simplified(&self.coords[k]));
                        terms.push(-gam[k][i][k].diff_simplified(&self.coords[j]));
                        for l in 0..n {
                            terms.push(&gam[k][k][l] * &gam[l][i][j]);
                            terms.push(-(&gam[k][j][l] * &gam[l][i][k]));
                        }
                    }
                    let v = Expr::add_all(terms).simplify();
                    r[i][j] = v.clone();
                    r[j][i] = v;
                }
            }
            r
        })
    }

    /// Scalar curvature `g^{ij} R_{ij}`.
    pub fn scalar_curvature(&self) -> Expr {
        let ginv = self.inverse();
        let r = self.ricci();
        let n = self.dim();
        Expr::add_all((0..n).flat_map(|i| (0..n).map(move |j| &ginv[i][j] * &r[i][j]))).simplify()
    }

    pub fn partials(&self, f: &Expr) -> Vec<Expr> {
        self.coords.iter().map(|x| f.diff_simplified(x)).collect()
    }

    /// `(∇f)^i = g^{ij} ∂_j f`.
    pub fn gradient(&self, f: &Expr) -> Vec<Expr> {
        let df = self.partials(f);
        raise(self.inverse(), &df)
    }

    /// `g^{ij} ∂_i f ∂_j h`.
    pub fn dot_gradients(&self, f: &Expr, h: &Expr) -> Expr {
        let df = self.partials(f);
        let dh = self.partials(h);
        let ginv = self.inverse();
        let n = self.dim();
        Expr::add_all((0..n).flat_map(|i| {
            let (df, dh) = (&df, &dh);
            (0..n).map(move |j| &ginv[i][j] * &df[i] * &dh[j])
        }))
        .simplify()
    }

    /// Covariant Hessian `∇_i ∇_j f = ∂_i ∂_j f - Γ^k_{ij} ∂_k f`.
    pub fn hessian(&self, f: &Expr) -> Matrix {
        let n = self.dim();
        let df = self.partials(f);
        let gam = self.christoffel();
        let mut h = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let second = df[j].diff_simplified(&self.coords[i]);
                let corr = Expr::add_all((0..n).map(|k| &gam[k][i][j] * &df[k]));
                let v = (second - corr).simplify();
                h[i][j] = v.clone();
                h[j][i] = v;
            }
        }
        h
    }

    /// `Δf = g^{ij}(∂_i∂_j f - Γ^k_{ij} ∂_k f)`.
    pub fn laplacian(&self, f: &Expr) -> Expr {
        let hess = self.hessian(f);
        let ginv = self.inverse();
        let n = self.dim();
        Expr::add_all((0..n).flat_map(|i| {
            let hess = &hess;
            (0..n).map(move |j| &ginv[i][j] * &hess[i][j])
        }))
        .simplify()
    }

    /// Kinetic energy `½ g^{ij} p_i p_j`.
    pub fn kinetic(&self, momenta: &[Symbol]) -> Expr {
        let ginv = self.inverse();
        let n = self.dim();
        let p: Vec<Expr> = momenta.iter().map(Expr::symbol).collect();
        let terms = (0..n).flat_map(|i| {
            let p = &p;
            (0..n).map(move |j| &ginv[i][j] * &p[i] * &p[j])
        });
        (Expr::frac(1, 2) * Expr::add_all(terms)).simplify()
    }

    /// Lower an index: `X♭_i = g_{ij} X^j`.
    pub fn lower(&self, v: &[Expr]) -> Vec<Expr> {
        raise(&self.g, v)
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &[Expr], y: &[Expr]) -> Expr {
        let xl = self.lower(x);
        Expr::add_all(xl.iter().zip(y).map(|(a, b)| a * b)).simplify()
    }

    /// Evaluate the metric components.
    pub fn eval_metric(&self, pt: &PhasePoint) -> Result<Vec<Vec<f64>>> {
        self.g
            .iter()
            .map(|row| row.iter().map(|e| e.eval(pt)).collect())
            .collect()
    }
}

fn raise(m: &Matrix, v: &[Expr]) -> Vec<Expr> {
    m.iter()
        .map(|row| Expr::add_all(row.iter().zip(v).map(|(a, b)| a * b)).simplify())
        .collect()
}

fn minor(m: &Matrix, row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

pub fn determinant(m: &Matrix) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        n => Expr::add_all((0..n).filter(|j| !m[0][*j].is_literal_zero()).map(|j| {
            let term = &m[0][j] * determinant(&minor(m, 0, j));
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })),
    }
}

pub fn invert(m: &Matrix) -> Matrix {
    let n = m.len();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j].is_zero_symbolic()));
    if diagonal {
        return (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { m[i][i].recip().simplify() } else { Expr::zero() })
                    .collect()
            })
            .collect();
    }
    let det = determinant(m).simplify();
    let inv_det = det.recip();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = determinant(&minor(m, j, i));
                    let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                    (signed * &inv_det).simplify()
                })
                .collect()
        })
        .collect()
}

/// Ricci tensor by nested central differences of a numeric metric. Used to
/// cross-check the symbolic pipeline.
pub fn ricci_finite_difference(
    metric: &dyn Fn(&[f64]) -> Vec<Vec<f64>>,
    x: &[f64],
    h: f64,
) -> Vec<Vec<f64>> {
    let n = x.len();
    let inv = |g: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j]);
        let mi = m.try_inverse().expect("singular metric");
        (0..n).map(|i| (0..n).map(|j| mi[(i, j)]).collect()).collect()
    };
    let shifted = |x: &[f64], k: usize, d: f64| -> Vec<f64> {
        let mut y = x.to_vec();
        y[k] += d;
        y
    };
    let christoffel = |x: &[f64]| -> Vec<Vec<Vec<f64>>> {
        let ginv = inv(metric(x));
        let dg: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|l| {
                let gp = metric(&shifted(x, l, h));
                let gm = metric(&shifted(x, l, -h));
                (0..n)
                    .map(|i| (0..n).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)).collect())
                    .collect()
            })
            .collect();
        let mut gam = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gam[k][i][j] = 0.5
                        * (0..n)
                            .map(|l| ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                            .sum::<f64>();
                }
            }
        }
        gam
    };
    let gam = christoffel(x);
    let dgam: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|l| {
            let gp = christoffel(&shifted(x, l, h));
            let gm = christoffel(&shifted(x, l, -h));
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|i| (0..n).map(|j| (gp[k][i][j] - gm[k][i][j]) / (2.0 * h)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += dgam[k][k][i][j] - dgam[j][k][i][k];
                for l in 0..n {
                    s += gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k];
                }
            }
            r[i][j] = s;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> MetricData {
        let th = Expr::sym("th");
        MetricData::diagonal(&["th", "ph"], vec![Expr::one(), th.sin().powi(2)]).unwrap()
    }

    #[test]
    fn polar_plane_is_flat() {
        let r = Expr::sym("r");
        let m = MetricData::diagonal(&["r", "phi"], vec![Expr::one(), r.powi(2)]).unwrap();
        for row in m.ricci() {
            for e in row {
                assert!(e.is_zero_symbolic(), "{e}");
            }
        }
        // Γ^r_{φφ} = -r, Γ^φ_{rφ} = 1/r
        assert!(m.christoffel()[0][1][1].equivalent(&(-r.clone())));
        assert!(m.christoffel()[1][0][1].equivalent(&r.recip()));
    }

    #[test]
    fn unit_sphere_ricci_equals_metric() {
        let m = sphere();
        for i in 0..2 {
            for j in 0..2 {
                assert!(m.ricci()[i][j].equivalent(&m.g()[i][j]), "R[{i}][{j}] = {}", m.ricci()[i][j]);
            }
        }
        assert!(m.scalar_curvature().equivalent(&Expr::int(2)));
    }

    #[test]
    fn finite_difference_ricci_agrees() {
        let m = sphere();
        let fd = ricci_finite_difference(
            &|x: &[f64]| vec![vec![1.0, 0.0], vec![0.0, x[0].sin().powi(2)]],
            &[0.7, 0.3],
            1e-3,
        );
        let pt = PhasePoint::from_pairs([("th", 0.7), ("ph", 0.3)]);
        for i in 0..2 {
            for j in 0..2 {
                let s = m.ricci()[i][j].eval(&pt).unwrap();
                assert!((s - fd[i][j]).abs() < 1e-5 * (1.0 + s.abs()));
            }
        }
    }

    #[test]
    fn non_diagonal_inverse() {
        let x = Expr::sym("x");
        let g = vec![vec![Expr::int(2), x.clone()], vec![x.clone(), Expr::int(3)]];
        let m = MetricData::new(vec![Symbol::new("x"), Symbol::new("y")], g.clone()).unwrap();
        let inv = m.inverse();
        for i in 0..2 {
            for j in 0..2 {
                let prod = Expr::add_all((0..2).map(|k| &g[i][k] * &inv[k][j]));
                assert!(prod.equivalent(&Expr::int(i64::from(i == j))));
            }
        }
    }
}
