//! Zero testing: symbolic on the canonical subring, randomized numeric
//! fallback elsewhere.

use serde::Serialize;

use super::{CompiledPoly, Expr, PhasePoint};
use crate::sampling::SamplerConfig;

#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub points: usize,
    pub tol: f64,
    pub sampler: SamplerConfig,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            points: 32,
            tol: 1e-9,
            sampler: SamplerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ZeroVerdict {
    /// The canonical form vanishes.
    Zero,
    /// Every sampled value is within tolerance; the canonical form does not
    /// certify it.
    ProbablyZero { points: usize, max_residual: f64 },
    NonZero {
        #[serde(serialize_with = "serialize_point")]
        witness: PhasePoint,
        value: f64,
    },
    /// No sample point could be evaluated.
    Undecided,
}

fn serialize_point<S: serde::Serializer>(pt: &PhasePoint, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(None)?;
    for (k, v) in pt.iter() {
        m.serialize_entry(k.as_str(), &v)?;
    }
    m.end()
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero | ZeroVerdict::ProbablyZero { .. })
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }
}

impl ZeroTest {
    pub fn with_points(mut self, n: usize) -> Self {
        self.points = n;
        self
    }

    pub fn with_sampler(mut self, s: SamplerConfig) -> Self {
        self.sampler = s;
        self
    }

    pub fn run(&self, e: &Expr) -> ZeroVerdict {
        let p = e.to_poly();
        if p.is_identically_zero() {
            return ZeroVerdict::Zero;
        }
        self.numeric(&CompiledPoly::new(&p))
    }

    /// Numeric test only. Residuals are measured relative to the sum of
    /// absolute term values so cancellation noise is not mistaken for a
    /// nonzero value.
    pub fn numeric(&self, c: &CompiledPoly) -> ZeroVerdict {
        let syms = c.variables().to_vec();
        let mut sampler = self.sampler.sampler();
        let mut max_residual: f64 = 0.0;
        let mut evaluated = 0;
        let mut tries = 0;
        while evaluated < self.points && tries < 50 * self.points {
            tries += 1;
            let pt = sampler.next_point(&syms);
            let Ok((v, scale)) = c.eval_with_scale(&pt) else { continue };
            if !v.is_finite() {
                continue;
            }
            evaluated += 1;
            let r = v.abs() / scale.max(1.0);
            if r > self.tol {
                return ZeroVerdict::NonZero { witness: pt, value: v };
            }
            max_residual = max_residual.max(r);
        }
        if evaluated == 0 {
            ZeroVerdict::Undecided
        } else {
            ZeroVerdict::ProbablyZero {
                points: evaluated,
                max_residual,
            }
        }
    }
}

impl Expr {
    /// Zero test with the default cascade.
    pub fn zero_test(&self) -> ZeroVerdict {
        ZeroTest::default().run(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_angle_is_probably_zero() {
        let x = Expr::sym("x");
        let e = (x.clone() * 2).sin() - Expr::int(2) * x.sin() * x.cos();
        assert!(matches!(e.zero_test(), ZeroVerdict::ProbablyZero { .. }));
    }

    #[test]
    fn nonzero_has_witness() {
        let x = Expr::sym("x");
        match (x.sin() - x.clone()).zero_test() {
            ZeroVerdict::NonZero { witness, value } => {
                let w = witness.get_name("x").unwrap();
                assert!((w.sin() - w - value).abs() < 1e-12);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn canonical_zero_is_symbolic() {
        let x = Expr::sym("x");
        let e = x.sin().powi(2) + x.cos().powi(2) - 1;
        assert_eq!(e.zero_test(), ZeroVerdict::Zero);
    }
}
