use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Symbol;
use crate::error::{Error, Result};

/// Canonical coordinates of a phase space: `N` configuration coordinates,
/// their conjugate momenta, and optionally the extension pair `(u, pu)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Chart {
    coords: Vec<Symbol>,
    momenta: Vec<Symbol>,
    extension: Option<(Symbol, Symbol)>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs().map(|(q, p)| format!("({q},{p})")).collect();
        write!(f, "Chart[{}]", pairs.join(" "))
    }
}

impl Chart {
    /// Chart with the default names `q1..qN`, `p1..pN`.
    pub fn standard(n: usize) -> Chart {
        let coords = (1..=n).map(|i| Symbol::new(&format!("q{i}"))).collect();
        let momenta = (1..=n).map(|i| Symbol::new(&format!("p{i}"))).collect();
        Chart {
            coords,
            momenta,
            extension: None,
        }
    }

    /// Chart with user-chosen names, e.g. `[("phi", "pphi")]`.
    pub fn named(pairs: &[(&str, &str)]) -> Result<Chart> {
        let coords: Vec<Symbol> = pairs.iter().map(|(q, _)| Symbol::new(q)).collect();
        let momenta: Vec<Symbol> = pairs.iter().map(|(_, p)| Symbol::new(p)).collect();
        let chart = Chart {
            coords,
            momenta,
            extension: None,
        };
        chart.check_unique()?;
        if chart.coords.is_empty() {
            return Err(Error::invalid("chart needs at least one coordinate"));
        }
        Ok(chart)
    }

    /// The same chart with the pair `(u, pu)` appended.
    pub fn extended(&self) -> Chart {
        self.extended_with("u", "pu")
    }

    pub fn extended_with(&self, u: &str, pu: &str) -> Chart {
        Chart {
            coords: self.coords.clone(),
            momenta: self.momenta.clone(),
            extension: Some((Symbol::new(u), Symbol::new(pu))),
        }
    }

    /// The chart without the extension pair.
    pub fn base(&self) -> Chart {
        Chart {
            coords: self.coords.clone(),
            momenta: self.momenta.clone(),
            extension: None,
        }
    }

    fn check_unique(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for s in self.variables() {
            if !seen.insert(s.clone()) {
                return Err(Error::invalid(format!("duplicate chart variable `{s}`")));
            }
        }
        Ok(())
    }

    /// Seed degrees of freedom (without the extension pair).
    pub fn dof(&self) -> usize {
        self.coords.len()
    }

    pub fn has_extension(&self) -> bool {
        self.extension.is_some()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn momenta(&self) -> &[Symbol] {
        &self.momenta
    }

    pub fn u(&self) -> Option<&Symbol> {
        self.extension.as_ref().map(|(u, _)| u)
    }

    pub fn pu(&self) -> Option<&Symbol> {
        self.extension.as_ref().map(|(_, p)| p)
    }

    /// Canonical pairs, the extension pair last.
    pub fn pairs(&self) -> impl Iterator<Item = (&Symbol, &Symbol)> {
        self.coords
            .iter()
            .zip(self.momenta.iter())
            .chain(self.extension.iter().map(|(u, p)| (u, p)))
    }

    /// All positions followed by all momenta.
    pub fn all_positions(&self) -> Vec<Symbol> {
        self.pairs().map(|(q, _)| q.clone()).collect()
    }

    pub fn all_momenta(&self) -> Vec<Symbol> {
        self.pairs().map(|(_, p)| p.clone()).collect()
    }

    /// Phase-space variables in the order `q.., u, p.., pu`.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut v = self.all_positions();
        v.extend(self.all_momenta());
        v
    }

    pub fn dim(&self) -> usize {
        2 * (self.coords.len() + usize::from(self.extension.is_some()))
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.pairs().any(|(q, p)| q == s || p == s)
    }

    pub fn is_momentum(&self, s: &Symbol) -> bool {
        self.pairs().any(|(_, p)| p == s)
    }
}

/// Total assignment of chart variables and parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhasePoint {
    values: BTreeMap<Symbol, f64>,
}

impl PhasePoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut pt = PhasePoint::new();
        for (k, v) in pairs {
            pt.set(k, v);
        }
        pt
    }

    pub fn set(&mut self, name: &str, value: f64) -> &mut Self {
        self.values.insert(Symbol::new(name), value);
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set_symbol(&mut self, s: &Symbol, value: f64) {
        self.values.insert(s.clone(), value);
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.values.get(s).copied()
    }

    pub fn get_name(&self, name: &str) -> Option<f64> {
        self.values.get(&Symbol::new(name)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, f64)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn merged(&self, other: &PhasePoint) -> PhasePoint {
        let mut out = self.clone();
        out.values.extend(other.values.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }

    /// Values of the chart variables in [`Chart::variables`] order.
    pub fn phase_vector(&self, chart: &Chart) -> Result<Vec<f64>> {
        chart
            .variables()
            .iter()
            .map(|s| self.get(s).ok_or_else(|| Error::Unbound(s.to_string())))
            .collect()
    }

    pub fn set_phase_vector(&mut self, chart: &Chart, x: &[f64]) {
        for (s, v) in chart.variables().iter().zip(x) {
            self.set_symbol(s, *v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_pair_comes_last() {
        let c = Chart::standard(2).extended();
        let names: Vec<String> = c.variables().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["q1", "q2", "u", "p1", "p2", "pu"]);
        assert_eq!(c.dim(), 6);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Chart::named(&[("x", "px"), ("x", "py")]).is_err());
    }
}
