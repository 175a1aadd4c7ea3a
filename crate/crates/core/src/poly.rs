//! Sparse multivariate polynomials with real coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet2;

/// `Σ c · x^e` over distinct exponent vectors; zero coefficients are pruned.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

/// Serialized form of one term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Polynomial {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(c, vec![0; n_vars]);
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable index out of range");
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(1.0, e);
        p
    }

    pub fn monomial(coeff: f64, exps: Vec<u32>) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(coeff, exps);
        p
    }

    /// Builds from a term list, summing duplicate exponent vectors.
    pub fn from_terms(n_vars: usize, terms: &[Term]) -> Result<Self> {
        let mut p = Self::zero(n_vars);
        for t in terms {
            if t.exps.len() != n_vars {
                return Err(Error::invalid(format!(
                    "term has {} exponents, expected {n_vars}",
                    t.exps.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::invalid("non-finite polynomial coefficient"));
            }
            p.add_term(t.coeff, t.exps.clone());
        }
        Ok(p)
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(e, &c)| Term {
                coeff: c,
                exps: e.clone(),
            })
            .collect()
    }

    fn add_term(&mut self, c: f64, exps: Vec<u32>) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// True if the polynomial only involves variables in `allowed`.
    pub fn depends_only_on(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().enumerate().all(|(i, &p)| p == 0 || allowed(i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(c, e.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &c) in &self.terms {
            out.add_term(c * s, e.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        let mut out = Self::zero(self.n_vars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(ca * cb, e);
            }
        }
        out
    }

    /// `∂/∂x_var`
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(c * e[var] as f64, d);
        }
        out
    }

    /// Re-embeds into `n_vars` variables, placing the current ones starting at `offset`.
    pub fn lift(&self, n_vars: usize, offset: usize) -> Self {
        assert!(offset + self.n_vars <= n_vars, "lift target too small");
        let mut out = Self::zero(n_vars);
        for (e, &c) in &self.terms {
            let mut d = vec![0; n_vars];
            d[offset..offset + self.n_vars].copy_from_slice(e);
            out.add_term(c, d);
        }
        out
    }

    fn monomial_value(exps: &[u32], point: &[f64]) -> f64 {
        exps.iter()
            .zip(point)
            .map(|(&p, &x)| if p == 0 { 1.0 } else { x.powi(p as i32) })
            .product()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.n_vars, "point dimension mismatch");
        self.terms
            .iter()
            .map(|(e, &c)| c * Self::monomial_value(e, point))
            .sum()
    }

    /// Exact value, gradient and Hessian at `point` by term-wise differentiation.
    pub fn eval_jet2(&self, point: &[f64]) -> Jet2 {
        let n = self.n_vars;
        assert_eq!(point.len(), n, "point dimension mismatch");
        let mut jet = Jet2::constant(n, 0.0);
        let mut scratch = vec![0u32; n];
        for (e, &c) in &self.terms {
            jet.value += c * Self::monomial_value(e, point);
            for a in 0..n {
                if e[a] == 0 {
                    continue;
                }
                scratch.copy_from_slice(e);
                scratch[a] -= 1;
                jet.gradient[a] += c * e[a] as f64 * Self::monomial_value(&scratch, point);
                for b in a..n {
                    let mut d = scratch.clone();
                    if d[b] == 0 {
                        continue;
                    }
                    let f = c * e[a] as f64 * d[b] as f64;
                    d[b] -= 1;
                    let h = f * Self::monomial_value(&d, point);
                    jet.hessian[a * n + b] += h;
                    if a != b {
                        jet.hessian[b * n + a] += h;
                    }
                }
            }
        }
        jet
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{p}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// Ratio `numerator / denominator`; `denominator = None` means 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub numerator: Polynomial,
    pub denominator: Option<Polynomial>,
}

impl RationalFunction {
    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.numerator.n_vars()
    }

    pub fn eval_jet2(&self, point: &[f64]) -> Jet2 {
        let num = self.numerator.eval_jet2(point);
        match &self.denominator {
            None => num,
            Some(d) => num.div(&d.eval_jet2(point)),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let v = self.numerator.eval(point);
        match &self.denominator {
            None => v,
            Some(d) => v / d.eval(point),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_jet() {
        let p = Polynomial::constant(3, 2.0);
        let j = p.eval_jet2(&[0.3, -1.0, 4.0]);
        assert_eq!(j.value, 2.0);
        assert!(j.gradient.iter().all(|&g| g == 0.0));
        assert!(j.hessian.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn linear_jet() {
        let p = Polynomial::var(2, 0).add(&Polynomial::var(2, 1));
        let j = p.eval_jet2(&[1.0, 2.0]);
        assert_eq!(j.value, 3.0);
        assert_eq!(j.gradient, vec![1.0, 1.0]);
        assert!(j.hessian.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn cancellation_prunes() {
        let p = Polynomial::var(2, 0);
        assert!(p.sub(&p).is_zero());
        let q = Polynomial::var(2, 0).mul(&Polynomial::var(2, 1));
        assert_eq!(q.n_terms(), 1);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn derivative_and_lift() {
        // x1^3 x2 + 2 x2
        let p = Polynomial::monomial(1.0, vec![3, 1]).add(&Polynomial::monomial(2.0, vec![0, 1]));
        let dx = p.derivative(0);
        assert_eq!(dx, Polynomial::monomial(3.0, vec![2, 1]));
        let lifted = p.lift(4, 1);
        assert_eq!(lifted.eval(&[9.0, 2.0, 3.0, 9.0]), p.eval(&[2.0, 3.0]));
        assert!(lifted.depends_only_on(|i| i == 1 || i == 2));
    }

    #[test]
    fn rejects_wrong_exponent_length() {
        let t = Term {
            coeff: 1.0,
            exps: vec![1],
        };
        assert!(Polynomial::from_terms(2, &[t]).is_err());
    }
}
