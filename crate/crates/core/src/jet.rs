//! Second-order jets: value, gradient and Hessian of a scalar function at a
//! point, propagated through arithmetic by the product and quotient rules.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `n x n`, symmetric.
    pub hessian: Vec<f64>,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        Jet2 {
            value,
            gradient: vec![0.0; n],
            hessian: vec![0.0; n * n],
        }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(n: usize, i: usize, value: f64) -> Self {
        let mut j = Self::constant(n, value);
        j.gradient[i] = 1.0;
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    #[inline]
    pub fn hess(&self, a: usize, b: usize) -> f64 {
        self.hessian[a * self.dim() + b]
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet2 {
            value: self.value + o.value,
            gradient: self
                .gradient
                .iter()
                .zip(&o.gradient)
                .map(|(a, b)| a + b)
                .collect(),
            hessian: self
                .hessian
                .iter()
                .zip(&o.hessian)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            value: self.value * s,
            gradient: self.gradient.iter().map(|g| g * s).collect(),
            hessian: self.hessian.iter().map(|h| h * s).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let mut out = Self::constant(n, self.value * o.value);
        for a in 0..n {
            out.gradient[a] = self.gradient[a] * o.value + self.value * o.gradient[a];
            for b in 0..n {
                out.hessian[a * n + b] = self.hess(a, b) * o.value
                    + self.gradient[a] * o.gradient[b]
                    + self.gradient[b] * o.gradient[a]
                    + self.value * o.hess(a, b);
            }
        }
        out
    }

    /// `1 / self`
    pub fn recip(&self) -> Self {
        let n = self.dim();
        let v = self.value;
        let mut out = Self::constant(n, 1.0 / v);
        let v2 = v * v;
        let v3 = v2 * v;
        for a in 0..n {
            out.gradient[a] = -self.gradient[a] / v2;
            for b in 0..n {
                out.hessian[a * n + b] =
                    2.0 * self.gradient[a] * self.gradient[b] / v3 - self.hess(a, b) / v2;
            }
        }
        out
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_xy() {
        let x = Jet2::variable(2, 0, 3.0);
        let y = Jet2::variable(2, 1, 5.0);
        let p = x.mul(&y);
        assert_eq!(p.value, 15.0);
        assert_eq!(p.gradient, vec![5.0, 3.0]);
        assert_eq!(p.hessian, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn quotient_rule_on_reciprocal() {
        // f = 1 / (1 + x^2) at x = 2: f = 1/5, f' = -2x/(1+x^2)^2, f'' = (6x^2 - 2)/(1+x^2)^3
        let x = Jet2::variable(1, 0, 2.0);
        let d = Jet2::constant(1, 1.0).add(&x.mul(&x));
        let f = Jet2::constant(1, 1.0).div(&d);
        assert!((f.value - 0.2).abs() < 1e-15);
        assert!((f.gradient[0] + 4.0 / 25.0).abs() < 1e-15);
        assert!((f.hessian[0] - 22.0 / 125.0).abs() < 1e-15);
    }
}
