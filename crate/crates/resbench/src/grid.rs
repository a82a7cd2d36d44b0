//! Complex-valued functions sampled on the uniform grid t_k = -1 + k/N over
//! [-1, 0], together with the quadrature rules every operator in this crate
//! is built from.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A function on [-1, 0] stored as N+1 complex samples at t_k = -1 + k/N.
///
/// N must be even (composite Simpson) and at least 4 (cubic stencils).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 5 || values.len().is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "need an odd number of samples >= 5 (N even), got {}",
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { values })
    }

    /// Sample a function at the grid nodes. Panics if `n` is odd or < 4.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        assert!(
            n >= 4 && n.is_multiple_of(2),
            "grid resolution must be even and >= 4"
        );
        let values = (0..=n).map(|k| f(node(n, k))).collect();
        Self { values }
    }

    pub fn real_from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(n, |t| Complex64::new(f(t), 0.0))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_| Complex64::ZERO)
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::from_fn(n, |_| c)
    }

    /// Number of grid intervals N.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    /// The node t_k.
    pub fn node(&self, k: usize) -> f64 {
        node(self.n(), k)
    }

    /// Value at t = 0 (the right endpoint).
    pub fn at_zero(&self) -> Complex64 {
        *self.values.last().unwrap()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another grid function of the same resolution.
    pub fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.n(), other.n(), "grid resolution mismatch");
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Composite Simpson approximation of the integral over [-1, 0].
    pub fn integrate(&self) -> Complex64 {
        let n = self.n();
        let h = 1.0 / n as f64;
        let mut sum = self.values[0] + self.values[n];
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * self.values[k];
        }
        sum * (h / 3.0)
    }

    /// Cumulative integral: node k holds the integral from -1 to t_k.
    ///
    /// Each grid interval is integrated through the cubic interpolant of the
    /// four nearest nodes, so every node value carries the full O(N^-4)
    /// accuracy, not just the even ones.
    pub fn cumulative(&self) -> Self {
        let n = self.n();
        let h = 1.0 / n as f64;
        let v = &self.values;
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = Complex64::ZERO;
        out.push(acc);
        for k in 0..n {
            let seg = if k == 0 {
                9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]
            } else if k == n - 1 {
                v[n - 3] - 5.0 * v[n - 2] + 19.0 * v[n - 1] + 9.0 * v[n]
            } else {
                -v[k - 1] + 13.0 * v[k] + 13.0 * v[k + 1] - v[k + 2]
            };
            acc += seg * (h / 24.0);
            out.push(acc);
        }
        Self { values: out }
    }

    /// Cubic interpolation through the four nodes nearest to t; exact at the
    /// nodes and for polynomials up to degree 3.
    pub fn eval_at(&self, t: f64) -> Result<Complex64> {
        if !(-1.0 - 1e-12..=1e-12).contains(&t) {
            return Err(Error::OutOfDomain(t));
        }
        let n = self.n();
        let u = (t.clamp(-1.0, 0.0) + 1.0) * n as f64;
        let cell = (u.floor() as usize).min(n - 1);
        let base = cell.saturating_sub(1).min(n - 3);
        let x = u - base as f64;
        let v = &self.values;
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        Ok(v[base] * l0 + v[base + 1] * l1 + v[base + 2] * l2 + v[base + 3] * l3)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// The grid node t_k = -1 + k/N.
pub fn node(n: usize, k: usize) -> f64 {
    -1.0 + k as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 4096;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn integrate_constant_and_linear() {
        let one = GridFunction::constant(N, c(1.0, 0.0));
        assert!((one.integrate() - c(1.0, 0.0)).norm() < 1e-14);

        let ramp = GridFunction::real_from_fn(N, |t| t);
        assert!((ramp.integrate() - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cumulative_of_constant_is_ramp() {
        let one = GridFunction::constant(N, c(1.0, 0.0));
        let cum = one.cumulative();
        for k in (0..=N).step_by(111) {
            let expect = cum.node(k) + 1.0;
            assert!((cum.value(k) - c(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn cumulative_endpoint_matches_integrate() {
        // Both rules are O(N^-4); at N = 4096 on smooth data they agree to
        // roundoff.
        let g = GridFunction::from_fn(N, |t| (c(0.0, 2.0) * t).exp() + c(t, 0.0));
        let diff = (g.cumulative().at_zero() - g.integrate()).norm();
        assert!(diff < 1e-12, "diff = {diff:e}");
    }

    #[test]
    fn eval_at_nodes_is_exact() {
        let g = GridFunction::from_fn(64, |t| c(t.sin(), t.cos()));
        for k in [0usize, 1, 17, 63, 64] {
            let t = g.node(k);
            assert_eq!(g.eval_at(t).unwrap(), g.value(k));
        }
    }

    #[test]
    fn eval_at_reproduces_cubics() {
        let g = GridFunction::real_from_fn(64, |t| t * t * t);
        let y = g.eval_at(-0.3).unwrap();
        assert!((y - c(-0.027, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_at_exponential_accuracy() {
        let g = GridFunction::real_from_fn(256, |t| t.exp());
        let y = g.eval_at(-0.5).unwrap();
        assert!((y - c((-0.5f64).exp(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn eval_at_rejects_outside_domain() {
        let g = GridFunction::zeros(16);
        assert!(matches!(g.eval_at(0.5), Err(Error::OutOfDomain(_))));
        assert!(matches!(g.eval_at(-1.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn new_rejects_bad_shapes() {
        assert!(GridFunction::new(vec![Complex64::ZERO; 4]).is_err());
        assert!(GridFunction::new(vec![Complex64::ZERO; 3]).is_err());
        let mut v = vec![Complex64::ZERO; 17];
        v[3] = c(f64::NAN, 0.0);
        assert!(GridFunction::new(v).is_err());
    }

    #[test]
    fn quadrature_order_is_four() {
        // Error should shrink by ~16 per doubling, well away from roundoff.
        for a in [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 3.0)] {
            let exact = (a.exp() - 1.0) / a * (-a).exp();
            let err = |n: usize| {
                let g = GridFunction::from_fn(n, |t| (a * t).exp());
                (g.integrate() - exact).norm()
            };
            let mut prev = err(16);
            for n in [32, 64, 128] {
                let cur = err(n);
                assert!(
                    cur * 12.0 <= prev,
                    "a = {a}, n = {n}: ratio {} < 12",
                    prev / cur
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn cumulative_order_is_four() {
        let a = c(2.0, 3.0);
        let err = |n: usize| {
            let g = GridFunction::from_fn(n, |t| (a * t).exp());
            let cum = g.cumulative();
            (0..=n)
                .map(|k| {
                    let t = cum.node(k);
                    let exact = ((a * t).exp() - (-a).exp()) / a;
                    (cum.value(k) - exact).norm()
                })
                .fold(0.0, f64::max)
        };
        let mut prev = err(16);
        for n in [32, 64, 128] {
            let cur = err(n);
            assert!(cur * 12.0 <= prev, "n = {n}: ratio {}", prev / cur);
            prev = cur;
        }
    }
}
