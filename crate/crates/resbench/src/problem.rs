//! The equation under study and its derived linear data.
//!
//! The model problem is the scalar delay equation x'(t) = gamma f(t, x(t-1))
//! with f one-periodic in t and f(t, 0) = 0, the delay equal to the period.
//! Two families are supported: a general polynomial-in-xi nonlinearity with
//! trigonometric-polynomial coefficients per power, and the periodic
//! coefficient class x'(t) = -gamma r(t) g(x(t-1)).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

pub const DEFAULT_GRID_N: usize = 4096;

/// Threshold below which the mean linear coefficient counts as zero.
pub const BETA_TOL: f64 = 1e-12;

/// Real trigonometric polynomial dc + sum_k (cos[k-1] cos(2 pi k t) + sin[k-1] sin(2 pi k t)).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub dc: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(dc: f64) -> Self {
        Self {
            dc,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.dc;
        for (k, &a) in self.cos.iter().enumerate() {
            acc += a * (2.0 * PI * (k + 1) as f64 * t).cos();
        }
        for (k, &b) in self.sin.iter().enumerate() {
            acc += b * (2.0 * PI * (k + 1) as f64 * t).sin();
        }
        acc
    }

    /// Mean over one period; the oscillatory terms integrate to zero.
    pub fn mean(&self) -> f64 {
        self.dc
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }
}

/// Scalar nonlinearity g with g(0) = 0 and g'(0) = 1 for the periodic
/// coefficient class.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// g(xi) = xi + (S/2) xi^2 + (T/6) xi^3, exactly cubic.
    Cubic { s: f64, t: f64 },
    /// g(xi) = e^xi - 1, which has S = 1 and T = 1.
    Expm1,
}

impl Nonlinearity {
    pub fn s(&self) -> f64 {
        match self {
            Nonlinearity::Cubic { s, .. } => *s,
            Nonlinearity::Expm1 => 1.0,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Nonlinearity::Cubic { t, .. } => *t,
            Nonlinearity::Expm1 => 1.0,
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Nonlinearity::Cubic { s, t } => xi + 0.5 * s * xi * xi + t / 6.0 * xi * xi * xi,
            Nonlinearity::Expm1 => xi.exp_m1(),
        }
    }
}

/// One power of the general nonlinearity: coeff(t) * xi^power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTerm {
    pub power: u32,
    pub coeff: TrigPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    /// f(t, xi) = sum_p c_p(t) xi^p with p >= 1.
    General { terms: Vec<PowerTerm> },
    /// f(t, xi) = -r(t) g(xi).
    PeriodicCoefficient { r: TrigPoly, g: Nonlinearity },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    kind: ProblemKind,
    gamma: f64,
    grid_n: usize,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, gamma: f64, grid_n: usize) -> Result<Self> {
        if grid_n < 8 || !grid_n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "grid_n must be even and >= 8, got {grid_n}"
            )));
        }
        if !gamma.is_finite() {
            return Err(Error::Schema("gamma must be finite".into()));
        }
        let max_degree = match &kind {
            ProblemKind::General { terms } => {
                if terms.iter().any(|t| t.power == 0) {
                    return Err(Error::Schema(
                        "power 0 is not allowed: f(t, 0) = 0 must hold".into(),
                    ));
                }
                for w in terms.windows(2) {
                    if w[1].power <= w[0].power {
                        return Err(Error::Schema(
                            "coefficient powers must be strictly increasing".into(),
                        ));
                    }
                }
                terms.iter().map(|t| t.coeff.degree()).max().unwrap_or(0)
            }
            ProblemKind::PeriodicCoefficient { r, .. } => r.degree(),
        };
        // Trig coefficients are evaluated analytically at the nodes; keep the
        // harmonic content far below the grid Nyquist limit.
        if max_degree > grid_n / 8 {
            return Err(Error::InvalidGrid(format!(
                "trig degree {max_degree} too high for grid_n = {grid_n} (need degree <= N/8)"
            )));
        }
        let spec = Self {
            kind,
            gamma,
            grid_n,
        };
        let beta = spec.beta();
        if beta.abs() < BETA_TOL {
            return Err(Error::BetaZero(beta));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }

    pub fn with_grid_n(&self, grid_n: usize) -> Result<Self> {
        Self::new(self.kind.clone(), self.gamma, grid_n)
    }

    /// beta = integral of f_xi(t, 0) over one period, read off the DC terms.
    pub fn beta(&self) -> f64 {
        match &self.kind {
            ProblemKind::General { terms } => terms
                .iter()
                .find(|t| t.power == 1)
                .map_or(0.0, |t| t.coeff.mean()),
            ProblemKind::PeriodicCoefficient { r, .. } => -r.mean(),
        }
    }

    /// (S, T) for the periodic coefficient class.
    pub fn cubic_data(&self) -> Option<(f64, f64)> {
        match &self.kind {
            ProblemKind::PeriodicCoefficient { g, .. } => Some((g.s(), g.t())),
            ProblemKind::General { .. } => None,
        }
    }

    pub fn f(&self, t: f64, xi: f64) -> f64 {
        match &self.kind {
            ProblemKind::General { terms } => terms
                .iter()
                .map(|term| term.coeff.eval(t) * xi.powi(term.power as i32))
                .sum(),
            ProblemKind::PeriodicCoefficient { r, g } => -r.eval(t) * g.eval(xi),
        }
    }

    pub fn f_xi0(&self, t: f64) -> f64 {
        match &self.kind {
            ProblemKind::General { terms } => terms
                .iter()
                .find(|term| term.power == 1)
                .map_or(0.0, |term| term.coeff.eval(t)),
            ProblemKind::PeriodicCoefficient { r, .. } => -r.eval(t),
        }
    }

    pub fn f_xixi0(&self, t: f64) -> f64 {
        match &self.kind {
            ProblemKind::General { terms } => terms
                .iter()
                .find(|term| term.power == 2)
                .map_or(0.0, |term| 2.0 * term.coeff.eval(t)),
            ProblemKind::PeriodicCoefficient { r, g } => -g.s() * r.eval(t),
        }
    }

    pub fn f_xixixi0(&self, t: f64) -> f64 {
        match &self.kind {
            ProblemKind::General { terms } => terms
                .iter()
                .find(|term| term.power == 3)
                .map_or(0.0, |term| 6.0 * term.coeff.eval(t)),
            ProblemKind::PeriodicCoefficient { r, g } => -g.t() * r.eval(t),
        }
    }
}

/// Tabulated data of the linearized equation y'(t) = b(t) y(t-1):
/// b(t) = gamma f_xi(t, 0), its cumulative B(t), and the scalar B(0) = gamma beta.
#[derive(Debug, Clone)]
pub struct DerivedLinearData {
    pub beta: f64,
    /// B(0) = gamma * beta.
    pub btot: f64,
    pub b: GridFunction,
    pub b_cum: GridFunction,
}

impl DerivedLinearData {
    /// Real part of B(t_k); the imaginary part is identically zero.
    pub fn big_b(&self, k: usize) -> f64 {
        self.b_cum.value(k).re
    }

    pub fn grid_n(&self) -> usize {
        self.b.n()
    }
}

pub fn derived_linear_data(p: &ProblemSpec) -> Result<DerivedLinearData> {
    let beta = p.beta();
    if beta.abs() < BETA_TOL {
        return Err(Error::BetaZero(beta));
    }
    let gamma = p.gamma();
    let b = GridFunction::real_from_fn(p.grid_n(), |t| gamma * p.f_xi0(t));
    let b_cum = b.cumulative();
    Ok(DerivedLinearData {
        beta,
        btot: gamma * beta,
        b,
        b_cum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn wright_spec(gamma: f64, n: usize) -> ProblemSpec {
        ProblemSpec::new(
            ProblemKind::PeriodicCoefficient {
                r: TrigPoly::constant(1.0),
                g: Nonlinearity::Expm1,
            },
            gamma,
            n,
        )
        .unwrap()
    }

    #[test]
    fn wright_beta_is_minus_one() {
        let p = wright_spec(1.0, 256);
        assert_eq!(p.beta(), -1.0);
        assert_eq!(p.cubic_data(), Some((1.0, 1.0)));
    }

    #[test]
    fn general_beta_is_dc_of_linear_term() {
        let p = ProblemSpec::new(
            ProblemKind::General {
                terms: vec![PowerTerm {
                    power: 1,
                    coeff: TrigPoly {
                        dc: 2.0,
                        cos: vec![1.0],
                        sin: vec![],
                    },
                }],
            },
            1.0,
            256,
        )
        .unwrap();
        assert_eq!(p.beta(), 2.0);
    }

    #[test]
    fn quadratic_only_term_is_beta_zero() {
        let err = ProblemSpec::new(
            ProblemKind::General {
                terms: vec![PowerTerm {
                    power: 2,
                    coeff: TrigPoly::constant(1.0),
                }],
            },
            1.0,
            256,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BetaZero(_)));
    }

    #[test]
    fn constant_coefficient_linear_data() {
        let p = wright_spec(std::f64::consts::FRAC_PI_2, 4096);
        let data = derived_linear_data(&p).unwrap();
        assert!((data.btot + PI / 2.0).abs() < 1e-15);
        // B(t) = -(pi/2)(t + 1)
        for k in (0..=4096).step_by(409) {
            let t = data.b_cum.node(k);
            let expect = -PI / 2.0 * (t + 1.0);
            assert!((data.big_b(k) - expect).abs() < 1e-12);
        }
        assert_eq!(data.big_b(0), 0.0);
        assert!((data.big_b(4096) - data.btot).abs() < 1e-10);
    }

    #[test]
    fn exp_kernel_integral_identity() {
        // cumulative(e^B b) = e^B(t) - 1 for the periodic coefficient class.
        let p = ProblemSpec::new(
            ProblemKind::PeriodicCoefficient {
                r: TrigPoly {
                    dc: 0.8,
                    cos: vec![0.3, -0.1],
                    sin: vec![0.2],
                },
                g: Nonlinearity::Expm1,
            },
            2.5,
            4096,
        )
        .unwrap();
        let data = derived_linear_data(&p).unwrap();
        let integrand = data.b.zip_map(&data.b_cum, |b, bb| b * bb.exp());
        let cum = integrand.cumulative();
        for k in (0..=4096).step_by(137) {
            let expect = data.big_b(k).exp() - 1.0;
            assert!((cum.value(k).re - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn nyquist_guard_rejects_dense_trig() {
        let err = ProblemSpec::new(
            ProblemKind::PeriodicCoefficient {
                r: TrigPoly {
                    dc: 1.0,
                    cos: vec![0.1; 100],
                    sin: vec![],
                },
                g: Nonlinearity::Expm1,
            },
            1.0,
            256,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }
}
