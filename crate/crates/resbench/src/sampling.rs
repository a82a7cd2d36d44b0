//! Seeded random inputs for the self-check suites: problem specs with
//! bounded coefficient mass, smooth grid functions, and restricted-map
//! coefficient sets for the normal-form oracle.
//!
//! Harmonic amplitudes are kept small enough that every quadrature in the
//! pipeline stays far below the 1e-8 verification tolerance at the default
//! resolution.

use num_complex::Complex64;
use rand::Rng;

use crate::grid::GridFunction;
use crate::problem::{Nonlinearity, PowerTerm, ProblemKind, ProblemSpec, TrigPoly};

pub fn random_trig(rng: &mut impl Rng, dc_range: (f64, f64), harmonic_mass: f64) -> TrigPoly {
    let mag = rng.gen_range(dc_range.0..dc_range.1);
    let dc = if rng.gen_bool(0.5) { mag } else { -mag };
    let k = rng.gen_range(1..=3usize);
    let amp = harmonic_mass / k as f64;
    TrigPoly {
        dc,
        cos: (0..k).map(|_| rng.gen_range(-amp..amp)).collect(),
        sin: (0..k).map(|_| rng.gen_range(-amp..amp)).collect(),
    }
}

/// A periodic coefficient problem with |dc| in [0.5, 1.2] and random cubic
/// data; gamma is left at 1 and is usually replaced by a critical value.
pub fn random_periodic_spec(rng: &mut impl Rng, n: usize) -> ProblemSpec {
    let r = random_trig(rng, (0.5, 1.2), 0.4);
    let g = Nonlinearity::Cubic {
        s: rng.gen_range(-2.0..2.0),
        t: rng.gen_range(-2.0..2.0),
    };
    ProblemSpec::new(ProblemKind::PeriodicCoefficient { r, g }, 1.0, n).unwrap()
}

/// A general problem with powers 1..3 and independent trig coefficients.
pub fn random_general_spec(rng: &mut impl Rng, n: usize) -> ProblemSpec {
    let terms = vec![
        PowerTerm {
            power: 1,
            coeff: random_trig(rng, (0.5, 1.2), 0.3),
        },
        PowerTerm {
            power: 2,
            coeff: random_trig(rng, (0.0, 0.8), 0.5),
        },
        PowerTerm {
            power: 3,
            coeff: random_trig(rng, (0.0, 0.8), 0.5),
        },
    ];
    ProblemSpec::new(ProblemKind::General { terms }, 1.0, n).unwrap()
}

/// A smooth complex function on the grid, built from a few harmonics.
pub fn random_smooth_function(rng: &mut impl Rng, n: usize) -> GridFunction {
    let coef: Vec<(Complex64, f64)> = (0..4)
        .map(|k| {
            (
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                k as f64,
            )
        })
        .collect();
    GridFunction::from_fn(n, |t| {
        coef.iter()
            .map(|(c, k)| c * (Complex64::i() * (2.0 * std::f64::consts::PI * k * t)).exp())
            .sum()
    })
}

/// Restricted-map coefficients for the oracle, including the two slots the
/// closed formulas do not use.
#[derive(Debug, Clone, Copy)]
pub struct RhoSample {
    pub rho20: Complex64,
    pub rho11: Complex64,
    pub rho02: Complex64,
    pub rho30: Complex64,
    pub rho21: Complex64,
    pub rho12: Complex64,
    pub rho03: Complex64,
}

pub fn random_rho_set(rng: &mut impl Rng) -> RhoSample {
    let mut c = || Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    RhoSample {
        rho20: c(),
        rho11: c(),
        rho02: c(),
        rho30: c(),
        rho21: c(),
        rho12: c(),
        rho03: c(),
    }
}
