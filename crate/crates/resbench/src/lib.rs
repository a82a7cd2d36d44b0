//! Floquet analysis and resonant normal forms for the time-periodic scalar
//! delay differential equation x'(t) = gamma f(t, x(t-1)) whose delay equals
//! the period.
//!
//! At the critical parameter values the Floquet multipliers on the unit
//! circle are +-i (a quarter-turn strong resonance), so the classical
//! invariant-curve bifurcation theorem does not apply. This crate locates the
//! critical parameters, computes spectral data by quadrature on a uniform
//! grid, assembles the third-order resonant normal form, classifies the
//! bifurcation (invariant curve vs. two families of 4-periodic orbits), and
//! verifies the predictions two independent ways: a brute-force polynomial
//! normal-form oracle and exact time-one-map simulation.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod grid;
pub mod normalform;
pub mod polynf;
pub mod problem;
pub mod sampling;

pub use error::{Error, Result};
pub use floquet::{critical_point, critical_points, CriticalPoint, FloquetDatum, FloquetExponent};
pub use grid::GridFunction;
pub use normalform::{normal_form_report, Classification, NormalFormReport, Verdict};
pub use problem::{
    derived_linear_data, DerivedLinearData, Nonlinearity, PowerTerm, ProblemKind, ProblemSpec,
    TrigPoly, DEFAULT_GRID_N,
};
