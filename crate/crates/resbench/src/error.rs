use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The mean of the linearized coefficient vanishes; critical parameters
    /// and the whole spectral analysis are undefined.
    #[error("beta = {0:e} is too close to zero; analysis requires beta != 0")]
    BetaZero(f64),

    #[error("root iteration on branch {branch} did not converge within {iters} steps")]
    NoConvergence { branch: i64, iters: usize },

    #[error("z = {z} is within {dist:e} of the spectrum; resolvent is undefined there")]
    NearSpectrum { z: Complex64, dist: f64 },

    #[error(
        "spectral denominator |mu + gamma*beta| = {0:e} is degenerate (non-simple eigenvalue)"
    )]
    DegenerateDenominator(f64),

    #[error("cubic data is degenerate: |T - 11 S^2 / 5| = {0:e}")]
    DegenerateCubic(f64),

    #[error("config error: {0}")]
    Schema(String),

    #[error("state sup-norm {0:e} exceeds the overflow guard; trajectory diverged")]
    Overflow(f64),

    #[error("attempted to remove the resonant monomial w^{k} wbar^{l}")]
    ResonantDivisor { k: usize, l: usize },

    #[error("t = {0} lies outside the domain [-1, 0]")]
    OutOfDomain(f64),

    #[error("gamma = {gamma} is not the critical value {expected} (index {j})")]
    NotCritical { gamma: f64, expected: f64, j: i32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
