//! Floquet data of the linearized equation: characteristic roots, multipliers
//! and eigenfunctions, the monodromy operator, its resolvent, spectral
//! functionals and projections, critical parameters and transversality.
//!
//! The multipliers are the roots of Delta(z) = z - exp(B/z) with B = gamma*beta,
//! equivalently mu = e^lambda with lambda e^lambda = B. A root is a simple
//! eigenvalue exactly when lambda != -1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::problem::{DerivedLinearData, ProblemSpec};

/// Convergence target for the characteristic roots.
pub const ROOT_TOL: f64 = 1e-13;
/// Below this distance of |Delta(z)| the resolvent is refused.
pub const NEAR_SPECTRUM_TOL: f64 = 1e-9;
/// |lambda + 1| below this marks a double characteristic root.
pub const SIMPLE_TOL: f64 = 1e-6;
/// Guard for the spectral denominator mu + gamma*beta = mu (1 + lambda).
pub const DENOM_TOL: f64 = 1e-12;

const NEWTON_MAX_ITERS: usize = 100;

/// One characteristic root lambda with its multiplier mu = e^lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetExponent {
    pub lambda: Complex64,
    pub mu: Complex64,
    /// Algebraic multiplicity 1, i.e. lambda != -1.
    pub simple: bool,
}

/// A multiplier together with its eigenfunction chi(t) = exp(B(t)/mu).
#[derive(Debug, Clone)]
pub struct FloquetDatum {
    pub mu: Complex64,
    pub lambda: Complex64,
    pub chi: GridFunction,
    pub simple: bool,
}

/// A critical parameter value gamma_j where the multipliers +-i sit on the
/// unit circle.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub j: i32,
    pub gamma_j: f64,
    /// The critical multiplier i.
    pub mu: Complex64,
    /// gamma_j * beta = -pi/2 + 2 j pi.
    pub btot: f64,
    /// d mu / d gamma at gamma_j.
    pub dmu_dgamma: Complex64,
    /// d |mu| / d gamma at gamma_j: the speed of the unit-circle crossing.
    pub d: f64,
}

/// Delta(z) = z - exp(btot / z); its roots are the Floquet multipliers.
pub fn delta_char(btot: f64, z: Complex64) -> Complex64 {
    z - (Complex64::from(btot) / z).exp()
}

fn branch_seed(w: Complex64, k: i64) -> Complex64 {
    let e = std::f64::consts::E;
    if (k == 0 || k == -1) && (w * e + 1.0).norm() < 0.5 {
        // Expansion of the two merging roots around the branch point -1/e.
        let p = (2.0 * (w * e + 1.0)).sqrt();
        let sign = if k == 0 { 1.0 } else { -1.0 };
        return -1.0 + sign * p - p * p / 3.0;
    }
    if k == 0 && w.norm() < 1.5 && (w.im != 0.0 || w.re > -1.0 / e) {
        // Series seed for the principal root away from the cut.
        return w * (1.0 - w);
    }
    let l1 = w.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
    l1 - l1.ln()
}

fn newton_root(w: Complex64, k: i64) -> Result<Complex64> {
    let tol = ROOT_TOL * w.norm().max(1.0);
    let mut lam = branch_seed(w, k);
    for _ in 0..NEWTON_MAX_ITERS {
        let el = lam.exp();
        let f = lam * el - w;
        if f.norm() <= tol {
            return Ok(lam);
        }
        let df = (lam + 1.0) * el;
        if df.norm() < 1e-280 {
            lam += Complex64::new(1e-8, 1e-8);
            continue;
        }
        let mut step = f / df;
        if step.norm() > 1.0 {
            step /= step.norm();
        }
        lam -= step;
    }
    // A stalled iteration right at a double root is still a valid root.
    let f = (lam * lam.exp() - w).norm();
    if f <= tol {
        Ok(lam)
    } else {
        Err(Error::NoConvergence {
            branch: k,
            iters: NEWTON_MAX_ITERS,
        })
    }
}

/// The `count` characteristic roots of lambda e^lambda = btot with the largest
/// real parts, sorted by descending real part. For real btot the conjugate of
/// every root is a root as well, and straddled conjugate partners are kept, so
/// the result may hold one extra entry.
pub fn floquet_exponents(btot: Complex64, count: usize) -> Result<Vec<FloquetExponent>> {
    assert!(count >= 1, "count must be positive");
    if btot.norm() < 1e-12 {
        return Err(Error::BetaZero(btot.norm()));
    }
    let span = count as i64 + 2;
    let mut roots: Vec<Complex64> = Vec::new();
    for k in -span..=span {
        let lam = newton_root(btot, k)?;
        if roots.iter().all(|r| (r - lam).norm() > 1e-6) {
            roots.push(lam);
        }
    }
    if btot.im == 0.0 {
        // Conjugate completion: repairs any branch seed that landed on the
        // partner root across the real axis.
        let mut extra: Vec<Complex64> = Vec::new();
        for &r in &roots {
            if r.im.abs() > 1e-9 && roots.iter().all(|s| (s - r.conj()).norm() > 1e-6) {
                extra.push(r.conj());
            }
        }
        roots.extend(extra);
    }
    roots.sort_by(|a, b| {
        let re = b.re.partial_cmp(&a.re).unwrap();
        if (a.re - b.re).abs() < 1e-9 {
            b.im.partial_cmp(&a.im).unwrap()
        } else {
            re
        }
    });
    let mut cut = count.min(roots.len());
    // Never split a conjugate pair at the cut.
    if cut < roots.len() && (roots[cut] - roots[cut - 1].conj()).norm() < 1e-9 {
        cut += 1;
    }
    roots.truncate(cut);
    Ok(roots
        .into_iter()
        .map(|lambda| FloquetExponent {
            lambda,
            mu: lambda.exp(),
            simple: (lambda + 1.0).norm() > SIMPLE_TOL,
        })
        .collect())
}

/// chi_mu(t) = exp(B(t)/mu), normalized so chi(-1) = 1.
pub fn eigenfunction(data: &DerivedLinearData, mu: Complex64) -> GridFunction {
    data.b_cum.map(|bb| (bb / mu).exp())
}

/// The monodromy operator U(phi)(t) = phi(0) + integral of b phi from -1 to t.
pub fn monodromy_apply(data: &DerivedLinearData, phi: &GridFunction) -> GridFunction {
    let cum = data.b.mul(phi).cumulative();
    let phi0 = phi.at_zero();
    cum.map(|v| v + phi0)
}

/// Sup-norm residual of the eigenvalue equation U(chi) = mu chi.
pub fn floquet_residual(data: &DerivedLinearData, mu: Complex64, chi: &GridFunction) -> f64 {
    monodromy_apply(data, chi).sub(&chi.scale(mu)).sup_norm()
}

/// Solve (z I - U) x = psi in closed form.
///
/// Writing the defining equation z x(t) = x(0) + int_{-1}^t b x + psi(t) as a
/// linear integral equation and integrating with the factor exp(-B(t)/z)
/// yields
///
///   x(t) = ( x0 e^{B(t)/z} + e^{B(t)/z} I(t) + psi(t) ) / z,
///   I(t) = int_{-1}^t e^{-B(s)/z} (b(s)/z) psi(s) ds,
///   x0   = ( psi(0) + e^{B/z} I(0) ) / Delta(z).
pub fn resolvent_apply(
    data: &DerivedLinearData,
    z: Complex64,
    psi: &GridFunction,
) -> Result<GridFunction> {
    if z.norm() < NEAR_SPECTRUM_TOL {
        return Err(Error::NearSpectrum { z, dist: z.norm() });
    }
    let delta = delta_char(data.btot, z);
    if delta.norm() <= NEAR_SPECTRUM_TOL {
        return Err(Error::NearSpectrum {
            z,
            dist: delta.norm(),
        });
    }
    let integrand = psi
        .zip_map(&data.b_cum, |p, bb| (-bb / z).exp() * p)
        .mul(&data.b)
        .scale(1.0 / z);
    let cum = integrand.cumulative();
    let x0 = (psi.at_zero() + (Complex64::from(data.btot) / z).exp() * cum.at_zero()) / delta;
    let exp_b = data.b_cum.map(|bb| (bb / z).exp());
    Ok(psi.zip_map(&exp_b.mul(&cum.map(|v| v + x0)), |p, rest| (rest + p) / z))
}

/// The coordinate functional R_mu of the rank-one spectral projection:
/// R_mu(psi) = (psi(0) + int b psi / chi_mu) / (mu + gamma beta).
pub fn spectral_functional(
    data: &DerivedLinearData,
    mu: Complex64,
    psi: &GridFunction,
) -> Result<Complex64> {
    let denom = mu + data.btot;
    if denom.norm() < DENOM_TOL {
        return Err(Error::DegenerateDenominator(denom.norm()));
    }
    let integrand = psi
        .zip_map(&data.b_cum, |p, bb| (-bb / mu).exp() * p)
        .mul(&data.b);
    Ok((psi.at_zero() + integrand.integrate()) / denom)
}

/// P_mu(psi) = chi_mu R_mu(psi).
pub fn spectral_projection(
    data: &DerivedLinearData,
    mu: Complex64,
    psi: &GridFunction,
) -> Result<GridFunction> {
    let coord = spectral_functional(data, mu, psi)?;
    Ok(eigenfunction(data, mu).scale(coord))
}

/// The critical parameter with index j: gamma_j beta = -pi/2 + 2 j pi, where
/// the multiplier pair +-i crosses the unit circle.
pub fn critical_point(p: &ProblemSpec, j: i32) -> CriticalPoint {
    let beta = p.beta();
    let btot = -PI / 2.0 + 2.0 * PI * j as f64;
    let gamma_j = btot / beta;
    // Implicit differentiation of mu = exp(gamma beta / mu) at mu = i,
    // lambda = -i btot: mu'(gamma_j) = beta / (1 + lambda) = beta (1 + i btot) / (1 + btot^2).
    let dmu_dgamma = Complex64::new(beta, 0.0) * Complex64::new(1.0, btot) / (1.0 + btot * btot);
    let d = beta * btot / (1.0 + btot * btot);
    CriticalPoint {
        j,
        gamma_j,
        mu: Complex64::i(),
        btot,
        dmu_dgamma,
        d,
    }
}

pub fn critical_points(p: &ProblemSpec, j_list: &[i32]) -> Vec<CriticalPoint> {
    j_list.iter().map(|&j| critical_point(p, j)).collect()
}

/// Exponents enriched with their eigenfunctions.
pub fn floquet_data(data: &DerivedLinearData, count: usize) -> Result<Vec<FloquetDatum>> {
    Ok(floquet_exponents(Complex64::from(data.btot), count)?
        .into_iter()
        .map(|e| FloquetDatum {
            mu: e.mu,
            lambda: e.lambda,
            chi: eigenfunction(data, e.mu),
            simple: e.simple,
        })
        .collect())
}
