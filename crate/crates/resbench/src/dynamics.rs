//! Exact nonlinear time-one map and empirical attractor detection.
//!
//! Because the delay equals the period, one period of the solution is an
//! explicit integral of the previous segment:
//! F(phi)(t) = phi(0) + int_{-1}^t gamma f(s, phi(s)) ds.
//! Iterating F is therefore free of any time-stepping error; quadrature is
//! the only approximation. Trajectories are classified through the planar
//! coordinate z = R_i(phi) on the critical eigenspace.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::floquet::{critical_point, eigenfunction, spectral_functional, CriticalPoint};
use crate::grid::GridFunction;
use crate::problem::{derived_linear_data, ProblemSpec};

/// States with sup-norm beyond this are treated as escaped.
pub const OVERFLOW_GUARD: f64 = 1e6;
/// Mean |z| of the trailing iterates below this means the zero equilibrium.
pub const FIXED_POINT_TOL: f64 = 1e-8;
/// Relative cluster diameter bound for a 4-periodic verdict.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Maximal relative radial deviation for an invariant-curve verdict.
pub const RADIAL_DEV_TOL: f64 = 0.5;
/// Required angular coverage (radians) of the fourth-power angles.
pub const COVERAGE_TOL: f64 = 3.0;

pub const DEFAULT_IC_AMPLITUDE: f64 = 0.05;
pub const DEFAULT_TRANSIENT: usize = 800;
pub const DEFAULT_COLLECT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorKind {
    FixedPointZero,
    InvariantCurve,
    FourPeriodic,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractorReport {
    pub kind: AttractorKind,
    /// Mean |z| over the collected iterates.
    pub amplitude: f64,
    /// Mean of the per-step phase increments of z; near +-pi/2 at the
    /// quarter-turn resonance.
    pub rotation_mean: f64,
    pub rotation_dev: f64,
    /// Diameters of the four clusters when the 4-periodic test fired.
    pub cluster_diameters: Option<Vec<f64>>,
    /// Sup-norm of F^4(phi) - phi at the final state for a 4-periodic verdict.
    pub f4_residual: Option<f64>,
    pub iterates_used: (usize, usize),
}

/// Per-iterate planar coordinates and state norms, for CSV dumps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub z: Vec<Complex64>,
    pub sup_norm: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationOptions {
    pub ic_amplitude: f64,
    pub n_transient: usize,
    pub n_collect: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            ic_amplitude: DEFAULT_IC_AMPLITUDE,
            n_transient: DEFAULT_TRANSIENT,
            n_collect: DEFAULT_COLLECT,
        }
    }
}

/// One exact step of the time-one map at the given parameter value.
pub fn time_one_map(p: &ProblemSpec, gamma: f64, phi: &GridFunction) -> Result<GridFunction> {
    let sup = phi.sup_norm();
    if sup > OVERFLOW_GUARD {
        return Err(Error::Overflow(sup));
    }
    debug_assert!(
        phi.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max) <= 1e-12,
        "time-one map expects a real-valued state"
    );
    let n = phi.n();
    let integrand = GridFunction::real_from_fn(n, |t| {
        let k = ((t + 1.0) * n as f64).round() as usize;
        gamma * p.f(t, phi.value(k).re)
    });
    let phi0 = phi.at_zero();
    let next = integrand.cumulative().map(|v| v + phi0);
    if !next.is_finite() {
        return Err(Error::Overflow(f64::INFINITY));
    }
    Ok(next)
}

/// The planar coordinate z = R_i(phi) of a state along the critical
/// eigenfunction at the critical point `cp`.
pub fn project_state(p: &ProblemSpec, cp: &CriticalPoint, phi: &GridFunction) -> Complex64 {
    let data =
        derived_linear_data(&p.with_gamma(cp.gamma_j)).expect("beta was validated at construction");
    spectral_functional(&data, cp.mu, phi).expect("|i + btot| >= 1 for real btot")
}

/// The critical index whose gamma_j lies nearest to `gamma`.
pub fn nearest_critical_index(p: &ProblemSpec, gamma: f64) -> i32 {
    ((gamma * p.beta() + PI / 2.0) / (2.0 * PI)).round() as i32
}

fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

fn kmeans4(points: &[Complex64]) -> Vec<Vec<usize>> {
    assert!(points.len() >= 4);
    // A 4-cycle visits its clusters consecutively, so the first four points
    // are a deterministic, well-spread initialization.
    let mut centroids: Vec<Complex64> = points[..4].to_vec();
    let mut assign = vec![0usize; points.len()];
    for _ in 0..64 {
        let mut changed = false;
        for (i, &z) in points.iter().enumerate() {
            let best = (0..4)
                .min_by(|&a, &b| {
                    (z - centroids[a])
                        .norm()
                        .partial_cmp(&(z - centroids[b]).norm())
                        .unwrap()
                })
                .unwrap();
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<Complex64> = points
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == c)
                .map(|(&z, _)| z)
                .collect();
            if !members.is_empty() {
                *centroid = members.iter().sum::<Complex64>() / members.len() as f64;
            }
        }
        if !changed {
            break;
        }
    }
    (0..4)
        .map(|c| {
            (0..points.len())
                .filter(|&i| assign[i] == c)
                .collect::<Vec<usize>>()
        })
        .collect()
}

fn cluster_diameter(points: &[Complex64], members: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            d = d.max((points[a] - points[b]).norm());
        }
    }
    d
}

/// Angular coverage of the fourth-power angles 4 arg(z) on the circle:
/// 2 pi minus the largest empty gap. The fourth power unwraps the
/// near-quarter-turn rotation so a curve shows as full coverage while a
/// 4-cycle collapses to a point.
fn fourth_power_coverage(zs: &[Complex64]) -> f64 {
    let mut angles: Vec<f64> = zs
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|z| (4.0 * z.arg()).rem_euclid(2.0 * PI))
        .collect();
    if angles.len() < 2 {
        return 0.0;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = 2.0 * PI - angles.last().unwrap() + angles[0];
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    2.0 * PI - max_gap
}

/// Iterate the exact map from a state on the critical eigenspace and return
/// the attractor report together with the collected planar trajectory.
pub fn simulate(
    p: &ProblemSpec,
    gamma: f64,
    opts: SimulationOptions,
) -> Result<(AttractorReport, Trajectory)> {
    assert!(opts.n_collect >= 4, "need at least 4 collected iterates");
    let j = nearest_critical_index(p, gamma);
    let cp = critical_point(p, j);
    let data = derived_linear_data(&p.with_gamma(cp.gamma_j))?;
    let chi = eigenfunction(&data, cp.mu);
    let mut phi = chi.map(|v| Complex64::new(opts.ic_amplitude * v.re, 0.0));

    let mut traj = Trajectory {
        z: Vec::with_capacity(opts.n_collect),
        sup_norm: Vec::with_capacity(opts.n_collect),
    };
    let mut diverged = false;
    for step in 0..(opts.n_transient + opts.n_collect) {
        match time_one_map(p, gamma, &phi) {
            Ok(next) => phi = next,
            Err(Error::Overflow(_)) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
        if step >= opts.n_transient {
            traj.z
                .push(spectral_functional(&data, cp.mu, &phi).expect("denominator >= 1"));
            traj.sup_norm.push(phi.sup_norm());
        }
    }

    let report = if diverged {
        AttractorReport {
            kind: AttractorKind::Diverged,
            amplitude: traj.z.iter().map(|z| z.norm()).sum::<f64>() / traj.z.len().max(1) as f64,
            rotation_mean: 0.0,
            rotation_dev: 0.0,
            cluster_diameters: None,
            f4_residual: None,
            iterates_used: (opts.n_transient, traj.z.len()),
        }
    } else {
        classify_trajectory(p, gamma, &phi, &traj, &opts)
    };
    Ok((report, traj))
}

fn classify_trajectory(
    p: &ProblemSpec,
    gamma: f64,
    last_state: &GridFunction,
    traj: &Trajectory,
    opts: &SimulationOptions,
) -> AttractorReport {
    let zs = &traj.z;
    let amplitude = zs.iter().map(|z| z.norm()).sum::<f64>() / zs.len() as f64;

    let increments: Vec<f64> = zs
        .windows(2)
        .map(|w| wrap_angle(w[1].arg() - w[0].arg()))
        .collect();
    let rotation_mean = increments.iter().sum::<f64>() / increments.len().max(1) as f64;
    let rotation_dev = (increments
        .iter()
        .map(|x| (x - rotation_mean).powi(2))
        .sum::<f64>()
        / increments.len().max(1) as f64)
        .sqrt();

    let tail = &zs[zs.len().saturating_sub(100)..];
    let tail_amp = tail.iter().map(|z| z.norm()).sum::<f64>() / tail.len() as f64;
    if tail_amp < FIXED_POINT_TOL {
        return AttractorReport {
            kind: AttractorKind::FixedPointZero,
            amplitude,
            rotation_mean,
            rotation_dev,
            cluster_diameters: None,
            f4_residual: None,
            iterates_used: (opts.n_transient, zs.len()),
        };
    }

    let clusters = kmeans4(zs);
    let diameters: Vec<f64> = clusters.iter().map(|m| cluster_diameter(zs, m)).collect();
    let max_diameter = diameters.iter().cloned().fold(0.0, f64::max);
    if clusters.iter().all(|m| !m.is_empty()) && max_diameter < CLUSTER_TOL * amplitude.max(1.0) {
        let f4_residual = four_step_return_residual(p, gamma, last_state).ok();
        return AttractorReport {
            kind: AttractorKind::FourPeriodic,
            amplitude,
            rotation_mean,
            rotation_dev,
            cluster_diameters: Some(diameters),
            f4_residual,
            iterates_used: (opts.n_transient, zs.len()),
        };
    }

    let radial_dev = (zs
        .iter()
        .map(|z| (z.norm() - amplitude).powi(2))
        .sum::<f64>()
        / zs.len() as f64)
        .sqrt();
    if radial_dev / amplitude < RADIAL_DEV_TOL && fourth_power_coverage(zs) > COVERAGE_TOL {
        return AttractorReport {
            kind: AttractorKind::InvariantCurve,
            amplitude,
            rotation_mean,
            rotation_dev,
            cluster_diameters: None,
            f4_residual: None,
            iterates_used: (opts.n_transient, zs.len()),
        };
    }

    AttractorReport {
        kind: AttractorKind::Inconclusive,
        amplitude,
        rotation_mean,
        rotation_dev,
        cluster_diameters: Some(diameters),
        f4_residual: None,
        iterates_used: (opts.n_transient, zs.len()),
    }
}

/// Sup-norm of F^4(phi) - phi: vanishes on a genuine 4-periodic orbit of the
/// time-one map, i.e. a 4-periodic solution of the delay equation.
pub fn four_step_return_residual(p: &ProblemSpec, gamma: f64, phi: &GridFunction) -> Result<f64> {
    let mut cur = phi.clone();
    for _ in 0..4 {
        cur = time_one_map(p, gamma, &cur)?;
    }
    Ok(cur.sub(phi).sup_norm())
}

/// Iterate from the critical eigenspace and classify the attractor.
pub fn iterate_and_detect(
    p: &ProblemSpec,
    gamma: f64,
    ic_amplitude: f64,
    n_transient: usize,
    n_collect: usize,
) -> Result<AttractorReport> {
    let opts = SimulationOptions {
        ic_amplitude,
        n_transient,
        n_collect,
    };
    Ok(simulate(p, gamma, opts)?.0)
}

/// Post-critical amplitudes amplitude(gamma_j + sign(d) eps) for each eps.
/// Under a nondegenerate supercritical verdict these follow the square-root
/// law, so amplitude/sqrt(eps) is nearly constant.
pub fn amplitude_scaling(p: &ProblemSpec, j: i32, eps_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let cp = critical_point(p, j);
    let side = if cp.d >= 0.0 { 1.0 } else { -1.0 };
    eps_list
        .iter()
        .map(|&eps| {
            let gamma = cp.gamma_j + side * eps;
            let (report, _) = simulate(p, gamma, SimulationOptions::default())?;
            Ok((eps, report.amplitude))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::monodromy_apply;
    use crate::problem::{Nonlinearity, PowerTerm, ProblemKind, TrigPoly};

    fn wright(gamma: f64, n: usize) -> ProblemSpec {
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

    fn linear_spec(n: usize) -> ProblemSpec {
        ProblemSpec::new(
            ProblemKind::General {
                terms: vec![PowerTerm {
                    power: 1,
                    coeff: TrigPoly {
                        dc: -1.0,
                        cos: vec![0.2],
                        sin: vec![0.1],
                    },
                }],
            },
            1.0,
            n,
        )
        .unwrap()
    }

    #[test]
    fn zero_state_is_fixed() {
        let p = wright(1.2, 512);
        let next = time_one_map(&p, 1.2, &GridFunction::zeros(512)).unwrap();
        assert_eq!(next.sup_norm(), 0.0);
    }

    #[test]
    fn linear_problem_reduces_to_monodromy() {
        let p = linear_spec(2048);
        let gamma = 0.9;
        let data = derived_linear_data(&p.with_gamma(gamma)).unwrap();
        let phi = GridFunction::real_from_fn(2048, |t| 0.3 * (PI * t).cos() - 0.1 * t);
        let fwd = time_one_map(&p, gamma, &phi).unwrap();
        let lin = monodromy_apply(&data, &phi);
        assert!(fwd.sub(&lin).sup_norm() < 1e-12);
    }

    #[test]
    fn nonlinear_remainder_is_quadratic() {
        let p = wright(PI / 2.0, 1024);
        let gamma = PI / 2.0;
        let data = derived_linear_data(&p).unwrap();
        let shape = GridFunction::real_from_fn(1024, |t| (2.0 * PI * t).cos() + 0.3);
        let mut c_prev = None;
        for eps in [1e-2, 1e-3, 1e-4] {
            let phi = shape.scale(Complex64::from(eps));
            let diff = time_one_map(&p, gamma, &phi)
                .unwrap()
                .sub(&monodromy_apply(&data, &phi))
                .sup_norm();
            let c = diff / (eps * eps);
            if let Some(prev) = c_prev {
                let ratio: f64 = c / prev;
                assert!(ratio > 0.5 && ratio < 2.0, "C jumped: {prev} -> {c}");
            }
            c_prev = Some(c);
        }
    }

    #[test]
    fn overflow_guard_fires() {
        let p = wright(1.0, 256);
        let phi = GridFunction::constant(256, Complex64::from(2e6));
        assert!(matches!(
            time_one_map(&p, 1.0, &phi),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn projection_of_critical_direction() {
        let p = wright(PI / 2.0, 4096);
        let cp = critical_point(&p, 0);
        let data = derived_linear_data(&p).unwrap();
        let chi = eigenfunction(&data, cp.mu);

        // The conjugate eigenfunction has zero coordinate, hence
        // R_i(Re chi) = (R_i(chi) + R_i(chi-))/2 = 1/2.
        let r_conj = spectral_functional(&data, cp.mu, &chi.conj()).unwrap();
        assert!(r_conj.norm() < 1e-10);
        let re_chi = chi.map(|v| Complex64::from(v.re));
        let z = project_state(&p, &cp, &re_chi);
        assert!((z - Complex64::from(0.5)).norm() < 1e-10);

        assert_eq!(
            project_state(&p, &cp, &GridFunction::zeros(4096)),
            Complex64::ZERO
        );

        // Linearity in the amplitude.
        let eps = 1e-3;
        let z = project_state(&p, &cp, &re_chi.scale(Complex64::from(eps)));
        assert!((z.norm() - eps / 2.0).abs() < 1e-9);
    }

    #[test]
    fn nearest_index_roundtrip() {
        let p = wright(1.0, 256);
        for j in [-2, -1, 0, 1, 3] {
            let cp = critical_point(&p, j);
            assert_eq!(nearest_critical_index(&p, cp.gamma_j), j);
            assert_eq!(nearest_critical_index(&p, cp.gamma_j + 0.05), j);
        }
    }

    #[test]
    fn coverage_of_uniform_angles_is_full() {
        let zs: Vec<Complex64> = (0..200)
            .map(|k| (Complex64::i() * (0.1 + 2.0 * PI * k as f64 / 200.0)).exp())
            .collect();
        assert!(fourth_power_coverage(&zs) > 2.0 * PI - 0.2);
    }

    #[test]
    fn kmeans_separates_four_corners() {
        let corners = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let zs: Vec<Complex64> = (0..120)
            .map(|k| corners[k % 4] + Complex64::from(1e-9 * (k % 7) as f64))
            .collect();
        let clusters = kmeans4(&zs);
        assert!(clusters.iter().all(|m| m.len() == 30));
        for m in &clusters {
            assert!(cluster_diameter(&zs, m) < 1e-7);
        }
    }
}
