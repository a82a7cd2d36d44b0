//! Third-order resonant normal form of the time-one map at the critical
//! multiplier i: the multilinear forms V and W, the restricted-map
//! coefficients rho_kl, the resonant cubic coefficients c1, c2 and
//! a1 = c1/i, a2 = c2/i, the delta test, and the bifurcation verdict.
//! The periodic coefficient class additionally has closed forms for a1, a2
//! and delta against which the general pipeline is checked.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::{
    critical_point, eigenfunction, resolvent_apply, spectral_functional, CriticalPoint,
};
use crate::grid::GridFunction;
use crate::problem::{derived_linear_data, DerivedLinearData, ProblemSpec};

/// Degeneracy tolerance for the classification margins, scaled by the
/// coefficient magnitudes.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Second derivative of the time-one map at 0:
/// V(phi1, phi2)(t) = int_{-1}^t gamma f_xixi(s, 0) phi1 phi2 ds.
pub fn bilinear_v(p: &ProblemSpec, phi1: &GridFunction, phi2: &GridFunction) -> GridFunction {
    let gamma = p.gamma();
    let kernel = GridFunction::real_from_fn(p.grid_n(), |t| gamma * p.f_xixi0(t));
    kernel.mul(phi1).mul(phi2).cumulative()
}

/// Third derivative of the time-one map at 0:
/// W(phi1, phi2, phi3)(t) = int_{-1}^t gamma f_xixixi(s, 0) phi1 phi2 phi3 ds.
pub fn trilinear_w(
    p: &ProblemSpec,
    phi1: &GridFunction,
    phi2: &GridFunction,
    phi3: &GridFunction,
) -> GridFunction {
    let gamma = p.gamma();
    let kernel = GridFunction::real_from_fn(p.grid_n(), |t| gamma * p.f_xixixi0(t));
    kernel.mul(phi1).mul(phi2).mul(phi3).cumulative()
}

/// Coefficients of the restricted map
/// z~ = mu z + rho20/2 z^2 + rho11 z z- + rho02/2 z-^2 + rho21/2 z^2 z- + rho03/6 z-^3 + ...
#[derive(Debug, Clone, Copy)]
pub struct RhoCoefficients {
    pub rho20: Complex64,
    pub rho11: Complex64,
    pub rho02: Complex64,
    pub rho21: Complex64,
    pub rho03: Complex64,
}

/// a1, a2 computed along the two routes: through the rho coefficients and
/// directly through resolvent applications. They agree identically; the pair
/// is kept to cross-check every coefficient formula.
#[derive(Debug, Clone, Copy)]
pub struct ACoefficients {
    pub a1: Complex64,
    pub a2: Complex64,
    pub a1_alt: Complex64,
    pub a2_alt: Complex64,
}

struct Pieces {
    rho: RhoCoefficients,
    a: ACoefficients,
}

fn check_critical(p: &ProblemSpec, cp: &CriticalPoint) -> Result<()> {
    let scale = cp.gamma_j.abs().max(1.0);
    if (p.gamma() - cp.gamma_j).abs() > 1e-12 * scale {
        return Err(Error::NotCritical {
            gamma: p.gamma(),
            expected: cp.gamma_j,
            j: cp.j,
        });
    }
    Ok(())
}

/// Everything the normal form needs, assembled in one sweep so both routes
/// share the quadrature primitives.
fn compute_pieces(p: &ProblemSpec, cp: &CriticalPoint, data: &DerivedLinearData) -> Result<Pieces> {
    let mu = cp.mu;
    let i = Complex64::i();
    let chi = eigenfunction(data, mu);
    let chib = chi.conj();

    let v_cc = bilinear_v(p, &chi, &chi);
    let v_cb = bilinear_v(p, &chi, &chib);
    let v_bb = bilinear_v(p, &chib, &chib);
    let w_ccb = trilinear_w(p, &chi, &chi, &chib);
    let w_bbb = trilinear_w(p, &chib, &chib, &chib);

    let rho20 = spectral_functional(data, mu, &v_cc)?;
    let rho11 = spectral_functional(data, mu, &v_cb)?;
    let rho02 = spectral_functional(data, mu, &v_bb)?;

    // Resolvent arguments: 1, mu^2 = -1 and mu^{-2} = -1 at mu = i.
    let r1 = resolvent_apply(data, Complex64::ONE, &v_cb)?;
    let r2 = resolvent_apply(data, -Complex64::ONE, &v_cc)?;

    let rw_ccb = spectral_functional(data, mu, &w_ccb)?;
    let rv_c_r1 = spectral_functional(data, mu, &bilinear_v(p, &chi, &r1))?;
    let rv_b_r2 = spectral_functional(data, mu, &bilinear_v(p, &chib, &r2))?;

    let q20 = (1.0 / mu) * (1.0 - 2.0 * mu) / (1.0 - mu);
    let q11 = 2.0 / (1.0 - 1.0 / mu);
    let q02 = mu / (mu * mu * mu - 1.0);
    let rho21 = rw_ccb + 2.0 * rv_c_r1 + rv_b_r2 + q20 * rho20 * rho11
        - q11 * rho11 * rho11.conj()
        - q02 * rho02 * rho02.conj();

    // rho03 applies the resolvent to v_bb with its critical-eigenspace
    // components projected out.
    let rho02_bar_side = spectral_functional(data, mu.conj(), &v_bb)?;
    let v_bb_su = v_bb.sub(&chi.scale(rho02)).sub(&chib.scale(rho02_bar_side));
    let r3 = resolvent_apply(data, -Complex64::ONE, &v_bb_su)?;
    let rw_bbb = spectral_functional(data, mu, &w_bbb)?;
    let rv_b_r3 = spectral_functional(data, mu, &bilinear_v(p, &chib, &r3))?;
    let rho03 = rw_bbb + 3.0 * rv_b_r3;

    let rho = RhoCoefficients {
        rho20,
        rho11,
        rho02,
        rho21,
        rho03,
    };
    let (c1, c2) = c_coefficients(&rho);
    let a1 = c1 / i;
    let a2 = c2 / i;

    // Direct route: the scalar correction terms of rho21 and the projection
    // subtraction of rho03 cancel against the product terms of c1, c2.
    let a1_alt = -i / 2.0 * (rw_ccb + 2.0 * rv_c_r1 + rv_b_r2);
    let r4 = resolvent_apply(data, -Complex64::ONE, &v_bb)?;
    let rv_b_r4 = spectral_functional(data, mu, &bilinear_v(p, &chib, &r4))?;
    let a2_alt = -i / 6.0 * (rw_bbb + 3.0 * rv_b_r4);

    Ok(Pieces {
        rho,
        a: ACoefficients {
            a1,
            a2,
            a1_alt,
            a2_alt,
        },
    })
}

/// The five restricted-map coefficients at the critical point.
pub fn rho_coefficients(p: &ProblemSpec, cp: &CriticalPoint) -> Result<RhoCoefficients> {
    check_critical(p, cp)?;
    let data = derived_linear_data(p)?;
    Ok(compute_pieces(p, cp, &data)?.rho)
}

/// Resonant cubic coefficients of the normal form at mu = i:
/// c1 multiplies w^2 w-, c2 multiplies w-^3.
pub fn c_coefficients(rho: &RhoCoefficients) -> (Complex64, Complex64) {
    let c1 = Complex64::new(0.25, 0.75) * rho.rho20 * rho.rho11
        + Complex64::new(0.5, -0.5) * rho.rho11 * rho.rho11.conj()
        + Complex64::new(-0.25, -0.25) * rho.rho02 * rho.rho02.conj()
        + rho.rho21 / 2.0;
    let c2 = Complex64::new(-0.25, 0.25) * rho.rho11 * rho.rho02
        + Complex64::new(-0.25, -0.25) * rho.rho02 * rho.rho20.conj()
        + rho.rho03 / 6.0;
    (c1, c2)
}

/// a1 = c1/i and a2 = c2/i along both evaluation routes.
pub fn a_coefficients(p: &ProblemSpec, cp: &CriticalPoint) -> Result<ACoefficients> {
    check_critical(p, cp)?;
    let data = derived_linear_data(p)?;
    Ok(compute_pieces(p, cp, &data)?.a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Supercritical,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    Same,
    Opposite,
}

/// Outcome of the delta test.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    /// delta > 0: a unique invariant curve bifurcates, no 4-periodic points.
    InvariantCurve {
        direction: Direction,
    },
    /// delta < 0: two families of 4-periodic points bifurcate, no curve.
    FourPeriodic {
        sides: Sides,
    },
    Degenerate {
        reason: String,
    },
}

/// Classification plus the raw margins it was decided on.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub classification: Classification,
    pub delta: f64,
    pub re_a1: f64,
    /// |a1| - |a2|, which separates the two 4-periodic cases.
    pub a1_abs_minus_a2_abs: f64,
    pub d_sign: i8,
    /// Which side of gamma_j the bifurcating object lives on, oriented by the
    /// sign of the crossing speed d.
    pub side: String,
    pub stability: String,
}

/// delta = |Im a1 - B Re a1| - |a2| sqrt(1 + B^2).
pub fn delta_test(a1: Complex64, a2: Complex64, btot: f64) -> f64 {
    (a1.im - btot * a1.re).abs() - a2.norm() * (1.0 + btot * btot).sqrt()
}

/// Decide the bifurcation picture from a1, a2, B and the crossing speed d.
pub fn classify(a1: Complex64, a2: Complex64, btot: f64, d: f64, tol_deg: f64) -> Verdict {
    let delta = delta_test(a1, a2, btot);
    let scale = a1.norm().max(a2.norm()).max(1.0);
    let tol = tol_deg * scale;
    let d_sign = if d >= 0.0 { 1i8 } else { -1i8 };

    let classification = if delta > tol {
        if a1.re < -tol {
            Classification::InvariantCurve {
                direction: Direction::Supercritical,
            }
        } else if a1.re > tol {
            Classification::InvariantCurve {
                direction: Direction::Subcritical,
            }
        } else {
            Classification::Degenerate {
                reason: "direction boundary: Re a1 = 0".into(),
            }
        }
    } else if delta < -tol {
        let sides = if a1.norm() > a2.norm() {
            Sides::Same
        } else {
            Sides::Opposite
        };
        Classification::FourPeriodic { sides }
    } else {
        Classification::Degenerate {
            reason: "delta = 0 boundary".into(),
        }
    };

    // A stable object appears past the crossing in the direction the
    // multiplier modulus grows; d < 0 swaps the parameter side.
    let (side, stability) = match &classification {
        Classification::InvariantCurve { direction } => match direction {
            Direction::Supercritical => (
                if d >= 0.0 {
                    "gamma_above"
                } else {
                    "gamma_below"
                },
                "stable invariant curve",
            ),
            Direction::Subcritical => (
                if d >= 0.0 {
                    "gamma_below"
                } else {
                    "gamma_above"
                },
                "unstable invariant curve",
            ),
        },
        Classification::FourPeriodic { sides } => match sides {
            Sides::Same => ("same side", "at least one family unstable"),
            Sides::Opposite => ("opposite sides", "both families unstable"),
        },
        Classification::Degenerate { .. } => ("undetermined", "undetermined"),
    };

    Verdict {
        classification,
        delta,
        re_a1: a1.re,
        a1_abs_minus_a2_abs: a1.norm() - a2.norm(),
        d_sign,
        side: side.into(),
        stability: stability.into(),
    }
}

/// The full normal-form computation at the critical point with index j.
#[derive(Debug, Clone)]
pub struct NormalFormReport {
    pub j: i32,
    pub gamma_j: f64,
    pub beta: f64,
    pub btot: f64,
    pub d: f64,
    pub rho: RhoCoefficients,
    pub c1: Complex64,
    pub c2: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub a1_alt: Complex64,
    pub a2_alt: Complex64,
    pub delta: f64,
    pub verdict: Verdict,
}

pub fn normal_form_report(p: &ProblemSpec, j: i32, tol_deg: f64) -> Result<NormalFormReport> {
    let cp = critical_point(p, j);
    let p = p.with_gamma(cp.gamma_j);
    let data = derived_linear_data(&p)?;
    let pieces = compute_pieces(&p, &cp, &data)?;
    let a = pieces.a;
    let (c1, c2) = c_coefficients(&pieces.rho);
    let verdict = classify(a.a1, a.a2, cp.btot, cp.d, tol_deg);
    Ok(NormalFormReport {
        j,
        gamma_j: cp.gamma_j,
        beta: p.beta(),
        btot: cp.btot,
        d: cp.d,
        rho: pieces.rho,
        c1,
        c2,
        a1: a.a1,
        a2: a.a2,
        a1_alt: a.a1_alt,
        a2_alt: a.a2_alt,
        delta: verdict.delta,
        verdict,
    })
}

/// Closed forms for the periodic coefficient class x' = -gamma r(t) g(x(t-1)).
#[derive(Debug, Clone)]
pub struct ClosedFormPeriodic {
    pub a1: Complex64,
    pub a2: Complex64,
    pub delta: f64,
    pub direction: Direction,
}

/// a1 = B/(2(i+B)) (T - S^2 (11+2i)/5), a2 = 0, delta = |B|/2 |T - 11 S^2/5|;
/// the direction flips where T crosses S^2 (11B+2)/(5B).
pub fn closed_form_periodic(s: f64, t: f64, btot: f64, tol_deg: f64) -> Result<ClosedFormPeriodic> {
    let k = (btot / (2.0 * std::f64::consts::PI) + 0.25).round();
    let expected = -std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k;
    if (btot - expected).abs() > 1e-9 {
        return Err(Error::NotCritical {
            gamma: btot,
            expected,
            j: k as i32,
        });
    }
    let cubic_margin = t - 11.0 * s * s / 5.0;
    let scale = t.abs().max(s * s).max(1.0);
    if cubic_margin.abs() <= tol_deg * scale {
        return Err(Error::DegenerateCubic(cubic_margin.abs()));
    }
    let b = Complex64::from(btot);
    let a1 = b / (2.0 * (Complex64::i() + b)) * (t - s * s * Complex64::new(11.0, 2.0) / 5.0);
    let delta = btot.abs() / 2.0 * cubic_margin.abs();
    let direction = if t < s * s * (11.0 * btot + 2.0) / (5.0 * btot) {
        Direction::Supercritical
    } else {
        Direction::Subcritical
    };
    Ok(ClosedFormPeriodic {
        a1,
        a2: Complex64::ZERO,
        delta,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Nonlinearity, PowerTerm, ProblemKind, TrigPoly};
    use std::f64::consts::PI;

    fn periodic_spec(r: TrigPoly, s: f64, t: f64, n: usize) -> ProblemSpec {
        ProblemSpec::new(
            ProblemKind::PeriodicCoefficient {
                r,
                g: Nonlinearity::Cubic { s, t },
            },
            1.0,
            n,
        )
        .unwrap()
    }

    fn at_critical(p: &ProblemSpec, j: i32) -> (ProblemSpec, CriticalPoint) {
        let cp = critical_point(p, j);
        (p.with_gamma(cp.gamma_j), cp)
    }

    #[test]
    fn v_closed_forms_periodic_class() {
        let r = TrigPoly {
            dc: 1.0,
            cos: vec![0.4],
            sin: vec![0.1],
        };
        let (p, _) = at_critical(&periodic_spec(r, 1.7, 0.9, 4096), 0);
        let data = derived_linear_data(&p).unwrap();
        let chi = eigenfunction(&data, Complex64::i());
        let chib = chi.conj();
        let s = 1.7;
        let i = Complex64::i();

        // V(chi, chi-) = S B(t)
        let v = bilinear_v(&p, &chi, &chib);
        let expect = data.b_cum.scale(Complex64::from(s));
        assert!(v.sub(&expect).sup_norm() < 1e-10);

        // V(chi, chi) = (iS/2)(e^{-2iB} - 1)
        let v = bilinear_v(&p, &chi, &chi);
        let expect = data
            .b_cum
            .map(|bb| i * s / 2.0 * ((-2.0 * i * bb).exp() - 1.0));
        assert!(v.sub(&expect).sup_norm() < 1e-10);

        // V(chi-, chi-) = (-iS/2)(e^{2iB} - 1)
        let v = bilinear_v(&p, &chib, &chib);
        let expect = data
            .b_cum
            .map(|bb| -i * s / 2.0 * ((2.0 * i * bb).exp() - 1.0));
        assert!(v.sub(&expect).sup_norm() < 1e-10);
    }

    #[test]
    fn w_closed_forms_periodic_class() {
        let r = TrigPoly {
            dc: -0.8,
            cos: vec![0.2],
            sin: vec![-0.3],
        };
        let (p, _) = at_critical(&periodic_spec(r, 0.5, 2.3, 4096), 0);
        let data = derived_linear_data(&p).unwrap();
        let chi = eigenfunction(&data, Complex64::i());
        let chib = chi.conj();
        let t = 2.3;
        let i = Complex64::i();

        // W(chi, chi, chi-) = iT (e^{-iB} - 1)
        let w = trilinear_w(&p, &chi, &chi, &chib);
        let expect = data.b_cum.map(|bb| i * t * ((-i * bb).exp() - 1.0));
        assert!(w.sub(&expect).sup_norm() < 1e-10);

        // W(chi-, chi-, chi-) = (-iT/3)(e^{3iB} - 1)
        let w = trilinear_w(&p, &chib, &chib, &chib);
        let expect = data
            .b_cum
            .map(|bb| -i * t / 3.0 * ((3.0 * i * bb).exp() - 1.0));
        assert!(w.sub(&expect).sup_norm() < 1e-10);
    }

    #[test]
    fn multilinear_forms_are_symmetric() {
        let (p, _) = at_critical(
            &periodic_spec(
                TrigPoly {
                    dc: 1.0,
                    cos: vec![0.3],
                    sin: vec![0.2],
                },
                1.0,
                1.0,
                512,
            ),
            0,
        );
        let f = GridFunction::from_fn(512, |t| Complex64::new(t, (2.0 * PI * t).sin()));
        let g = GridFunction::from_fn(512, |t| Complex64::new((2.0 * PI * t).cos(), t * t));
        let h = GridFunction::from_fn(512, |t| Complex64::new(0.5 - t, 0.1));
        let dv = bilinear_v(&p, &f, &g)
            .sub(&bilinear_v(&p, &g, &f))
            .sup_norm();
        assert!(dv < 1e-14);
        let w1 = trilinear_w(&p, &f, &g, &h);
        let w2 = trilinear_w(&p, &h, &f, &g);
        assert!(w1.sub(&w2).sup_norm() < 1e-14);
    }

    #[test]
    fn rho_vanishes_for_linear_problem() {
        let p = ProblemSpec::new(
            ProblemKind::General {
                terms: vec![PowerTerm {
                    power: 1,
                    coeff: TrigPoly {
                        dc: -1.0,
                        cos: vec![0.2],
                        sin: vec![],
                    },
                }],
            },
            1.0,
            1024,
        )
        .unwrap();
        let (p, cp) = at_critical(&p, 0);
        let rho = rho_coefficients(&p, &cp).unwrap();
        for v in [rho.rho20, rho.rho11, rho.rho02, rho.rho21, rho.rho03] {
            assert!(v.norm() < 1e-12);
        }
        let a = a_coefficients(&p, &cp).unwrap();
        assert!(a.a1.norm() < 1e-12 && a.a2.norm() < 1e-12);
    }

    #[test]
    fn rho11_matches_grid_refinement() {
        let r = TrigPoly {
            dc: 1.0,
            cos: vec![0.25, -0.1],
            sin: vec![0.15],
        };
        let coarse = periodic_spec(r.clone(), 1.0, 1.0, 2048);
        let fine = periodic_spec(r, 1.0, 1.0, 4096);
        let (pc, cc) = at_critical(&coarse, 0);
        let (pf, cf) = at_critical(&fine, 0);
        let rho_c = rho_coefficients(&pc, &cc).unwrap();
        let rho_f = rho_coefficients(&pf, &cf).unwrap();
        assert!((rho_c.rho11 - rho_f.rho11).norm() < 1e-9);
    }

    #[test]
    fn rho20_matches_spectral_identity() {
        // rho20 = (iS/2)(R_i(e^{-2iB}) - R_i(1)) with the R_i values from the
        // e^{miB} identity at m = -2 and m = 0.
        let r = TrigPoly {
            dc: 0.9,
            cos: vec![-0.2],
            sin: vec![0.3],
        };
        let s = 1.4;
        let (p, cp) = at_critical(&periodic_spec(r, s, 0.7, 4096), 0);
        let rho = rho_coefficients(&p, &cp).unwrap();
        let i = Complex64::i();
        let b = cp.btot;
        let r_m = |m: f64| (m * (-i).powf(m) + i) / ((i + b) * (m + 1.0));
        let expect = i * s / 2.0 * (r_m(-2.0) - r_m(0.0));
        assert!((rho.rho20 - expect).norm() < 1e-9);
    }

    #[test]
    fn c_coefficients_read_off() {
        let zero = RhoCoefficients {
            rho20: Complex64::ZERO,
            rho11: Complex64::ZERO,
            rho02: Complex64::ZERO,
            rho21: Complex64::ZERO,
            rho03: Complex64::ZERO,
        };
        assert_eq!(c_coefficients(&zero), (Complex64::ZERO, Complex64::ZERO));

        let only21 = RhoCoefficients {
            rho21: Complex64::from(2.0),
            ..zero
        };
        let (c1, c2) = c_coefficients(&only21);
        assert_eq!(c1, Complex64::ONE);
        assert_eq!(c2, Complex64::ZERO);
    }

    #[test]
    fn periodic_class_cancellation() {
        // For the periodic coefficient class a2 = 0 and a1 has a closed form.
        let r = TrigPoly {
            dc: 1.0,
            cos: vec![0.3, 0.05],
            sin: vec![-0.2],
        };
        let (s, t) = (1.3, 0.6);
        let (p, cp) = at_critical(&periodic_spec(r, s, t, 4096), 0);
        let a = a_coefficients(&p, &cp).unwrap();
        assert!(a.a2.norm() < 1e-10, "a2 = {}", a.a2);
        let b = Complex64::from(cp.btot);
        let expect =
            b / (2.0 * (Complex64::i() + b)) * (t - s * s * Complex64::new(11.0, 2.0) / 5.0);
        assert!((a.a1 - expect).norm() < 1e-8);
        // Both routes agree.
        assert!((a.a1 - a.a1_alt).norm() < 1e-8);
        assert!((a.a2 - a.a2_alt).norm() < 1e-8);
    }

    #[test]
    fn resolvent_of_v_cb_is_minus_s() {
        let r = TrigPoly {
            dc: 1.1,
            cos: vec![0.2],
            sin: vec![0.1],
        };
        let s = 0.8;
        let (p, _) = at_critical(&periodic_spec(r, s, 1.0, 4096), 0);
        let data = derived_linear_data(&p).unwrap();
        let chi = eigenfunction(&data, Complex64::i());
        let v_cb = bilinear_v(&p, &chi, &chi.conj());
        let res = resolvent_apply(&data, Complex64::ONE, &v_cb).unwrap();
        let minus_s = GridFunction::constant(4096, Complex64::from(-s));
        assert!(res.sub(&minus_s).sup_norm() < 1e-8);
    }

    #[test]
    fn classify_wright_case() {
        let b = -PI / 2.0;
        // S = T = 1 at B = -pi/2: supercritical invariant curve with
        // delta = 3 pi / 10.
        let cf = closed_form_periodic(1.0, 1.0, b, DEGENERACY_TOL).unwrap();
        assert!((cf.delta - 3.0 * PI / 10.0).abs() < 1e-14);
        assert_eq!(cf.direction, Direction::Supercritical);
        let re_expect = -b * (3.0 * b + 1.0) / (5.0 * (1.0 + b * b));
        assert!((cf.a1.re - re_expect).abs() < 1e-14);
        assert!(cf.a1.re < 0.0);

        let d = PI / 2.0 / (1.0 + PI * PI / 4.0);
        let v = classify(cf.a1, cf.a2, b, d, DEGENERACY_TOL);
        assert!((v.delta - cf.delta).abs() < 1e-14);
        assert_eq!(
            v.classification,
            Classification::InvariantCurve {
                direction: Direction::Supercritical
            }
        );
        assert_eq!(v.side, "gamma_above");
    }

    #[test]
    fn classify_boundaries() {
        // Purely imaginary a1 with a2 = 0: delta > 0 but no direction.
        let v = classify(Complex64::i(), Complex64::ZERO, 0.7, 1.0, DEGENERACY_TOL);
        assert!(v.delta > 0.0);
        assert!(matches!(
            v.classification,
            Classification::Degenerate { .. }
        ));

        // a1 = 0, a2 = 1, B = 0: delta = -1, opposite sides, both unstable.
        let v = classify(Complex64::ZERO, Complex64::ONE, 0.0, 1.0, DEGENERACY_TOL);
        assert!((v.delta + 1.0).abs() < 1e-15);
        assert_eq!(
            v.classification,
            Classification::FourPeriodic {
                sides: Sides::Opposite
            }
        );
        assert_eq!(v.stability, "both families unstable");

        // d < 0 swaps the parameter side of the curve.
        let v = classify(
            Complex64::new(-1.0, 0.2),
            Complex64::ZERO,
            -PI / 2.0,
            -0.3,
            DEGENERACY_TOL,
        );
        assert_eq!(v.side, "gamma_below");
        assert_eq!(v.d_sign, -1);
    }

    #[test]
    fn closed_form_degeneracies() {
        let b = -PI / 2.0;
        let err = closed_form_periodic(1.0, 2.2, b, DEGENERACY_TOL).unwrap_err();
        assert!(matches!(err, Error::DegenerateCubic(_)));

        // Direction flips across T = S^2 (11B + 2)/(5B).
        let t_star = (11.0 * b + 2.0) / (5.0 * b);
        let lo = closed_form_periodic(1.0, t_star - 1e-3, b, DEGENERACY_TOL).unwrap();
        let hi = closed_form_periodic(1.0, t_star + 1e-3, b, DEGENERACY_TOL).unwrap();
        assert_eq!(lo.direction, Direction::Supercritical);
        assert_eq!(hi.direction, Direction::Subcritical);

        // Re a1 = 0 exactly on the boundary.
        let on = closed_form_periodic(1.0, t_star, b, DEGENERACY_TOL).unwrap();
        assert!(on.a1.re.abs() < 1e-14);

        // Non-critical B is rejected.
        assert!(matches!(
            closed_form_periodic(1.0, 1.0, 0.5, DEGENERACY_TOL),
            Err(Error::NotCritical { .. })
        ));
    }

    #[test]
    fn report_is_internally_consistent() {
        let p = periodic_spec(
            TrigPoly {
                dc: 1.0,
                cos: vec![0.3],
                sin: vec![],
            },
            1.0,
            1.0,
            2048,
        );
        let rep = normal_form_report(&p, 0, DEGENERACY_TOL).unwrap();
        assert!((rep.a1 * Complex64::i() - rep.c1).norm() < 1e-15);
        assert!((rep.a2 * Complex64::i() - rep.c2).norm() < 1e-15);
        let expect_delta = delta_test(rep.a1, rep.a2, rep.btot);
        assert_eq!(rep.delta, expect_delta);
        assert!((rep.gamma_j - PI / 2.0).abs() < 1e-12);
    }
}
