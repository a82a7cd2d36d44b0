//! Construct a general spec whose delta test is negative and whose
//! 4-periodic families are reachable by forward iteration.
//!
//! Structure: constant linear coefficient -1 (so B(t) is linear and
//! gamma_0 = pi/2), harmonic quadratic coefficient q(t), constant cubic
//! coefficient c3. Then a2 is an exact quadratic form in the harmonic
//! amplitudes and independent of c3, while a1 is affine in c3. Writing
//! w = a1 (1 - iB) and R = |a2| sqrt(1 + B^2), the wedge that produces
//! observable 4-periodic orbits is the corner box
//!     Im w in (-0.85 R, -0.6 R)   delta < 0 and the families on the
//!                                 growing side gamma > gamma_0,
//!     |Re w| in (0.68 R, 0.85 R)  locked solutions exist and |a1| > |a2|,
//! together with Re a1 < 0. The amplitude rescale pins |a2| (large values
//! keep the locked radius small, inside the validity region), the c3 solve
//! pins Im w, and the Re w face is accepted by rejection over random mixes.
//!
//! Run with: cargo run --release -p resbench --example search_resonant [attempts]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resbench::dynamics::{simulate, AttractorKind, SimulationOptions};
use resbench::floquet::critical_point;
use resbench::normalform::{a_coefficients, delta_test};
use resbench::problem::{PowerTerm, ProblemKind, ProblemSpec, TrigPoly};

fn spec(quad: &TrigPoly, cubic: f64, n: usize) -> ProblemSpec {
    ProblemSpec::new(
        ProblemKind::General {
            terms: vec![
                PowerTerm {
                    power: 1,
                    coeff: TrigPoly::constant(-1.0),
                },
                PowerTerm {
                    power: 2,
                    coeff: quad.clone(),
                },
                PowerTerm {
                    power: 3,
                    coeff: TrigPoly::constant(cubic),
                },
            ],
        },
        1.0,
        n,
    )
    .unwrap()
}

fn a_at_critical(p: &ProblemSpec) -> (Complex64, Complex64, f64) {
    let cp = critical_point(p, 0);
    let pc = p.with_gamma(cp.gamma_j);
    let a = a_coefficients(&pc, &cp).unwrap();
    (a.a1, a.a2, cp.btot)
}

fn round3(x: f64) -> f64 {
    (x * 1e3).round() / 1e3
}

fn main() {
    let attempts: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let n = 1024;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut found = 0;

    for attempt in 0..attempts {
        let raw = TrigPoly {
            dc: rng.gen_range(-0.1..0.1),
            cos: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            sin: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        };
        let (_, a2_raw, b) = a_at_critical(&spec(&raw, 0.0, n));
        if a2_raw.norm() < 1e-3 {
            continue;
        }
        // a2 is exactly quadratic in the amplitudes: rescale to |a2| = 1.3.
        let scale = (1.3 / a2_raw.norm()).sqrt();
        let quad = TrigPoly {
            dc: round3(raw.dc * scale),
            cos: raw.cos.iter().map(|&x| round3(x * scale)).collect(),
            sin: raw.sin.iter().map(|&x| round3(x * scale)).collect(),
        };

        let (a1_0, a2, _) = a_at_critical(&spec(&quad, 0.0, n));
        let (a1_1, _, _) = a_at_critical(&spec(&quad, 1.0, n));
        let slope = a1_1 - a1_0;
        let rot = Complex64::new(1.0, -b);
        let r_lock = a2.norm() * (1.0 + b * b).sqrt();

        let im_slope = (slope * rot).im;
        if im_slope.abs() < 1e-3 {
            continue;
        }
        let c3 = round3((-0.75 * r_lock - (a1_0 * rot).im) / im_slope);
        let a1 = a1_0 + c3 * slope;
        let w = a1 * rot;

        let ok = (0.68 * r_lock..0.85 * r_lock).contains(&w.re.abs())
            && (-0.85 * r_lock..-0.6 * r_lock).contains(&w.im)
            && a1.norm() > 1.03 * a2.norm()
            && a1.re < -0.1 * a1.norm();
        if !ok {
            continue;
        }

        let cand = spec(&quad, c3, n);
        let (a1, a2, _) = a_at_critical(&cand);
        let delta = delta_test(a1, a2, b);
        if delta > -1e-2 {
            continue;
        }
        let cp = critical_point(&cand, 0);
        println!(
            "attempt {attempt}: candidate quad dc={} cos={:?} sin={:?} c3={c3}",
            quad.dc, quad.cos, quad.sin
        );
        println!(
            "  a1={a1:.4} a2={a2:.4} |a1|/|a2|={:.3} delta={delta:.4} w/R=({:.2},{:.2})",
            a1.norm() / a2.norm(),
            w.re / r_lock,
            w.im / r_lock
        );
        for eps in [0.01, 0.02, 0.04] {
            let gamma = cp.gamma_j + eps;
            let opts = SimulationOptions {
                ic_amplitude: 0.02,
                n_transient: 4000,
                n_collect: 400,
            };
            match simulate(&cand, gamma, opts) {
                Ok((rep, _)) => {
                    println!(
                        "  eps={eps}: {:?} amp={:.4} f4={:?} diam_max={:?}",
                        rep.kind,
                        rep.amplitude,
                        rep.f4_residual,
                        rep.cluster_diameters
                            .as_ref()
                            .map(|d| d.iter().cloned().fold(0.0, f64::max))
                    );
                    if rep.kind == AttractorKind::FourPeriodic {
                        found += 1;
                    }
                }
                Err(e) => println!("  eps={eps}: error {e}"),
            }
        }
        if found >= 6 {
            break;
        }
    }
    println!("done: {found} four-periodic detections");
}
