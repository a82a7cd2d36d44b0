//! Command line surface: JSON config in, JSON report out.
//!
//! Exit codes: 0 on success, 1 when the verdict is degenerate or the
//! empirical check is inconclusive, 2 on any error. Diagnostics go to
//! stderr, reports to stdout. Identical inputs produce byte-identical
//! output.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dynamics::{simulate, AttractorKind, AttractorReport, SimulationOptions, Trajectory};
use crate::error::{Error, Result};
use crate::floquet::{critical_point, critical_points, floquet_data, CriticalPoint};
use crate::normalform::{
    c_coefficients, normal_form_report, Classification, Direction, NormalFormReport,
    RhoCoefficients, DEGENERACY_TOL,
};
use crate::polynf::{normal_form, PolyMap};
use crate::problem::{
    derived_linear_data, Nonlinearity, PowerTerm, ProblemKind, ProblemSpec, TrigPoly,
    DEFAULT_GRID_N,
};
use crate::sampling::random_rho_set;

/// Grid bounds accepted on the command line.
const MIN_GRID_N: usize = 256;
const MAX_GRID_N: usize = 65536;

const VERIFY_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "resbench",
    about = "Resonant bifurcation analysis of time-periodic scalar delay equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List critical parameter values gamma_j with crossing data.
    Critical {
        #[arg(long)]
        config: PathBuf,
        /// Single index like `0` or an inclusive range like `-1..2`.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        j: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Leading Floquet exponents and multipliers at the configured gamma.
    Multipliers {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Full normal-form coefficient report at the critical point j.
    NormalForm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEGENERACY_TOL)]
        tol_deg: f64,
    },
    /// Classify the bifurcation at the critical point j.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i32,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEGENERACY_TOL)]
        tol_deg: f64,
    },
    /// Check the resonant cubic formulas against the brute-force
    /// polynomial normal form on random coefficient sets.
    Oracle {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Iterate the exact time-one map and detect the attractor.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Explicit parameter value; excludes --offset.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        /// Critical index for --offset.
        #[arg(long, allow_hyphen_values = true)]
        j: Option<i32>,
        /// Offset from gamma_j; requires --j.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        #[arg(long, default_value_t = crate::dynamics::DEFAULT_IC_AMPLITUDE)]
        ic: f64,
        #[arg(long, default_value_t = crate::dynamics::DEFAULT_TRANSIENT)]
        transient: usize,
        #[arg(long, default_value_t = crate::dynamics::DEFAULT_COLLECT)]
        collect: usize,
        #[arg(long)]
        n: Option<usize>,
        /// Write the collected iterates as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify, simulate both sides of gamma_j, and cross-check.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i32,
        #[arg(long, default_value_t = 0.05)]
        offset: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEGENERACY_TOL)]
        tol_deg: f64,
        /// Route-agreement tolerance for the coefficient cross-check.
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
}

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: String,
    gamma: GammaSource,
    grid_n: Option<usize>,
    coeffs: Option<Vec<CoeffEntry>>,
    r: Option<TrigEntry>,
    g: Option<GEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GammaSource {
    Value(f64),
    Critical { critical_index: i32, offset: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigEntry {
    dc: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl From<TrigEntry> for TrigPoly {
    fn from(e: TrigEntry) -> Self {
        TrigPoly {
            dc: e.dc,
            cos: e.cos,
            sin: e.sin,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffEntry {
    power: u32,
    dc: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "form")]
enum GEntry {
    #[serde(rename = "cubic")]
    Cubic {
        #[serde(rename = "S")]
        s: f64,
        #[serde(rename = "T")]
        t: f64,
    },
    #[serde(rename = "expm1")]
    Expm1,
}

fn default_grid_n() -> Result<usize> {
    match std::env::var("RESBENCH_N") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| Error::Schema(format!("RESBENCH_N must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_GRID_N),
    }
}

/// Parse a config file into a validated problem spec. `n_override` replaces
/// the grid resolution; otherwise the file's `grid_n`, then the RESBENCH_N
/// environment variable, then 4096 apply in that order.
pub fn parse_config_with_n(text: &str, n_override: Option<usize>) -> Result<ProblemSpec> {
    let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let grid_n = match n_override {
        Some(n) => n,
        None => match cfg.grid_n {
            Some(n) => n,
            None => default_grid_n()?,
        },
    };
    if !(MIN_GRID_N..=MAX_GRID_N).contains(&grid_n) || !grid_n.is_multiple_of(2) {
        return Err(Error::Schema(format!(
            "grid_n must be even and within [{MIN_GRID_N}, {MAX_GRID_N}], got {grid_n}"
        )));
    }

    let kind = match cfg.kind.as_str() {
        "general" => {
            if cfg.r.is_some() || cfg.g.is_some() {
                return Err(Error::Schema(
                    "kind `general` does not take `r` or `g`".into(),
                ));
            }
            let entries = cfg
                .coeffs
                .ok_or_else(|| Error::Schema("kind `general` requires `coeffs`".into()))?;
            let terms = entries
                .into_iter()
                .map(|e| PowerTerm {
                    power: e.power,
                    coeff: TrigPoly {
                        dc: e.dc,
                        cos: e.cos,
                        sin: e.sin,
                    },
                })
                .collect();
            ProblemKind::General { terms }
        }
        "periodic_coefficient" => {
            if cfg.coeffs.is_some() {
                return Err(Error::Schema(
                    "kind `periodic_coefficient` does not take `coeffs`".into(),
                ));
            }
            let r = cfg
                .r
                .ok_or_else(|| Error::Schema("kind `periodic_coefficient` requires `r`".into()))?;
            let g = cfg
                .g
                .ok_or_else(|| Error::Schema("kind `periodic_coefficient` requires `g`".into()))?;
            let g = match g {
                GEntry::Cubic { s, t } => Nonlinearity::Cubic { s, t },
                GEntry::Expm1 => Nonlinearity::Expm1,
            };
            ProblemKind::PeriodicCoefficient { r: r.into(), g }
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown kind `{other}` (expected `general` or `periodic_coefficient`)"
            )))
        }
    };

    // Resolve gamma; the critical reference needs beta, so build with a
    // placeholder first.
    let spec = ProblemSpec::new(kind, 1.0, grid_n)?;
    let gamma = match cfg.gamma {
        GammaSource::Value(g) => {
            if !g.is_finite() {
                return Err(Error::Schema("gamma must be finite".into()));
            }
            g
        }
        GammaSource::Critical {
            critical_index,
            offset,
        } => critical_point(&spec, critical_index).gamma_j + offset,
    };
    Ok(spec.with_gamma(gamma))
}

/// Parse a config file with the default grid-resolution rules.
pub fn parse_config(text: &str) -> Result<ProblemSpec> {
    parse_config_with_n(text, None)
}

fn load_config(path: &PathBuf, n: Option<usize>) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse_config_with_n(&text, n)
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Cx {
    re: f64,
    im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct CriticalPointOut {
    j: i32,
    gamma_j: f64,
    btot: f64,
    mu: Cx,
    dmu_dgamma: Cx,
    d: f64,
}

impl From<&CriticalPoint> for CriticalPointOut {
    fn from(cp: &CriticalPoint) -> Self {
        CriticalPointOut {
            j: cp.j,
            gamma_j: cp.gamma_j,
            btot: cp.btot,
            mu: cp.mu.into(),
            dmu_dgamma: cp.dmu_dgamma.into(),
            d: cp.d,
        }
    }
}

#[derive(Serialize)]
struct RhoOut {
    rho20: Cx,
    rho11: Cx,
    rho02: Cx,
    rho21: Cx,
    rho03: Cx,
}

impl From<&RhoCoefficients> for RhoOut {
    fn from(r: &RhoCoefficients) -> Self {
        RhoOut {
            rho20: r.rho20.into(),
            rho11: r.rho11.into(),
            rho02: r.rho02.into(),
            rho21: r.rho21.into(),
            rho03: r.rho03.into(),
        }
    }
}

fn report_json(rep: &NormalFormReport) -> serde_json::Value {
    json!({
        "j": rep.j,
        "gamma_j": rep.gamma_j,
        "beta": rep.beta,
        "btot": rep.btot,
        "d": rep.d,
        "rho": serde_json::to_value(RhoOut::from(&rep.rho)).unwrap(),
        "c1": serde_json::to_value(Cx::from(rep.c1)).unwrap(),
        "c2": serde_json::to_value(Cx::from(rep.c2)).unwrap(),
        "a1": serde_json::to_value(Cx::from(rep.a1)).unwrap(),
        "a2": serde_json::to_value(Cx::from(rep.a2)).unwrap(),
        "a1_alt": serde_json::to_value(Cx::from(rep.a1_alt)).unwrap(),
        "a2_alt": serde_json::to_value(Cx::from(rep.a2_alt)).unwrap(),
        "delta": rep.delta,
        "classification": serde_json::to_value(&rep.verdict).unwrap(),
    })
}

fn verdict_exit_code(rep: &NormalFormReport) -> i32 {
    match rep.verdict.classification {
        Classification::Degenerate { .. } => 1,
        _ => 0,
    }
}

fn simulate_json(gamma: f64, report: &AttractorReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).unwrap();
    v.as_object_mut()
        .unwrap()
        .insert("gamma".into(), json!(gamma));
    v
}

fn write_csv(path: &PathBuf, transient: usize, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("iter,re_z,im_z,sup_norm\n");
    for (i, (z, s)) in traj.z.iter().zip(&traj.sup_norm).enumerate() {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e}\n",
            transient + i + 1,
            z.re,
            z.im,
            s
        ));
    }
    std::fs::write(path, out)
        .map_err(|e| Error::Schema(format!("cannot write {}: {e}", path.display())))
}

fn parse_j_range(s: &str) -> Result<Vec<i32>> {
    let parse_one = |t: &str| {
        t.trim()
            .parse::<i32>()
            .map_err(|_| Error::Schema(format!("invalid index `{t}`")))
    };
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_one(a)?, parse_one(b)?);
        if a > b {
            return Err(Error::Schema(format!("empty index range `{s}`")));
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![parse_one(s)?])
    }
}

// ---------------------------------------------------------------------------
// Command execution
// ---------------------------------------------------------------------------

fn exec(cmd: Command) -> Result<(serde_json::Value, i32)> {
    match cmd {
        Command::Critical { config, j, n } => {
            let p = load_config(&config, n)?;
            let js = parse_j_range(&j)?;
            let points = critical_points(&p, &js);
            let out: Vec<CriticalPointOut> = points.iter().map(CriticalPointOut::from).collect();
            Ok((
                json!({
                    "beta": p.beta(),
                    "points": serde_json::to_value(out).unwrap(),
                }),
                0,
            ))
        }
        Command::Multipliers { config, count, n } => {
            let p = load_config(&config, n)?;
            let data = derived_linear_data(&p)?;
            let entries = floquet_data(&data, count)?;
            let out: Vec<serde_json::Value> = entries
                .iter()
                .map(|e| {
                    let char_residual = (e.lambda * e.lambda.exp() - data.btot).norm();
                    let floquet_residual = crate::floquet::floquet_residual(&data, e.mu, &e.chi);
                    json!({
                        "lambda": serde_json::to_value(Cx::from(e.lambda)).unwrap(),
                        "mu": serde_json::to_value(Cx::from(e.mu)).unwrap(),
                        "simple": e.simple,
                        "char_residual": char_residual,
                        "floquet_residual": floquet_residual,
                    })
                })
                .collect();
            Ok((
                json!({
                    "gamma": p.gamma(),
                    "beta": p.beta(),
                    "btot": data.btot,
                    "exponents": out,
                }),
                0,
            ))
        }
        Command::NormalForm {
            config,
            j,
            n,
            tol_deg,
        } => {
            let p = load_config(&config, n)?;
            let rep = normal_form_report(&p, j, tol_deg)?;
            let code = verdict_exit_code(&rep);
            Ok((report_json(&rep), code))
        }
        Command::Classify {
            config,
            j,
            n,
            tol_deg,
        } => {
            let p = load_config(&config, n)?;
            let rep = normal_form_report(&p, j, tol_deg)?;
            let code = verdict_exit_code(&rep);
            let mut out = json!({
                "j": rep.j,
                "gamma_j": rep.gamma_j,
                "beta": rep.beta,
                "btot": rep.btot,
                "d": rep.d,
                "a1": serde_json::to_value(Cx::from(rep.a1)).unwrap(),
                "a2": serde_json::to_value(Cx::from(rep.a2)).unwrap(),
                "delta": rep.delta,
            });
            let verdict = serde_json::to_value(&rep.verdict).unwrap();
            out.as_object_mut()
                .unwrap()
                .extend(verdict.as_object().unwrap().clone());
            Ok((out, code))
        }
        Command::Oracle { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut max_c1_dev: f64 = 0.0;
            let mut max_c2_dev: f64 = 0.0;
            let mut max_residual: f64 = 0.0;
            for _ in 0..samples {
                let rho = random_rho_set(&mut rng);
                let g = PolyMap::from_rho(
                    Complex64::i(),
                    rho.rho20,
                    rho.rho11,
                    rho.rho02,
                    rho.rho30,
                    rho.rho21,
                    rho.rho12,
                    rho.rho03,
                );
                let nf = normal_form(&g)?;
                let (c1, c2) = c_coefficients(&RhoCoefficients {
                    rho20: rho.rho20,
                    rho11: rho.rho11,
                    rho02: rho.rho02,
                    rho21: rho.rho21,
                    rho03: rho.rho03,
                });
                max_c1_dev = max_c1_dev.max((nf.c1 - c1).norm());
                max_c2_dev = max_c2_dev.max((nf.c2 - c2).norm());
                max_residual = max_residual.max(nf.residual);
            }
            let pass = max_c1_dev <= 1e-12 && max_c2_dev <= 1e-12 && max_residual <= 1e-13;
            Ok((
                json!({
                    "samples": samples,
                    "seed": seed,
                    "max_c1_dev": max_c1_dev,
                    "max_c2_dev": max_c2_dev,
                    "max_residual": max_residual,
                    "pass": pass,
                }),
                if pass { 0 } else { 1 },
            ))
        }
        Command::Simulate {
            config,
            gamma,
            j,
            offset,
            ic,
            transient,
            collect,
            n,
            csv,
        } => {
            let p = load_config(&config, n)?;
            let gamma = match (gamma, offset) {
                (Some(_), Some(_)) => {
                    return Err(Error::Schema(
                        "--gamma and --offset are mutually exclusive".into(),
                    ))
                }
                (Some(g), None) => g,
                (None, Some(off)) => {
                    let j = j.ok_or_else(|| Error::Schema("--offset requires --j".into()))?;
                    critical_point(&p, j).gamma_j + off
                }
                (None, None) => match j {
                    Some(j) => critical_point(&p, j).gamma_j,
                    None => p.gamma(),
                },
            };
            let opts = SimulationOptions {
                ic_amplitude: ic,
                n_transient: transient,
                n_collect: collect,
            };
            let (report, traj) = simulate(&p, gamma, opts)?;
            if let Some(path) = csv {
                write_csv(&path, transient, &traj)?;
            }
            let code = match report.kind {
                AttractorKind::Inconclusive => 1,
                _ => 0,
            };
            Ok((simulate_json(gamma, &report), code))
        }
        Command::Verify {
            config,
            j,
            offset,
            n,
            tol_deg,
            tol,
        } => {
            let p = load_config(&config, n)?;
            let rep = normal_form_report(&p, j, tol_deg)?;
            let routes_agree =
                (rep.a1 - rep.a1_alt).norm() <= tol && (rep.a2 - rep.a2_alt).norm() <= tol;

            let side = if rep.d >= 0.0 { 1.0 } else { -1.0 };
            let gamma_up = rep.gamma_j + side * offset;
            let gamma_down = rep.gamma_j - side * offset;
            let opts = SimulationOptions::default();
            let (up, _) = simulate(&p, gamma_up, opts)?;
            let (down, _) = simulate(&p, gamma_down, opts)?;

            // The growing side is gamma_up by construction: the multiplier
            // modulus exceeds 1 there.
            let consistent = match &rep.verdict.classification {
                Classification::InvariantCurve { direction } => match direction {
                    Direction::Supercritical => {
                        up.kind == AttractorKind::InvariantCurve
                            && down.kind == AttractorKind::FixedPointZero
                    }
                    Direction::Subcritical => down.kind == AttractorKind::FixedPointZero,
                },
                Classification::FourPeriodic { .. } => up.kind == AttractorKind::FourPeriodic,
                Classification::Degenerate { .. } => false,
            };

            let code = if !consistent || !routes_agree || verdict_exit_code(&rep) == 1 {
                1
            } else {
                0
            };
            Ok((
                json!({
                    "classification": report_json(&rep),
                    "routes_agree": routes_agree,
                    "gamma_up": gamma_up,
                    "gamma_down": gamma_down,
                    "simulate_up": simulate_json(gamma_up, &up),
                    "simulate_down": simulate_json(gamma_down, &down),
                    "consistent": consistent,
                }),
                code,
            ))
        }
    }
}

/// Run a full command line; returns the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match exec(cli.cmd) {
        Ok((value, code)) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
