//! Brute-force planar normal form: truncated polynomial maps in the
//! conjugate pair (w, w-), near-identity conjugation, and the homological
//! solve that leaves only the resonant monomials w^2 w- and w-^3 at mu = i.
//!
//! This is the independent oracle for the resonant cubic coefficients: it
//! knows nothing about the closed formulas it is checked against.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_DEG: usize = 3;

/// Divisors smaller than this count as resonant and are refused.
const RESONANT_GUARD: f64 = 1e-8;

/// A planar map w -> sum coeff[k][l] w^k w-^l truncated at total degree `deg`.
/// The dynamics of the conjugate variable is the conjugate series, so a
/// single coefficient table describes the full real planar map.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    deg: usize,
    coeff: Vec<Complex64>,
}

fn tri(deg: usize) -> usize {
    (deg + 1) * (deg + 2) / 2
}

fn idx(k: usize, l: usize) -> usize {
    let d = k + l;
    d * (d + 1) / 2 + l
}

impl PolyMap {
    pub fn zero(deg: usize) -> Self {
        Self {
            deg,
            coeff: vec![Complex64::ZERO; tri(deg)],
        }
    }

    /// The identity w.
    pub fn identity(deg: usize) -> Self {
        let mut m = Self::zero(deg);
        m.set(1, 0, Complex64::ONE);
        m
    }

    pub fn linear(mu: Complex64, deg: usize) -> Self {
        let mut m = Self::zero(deg);
        m.set(1, 0, mu);
        m
    }

    /// Build the map whose monomials carry the rho normalization,
    /// mu z + rho20/2 z^2 + rho11 z z- + rho02/2 z-^2 + rho30/6 z^3
    /// plus rho21/2 z^2 z- + rho12/2 z z-^2 + rho03/6 z-^3, so the
    /// dictionary is rho_kl = k! l! coeff[k][l].
    #[allow(clippy::too_many_arguments)]
    pub fn from_rho(
        mu: Complex64,
        rho20: Complex64,
        rho11: Complex64,
        rho02: Complex64,
        rho30: Complex64,
        rho21: Complex64,
        rho12: Complex64,
        rho03: Complex64,
    ) -> Self {
        let mut m = Self::zero(DEFAULT_DEG);
        m.set(1, 0, mu);
        m.set(2, 0, rho20 / 2.0);
        m.set(1, 1, rho11);
        m.set(0, 2, rho02 / 2.0);
        m.set(3, 0, rho30 / 6.0);
        m.set(2, 1, rho21 / 2.0);
        m.set(1, 2, rho12 / 2.0);
        m.set(0, 3, rho03 / 6.0);
        m
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        if k + l <= self.deg {
            self.coeff[idx(k, l)]
        } else {
            Complex64::ZERO
        }
    }

    pub fn set(&mut self, k: usize, l: usize, v: Complex64) {
        assert!(k + l <= self.deg, "monomial above truncation degree");
        self.coeff[idx(k, l)] = v;
    }

    /// Iterate (k, l, coeff) over all stored monomials.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.deg).flat_map(move |d| {
            (0..=d).map(move |l| {
                let k = d - l;
                (k, l, self.coeff[idx(k, l)])
            })
        })
    }

    /// The series of the conjugate variable: conj applied coefficient-wise
    /// with the roles of w and w- exchanged.
    pub fn conj_series(&self) -> Self {
        let mut out = Self::zero(self.deg);
        for (k, l, c) in self.terms() {
            out.set(l, k, c.conj());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.deg, other.deg);
        Self {
            deg: self.deg,
            coeff: self
                .coeff
                .iter()
                .zip(&other.coeff)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.deg, other.deg);
        Self {
            deg: self.deg,
            coeff: self
                .coeff
                .iter()
                .zip(&other.coeff)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        let deg = self.deg;
        let mut out = Self::zero(deg);
        for (k1, l1, c1) in self.terms() {
            if c1 == Complex64::ZERO {
                continue;
            }
            for (k2, l2, c2) in other.terms() {
                if c2 == Complex64::ZERO {
                    continue;
                }
                if k1 + l1 + k2 + l2 <= deg {
                    out.coeff[idx(k1 + k2, l1 + l2)] += c1 * c2;
                }
            }
        }
        out
    }

    /// Substitute `inner` for w and its conjugate series for w-; all terms
    /// above the truncation degree are discarded. `inner` must vanish at 0.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(self.deg, inner.deg);
        assert_eq!(
            inner.get(0, 0),
            Complex64::ZERO,
            "inner map must fix the origin"
        );
        let deg = self.deg;
        let inner_bar = inner.conj_series();
        // Powers of inner and conj(inner) up to the truncation degree.
        let mut pow_u: Vec<PolyMap> = vec![Self::identity(deg); deg + 1];
        pow_u[0] = {
            let mut one = Self::zero(deg);
            one.set(0, 0, Complex64::ONE);
            one
        };
        for k in 1..=deg {
            pow_u[k] = pow_u[k - 1].mul(inner);
        }
        let mut pow_v: Vec<PolyMap> = vec![Self::identity(deg); deg + 1];
        pow_v[0] = pow_u[0].clone();
        for l in 1..=deg {
            pow_v[l] = pow_v[l - 1].mul(&inner_bar);
        }
        let mut out = Self::zero(deg);
        for (k, l, c) in self.terms() {
            if c == Complex64::ZERO {
                continue;
            }
            let term = pow_u[k].mul(&pow_v[l]);
            for (tk, tl, tc) in term.terms() {
                if tc != Complex64::ZERO {
                    out.coeff[idx(tk, tl)] += c * tc;
                }
            }
        }
        out
    }

    /// Series reversion of a near-identity map (linear part w): the unique
    /// psi with psi(phi(w)) = w up to the truncation degree.
    pub fn invert_near_identity(&self) -> Self {
        assert_eq!(self.get(1, 0), Complex64::ONE, "linear part must be w");
        assert_eq!(self.get(0, 1), Complex64::ZERO);
        let mut h = self.clone();
        h.set(1, 0, Complex64::ZERO);
        let id = Self::identity(self.deg);
        // psi = id - h o psi gains one correct degree per pass.
        let mut psi = id.clone();
        for _ in 0..self.deg {
            psi = id.sub(&h.compose(&psi));
        }
        psi
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Conjugate the map by the near-identity transform phi = id + h:
/// returns phi^{-1} o g o phi truncated at the common degree.
pub fn substitute(g: &PolyMap, h: &PolyMap) -> PolyMap {
    let mut phi = h.clone();
    phi.set(1, 0, h.get(1, 0) + 1.0);
    let psi = phi.invert_near_identity();
    psi.compose(&g.compose(&phi))
}

/// Result of the homological solve at mu = i.
#[derive(Debug, Clone)]
pub struct NfResult {
    pub c1: Complex64,
    pub c2: Complex64,
    /// Transform coefficients h_kl for 2 <= k+l <= 3, (k,l) not in
    /// {(2,1), (0,3)}; the composite transform is id + sum h_kl w^k w-^l.
    pub h: Vec<(usize, usize, Complex64)>,
    /// Largest surviving non-resonant coefficient.
    pub residual: f64,
}

fn divisor(mu: Complex64, k: usize, l: usize) -> Complex64 {
    mu.powu(k as u32) * mu.conj().powu(l as u32) - mu
}

type TransformEntries = Vec<(usize, usize, Complex64)>;

fn kill_monomials(
    g: &PolyMap,
    mu: Complex64,
    targets: &[(usize, usize)],
) -> Result<(PolyMap, TransformEntries)> {
    let mut h = PolyMap::zero(g.deg());
    let mut entries = Vec::new();
    for &(k, l) in targets {
        let div = divisor(mu, k, l);
        if div.norm() < RESONANT_GUARD {
            return Err(Error::ResonantDivisor { k, l });
        }
        let hk = g.get(k, l) / div;
        h.set(k, l, hk);
        entries.push((k, l, hk));
    }
    Ok((substitute(g, &h), entries))
}

/// Bring a map with linear part i w to resonant normal form
/// i w + c1 w^2 w- + c2 w-^3 + O(4) and return c1, c2 together with the
/// transform that achieves it.
pub fn normal_form(g: &PolyMap) -> Result<NfResult> {
    let mu = g.get(1, 0);
    assert_eq!(mu, Complex64::i(), "the solve is specific to mu = i");
    assert_eq!(
        g.get(0, 1),
        Complex64::ZERO,
        "input must have no w- linear term"
    );
    assert!(g.deg() >= 3);

    // Resonance arithmetic at mu = i: every divisor below is nonzero while
    // the (2,1) and (0,3) divisors vanish identically.
    let removable = [(2usize, 0usize), (1, 1), (0, 2), (3, 0), (1, 2)];
    for &(k, l) in &removable {
        debug_assert!(divisor(mu, k, l).norm() > 0.1);
    }
    debug_assert!(divisor(mu, 2, 1).norm() < 1e-15);
    debug_assert!(divisor(mu, 0, 3).norm() < 1e-15);

    let (g2, mut h_entries) = kill_monomials(g, mu, &[(2, 0), (1, 1), (0, 2)])?;
    let (g3, h3) = kill_monomials(&g2, mu, &[(3, 0), (1, 2)])?;
    h_entries.extend(h3);

    let mut residual: f64 = 0.0;
    for (k, l, c) in g3.terms() {
        let d = k + l;
        if (2..=3).contains(&d) && (k, l) != (2, 1) && (k, l) != (0, 3) {
            residual = residual.max(c.norm());
        }
    }
    Ok(NfResult {
        c1: g3.get(2, 1),
        c2: g3.get(0, 3),
        h: h_entries,
        residual,
    })
}
