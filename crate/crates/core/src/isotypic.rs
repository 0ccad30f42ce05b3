//! Signature indices `(ν, j)`, the highest-weight polynomials
//! `p_{ν,j}(Z) = z11^{n−j}·z12^j·det(Z)^{ν2}` (`n = ν1 − ν2`) and their
//! Haar–Schur constants.
//!
//! Torus phases: `p_{ν,j}(diag(t1, t2)·Z) = t1^{ν1}·t2^{ν2}·p_{ν,j}(Z)` and
//! `p_{ν,j}(Z·diag(s, s̄)) = s^{n−2j}·p_{ν,j}(Z)`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Matrix2C, UnitaryMatrix2};
use crate::orbit::{canonical_matrix, RadialTriple};

/// A block label: `ν = (nu1, nu2)` with `nu1 ≥ nu2 ≥ 0` and `0 ≤ j ≤ nu1 − nu2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIndex", into = "RawIndex")]
pub struct SignatureIndex {
    nu1: u32,
    nu2: u32,
    j: u32,
}

#[derive(Serialize, Deserialize)]
struct RawIndex {
    nu1: u32,
    nu2: u32,
    j: u32,
}

impl TryFrom<RawIndex> for SignatureIndex {
    type Error = Error;
    fn try_from(r: RawIndex) -> Result<Self> {
        Self::new(r.nu1, r.nu2, r.j)
    }
}

impl From<SignatureIndex> for RawIndex {
    fn from(s: SignatureIndex) -> Self {
        RawIndex {
            nu1: s.nu1,
            nu2: s.nu2,
            j: s.j,
        }
    }
}

impl SignatureIndex {
    pub fn new(nu1: u32, nu2: u32, j: u32) -> Result<Self> {
        if nu1 < nu2 || j > nu1 - nu2 {
            return Err(Error::InvalidSignature { nu1, nu2, j });
        }
        Ok(Self { nu1, nu2, j })
    }

    pub fn nu1(&self) -> u32 {
        self.nu1
    }

    pub fn nu2(&self) -> u32 {
        self.nu2
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// `ν1 − ν2`.
    pub fn n(&self) -> u32 {
        self.nu1 - self.nu2
    }

    /// Total degree `|ν| = ν1 + ν2`.
    pub fn degree(&self) -> u32 {
        self.nu1 + self.nu2
    }

    /// The torus weight label `ν1 − ν2 − 2j`.
    pub fn weight(&self) -> i64 {
        i64::from(self.n()) - 2 * i64::from(self.j)
    }

    /// The same `ν` with a different `j`.
    pub fn with_j(&self, k: u32) -> Result<Self> {
        Self::new(self.nu1, self.nu2, k)
    }

    /// Sort key of the canonical order `(|ν|, ν1, j)`.
    pub fn order_key(&self) -> (u32, u32, u32) {
        (self.degree(), self.nu1, self.j)
    }
}

impl PartialOrd for SignatureIndex {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignatureIndex {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for SignatureIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}, {}), {})", self.nu1, self.nu2, self.j)
    }
}

/// `C(n, k)` as a float, by the multiplicative recurrence. Zero for `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    // Intermediate values are integers; rounding removes division residue.
    libm::round(acc)
}

/// `p_{ν,j}(Z)`, with `0⁰ = 1`.
pub fn hw_poly(idx: SignatureIndex, z: &Matrix2C) -> Complex64 {
    z.z11.powu(idx.n() - idx.j) * z.z12.powu(idx.j) * z.det().powu(idx.nu2)
}

/// `p_{ν,j}(A·[[r1, r2], [0, r3]])` through the orbit expansion
/// `Σ_{k≤j} C(j,k)·p_{ν,k}(A)·r1^{ν1−j}·r2^{j−k}·r3^{ν2+k}`.
pub fn hw_poly_on_orbit(idx: SignatureIndex, a: &UnitaryMatrix2, r: RadialTriple) -> Complex64 {
    let j = idx.j;
    let head = libm::pow(r.r1, f64::from(idx.nu1 - j));
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=j {
        let pk = SignatureIndex { j: k, ..idx };
        let radial = head * powu(r.r2, j - k) * powu(r.r3, idx.nu2 + k);
        sum += hw_poly(pk, a.matrix()) * (binomial(j, k) * radial);
    }
    sum
}

/// `x^k` with `0⁰ = 1`.
#[inline]
pub(crate) fn powu(x: f64, k: u32) -> f64 {
    libm::pow(x, f64::from(k))
}

/// Direct evaluation of `p_{ν,j}(A·canonical(r))` for comparison with
/// [`hw_poly_on_orbit`].
pub fn hw_poly_direct(idx: SignatureIndex, a: &UnitaryMatrix2, r: RadialTriple) -> Complex64 {
    hw_poly(idx, &(*a.matrix() * canonical_matrix(r)))
}

/// `∫_{U(2)} p_{ν,j}(A)·conj(p_{ν,k}(A)) dA` for normalized Haar `dA`:
/// `δ_{jk} / ((n + 1)·C(n, j))`.
///
/// Under Haar measure `|a11|²` is uniform on `[0, 1]` and `|a12|² = 1 − |a11|²`,
/// so the diagonal value is the Beta integral `(n−j)!·j!/(n+1)!`. Off the
/// diagonal the torus character `s^{n−2j}` integrates to zero.
pub fn schur_norm(idx: SignatureIndex, k: u32) -> Result<f64> {
    let n = idx.n();
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if k != idx.j {
        return Ok(0.0);
    }
    Ok(1.0 / (f64::from(n + 1) * binomial(n, idx.j)))
}

/// Every `(ν, j)` with `ν1 + ν2 ≤ max_degree`, in the canonical order.
pub fn enumerate_signatures(max_degree: u32) -> Vec<SignatureIndex> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for nu1 in d.div_ceil(2)..=d {
            let nu2 = d - nu1;
            for j in 0..=nu1 - nu2 {
                out.push(SignatureIndex { nu1, nu2, j });
            }
        }
    }
    out
}
