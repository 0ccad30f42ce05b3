//! 2×2 complex matrices, the unitary group `U(2)` and the domain `D`.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `‖U*U − I‖_max` accepted by [`UnitaryMatrix2::new`].
pub const UNITARY_TOL: f64 = 1e-12;

/// Points whose Sylvester minors of `I − ZZ*` fall below this are treated as
/// outside `D`.
pub const BOUNDARY_EPS: f64 = 1e-14;

/// Hermitian inner product on ℂ², conjugate-linear in the second slot:
/// `⟨u, v⟩ = Σ u_i · conj(v_i)`.
#[inline]
pub fn inner(u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    u[0] * v[0].conj() + u[1] * v[1].conj()
}

#[inline]
pub fn norm2(u: [Complex64; 2]) -> f64 {
    libm::sqrt(u[0].norm_sqr() + u[1].norm_sqr())
}

/// A 2×2 complex matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Matrix2C {
    pub z11: Complex64,
    pub z12: Complex64,
    pub z21: Complex64,
    pub z22: Complex64,
}

impl Matrix2C {
    pub const ZERO: Self = Self::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );

    pub const IDENTITY: Self = Self::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    );

    pub const fn new(z11: Complex64, z12: Complex64, z21: Complex64, z22: Complex64) -> Self {
        Self { z11, z12, z21, z22 }
    }

    /// Builds a matrix from eight reals `(re z11, im z11, re z12, im z12, …)`.
    pub fn from_reals(v: [f64; 8]) -> Self {
        Self::new(
            Complex64::new(v[0], v[1]),
            Complex64::new(v[2], v[3]),
            Complex64::new(v[4], v[5]),
            Complex64::new(v[6], v[7]),
        )
    }

    pub fn to_reals(&self) -> [f64; 8] {
        [
            self.z11.re,
            self.z11.im,
            self.z12.re,
            self.z12.im,
            self.z21.re,
            self.z21.im,
            self.z22.re,
            self.z22.im,
        ]
    }

    pub fn real(z11: f64, z12: f64, z21: f64, z22: f64) -> Self {
        Self::new(z11.into(), z12.into(), z21.into(), z22.into())
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Self::new(a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), b)
    }

    /// Matrix with the given columns.
    pub fn from_cols(c1: [Complex64; 2], c2: [Complex64; 2]) -> Self {
        Self::new(c1[0], c2[0], c1[1], c2[1])
    }

    pub fn col1(&self) -> [Complex64; 2] {
        [self.z11, self.z21]
    }

    pub fn col2(&self) -> [Complex64; 2] {
        [self.z12, self.z22]
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.z11, self.z12, self.z21, self.z22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose `Z*`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.z11.conj(), self.z21.conj(), self.z12.conj(), self.z22.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.z11, self.z21, self.z12, self.z22)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.z11.conj(), self.z12.conj(), self.z21.conj(), self.z22.conj())
    }

    pub fn det(&self) -> Complex64 {
        self.z11 * self.z22 - self.z12 * self.z21
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.z11 * c, self.z12 * c, self.z21 * c, self.z22 * c)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.entries().iter().map(|z| z.norm_sqr()).sum())
    }

    /// The Sylvester pair of `I − ZZ*`: its (1,1) entry and its determinant.
    /// Both are real.
    pub fn defect_minors(&self) -> (f64, f64) {
        let m11 = 1.0 - self.z11.norm_sqr() - self.z12.norm_sqr();
        let m22 = 1.0 - self.z21.norm_sqr() - self.z22.norm_sqr();
        let m12 = self.z11 * self.z21.conj() + self.z12 * self.z22.conj();
        (m11, m11 * m22 - m12.norm_sqr())
    }

    /// `det(I − ZZ*)`.
    pub fn defect_det(&self) -> f64 {
        self.defect_minors().1
    }
}

impl Add for Matrix2C {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.z11 + o.z11, self.z12 + o.z12, self.z21 + o.z21, self.z22 + o.z22)
    }
}

impl Sub for Matrix2C {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.z11 - o.z11, self.z12 - o.z12, self.z21 - o.z21, self.z22 - o.z22)
    }
}

impl Neg for Matrix2C {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.z11, -self.z12, -self.z21, -self.z22)
    }
}

impl Mul for Matrix2C {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.z11 * o.z11 + self.z12 * o.z21,
            self.z11 * o.z12 + self.z12 * o.z22,
            self.z21 * o.z11 + self.z22 * o.z21,
            self.z21 * o.z12 + self.z22 * o.z22,
        )
    }
}

/// Conjugate transpose of `z`.
pub fn adjoint(z: &Matrix2C) -> Matrix2C {
    z.adjoint()
}

/// `z11·z22 − z12·z21`.
pub fn det2(z: &Matrix2C) -> Complex64 {
    z.det()
}

/// Whether `I − ZZ*` is positive definite, decided by Sylvester's criterion
/// with both leading minors strictly above [`BOUNDARY_EPS`]. Non-finite input
/// is never in the domain.
pub fn in_domain(z: &Matrix2C) -> bool {
    if !z.is_finite() {
        return false;
    }
    let (m11, det) = z.defect_minors();
    m11 > BOUNDARY_EPS && det > BOUNDARY_EPS
}

/// An element of `U(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix2C", into = "Matrix2C")]
pub struct UnitaryMatrix2(Matrix2C);

impl UnitaryMatrix2 {
    pub const IDENTITY: Self = Self(Matrix2C::IDENTITY);

    pub fn new(u: Matrix2C) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = unitarity_defect(&u);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self(u))
    }

    /// Wraps `u` without checking; callers guarantee unitarity to rounding.
    pub(crate) fn new_unchecked(u: Matrix2C) -> Self {
        debug_assert!(unitarity_defect(&u) <= 1e-10, "{u:?}");
        Self(u)
    }

    /// `[[cos θ, −sin θ], [sin θ, cos θ]]`
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = libm::sincos(theta);
        Self(Matrix2C::real(c, -s, s, c))
    }

    pub fn diag(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(Matrix2C::diag(a, b))
    }

    pub fn matrix(&self) -> &Matrix2C {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, t: Complex64) -> Self {
        Self::new_unchecked(self.0.scale(t))
    }
}

impl Mul for UnitaryMatrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl TryFrom<Matrix2C> for UnitaryMatrix2 {
    type Error = Error;
    fn try_from(m: Matrix2C) -> Result<Self> {
        Self::new(m)
    }
}

impl From<UnitaryMatrix2> for Matrix2C {
    fn from(u: UnitaryMatrix2) -> Self {
        u.0
    }
}

/// `‖U*U − I‖_max`.
pub fn unitarity_defect(u: &Matrix2C) -> f64 {
    (u.adjoint() * *u - Matrix2C::IDENTITY).max_norm()
}

/// A point of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix2C", into = "Matrix2C")]
pub struct DomainPoint(Matrix2C);

impl DomainPoint {
    pub fn new(z: Matrix2C) -> Result<Self> {
        if !z.is_finite() {
            return Err(Error::NonFinite);
        }
        if !in_domain(&z) {
            return Err(Error::NotInDomain);
        }
        Ok(Self(z))
    }

    pub fn matrix(&self) -> &Matrix2C {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix2C {
        self.0
    }
}

impl TryFrom<Matrix2C> for DomainPoint {
    type Error = Error;
    fn try_from(m: Matrix2C) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DomainPoint> for Matrix2C {
    fn from(p: DomainPoint) -> Self {
        p.0
    }
}
