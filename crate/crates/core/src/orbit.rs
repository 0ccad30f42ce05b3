//! The `U(2)×T` action on 2×2 matrices and its canonical upper-triangular
//! orbit representatives.
//!
//! `(A, t)` acts by `Z ↦ A·Z·diag(t, t̄)⁻¹ = A·Z·diag(t̄, t)`. This group has
//! the same orbits as `U(2)×T²` because the extra central factor of `T²` is
//! already realised by a scalar in `U(2)`. Every orbit contains a matrix
//! `[[r1, r2], [0, r3]]` with `r ∈ [0, ∞)³`, unique when `det Z ≠ 0` and
//! `⟨Z1, Z2⟩ ≠ 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{self, Matrix2C, UnitaryMatrix2};

/// `|det Z| ≤ DEGENERATE_DET · ‖Z‖²_max` selects the rank-deficient branches.
pub const DEGENERATE_DET: f64 = 1e-12;

/// Column norm treated as zero.
pub const ZERO_COLUMN: f64 = 1e-14;

/// Canonical orbit coordinates `(r1, r2, r3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialTriple {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RadialTriple {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !(ok(r1) && ok(r2) && ok(r3)) {
            return Err(Error::Precondition(
                "radial triple entries must be finite and nonnegative",
            ));
        }
        Ok(Self { r1, r2, r3 })
    }

    /// Construction without validation, for quadrature nodes and samplers
    /// that produce nonnegative values by construction.
    #[inline]
    pub const fn new_unchecked(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }
}

/// `[[r1, r2], [0, r3]]`.
pub fn canonical_matrix(r: RadialTriple) -> Matrix2C {
    Matrix2C::real(r.r1, r.r2, 0.0, r.r3)
}

/// An element `(A, t)` of `U(2)×T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElementU2T {
    a: UnitaryMatrix2,
    t: Complex64,
}

impl GroupElementU2T {
    pub const IDENTITY: Self = Self {
        a: UnitaryMatrix2::IDENTITY,
        t: Complex64::new(1.0, 0.0),
    };

    pub fn new(a: UnitaryMatrix2, t: Complex64) -> Result<Self> {
        if !(t.re.is_finite() && t.im.is_finite()) || (t.norm() - 1.0).abs() > mat2::UNITARY_TOL {
            return Err(Error::Precondition("torus parameter t must have modulus 1"));
        }
        Ok(Self { a, t })
    }

    pub fn unitary(&self) -> &UnitaryMatrix2 {
        &self.a
    }

    pub fn torus(&self) -> Complex64 {
        self.t
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.inverse(),
            t: self.t.conj(),
        }
    }

    /// Group product; `act(g.compose(h), Z) = act(g, act(h, Z))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a,
            t: self.t * other.t,
        }
    }

    /// The representative of `±(A, t)` with `Re t > 0`, or `t = i` type ties
    /// broken by `Im t > 0`. Both signs act identically.
    fn canonical_sign(self) -> Self {
        let flip = self.t.re < 0.0 || (self.t.re == 0.0 && self.t.im < 0.0);
        if flip {
            Self {
                a: self.a.scale(Complex64::new(-1.0, 0.0)),
                t: -self.t,
            }
        } else {
            self
        }
    }
}

/// `A·Z·diag(t̄, t)`.
pub fn act(g: &GroupElementU2T, z: &Matrix2C) -> Matrix2C {
    let az = *g.a.matrix() * *z;
    Matrix2C::new(az.z11 * g.t.conj(), az.z12 * g.t, az.z21 * g.t.conj(), az.z22 * g.t)
}

/// The `SU(2)` matrix `[[ū1, ū2], [−u2, u1]]` sending the unit vector `u` to `e1`.
fn align_to_e1(u: [Complex64; 2]) -> Matrix2C {
    Matrix2C::new(u[0].conj(), u[1].conj(), -u[1], u[0])
}

/// `q / |q|`, or 1 for `q = 0`.
fn phase(q: Complex64) -> Complex64 {
    let n = q.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        q / n
    }
}

/// Finds `(A, t)` and `r` with `act((A, t), Z) = [[r1, r2], [0, r3]]`.
///
/// The branches follow the constructive existence argument:
/// zero matrix; a zero column; rank one with both columns nonzero; invertible.
/// On the nondegenerate set `r = (|Z1|, |⟨Z2, Z1⟩|/|Z1|, |det Z|/|Z1|)` and the
/// returned element is the one with `Re t > 0`.
pub fn reduce(z: &Matrix2C) -> (GroupElementU2T, RadialTriple) {
    let one = Complex64::new(1.0, 0.0);
    let c1 = z.col1();
    let c2 = z.col2();
    let n1 = mat2::norm2(c1);
    let n2 = mat2::norm2(c2);
    let scale = z.max_norm();

    // (i) zero orbit.
    if n1 <= ZERO_COLUMN && n2 <= ZERO_COLUMN {
        return (GroupElementU2T::IDENTITY, RadialTriple::default());
    }

    // (ii) one zero column: rotate the other onto a positive multiple of e1.
    if n1 <= ZERO_COLUMN || n2 <= ZERO_COLUMN {
        let (col, n) = if n2 <= ZERO_COLUMN { (c1, n1) } else { (c2, n2) };
        let a = UnitaryMatrix2::new_unchecked(align_to_e1([col[0] / n, col[1] / n]));
        let g = GroupElementU2T { a, t: one };
        let r = if n2 <= ZERO_COLUMN {
            RadialTriple::new_unchecked(n, 0.0, 0.0)
        } else {
            RadialTriple::new_unchecked(0.0, n, 0.0)
        };
        return (g, r);
    }

    let det = z.det();

    // (iii) rank one, Z = (a·u, b·u): pick A with A(a·u) = |a|·e1 and
    // t² = a|b| / (b|a|); then (tA, t)·Z = [[|a|, |b|], [0, 0]].
    if det.norm() <= DEGENERATE_DET * scale * scale {
        // The longer column fixes u; the residual in the second row is then
        // at most |det Z| / max(|Z1|, |Z2|).
        let (col, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
        let u = [col[0] / n, col[1] / n];
        let a_coef = mat2::inner(c1, u);
        let b_coef = mat2::inner(c2, u);
        let pa = phase(a_coef);
        let pb = phase(b_coef);
        let a = align_to_e1(u).scale(pa.conj());
        let t = (pa * pb.conj()).sqrt();
        let g = GroupElementU2T {
            a: UnitaryMatrix2::new_unchecked(a).scale(t),
            t,
        }
        .canonical_sign();
        let r = RadialTriple::new_unchecked(a_coef.norm(), b_coef.norm(), 0.0);
        return (g, r);
    }

    // (iv) invertible: A0 = [[ā, b̄], [−b, a]] with (a, b) = Z1/|Z1| gives
    // A0·Z = [[|Z1|, ⟨Z2,Z1⟩/|Z1|], [0, det Z/|Z1|]]; then diag(t, s)·A0 with
    // t²·⟨Z2,Z1⟩ ≥ 0 and s·t·det Z ≥ 0.
    let u = [c1[0] / n1, c1[1] / n1];
    let a0 = align_to_e1(u);
    let w12 = mat2::inner(c2, u);
    let w22 = u[0] * c2[1] - u[1] * c2[0];
    let t = phase(w12.conj()).sqrt();
    let s = phase((t * w22).conj());
    let a = Matrix2C::diag(t, s) * a0;
    let g = GroupElementU2T {
        a: UnitaryMatrix2::new_unchecked(a),
        t,
    }
    .canonical_sign();
    (g, RadialTriple::new_unchecked(n1, w12.norm(), w22.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(z: &Matrix2C) -> f64 {
        let (g, r) = reduce(z);
        (act(&g, z) - canonical_matrix(r)).max_norm()
    }

    #[test]
    fn act_identity_and_torus() {
        let z = Matrix2C::new(c(0.1, 0.2), c(-0.3, 0.1), c(0.05, 0.0), c(0.2, -0.4));
        assert_eq!(act(&GroupElementU2T::IDENTITY, &z), z);
        let t = c(0.6, 0.8);
        let g = GroupElementU2T::new(UnitaryMatrix2::IDENTITY, t).unwrap();
        let expect = Matrix2C::new(z.z11 * t.conj(), z.z12 * t, z.z21 * t.conj(), z.z22 * t);
        assert!((act(&g, &z) - expect).max_norm() < 1e-16);
    }

    #[test]
    fn rejects_non_unit_torus() {
        assert!(GroupElementU2T::new(UnitaryMatrix2::IDENTITY, c(1.1, 0.0)).is_err());
    }

    #[test]
    fn canonical_input_is_fixed() {
        let z = Matrix2C::real(0.4, 0.2, 0.0, 0.5);
        let (g, r) = reduce(&z);
        assert_eq!(g, GroupElementU2T::IDENTITY);
        assert_eq!(r, RadialTriple::new(0.4, 0.2, 0.5).unwrap());
    }

    #[test]
    fn zero_orbit() {
        let (_, r) = reduce(&Matrix2C::ZERO);
        assert_eq!(r, RadialTriple::default());
    }

    #[test]
    fn degenerate_branches_triangularize() {
        // one zero column each way
        let z = Matrix2C::new(c(0.3, 0.1), c(0.0, 0.0), c(-0.2, 0.4), c(0.0, 0.0));
        assert!(residual(&z) < 1e-15);
        assert_eq!(reduce(&z).1.r2, 0.0);
        let z = Matrix2C::new(c(0.0, 0.0), c(0.3, 0.1), c(0.0, 0.0), c(-0.2, 0.4));
        assert!(residual(&z) < 1e-15);
        assert_eq!(reduce(&z).1.r1, 0.0);
        // rank one: Z = (a u, b u)
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let (a, b) = (c(0.2, -0.5), c(-0.3, 0.1));
        let z = Matrix2C::from_cols([a * u[0], a * u[1]], [b * u[0], b * u[1]]);
        let (g, r) = reduce(&z);
        assert!((act(&g, &z) - canonical_matrix(r)).max_norm() < 1e-15);
        assert!((r.r1 - a.norm()).abs() < 1e-15);
        assert!((r.r2 - b.norm()).abs() < 1e-15);
        assert_eq!(r.r3, 0.0);
        assert!(g.torus().re > 0.0);
    }

    #[test]
    fn closed_form_example() {
        let z = Matrix2C::from_cols([c(0.3, 0.0), c(0.0, 0.4)], [c(0.1, 0.0), c(0.2, 0.0)]);
        let (g, r) = reduce(&z);
        assert!((act(&g, &z) - canonical_matrix(r)).max_norm() < 1e-15);
        // |Z1| = 0.5, ⟨Z2,Z1⟩ = 0.03 − 0.08i, det = 0.06 − 0.04i
        assert!((r.r1 - 0.5).abs() < 1e-15);
        assert!((r.r2 - libm::hypot(0.03, 0.08) / 0.5).abs() < 1e-15);
        assert!((r.r3 - libm::hypot(0.06, 0.04) / 0.5).abs() < 1e-15);
        assert!(g.torus().re > 0.0);
    }

    #[test]
    fn canonical_matrix_examples() {
        assert_eq!(canonical_matrix(RadialTriple::default()), Matrix2C::ZERO);
        assert_eq!(
            canonical_matrix(RadialTriple::new(1.0, 0.0, 1.0).unwrap()),
            Matrix2C::IDENTITY
        );
        assert_eq!(
            canonical_matrix(RadialTriple::new(0.5, 0.1, 0.3).unwrap()),
            Matrix2C::real(0.5, 0.1, 0.0, 0.3)
        );
        assert!(RadialTriple::new(-0.1, 0.0, 0.0).is_err());
    }
}
