//! Random matrices: Haar-distributed unitaries and uniform points of `D`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::mat2::{self, DomainPoint, Matrix2C, UnitaryMatrix2};

/// Gram–Schmidt is redone when a Gaussian column is this close to singular.
const SINGULAR_DRAW: f64 = 1e-10;

fn std_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Samples `U(2)` from normalized Haar measure.
///
/// A matrix of independent standard complex Gaussians is orthonormalized
/// column by column. Gram–Schmidt yields the QR factor whose triangular part
/// has a positive real diagonal, which is exactly the phase convention under
/// which `Q` is Haar distributed. Near-singular draws (probability zero) are
/// discarded and redrawn.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix2 {
    loop {
        let g1 = [std_complex_normal(rng), std_complex_normal(rng)];
        let g2 = [std_complex_normal(rng), std_complex_normal(rng)];
        let n1 = mat2::norm2(g1);
        if n1 < SINGULAR_DRAW {
            continue;
        }
        let q1 = [g1[0] / n1, g1[1] / n1];
        let proj = mat2::inner(g2, q1);
        let w = [g2[0] - proj * q1[0], g2[1] - proj * q1[1]];
        let n2 = mat2::norm2(w);
        if n2 < SINGULAR_DRAW * mat2::norm2(g2).max(1.0) {
            continue;
        }
        let q2 = [w[0] / n2, w[1] / n2];
        return UnitaryMatrix2::new_unchecked(Matrix2C::from_cols(q1, q2));
    }
}

#[inline]
fn unit_box<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.random();
    let im: f64 = rng.random();
    Complex64::new(2.0 * re - 1.0, 2.0 * im - 1.0)
}

/// One proposal from the box `[−1, 1)⁸`, accepted iff it lies in `D`.
///
/// Row one is drawn first and the proposal is rejected early when
/// `|z11|² + |z12|² ≥ 1`; the remaining coordinates would be discarded anyway,
/// so the accepted points are still uniform on `D`.
pub fn propose_box<R: Rng + ?Sized>(rng: &mut R) -> Option<DomainPoint> {
    let z11 = unit_box(rng);
    let z12 = unit_box(rng);
    if 1.0 - z11.norm_sqr() - z12.norm_sqr() <= mat2::BOUNDARY_EPS {
        return None;
    }
    let z21 = unit_box(rng);
    let z22 = unit_box(rng);
    DomainPoint::new(Matrix2C::new(z11, z12, z21, z22)).ok()
}

/// Uniform point of `D` (Lebesgue measure) by rejection from `[−1, 1)⁸`,
/// together with the number of proposals used.
pub fn sample_domain_uniform_counted<R: Rng + ?Sized>(rng: &mut R) -> (DomainPoint, u64) {
    let mut proposals = 0u64;
    loop {
        proposals += 1;
        if let Some(z) = propose_box(rng) {
            return (z, proposals);
        }
    }
}

/// Uniform point of `D` (Lebesgue measure).
pub fn sample_domain_uniform<R: Rng + ?Sized>(rng: &mut R) -> DomainPoint {
    sample_domain_uniform_counted(rng).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_draws_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let u = haar_unitary(&mut rng);
            assert!(mat2::unitarity_defect(u.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn accepted_points_are_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let z = sample_domain_uniform(&mut rng);
            assert!(mat2::in_domain(z.matrix()));
        }
    }
}
