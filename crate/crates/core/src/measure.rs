//! The probability measures `v_λ` on `D` and their pushforward to the orbit
//! space `Ω`.
//!
//! `dv_λ(Z) = c_λ·det(I − ZZ*)^{λ−4} dZ` with
//! `c_λ = (λ−3)(λ−2)²(λ−1)/π⁴`. Writing `Z = A·[[r1, r2], [0, r3]]` (complex
//! QR with `A ∈ U(2)` and Haar probability `dA`),
//!
//! ```text
//! ∫_D f dv_λ = 8π⁴·c_λ ∫_Ω ∫_{U(2)} f(A·T(r)) dA · r1³·r2·r3·b(r)^{λ−4} dr,
//! b(r) = det(I − T(r)T(r)*) = 1 − r1² − r2² − r3² + r1²r3².
//! ```

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isotypic::{powu, SignatureIndex};
use crate::mat2::Matrix2C;
use crate::orbit::RadialTriple;
use crate::sample;

const PI4: f64 = core::f64::consts::PI * core::f64::consts::PI * core::f64::consts::PI * core::f64::consts::PI;

/// Lebesgue volume of `D` in `ℂ⁴ ≅ ℝ⁸`: `π⁴/12`.
pub const DOMAIN_VOLUME: f64 = PI4 / 12.0;

/// The weight parameter `λ > 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WeightParams {
    lambda: f64,
}

impl WeightParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 3.0) {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn c_lambda(&self) -> f64 {
        c_lambda(*self)
    }
}

impl TryFrom<f64> for WeightParams {
    type Error = Error;
    fn try_from(l: f64) -> Result<Self> {
        Self::new(l)
    }
}

impl From<WeightParams> for f64 {
    fn from(p: WeightParams) -> f64 {
        p.lambda
    }
}

/// `(λ−3)(λ−2)²(λ−1)/π⁴`, the normalizing constant of `v_λ`.
pub fn c_lambda(p: WeightParams) -> f64 {
    let l = p.lambda;
    (l - 3.0) * (l - 2.0) * (l - 2.0) * (l - 1.0) / PI4
}

/// `8π⁴·c_λ`, the constant in front of the orbit-space integral.
pub fn orbit_prefactor(p: WeightParams) -> f64 {
    let l = p.lambda;
    8.0 * (l - 3.0) * (l - 2.0) * (l - 2.0) * (l - 1.0)
}

/// `1 − r1² − r2² − r3² + r1²r3²`.
pub fn b_poly(r: RadialTriple) -> f64 {
    let (a, b, c) = (r.r1 * r.r1, r.r2 * r.r2, r.r3 * r.r3);
    1.0 - a - b - c + a * c
}

/// `r1³·r2·r3`, the orbit-space Jacobian.
pub fn orbit_jacobian(r: RadialTriple) -> f64 {
    r.r1 * r.r1 * r.r1 * r.r2 * r.r3
}

/// `a(r, ν, j, k) = r1^{2(ν1−j)+3}·r2^{2(j−k)+1}·r3^{2(ν2+k)+1}`: the Jacobian
/// times `|r1^{ν1−j} r2^{j−k} r3^{ν2+k}|²`.
pub fn a_weight(r: RadialTriple, idx: SignatureIndex, k: u32) -> Result<f64> {
    if k > idx.j() {
        return Err(Error::IndexOutOfRange { index: k, max: idx.j() });
    }
    let e = radial_exponents(idx, k);
    Ok(orbit_jacobian(r) * powu(r.r1, 2 * e[0]) * powu(r.r2, 2 * e[1]) * powu(r.r3, 2 * e[2]))
}

/// `(ν1 − j, j − k, ν2 + k)`, the powers of `(r1, r2, r3)` in the `k`-th term
/// of the orbit expansion of `p_{ν,j}`.
pub fn radial_exponents(idx: SignatureIndex, k: u32) -> [u32; 3] {
    [idx.nu1() - idx.j(), idx.j() - k, idx.nu2() + k]
}

/// Whether `[[r1, r2], [0, r3]] ∈ D`.
///
/// `I − TT*` has leading minor `1 − r1² − r2²` and determinant
/// `(1 − r1² − r2²)(1 − r3²) − r2²r3² = b(r)`, so Sylvester's criterion reads
/// `r1² + r2² < 1` and `b(r) > 0`.
pub fn omega_contains(r: RadialTriple) -> bool {
    r.r1 * r.r1 + r.r2 * r.r2 < 1.0 && b_poly(r) > 0.0
}

/// The importance weight `c_λ·vol(D)·det(I − ZZ*)^{λ−4}` turning uniform
/// samples of `D` into `v_λ` samples.
pub fn vlambda_weight(p: WeightParams, z: &Matrix2C) -> f64 {
    let w = c_lambda(p) * DOMAIN_VOLUME;
    let e = p.lambda - 4.0;
    if e == 0.0 {
        w
    } else {
        w * libm::pow(z.defect_det(), e)
    }
}

/// Fails for `λ < 4` unless explicitly allowed: the weight is then unbounded
/// near `∂D` and the sample variance need not exist.
pub fn check_mc_lambda(p: WeightParams, allow_unbounded: bool) -> Result<()> {
    if p.lambda < 4.0 && !allow_unbounded {
        return Err(Error::UnboundedWeight(p.lambda));
    }
    Ok(())
}

/// Sequential Monte Carlo estimate of `∫_D F dv_λ` from `n` uniform samples,
/// returning `(mean, stderr)`.
pub fn mc_integral_vlambda<F, R>(
    f: F,
    p: WeightParams,
    n: u64,
    rng: &mut R,
    allow_unbounded: bool,
) -> Result<(Complex64, f64)>
where
    F: Fn(&Matrix2C) -> Complex64,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::EmptySample);
    }
    check_mc_lambda(p, allow_unbounded)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let z = sample::sample_domain_uniform(rng);
        let x = f(z.matrix()) * vlambda_weight(p, z.matrix());
        sum += x;
        sum_sq += x.norm_sqr();
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean.norm_sqr()) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok((mean, libm::sqrt(var / nf)))
}
