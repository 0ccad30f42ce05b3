//! Tensor Gauss–Legendre integration of `∫_Ω f(r)·b(r)^{λ−4} dr`.
//!
//! `Ω` is parametrized by `θ1, ψ, θ3 ∈ (0, π/2)`:
//!
//! ```text
//! r1 = sin θ1,   r3 = sin θ3,   r2 = sin ψ · cos θ1 · cos θ3,
//! b(r) = (cos θ1 · cos θ3 · cos ψ)²,   dr = cos²θ1 · cos²θ3 · cos ψ dθ1 dψ dθ3,
//! ```
//!
//! which maps the cube onto `Ω` and makes the weight separable:
//! `b^{λ−4} dr = cos^{2λ−6}θ1 · cos^{2λ−6}θ3 · cos^{2λ−7}ψ`. For `λ < 3.5` the
//! `ψ` factor is singular at `π/2`; the graded scheme substitutes
//! `θ = (π/2)(1 − (1−t)^m)` to smooth it out.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::WeightParams;
use crate::orbit::RadialTriple;

/// Largest admissible `boundary_margin`.
pub const MAX_BOUNDARY_MARGIN: f64 = 1e-6;

/// Smallest admissible `nodes_per_axis`.
pub const MIN_NODES: usize = 8;

/// Largest admissible `nodes_per_axis`; the estimate runs at twice this.
pub const MAX_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadScheme {
    /// Gauss–Legendre on the angles directly.
    TensorGauss,
    /// Gauss–Legendre after the graded substitution on every axis.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub nodes_per_axis: usize,
    pub scheme: QuadScheme,
    /// Each axis is integrated over `(0, 1 − margin)` in the unit parameter.
    pub boundary_margin: f64,
}

impl QuadConfig {
    pub fn new(nodes_per_axis: usize, scheme: QuadScheme, boundary_margin: f64) -> Result<Self> {
        let q = Self {
            nodes_per_axis,
            scheme,
            boundary_margin,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn tensor_gauss(nodes_per_axis: usize) -> Result<Self> {
        Self::new(nodes_per_axis, QuadScheme::TensorGauss, 0.0)
    }

    pub fn adaptive(nodes_per_axis: usize) -> Result<Self> {
        Self::new(nodes_per_axis, QuadScheme::Adaptive, 0.0)
    }

    /// 64 nodes up to degree 8 and 96 above; the graded scheme below `λ = 3.5`.
    pub fn default_for(max_degree: u32, p: WeightParams) -> Self {
        let nodes_per_axis = if max_degree <= 8 { 64 } else { 96 };
        let scheme = if p.lambda() < 3.5 {
            QuadScheme::Adaptive
        } else {
            QuadScheme::TensorGauss
        };
        Self {
            nodes_per_axis,
            scheme,
            boundary_margin: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < MIN_NODES {
            return Err(Error::InvalidQuadConfig("nodes_per_axis must be at least 8"));
        }
        if self.nodes_per_axis > MAX_NODES {
            return Err(Error::InvalidQuadConfig("nodes_per_axis must be at most 512"));
        }
        if !(0.0..=MAX_BOUNDARY_MARGIN).contains(&self.boundary_margin) {
            return Err(Error::InvalidQuadConfig("boundary_margin must lie in [0, 1e-6]"));
        }
        Ok(())
    }
}

/// A quadrature value with the estimate `|I(2n) − I(n)|` of its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimate<T = f64> {
    pub value: T,
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// One node of a 1D angular rule: `sin θ`, `cos θ` and the weight including
/// `dθ/dt` and the axis power of `cos θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisNode {
    pub sin: f64,
    pub cos: f64,
    pub weight: f64,
}

/// Grading exponent of the smoothing substitution at weight `λ`.
pub fn grading_exponent(p: WeightParams) -> u32 {
    let m = libm::ceil(8.0 / (2.0 * p.lambda() - 6.0));
    if m < 1.0 {
        1
    } else if m > 64.0 {
        64
    } else {
        m as u32
    }
}

fn axis(n: usize, cfg: &QuadConfig, grading: u32, cos_power: f64) -> Vec<AxisNode> {
    let (x, w) = gauss_legendre(n);
    let keep = 1.0 - cfg.boundary_margin;
    let m = match cfg.scheme {
        QuadScheme::TensorGauss => 1,
        QuadScheme::Adaptive => grading,
    };
    let mf = f64::from(m);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            // s = 1 − t for t = keep·(1 + x)/2, formed without cancellation
            // near t = 1.
            let s = 0.5 * (1.0 - xi) + cfg.boundary_margin * 0.5 * (1.0 + xi);
            let wt = keep * 0.5 * wi;
            // u = π/2 − θ
            let sm = libm::pow(s, mf);
            let u = FRAC_PI_2 * sm;
            let dtheta = if m == 1 {
                FRAC_PI_2
            } else {
                FRAC_PI_2 * mf * libm::pow(s, mf - 1.0)
            };
            let (cu, su) = (libm::cos(u), libm::sin(u));
            AxisNode {
                sin: cu,
                cos: su,
                weight: wt * dtheta * libm::pow(su, cos_power),
            }
        })
        .collect()
}

/// The product rule on `Ω` at a fixed number of nodes per axis.
#[derive(Debug, Clone)]
pub struct OmegaRule {
    theta: Vec<AxisNode>,
    psi: Vec<AxisNode>,
}

impl OmegaRule {
    /// The rule for `∫_Ω f·b^{λ−4} dr` with `n` nodes per axis.
    pub fn new(p: WeightParams, n: usize, cfg: &QuadConfig) -> Self {
        let l = p.lambda();
        let g = grading_exponent(p);
        Self {
            theta: axis(n, cfg, g, 2.0 * l - 6.0),
            psi: axis(n, cfg, g, 2.0 * l - 7.0),
        }
    }

    /// Number of `θ1` slabs; slabs are the unit of parallel work.
    pub fn slabs(&self) -> usize {
        self.theta.len()
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.psi.len() * self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits the nodes with `θ1` index `slab` in a fixed order, passing the
    /// point and its full weight (Jacobian and `b^{λ−4}` included).
    pub fn for_each_in_slab(&self, slab: usize, mut visit: impl FnMut(RadialTriple, f64)) {
        let a = self.theta[slab];
        for b in &self.psi {
            let wab = a.weight * b.weight;
            let r2_head = b.sin * a.cos;
            for c in &self.theta {
                let r = RadialTriple::new_unchecked(a.sin, r2_head * c.cos, c.sin);
                visit(r, wab * c.weight);
            }
        }
    }
}

/// Sums `parts` by recursive halving, so the rounding pattern depends only on
/// the number of parts.
pub fn pairwise_sum<T: Copy + core::ops::Add<Output = T>>(parts: &[T], zero: T) -> T {
    match parts.len() {
        0 => zero,
        1 => parts[0],
        n => pairwise_sum(&parts[..n / 2], zero) + pairwise_sum(&parts[n / 2..], zero),
    }
}

/// Elementwise pairwise reduction of equally sized vectors.
pub fn pairwise_sum_vec(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    match parts.len() {
        0 => Vec::new(),
        1 => parts[0].clone(),
        n => {
            let mut a = pairwise_sum_vec(&parts[..n / 2]);
            let b = pairwise_sum_vec(&parts[n / 2..]);
            for (x, y) in a.iter_mut().zip(&b) {
                *x += *y;
            }
            a
        }
    }
}

fn integrate_at<F>(f: &F, rule: &OmegaRule) -> Result<Complex64>
where
    F: Fn(RadialTriple) -> Complex64,
{
    let mut slabs = Vec::with_capacity(rule.slabs());
    for s in 0..rule.slabs() {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut bad = None;
        rule.for_each_in_slab(s, |r, w| {
            let v = f(r);
            if !(v.re.is_finite() && v.im.is_finite()) {
                bad.get_or_insert(r);
            }
            acc += v * w;
        });
        if let Some(r) = bad {
            return Err(Error::NonFiniteIntegrand {
                r1: r.r1,
                r2: r.r2,
                r3: r.r3,
            });
        }
        slabs.push(acc);
    }
    Ok(pairwise_sum(&slabs, Complex64::new(0.0, 0.0)))
}

/// `∫_Ω f(r)·b(r)^{λ−4} dr` for complex `f`: the value at `2n` nodes per axis
/// and `|I(2n) − I(n)|` as the error estimate.
pub fn integrate_omega_complex<F>(f: F, p: WeightParams, q: &QuadConfig) -> Result<QuadEstimate<Complex64>>
where
    F: Fn(RadialTriple) -> Complex64,
{
    q.validate()?;
    let coarse = integrate_at(&f, &OmegaRule::new(p, q.nodes_per_axis, q))?;
    let fine = integrate_at(&f, &OmegaRule::new(p, 2 * q.nodes_per_axis, q))?;
    Ok(QuadEstimate {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// `∫_Ω f(r)·b(r)^{λ−4} dr` for real `f`.
pub fn integrate_omega<F>(f: F, p: WeightParams, q: &QuadConfig) -> Result<QuadEstimate>
where
    F: Fn(RadialTriple) -> f64,
{
    let e = integrate_omega_complex(|r| Complex64::new(f(r), 0.0), p, q)?;
    Ok(QuadEstimate {
        value: e.value.re,
        error: e.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{b_poly, omega_contains, orbit_jacobian, orbit_prefactor};

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for n in [1usize, 2, 5, 8, 17, 64, 128] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            // ∫ x^{2k} = 2/(2k+1) for 2k ≤ 2n − 1
            let k = (2 * n - 1) / 2;
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xi, &wi)| wi * libm::pow(xi, 2.0 * k as f64))
                .sum();
            assert!((s - 2.0 / (2.0 * k as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadConfig::tensor_gauss(7).is_err());
        assert!(QuadConfig::new(16, QuadScheme::TensorGauss, 2e-6).is_err());
        assert!(QuadConfig::new(16, QuadScheme::Adaptive, 1e-6).is_ok());
        let p = WeightParams::new(3.2).unwrap();
        assert_eq!(QuadConfig::default_for(3, p).scheme, QuadScheme::Adaptive);
        let p = WeightParams::new(5.0).unwrap();
        assert_eq!(QuadConfig::default_for(9, p).nodes_per_axis, 96);
    }

    #[test]
    fn nodes_lie_in_omega() {
        let p = WeightParams::new(4.5).unwrap();
        let q = QuadConfig::tensor_gauss(8).unwrap();
        let rule = OmegaRule::new(p, 8, &q);
        for s in 0..rule.slabs() {
            rule.for_each_in_slab(s, |r, w| {
                assert!(omega_contains(r));
                assert!(w > 0.0);
            });
        }
        // Graded nodes crowd the boundary, where b(r) evaluated from r
        // cancels to rounding level; check the coordinate bounds instead.
        let q = QuadConfig::adaptive(8).unwrap();
        let rule = OmegaRule::new(p, 8, &q);
        for s in 0..rule.slabs() {
            rule.for_each_in_slab(s, |r, w| {
                assert!(r.r1 < 1.0 && r.r3 < 1.0 && r.r2 < 1.0);
                assert!(w > 0.0);
            });
        }
    }

    #[test]
    fn zero_integrand() {
        let p = WeightParams::new(5.0).unwrap();
        let e = integrate_omega(|_| 0.0, p, &QuadConfig::tensor_gauss(8).unwrap()).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let p = WeightParams::new(5.0).unwrap();
        let q = QuadConfig::tensor_gauss(8).unwrap();
        let e = integrate_omega(|r| 1.0 / (r.r1 - r.r1), p, &q);
        assert!(matches!(e, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn normalization_identity() {
        for l in [4.0, 5.0, 7.5] {
            let p = WeightParams::new(l).unwrap();
            let q = QuadConfig::tensor_gauss(32).unwrap();
            let e = integrate_omega(orbit_jacobian, p, &q).unwrap();
            assert!((orbit_prefactor(p) * e.value - 1.0).abs() < 1e-12, "λ = {l}");
            assert!(e.error < 1e-12);
        }
        let p = WeightParams::new(3.2).unwrap();
        let e = integrate_omega(orbit_jacobian, p, &QuadConfig::adaptive(64).unwrap()).unwrap();
        assert!((orbit_prefactor(p) * e.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn weight_is_b_power() {
        // ∫ b·b^{λ−5} = ∫ b^{λ−4}: the λ = 5 rule with f = 1 against the λ = 4 rule with f = b
        let q = QuadConfig::tensor_gauss(24).unwrap();
        let i5 = integrate_omega(|_| 1.0, WeightParams::new(5.0).unwrap(), &q).unwrap();
        let i4 = integrate_omega(b_poly, WeightParams::new(4.0).unwrap(), &q).unwrap();
        assert!((i5.value - i4.value).abs() < 1e-13);
    }

    #[test]
    fn pairwise_sums() {
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.0), 15.0);
        assert_eq!(pairwise_sum::<f64>(&[], 0.0), 0.0);
        let v = [
            alloc::vec![Complex64::new(1.0, 0.0)],
            alloc::vec![Complex64::new(0.0, 2.0)],
        ];
        assert_eq!(pairwise_sum_vec(&v), [Complex64::new(1.0, 2.0)]);
    }
}
