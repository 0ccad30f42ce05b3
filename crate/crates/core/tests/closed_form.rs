//! Quadrature against the closed form of the radial moments
//!
//! ∫_Ω r1^α r2^β r3^γ b^{λ−4} dr = ⅛ · B((β+1)/2, λ−3) · B((α+1)/2, e+1) · B((γ+1)/2, e+1),
//! e = (β+1)/2 + λ − 4,
//!
//! obtained by integrating r2 first (a Beta integral in r2²/((1−r1²)(1−r3²)))
//! and then r1, r3 separately.

use bergman_core::measure::{orbit_jacobian, orbit_prefactor};
use bergman_core::quadrature::{integrate_omega, QuadConfig};
use bergman_core::spectrum::{self, term_weight};
use bergman_core::{Complex64, SignatureIndex, SymbolSpec, WeightParams};

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

fn moment(alpha: f64, beta: f64, gamma: f64, lambda: f64) -> f64 {
    let e = (beta + 1.0) / 2.0 + lambda - 4.0;
    let l = ln_beta((beta + 1.0) / 2.0, lambda - 3.0)
        + ln_beta((alpha + 1.0) / 2.0, e + 1.0)
        + ln_beta((gamma + 1.0) / 2.0, e + 1.0);
    libm::exp(l) / 8.0
}

fn pw(x: f64, k: u32) -> f64 {
    libm::pow(x, f64::from(k))
}

#[test]
fn monomial_moments_match_beta_products() {
    let q = QuadConfig::tensor_gauss(48).unwrap();
    for lambda in [4.0, 5.0, 6.0, 7.5] {
        let p = WeightParams::new(lambda).unwrap();
        for (a, b, c) in [(0, 0, 0), (3, 1, 1), (5, 3, 1), (7, 1, 5), (4, 2, 6), (11, 5, 9)] {
            let got = integrate_omega(|r| pw(r.r1, a) * pw(r.r2, b) * pw(r.r3, c), p, &q).unwrap();
            let want = moment(a.into(), b.into(), c.into(), lambda);
            assert!(
                (got.value - want).abs() <= 1e-12 * want,
                "λ = {lambda}, ({a},{b},{c}): {} vs {want}",
                got.value
            );
        }
    }
}

#[test]
fn non_integer_weights() {
    // cos^{2λ−7}ψ has a fractional power here: Gauss converges algebraically
    let p = WeightParams::new(4.25).unwrap();
    let got = integrate_omega(orbit_jacobian, p, &QuadConfig::tensor_gauss(64).unwrap()).unwrap();
    let want = moment(3.0, 1.0, 1.0, 4.25);
    assert!((got.value - want).abs() <= 1e-6 * want);
    assert!(got.error <= 1e-5 * want);

    // the graded rule handles the singular weight below λ = 3.5
    for lambda in [3.2, 3.45] {
        let p = WeightParams::new(lambda).unwrap();
        let got = integrate_omega(orbit_jacobian, p, &QuadConfig::adaptive(64).unwrap()).unwrap();
        assert!((orbit_prefactor(p) * got.value - 1.0).abs() < 1e-8, "λ = {lambda}");
    }
}

#[test]
fn normalization_for_all_weights() {
    // 8π⁴c_λ ∫ r1³ r2 r3 b^{λ−4} = 8(λ−3)(λ−2)²(λ−1) · moment(3,1,1) = 1
    for lambda in [3.7, 4.0, 4.5, 5.0, 9.0, 20.0] {
        let p = WeightParams::new(lambda).unwrap();
        assert!((orbit_prefactor(p) * moment(3.0, 1.0, 1.0, lambda) - 1.0).abs() < 1e-12);
    }
}

/// γ from the moment formula with every integral in closed form.
fn gamma_closed(sym: &[(f64, [u32; 3])], idx: SignatureIndex, lambda: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=idx.j() {
        let e = [idx.nu1() - idx.j(), idx.j() - k, idx.nu2() + k];
        let w = term_weight(idx, k);
        let base = |s: [u32; 3]| {
            moment(
                f64::from(2 * e[0] + 3 + s[0]),
                f64::from(2 * e[1] + 1 + s[1]),
                f64::from(2 * e[2] + 1 + s[2]),
                lambda,
            )
        };
        den += w * base([0, 0, 0]);
        num += w * sym.iter().map(|(c, s)| c * base(*s)).sum::<f64>();
    }
    num / den
}

#[test]
fn spectrum_matches_closed_form_polynomial_symbols() {
    let sym = [(1.0, [2, 0, 0]), (1.0, [0, 0, 2]), (-0.5, [0, 4, 0])];
    let phi = SymbolSpec::polynomial(&sym).unwrap();
    let q = QuadConfig::tensor_gauss(32).unwrap();
    for lambda in [4.0, 5.0, 6.5] {
        let p = WeightParams::new(lambda).unwrap();
        let t = spectrum::spectrum(&phi, p, 6, &q).unwrap();
        for row in &t.rows {
            let want = gamma_closed(&sym, row.idx, lambda);
            assert!((row.gamma.re - want).abs() < 1e-12, "{} at λ = {lambda}", row.idx);
            assert_eq!(row.gamma.im, 0.0);
            assert!(row.quad_error < 1e-12);
        }
    }
}

#[test]
fn vacuum_mean_of_r2_squared() {
    // E_{v_λ}[r2²] = moment(3,3,1)/moment(3,1,1) = (λ−2)/(λ(λ−1))
    let p = WeightParams::new(5.0).unwrap();
    let want = moment(3.0, 3.0, 1.0, 5.0) / moment(3.0, 1.0, 1.0, 5.0);
    assert!((want - 3.0 / 20.0).abs() < 1e-14);
    let (g, _) = spectrum::gamma(
        &SymbolSpec::monomial(0, 2, 0),
        SignatureIndex::new(0, 0, 0).unwrap(),
        p,
        &QuadConfig::tensor_gauss(24).unwrap(),
    )
    .unwrap();
    assert!((g - Complex64::new(want, 0.0)).norm() < 1e-13);
}

#[test]
fn block_norms_in_closed_form() {
    let q = QuadConfig::tensor_gauss(32).unwrap();
    for lambda in [4.0, 5.5] {
        let p = WeightParams::new(lambda).unwrap();
        for idx in bergman_core::isotypic::enumerate_signatures(4) {
            let (got, _) = spectrum::block_norm_sq(idx, p, &q).unwrap();
            let mut want = 0.0;
            for k in 0..=idx.j() {
                let e = [idx.nu1() - idx.j(), idx.j() - k, idx.nu2() + k];
                want += term_weight(idx, k)
                    * moment(
                        f64::from(2 * e[0] + 3),
                        f64::from(2 * e[1] + 1),
                        f64::from(2 * e[2] + 1),
                        lambda,
                    );
            }
            want *= orbit_prefactor(p) / f64::from(idx.n() + 1);
            assert!((got - want).abs() <= 1e-12 * want, "{idx}");
        }
    }
}
