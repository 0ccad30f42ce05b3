use bergman_core::measure::b_poly;
use bergman_core::orbit::reduce;
use bergman_core::spectrum::gamma;
use bergman_core::{Complex64, QuadConfig, SignatureIndex, SymbolSpec, WeightParams};
use bergman_spectra::oracle::*;
use bergman_spectra::stats::{merge_pairwise, Ratio};
use bergman_spectra::{McReport, McRun};
use proptest::prelude::*;

fn idx(a: u32, b: u32, j: u32) -> SignatureIndex {
    SignatureIndex::new(a, b, j).unwrap()
}

fn lam(l: f64) -> WeightParams {
    WeightParams::new(l).unwrap()
}

fn zero_within(r: &McReport, k: f64) -> bool {
    r.within(Complex64::new(0.0, 0.0), k)
}

#[test]
fn rayleigh_matches_quadrature_gamma() {
    let phi = SymbolSpec::from_expr("r1^2 + r3^2").unwrap();
    let p = lam(5.0);
    let (g, _) = gamma(&phi, idx(2, 1, 0), p, &QuadConfig::tensor_gauss(48).unwrap()).unwrap();
    let mc = rayleigh_mc(&phi, idx(2, 1, 0), p, &McRun::new(10_000_000, 2024)).unwrap();
    assert!(mc.within(g, 4.0), "{mc:?} vs {g}");
    assert!(mc.stderr < 2e-3);
}

#[test]
fn vacuum_rayleigh_is_the_mean_of_the_symbol() {
    // E_{v_5}[r2²] = (λ−2)/(λ(λ−1)) = 3/20
    let phi = SymbolSpec::monomial(0, 2, 0);
    let p = lam(5.0);
    let run = McRun::new(1_000_000, 9);
    let ray = rayleigh_mc(&phi, idx(0, 0, 0), p, &run).unwrap();
    let mean = mc_integral(|z| phi.eval(reduce(z).1), p, &run).unwrap();
    let target = Complex64::new(0.15, 0.0);
    assert!(ray.within(target, 4.0), "{ray:?}");
    assert!(mean.within(target, 4.0), "{mean:?}");
}

#[test]
fn cross_inner_products_vanish() {
    let run = McRun::new(1_000_000, 5);
    let r1sq = SymbolSpec::monomial(2, 0, 0);
    let c = cross_inner_mc(&r1sq, idx(1, 0, 0), idx(1, 0, 1), lam(5.0), &run).unwrap();
    assert!(zero_within(&c, 4.0), "{c:?}");
    let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
    let c = cross_inner_mc(&one, idx(1, 0, 0), idx(2, 0, 1), lam(4.0), &run).unwrap();
    assert!(zero_within(&c, 4.0), "{c:?}");
}

#[test]
fn schur_cells() {
    let run = McRun::new(1_000_000, 7);
    let diag = schur_mc((2, 0), 1, 1, &run).unwrap();
    // 1/((n+1)·C(n,j)) with n = 2, j = 1
    assert!(diag.within(Complex64::new(1.0 / 6.0, 0.0), 4.0), "{diag:?}");
    assert!(!diag.within(Complex64::new(2.0 / 3.0, 0.0), 4.0));
    let off = schur_mc((2, 0), 0, 2, &run).unwrap();
    assert!(zero_within(&off, 4.0), "{off:?}");
}

#[test]
fn schur_batch_matches_exact_values() {
    let cells = schur_mc_batch(&[(1, 0), (3, 1), (4, 0)], &McRun::new(200_000, 3)).unwrap();
    assert_eq!(cells.len(), 4 + 9 + 25);
    let misses = cells
        .iter()
        .filter(|c| !c.report.within(Complex64::new(c.expected, 0.0), 4.0))
        .count();
    assert!(misses <= 1, "{misses} misses");
}

#[test]
fn transpose_equivalence() {
    let run = McRun::new(1_000_000, 13);
    let triples = [
        TransposeTriple {
            symbol: SymbolSpec::monomial(0, 0, 2),
            f: idx(1, 0, 1),
            g: idx(1, 0, 1),
        },
        TransposeTriple {
            symbol: SymbolSpec::from_expr("r1^2 + 0.5*r2 - r1*r3").unwrap(),
            f: idx(1, 0, 0),
            g: idx(1, 0, 1),
        },
    ];
    for r in transpose_check_batch(&triples, lam(4.0), &run).unwrap() {
        assert!(zero_within(&r, 4.0), "{r:?}");
    }
}

#[test]
fn decomposition_identities() {
    let q = QuadConfig::tensor_gauss(64).unwrap();
    let run = McRun::new(1_000_000, 17);
    let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
    let b = SymbolSpec::with_sampled_bound("b", true, |r| Complex64::new(b_poly(r), 0.0)).unwrap();

    let d = decomposition_check(&one, lam(4.0), &q, &run).unwrap();
    assert!((d.quadrature.re - 1.0).abs() < 1e-10);
    assert!(d.difference.estimate.norm() <= 4.0 * d.difference.stderr + 1e-6);

    let d = decomposition_check(&SymbolSpec::monomial(2, 0, 0), lam(5.0), &q, &run).unwrap();
    assert!(zero_within(&d.difference, 4.0), "{d:?}");

    // ∫ det(I − ZZ*) dv₄ = c₄/c₅ = 1/6
    let d = decomposition_check(&b, lam(4.0), &q, &run).unwrap();
    assert!((d.quadrature.re - 1.0 / 6.0).abs() < 1e-10);
    assert!(zero_within(&d.difference, 4.0), "{d:?}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let syms = [SymbolSpec::rational(), SymbolSpec::monomial(0, 2, 0)];
    let sigs = [idx(1, 0, 1), idx(2, 0, 1), idx(1, 1, 0)];
    let run = McRun::new(100_000, 99);
    let in_pool = |t: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
        pool.install(|| {
            (
                rayleigh_mc_batch(&syms, &sigs, lam(5.0), &run).unwrap(),
                cross_inner_mc_batch(&syms, &sigs, lam(5.0), &run).unwrap(),
            )
        })
    };
    let one = in_pool(1);
    assert_eq!(one, in_pool(3));
    assert_eq!(one, in_pool(8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reports_are_reproducible(seed in any::<u64>(), n in 1u64..40_000) {
        let phi = SymbolSpec::rational();
        let run = McRun::new(n, seed);
        let a = rayleigh_mc(&phi, idx(1, 0, 1), lam(4.5), &run).unwrap();
        let b = rayleigh_mc(&phi, idx(1, 0, 1), lam(4.5), &run).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.stderr >= 0.0);
        prop_assert_eq!(a.n, n);
        prop_assert_eq!(a.seed, seed);
    }

    #[test]
    fn merge_order_is_fixed(xs in prop::collection::vec((-1.0f64..1.0, 0.1f64..2.0), 1..64), split in 1usize..8) {
        let mut parts = vec![Ratio::default(); split];
        let mut whole = Ratio::default();
        for (i, &(x, y)) in xs.iter().enumerate() {
            parts[i * split / xs.len()].push(Complex64::new(x, 0.0), y);
            whole.push(Complex64::new(x, 0.0), y);
        }
        let m = merge_pairwise(&parts).unwrap();
        prop_assert_eq!(m, merge_pairwise(&parts).unwrap());
        prop_assert!((m.ratio() - whole.ratio()).norm() <= 1e-12);
    }
}
