//! Monte Carlo oracles for the spectral formula, the measure decomposition
//! and the symmetry properties of the blocks.
//!
//! Every estimate draws uniform points of `D` by rejection and reweights them
//! into `v_λ` samples. Batch variants evaluate many integrands on one shared
//! sample set; the single-cell functions are thin wrappers over them, so a
//! cell reports the same bits whether it was computed alone or in a batch.

use bergman_core::isotypic::{hw_poly, schur_norm};
use bergman_core::measure::{check_mc_lambda, orbit_jacobian, orbit_prefactor, vlambda_weight};
use bergman_core::orbit::reduce;
use bergman_core::quadrature::integrate_omega;
use bergman_core::sample::{haar_unitary, sample_domain_uniform};
use bergman_core::spectrum::block_norms_sq;
use bergman_core::{Complex64, Error, Matrix2C, QuadConfig, Result, SignatureIndex, SymbolSpec, WeightParams};
use rand_chacha::ChaCha8Rng;

use crate::parallel::{run_blocks, Rayon};
use crate::stats::{McReport, Mean, Ratio};

/// Stream tags keeping the oracles' random streams disjoint.
pub mod tag {
    pub const RAYLEIGH: u64 = 1;
    pub const CROSS: u64 = 2;
    pub const TRANSPOSE: u64 = 3;
    pub const DECOMPOSITION: u64 = 4;
    pub const SCHUR: u64 = 5;
    pub const MC_INTEGRAL: u64 = 6;
}

/// Sample count, seed and the opt-in for `λ < 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McRun {
    pub n: u64,
    pub seed: u64,
    pub allow_unbounded: bool,
}

impl McRun {
    pub fn new(n: u64, seed: u64) -> Self {
        Self {
            n,
            seed,
            allow_unbounded: false,
        }
    }

    fn check(&self, p: Option<WeightParams>) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptySample);
        }
        match p {
            Some(p) => check_mc_lambda(p, self.allow_unbounded),
            None => Ok(()),
        }
    }
}

/// Calls `visit(Z, w)` for `count` samples, `w` being the `v_λ` weight of a
/// uniform point `Z`.
#[inline]
fn for_each_weighted(rng: &mut ChaCha8Rng, count: u64, p: WeightParams, mut visit: impl FnMut(&Matrix2C, f64)) {
    for _ in 0..count {
        let z = sample_domain_uniform(rng);
        visit(z.matrix(), vlambda_weight(p, z.matrix()));
    }
}

fn run_means<F>(cells: usize, run: &McRun, tag: u64, fill: F) -> Result<Vec<McReport>>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [Mean]) + Sync,
{
    let acc = run_blocks(run.n, run.seed, tag, |rng, count| {
        let mut acc = vec![Mean::default(); cells];
        fill(rng, count, &mut acc);
        acc
    })
    .ok_or(Error::EmptySample)?;
    Ok(acc.iter().map(|m| m.report(run.seed)).collect())
}

/// `∫_D f dv_λ` on the worker pool.
pub fn mc_integral<F>(f: F, p: WeightParams, run: &McRun) -> Result<McReport>
where
    F: Fn(&Matrix2C) -> Complex64 + Sync,
{
    run.check(Some(p))?;
    let r = run_means(1, run, tag::MC_INTEGRAL, |rng, count, acc| {
        for_each_weighted(rng, count, p, |z, w| acc[0].push(f(z) * w));
    })?;
    Ok(r[0])
}

/// Rayleigh quotients `⟨φ p, p⟩_λ / ⟨p, p⟩_λ` for every symbol and signature
/// from one sample set; `out[s][i]` belongs to `symbols[s]` and `sigs[i]`.
///
/// Numerator and denominator share each sample, so `φ ≡ 1` gives exactly 1
/// with zero error.
pub fn rayleigh_mc_batch(
    symbols: &[SymbolSpec],
    sigs: &[SignatureIndex],
    p: WeightParams,
    run: &McRun,
) -> Result<Vec<Vec<McReport>>> {
    run.check(Some(p))?;
    let (ns, ni) = (symbols.len(), sigs.len());
    let acc = run_blocks(run.n, run.seed, tag::RAYLEIGH, |rng, count| {
        let mut acc = vec![Ratio::default(); ns * ni];
        let mut phi = vec![Complex64::new(0.0, 0.0); ns];
        for_each_weighted(rng, count, p, |z, w| {
            let r = reduce(z).1;
            for (v, s) in phi.iter_mut().zip(symbols) {
                *v = s.eval(r);
            }
            for (i, &idx) in sigs.iter().enumerate() {
                let y = hw_poly(idx, z).norm_sqr() * w;
                for (s, v) in phi.iter().enumerate() {
                    acc[s * ni + i].push(v * y, y);
                }
            }
        });
        acc
    })
    .ok_or(Error::EmptySample)?;
    Ok(acc
        .chunks(ni.max(1))
        .take(ns)
        .map(|c| c.iter().map(|a| a.report(run.seed)).collect())
        .collect())
}

/// The eigenvalue of `T_φ` on the block `idx`, estimated by Monte Carlo.
pub fn rayleigh_mc(symbol: &SymbolSpec, idx: SignatureIndex, p: WeightParams, run: &McRun) -> Result<McReport> {
    Ok(rayleigh_mc_batch(core::slice::from_ref(symbol), &[idx], p, run)?[0][0])
}

fn block_norms(sigs: &[SignatureIndex], p: WeightParams) -> Result<Vec<f64>> {
    let degree = sigs.iter().map(|s| s.degree()).max().unwrap_or(0);
    block_norms_sq(sigs, p, &QuadConfig::default_for(degree, p), &Rayon)
}

/// One cell of a cross-block batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCell {
    pub symbol: usize,
    pub a: SignatureIndex,
    pub b: SignatureIndex,
    pub report: McReport,
}

/// `⟨φ p_A, p_B⟩_λ / √(⟨p_A, p_A⟩⟨p_B, p_B⟩)` for every symbol and every
/// ordered pair `A < B` of distinct signatures in `sigs`. The block norms come
/// from quadrature.
pub fn cross_inner_mc_batch(
    symbols: &[SymbolSpec],
    sigs: &[SignatureIndex],
    p: WeightParams,
    run: &McRun,
) -> Result<Vec<CrossCell>> {
    run.check(Some(p))?;
    let mut pairs = Vec::new();
    for (i, a) in sigs.iter().enumerate() {
        for (k, b) in sigs.iter().enumerate().skip(i + 1) {
            if a == b {
                return Err(Error::Precondition("cross inner products need distinct signatures"));
            }
            pairs.push((i, k));
        }
    }
    let norms = block_norms(sigs, p)?;
    let np = pairs.len();
    let reports = run_means(symbols.len() * np, run, tag::CROSS, |rng, count, acc| {
        let mut pv = vec![Complex64::new(0.0, 0.0); sigs.len()];
        for_each_weighted(rng, count, p, |z, w| {
            let r = reduce(z).1;
            for (v, &idx) in pv.iter_mut().zip(sigs) {
                *v = hw_poly(idx, z);
            }
            for (s, sym) in symbols.iter().enumerate() {
                let phi = sym.eval(r) * w;
                for (c, &(i, k)) in pairs.iter().enumerate() {
                    acc[s * np + c].push(phi * pv[i] * pv[k].conj());
                }
            }
        });
    })?;
    Ok(reports
        .into_iter()
        .enumerate()
        .map(|(c, report)| {
            let (i, k) = pairs[c % np];
            CrossCell {
                symbol: c / np,
                a: sigs[i],
                b: sigs[k],
                report: report.scaled((norms[i] * norms[k]).sqrt()),
            }
        })
        .collect())
}

/// Normalized `⟨φ p_A, p_B⟩_λ` for `A ≠ B`.
pub fn cross_inner_mc(
    symbol: &SymbolSpec,
    a: SignatureIndex,
    b: SignatureIndex,
    p: WeightParams,
    run: &McRun,
) -> Result<McReport> {
    if a == b {
        return Err(Error::Precondition("cross inner products need distinct signatures"));
    }
    let cells = cross_inner_mc_batch(core::slice::from_ref(symbol), &[a, b], p, run)?;
    Ok(cells[0].report)
}

/// One Haar cell: `E[p_{ν,j}(A)·conj(p_{ν,k}(A))]` against its exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurCell {
    pub idx: SignatureIndex,
    pub k: u32,
    pub expected: f64,
    pub report: McReport,
}

/// All `(j, k)` cells for each signature pair `ν` in `nus` from one Haar
/// sample set.
pub fn schur_mc_batch(nus: &[(u32, u32)], run: &McRun) -> Result<Vec<SchurCell>> {
    run.check(None)?;
    let mut cells = Vec::new();
    let mut rows = Vec::new();
    for &(nu1, nu2) in nus {
        let first = cells.len();
        let n = nu1.checked_sub(nu2).ok_or(Error::InvalidSignature { nu1, nu2, j: 0 })?;
        for j in 0..=n {
            let idx = SignatureIndex::new(nu1, nu2, j)?;
            for k in 0..=n {
                cells.push((idx, k, schur_norm(idx, k)?));
            }
        }
        rows.push((first, nu1, nu2, n));
    }
    let reports = run_means(cells.len(), run, tag::SCHUR, |rng, count, acc| {
        let mut pv = Vec::new();
        for _ in 0..count {
            let a = haar_unitary(rng);
            for &(first, nu1, nu2, n) in &rows {
                pv.clear();
                pv.extend((0..=n).map(|j| {
                    let idx = SignatureIndex::new(nu1, nu2, j).expect("validated above");
                    hw_poly(idx, a.matrix())
                }));
                let m = n as usize + 1;
                for j in 0..m {
                    for k in 0..m {
                        acc[first + j * m + k].push(pv[j] * pv[k].conj());
                    }
                }
            }
        }
    })?;
    Ok(cells
        .into_iter()
        .zip(reports)
        .map(|((idx, k, expected), report)| SchurCell {
            idx,
            k,
            expected,
            report,
        })
        .collect())
}

/// Haar estimate of `∫_{U(2)} p_{ν,j}(A)·conj(p_{ν,k}(A)) dA`.
pub fn schur_mc(nu: (u32, u32), j: u32, k: u32, run: &McRun) -> Result<McReport> {
    let idx = SignatureIndex::new(nu.0, nu.1, j)?;
    if k > idx.n() {
        return Err(Error::IndexOutOfRange { index: k, max: idx.n() });
    }
    let cells = schur_mc_batch(&[nu], run)?;
    Ok(cells
        .iter()
        .find(|c| c.idx == idx && c.k == k)
        .expect("cell present")
        .report)
}

/// A symbol with two highest weight vectors `f = p_f`, `g = p_g`.
#[derive(Debug, Clone)]
pub struct TransposeTriple {
    pub symbol: SymbolSpec,
    pub f: SignatureIndex,
    pub g: SignatureIndex,
}

/// `⟨(φ∘F⁻¹)(f∘F⁻¹), g∘F⁻¹⟩_λ − ⟨φ f, g⟩_λ` with `F(Z) = Zᵀ`, normalized by
/// `√(⟨f, f⟩⟨g, g⟩)`, for each triple.
///
/// Both integrands are evaluated on the same sample `Z` (one of them through
/// `Zᵀ`), and `v_λ` is transpose invariant, so the weight is shared. The
/// symbol on the transposed side is `φ(reduce(Zᵀ))`.
pub fn transpose_check_batch(triples: &[TransposeTriple], p: WeightParams, run: &McRun) -> Result<Vec<McReport>> {
    run.check(Some(p))?;
    let mut sigs: Vec<SignatureIndex> = triples.iter().flat_map(|t| [t.f, t.g]).collect();
    sigs.sort();
    sigs.dedup();
    let norms = block_norms(&sigs, p)?;
    let norm = |s: SignatureIndex| norms[sigs.binary_search(&s).expect("present")];
    let reports = run_means(triples.len(), run, tag::TRANSPOSE, |rng, count, acc| {
        for_each_weighted(rng, count, p, |z, w| {
            let zt = z.transpose();
            let (r, rt) = (reduce(z).1, reduce(&zt).1);
            for (t, m) in triples.iter().zip(acc.iter_mut()) {
                let h = t.symbol.eval(r) * hw_poly(t.f, z) * hw_poly(t.g, z).conj();
                let ht = t.symbol.eval(rt) * hw_poly(t.f, &zt) * hw_poly(t.g, &zt).conj();
                m.push((ht - h) * w);
            }
        });
    })?;
    Ok(reports
        .into_iter()
        .zip(triples)
        .map(|(rep, t)| rep.scaled((norm(t.f) * norm(t.g)).sqrt()))
        .collect())
}

/// [`transpose_check_batch`] for a single triple.
pub fn transpose_check(triple: &TransposeTriple, p: WeightParams, run: &McRun) -> Result<McReport> {
    Ok(transpose_check_batch(core::slice::from_ref(triple), p, run)?[0])
}

/// The two sides of the orbit-space decomposition of `∫_D f dv_λ` for a
/// radial `f`, and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// Monte Carlo minus quadrature; its `stderr` is that of the Monte Carlo side.
    pub difference: McReport,
    pub monte_carlo: Complex64,
    pub quadrature: Complex64,
    pub quad_error: f64,
}

/// Compares `∫_D f(r(Z)) dv_λ` by Monte Carlo with
/// `8π⁴c_λ ∫_Ω f·r1³r2r3·b^{λ−4} dr` by quadrature, for each `f`.
pub fn decomposition_check_batch(
    fs: &[SymbolSpec],
    p: WeightParams,
    q: &QuadConfig,
    run: &McRun,
) -> Result<Vec<DecompositionReport>> {
    run.check(Some(p))?;
    let c = orbit_prefactor(p);
    let quad = fs
        .iter()
        .map(|f| {
            let re = integrate_omega(|r| f.eval(r).re * orbit_jacobian(r), p, q)?;
            let im = integrate_omega(|r| f.eval(r).im * orbit_jacobian(r), p, q)?;
            Ok((Complex64::new(re.value, im.value) * c, c * (re.error + im.error)))
        })
        .collect::<Result<Vec<_>>>()?;
    let reports = run_means(fs.len(), run, tag::DECOMPOSITION, |rng, count, acc| {
        for_each_weighted(rng, count, p, |z, w| {
            let r = reduce(z).1;
            for (f, m) in fs.iter().zip(acc.iter_mut()) {
                m.push(f.eval(r) * w);
            }
        });
    })?;
    Ok(reports
        .into_iter()
        .zip(quad)
        .map(|(mc, (qv, qe))| DecompositionReport {
            difference: McReport {
                estimate: mc.estimate - qv,
                ..mc
            },
            monte_carlo: mc.estimate,
            quadrature: qv,
            quad_error: qe,
        })
        .collect())
}

/// [`decomposition_check_batch`] for a single radial function.
pub fn decomposition_check(
    f: &SymbolSpec,
    p: WeightParams,
    q: &QuadConfig,
    run: &McRun,
) -> Result<DecompositionReport> {
    Ok(decomposition_check_batch(core::slice::from_ref(f), p, q, run)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(a: u32, b: u32, j: u32) -> SignatureIndex {
        SignatureIndex::new(a, b, j).unwrap()
    }

    fn lam(l: f64) -> WeightParams {
        WeightParams::new(l).unwrap()
    }

    #[test]
    fn constant_symbol_is_exact() {
        let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
        let r = rayleigh_mc(&one, idx(2, 1, 1), lam(5.0), &McRun::new(5000, 3)).unwrap();
        assert_eq!(r.estimate, Complex64::new(1.0, 0.0));
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn trivial_schur_and_transpose_cells() {
        let s = schur_mc((0, 0), 0, 0, &McRun::new(1000, 1)).unwrap();
        assert_eq!((s.estimate, s.stderr), (Complex64::new(1.0, 0.0), 0.0));
        let t = TransposeTriple {
            symbol: SymbolSpec::constant(Complex64::new(1.0, 0.0)),
            f: idx(1, 0, 0),
            g: idx(1, 0, 0),
        };
        let r = transpose_check(&t, lam(4.0), &McRun::new(1000, 1)).unwrap();
        assert_eq!(r.estimate, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn preconditions() {
        let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
        let run = McRun::new(100, 1);
        assert!(matches!(
            cross_inner_mc(&one, idx(1, 0, 0), idx(1, 0, 0), lam(5.0), &run),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            rayleigh_mc(&one, idx(0, 0, 0), lam(3.5), &run),
            Err(Error::UnboundedWeight(_))
        ));
        let mut open = run;
        open.allow_unbounded = true;
        assert!(rayleigh_mc(&one, idx(0, 0, 0), lam(3.5), &open).is_ok());
        assert!(matches!(
            rayleigh_mc(&one, idx(0, 0, 0), lam(5.0), &McRun::new(0, 1)),
            Err(Error::EmptySample)
        ));
        assert!(schur_mc((2, 0), 0, 3, &run).is_err());
    }

    #[test]
    fn single_cells_match_batches_bitwise() {
        let syms = [SymbolSpec::monomial(2, 0, 0), SymbolSpec::rational()];
        let sigs = [idx(1, 0, 0), idx(1, 0, 1), idx(2, 1, 0)];
        let run = McRun::new(20_000, 11);
        let batch = rayleigh_mc_batch(&syms, &sigs, lam(5.0), &run).unwrap();
        assert_eq!(batch[1][2], rayleigh_mc(&syms[1], sigs[2], lam(5.0), &run).unwrap());
    }
}
