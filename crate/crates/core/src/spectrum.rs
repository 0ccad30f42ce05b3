//! Eigenvalues of invariant Toeplitz operators on the isotypic blocks.
//!
//! For `p = p_{ν,j}` and an invariant symbol `φ`, the orbit expansion and the
//! Schur relations give
//!
//! ```text
//! ⟨φp, p⟩_λ = 8π⁴c_λ/(n+1) · Σ_{k≤j} C(j,k)²/C(n,k) · ∫_Ω φ·a(r,ν,j,k)·b^{λ−4} dr,
//! ```
//!
//! and `T_φ p = γ·p` with `γ = ⟨φp, p⟩_λ / ⟨p, p⟩_λ`. The prefactor cancels in
//! the ratio and is never formed.
//!
//! All integrals needed by a table are moments
//! `M(e) = ∫_Ω φ·r1^{2e1}·r2^{2e2}·r3^{2e3}·r1³r2r3·b^{λ−4} dr`, accumulated in one
//! pass over the quadrature nodes so `φ` is evaluated once per node.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isotypic::{binomial, enumerate_signatures, SignatureIndex};
use crate::measure::{orbit_jacobian, orbit_prefactor, radial_exponents, WeightParams};
use crate::quadrature::{pairwise_sum_vec, OmegaRule, QuadConfig};
use crate::symbol::SymbolSpec;

/// Largest supported `|ν|`.
pub const DEGREE_CAP: u32 = 12;

/// The guard refuses a block whose denominator is within this factor of its
/// quadrature error.
pub const ILL_CONDITIONED_RATIO: f64 = 10.0;

/// `C(j,k)²/C(n,k)`: the weight of the `k`-th moment in the block integrals.
pub fn term_weight(idx: SignatureIndex, k: u32) -> f64 {
    let c = binomial(idx.j(), k);
    c * c / binomial(idx.n(), k)
}

/// Runs the per-slab work of a quadrature pass. The sequential executor is
/// [`Sequential`]; a parallel one must return the slabs in index order.
pub trait SlabExecutor {
    fn map_slabs(
        &self,
        slabs: usize,
        work: &(dyn Fn(usize) -> Result<Vec<Complex64>> + Sync),
    ) -> Result<Vec<Vec<Complex64>>>;
}

/// Evaluates slabs one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SlabExecutor for Sequential {
    fn map_slabs(
        &self,
        slabs: usize,
        work: &(dyn Fn(usize) -> Result<Vec<Complex64>> + Sync),
    ) -> Result<Vec<Vec<Complex64>>> {
        (0..slabs).map(work).collect()
    }
}

/// The set of exponent triples a computation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPlan {
    exps: Vec<[u32; 3]>,
    slot: BTreeMap<[u32; 3], usize>,
    max_e: [u32; 3],
}

impl MomentPlan {
    pub fn for_signatures(sigs: &[SignatureIndex]) -> Self {
        let mut slot = BTreeMap::new();
        for &idx in sigs {
            for k in 0..=idx.j() {
                slot.entry(radial_exponents(idx, k)).or_insert(0);
            }
        }
        let exps: Vec<[u32; 3]> = slot.keys().copied().collect();
        for (i, e) in exps.iter().enumerate() {
            slot.insert(*e, i);
        }
        let mut max_e = [0; 3];
        for e in &exps {
            for a in 0..3 {
                max_e[a] = max_e[a].max(e[a]);
            }
        }
        Self { exps, slot, max_e }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[[u32; 3]] {
        &self.exps
    }

    /// Moment sums over one slab of `rule`: the `φ`-weighted moments followed
    /// by the unweighted ones (real parts only).
    pub fn slab(&self, symbol: &SymbolSpec, rule: &OmegaRule, s: usize) -> Result<Vec<Complex64>> {
        let m = self.exps.len();
        let mut num = alloc::vec![Complex64::new(0.0, 0.0); m];
        let mut den = alloc::vec![0.0f64; m];
        let mut pw: [Vec<f64>; 3] = core::array::from_fn(|a| alloc::vec![1.0; self.max_e[a] as usize + 1]);
        let mut bad = None;
        rule.for_each_in_slab(s, |r, w| {
            let phi = symbol.eval(r);
            if !(phi.re.is_finite() && phi.im.is_finite()) {
                bad.get_or_insert(r);
                return;
            }
            let sq = [r.r1 * r.r1, r.r2 * r.r2, r.r3 * r.r3];
            for a in 0..3 {
                for e in 1..pw[a].len() {
                    pw[a][e] = pw[a][e - 1] * sq[a];
                }
            }
            let base = w * orbit_jacobian(r);
            for (i, e) in self.exps.iter().enumerate() {
                let t = base * pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize];
                num[i].re += t * phi.re;
                num[i].im += t * phi.im;
                den[i] += t;
            }
        });
        if let Some(r) = bad {
            return Err(Error::NonFiniteIntegrand {
                r1: r.r1,
                r2: r.r2,
                r3: r.r3,
            });
        }
        num.extend(den.into_iter().map(|d| Complex64::new(d, 0.0)));
        Ok(num)
    }
}

/// Moments at the fine resolution with `|fine − coarse|` error estimates.
#[derive(Debug, Clone)]
pub struct Moments {
    plan: MomentPlan,
    num: Vec<Complex64>,
    den: Vec<f64>,
    num_err: Vec<f64>,
    den_err: Vec<f64>,
}

fn pass(plan: &MomentPlan, symbol: &SymbolSpec, rule: &OmegaRule, exec: &dyn SlabExecutor) -> Result<Vec<Complex64>> {
    let parts = exec.map_slabs(rule.slabs(), &|s| plan.slab(symbol, rule, s))?;
    Ok(pairwise_sum_vec(&parts))
}

/// Computes every moment of `plan` at `n` and `2n` nodes per axis.
pub fn compute_moments(
    plan: MomentPlan,
    symbol: &SymbolSpec,
    p: WeightParams,
    q: &QuadConfig,
    exec: &dyn SlabExecutor,
) -> Result<Moments> {
    q.validate()?;
    let coarse = pass(&plan, symbol, &OmegaRule::new(p, q.nodes_per_axis, q), exec)?;
    let fine = pass(&plan, symbol, &OmegaRule::new(p, 2 * q.nodes_per_axis, q), exec)?;
    let m = plan.len();
    let num = fine[..m].to_vec();
    let den: Vec<f64> = fine[m..].iter().map(|d| d.re).collect();
    let num_err = (0..m).map(|i| (fine[i] - coarse[i]).norm()).collect();
    let den_err = (0..m).map(|i| (fine[m + i].re - coarse[m + i].re).abs()).collect();
    Ok(Moments {
        plan,
        num,
        den,
        num_err,
        den_err,
    })
}

/// One `k`-term of a block integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermDiagnostics {
    pub k: u32,
    pub weight: f64,
    pub numerator: Complex64,
    pub numerator_error: f64,
    pub denominator: f64,
    pub denominator_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaDiagnostics {
    pub numerator: Complex64,
    pub numerator_error: f64,
    pub denominator: f64,
    pub denominator_error: f64,
    /// Propagated error of `γ`.
    pub quad_error: f64,
    pub terms: Vec<TermDiagnostics>,
}

impl Moments {
    fn get(&self, e: [u32; 3]) -> Result<usize> {
        self.plan
            .slot
            .get(&e)
            .copied()
            .ok_or(Error::Precondition("moment not in plan"))
    }

    /// `γ(φ, ν, j)` from the tabulated moments.
    pub fn gamma(&self, idx: SignatureIndex, real: bool) -> Result<(Complex64, GammaDiagnostics)> {
        let mut terms = Vec::with_capacity(idx.j() as usize + 1);
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        let (mut num_err, mut den_err) = (0.0, 0.0);
        for k in 0..=idx.j() {
            let i = self.get(radial_exponents(idx, k))?;
            let w = term_weight(idx, k);
            let mut nk = self.num[i];
            if real {
                nk.im = 0.0;
            }
            num += nk * w;
            den += self.den[i] * w;
            num_err += self.num_err[i] * w;
            den_err += self.den_err[i] * w;
            terms.push(TermDiagnostics {
                k,
                weight: w,
                numerator: nk,
                numerator_error: self.num_err[i],
                denominator: self.den[i],
                denominator_error: self.den_err[i],
            });
        }
        if !(den > ILL_CONDITIONED_RATIO * den_err) {
            return Err(Error::IllConditioned {
                idx,
                denominator: den,
                error: den_err,
            });
        }
        let gamma = num / den;
        let quad_error = (num_err + gamma.norm() * den_err) / den;
        Ok((
            gamma,
            GammaDiagnostics {
                numerator: num,
                numerator_error: num_err,
                denominator: den,
                denominator_error: den_err,
                quad_error,
                terms,
            },
        ))
    }
}

/// The eigenvalue of `T_φ` on the block `(ν, j)` of `H²_λ`.
pub fn gamma(
    symbol: &SymbolSpec,
    idx: SignatureIndex,
    p: WeightParams,
    q: &QuadConfig,
) -> Result<(Complex64, GammaDiagnostics)> {
    let plan = MomentPlan::for_signatures(&[idx]);
    compute_moments(plan, symbol, p, q, &Sequential)?.gamma(idx, symbol.is_real())
}

/// `⟨p_{ν,j}, p_{ν,j}⟩_λ` and its quadrature error.
pub fn block_norm_sq(idx: SignatureIndex, p: WeightParams, q: &QuadConfig) -> Result<(f64, f64)> {
    let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
    let (_, d) = gamma(&one, idx, p, q)?;
    let c = orbit_prefactor(p) / f64::from(idx.n() + 1);
    Ok((c * d.denominator, c * d.denominator_error))
}

/// Block norms for many signatures from one quadrature pass.
pub fn block_norms_sq(
    sigs: &[SignatureIndex],
    p: WeightParams,
    q: &QuadConfig,
    exec: &dyn SlabExecutor,
) -> Result<Vec<f64>> {
    let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
    let m = compute_moments(MomentPlan::for_signatures(sigs), &one, p, q, exec)?;
    sigs.iter()
        .map(|&idx| {
            let (_, d) = m.gamma(idx, true)?;
            Ok(orbit_prefactor(p) / f64::from(idx.n() + 1) * d.denominator)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub idx: SignatureIndex,
    pub gamma: Complex64,
    pub numerator: Complex64,
    pub denominator: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub lambda: f64,
    pub symbol: String,
    pub rows: Vec<SpectrumRow>,
}

fn check_degree(max_degree: u32) -> Result<()> {
    if max_degree > DEGREE_CAP {
        return Err(Error::DegreeCap {
            requested: max_degree,
            cap: DEGREE_CAP,
        });
    }
    Ok(())
}

/// All blocks with `|ν| ≤ max_degree`, in the canonical order, with the slab
/// work distributed by `exec`.
pub fn spectrum_with(
    symbol: &SymbolSpec,
    p: WeightParams,
    max_degree: u32,
    q: &QuadConfig,
    exec: &dyn SlabExecutor,
) -> Result<SpectrumTable> {
    check_degree(max_degree)?;
    let sigs = enumerate_signatures(max_degree);
    let m = compute_moments(MomentPlan::for_signatures(&sigs), symbol, p, q, exec)?;
    let rows = sigs
        .iter()
        .map(|&idx| {
            let (gamma, d) = m.gamma(idx, symbol.is_real())?;
            Ok(SpectrumRow {
                idx,
                gamma,
                numerator: d.numerator,
                denominator: d.denominator,
                quad_error: d.quad_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        lambda: p.lambda(),
        symbol: String::from(symbol.name()),
        rows,
    })
}

/// Sequential [`spectrum_with`].
pub fn spectrum(symbol: &SymbolSpec, p: WeightParams, max_degree: u32, q: &QuadConfig) -> Result<SpectrumTable> {
    spectrum_with(symbol, p, max_degree, q, &Sequential)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(a: u32, b: u32, j: u32) -> SignatureIndex {
        SignatureIndex::new(a, b, j).unwrap()
    }

    fn q() -> QuadConfig {
        QuadConfig::tensor_gauss(16).unwrap()
    }

    #[test]
    fn constant_symbol_gives_one() {
        let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
        let p = WeightParams::new(5.0).unwrap();
        let t = spectrum(&one, p, 3, &q()).unwrap();
        assert_eq!(t.rows.len(), 13);
        for row in &t.rows {
            assert_eq!(row.gamma, Complex64::new(1.0, 0.0));
            assert!(row.denominator > 0.0);
        }
    }

    #[test]
    fn constant_symbol_scales() {
        let c = Complex64::new(0.3, -2.0);
        let p = WeightParams::new(4.0).unwrap();
        let (g, _) = gamma(&SymbolSpec::constant(c), idx(2, 1, 1), p, &q()).unwrap();
        assert!((g - c).norm() < 1e-14);
    }

    #[test]
    fn vacuum_block_is_the_mean() {
        // E[r2²] under v_5, from the closed-form Beta moments
        let p = WeightParams::new(5.0).unwrap();
        let (g, _) = gamma(&SymbolSpec::monomial(0, 2, 0), idx(0, 0, 0), p, &q()).unwrap();
        assert!((g.re - 0.15).abs() < 1e-12);
    }

    #[test]
    fn block_norm_of_constants_is_one() {
        for l in [4.0, 5.0, 6.5] {
            let p = WeightParams::new(l).unwrap();
            let (n, e) = block_norm_sq(idx(0, 0, 0), p, &q()).unwrap();
            assert!((n - 1.0).abs() < 1e-12, "λ = {l}");
            assert!(e < 1e-12);
        }
    }

    #[test]
    fn degree_cap() {
        let one = SymbolSpec::constant(Complex64::new(1.0, 0.0));
        let p = WeightParams::new(5.0).unwrap();
        assert_eq!(
            spectrum(&one, p, 13, &q()).unwrap_err(),
            Error::DegreeCap { requested: 13, cap: 12 }
        );
    }

    #[test]
    fn ill_conditioned_guard() {
        let p = WeightParams::new(5.0).unwrap();
        let plan = MomentPlan::for_signatures(&[idx(0, 0, 0)]);
        let mut m = compute_moments(plan, &SymbolSpec::monomial(0, 0, 0), p, &q(), &Sequential).unwrap();
        m.den_err[0] = m.den[0];
        assert!(matches!(m.gamma(idx(0, 0, 0), true), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn term_weights() {
        assert_eq!(term_weight(idx(0, 0, 0), 0), 1.0);
        // j = 2, n = 3: C(2,1)²/C(3,1)
        assert!((term_weight(idx(3, 0, 2), 1) - 4.0 / 3.0).abs() < 1e-15);
    }
}
