//! Mergeable Monte Carlo accumulators and the reports built from them.

use bergman_core::Complex64;
use serde::{Deserialize, Serialize};

/// An accumulator that can absorb another one built from disjoint samples.
pub trait Merge {
    fn merge(&mut self, other: &Self);
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

/// Merges block accumulators by recursive halving. The rounding pattern
/// depends only on the number of blocks, not on how they were computed.
pub fn merge_pairwise<A: Merge + Clone>(parts: &[A]) -> Option<A> {
    match parts.len() {
        0 => None,
        1 => Some(parts[0].clone()),
        n => {
            let mut left = merge_pairwise(&parts[..n / 2])?;
            let right = merge_pairwise(&parts[n / 2..])?;
            left.merge(&right);
            Some(left)
        }
    }
}

/// Result of one Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: Complex64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl McReport {
    /// Divides estimate and standard error by a positive constant.
    pub fn scaled(self, s: f64) -> Self {
        Self {
            estimate: self.estimate / s,
            stderr: self.stderr / s,
            ..self
        }
    }

    /// `|estimate − target| ≤ k·stderr`.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.estimate - target).norm() <= k * self.stderr
    }
}

/// Sample mean of complex values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Mean {
    n: u64,
    sum: Complex64,
    sum_sq: f64,
}

impl Mean {
    #[inline]
    pub fn push(&mut self, x: Complex64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x.norm_sqr();
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> Complex64 {
        self.sum / self.n as f64
    }

    /// Standard error of the mean, from the unbiased sample variance.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = (self.sum_sq - self.sum.norm_sqr() / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }

    pub fn report(&self, seed: u64) -> McReport {
        McReport {
            estimate: self.mean(),
            stderr: self.stderr(),
            n: self.n,
            seed,
        }
    }
}

impl Merge for Mean {
    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }
}

/// Ratio `E[X]/E[Y]` of a complex and a positive real variable sampled
/// jointly; the error is propagated by the delta method.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ratio {
    n: u64,
    sx: Complex64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: Complex64,
}

impl Ratio {
    #[inline]
    pub fn push(&mut self, x: Complex64, y: f64) {
        self.n += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x.norm_sqr();
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn ratio(&self) -> Complex64 {
        self.sx / self.sy
    }

    /// `sqrt(E|X − R·Y|² / (n − 1)) / |E[Y]|`.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 || self.sy == 0.0 {
            return 0.0;
        }
        let n = self.n as f64;
        let r = self.ratio();
        let resid = self.sxx / n - 2.0 * (r.conj() * self.sxy).re / n + r.norm_sqr() * self.syy / n;
        (resid.max(0.0) / (n - 1.0)).sqrt() / (self.sy / n).abs()
    }

    pub fn report(&self, seed: u64) -> McReport {
        McReport {
            estimate: self.ratio(),
            stderr: self.stderr(),
            n: self.n,
            seed,
        }
    }
}

impl Merge for Ratio {
    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.sx += o.sx;
        self.sy += o.sy;
        self.sxx += o.sxx;
        self.syy += o.syy;
        self.sxy += o.sxy;
    }
}
