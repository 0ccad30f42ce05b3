//! Bounded `U(2)×T²`-invariant symbols, given as functions of the orbit
//! triple `r`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::measure::{b_poly, WeightParams};
use crate::orbit::RadialTriple;
use crate::quadrature::{OmegaRule, QuadConfig};

/// A symbol evaluator. Must be pure: it is called concurrently.
pub type Evaluator = Arc<dyn Fn(RadialTriple) -> Complex64 + Send + Sync>;

/// Nodes per axis of the grid on which asserted bounds are spot-checked
/// (`22³ = 10648` points of `Ω`).
pub const BOUND_CHECK_NODES: usize = 22;

/// Relative slack on the asserted bound.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Clone)]
pub struct SymbolSpec {
    name: String,
    bound: f64,
    real: bool,
    eval: Evaluator,
}

impl fmt::Debug for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolSpec")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("real", &self.real)
            .finish_non_exhaustive()
    }
}

/// Points of `Ω` used for bound checks: a Gauss grid in the angular
/// coordinates of the quadrature.
fn check_points() -> Vec<RadialTriple> {
    // The weight does not matter here, only the node positions.
    let p = WeightParams::new(5.0).expect("valid");
    let q = QuadConfig::tensor_gauss(BOUND_CHECK_NODES).expect("valid");
    let rule = OmegaRule::new(p, BOUND_CHECK_NODES, &q);
    let mut out = Vec::with_capacity(rule.len());
    for s in 0..rule.slabs() {
        rule.for_each_in_slab(s, |r, _| out.push(r));
    }
    out
}

impl SymbolSpec {
    /// Wraps an evaluator with an asserted bound `sup_Ω |φ| ≤ bound`, checked
    /// on a grid of `Ω`. `real` declares that `φ` takes real values.
    pub fn new<F>(name: impl Into<String>, bound: f64, real: bool, f: F) -> Result<Self>
    where
        F: Fn(RadialTriple) -> Complex64 + Send + Sync + 'static,
    {
        let s = Self {
            name: name.into(),
            bound,
            real,
            eval: Arc::new(f),
        };
        s.check_bound()?;
        Ok(s)
    }

    /// Like [`SymbolSpec::new`] with the bound taken as the largest `|φ|` on
    /// the check grid.
    pub fn with_sampled_bound<F>(name: impl Into<String>, real: bool, f: F) -> Result<Self>
    where
        F: Fn(RadialTriple) -> Complex64 + Send + Sync + 'static,
    {
        let name = name.into();
        let mut bound = 0.0f64;
        for r in check_points() {
            let v = f(r);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::SymbolBound {
                    name,
                    bound: f64::INFINITY,
                    value: f64::NAN,
                });
            }
            bound = bound.max(v.norm());
        }
        Ok(Self {
            name,
            bound,
            real,
            eval: Arc::new(f),
        })
    }

    /// Re-checks the asserted bound on the grid.
    pub fn check_bound(&self) -> Result<()> {
        if !(self.bound.is_finite() && self.bound >= 0.0) {
            return Err(Error::SymbolBound {
                name: self.name.clone(),
                bound: self.bound,
                value: f64::NAN,
            });
        }
        for r in check_points() {
            let v = (self.eval)(r).norm();
            if !(v <= self.bound * (1.0 + BOUND_SLACK)) {
                return Err(Error::SymbolBound {
                    name: self.name.clone(),
                    bound: self.bound,
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// `φ ≡ c`.
    pub fn constant(c: Complex64) -> Self {
        Self {
            name: format!("{c}"),
            bound: c.norm(),
            real: c.im == 0.0,
            eval: Arc::new(move |_| c),
        }
    }

    /// `r1^a·r2^b·r3^c`, bounded by 1 on `Ω`.
    pub fn monomial(a: u32, b: u32, c: u32) -> Self {
        Self::polynomial(&[(1.0, [a, b, c])]).expect("monomials are bounded")
    }

    /// `Σ coeff·r1^a·r2^b·r3^c`; the bound is `Σ |coeff|` since `r ∈ [0, 1)³`.
    pub fn polynomial(terms: &[(f64, [u32; 3])]) -> Result<Self> {
        if terms.iter().any(|t| !t.0.is_finite()) {
            return Err(Error::Precondition("polynomial coefficients must be finite"));
        }
        let terms = terms.to_vec();
        let name = terms
            .iter()
            .map(|(c, e)| format!("{c}*r1^{}*r2^{}*r3^{}", e[0], e[1], e[2]))
            .collect::<Vec<_>>()
            .join(" + ");
        let bound = terms.iter().map(|t| t.0.abs()).sum();
        Ok(Self {
            name,
            bound,
            real: true,
            eval: Arc::new(move |r| {
                let v: f64 = terms
                    .iter()
                    .map(|(c, e)| {
                        c * libm::pow(r.r1, f64::from(e[0]))
                            * libm::pow(r.r2, f64::from(e[1]))
                            * libm::pow(r.r3, f64::from(e[2]))
                    })
                    .sum();
                v.into()
            }),
        })
    }

    /// Indicator of the shell `lo ≤ b(r) < hi`.
    pub fn shell(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Precondition("shell bounds must satisfy lo < hi"));
        }
        Ok(Self {
            name: format!("shell({lo}, {hi})"),
            bound: 1.0,
            real: true,
            eval: Arc::new(move |r| {
                let b = b_poly(r);
                if lo <= b && b < hi {
                    1.0.into()
                } else {
                    0.0.into()
                }
            }),
        })
    }

    /// `1 / (1 + r1² + r2² + r3²)`.
    pub fn rational() -> Self {
        Self {
            name: "1/(1 + r1^2 + r2^2 + r3^2)".to_string(),
            bound: 1.0,
            real: true,
            eval: Arc::new(|r| (1.0 / (1.0 + r.r1 * r.r1 + r.r2 * r.r2 + r.r3 * r.r3)).into()),
        }
    }

    /// A symbol from an expression string (grammar in [`crate::expr`]).
    pub fn from_expr(src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        let real = e.is_real();
        Self::with_sampled_bound(src.trim(), real, move |r| e.eval(r))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    pub fn eval(&self, r: RadialTriple) -> Complex64 {
        (self.eval)(r)
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    /// `conj(φ)`.
    pub fn conj(&self) -> Self {
        let f = self.eval.clone();
        Self {
            name: format!("conj({})", self.name),
            bound: self.bound,
            real: self.real,
            eval: Arc::new(move |r| f(r).conj()),
        }
    }

    /// `a·φ + b·ψ`.
    pub fn linear_combination(a: Complex64, phi: &Self, b: Complex64, psi: &Self) -> Self {
        let (f, g) = (phi.eval.clone(), psi.eval.clone());
        Self {
            name: format!("({a})*({}) + ({b})*({})", phi.name, psi.name),
            bound: a.norm() * phi.bound + b.norm() * psi.bound,
            real: phi.real && psi.real && a.im == 0.0 && b.im == 0.0,
            eval: Arc::new(move |r| a * f(r) + b * g(r)),
        }
    }
}
