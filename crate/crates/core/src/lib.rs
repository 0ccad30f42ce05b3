//! Spectra of Toeplitz operators with `U(2)×T²`-invariant symbols on the
//! weighted Bergman spaces of the Cartan domain
//! `D = { Z ∈ M₂ₓ₂(ℂ) : ZZ* < I }`.
//!
//! An invariant symbol is a function of the canonical orbit triple
//! `r = (r1, r2, r3)` produced by [`orbit::reduce`]. The Bergman space
//! `H²_λ(D)` splits into multiplicity-free blocks labelled by a
//! [`SignatureIndex`] `(ν, j)`, and a Toeplitz operator with invariant symbol
//! acts on each block as a scalar. [`spectrum::gamma`] evaluates that scalar
//! as a ratio of weighted integrals over the orbit space `Ω`, computed with a
//! tensor Gauss–Legendre rule ([`quadrature`]).
//!
//! The crate is `no_std` (with `alloc`). Monte Carlo samplers take any
//! [`rand::Rng`]; the parallel oracles, file formats and CLI live in the
//! `bergman-spectra` crate.
//!
//! ```
//! use bergman_core::{spectrum, QuadConfig, SignatureIndex, SymbolSpec, WeightParams};
//!
//! let phi = SymbolSpec::from_expr("r2^2").unwrap();
//! let params = WeightParams::new(5.0).unwrap();
//! let quad = QuadConfig::tensor_gauss(24).unwrap();
//! let idx = SignatureIndex::new(0, 0, 0).unwrap();
//! let (gamma, _) = spectrum::gamma(&phi, idx, params, &quad).unwrap();
//! // On constants the operator is the v_λ-mean of the symbol.
//! assert!((gamma.re - 0.15).abs() < 1e-12);
//! ```

#![no_std]
// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod expr;
pub mod isotypic;
pub mod mat2;
pub mod measure;
pub mod orbit;
pub mod quadrature;
pub mod sample;
pub mod spectrum;
pub mod symbol;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use isotypic::SignatureIndex;
pub use mat2::{DomainPoint, Matrix2C, UnitaryMatrix2};
pub use measure::WeightParams;
pub use orbit::{GroupElementU2T, RadialTriple};
pub use quadrature::{QuadConfig, QuadEstimate, QuadScheme};
pub use spectrum::{SpectrumRow, SpectrumTable};
pub use symbol::SymbolSpec;
