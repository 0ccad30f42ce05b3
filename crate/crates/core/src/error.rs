use alloc::string::String;

use crate::isotypic::SignatureIndex;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("weight parameter must satisfy lambda > 3, got {0}")]
    InvalidLambda(f64),

    #[error("invalid signature index nu = ({nu1}, {nu2}), j = {j}: need nu1 >= nu2 >= 0 and 0 <= j <= nu1 - nu2")]
    InvalidSignature { nu1: u32, nu2: u32, j: u32 },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: u32, max: u32 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadConfig(&'static str),

    #[error("integrand is not finite at r = ({r1}, {r2}, {r3})")]
    NonFiniteIntegrand { r1: f64, r2: f64, r3: f64 },

    #[error("ill-conditioned block {idx}: denominator {denominator:e} is within 10x of its error estimate {error:e}")]
    IllConditioned {
        idx: SignatureIndex,
        denominator: f64,
        error: f64,
    },

    #[error("symbol '{name}' exceeds its bound {bound} (|phi| = {value})")]
    SymbolBound { name: String, bound: f64, value: f64 },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not in the domain ZZ* < I")]
    NotInDomain,

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("sample count must be positive")]
    EmptySample,

    #[error("weight det(I - ZZ*)^(lambda - 4) is unbounded for lambda = {0} < 4; Monte Carlo estimates need an explicit opt-in")]
    UnboundedWeight(f64),

    #[error("max degree {requested} exceeds the cap {cap}")]
    DegreeCap { requested: u32, cap: u32 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Precondition(&'static str),
}
