//! Verification suites run by `bergman-spectra verify`.
//!
//! Statistical checks pass when `|estimate − expected| ≤ 4·stderr` plus the
//! quadrature error of the expected value and an absolute floor of `1e-12`
//! for cells that are exact up to rounding. Each suite tolerates a fixed
//! number of failed cells, stated in its report.

use bergman_core::isotypic::enumerate_signatures;
use bergman_core::measure::{b_poly, c_lambda, orbit_jacobian, orbit_prefactor};
use bergman_core::quadrature::integrate_omega;
use bergman_core::spectrum::{compute_moments, MomentPlan};
use bergman_core::{Complex64, SignatureIndex, SymbolSpec, WeightParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::oracle::{self, TransposeTriple};
use crate::parallel::Rayon;

pub const SIGMA: f64 = 4.0;
pub const ABS_FLOOR: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Extra absolute slack on the Monte Carlo side of the decomposition check.
pub const DECOMPOSITION_SLACK: f64 = 1e-6;
/// Tolerance on quadrature values that have a closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Normalization,
    Schur,
    Rayleigh,
    Cross,
    Transpose,
    Decomposition,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Normalization,
        Suite::Schur,
        Suite::Rayleigh,
        Suite::Cross,
        Suite::Transpose,
        Suite::Decomposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Schur => "schur",
            Suite::Rayleigh => "rayleigh",
            Suite::Cross => "cross",
            Suite::Transpose => "transpose",
            Suite::Decomposition => "decomposition",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub inputs: Value,
    pub estimate: Complex64,
    pub expected: Complex64,
    pub stderr: f64,
    /// Largest accepted `|estimate − expected|`.
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(
        name: &str,
        inputs: Value,
        estimate: Complex64,
        expected: Complex64,
        stderr: f64,
        threshold: f64,
    ) -> Self {
        Self {
            name: name.into(),
            inputs,
            estimate,
            expected,
            stderr,
            threshold,
            pass: (estimate - expected).norm() <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub failures: usize,
    pub allowed_failures: usize,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>, allowed_failures: usize) -> Self {
        let failures = checks.iter().filter(|c| !c.pass).count();
        Self {
            suite,
            checks,
            failures,
            allowed_failures,
            pass: failures <= allowed_failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub format: String,
    pub lambda: f64,
    pub seed: u64,
    pub mc_samples: u64,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

/// Failures tolerated among `cells` independent 4σ checks: 2 in 30.
pub fn multiplicity_slack(cells: usize) -> usize {
    cells / 15
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sig_json(s: SignatureIndex) -> Value {
    json!({ "nu": [s.nu1(), s.nu2()], "j": s.j() })
}

fn symbols(exprs: &[&str]) -> Result<Vec<SymbolSpec>, CliError> {
    exprs.iter().map(|e| Ok(SymbolSpec::from_expr(e)?)).collect()
}

pub const RAYLEIGH_SYMBOLS: [&str; 5] = [
    "r1^2 + r3^2",
    "r2^2",
    "1/(1 + r1^2 + r2^2 + r3^2)",
    "b",
    "r1*r2*r3 + i*r3^2",
];
pub const CROSS_SYMBOLS: [&str; 3] = ["r1^2 + r3^2", "r2^2", "1/(1 + r1^2 + r2^2 + r3^2)"];
pub const CROSS_DEGREE: u32 = 3;
pub const SCHUR_SIGNATURES: [(u32, u32); 8] = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0)];

pub fn rayleigh_signatures() -> [SignatureIndex; 6] {
    [(0, 0, 0), (1, 0, 1), (1, 1, 0), (2, 0, 1), (2, 1, 1), (3, 0, 2)]
        .map(|(a, b, j)| SignatureIndex::new(a, b, j).expect("valid"))
}

pub fn transpose_triples() -> Result<Vec<TransposeTriple>, CliError> {
    let s = |a, b, j| SignatureIndex::new(a, b, j).expect("valid");
    [
        ("1", s(1, 0, 0), s(1, 0, 0)),
        ("r3^2", s(1, 0, 1), s(1, 0, 1)),
        ("r1^2 + 0.5*r2 - r1*r3", s(1, 0, 0), s(1, 0, 1)),
        ("r2^2", s(2, 0, 1), s(2, 0, 1)),
        ("1/(1 + r1^2 + r2^2 + r3^2)", s(2, 1, 0), s(2, 1, 1)),
        ("b + i*r1", s(1, 1, 0), s(2, 0, 2)),
    ]
    .into_iter()
    .map(|(e, f, g)| {
        Ok(TransposeTriple {
            symbol: SymbolSpec::from_expr(e)?,
            f,
            g,
        })
    })
    .collect()
}

fn normalization(cfg: &RunConfig, p: WeightParams) -> Result<SuiteReport, CliError> {
    let q = integrate_omega(orbit_jacobian, p, &cfg.quad)?;
    let k = orbit_prefactor(p);
    let check = Check::new(
        "8 pi^4 c_lambda int r1^3 r2 r3 b^(lambda-4) = 1",
        json!({ "lambda": p.lambda(), "nodes_per_axis": cfg.quad.nodes_per_axis }),
        c(k * q.value),
        c(1.0),
        k * q.error,
        NORMALIZATION_TOL,
    );
    Ok(SuiteReport::new(Suite::Normalization, vec![check], 0))
}

fn schur(cfg: &RunConfig) -> Result<SuiteReport, CliError> {
    let cells = oracle::schur_mc_batch(&SCHUR_SIGNATURES, &cfg.mc_run())?;
    let checks: Vec<Check> = cells
        .iter()
        .map(|cell| {
            let r = &cell.report;
            Check::new(
                "haar p_j conj p_k",
                json!({ "nu": [cell.idx.nu1(), cell.idx.nu2()], "j": cell.idx.j(), "k": cell.k }),
                r.estimate,
                c(cell.expected),
                r.stderr,
                SIGMA * r.stderr + ABS_FLOOR,
            )
        })
        .collect();
    let slack = multiplicity_slack(checks.len());
    Ok(SuiteReport::new(Suite::Schur, checks, slack))
}

fn rayleigh(cfg: &RunConfig, p: WeightParams) -> Result<SuiteReport, CliError> {
    let syms = symbols(&RAYLEIGH_SYMBOLS)?;
    let sigs = rayleigh_signatures();
    let mc = oracle::rayleigh_mc_batch(&syms, &sigs, p, &cfg.mc_run())?;
    let mut checks = Vec::new();
    for (sym, row) in syms.iter().zip(&mc) {
        let m = compute_moments(MomentPlan::for_signatures(&sigs), sym, p, &cfg.quad, &Rayon)?;
        for (&idx, r) in sigs.iter().zip(row) {
            let (g, d) = m.gamma(idx, sym.is_real())?;
            checks.push(Check::new(
                "rayleigh quotient vs gamma",
                json!({ "symbol": sym.name(), "signature": sig_json(idx), "lambda": p.lambda() }),
                r.estimate,
                g,
                r.stderr,
                SIGMA * r.stderr + d.quad_error + ABS_FLOOR,
            ));
        }
    }
    let slack = multiplicity_slack(checks.len());
    Ok(SuiteReport::new(Suite::Rayleigh, checks, slack))
}

fn cross(cfg: &RunConfig, p: WeightParams) -> Result<SuiteReport, CliError> {
    let syms = symbols(&CROSS_SYMBOLS)?;
    let sigs = enumerate_signatures(CROSS_DEGREE);
    let cells = oracle::cross_inner_mc_batch(&syms, &sigs, p, &cfg.mc_run())?;
    let checks: Vec<Check> = cells
        .iter()
        .map(|cell| {
            let r = &cell.report;
            Check::new(
                "normalized cross-block inner product",
                json!({
                    "symbol": syms[cell.symbol].name(),
                    "a": sig_json(cell.a),
                    "b": sig_json(cell.b),
                    "lambda": p.lambda(),
                }),
                r.estimate,
                c(0.0),
                r.stderr,
                SIGMA * r.stderr + ABS_FLOOR,
            )
        })
        .collect();
    let slack = checks.len() / 20;
    Ok(SuiteReport::new(Suite::Cross, checks, slack))
}

fn transpose(cfg: &RunConfig, p: WeightParams) -> Result<SuiteReport, CliError> {
    let triples = transpose_triples()?;
    let reports = oracle::transpose_check_batch(&triples, p, &cfg.mc_run())?;
    let checks: Vec<Check> = triples
        .iter()
        .zip(&reports)
        .map(|(t, r)| {
            Check::new(
                "transpose equivalence",
                json!({ "symbol": t.symbol.name(), "f": sig_json(t.f), "g": sig_json(t.g), "lambda": p.lambda() }),
                r.estimate,
                c(0.0),
                r.stderr,
                SIGMA * r.stderr + ABS_FLOOR,
            )
        })
        .collect();
    let slack = multiplicity_slack(checks.len());
    Ok(SuiteReport::new(Suite::Transpose, checks, slack))
}

fn decomposition(cfg: &RunConfig, p: WeightParams) -> Result<SuiteReport, CliError> {
    let b = SymbolSpec::new("b", 1.0, true, |r| c(b_poly(r)))?;
    let fs = [SymbolSpec::constant(c(1.0)), SymbolSpec::monomial(2, 0, 0), b];
    let reports = oracle::decomposition_check_batch(&fs, p, &cfg.quad, &cfg.mc_run())?;
    let mut checks: Vec<Check> = fs
        .iter()
        .zip(&reports)
        .map(|(f, r)| {
            let d = &r.difference;
            Check::new(
                "monte carlo minus orbit-space quadrature",
                json!({ "f": f.name(), "lambda": p.lambda(), "quadrature": r.quadrature.re }),
                d.estimate,
                c(0.0),
                d.stderr,
                SIGMA * d.stderr + r.quad_error + DECOMPOSITION_SLACK,
            )
        })
        .collect();
    // ∫ det(I − ZZ*) dv_λ = c_λ / c_{λ+1}
    let next = WeightParams::new(p.lambda() + 1.0)?;
    checks.push(Check::new(
        "int det(I - ZZ*) dv_lambda = c_lambda / c_(lambda+1)",
        json!({ "lambda": p.lambda() }),
        reports[2].quadrature,
        c(c_lambda(p) / c_lambda(next)),
        reports[2].quad_error,
        CLOSED_FORM_TOL,
    ));
    Ok(SuiteReport::new(Suite::Decomposition, checks, 0))
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run(cfg: &RunConfig, suite: Suite) -> Result<VerifyReport, CliError> {
    cfg.validate_verify()?;
    let p = cfg.params()?;
    let selected: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let suites = selected
        .into_iter()
        .map(|s| match s {
            Suite::Normalization => normalization(cfg, p),
            Suite::Schur => schur(cfg),
            Suite::Rayleigh => rayleigh(cfg, p),
            Suite::Cross => cross(cfg, p),
            Suite::Transpose => transpose(cfg, p),
            Suite::Decomposition => decomposition(cfg, p),
            Suite::All => unreachable!("expanded above"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VerifyReport {
        format: crate::output::FORMAT_TAG.into(),
        lambda: p.lambda(),
        seed: cfg.seed,
        mc_samples: cfg.mc_samples,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}
