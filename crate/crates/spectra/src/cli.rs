//! Argument parsing and the subcommands of the `bergman-spectra` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use bergman_core::mat2::Matrix2C;
use bergman_core::orbit::{act, canonical_matrix, reduce};
use bergman_core::{QuadConfig, WeightParams};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, EXIT_VERIFY_FAILED};
use crate::output;
use crate::parallel;
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "bergman-spectra",
    version,
    about = "Spectra of U(2)xT^2-invariant Toeplitz operators on the 2x2 Cartan domain"
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Opts {
    /// Weight parameter, > 3 [default: 5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    /// Largest |nu| in the spectrum table, at most 12 [default: 6]
    #[arg(long, global = true)]
    pub max_degree: Option<u32>,

    /// Symbol expression in r1, r2, r3, b [default: "1"]
    #[arg(long, global = true)]
    pub symbol: Option<String>,

    /// Gauss nodes per axis [default: 64, or 96 above degree 8]
    #[arg(long, global = true)]
    pub quad_nodes: Option<usize>,

    /// Monte Carlo samples per estimate [default: 1000000]
    #[arg(long, global = true)]
    pub mc_samples: Option<u64>,

    /// Seed of all random streams [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file; standard output if omitted
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Allow Monte Carlo estimates for lambda < 4
    #[arg(long, global = true)]
    pub allow_unbounded_weight: bool,

    /// Base configuration (JSON); flags given explicitly override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the resolved configuration (JSON) to PATH and exit
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues gamma(nu, j) of T_phi for all |nu| <= max degree
    Spectrum,
    /// Run Monte Carlo and quadrature verification suites
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Reduce a matrix to its canonical orbit representative
    Reduce {
        /// re z11, im z11, re z12, im z12, re z21, im z21, re z22, im z22
        #[arg(num_args = 8, allow_hyphen_values = true, required = true)]
        entries: Vec<f64>,
    },
}

impl Opts {
    /// The configuration file (or the defaults) with explicit flags applied.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let (mut cfg, from_file) = match &self.config {
            Some(path) => (RunConfig::load(path)?, true),
            None => (RunConfig::default(), false),
        };
        if let Some(l) = self.lambda {
            cfg.lambda = l;
        }
        if let Some(d) = self.max_degree {
            cfg.max_degree = d;
        }
        if let Some(s) = &self.symbol {
            cfg.symbol_expr = s.clone();
        }
        if !from_file {
            if let Ok(p) = WeightParams::new(cfg.lambda) {
                cfg.quad = QuadConfig::default_for(cfg.max_degree, p);
            }
        }
        if let Some(n) = self.quad_nodes {
            cfg.quad.nodes_per_axis = n;
        }
        if let Some(n) = self.mc_samples {
            cfg.mc_samples = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.output {
            cfg.output_path = Some(o.display().to_string());
        }
        if let Some(f) = self.format {
            cfg.output_format = f;
        }
        if self.allow_unbounded_weight {
            cfg.allow_unbounded_weight = true;
        }
        Ok(cfg)
    }
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output_path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Config(format!("cannot create {path}: {e}")))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<i32, CliError> {
    cfg.validate()?;
    let table = parallel::spectrum(&cfg.symbol()?, cfg.params()?, cfg.max_degree, &cfg.quad)?;
    output::write_spectrum(sink(cfg)?, &table, cfg.output_format)?;
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<i32, CliError> {
    let report = verify::run(cfg, suite)?;
    output::write_verify(sink(cfg)?, &report, cfg.output_format)?;
    let mut err = io::stderr().lock();
    for s in &report.suites {
        for c in s.checks.iter().filter(|c| !c.pass) {
            writeln!(
                err,
                "FAIL {} {} {} estimate={} expected={} stderr={} threshold={}",
                s.suite.name(),
                c.name,
                c.inputs,
                c.estimate,
                c.expected,
                c.stderr,
                c.threshold
            )?;
        }
        if !s.pass {
            writeln!(
                err,
                "suite {} failed: {} failures, {} allowed",
                s.suite.name(),
                s.failures,
                s.allowed_failures
            )?;
        }
    }
    Ok(if report.pass { 0 } else { EXIT_VERIFY_FAILED })
}

fn cmd_reduce(cfg: &RunConfig, entries: &[f64]) -> Result<i32, CliError> {
    let v: [f64; 8] = entries
        .try_into()
        .map_err(|_| CliError::Config(format!("reduce needs 8 reals, got {}", entries.len())))?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Core(bergman_core::Error::NonFinite));
    }
    let z = Matrix2C::from_reals(v);
    let (g, r) = reduce(&z);
    let residual = (act(&g, &z) - canonical_matrix(r)).max_norm();
    let a = g.unitary().matrix().to_reals();
    let t = g.torus();
    let mut w = sink(cfg)?;
    match cfg.output_format {
        OutputFormat::Json => {
            let doc = json!({ "r": r.as_array(), "a": a, "t": [t.re, t.im], "residual": residual });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        OutputFormat::Csv => {
            writeln!(w, "# {}", output::FORMAT_TAG)?;
            let mut csv = csv::Writer::from_writer(&mut w);
            let mut header = vec!["r1", "r2", "r3"];
            header.extend([
                "a11_re", "a11_im", "a12_re", "a12_im", "a21_re", "a21_im", "a22_re", "a22_im",
            ]);
            header.extend(["t_re", "t_im", "residual"]);
            csv.write_record(&header)?;
            let row: Vec<String> = r
                .as_array()
                .into_iter()
                .chain(a)
                .chain([t.re, t.im, residual])
                .map(|x| format!("{x:?}"))
                .collect();
            csv.write_record(&row)?;
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(0)
}

/// Moves the numeric operands of `reduce` behind a `--` so that negative
/// values in any notation (`-1e-3`, `-.5`) are not taken for flags.
pub fn normalize_args<I: IntoIterator<Item = String>>(args: I) -> Vec<String> {
    let args: Vec<String> = args.into_iter().collect();
    let Some(at) = args.iter().position(|a| a == "reduce") else {
        return args;
    };
    if args[at..].iter().any(|a| a == "--") {
        return args;
    }
    let (mut head, mut nums) = (args[..=at].to_vec(), Vec::new());
    let mut rest = args[at + 1..].iter();
    while let Some(a) = rest.next() {
        if a.parse::<f64>().is_ok() {
            nums.push(a.clone());
        } else {
            head.push(a.clone());
            // keep a flag's value with the flag
            if a.starts_with("--") && !a.contains('=') && !matches!(a.as_str(), "--allow-unbounded-weight" | "--help") {
                head.extend(rest.next().cloned());
            }
        }
    }
    head.push("--".into());
    head.extend(nums);
    head
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    parallel::init_threads().map_err(CliError::Config)?;
    let cfg = cli.opts.resolve()?;
    if let Some(path) = &cli.opts.dump_config {
        cfg.validate()?;
        std::fs::write(path, cfg.to_json())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        return Ok(0);
    }
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Verify { suite } => cmd_verify(&cfg, *suite),
        Command::Reduce { entries } => cmd_reduce(&cfg, entries),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "x",
            "spectrum",
            "--lambda",
            "3.4",
            "--max-degree",
            "10",
            "--quad-nodes",
            "40",
        ])
        .unwrap();
        let cfg = cli.opts.resolve().unwrap();
        assert_eq!(cfg.lambda, 3.4);
        assert_eq!(cfg.quad.nodes_per_axis, 40);
        assert_eq!(cfg.quad.scheme, bergman_core::QuadScheme::Adaptive);
        let args = [
            "x", "reduce", "--seed", "3", "0.1", "-0.2", "0", "0", "-.5", "0", "0", "-1e-3", "--format", "json",
        ];
        let cli = Cli::try_parse_from(normalize_args(args.map(String::from))).unwrap();
        assert_eq!(cli.opts.seed, Some(3));
        assert_eq!(cli.opts.format, Some(OutputFormat::Json));
        assert!(matches!(cli.command, Command::Reduce { ref entries } if entries[7] == -1e-3));
    }
}
