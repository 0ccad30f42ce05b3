//! CSV and JSON writers for spectrum tables and verification reports.
//!
//! CSV files start with a comment line naming the schema version, followed
//! by a header row. Floats are written in shortest round-trip form.

use std::io::Write;

use bergman_core::SpectrumTable;
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::verify::VerifyReport;

pub const FORMAT_TAG: &str = "bergman-spectra v1";

#[derive(Serialize)]
struct SpectrumCsvRow {
    nu1: u32,
    nu2: u32,
    j: u32,
    lambda: f64,
    re_gamma: f64,
    im_gamma: f64,
    quad_error: f64,
}

#[derive(Serialize)]
struct CheckCsvRow<'a> {
    suite: &'a str,
    name: &'a str,
    inputs: String,
    re_estimate: f64,
    im_estimate: f64,
    re_expected: f64,
    im_expected: f64,
    stderr: f64,
    threshold: f64,
    pass: bool,
}

fn json_to<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_spectrum<W: Write>(mut w: W, table: &SpectrumTable, format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => json_to(w, table),
        OutputFormat::Csv => {
            writeln!(w, "# {FORMAT_TAG}")?;
            let mut csv = csv::Writer::from_writer(w);
            for row in &table.rows {
                csv.serialize(SpectrumCsvRow {
                    nu1: row.idx.nu1(),
                    nu2: row.idx.nu2(),
                    j: row.idx.j(),
                    lambda: table.lambda,
                    re_gamma: row.gamma.re,
                    im_gamma: row.gamma.im,
                    quad_error: row.quad_error,
                })?;
            }
            csv.flush()?;
            Ok(())
        }
    }
}

pub fn write_verify<W: Write>(mut w: W, report: &VerifyReport, format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => json_to(w, report),
        OutputFormat::Csv => {
            writeln!(
                w,
                "# {FORMAT_TAG} verify lambda={} seed={} mc_samples={}",
                report.lambda, report.seed, report.mc_samples
            )?;
            let mut csv = csv::Writer::from_writer(w);
            for s in &report.suites {
                for c in &s.checks {
                    csv.serialize(CheckCsvRow {
                        suite: s.suite.name(),
                        name: &c.name,
                        inputs: c.inputs.to_string(),
                        re_estimate: c.estimate.re,
                        im_estimate: c.estimate.im,
                        re_expected: c.expected.re,
                        im_expected: c.expected.im,
                        stderr: c.stderr,
                        threshold: c.threshold,
                        pass: c.pass,
                    })?;
                }
            }
            csv.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bergman_core::{QuadConfig, SymbolSpec, WeightParams};

    #[test]
    fn csv_schema() {
        let t = bergman_core::spectrum::spectrum(
            &SymbolSpec::from_expr("1").unwrap(),
            WeightParams::new(5.0).unwrap(),
            1,
            &QuadConfig::tensor_gauss(8).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &t, OutputFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# bergman-spectra v1");
        assert_eq!(lines[1], "nu1,nu2,j,lambda,re_gamma,im_gamma,quad_error");
        assert_eq!(lines.len(), 2 + 3);
        assert!(lines[2].starts_with("0,0,0,5.0,1.0,0.0,"));
    }

    #[test]
    fn json_round_trip() {
        let t = bergman_core::spectrum::spectrum(
            &SymbolSpec::from_expr("r2^2 + i*r1").unwrap(),
            WeightParams::new(4.5).unwrap(),
            2,
            &QuadConfig::tensor_gauss(16).unwrap(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &t, OutputFormat::Json).unwrap();
        let back: SpectrumTable = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, t);
    }
}
