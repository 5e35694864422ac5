//! Output directory handling: CSV tables, wavefunction dumps and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use chernoff_core::grid::write_dump;
use chernoff_core::verify::PropertyReport;
use chernoff_core::WaveFunction;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    started: &'a str,
    finished: String,
    status: &'a str,
    error: Option<String>,
    exit_code: i32,
    seed: u64,
    self_adjointness_asserted: bool,
    config: &'a RunConfig,
    outputs: &'a [OutputRecord],
    properties: &'a [PropertyReport],
    measured: &'a Map<String, Value>,
}

/// Collects everything a command writes, then records it in `manifest.json`.
pub struct RunOutputs {
    dir: PathBuf,
    command: String,
    started: String,
    outputs: Vec<OutputRecord>,
    pub properties: Vec<PropertyReport>,
    pub measured: Map<String, Value>,
}

impl RunOutputs {
    pub fn create(dir: &Path, command: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            started: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
            properties: Vec::new(),
            measured: Map::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn outputs(&self) -> &[OutputRecord] {
        &self.outputs
    }

    pub fn measure(&mut self, key: &str, value: impl Into<Value>) {
        self.measured.insert(key.to_string(), value.into());
    }

    /// Finite floats as numbers, anything else as its string form.
    pub fn measure_f64(&mut self, key: &str, value: f64) {
        let v =
            serde_json::Number::from_f64(value).map(Value::Number).unwrap_or_else(|| Value::String(value.to_string()));
        self.measured.insert(key.to_string(), v);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.retain(|o| o.file != name);
        self.outputs.push(OutputRecord { file: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_dump(&mut self, name: &str, wf: &WaveFunction) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write_dump(wf, &mut buf).map_err(|e| CliError::from_core(name, e))?;
        self.write_bytes(name, &buf)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_bytes(name, text.as_bytes())
    }

    /// `properties.csv` plus one `property_<id>.csv` with the details table per report.
    pub fn write_properties(&mut self, reports: &[PropertyReport]) -> Result<(), CliError> {
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.property_id.clone(),
                    r.samples.to_string(),
                    fmt_f64(r.worst_violation),
                    fmt_f64(r.tolerance),
                    r.fitted_order.map(fmt_f64).unwrap_or_default(),
                    r.pass.to_string(),
                ]
            })
            .collect();
        self.write_csv(
            "properties.csv",
            &["property_id", "samples", "worst_violation", "tolerance", "fitted_order", "pass"],
            &rows,
        )?;
        for r in reports {
            let rows: Vec<Vec<String>> = r.details.iter().map(|(k, v)| vec![k.clone(), fmt_f64(*v)]).collect();
            self.write_csv(&format!("property_{}.csv", r.property_id), &["parameter", "value"], &rows)?;
        }
        Ok(())
    }

    /// Writes `manifest.json`; `result` decides the recorded status.
    pub fn finish(&self, cfg: &RunConfig, result: &Result<(), CliError>) -> Result<(), CliError> {
        let (status, error, exit_code) = match result {
            Ok(()) => ("ok", None, 0),
            Err(e) => ("failed", Some(e.to_string()), e.exit_code()),
        };
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            started: &self.started,
            finished: chrono::Utc::now().to_rfc3339(),
            status,
            error,
            exit_code,
            seed: cfg.seed,
            self_adjointness_asserted: cfg.assume_self_adjoint,
            config: cfg,
            outputs: &self.outputs,
            properties: &self.properties,
            measured: &self.measured,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
        fs::write(self.dir.join(MANIFEST_NAME), text)?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
