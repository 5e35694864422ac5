//! Run configuration: a TOML file plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAxis<T> {
    Scalar(T),
    List(Vec<T>),
}

impl<T: Copy> PerAxis<T> {
    pub fn expand(&self, d: usize) -> Vec<T> {
        match self {
            PerAxis::Scalar(v) => vec![*v; d],
            PerAxis::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_points")]
    pub n: PerAxis<usize>,
    #[serde(default = "default_length")]
    pub length: PerAxis<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { d: default_d(), n: default_points(), length: default_length() }
    }
}

fn default_d() -> usize {
    1
}

fn default_points() -> PerAxis<usize> {
    PerAxis::Scalar(256)
}

fn default_length() -> PerAxis<f64> {
    PerAxis::Scalar(32.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegulatorChoice {
    #[default]
    Arctan,
    Sin,
    Tanh,
    Custom,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorConfig {
    #[serde(default)]
    pub kind: RegulatorChoice,
    /// Expression in `z` for `kind = "custom"`.
    pub expr: Option<String>,
    /// Declared `M = sup |w|` for `kind = "custom"`.
    pub bound: Option<f64>,
}

/// Sampled real field of an inline spec. `ξ = x − L/2` is the centred coordinate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldConfig {
    Constant {
        value: f64,
    },
    /// `Σ c_i ξ_0^i`.
    Poly {
        coeffs: Vec<f64>,
    },
    /// `Σ c_i |ξ|^i`.
    Radial {
        coeffs: Vec<f64>,
    },
    /// `offset + amplitude·sin(2π·mode·x_0/L_0)`.
    Sine {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        #[serde(default = "default_mode")]
        mode: i64,
    },
    /// Expression in `x0, x1, …`, `xi0, xi1, …` and `r = |ξ|`.
    Expr {
        expr: String,
    },
}

fn default_mode() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InlineSpec {
    /// `H = ½Δ − V`.
    MultiD { potential: FieldConfig },
    /// `𝓗 = a_0 + Σ_k ∂^k a_k ∂^k`; `coefficients[k-1]` is `a_k`.
    OneD { a0: FieldConfig, coefficients: Vec<FieldConfig> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialState {
    Gaussian {
        #[serde(default = "default_sigma")]
        sigma0: f64,
        /// Defaults to the box centre.
        x0: Option<Vec<f64>>,
        /// Defaults to zero.
        k0: Option<Vec<f64>>,
    },
    Plane {
        kappa: Vec<f64>,
    },
    Eigenstate {
        level: usize,
    },
    File {
        path: PathBuf,
    },
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleChoice {
    #[default]
    Auto,
    Analytic,
    Dense,
    Splitstep,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub spec: Option<InlineSpec>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub regulator: RegulatorConfig,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub j: Option<usize>,
    pub j_list: Option<Vec<usize>>,
    /// Split-step substep counts for `compare`.
    pub steps_list: Option<Vec<usize>>,
    /// Substeps of a split-step reference solution.
    #[serde(default = "default_oracle_steps")]
    pub oracle_steps: usize,
    pub initial: Option<InitialState>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub assume_self_adjoint: bool,
    #[serde(default)]
    pub oracle: OracleChoice,
    pub trials: Option<usize>,
}

fn default_a() -> f64 {
    1.0
}

fn default_t() -> f64 {
    0.5
}

fn default_oracle_steps() -> usize {
    8192
}

pub const DEFAULT_N_LIST: [usize; 5] = [16, 64, 256, 1024, 4096];

impl RunConfig {
    /// Reads `path`, applies `overrides` (`dotted.key=value`, TOML syntax for
    /// the value, bare strings accepted) and checks the result.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut root: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config is not valid TOML: {e}")))?;
        for item in overrides {
            apply_override(&mut root, item)?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(root))
            .map_err(|e| CliError::Usage(format!("config field `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |path: &str, msg: String| Err(CliError::Usage(format!("config field `{path}`: {msg}")));
        match (&self.preset, &self.spec) {
            (Some(_), Some(_)) => return usage("preset", "give either `preset` or `[spec]`, not both".into()),
            (None, None) => return usage("preset", "one of `preset` or `[spec]` is required".into()),
            _ => {}
        }
        if self.grid.d == 0 {
            return usage("grid.d", "must be at least 1".into());
        }
        if self.grid.n.expand(self.grid.d).len() != self.grid.d {
            return usage("grid.n", format!("needs {} entries", self.grid.d));
        }
        if self.grid.length.expand(self.grid.d).len() != self.grid.d {
            return usage("grid.length", format!("needs {} entries", self.grid.d));
        }
        if !(self.a.is_finite() && self.a != 0.0) {
            return usage("a", format!("must be finite and nonzero, got {}", self.a));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return usage("t", format!("must be finite and non-negative, got {}", self.t));
        }
        if self.n == Some(0) {
            return usage("n", "must be at least 1".into());
        }
        if let Some(list) = &self.n_list {
            if list.is_empty() || list.contains(&0) {
                return usage("n_list", "entries must be positive and the list non-empty".into());
            }
        }
        if self.oracle_steps == 0 {
            return usage("oracle_steps", "must be at least 1".into());
        }
        if self.regulator.kind == RegulatorChoice::Custom {
            if self.regulator.expr.is_none() {
                return usage("regulator.expr", "required for a custom regulator".into());
            }
            if self.regulator.bound.is_none() {
                return usage("regulator.bound", "required for a custom regulator".into());
            }
        }
        Ok(())
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn n_list_or_default(&self) -> Vec<usize> {
        self.n_list.clone().unwrap_or_else(|| DEFAULT_N_LIST.to_vec())
    }
}

fn apply_override(root: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) =
        item.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{item}`")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set key `{key}` is malformed")));
    }
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("--set key `{key}`: `{part}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_config() {
        let cfg = RunConfig::parse("preset = \"harmonic\"", &[]).unwrap();
        assert_eq!(cfg.grid.n.expand(1), vec![256]);
        assert_eq!(cfg.t, 0.5);
        assert_eq!(cfg.oracle, OracleChoice::Auto);
    }

    #[test]
    fn overrides_win_and_nest() {
        let cfg = RunConfig::parse(
            "preset = \"free\"\nt = 0.1\n[grid]\nn = 64\n",
            &["t=0.3".into(), "grid.length=[16.0]".into(), "initial.kind=plane".into(), "initial.kappa=[0.5]".into()],
        )
        .unwrap();
        assert_eq!(cfg.t, 0.3);
        assert_eq!(cfg.grid.length.expand(1), vec![16.0]);
        assert!(matches!(cfg.initial, Some(InitialState::Plane { .. })));
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::parse("preset = \"free\"\n[grid]\nn = \"many\"\n", &[]).unwrap_err();
        assert!(err.to_string().contains("grid.n"), "{err}");
        let err = RunConfig::parse("preset = \"free\"\na = 0.0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("`a`"), "{err}");
        let err = RunConfig::parse("preset = \"free\"\nbogus = 1\n", &[]).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        assert!(RunConfig::parse("t = 1.0", &[]).is_err());
        assert!(RunConfig::parse("preset = \"free\"", &["oops".into()]).is_err());
    }

    #[test]
    fn inline_spec_parses() {
        let text = r#"
            [spec]
            family = "one-d"
            a0 = { kind = "poly", coeffs = [0.0, 0.0, 1.0] }
            coefficients = [{ kind = "sine", offset = 1.0, amplitude = 0.5 }]
        "#;
        let cfg = RunConfig::parse(text, &[]).unwrap();
        let Some(InlineSpec::OneD { coefficients, .. }) = cfg.spec else { panic!() };
        assert!(matches!(coefficients[0], FieldConfig::Sine { mode: 1, .. }));
    }

    #[test]
    fn custom_regulator_needs_expr_and_bound() {
        let err = RunConfig::parse("preset = \"free\"\n[regulator]\nkind = \"custom\"\n", &[]).unwrap_err();
        assert!(err.to_string().contains("regulator.expr"));
    }
}
