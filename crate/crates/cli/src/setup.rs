//! Turns a [`RunConfig`] into a grid, a Hamiltonian, an initial state and,
//! when one exists, a reference solution.

use std::f64::consts::PI;
use std::sync::Arc;

use chernoff_core::grid::{read_dump, sample, sample_real};
use chernoff_core::operators::{CoefficientSet, Family, Potential};
use chernoff_core::reference::{
    analytic_free_gaussian, analytic_harmonic_state, dense_oracle, splitstep_evolve, DENSE_SIZE_CAP,
};
use chernoff_core::{Grid, HamiltonianSpec, Preset, RegulatorFn, WaveFunction};
use num_complex::Complex64;

use crate::config::{FieldConfig, InitialState, InlineSpec, OracleChoice, RegulatorChoice, RunConfig};
use crate::error::CliError;
use crate::expr::Expr;

/// Everything a command needs, built once from the config.
pub struct Setup {
    pub grid: Grid,
    pub spec: HamiltonianSpec,
    pub preset: Option<Preset>,
    pub initial: InitialState,
    pub psi0: WaveFunction,
}

/// Reference solution at some time `t`.
#[derive(Clone, Debug)]
pub struct Reference {
    pub wavefunction: WaveFunction,
    pub method: &'static str,
    pub steps: usize,
    pub est_error: f64,
}

impl Setup {
    pub fn build(cfg: &RunConfig) -> Result<Self, CliError> {
        let grid = build_grid(cfg)?;
        let regulator = build_regulator(cfg)?;
        let (spec, preset) = build_spec(cfg, &grid, regulator)?;
        let initial = cfg.initial.clone().unwrap_or(match preset {
            Some(Preset::Harmonic) => InitialState::Eigenstate { level: 0 },
            _ => InitialState::Gaussian { sigma0: 1.0, x0: None, k0: None },
        });
        let psi0 = initial_state(&initial, &grid)?;
        Ok(Self { grid, spec, preset, initial, psi0 })
    }

    /// Closed-form evolution of the initial state, for the free and harmonic presets.
    pub fn analytic(&self, t: f64) -> Result<Option<WaveFunction>, CliError> {
        let a = match &self.spec {
            HamiltonianSpec::MultiD { a, .. } => *a,
            HamiltonianSpec::OneD { .. } => return Ok(None),
        };
        let wf = match (self.preset, &self.initial) {
            (Some(Preset::Free), InitialState::Gaussian { sigma0, x0, k0 }) => {
                let (x0, k0) = gaussian_centre(&self.grid, x0, k0);
                analytic_free_gaussian(*sigma0, &x0, &k0, a, t, &self.grid)
            }
            (Some(Preset::Free), InitialState::Plane { kappa }) => {
                let k2: f64 = kappa.iter().map(|k| k * k).sum();
                Ok(self.psi0.scaled(Complex64::from_polar(1.0, -a * k2 * t / 2.0)))
            }
            (Some(Preset::Harmonic), InitialState::Eigenstate { level }) => {
                analytic_harmonic_state(*level, a * t, &self.grid)
            }
            _ => return Ok(None),
        };
        wf.map(Some).map_err(|e| CliError::from_core("analytic reference", e))
    }

    /// Reference at time `t` per the `oracle` setting; `None` when `auto`
    /// finds nothing applicable.
    pub fn reference(&self, cfg: &RunConfig, t: f64) -> Result<Option<Reference>, CliError> {
        let size = self.grid.total_size();
        let multi = self.spec.family() == Family::MultiD;
        let analytic = |w: WaveFunction| Reference { wavefunction: w, method: "analytic", steps: 0, est_error: 0.0 };
        let dense = || -> Result<Reference, CliError> {
            let r = dense_oracle(&self.spec, t, &self.psi0).map_err(|e| CliError::from_core("dense oracle", e))?;
            Ok(Reference { wavefunction: r.wavefunction, method: "dense", steps: 0, est_error: r.est_error })
        };
        let splitstep = || -> Result<Reference, CliError> {
            let r = splitstep_evolve(&self.spec, t, cfg.oracle_steps, &self.psi0)
                .map_err(|e| CliError::from_core("split-step oracle", e))?;
            Ok(Reference { wavefunction: r.wavefunction, method: "splitstep", steps: r.steps, est_error: r.est_error })
        };
        match cfg.oracle {
            OracleChoice::Analytic => match self.analytic(t)? {
                Some(w) => Ok(Some(analytic(w))),
                None => Err(CliError::Usage(
                    "config field `oracle`: analytic references exist only for the free preset with a gaussian or \
                     plane initial state and the harmonic preset with an eigenstate"
                        .into(),
                )),
            },
            OracleChoice::Dense => dense().map(Some),
            OracleChoice::Splitstep if !multi => Err(CliError::Usage(
                "config field `oracle`: the split-step oracle handles only the multi-d family".into(),
            )),
            OracleChoice::Splitstep => splitstep().map(Some),
            OracleChoice::Auto => {
                if let Some(w) = self.analytic(t)? {
                    Ok(Some(analytic(w)))
                } else if size <= DENSE_SIZE_CAP {
                    dense().map(Some)
                } else if multi {
                    splitstep().map(Some)
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// As [`Setup::reference`], but an unavailable reference is an error.
    pub fn require_reference(&self, cfg: &RunConfig, t: f64) -> Result<Reference, CliError> {
        self.reference(cfg, t)?.ok_or_else(|| {
            CliError::Usage(format!(
                "no reference solution for this spec: the dense oracle is limited to {DENSE_SIZE_CAP} grid points \
                 (this grid has {}) and the split-step oracle handles only the multi-d family",
                self.grid.total_size()
            ))
        })
    }
}

pub fn build_grid(cfg: &RunConfig) -> Result<Grid, CliError> {
    let d = cfg.grid.d;
    Grid::new(&cfg.grid.n.expand(d), &cfg.grid.length.expand(d))
        .map_err(|e| CliError::from_core("config field `grid`", e))
}

pub fn build_regulator(cfg: &RunConfig) -> Result<RegulatorFn, CliError> {
    match cfg.regulator.kind {
        RegulatorChoice::Arctan => Ok(RegulatorFn::arctan()),
        RegulatorChoice::Sin => Ok(RegulatorFn::sin()),
        RegulatorChoice::Tanh => Ok(RegulatorFn::tanh()),
        RegulatorChoice::Custom => {
            let source = cfg.regulator.expr.as_deref().unwrap_or_default();
            let bound = cfg.regulator.bound.unwrap_or(f64::NAN);
            let expr = Arc::new(Expr::parse("regulator.expr", source, &["z"])?);
            RegulatorFn::custom(source, move |z| expr.eval(&[z]), bound)
                .map_err(|e| CliError::Usage(format!("config field `regulator.expr`: {e}")))
        }
    }
}

fn build_spec(
    cfg: &RunConfig,
    grid: &Grid,
    regulator: RegulatorFn,
) -> Result<(HamiltonianSpec, Option<Preset>), CliError> {
    if let Some(name) = &cfg.preset {
        let preset = Preset::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            CliError::Usage(format!("config field `preset`: unknown preset `{name}` (known: {})", known.join(", ")))
        })?;
        let spec = preset.build(grid, regulator, cfg.a).map_err(|e| CliError::from_core("config field `preset`", e))?;
        return Ok((spec, Some(preset)));
    }
    let spec = match cfg.spec.as_ref().expect("validated: preset or spec") {
        InlineSpec::MultiD { potential } => {
            let v = sample_field("spec.potential", potential, grid)?;
            let v = Potential::new(grid, v).map_err(|e| CliError::from_core("config field `spec.potential`", e))?;
            HamiltonianSpec::multi_d(v, regulator, cfg.a, cfg.assume_self_adjoint)
                .map_err(|e| CliError::from_core("config field `spec.potential`", e))?
        }
        InlineSpec::OneD { a0, coefficients } => {
            let a0 = sample_field("spec.a0", a0, grid)?;
            let higher = coefficients
                .iter()
                .enumerate()
                .map(|(i, f)| sample_field(&format!("spec.coefficients[{i}]"), f, grid))
                .collect::<Result<Vec<_>, _>>()?;
            let coeffs = CoefficientSet::new(grid, a0, higher)
                .map_err(|e| CliError::from_core("config field `spec.coefficients`", e))?;
            HamiltonianSpec::one_d(coeffs, regulator)
        }
    };
    Ok((spec, None))
}

fn centred(grid: &Grid, x: &[f64]) -> Vec<f64> {
    x.iter().zip(grid.length()).map(|(x, l)| x - l / 2.0).collect()
}

fn sample_field(path: &str, field: &FieldConfig, grid: &Grid) -> Result<Vec<f64>, CliError> {
    let poly = |c: &[f64], u: f64| c.iter().rev().fold(0.0, |acc, ci| acc * u + ci);
    let fail = |e| CliError::Usage(format!("config field `{path}`: {e}"));
    match field {
        FieldConfig::Constant { value } => sample_real(|_| *value, grid).map_err(fail),
        FieldConfig::Poly { coeffs } => sample_real(|x| poly(coeffs, centred(grid, x)[0]), grid).map_err(fail),
        FieldConfig::Radial { coeffs } => {
            sample_real(|x| poly(coeffs, centred(grid, x).iter().map(|v| v * v).sum::<f64>().sqrt()), grid)
                .map_err(fail)
        }
        FieldConfig::Sine { offset, amplitude, mode } => {
            let l = grid.length()[0];
            sample_real(|x| offset + amplitude * (2.0 * PI * *mode as f64 * x[0] / l).sin(), grid).map_err(fail)
        }
        FieldConfig::Expr { expr } => {
            let d = grid.dim();
            let names: Vec<String> =
                (0..d).map(|m| format!("x{m}")).chain((0..d).map(|m| format!("xi{m}"))).chain(["r".into()]).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let e = Expr::parse(&format!("{path}.expr"), expr, &refs)?;
            sample_real(
                |x| {
                    let xi = centred(grid, x);
                    let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let vals: Vec<f64> = x.iter().chain(&xi).copied().chain([r]).collect();
                    e.eval(&vals)
                },
                grid,
            )
            .map_err(fail)
        }
    }
}

fn gaussian_centre(grid: &Grid, x0: &Option<Vec<f64>>, k0: &Option<Vec<f64>>) -> (Vec<f64>, Vec<f64>) {
    (x0.clone().unwrap_or_else(|| grid.center()), k0.clone().unwrap_or_else(|| vec![0.0; grid.dim()]))
}

pub fn initial_state(initial: &InitialState, grid: &Grid) -> Result<WaveFunction, CliError> {
    let d = grid.dim();
    match initial {
        InitialState::Gaussian { sigma0, x0, k0 } => {
            let (x0, k0) = gaussian_centre(grid, x0, k0);
            analytic_free_gaussian(*sigma0, &x0, &k0, 1.0, 0.0, grid)
                .map_err(|e| CliError::from_core("config field `initial`", e))
        }
        InitialState::Plane { kappa } => {
            if kappa.len() != d {
                return Err(CliError::Usage(format!("config field `initial.kappa`: needs {d} components")));
            }
            for (m, (k, l)) in kappa.iter().zip(grid.length()).enumerate() {
                let modes = k * l / (2.0 * PI);
                if (modes - modes.round()).abs() > 1e-9 {
                    return Err(CliError::Usage(format!(
                        "config field `initial.kappa`: component {m} = {k} is not a multiple of 2π/L = {}",
                        2.0 * PI / l
                    )));
                }
            }
            let amp = 1.0 / grid.length().iter().product::<f64>().sqrt();
            sample(|x| Complex64::from_polar(amp, kappa.iter().zip(x).map(|(k, x)| k * x).sum()), grid)
                .map_err(|e| CliError::from_core("config field `initial`", e))
        }
        InitialState::Eigenstate { level } => {
            analytic_harmonic_state(*level, 0.0, grid).map_err(|e| CliError::from_core("config field `initial`", e))
        }
        InitialState::File { path } => {
            let file = std::fs::File::open(path).map_err(|e| {
                CliError::Usage(format!("config field `initial.path`: cannot open {}: {e}", path.display()))
            })?;
            let wf = read_dump(std::io::BufReader::new(file))
                .map_err(|e| CliError::from_core("config field `initial.path`", e))?;
            if wf.grid() != grid {
                return Err(CliError::Usage(format!(
                    "config field `initial.path`: dump grid {:?} × {:?} differs from the configured grid",
                    wf.grid().n_points(),
                    wf.grid().length()
                )));
            }
            Ok(wf)
        }
    }
}
