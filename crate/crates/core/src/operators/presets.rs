//! Named Hamiltonians. Coordinates are centred on the box, `ξ = x − L/2`.

use std::f64::consts::PI;

use super::hamiltonian::{CoefficientSet, HamiltonianSpec, Potential};
use super::RegulatorFn;
use crate::error::{ChernoffError, Result};
use crate::grid::{sample_real, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Free,
    Harmonic,
    Quartic,
    Anharmonic,
    SturmLiouville,
    MomentumPoly,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Free,
        Preset::Harmonic,
        Preset::Quartic,
        Preset::Anharmonic,
        Preset::SturmLiouville,
        Preset::MomentumPoly,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Free => "free",
            Preset::Harmonic => "harmonic",
            Preset::Quartic => "quartic",
            Preset::Anharmonic => "anharmonic",
            Preset::SturmLiouville => "sturm-liouville",
            Preset::MomentumPoly => "momentum-poly",
        }
    }

    /// True for the `½Δ − V` presets, which accept any dimension.
    pub fn is_multi_d(self) -> bool {
        !matches!(self, Preset::SturmLiouville | Preset::MomentumPoly)
    }

    /// `a` is ignored by the one-dimensional presets.
    pub fn build(self, grid: &Grid, regulator: RegulatorFn, a: f64) -> Result<HamiltonianSpec> {
        let r2 = |x: &[f64]| centred(grid, x).iter().map(|v| v * v).sum::<f64>();
        let potential = |f: &dyn Fn(&[f64]) -> f64| -> Result<HamiltonianSpec> {
            let v = Potential::new(grid, sample_real(f, grid)?)?;
            HamiltonianSpec::multi_d(v, regulator.clone(), a, false)
        };
        match self {
            Preset::Free => HamiltonianSpec::multi_d(Potential::zero(grid), regulator, a, false),
            Preset::Harmonic => potential(&|x| 0.5 * r2(x)),
            Preset::Quartic => potential(&|x| r2(x).powi(2)),
            Preset::Anharmonic => potential(&|x| r2(x) + r2(x).powi(2)),
            Preset::SturmLiouville => {
                require_line(self, grid)?;
                let l = grid.length()[0];
                let p = sample_real(|x| 1.0 + 0.5 * (2.0 * PI * x[0] / l).sin(), grid)?;
                let q = sample_real(r2, grid)?;
                Ok(HamiltonianSpec::one_d(CoefficientSet::new(grid, q, vec![p])?, regulator))
            }
            Preset::MomentumPoly => {
                require_line(self, grid)?;
                momentum_polynomial(grid, &[1.0, 1.0], 1.0, regulator)
            }
        }
    }
}

/// `𝓗 = V(−i∂) + ξ²/(2m)` for an even polynomial `V(p) = Σ_k v_k p^{2k}`,
/// with `v[k-1] = v_k`. Since `p^{2k} = (−1)^k ∂^{2k}`, the constant
/// coefficients are `a_k = (−1)^k v_k`.
pub fn momentum_polynomial(grid: &Grid, v: &[f64], mass: f64, regulator: RegulatorFn) -> Result<HamiltonianSpec> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(ChernoffError::InvalidParameter(format!("mass {mass} must be positive")));
    }
    let n = grid.total_size();
    let higher = v.iter().enumerate().map(|(i, &c)| vec![if i % 2 == 0 { -c } else { c }; n]).collect();
    let a0 = sample_real(|x| centred(grid, x)[0].powi(2) / (2.0 * mass), grid)?;
    Ok(HamiltonianSpec::one_d(CoefficientSet::new(grid, a0, higher)?, regulator))
}

fn centred(grid: &Grid, x: &[f64]) -> Vec<f64> {
    x.iter().zip(grid.length()).map(|(xi, l)| xi - 0.5 * l).collect()
}

fn require_line(p: Preset, grid: &Grid) -> Result<()> {
    if grid.dim() == 1 {
        Ok(())
    } else {
        Err(ChernoffError::InvalidSpec(format!("preset {} is one-dimensional, grid has d = {}", p.name(), grid.dim())))
    }
}
