use serde::{Deserialize, Serialize};

use super::RegulatorFn;
use crate::error::{ChernoffError, Result};
use crate::grid::Grid;

/// Highest derivative order `K` accepted for one-dimensional expressions.
pub const MAX_ORDER: usize = 8;

/// Sampled real coefficients `a_0, a_1, …, a_K` of `Σ ∂^k a_k ∂^k` on a line.
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    grid: Grid,
    a0: Vec<f64>,
    higher: Vec<Vec<f64>>,
    max_abs: Vec<f64>,
}

impl CoefficientSet {
    /// `higher[k-1]` holds `a_k`.
    pub fn new(grid: &Grid, a0: Vec<f64>, higher: Vec<Vec<f64>>) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(ChernoffError::InvalidSpec(format!(
                "order-2K coefficients need a 1-D grid, got d = {}",
                grid.dim()
            )));
        }
        if higher.is_empty() || higher.len() > MAX_ORDER {
            return Err(ChernoffError::OrderOutOfRange { k: higher.len(), max: MAX_ORDER });
        }
        let n = grid.total_size();
        for (k, field) in std::iter::once(&a0).chain(&higher).enumerate() {
            if field.len() != n {
                return Err(ChernoffError::InvalidSpec(format!("a_{k} has {} samples, grid has {n}", field.len())));
            }
            if let Some(i) = field.iter().position(|v| !v.is_finite()) {
                return Err(ChernoffError::NonFinite { coord: grid.point(i) });
            }
        }
        let max_abs = std::iter::once(&a0).chain(&higher).map(|f| max_abs(f)).collect();
        Ok(Self { grid: grid.clone(), a0, higher, max_abs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.higher.len()
    }

    pub fn a0(&self) -> &[f64] {
        &self.a0
    }

    /// Coefficient `a_k` for `k = 0..=K`.
    pub fn coefficient(&self, k: usize) -> &[f64] {
        if k == 0 {
            &self.a0
        } else {
            &self.higher[k - 1]
        }
    }

    /// `max |a_k|` over the grid, `k = 0..=K`.
    pub fn max_abs(&self, k: usize) -> f64 {
        self.max_abs[k]
    }
}

/// Sampled potential `V` with the pointwise sign recorded.
#[derive(Clone, Debug)]
pub struct Potential {
    grid: Grid,
    values: Vec<f64>,
    nonneg: bool,
}

impl Potential {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.total_size() {
            return Err(ChernoffError::LengthMismatch { got: values.len(), expected: grid.total_size() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ChernoffError::NonFinite { coord: grid.point(i) });
        }
        let nonneg = values.iter().all(|&v| v >= 0.0);
        Ok(Self { grid: grid.clone(), values, nonneg })
    }

    pub fn zero(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.total_size()], nonneg: true }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }
}

/// The two Hamiltonian families handled by the propagators.
///
/// `OneD` is `𝓗 = a_0 + Σ_{k=1}^K ∂^k a_k ∂^k`, evolved as `ψ' = −i𝓗ψ`.
/// `MultiD` is `H = ½Δ − V`, evolved as `ψ' = i·a·Hψ`.
#[derive(Clone, Debug)]
pub enum HamiltonianSpec {
    OneD {
        coeffs: CoefficientSet,
        regulator: RegulatorFn,
    },
    MultiD {
        potential: Potential,
        regulator: RegulatorFn,
        a: f64,
        /// Essential self-adjointness asserted by the caller instead of `V ≥ 0`.
        assumed_self_adjoint: bool,
    },
}

impl HamiltonianSpec {
    pub fn one_d(coeffs: CoefficientSet, regulator: RegulatorFn) -> Self {
        Self::OneD { coeffs, regulator }
    }

    /// Requires `a ≠ 0`, and `V ≥ 0` unless `assume_self_adjoint` is set.
    pub fn multi_d(potential: Potential, regulator: RegulatorFn, a: f64, assume_self_adjoint: bool) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(ChernoffError::InvalidSpec(format!("parameter a = {a} must be finite and nonzero")));
        }
        if !potential.is_nonneg() && !assume_self_adjoint {
            return Err(ChernoffError::InvalidSpec(
                "potential takes negative values; V >= 0 is required unless self-adjointness is asserted".into(),
            ));
        }
        let assumed_self_adjoint = assume_self_adjoint && !potential.is_nonneg();
        Ok(Self::MultiD { potential, regulator, a, assumed_self_adjoint })
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Self::OneD { coeffs, .. } => coeffs.grid(),
            Self::MultiD { potential, .. } => potential.grid(),
        }
    }

    pub fn regulator(&self) -> &RegulatorFn {
        match self {
            Self::OneD { regulator, .. } | Self::MultiD { regulator, .. } => regulator,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::OneD { .. } => Family::OneD,
            Self::MultiD { .. } => Family::MultiD,
        }
    }

    /// Scalar `c` of the evolution `ψ' = c·Xψ` for the Chernoff generator `X`.
    pub fn evolution_coefficient(&self) -> num_complex::Complex64 {
        match self {
            Self::OneD { .. } => num_complex::Complex64::new(0.0, -1.0),
            Self::MultiD { a, .. } => num_complex::Complex64::new(0.0, *a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    OneD,
    MultiD,
}

/// Deliberate defects injected into the Chernoff family to exercise the verifier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    #[default]
    None,
    /// Uses `t^{1/k}` instead of `t^{1/2k}` (and `√d·t` instead of `√d·√t`).
    WrongRootExponent,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
