use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ChernoffError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegulatorKind {
    Arctan,
    Sin,
    Tanh,
    Custom,
}

/// Bounded continuous `w` with `w(0) = 0` and `w'(0) = 1`.
///
/// `w(t·a_0(x))` replaces the unbounded multiplier `t·a_0(x)` while keeping
/// the first-order behaviour at `t = 0`. `bound` is `M = sup |w|`.
#[derive(Clone)]
pub struct RegulatorFn {
    kind: RegulatorKind,
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
}

impl RegulatorFn {
    pub fn arctan() -> Self {
        Self::named(RegulatorKind::Arctan, "arctan", f64::atan, FRAC_PI_2)
    }

    pub fn sin() -> Self {
        Self::named(RegulatorKind::Sin, "sin", f64::sin, 1.0)
    }

    pub fn tanh() -> Self {
        Self::named(RegulatorKind::Tanh, "tanh", f64::tanh, 1.0)
    }

    fn named(kind: RegulatorKind, label: &str, eval: fn(f64) -> f64, bound: f64) -> Self {
        Self { kind, label: label.into(), eval: Arc::new(eval), bound }
    }

    pub fn from_kind(kind: RegulatorKind) -> Option<Self> {
        match kind {
            RegulatorKind::Arctan => Some(Self::arctan()),
            RegulatorKind::Sin => Some(Self::sin()),
            RegulatorKind::Tanh => Some(Self::tanh()),
            RegulatorKind::Custom => None,
        }
    }

    /// User-supplied regulator with declared bound `M`; validated before use.
    pub fn custom<F>(label: impl Into<String>, eval: F, bound: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let w = Self { kind: RegulatorKind::Custom, label: label.into(), eval: Arc::new(eval), bound };
        w.validate()?;
        Ok(w)
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.eval)(z)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn kind(&self) -> RegulatorKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks `w(0) = 0`, `w'(0) = 1` and `|w| ≤ M` on 10⁶ probes in `[−1e8, 1e8]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(ChernoffError::InvalidRegulator(format!(
                "{}: bound M = {} must be finite and positive",
                self.label, self.bound
            )));
        }
        let w0 = self.eval(0.0);
        if w0 != 0.0 {
            return Err(ChernoffError::InvalidRegulator(format!("{}: w(0) = {w0}, expected w(0) = 0", self.label)));
        }
        for z in [1e-7, -1e-7, 1e-8, -1e-8] {
            let slope = self.eval(z) / z;
            if (slope - 1.0).abs().is_nan() || (slope - 1.0).abs() > 1e-6 {
                return Err(ChernoffError::InvalidRegulator(format!(
                    "{}: w(z)/z = {slope} at z = {z:e}, expected w'(0) = 1",
                    self.label
                )));
            }
        }
        for z in bound_probes() {
            let v = self.eval(z);
            if !(v.is_finite() && v.abs() <= self.bound) {
                return Err(ChernoffError::InvalidRegulator(format!(
                    "{}: |w({z:e})| = {} exceeds declared bound M = {}",
                    self.label,
                    v.abs(),
                    self.bound
                )));
            }
        }
        Ok(())
    }
}

/// 10⁶ deterministic probes: log-spaced magnitudes of both signs plus a uniform sweep.
fn bound_probes() -> impl Iterator<Item = f64> {
    const HALF: usize = 250_000;
    let log = (0..HALF).flat_map(|i| {
        let z = 10f64.powf(-8.0 + 16.0 * i as f64 / (HALF - 1) as f64);
        [z, -z]
    });
    let lin = (0..2 * HALF).map(|i| -1e8 + 2e8 * i as f64 / (2 * HALF - 1) as f64);
    log.chain(lin)
}

impl fmt::Debug for RegulatorFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegulatorFn")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish()
    }
}
