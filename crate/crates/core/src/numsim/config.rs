//! Simulation configuration, read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{validate_params, ModelName};
use crate::scalar::ParamValues;

/// Largest admissible `dt / h`.
pub const CFL_MAX: f64 = 0.5;
/// `dt / h` used when the config gives no time step.
pub const CFL_DEFAULT: f64 = 0.25;
pub const MIN_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimModel {
    Bt,
    Sg,
}

impl SimModel {
    pub fn model_name(self) -> ModelName {
        match self {
            SimModel::Bt => ModelName::Bt,
            SimModel::Sg => ModelName::Sg,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FarBoundary {
    /// Incoming characteristics held at zero.
    #[default]
    Absorbing,
    /// Field held fixed (sine-Gordon only).
    Reflecting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    SgKink {
        v: f64,
        x0: f64,
    },
    BtPulse {
        amplitude: f64,
        width: f64,
        x0: f64,
        #[serde(default)]
        wavenumber: f64,
    },
    Custom {
        file: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub model: SimModel,
    /// Half-line length `L`; the grid covers `[-L, 0]` and `[0, L]`.
    pub length: f64,
    /// Grid intervals per side.
    pub n: usize,
    /// Time step; defaults to `CFL_DEFAULT * h`.
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    #[serde(default = "default_measure_every")]
    pub measure_every: usize,
    #[serde(default)]
    pub params: ParamValues,
    #[serde(default = "yes")]
    pub defect: bool,
    /// Keep the `m^2 sin(phi)` term (sine-Gordon).
    #[serde(default = "yes")]
    pub potential: bool,
    #[serde(default)]
    pub far_boundary: FarBoundary,
    pub initial_condition: InitialCondition,
}

fn default_measure_every() -> usize {
    8
}

fn yes() -> bool {
    true
}

impl LatticeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: LatticeConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {}", e)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
        let mut cfg = Self::from_json(&text)?;
        if let InitialCondition::Custom { file } = &mut cfg.initial_condition {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        Ok(cfg)
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or(CFL_DEFAULT * self.h())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.time_step()).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Config(s));
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad(format!("length must be positive, got {}", self.length));
        }
        if self.n < MIN_POINTS {
            return bad(format!("n must be at least {}, got {}", MIN_POINTS, self.n));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if self.measure_every == 0 {
            return bad("measure_every must be positive".into());
        }
        let dt = self.time_step();
        if !(dt.is_finite() && dt > 0.0) {
            return bad(format!("dt must be positive, got {}", dt));
        }
        if dt > CFL_MAX * self.h() {
            return bad(format!("dt = {} exceeds the stability bound {} * h = {}", dt, CFL_MAX, CFL_MAX * self.h()));
        }
        validate_params(self.model.model_name(), &self.params).map_err(|e| Error::Config(e.to_string()))?;
        if self.model == SimModel::Bt && self.far_boundary == FarBoundary::Reflecting {
            return bad("reflecting far ends are only available for sine-Gordon".into());
        }
        match (&self.initial_condition, self.model) {
            (InitialCondition::SgKink { v, .. }, SimModel::Sg) => {
                if v.is_nan() || v.abs() >= 1.0 {
                    return bad(format!("kink speed must satisfy |v| < 1, got {}", v));
                }
            }
            (InitialCondition::SgKink { .. }, SimModel::Bt) => {
                return bad("sg_kink initial data needs model sg".into());
            }
            (InitialCondition::BtPulse { width, .. }, SimModel::Bt) => {
                if width.is_nan() || *width <= 0.0 {
                    return bad(format!("pulse width must be positive, got {}", width));
                }
            }
            (InitialCondition::BtPulse { .. }, SimModel::Sg) => {
                return bad("bt_pulse initial data needs model bt".into());
            }
            _ => {}
        }
        Ok(())
    }
}
