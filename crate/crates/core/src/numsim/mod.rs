//! Method-of-lines simulation of the bosonic Thirring and sine-Gordon
//! models on two half-lines joined by a defect at `x = 0`.
//!
//! Space uses fourth-order differences, time uses classical RK4, and the
//! defect conditions are imposed on the incoming characteristic at each
//! side of the defect. Charges are integrated with the end-corrected
//! trapezoid rule and the defect contributions are added pointwise.

pub mod bt;
pub mod config;
pub mod report;
pub mod sg;
pub mod stencil;


use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use bt::BosonicThirring;
pub use config::{FarBoundary, InitialCondition, LatticeConfig, SimModel, CFL_DEFAULT, CFL_MAX};
pub use report::{relative_drift, ChargeReport, ChargeRow, DriftSummary, CSV_HEADER, Q_FLOOR};
pub use sg::SineGordon;

#[derive(Clone, Debug, PartialEq)]
pub enum Fields {
    /// `phi`, `r`, `l` on the left, then the same on the right.
    Sg(Vec<f64>),
    /// `~phi1`, `~phi2`, `phi1`, `phi2`, then `X`.
    Bt(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    pub t: f64,
    pub fields: Fields,
}

#[derive(Clone, Debug)]
enum System {
    Sg(SineGordon),
    Bt(BosonicThirring),
}

#[derive(Clone, Debug)]
pub struct Simulation {
    cfg: LatticeConfig,
    system: System,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

fn rk4<E: stencil::GridValue>(y: &mut [E], dt: f64, f: impl Fn(&[E], &mut [E])) {
    let n = y.len();
    let z = E::zero();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![z; n], vec![z; n], vec![z; n], vec![z; n]);
    let mut tmp = vec![z; n];
    f(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + k1[i] * (0.5 * dt);
    }
    f(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + k2[i] * (0.5 * dt);
    }
    f(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + k3[i] * dt;
    }
    f(&tmp, &mut k4);
    let w = dt / 6.0;
    for i in 0..n {
        y[i] = y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
    }
}

impl Simulation {
    pub fn new(cfg: LatticeConfig) -> Result<Self> {
        cfg.validate()?;
        let system = match cfg.model {
            SimModel::Sg => System::Sg(SineGordon::new(&cfg)),
            SimModel::Bt => System::Bt(BosonicThirring::new(&cfg)),
        };
        Ok(Simulation { cfg, system })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn init(&self) -> Result<LatticeState> {
        let custom = |file: &Path| {
            std::fs::read_to_string(file).map_err(|e| Error::Config(format!("{}: {}", file.display(), e)))
        };
        let fields = match (&self.system, &self.cfg.initial_condition) {
            (System::Sg(s), InitialCondition::Zero) => Fields::Sg(s.zero()),
            (System::Sg(s), InitialCondition::SgKink { v, x0 }) => Fields::Sg(s.kink(*v, *x0, self.cfg.length)?),
            (System::Sg(s), InitialCondition::Custom { file }) => Fields::Sg(s.custom(&custom(file)?)?),
            (System::Bt(b), InitialCondition::Zero) => Fields::Bt(b.zero()),
            (System::Bt(b), InitialCondition::BtPulse { amplitude, width, x0, wavenumber }) => {
                Fields::Bt(b.pulse(*amplitude, *width, *x0, *wavenumber, self.cfg.length))
            }
            (System::Bt(b), InitialCondition::Custom { file }) => Fields::Bt(b.custom(&custom(file)?)?),
            (_, ic) => {
                return Err(Error::Config(format!(
                    "initial condition {:?} does not fit model {:?}",
                    ic, self.cfg.model
                )))
            }
        };
        Ok(LatticeState { t: 0.0, fields })
    }

    /// One RK4 step.
    pub fn step(&self, state: &mut LatticeState, dt: f64) -> Result<()> {
        let bound = CFL_MAX * self.cfg.h();
        if !(dt > 0.0 && dt <= bound) {
            return Err(Error::Config(format!("dt = {} outside (0, {}]", dt, bound)));
        }
        let finite = match (&self.system, &mut state.fields) {
            (System::Sg(s), Fields::Sg(y)) => {
                rk4(y, dt, |y, dy| s.rhs(y, dy));
                y.iter().all(|v| v.is_finite())
            }
            (System::Bt(b), Fields::Bt(y)) => {
                rk4(y, dt, |y, dy| b.rhs(y, dy));
                y.iter().all(|v| v.is_finite())
            }
            _ => return Err(Error::Config("state does not belong to this simulation".into())),
        };
        state.t += dt;
        if !finite {
            return Err(Error::BlowUp { t: state.t });
        }
        Ok(())
    }

    pub fn measure(&self, state: &LatticeState) -> ChargeRow {
        match (&self.system, &state.fields) {
            (System::Sg(s), Fields::Sg(y)) => s.measure(state.t, y),
            (System::Bt(b), Fields::Bt(y)) => b.measure(state.t, y),
            _ => panic!("state does not belong to this simulation"),
        }
    }

    /// Defect angle clamps so far (always zero for sine-Gordon).
    pub fn alpha_clamps(&self) -> u64 {
        match &self.system {
            System::Bt(b) => b.clamp_count(),
            System::Sg(_) => 0,
        }
    }

    pub fn run_from(&self, state: &mut LatticeState) -> Result<ChargeReport> {
        let dt = self.cfg.time_step();
        let steps = self.cfg.steps();
        let every = self.cfg.measure_every;
        let mut rows = vec![self.measure(state)];
        for k in 1..=steps {
            self.step(state, dt)?;
            if k % every == 0 || k == steps {
                let row = self.measure(state);
                if !row.is_finite() {
                    return Err(Error::BlowUp { t: state.t });
                }
                rows.push(row);
            }
        }
        Ok(ChargeReport { rows, steps, dt, alpha_clamps: self.alpha_clamps() })
    }

    pub fn run(&self) -> Result<ChargeReport> {
        let mut state = self.init()?;
        self.run_from(&mut state)
    }

    /// Field values and time derivative of sine-Gordon data on one side.
    pub fn sg_fields(&self, state: &LatticeState, side: Side) -> Option<(Vec<f64>, Vec<f64>)> {
        match (&self.system, &state.fields) {
            (System::Sg(s), Fields::Sg(y)) => Some((s.phi(y, side.index()).to_vec(), s.phi_t(y, side.index()))),
            _ => None,
        }
    }

    /// `(phi1, phi2)` on one side of bosonic Thirring data.
    pub fn bt_fields(&self, state: &LatticeState, side: Side) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
        match (&self.system, &state.fields) {
            (System::Bt(b), Fields::Bt(y)) => {
                let k = 2 * side.index();
                Some((b.field(y, k).to_vec(), b.field(y, k + 1).to_vec()))
            }
            _ => None,
        }
    }

    pub fn defect_field(&self, state: &LatticeState) -> Option<Complex64> {
        match (&self.system, &state.fields) {
            (System::Bt(b), Fields::Bt(y)) => Some(b.defect_field(y)),
            _ => None,
        }
    }

    /// Flip the sign of every time derivative (sine-Gordon only).
    pub fn time_reversed(&self, state: &LatticeState) -> Option<LatticeState> {
        match (&self.system, &state.fields) {
            (System::Sg(s), Fields::Sg(y)) => {
                let mut y = y.clone();
                s.reverse(&mut y);
                Some(LatticeState { t: 0.0, fields: Fields::Sg(y) })
            }
            _ => None,
        }
    }
}

pub fn init(cfg: &LatticeConfig) -> Result<LatticeState> {
    Simulation::new(cfg.clone())?.init()
}

pub fn run(cfg: &LatticeConfig) -> Result<ChargeReport> {
    Simulation::new(cfg.clone())?.run()
}
