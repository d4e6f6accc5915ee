//! Shared inputs for the benchmarks.

use defect_charges::numsim::{FarBoundary, InitialCondition, LatticeConfig, SimModel};
use defect_charges::{build_model, ModelName, ModelSpec, ParamValues};

pub fn model(name: ModelName) -> ModelSpec {
    build_model(name, ParamValues::default()).expect("default parameters are valid")
}

/// A moving sine-Gordon kink on `n` points per side.
pub fn sg_kink(n: usize) -> LatticeConfig {
    LatticeConfig {
        model: SimModel::Sg,
        length: 40.0,
        n,
        dt: None,
        t_end: 1.0,
        measure_every: 8,
        params: ParamValues::default(),
        defect: true,
        potential: true,
        far_boundary: FarBoundary::Absorbing,
        initial_condition: InitialCondition::SgKink { v: 0.5, x0: -10.0 },
    }
}

/// A Gaussian bosonic Thirring pulse on `n` points per side.
pub fn bt_pulse(n: usize) -> LatticeConfig {
    LatticeConfig {
        model: SimModel::Bt,
        initial_condition: InitialCondition::BtPulse { amplitude: 0.3, width: 4.0, x0: -8.0, wavenumber: 2.0 },
        ..sg_kink(n)
    }
}
