//! Sine-Gordon on two half-lines in characteristic variables
//! `r = phi_t + phi_x` and `l = phi_t - phi_x`.
//!
//! `r` moves left and `l` moves right, so the defect fixes `r` on the left
//! edge and `l` on the right edge. With `u` the left field and `v` the
//! right field at `x = 0` the type-I conditions read
//! `r_L = r_R + 2A`, `l_R = -l_L - 2B` with
//! `A = m sigma sin((u+v)/2)` and `B = (m/sigma) sin((u-v)/2)`.

use std::f64::consts::PI;

use serde::Deserialize;

use super::config::{FarBoundary, LatticeConfig};
use super::report::ChargeRow;
use super::stencil::{diff, diffed, integrate};
use crate::error::{Error, Result};

/// Largest admissible PDE residual of sampled kink data.
pub const KINK_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SineGordon {
    pub nodes: usize,
    pub h: f64,
    pub m: f64,
    pub sigma: f64,
    pub potential: bool,
    pub defect: bool,
    pub far: FarBoundary,
}

const PHI: usize = 0;
const R: usize = 1;
const L: usize = 2;

#[derive(Debug, Deserialize)]
struct SideData {
    phi: Vec<f64>,
    phi_t: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct CustomData {
    left: SideData,
    right: SideData,
}

impl SineGordon {
    pub fn new(cfg: &LatticeConfig) -> Self {
        SineGordon {
            nodes: cfg.n + 1,
            h: cfg.h(),
            m: cfg.params.m,
            sigma: cfg.params.sigma,
            potential: cfg.potential,
            defect: cfg.defect,
            far: cfg.far_boundary,
        }
    }

    pub fn state_len(&self) -> usize {
        6 * self.nodes
    }

    fn block<'a>(&self, y: &'a [f64], side: usize, which: usize) -> &'a [f64] {
        let k = 3 * side + which;
        &y[k * self.nodes..(k + 1) * self.nodes]
    }

    fn force(&self, phi: f64) -> f64 {
        if self.potential {
            self.m * self.m * phi.sin()
        } else {
            0.0
        }
    }

    fn ab(&self, u: f64, v: f64) -> (f64, f64) {
        (self.m * self.sigma * (0.5 * (u + v)).sin(), self.m / self.sigma * (0.5 * (u - v)).sin())
    }

    fn pack(&self, sides: [(Vec<f64>, Vec<f64>); 2]) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.state_len());
        for (phi, phi_t) in sides {
            let phi_x = diffed(&phi, self.h);
            y.extend_from_slice(&phi);
            y.extend(phi_t.iter().zip(&phi_x).map(|(t, x)| t + x));
            y.extend(phi_t.iter().zip(&phi_x).map(|(t, x)| t - x));
        }
        self.impose(&mut y);
        y
    }

    /// Overwrite incoming characteristics so the data satisfy the far-end
    /// and defect conditions.
    pub fn impose(&self, y: &mut [f64]) {
        let n = self.nodes;
        let last = n - 1;
        let (left, right) = y.split_at_mut(3 * n);
        match self.far {
            FarBoundary::Absorbing => {
                left[2 * n] = 0.0;
                right[n + last] = 0.0;
            }
            FarBoundary::Reflecting => {
                left[2 * n] = -left[n];
                right[n + last] = -right[2 * n + last];
            }
        }
        if self.defect {
            let (a, b) = self.ab(left[last], right[0]);
            left[n + last] = right[n] + 2.0 * a;
            right[2 * n] = -left[2 * n + last] - 2.0 * b;
        } else {
            left[n + last] = right[n];
            right[2 * n] = left[2 * n + last];
        }
    }

    pub fn zero(&self) -> Vec<f64> {
        let z = vec![0.0; self.nodes];
        self.pack([(z.clone(), z.clone()), (z.clone(), z)])
    }

    /// Kink of speed `v` centred at `x0`; with a defect the right half sits
    /// on the neighbouring vacuum, `2 pi` lower.
    pub fn kink(&self, v: f64, x0: f64, length: f64) -> Result<Vec<f64>> {
        let gamma = 1.0 / (1.0 - v * v).sqrt();
        let k = self.m * gamma;
        let sample = |lo: f64, shift: f64| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut phi = Vec::with_capacity(self.nodes);
            let mut phi_t = Vec::with_capacity(self.nodes);
            let mut worst: f64 = 0.0;
            for i in 0..self.nodes {
                let z = k * (lo + i as f64 * self.h - x0);
                let p = 4.0 * z.exp().atan();
                let sech = 1.0 / z.cosh();
                let pzz = -2.0 * sech * z.tanh();
                // phi_tt - phi_xx + m^2 sin(phi) for phi(z), z = m gamma (x - x0 - v t)
                let res = k * k * (v * v - 1.0) * pzz + self.m * self.m * p.sin();
                worst = worst.max(res.abs());
                phi.push(p + shift);
                phi_t.push(-v * 2.0 * k * sech);
            }
            if worst.is_nan() || worst >= KINK_RESIDUAL_TOL {
                return Err(Error::Config(format!("kink data violate the field equation: residual {:.3e}", worst)));
            }
            Ok((phi, phi_t))
        };
        let shift = if self.defect { -2.0 * PI } else { 0.0 };
        Ok(self.pack([sample(-length, 0.0)?, sample(0.0, shift)?]))
    }

    pub fn custom(&self, text: &str) -> Result<Vec<f64>> {
        let d: CustomData =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("custom initial data: {}", e)))?;
        let mut sides = Vec::new();
        for (name, s) in [("left", d.left), ("right", d.right)] {
            for (field, v) in [("phi", &s.phi), ("phi_t", &s.phi_t)] {
                if v.len() != self.nodes {
                    return Err(Error::Config(format!(
                        "custom initial data: {}.{} has {} values, grid has {}",
                        name,
                        field,
                        v.len(),
                        self.nodes
                    )));
                }
            }
            sides.push((s.phi, s.phi_t));
        }
        let right = sides.pop().unwrap();
        let left = sides.pop().unwrap();
        Ok(self.pack([left, right]))
    }

    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.nodes;
        let last = n - 1;
        for (side, out) in dy.chunks_mut(3 * n).enumerate() {
            let phi = self.block(y, side, PHI);
            let r = self.block(y, side, R);
            let l = self.block(y, side, L);
            let (dphi, rest) = out.split_at_mut(n);
            let (dr, dl) = rest.split_at_mut(n);
            diff(r, self.h, dr);
            diff(l, self.h, dl);
            for i in 0..n {
                let s = self.force(phi[i]);
                dphi[i] = 0.5 * (r[i] + l[i]);
                dr[i] -= s;
                dl[i] = -dl[i] - s;
            }
        }
        let (left, right) = dy.split_at_mut(3 * n);
        match self.far {
            FarBoundary::Absorbing => {
                left[2 * n] = 0.0;
                right[n + last] = 0.0;
            }
            FarBoundary::Reflecting => {
                left[2 * n] = -left[n];
                right[n + last] = -right[2 * n + last];
            }
        }
        if self.defect {
            let (u, v) = (y[last], y[3 * n]);
            let (ut, vt) = (left[last], right[0]);
            let da = self.m * self.sigma * (0.5 * (u + v)).cos() * 0.5 * (ut + vt);
            let db = self.m / self.sigma * (0.5 * (u - v)).cos() * 0.5 * (ut - vt);
            left[n + last] = right[n] + 2.0 * da;
            right[2 * n] = -left[2 * n + last] - 2.0 * db;
        } else {
            left[n + last] = right[n];
            right[2 * n] = left[2 * n + last];
        }
    }

    pub fn measure(&self, t: f64, y: &[f64]) -> ChargeRow {
        let mut row = ChargeRow { t, ..ChargeRow::default() };
        let m2 = if self.potential { self.m * self.m } else { 0.0 };
        let mut e = [0.0; 2];
        let mut p = [0.0; 2];
        for side in 0..2 {
            let phi = self.block(y, side, PHI);
            let r = self.block(y, side, R);
            let l = self.block(y, side, L);
            let ed: Vec<f64> =
                (0..self.nodes).map(|i| 0.25 * (r[i] * r[i] + l[i] * l[i]) + m2 * (1.0 - phi[i].cos())).collect();
            let pd: Vec<f64> = (0..self.nodes).map(|i| 0.25 * (r[i] * r[i] - l[i] * l[i])).collect();
            e[side] = integrate(&ed, self.h);
            p[side] = integrate(&pd, self.h);
        }
        row.e_left = e[0];
        row.e_right = e[1];
        row.p_left = p[0];
        row.p_right = p[1];
        if self.defect {
            let (u, v) = (y[self.nodes - 1], y[3 * self.nodes]);
            let plus = self.sigma * (0.5 * (u + v)).cos();
            let minus = (0.5 * (u - v)).cos() / self.sigma;
            row.e_defect = 2.0 * self.m * (plus + minus);
            row.p_defect = 2.0 * self.m * (plus - minus);
        }
        row
    }

    pub fn phi<'a>(&self, y: &'a [f64], side: usize) -> &'a [f64] {
        self.block(y, side, PHI)
    }

    pub fn phi_t(&self, y: &[f64], side: usize) -> Vec<f64> {
        let r = self.block(y, side, R);
        let l = self.block(y, side, L);
        r.iter().zip(l).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Same configuration with `phi_t -> -phi_t`.
    pub fn reverse(&self, y: &mut [f64]) {
        let n = self.nodes;
        for side in 0..2 {
            let base = 3 * side * n;
            for i in 0..n {
                let r = y[base + n + i];
                let l = y[base + 2 * n + i];
                y[base + n + i] = -l;
                y[base + 2 * n + i] = -r;
            }
        }
    }
}
