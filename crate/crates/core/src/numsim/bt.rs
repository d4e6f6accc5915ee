//! Bosonic Thirring on two half-lines with a dynamical defect field `X`.
//!
//! `phi1` moves left and `phi2` moves right, so the defect sets `~phi1` on
//! the left edge and `phi2` on the right edge from the Backlund relations
//! `~phi1 = X e^{-i alpha} - phi1 e^{-2 i alpha}` and
//! `phi2 = -i a X e^{-i alpha} + ~phi2 e^{-2 i alpha}`, while
//! `sin(2 alpha) = (g a / 2m) |X|^2`.

use std::cell::Cell;

use num_complex::Complex64;
use serde::Deserialize;

use super::config::LatticeConfig;
use super::report::ChargeRow;
use super::stencil::{diff, diffed, integrate};
use crate::error::{Error, Result};

type C = Complex64;

const I: C = C { re: 0.0, im: 1.0 };

#[derive(Clone, Debug)]
pub struct BosonicThirring {
    pub nodes: usize,
    pub h: f64,
    pub m: f64,
    pub g: f64,
    pub a: f64,
    pub defect: bool,
    clamps: Cell<u64>,
}

#[derive(Debug, Deserialize)]
struct SideData {
    phi1: Vec<[f64; 2]>,
    phi2: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
struct CustomData {
    left: SideData,
    right: SideData,
}

impl BosonicThirring {
    pub fn new(cfg: &LatticeConfig) -> Self {
        BosonicThirring {
            nodes: cfg.n + 1,
            h: cfg.h(),
            m: cfg.params.m,
            g: cfg.params.g,
            a: cfg.params.a,
            defect: cfg.defect,
            clamps: Cell::new(0),
        }
    }

    /// Four field blocks (`~phi1`, `~phi2`, `phi1`, `phi2`) and `X`.
    pub fn state_len(&self) -> usize {
        4 * self.nodes + 1
    }

    fn kappa(&self) -> f64 {
        self.g * self.a / (2.0 * self.m)
    }

    /// Times the defect angle left the domain of `arcsin` and was clamped.
    pub fn clamp_count(&self) -> u64 {
        self.clamps.get()
    }

    /// `(alpha, clamped)`.
    fn alpha(&self, x: C) -> (f64, bool) {
        let s = self.kappa() * x.norm_sqr();
        if s.abs() > 1.0 {
            (0.5 * s.signum().asin(), true)
        } else {
            (0.5 * s.asin(), false)
        }
    }

    pub fn field<'a>(&self, y: &'a [C], k: usize) -> &'a [C] {
        &y[k * self.nodes..(k + 1) * self.nodes]
    }

    pub fn defect_field(&self, y: &[C]) -> C {
        y[4 * self.nodes]
    }

    fn pack(&self, fields: [Vec<C>; 4]) -> Vec<C> {
        let mut y = Vec::with_capacity(self.state_len());
        for f in &fields {
            y.extend_from_slice(f);
        }
        y.push(C::new(0.0, 0.0));
        self.impose(&mut y);
        y
    }

    /// Far ends absorbing; `X` from the first relation, then the incoming
    /// right-moving value from the second.
    pub fn impose(&self, y: &mut [C]) {
        let n = self.nodes;
        let last = n - 1;
        y[n] = C::new(0.0, 0.0);
        y[2 * n + last] = C::new(0.0, 0.0);
        let (t1, t2, p1) = (y[last], y[n + last], y[2 * n]);
        if !self.defect {
            y[last] = p1;
            y[3 * n] = t2;
            y[4 * n] = C::new(0.0, 0.0);
            return;
        }
        let mut x = t1 + p1;
        for _ in 0..200 {
            let (al, _) = self.alpha(x);
            let e = C::from_polar(1.0, al);
            let next = e * t1 + p1 / e;
            let done = (next - x).norm() <= 1e-15 * (1.0 + x.norm());
            x = next;
            if done {
                break;
            }
        }
        let (al, _) = self.alpha(x);
        let e = C::from_polar(1.0, al);
        y[3 * n] = -I * self.a * x / e + t2 / (e * e);
        y[4 * n] = x;
    }

    pub fn zero(&self) -> Vec<C> {
        let z = vec![C::new(0.0, 0.0); self.nodes];
        self.pack([z.clone(), z.clone(), z.clone(), z])
    }

    /// Right-moving bump `A exp(1 - 1/(1 - s^2)) e^{i k x}` on the left half.
    pub fn pulse(&self, amplitude: f64, width: f64, x0: f64, k: f64, length: f64) -> Vec<C> {
        let z = vec![C::new(0.0, 0.0); self.nodes];
        let p2: Vec<C> = (0..self.nodes)
            .map(|i| {
                let x = -length + i as f64 * self.h;
                let s = (x - x0) / width;
                let bump = if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
                C::from_polar(amplitude * bump, k * x)
            })
            .collect();
        self.pack([z.clone(), p2, z.clone(), z])
    }

    pub fn custom(&self, text: &str) -> Result<Vec<C>> {
        let d: CustomData =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("custom initial data: {}", e)))?;
        let mut out = Vec::new();
        for (name, s) in [("left", d.left), ("right", d.right)] {
            for (field, v) in [("phi1", s.phi1), ("phi2", s.phi2)] {
                if v.len() != self.nodes {
                    return Err(Error::Config(format!(
                        "custom initial data: {}.{} has {} values, grid has {}",
                        name,
                        field,
                        v.len(),
                        self.nodes
                    )));
                }
                out.push(v.into_iter().map(|[re, im]| C::new(re, im)).collect::<Vec<_>>());
            }
        }
        let [a, b, c, d]: [Vec<C>; 4] = out.try_into().unwrap();
        Ok(self.pack([a, b, c, d]))
    }

    pub fn rhs(&self, y: &[C], dy: &mut [C]) {
        let n = self.nodes;
        let last = n - 1;
        let (m, g) = (self.m, self.g);
        for side in 0..2 {
            let p1 = self.field(y, 2 * side);
            let p2 = self.field(y, 2 * side + 1);
            let (d1, d2) = dy[2 * side * n..(2 * side + 2) * n].split_at_mut(n);
            diff(p1, self.h, d1);
            diff(p2, self.h, d2);
            for i in 0..n {
                let (u, w) = (p1[i], p2[i]);
                d1[i] = d1[i] - I * m * w - I * g * w.norm_sqr() * u;
                d2[i] = -d2[i] - I * m * u - I * g * u.norm_sqr() * w;
            }
        }
        dy[n] = C::new(0.0, 0.0);
        dy[2 * n + last] = C::new(0.0, 0.0);
        if !self.defect {
            dy[last] = dy[2 * n];
            dy[3 * n] = dy[n + last];
            dy[4 * n] = C::new(0.0, 0.0);
            return;
        }
        let x = y[4 * n];
        let (t1, t2, f1, f2) = (y[last], y[n + last], y[2 * n], y[3 * n]);
        let (al, clamped) = self.alpha(x);
        if clamped {
            self.clamps.set(self.clamps.get() + 1);
        }
        let e = C::from_polar(1.0, al);
        let a = self.a;
        let dens = t1.norm_sqr() + f1.norm_sqr() + t2.norm_sqr() + f2.norm_sqr();
        let xt = (f1 * e - t1 / e) * (m / (2.0 * a)) - I * (m / 2.0) * (t2 * e + f2 / e) - I * (g / 4.0) * dens * x;
        let alt = if clamped { 0.0 } else { self.kappa() * (x.conj() * xt).re / (2.0 * al).cos() };
        let xe = (xt - I * alt * x) / e;
        dy[last] = xe - (dy[2 * n] - 2.0 * I * alt * f1) / (e * e);
        dy[3 * n] = -I * a * xe + (dy[n + last] - 2.0 * I * alt * t2) / (e * e);
        dy[4 * n] = xt;
    }

    pub fn measure(&self, t: f64, y: &[C]) -> ChargeRow {
        let (m, g, a) = (self.m, self.g, self.a);
        let mut q = [[0.0; 3]; 2];
        for (side, out) in q.iter_mut().enumerate() {
            let p1 = self.field(y, 2 * side);
            let p2 = self.field(y, 2 * side + 1);
            let d1 = diffed(p1, self.h);
            let d2 = diffed(p2, self.h);
            let mut nd = Vec::with_capacity(self.nodes);
            let mut ed = Vec::with_capacity(self.nodes);
            let mut pd = Vec::with_capacity(self.nodes);
            for i in 0..self.nodes {
                let (u, w, ux, wx) = (p1[i], p2[i], d1[i], d2[i]);
                let k1 = (0.5 * I * (u * ux.conj() - u.conj() * ux)).re;
                let k2 = (0.5 * I * (w * wx.conj() - w.conj() * wx)).re;
                nd.push(u.norm_sqr() + w.norm_sqr());
                ed.push(k1 - k2 - 2.0 * m * (w.conj() * u).re - g * u.norm_sqr() * w.norm_sqr());
                pd.push(k1 + k2);
            }
            *out = [integrate(&nd, self.h), integrate(&ed, self.h), integrate(&pd, self.h)];
        }
        let mut row = ChargeRow {
            t,
            n_left: q[0][0],
            n_right: q[1][0],
            e_left: q[0][1],
            e_right: q[1][1],
            p_left: q[0][2],
            p_right: q[1][2],
            ..ChargeRow::default()
        };
        if self.defect {
            let x = self.defect_field(y);
            let (f1, f2) = (y[2 * self.nodes], y[3 * self.nodes]);
            let (al, _) = self.alpha(x);
            let e = C::from_polar(1.0, al);
            let cos = (2.0 * al).cos();
            let kin = (0.5 * I * (x * f1.conj() * e - x.conj() * f1 / e)).re;
            let mix = 0.5 * a * (x * f2.conj() / e + x.conj() * f2 * e).re;
            row.n_defect = 4.0 * al / g;
            row.e_defect = -(m / g) * (a + 1.0 / a) * cos + kin - mix;
            row.p_defect = (m / g) * (a - 1.0 / a) * cos + kin + mix;
        }
        row
    }
}
