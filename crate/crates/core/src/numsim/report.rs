//! Charge time series, drift summaries and CSV output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor on `|Q(0)|` in the relative drift.
pub const Q_FLOOR: f64 = 1e-12;

pub const CSV_HEADER: [&str; 13] =
    ["t", "N_L", "N_R", "E_L", "E_R", "P_L", "P_R", "N_D", "E_D", "P_D", "N_tot", "E_tot", "P_tot"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargeRow {
    pub t: f64,
    pub n_left: f64,
    pub n_right: f64,
    pub e_left: f64,
    pub e_right: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub n_defect: f64,
    pub e_defect: f64,
    pub p_defect: f64,
}

impl ChargeRow {
    pub fn n_bulk(&self) -> f64 {
        self.n_left + self.n_right
    }
    pub fn e_bulk(&self) -> f64 {
        self.e_left + self.e_right
    }
    pub fn p_bulk(&self) -> f64 {
        self.p_left + self.p_right
    }
    pub fn n_total(&self) -> f64 {
        self.n_bulk() + self.n_defect
    }
    pub fn e_total(&self) -> f64 {
        self.e_bulk() + self.e_defect
    }
    pub fn p_total(&self) -> f64 {
        self.p_bulk() + self.p_defect
    }

    pub fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.n_left,
            self.n_right,
            self.e_left,
            self.e_right,
            self.p_left,
            self.p_right,
            self.n_defect,
            self.e_defect,
            self.p_defect,
            self.n_total(),
            self.e_total(),
            self.p_total(),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    pub n_total: f64,
    pub e_total: f64,
    pub p_total: f64,
    pub n_bulk: f64,
    pub e_bulk: f64,
    pub p_bulk: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub rows: Vec<ChargeRow>,
    pub steps: usize,
    pub dt: f64,
    /// Steps on which the defect angle had to be clamped.
    pub alpha_clamps: u64,
}

/// `max_t |Q(t) - Q(0)| / max(|Q(0)|, Q_FLOOR)`.
pub fn relative_drift(series: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = series.into_iter();
    let Some(q0) = it.next() else { return 0.0 };
    let worst = it.fold(0.0f64, |acc, q| acc.max((q - q0).abs()));
    worst / q0.abs().max(Q_FLOOR)
}

impl ChargeReport {
    pub fn drift_of(&self, f: impl Fn(&ChargeRow) -> f64) -> f64 {
        relative_drift(self.rows.iter().map(f))
    }

    pub fn drift(&self) -> DriftSummary {
        DriftSummary {
            n_total: self.drift_of(ChargeRow::n_total),
            e_total: self.drift_of(ChargeRow::e_total),
            p_total: self.drift_of(ChargeRow::p_total),
            n_bulk: self.drift_of(ChargeRow::n_bulk),
            e_bulk: self.drift_of(ChargeRow::e_bulk),
            p_bulk: self.drift_of(ChargeRow::p_bulk),
        }
    }

    pub fn first(&self) -> Option<&ChargeRow> {
        self.rows.first()
    }

    pub fn last(&self) -> Option<&ChargeRow> {
        self.rows.last()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        w.write_record(CSV_HEADER).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.values().iter().map(|v| format!("{:.16e}", v))).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}
