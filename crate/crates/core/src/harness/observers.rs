//! Observers wired into a run. Each returns one CSV row per snapshot.

use crate::decay::moments::{moment_sample, weighted_moment};
use crate::decay::series::derivative_energy;
use crate::error::{Error, Result};
use crate::gevrey::{gevrey_record, radius_estimate_state, tau_schedule, GevreyParams};
use crate::heat::{difference_state, HeatFlow};
use crate::spectral::SolenoidalState;
use crate::stepper::Observer;

pub const ENERGY_COLUMN: &str = "E(t)=||u||_2^2+||B||_2^2";
pub const DIFFERENCE_COLUMN: &str = "||D(t)||_2^2=||u-v||_2^2+||B-w||_2^2";

/// Column name of the derivative series of order `m`.
pub fn derivative_column(m: f64) -> String {
    format!("||Lambda^{m}u||_2^2+||Lambda^{m}B||_2^2")
}

pub struct EnergyObserver {
    pub orders: Vec<f64>,
}

impl Observer for EnergyObserver {
    fn columns(&self) -> Vec<String> {
        let mut c = vec!["t".to_string(), ENERGY_COLUMN.to_string()];
        c.extend(self.orders.iter().map(|&m| derivative_column(m)));
        c
    }

    fn observe(&mut self, s: &SolenoidalState) -> Result<Vec<f64>> {
        let mut row = vec![s.time, s.energy()];
        for &m in &self.orders {
            row.push(derivative_energy(s, m)?);
        }
        Ok(row)
    }
}

pub struct DifferenceObserver {
    pub flow: HeatFlow,
}

impl Observer for DifferenceObserver {
    fn columns(&self) -> Vec<String> {
        vec![
            "t".into(),
            DIFFERENCE_COLUMN.into(),
            "||v||_2^2+||w||_2^2".into(),
        ]
    }

    fn observe(&mut self, s: &SolenoidalState) -> Result<Vec<f64>> {
        let d = difference_state(s, &self.flow)?;
        let heat = d.difference(s)?.energy();
        Ok(vec![s.time, d.energy(), heat])
    }
}

/// An overflowing Gevrey sum is recorded as a row of infinities rather
/// than aborting the run.
pub struct GevreyObserver {
    pub params: GevreyParams,
    pub floor: f64,
}

pub const GEVREY_COLUMNS: [&str; 12] = [
    "t",
    "tau",
    "J_r=||Lambda^r u||_2^2",
    "H_r=||Lambda^r B||_2^2",
    "G_r=||Lambda^r e^(tau Lambda) u||_2^2",
    "K_r=||Lambda^r e^(tau Lambda) B||_2^2",
    "N_r=J_r+H_r",
    "M_r=G_r+K_r",
    "top_fraction",
    "resolved_flag",
    "tau_est",
    "tau_est_residual",
];

impl Observer for GevreyObserver {
    fn columns(&self) -> Vec<String> {
        GEVREY_COLUMNS.iter().map(|s| s.to_string()).collect()
    }

    fn observe(&mut self, s: &SolenoidalState) -> Result<Vec<f64>> {
        let r = match gevrey_record(s, &self.params) {
            Ok(r) => r,
            Err(Error::Overflow { .. }) => {
                let mut row = vec![f64::INFINITY; GEVREY_COLUMNS.len()];
                row[0] = s.time;
                row[1] = tau_schedule(s.time, &self.params);
                row[9] = 0.0;
                row[10] = f64::NAN;
                row[11] = f64::NAN;
                return Ok(row);
            }
            Err(e) => return Err(e),
        };
        let (est, res) = match radius_estimate_state(s, self.floor) {
            Ok(e) => (e.tau_est, e.fit_residual),
            Err(_) => (f64::NAN, f64::NAN),
        };
        Ok(vec![
            r.t,
            r.tau,
            r.j_r,
            r.h_r,
            r.g_r,
            r.k_r,
            r.n_r,
            r.m_r,
            r.top_fraction,
            if r.resolved { 1.0 } else { 0.0 },
            est,
            res,
        ])
    }
}

pub struct MomentObserver;

impl Observer for MomentObserver {
    fn columns(&self) -> Vec<String> {
        let mut c = vec!["t".to_string()];
        for name in ["a", "c"] {
            for i in 1..=3 {
                for j in 1..=3 {
                    c.push(format!("{name}{i}{j}"));
                }
            }
        }
        c
    }

    fn observe(&mut self, s: &SolenoidalState) -> Result<Vec<f64>> {
        let m = moment_sample(s);
        let mut row = vec![s.time];
        row.extend(m.a.iter().flatten());
        row.extend(m.c.iter().flatten());
        Ok(row)
    }
}

pub struct WeightedMomentObserver;

impl Observer for WeightedMomentObserver {
    fn columns(&self) -> Vec<String> {
        vec![
            "t".into(),
            "W(t)=int |x-x_c|(|u|^2+|B|^2) dx".into(),
            "boundary_fraction".into(),
        ]
    }

    fn observe(&mut self, s: &SolenoidalState) -> Result<Vec<f64>> {
        let w = weighted_moment(s);
        Ok(vec![s.time, w.value, w.boundary_fraction])
    }
}
