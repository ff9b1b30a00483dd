//! The comparison heat system `∂t v = Δv`, `∂t w = Δw` started from the
//! same data, evaluated by its exact Fourier multiplier, and the difference
//! `D = (u − v, B − w)` between a trajectory and its heat flow.

use crate::error::{Error, Result};
use crate::spectral::SolenoidalState;
use crate::stepper::Trajectory;

/// `e^{−|k|²t}` applied to both fields; the returned time is advanced by `t`.
/// Any real `t` is accepted here, callers enforce the sign.
pub(crate) fn propagate(state: &SolenoidalState, t: f64) -> SolenoidalState {
    let grid = *state.grid();
    let f = |idx: usize| (-grid.k2(idx) * t).exp();
    SolenoidalState {
        u: state.u.apply_multiplier(f),
        b: state.b.apply_multiplier(f),
        time: state.time + t,
    }
}

/// Heat flow from a frozen initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatFlow {
    initial: SolenoidalState,
}

impl HeatFlow {
    pub fn new(initial: SolenoidalState) -> Self {
        Self { initial }
    }

    pub fn initial(&self) -> &SolenoidalState {
        &self.initial
    }

    /// Time of the initial state.
    pub fn start(&self) -> f64 {
        self.initial.time
    }
}

/// `(v̂, ŵ)(k, t) = e^{−|k|²t}(û₀, B̂₀)(k)`, labelled with time
/// `flow.start() + t`.
pub fn heat_evolve(flow: &HeatFlow, t: f64) -> Result<SolenoidalState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "heat flow is evaluated forward only, got t = {t}"
        )));
    }
    if t == 0.0 {
        return Ok(flow.initial.clone());
    }
    Ok(propagate(&flow.initial, t))
}

/// `D = (u − v, B − w)` at the state's time, formed coefficientwise.
pub fn difference_state(state: &SolenoidalState, flow: &HeatFlow) -> Result<SolenoidalState> {
    let t = state.time - flow.start();
    if t < 0.0 {
        return Err(Error::TimeMismatch {
            left: state.time,
            right: flow.start(),
        });
    }
    state.difference(&heat_evolve(flow, t)?)
}

/// Heat flow restarted from the trajectory's state at time `t`.
pub fn restart_comparator(traj: &Trajectory, t: f64) -> Result<HeatFlow> {
    Ok(HeatFlow::new(traj.state_at(t)?.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, SpectralField};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn mode(grid: GridSpec, m: [i64; 3]) -> SolenoidalState {
        let mut u = SpectralField::zeros(grid);
        let z = Complex64::default();
        let a = Complex64::new(0.3, 0.4);
        u.set(grid.index_of_mode(m), [z, a, z]);
        u.set(grid.index_of_mode([-m[0], -m[1], -m[2]]), [z, a.conj(), z]);
        SolenoidalState::new(u, SpectralField::zeros(grid), 0.0).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let flow = HeatFlow::new(mode(grid, [2, 0, 0]));
        assert_eq!(&heat_evolve(&flow, 0.0).unwrap(), flow.initial());
    }

    #[test]
    fn single_mode_decays_analytically() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let s = mode(grid, [2, 0, 0]);
        let out = heat_evolve(&HeatFlow::new(s.clone()), 0.5).unwrap();
        let idx = grid.index_of_mode([2, 0, 0]);
        let expect = s.u.component(1)[idx] * (-2.0f64).exp();
        assert!((out.u.component(1)[idx] - expect).norm() < 1e-15);
        assert_eq!(out.time, 0.5);
    }

    #[test]
    fn negative_time_is_rejected() {
        let grid = GridSpec::new(4, 1.0).unwrap();
        let flow = HeatFlow::new(SolenoidalState::zeros(grid));
        assert!(heat_evolve(&flow, -1.0).is_err());
    }

    #[test]
    fn difference_at_start_is_zero() {
        let grid = GridSpec::new(8, 2.0 * PI).unwrap();
        let s = mode(grid, [1, 1, 0]);
        let d = difference_state(&s, &HeatFlow::new(s.clone())).unwrap();
        assert_eq!(d.energy(), 0.0);
    }
}
