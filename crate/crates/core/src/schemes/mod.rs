//! Time integrators: explicit Euler (optionally regularized), implicit Euler
//! on the piecewise-linear regime system, and the two-phase interface scheme.

mod explicit;
mod implicit;
mod two_phase;

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::phase::{riemann_initial, PhaseLabel, PiecewiseLinearPhi, RiemannData};

pub use explicit::{check_cfl, step_explicit};
pub use implicit::{detect_regime, step_implicit, RegimeSystem};
pub use two_phase::{cell_of, interface_speed, two_phase_step, InterfaceTrack};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Explicit,
    Implicit,
    TwoPhase,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Explicit => "explicit",
            SchemeKind::Implicit => "implicit",
            SchemeKind::TwoPhase => "two-phase",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub points: usize,
    pub eps: f64,
    pub dt: f64,
    pub t_final: f64,
    pub cfl_guard: bool,
}

impl SchemeConfig {
    pub fn new(kind: SchemeKind, points: usize, dt: f64, t_final: f64) -> Self {
        SchemeConfig { kind, points, eps: 0.0, dt, t_final, cfl_guard: true }
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.points as f64 - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 5 {
            return Err(Error::GridTooSmall(self.points));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {}", self.eps)));
        }
        if self.eps > 0.0 && self.kind != SchemeKind::Explicit {
            return Err(Error::InvalidConfig(format!("eps > 0 is only supported by the explicit scheme, not {}", self.kind)));
        }
        let cfl_bound = self.kind == SchemeKind::TwoPhase || (self.kind == SchemeKind::Explicit && self.eps == 0.0 && self.cfl_guard);
        if cfl_bound {
            check_cfl(self.h(), self.dt)?;
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

/// (j_left, j_right), 1-based: last point at or below b and first at or above a.
pub fn locate_interface_threshold(state: &GridState, phi: &PiecewiseLinearPhi) -> Result<(usize, usize)> {
    let left = state.u.iter().rposition(|&x| x <= phi.b);
    let right = state.u.iter().position(|&x| x >= phi.a);
    match (left, right) {
        (Some(l), Some(r)) => Ok((l + 1, r + 1)),
        _ => Err(Error::NoInterface),
    }
}

/// Position reported for threshold-located interfaces: j_left * h.
pub fn threshold_position(state: &GridState, phi: &PiecewiseLinearPhi) -> Result<f64> {
    locate_interface_threshold(state, phi).map(|(l, _)| l as f64 * state.h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// One row of the interface series. `c` and `level` are only set by the
/// two-phase scheme; `zeta` is NaN when no interface can be located.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSample {
    pub step: usize,
    pub t: f64,
    pub zeta: f64,
    pub c: Option<f64>,
    pub level: Option<f64>,
    pub speed: Option<f64>,
    pub unstable: usize,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: SchemeConfig,
    pub phi: PiecewiseLinearPhi,
    pub data: RiemannData,
    pub final_state: GridState,
    pub snapshots: Vec<Snapshot>,
    pub interface: Vec<InterfaceSample>,
    pub steps_taken: usize,
    pub cpu_seconds: f64,
}

/// A run that stopped on a step error, with everything recorded up to it.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<RunRecord>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} steps, t = {})", self.error, self.partial.steps_taken, self.partial.final_state.t)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

pub const MAX_SNAPSHOTS: usize = 200;

fn unstable_count(state: &GridState, phi: &PiecewiseLinearPhi) -> usize {
    state.u.iter().filter(|&&x| phi.classify(x) == PhaseLabel::Unstable).count()
}

fn snapshot(state: &GridState, phi: &PiecewiseLinearPhi) -> Snapshot {
    Snapshot { t: state.t, u: state.u.clone(), v: state.phi_values(phi) }
}

fn threshold_sample(step: usize, state: &GridState, phi: &PiecewiseLinearPhi) -> InterfaceSample {
    InterfaceSample {
        step,
        t: state.t,
        zeta: threshold_position(state, phi).unwrap_or(f64::NAN),
        c: None,
        level: None,
        speed: None,
        unstable: unstable_count(state, phi),
    }
}

fn track_sample(step: usize, state: &GridState, track: &InterfaceTrack, phi: &PiecewiseLinearPhi) -> InterfaceSample {
    let set = |x: f64| if x.is_nan() { None } else { Some(x) };
    InterfaceSample {
        step,
        t: state.t,
        zeta: track.zeta,
        c: set(track.c_value),
        level: set(track.level),
        speed: if step == 0 { None } else { Some(track.speed) },
        unstable: unstable_count(state, phi),
    }
}

/// Runs a scheme from Riemann data to `t_final`.
pub fn run(config: &SchemeConfig, phi: &PiecewiseLinearPhi, data: &RiemannData) -> std::result::Result<RunRecord, RunFailure> {
    let start = Instant::now();
    let mut record = RunRecord {
        config: *config,
        phi: *phi,
        data: *data,
        final_state: GridState::new(vec![0.0; config.points.max(2)], 0.0),
        snapshots: Vec::new(),
        interface: Vec::new(),
        steps_taken: 0,
        cpu_seconds: 0.0,
    };
    let fail = |mut record: RunRecord, error: Error, start: Instant| {
        record.cpu_seconds = start.elapsed().as_secs_f64();
        RunFailure { error, partial: Box::new(record) }
    };
    if let Err(e) = config.validate() {
        return Err(fail(record, e, start));
    }
    if config.kind == SchemeKind::TwoPhase {
        if let Err(e) = data.check_two_phase(phi) {
            return Err(fail(record, e, start));
        }
    }
    let mut state = match riemann_initial(config.points, data) {
        Ok(s) => s,
        Err(e) => return Err(fail(record, e, start)),
    };
    let mut track = InterfaceTrack::from_data(config.points, data);

    let steps = config.steps();
    let stride = steps.div_ceil(MAX_SNAPSHOTS - 2).max(1);
    record.snapshots.push(snapshot(&state, phi));
    record.interface.push(match config.kind {
        SchemeKind::TwoPhase => track_sample(0, &state, &track, phi),
        _ => threshold_sample(0, &state, phi),
    });

    for n in 1..=steps {
        let t_next = if n == steps { config.t_final } else { n as f64 * config.dt };
        let dt = (t_next - state.t).min(config.dt);
        let outcome = match config.kind {
            SchemeKind::Explicit => step_explicit(&state, phi, dt, config.eps, config.cfl_guard).map(|s| (s, None)),
            SchemeKind::Implicit => step_implicit(&state, phi, dt).map(|s| (s, None)),
            SchemeKind::TwoPhase => two_phase_step(&state, &track, phi, dt).map(|(s, tr)| (s, Some(tr))),
        };
        let (next, next_track) = match outcome {
            Ok(x) => x,
            Err(e) => {
                record.final_state = state;
                record.steps_taken = n - 1;
                return Err(fail(record, e, start));
            }
        };
        state = next;
        state.t = t_next;
        let sample = match next_track {
            Some(tr) => {
                track = tr;
                track_sample(n, &state, &track, phi)
            }
            None => threshold_sample(n, &state, phi),
        };
        record.interface.push(sample);
        if n % stride == 0 || n == steps {
            record.snapshots.push(snapshot(&state, phi));
        }
    }
    record.final_state = state;
    record.steps_taken = steps;
    record.cpu_seconds = start.elapsed().as_secs_f64();
    Ok(record)
}
