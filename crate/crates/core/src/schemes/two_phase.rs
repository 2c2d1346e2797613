use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::phase::{left_count, PhaseLabel, PiecewiseLinearPhi, RiemannData};
use crate::spectral::NeumannLaplacian;

use super::explicit::{check_cfl, snap_tol};

/// Continuous interface position plus the cell pair (j_star, j_star + 1)
/// that straddles it. `j_star` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceTrack {
    pub zeta: f64,
    pub j_star: usize,
    pub c_value: f64,
    pub level: f64,
    pub speed: f64,
}

impl InterfaceTrack {
    /// Interface at the data split: cells 1..=L on the minus side, zeta = x0.
    pub fn from_data(n: usize, data: &RiemannData) -> Self {
        InterfaceTrack {
            zeta: data.x0,
            j_star: left_count(n, data.x0),
            c_value: f64::NAN,
            level: f64::NAN,
            speed: 0.0,
        }
    }
}

/// Cell index for zeta. The current index is kept while zeta stays in the
/// closed cell [x_j, x_{j+1}], so a position sitting on a node does not flip.
pub fn cell_of(zeta: f64, h: f64, current: usize) -> i64 {
    let lo = (current as f64 - 1.0) * h;
    let slack = 1e-12 * h;
    if zeta >= lo - slack && zeta <= lo + h + slack {
        current as i64
    } else {
        (zeta / h).floor() as i64 + 1
    }
}

/// Interface speed for a transition value C.
pub fn interface_speed(phi: &PiecewiseLinearPhi, c: f64, h: f64) -> f64 {
    let t = phi.truncate(c);
    if t == c {
        return 0.0;
    }
    let up = phi.branch_inverse(PhaseLabel::StablePlus, t);
    let um = phi.branch_inverse(PhaseLabel::StableMinus, t);
    2.0 * (t - c) / ((up - um) * h)
}

pub fn two_phase_step(
    state: &GridState,
    track: &InterfaceTrack,
    phi: &PiecewiseLinearPhi,
    dt: f64,
) -> Result<(GridState, InterfaceTrack)> {
    let n = state.len();
    let h = state.h;
    check_cfl(h, dt)?;
    let js = track.j_star;
    if js < 2 || js + 2 > n {
        return Err(Error::InterfaceAtBoundary(js as i64));
    }
    // 0-based interface cells k, k+1
    let k = js - 1;
    let c = 0.5
        * (phi.branch_eval(PhaseLabel::StableMinus, state.u[k - 1])
            + phi.branch_eval(PhaseLabel::StablePlus, state.u[k + 2]));
    let level = phi.truncate(c);
    let mut patched = state.u.clone();
    patched[k] = phi.branch_inverse(PhaseLabel::StableMinus, level);
    patched[k + 1] = phi.branch_inverse(PhaseLabel::StablePlus, level);

    let v: Vec<f64> = patched
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let side = if i <= k { PhaseLabel::StableMinus } else { PhaseLabel::StablePlus };
            phi.branch_eval(side, x)
        })
        .collect();
    let av = NeumannLaplacian::new(n).apply(&v);
    let r = dt / (h * h);
    let tol = snap_tol(phi);
    let mut u = patched.clone();
    for i in 0..n {
        if i == k || i == k + 1 {
            continue;
        }
        let mut x = patched[i] - r * av[i];
        if i < k && x > phi.b && x - phi.b <= tol {
            x = phi.b;
        } else if i > k + 1 && x < phi.a && phi.a - x <= tol {
            x = phi.a;
        }
        u[i] = x;
    }

    let speed = interface_speed(phi, c, h);
    let zeta = track.zeta + speed * dt;
    let next = cell_of(zeta, h, js);
    if (next - js as i64).abs() > 1 {
        return Err(Error::InterfaceJumpTooLarge { from: js, to: next.max(0) as usize });
    }
    if next < 2 || next + 2 > n as i64 {
        return Err(Error::InterfaceAtBoundary(next));
    }
    let next = next as usize;
    if next + 1 == js {
        // old left interface cell now sits on the plus side
        u[k] = phi.branch_inverse(PhaseLabel::StablePlus, level);
    } else if next == js + 1 {
        u[k + 1] = phi.branch_inverse(PhaseLabel::StableMinus, level);
    }
    let new_state = GridState { h, u, t: state.t + dt };
    let new_track = InterfaceTrack { zeta, j_star: next, c_value: c, level, speed };
    Ok((new_state, new_track))
}
