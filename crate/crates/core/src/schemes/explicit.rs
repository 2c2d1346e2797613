use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::phase::{PhaseLabel, PiecewiseLinearPhi};
use crate::spectral::{apply_regularized, NeumannLaplacian};

/// Relative size below which a departure from a stable phase is treated as
/// rounding and undone. Without this, data sitting exactly on a phase edge
/// drifts into the unstable phase by one ulp and then grows.
pub(crate) const SNAP_TOL: f64 = 1e-12;

pub(crate) fn snap_tol(phi: &PiecewiseLinearPhi) -> f64 {
    SNAP_TOL * phi.a.abs().max(phi.b.abs()).max(1.0)
}

/// Pulls values that left a stable phase by rounding back onto its edge.
pub(crate) fn snap_to_phases(phi: &PiecewiseLinearPhi, before: &[PhaseLabel], u: &mut [f64]) {
    let tol = snap_tol(phi);
    for (x, p) in u.iter_mut().zip(before) {
        match p {
            PhaseLabel::StableMinus if *x > phi.b && *x - phi.b <= tol => *x = phi.b,
            PhaseLabel::StablePlus if *x < phi.a && phi.a - *x <= tol => *x = phi.a,
            _ => {}
        }
    }
}

pub fn check_cfl(h: f64, dt: f64) -> Result<()> {
    let ratio = 4.0 * dt / (h * h);
    if ratio > 1.0 + 1e-12 {
        return Err(Error::CflViolation(ratio));
    }
    Ok(())
}

/// One explicit Euler step of U' = -(h^2 I + eps A)^{-1} A phi(U).
pub fn step_explicit(state: &GridState, phi: &PiecewiseLinearPhi, dt: f64, eps: f64, cfl_guard: bool) -> Result<GridState> {
    let n = state.len();
    let h = state.h;
    let v = state.phi_values(phi);
    let mut u = state.u.clone();
    if eps == 0.0 {
        if cfl_guard {
            check_cfl(h, dt)?;
        }
        let r = dt / (h * h);
        let av = NeumannLaplacian::new(n).apply(&v);
        for (x, a) in u.iter_mut().zip(&av) {
            *x -= r * a;
        }
    } else {
        let rate = apply_regularized(n, h, eps, &v);
        for (x, a) in u.iter_mut().zip(&rate) {
            *x -= dt * a;
        }
    }
    snap_to_phases(phi, &state.phases(phi), &mut u);
    Ok(GridState { h, u, t: state.t + dt })
}
