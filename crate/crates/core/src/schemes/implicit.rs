use crate::error::Result;
use crate::grid::GridState;
use crate::linalg::{solve_tridiagonal, DenseMatrix};
use crate::phase::{PhaseLabel, PiecewiseLinearPhi};
use crate::spectral::NeumannLaplacian;

use super::explicit::snap_to_phases;

/// Linear system dU/dtau = -M U + W valid while the phase pattern holds.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub w: Vec<f64>,
    pub pattern: Vec<PhaseLabel>,
}

impl RegimeSystem {
    pub fn is_valid_for(&self, phi: &PiecewiseLinearPhi, u: &[f64]) -> bool {
        u.iter().zip(&self.pattern).all(|(&x, &p)| phi.classify(x) == p)
    }

    pub fn dense_m(&self) -> DenseMatrix {
        let n = self.diag.len();
        DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                self.diag[i]
            } else if j + 1 == i {
                self.sub[i]
            } else if i + 1 == j {
                self.sup[i]
            } else {
                0.0
            }
        })
    }

    /// (I + r M) U' = U + r W with r = dt / h^2.
    pub fn advance(&self, u: &[f64], r: f64) -> Result<Vec<f64>> {
        let sub: Vec<f64> = self.sub.iter().map(|x| r * x).collect();
        let sup: Vec<f64> = self.sup.iter().map(|x| r * x).collect();
        let diag: Vec<f64> = self.diag.iter().map(|x| 1.0 + r * x).collect();
        let rhs: Vec<f64> = u.iter().zip(&self.w).map(|(x, w)| x + r * w).collect();
        solve_tridiagonal(&sub, &diag, &sup, &rhs)
    }
}

/// M = A diag(slopes), W = -A offsets, from the current branch of each U_j.
pub fn detect_regime(state: &GridState, phi: &PiecewiseLinearPhi) -> RegimeSystem {
    let n = state.len();
    let a = NeumannLaplacian::new(n);
    let pattern = state.phases(phi);
    let slope: Vec<f64> = pattern.iter().map(|&p| phi.slope(p)).collect();
    let offset: Vec<f64> = pattern.iter().map(|&p| phi.offset(p)).collect();
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let diag: Vec<f64> = (0..n).map(|i| a.diag(i) * slope[i]).collect();
    for i in 0..n {
        if i > 0 {
            sub[i] = -slope[i - 1];
        }
        if i + 1 < n {
            sup[i] = -slope[i + 1];
        }
    }
    let w = a.apply(&offset).into_iter().map(|x| -x).collect();
    RegimeSystem { sub, diag, sup, w, pattern }
}

/// Sub-steps per crossing search: the crossing is localized to dt / 2^6.
const BISECTIONS: u32 = 6;

/// One backward Euler step with the regime frozen at the start of each sub-step.
/// A phase change inside the step is localized by bisection and the step is
/// restarted from there with the new regime.
pub fn step_implicit(state: &GridState, phi: &PiecewiseLinearPhi, dt: f64) -> Result<GridState> {
    let h2 = state.h * state.h;
    let mut u = state.u.clone();
    let mut remaining = dt;
    let mut guard = 0;
    while remaining > 0.0 {
        let current = GridState { h: state.h, u: u.clone(), t: 0.0 };
        let reg = detect_regime(&current, phi);
        let trial = |s: f64| -> Result<Vec<f64>> {
            let mut next = reg.advance(&u, s / h2)?;
            snap_to_phases(phi, &reg.pattern, &mut next);
            Ok(next)
        };
        let full = trial(remaining)?;
        guard += 1;
        if reg.is_valid_for(phi, &full) || guard > 10_000 {
            u = full;
            break;
        }
        let (mut lo, mut hi) = (0.0, remaining);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if reg.is_valid_for(phi, &trial(mid)?) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo > 0.0 {
            u = trial(lo)?;
        }
        // cross with the old regime over the short remainder, then switch
        let cross = hi - lo;
        let mut next = reg.advance(&u, cross / h2)?;
        snap_to_phases(phi, &reg.pattern, &mut next);
        u = next;
        remaining -= hi;
        if remaining < 1e-14 * dt {
            break;
        }
    }
    Ok(GridState { h: state.h, u, t: state.t + dt })
}
