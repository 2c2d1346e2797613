//! Piecewise-linear flux with two stable branches and a decreasing middle branch.

use crate::error::{Error, Result};
use crate::grid::GridState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    StableMinus,
    Unstable,
    StablePlus,
}

/// phi(u) = m_minus u + q_minus on (-inf, b], m_plus u + q_plus on [a, inf),
/// and the affine interpolation of (b, B) and (a, A) in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseLinearPhi {
    pub m_minus: f64,
    pub q_minus: f64,
    pub m_plus: f64,
    pub q_plus: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub m_zero: f64,
    pub q_zero: f64,
}

impl PiecewiseLinearPhi {
    pub fn new(m_minus: f64, q_minus: f64, m_plus: f64, q_plus: f64, b: f64, a: f64) -> Result<Self> {
        let all = [m_minus, q_minus, m_plus, q_plus, b, a];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPhi("non-finite parameter".into()));
        }
        if m_minus <= 0.0 || m_plus <= 0.0 {
            return Err(Error::InvalidPhi("stable slopes must be positive".into()));
        }
        if b >= a {
            return Err(Error::InvalidPhi(format!("need b < a, got b={b}, a={a}")));
        }
        let big_b = m_minus * b + q_minus;
        let big_a = m_plus * a + q_plus;
        if big_a >= big_b {
            return Err(Error::InvalidPhi(format!(
                "need phi(a) < phi(b), got A={big_a}, B={big_b}"
            )));
        }
        let c = (big_a - q_minus) / m_minus;
        let d = (big_b - q_plus) / m_plus;
        let m_zero = (big_a - big_b) / (a - b);
        let q_zero = big_b - m_zero * b;
        Ok(Self {
            m_minus,
            q_minus,
            m_plus,
            q_plus,
            a,
            b,
            c,
            d,
            big_a,
            big_b,
            m_zero,
            q_zero,
        })
    }

    /// phi(u) = 2u + 3/2 (|1 - u| - |1 + u|).
    pub fn symmetric() -> Self {
        Self::new(2.0, 3.0, 2.0, -3.0, -1.0, 1.0).expect("canonical parameters are valid")
    }

    pub fn classify(&self, u: f64) -> PhaseLabel {
        if u <= self.b {
            PhaseLabel::StableMinus
        } else if u < self.a {
            PhaseLabel::Unstable
        } else {
            PhaseLabel::StablePlus
        }
    }

    pub fn slope(&self, branch: PhaseLabel) -> f64 {
        match branch {
            PhaseLabel::StableMinus => self.m_minus,
            PhaseLabel::Unstable => self.m_zero,
            PhaseLabel::StablePlus => self.m_plus,
        }
    }

    pub fn offset(&self, branch: PhaseLabel) -> f64 {
        match branch {
            PhaseLabel::StableMinus => self.q_minus,
            PhaseLabel::Unstable => self.q_zero,
            PhaseLabel::StablePlus => self.q_plus,
        }
    }

    /// Affine branch extended to the whole line.
    pub fn branch_eval(&self, branch: PhaseLabel, u: f64) -> f64 {
        self.slope(branch) * u + self.offset(branch)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.branch_eval(self.classify(u), u)
    }

    pub fn inverse(&self, branch: PhaseLabel, v: f64) -> Result<f64> {
        let ok = match branch {
            PhaseLabel::StableMinus => v <= self.big_b,
            PhaseLabel::StablePlus => v >= self.big_a,
            PhaseLabel::Unstable => v >= self.big_a && v <= self.big_b,
        };
        if !ok || !v.is_finite() {
            return Err(Error::OutOfBranchRange { branch, value: v });
        }
        Ok(self.branch_inverse(branch, v))
    }

    /// Inverse of the extended affine branch, no range check.
    pub fn branch_inverse(&self, branch: PhaseLabel, v: f64) -> f64 {
        (v - self.offset(branch)) / self.slope(branch)
    }

    /// max{A, min{v, B}}
    pub fn truncate(&self, v: f64) -> f64 {
        v.min(self.big_b).max(self.big_a)
    }

    /// Slope-weighted mean of the far-field flux values.
    pub fn v_infty(&self, data: &RiemannData) -> f64 {
        let (sm, sp) = (self.m_minus.sqrt(), self.m_plus.sqrt());
        let (vm, vp) = (self.eval(data.u_minus), self.eval(data.u_plus));
        // mean plus a skew term that vanishes exactly for equal slopes
        0.5 * (vm + vp) - 0.5 * (sp - sm) / (sp + sm) * (vp - vm)
    }
}

pub fn phi_eval(phi: &PiecewiseLinearPhi, u: f64) -> f64 {
    phi.eval(u)
}

pub fn phi_inverse(phi: &PiecewiseLinearPhi, branch: PhaseLabel, v: f64) -> Result<f64> {
    phi.inverse(branch, v)
}

pub fn classify_phase(phi: &PiecewiseLinearPhi, u: f64) -> PhaseLabel {
    phi.classify(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannData {
    pub u_minus: f64,
    pub u_plus: f64,
    pub x0: f64,
}

impl RiemannData {
    pub fn new(u_minus: f64, u_plus: f64, x0: f64) -> Self {
        Self { u_minus, u_plus, x0 }
    }

    pub fn check_two_phase(&self, phi: &PiecewiseLinearPhi) -> Result<()> {
        for u in [self.u_minus, self.u_plus] {
            if phi.classify(u) == PhaseLabel::Unstable {
                return Err(Error::NotTwoPhaseData(u));
            }
        }
        if self.u_minus > phi.b || self.u_plus < phi.a {
            return Err(Error::InvalidConfig(format!(
                "expected u- <= b and u+ >= a, got ({}, {})",
                self.u_minus, self.u_plus
            )));
        }
        Ok(())
    }
}

pub fn steady_admissible(phi: &PiecewiseLinearPhi, data: &RiemannData) -> Result<bool> {
    data.check_two_phase(phi)?;
    let v = phi.v_infty(data);
    Ok(v >= phi.big_a && v <= phi.big_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedSign {
    NonNegative,
    NonPositive,
    Zero,
}

impl SpeedSign {
    pub fn admits(self, speed: f64) -> bool {
        match self {
            SpeedSign::NonNegative => speed >= 0.0,
            SpeedSign::NonPositive => speed <= 0.0,
            SpeedSign::Zero => speed == 0.0,
        }
    }
}

/// Sign constraint on the interface speed given the flux value there.
pub fn entropy_speed_sign(phi: &PiecewiseLinearPhi, v_at_interface: f64) -> SpeedSign {
    if v_at_interface <= phi.big_a {
        SpeedSign::NonNegative
    } else if v_at_interface >= phi.big_b {
        SpeedSign::NonPositive
    } else {
        SpeedSign::Zero
    }
}

/// Number of grid points x_j = (j-1) h lying strictly left of x0.
pub fn left_count(n: usize, x0: f64) -> usize {
    let h = 1.0 / (n - 1) as f64;
    let tol = 1e-9 * h;
    (0..n).filter(|&i| (i as f64) * h < x0 - tol).count()
}

pub fn riemann_initial(n: usize, data: &RiemannData) -> Result<GridState> {
    if n < 5 {
        return Err(Error::GridTooSmall(n));
    }
    let l = left_count(n, data.x0);
    let u = (0..n)
        .map(|i| if i < l { data.u_minus } else { data.u_plus })
        .collect();
    Ok(GridState::new(u, 0.0))
}
