//! Self-similar solutions u(x, t) = f((x - x0) / sqrt(t)) of the Riemann problem.

use std::f64::consts::PI;

use puruspe::{erfc, erfcx};

use crate::error::{Error, Result};
use crate::phase::{steady_admissible, PhaseLabel, PiecewiseLinearPhi, RiemannData};

/// Gaussian distribution functions of variance 2m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatKernelCdf {
    pub m: f64,
}

impl HeatKernelCdf {
    pub fn new(m: f64) -> Result<Self> {
        if m > 0.0 && m.is_finite() {
            Ok(Self { m })
        } else {
            Err(Error::NonPositiveDiffusivity(m))
        }
    }

    fn z(&self, xi: f64) -> f64 {
        xi / (2.0 * self.m.sqrt())
    }

    /// Mass left of xi.
    pub fn e_minus(&self, xi: f64) -> f64 {
        0.5 * erfc(-self.z(xi))
    }

    /// Mass right of xi.
    pub fn e_plus(&self, xi: f64) -> f64 {
        0.5 * erfc(self.z(xi))
    }

    pub fn density(&self, xi: f64) -> f64 {
        (-xi * xi / (4.0 * self.m)).exp() / (4.0 * PI * self.m).sqrt()
    }

    /// e^{xi^2/4m} E-(xi)
    pub fn scaled_e_minus(&self, xi: f64) -> f64 {
        0.5 * erfcx(-self.z(xi))
    }

    /// e^{xi^2/4m} E+(xi)
    pub fn scaled_e_plus(&self, xi: f64) -> f64 {
        0.5 * erfcx(self.z(xi))
    }

    /// e^{xi^2/4m} E+(xi) E-(xi), finite for all xi.
    pub fn scaled_product(&self, xi: f64) -> f64 {
        let z = self.z(xi).abs();
        0.25 * erfcx(z) * erfc(-z)
    }
}

pub fn e_minus(m: f64, xi: f64) -> Result<f64> {
    Ok(HeatKernelCdf::new(m)?.e_minus(xi))
}

pub fn e_plus(m: f64, xi: f64) -> Result<f64> {
    Ok(HeatKernelCdf::new(m)?.e_plus(xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Steady,
    MovingLeft,
    MovingRight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRiemannSolution {
    pub data: RiemannData,
    pub phi: PiecewiseLinearPhi,
    pub kind: SolutionKind,
    pub xi_bar: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub v_infty: f64,
    left: PhaseLabel,
    right: PhaseLabel,
}

fn flux_jump(phi: &PiecewiseLinearPhi, data: &RiemannData) -> f64 {
    phi.eval(data.u_plus) - phi.eval(data.u_minus)
}

/// Interface-side flux g(xi) for data with a steady interface at xi = 0.
pub fn steady_g(phi: &PiecewiseLinearPhi, data: &RiemannData, xi: f64) -> Result<f64> {
    if !steady_admissible(phi, data)? {
        return Err(Error::NotSteadyData);
    }
    let (kp, km) = steady_kappa(phi, data);
    Ok(if xi < 0.0 {
        phi.eval(data.u_minus) + km * HeatKernelCdf { m: phi.m_minus }.e_minus(xi)
    } else {
        phi.eval(data.u_plus) - kp * HeatKernelCdf { m: phi.m_plus }.e_plus(xi)
    })
}

/// (kappa+, kappa-) at xi_bar = 0.
pub fn steady_kappa(phi: &PiecewiseLinearPhi, data: &RiemannData) -> (f64, f64) {
    let (sp, sm) = (phi.m_plus.sqrt(), phi.m_minus.sqrt());
    let jump = flux_jump(phi, data);
    (2.0 * sp * jump / (sp + sm), 2.0 * sm * jump / (sp + sm))
}

/// Determinant of the transmission system for general slopes.
pub fn general_delta(phi: &PiecewiseLinearPhi, xi_bar: f64) -> f64 {
    let (mp, mm) = (phi.m_plus, phi.m_minus);
    let fp = mp.sqrt() * HeatKernelCdf { m: mp }.scaled_e_plus(xi_bar);
    let fm = mm.sqrt() * HeatKernelCdf { m: mm }.scaled_e_minus(xi_bar);
    (-0.25 * xi_bar * xi_bar * (1.0 / mp + 1.0 / mm)).exp() / (mp * mm).sqrt()
        * (fp + fm + PI.sqrt() * (mp - mm) / (mp * mm) * xi_bar * fp * fm)
}

/// (kappa+, kappa-) solving the transmission conditions for a trial xi_bar.
pub fn general_kappa(phi: &PiecewiseLinearPhi, data: &RiemannData, xi_bar: f64) -> (f64, f64) {
    let (mp, mm) = (phi.m_plus, phi.m_minus);
    let (kp_cdf, km_cdf) = (HeatKernelCdf { m: mp }, HeatKernelCdf { m: mm });
    let delta = general_delta(phi, xi_bar);
    let jump = flux_jump(phi, data);
    let branch_gap = |u: f64| {
        phi.branch_eval(PhaseLabel::StablePlus, u) - phi.branch_eval(PhaseLabel::StableMinus, u)
    };
    let kp = (-xi_bar * xi_bar / (4.0 * mm)).exp() / (mm.sqrt() * delta) * jump
        + PI.sqrt() / mm * branch_gap(data.u_plus) * xi_bar * km_cdf.e_minus(xi_bar) / delta;
    let km = (-xi_bar * xi_bar / (4.0 * mp)).exp() / (mp.sqrt() * delta) * jump
        - PI.sqrt() / mp * branch_gap(data.u_minus) * xi_bar * kp_cdf.e_plus(xi_bar) / delta;
    (kp, km)
}

fn equal_slope(phi: &PiecewiseLinearPhi) -> Result<f64> {
    if phi.m_plus != phi.m_minus {
        return Err(Error::UnequalSlopes(phi.m_minus, phi.m_plus));
    }
    Ok(phi.m_plus)
}

/// Flux profile of the moving-interface solution for a trial xi_bar (equal slopes).
pub fn moving_g(phi: &PiecewiseLinearPhi, data: &RiemannData, xi_bar: f64, xi: f64) -> Result<f64> {
    let m = equal_slope(phi)?;
    Ok(moving_g_unchecked(phi, data, m, xi_bar, xi))
}

fn moving_coupling(phi: &PiecewiseLinearPhi, m: f64) -> f64 {
    (PI / m).sqrt() * (phi.q_plus - phi.q_minus)
}

fn moving_g_unchecked(phi: &PiecewiseLinearPhi, data: &RiemannData, m: f64, xb: f64, xi: f64) -> f64 {
    moving_piece(phi, data, m, xb, xi, xi < xb)
}

/// One side of the moving profile, valid for any xi.
fn moving_piece(phi: &PiecewiseLinearPhi, data: &RiemannData, m: f64, xb: f64, xi: f64, left: bool) -> f64 {
    let k = HeatKernelCdf { m };
    let jump = flux_jump(phi, data);
    let s = moving_coupling(phi, m);
    if left {
        // xb e^{xb^2/4m} E+(xb) E-(xi)
        let t1 = if xb >= 0.0 || xi > xb {
            xb * k.scaled_e_plus(xb) * k.e_minus(xi)
        } else {
            xb * k.e_plus(xb) * ((xb * xb - xi * xi) / (4.0 * m)).exp() * k.scaled_e_minus(xi)
        };
        phi.eval(data.u_minus) + jump * k.e_minus(xi) - s * t1
    } else {
        // xb e^{xb^2/4m} E-(xb) E+(xi)
        let t2 = if xb <= 0.0 || xi < xb {
            xb * k.scaled_e_minus(xb) * k.e_plus(xi)
        } else {
            xb * k.e_minus(xb) * ((xb * xb - xi * xi) / (4.0 * m)).exp() * k.scaled_e_plus(xi)
        };
        phi.eval(data.u_plus) - jump * k.e_plus(xi) - s * t2
    }
}

/// Common interface value of both sides of the moving profile at xi_bar.
fn interface_function(phi: &PiecewiseLinearPhi, data: &RiemannData, m: f64, xb: f64) -> (f64, f64) {
    let k = HeatKernelCdf { m };
    let jump = flux_jump(phi, data);
    let s = moving_coupling(phi, m);
    let p = k.scaled_product(xb);
    let dp = xb / (2.0 * m) * p + (k.e_plus(xb) - k.e_minus(xb)) / (4.0 * PI * m).sqrt();
    let g = phi.eval(data.u_minus) + jump * k.e_minus(xb) - s * xb * p;
    let dg = jump * k.density(xb) - s * (p + xb * dp);
    (g, dg)
}

pub fn solve_xi_bar(phi: &PiecewiseLinearPhi, data: &RiemannData) -> Result<f64> {
    let m = equal_slope(phi)?;
    data.check_two_phase(phi)?;
    let mean = 0.5 * (phi.eval(data.u_minus) + phi.eval(data.u_plus));
    let (target, mut lo, mut hi) = if mean > phi.big_b {
        (phi.big_b, -20.0 * m.sqrt(), 0.0)
    } else if mean < phi.big_a {
        (phi.big_a, 0.0, 20.0 * m.sqrt())
    } else {
        return Err(Error::SteadyData);
    };
    let f = |x: f64| interface_function(phi, data, m, x).0 - target;
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure {
            lo: -20.0 * m.sqrt(),
            hi: 20.0 * m.sqrt(),
        });
    }
    let lo_sign = flo.signum();
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let (g, dg) = interface_function(phi, data, m, x);
        let r = g - target;
        if r == 0.0 || dg == 0.0 {
            break;
        }
        let next = x - r / dg;
        if !(next >= lo && next <= hi) {
            break;
        }
        x = next;
    }
    if f(x).abs() >= 1e-10 {
        return Err(Error::ConvergenceFailure(5));
    }
    Ok(x)
}

impl ExactRiemannSolution {
    pub fn new(phi: &PiecewiseLinearPhi, data: &RiemannData) -> Result<Self> {
        let left = phi.classify(data.u_minus);
        let right = phi.classify(data.u_plus);
        if left == PhaseLabel::Unstable {
            return Err(Error::NotTwoPhaseData(data.u_minus));
        }
        if right == PhaseLabel::Unstable {
            return Err(Error::NotTwoPhaseData(data.u_plus));
        }
        if left == right {
            // one phase: plain linear diffusion, no interface
            let jump = flux_jump(phi, data);
            return Ok(Self {
                data: *data,
                phi: *phi,
                kind: SolutionKind::Steady,
                xi_bar: 0.0,
                kappa_minus: jump,
                kappa_plus: jump,
                v_infty: 0.5 * (phi.eval(data.u_minus) + phi.eval(data.u_plus)),
                left,
                right,
            });
        }
        if steady_admissible(phi, data)? {
            let (kp, km) = steady_kappa(phi, data);
            return Ok(Self {
                data: *data,
                phi: *phi,
                kind: SolutionKind::Steady,
                xi_bar: 0.0,
                kappa_minus: km,
                kappa_plus: kp,
                v_infty: phi.v_infty(data),
                left,
                right,
            });
        }
        let m = equal_slope(phi)?;
        let xi_bar = solve_xi_bar(phi, data)?;
        let k = HeatKernelCdf { m };
        let jump = flux_jump(phi, data);
        let s = moving_coupling(phi, m);
        let kp = jump + s * xi_bar * k.scaled_e_minus(xi_bar);
        let km = jump - s * xi_bar * k.scaled_e_plus(xi_bar);
        let (kind, level) = if xi_bar < 0.0 {
            (SolutionKind::MovingLeft, phi.big_b)
        } else {
            (SolutionKind::MovingRight, phi.big_a)
        };
        Ok(Self {
            data: *data,
            phi: *phi,
            kind,
            xi_bar,
            kappa_minus: km,
            kappa_plus: kp,
            v_infty: level,
            left,
            right,
        })
    }

    fn side_cdf(&self, side: PhaseLabel) -> HeatKernelCdf {
        HeatKernelCdf {
            m: self.phi.slope(side),
        }
    }

    /// Left piece of g, extended past xi_bar.
    pub fn g_left(&self, xi: f64) -> f64 {
        match self.kind {
            SolutionKind::Steady => {
                self.phi.eval(self.data.u_minus) + self.kappa_minus * self.side_cdf(self.left).e_minus(xi)
            }
            _ => moving_piece(&self.phi, &self.data, self.phi.m_minus, self.xi_bar, xi, true),
        }
    }

    /// Right piece of g, extended past xi_bar.
    pub fn g_right(&self, xi: f64) -> f64 {
        match self.kind {
            SolutionKind::Steady => {
                self.phi.eval(self.data.u_plus) - self.kappa_plus * self.side_cdf(self.right).e_plus(xi)
            }
            _ => moving_piece(&self.phi, &self.data, self.phi.m_plus, self.xi_bar, xi, false),
        }
    }

    pub fn g_left_prime(&self, xi: f64) -> f64 {
        self.kappa_minus * self.side_cdf(self.left).density(xi)
    }

    pub fn g_right_prime(&self, xi: f64) -> f64 {
        self.kappa_plus * self.side_cdf(self.right).density(xi)
    }

    pub fn g(&self, xi: f64) -> f64 {
        if xi < self.xi_bar {
            self.g_left(xi)
        } else {
            self.g_right(xi)
        }
    }

    pub fn f_left(&self, xi: f64) -> f64 {
        self.phi.branch_inverse(self.left, self.g_left(xi))
    }

    pub fn f_right(&self, xi: f64) -> f64 {
        self.phi.branch_inverse(self.right, self.g_right(xi))
    }

    pub fn f(&self, xi: f64) -> f64 {
        if xi < self.xi_bar {
            self.f_left(xi)
        } else {
            self.f_right(xi)
        }
    }

    /// (u, phi(u)) at (x, t).
    pub fn eval(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::NonPositiveTime(t));
        }
        let xi = (x - self.data.x0) / t.sqrt();
        let v = self.g(xi);
        let side = if xi < self.xi_bar { self.left } else { self.right };
        Ok((self.phi.branch_inverse(side, v), v))
    }

    /// (u just left, u just right) of the interface.
    pub fn interface_values(&self) -> (f64, f64) {
        (self.f_left(self.xi_bar), self.f_right(self.xi_bar))
    }

    pub fn interface_position(&self, t: f64) -> f64 {
        self.data.x0 + self.xi_bar * t.max(0.0).sqrt()
    }
}

pub fn exact_eval(sol: &ExactRiemannSolution, x: f64, t: f64) -> Result<(f64, f64)> {
    sol.eval(x, t)
}

/// Max central-difference residual of phi(f)'' + xi f' / 2 on an equispaced grid,
/// skipping stencils that straddle xi_bar.
pub fn residual_selfsimilar_ode(sol: &ExactRiemannSolution, lo: f64, hi: f64, n: usize) -> f64 {
    let dx = (hi - lo) / (n - 1) as f64;
    let mut worst = 0.0f64;
    for k in 1..n - 1 {
        let xi = lo + k as f64 * dx;
        let (a, b) = (xi - dx, xi + dx);
        let left = b < sol.xi_bar;
        let right = a >= sol.xi_bar;
        if !left && !right {
            continue;
        }
        let (g, f): (&dyn Fn(f64) -> f64, &dyn Fn(f64) -> f64) = if left {
            (&|s| sol.g_left(s), &|s| sol.f_left(s))
        } else {
            (&|s| sol.g_right(s), &|s| sol.f_right(s))
        };
        let d2 = (g(b) - 2.0 * g(xi) + g(a)) / (dx * dx);
        let d1 = (f(b) - f(a)) / (2.0 * dx);
        worst = worst.max((d2 + 0.5 * xi * d1).abs());
    }
    worst
}

/// (jump of phi(f), Rankine-Hugoniot defect) at xi_bar.
pub fn residual_jump(sol: &ExactRiemannSolution) -> (f64, f64) {
    let xb = sol.xi_bar;
    let jump_v = sol.g_right(xb) - sol.g_left(xb);
    let (ul, ur) = sol.interface_values();
    let rh = sol.g_right_prime(xb) - sol.g_left_prime(xb) + 0.5 * xb * (ur - ul);
    (jump_v, rh)
}
