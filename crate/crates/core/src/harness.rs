//! Error metrics, convergence sweeps and interface-trajectory comparisons.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{solve_xi_bar, ExactRiemannSolution};
use crate::grid::{points_for_exponent, GridState};
use crate::phase::{steady_admissible, PiecewiseLinearPhi, RiemannData};
use crate::schemes::{run, RunFailure, RunRecord, SchemeConfig, SchemeKind};

/// sqrt(h * sum (U_j - u(t, x_j))^2).
pub fn error_e2(state: &GridState, oracle: &ExactRiemannSolution, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &u) in state.u.iter().enumerate() {
        let (ue, _) = oracle.eval(state.x(i), t)?;
        sum += (u - ue).powi(2);
    }
    Ok((state.h * sum).sqrt())
}

/// Same metric on phi(U) against the exact phi(u).
pub fn error_e2_phi(state: &GridState, oracle: &ExactRiemannSolution, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &u) in state.u.iter().enumerate() {
        let (_, ve) = oracle.eval(state.x(i), t)?;
        sum += (oracle.phi.eval(u) - ve).powi(2);
    }
    Ok((state.h * sum).sqrt())
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Varies h = 2^-j; dt = 2^-k_exp, or h^2/4 when `k_exp` is None.
    VaryH { j_exps: Vec<u32>, k_exp: Option<u32> },
    VaryDt { j_exp: u32, k_exps: Vec<u32> },
}

impl Sweep {
    fn points(&self) -> Vec<(u32, u32)> {
        match self {
            Sweep::VaryH { j_exps, k_exp } => j_exps.iter().map(|&j| (j, k_exp.unwrap_or(2 * j + 2))).collect(),
            Sweep::VaryDt { j_exp, k_exps } => k_exps.iter().map(|&k| (*j_exp, k)).collect(),
        }
    }

    pub fn varies_h(&self) -> bool {
        matches!(self, Sweep::VaryH { .. })
    }
}

#[derive(Debug, Clone)]
pub struct ConvergeSpec {
    pub kind: SchemeKind,
    pub eps: f64,
    pub phi: PiecewiseLinearPhi,
    pub data: RiemannData,
    pub sweep: Sweep,
    pub t_final: f64,
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub j_exp: u32,
    pub k_exp: u32,
    pub h: f64,
    pub dt: f64,
    pub error_e2: f64,
    pub cpu_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// log-log slope of the error against the varied step.
    pub slope: f64,
}

/// Config for a grid of 2^j + 1 points and dt = 2^-k.
pub fn config_for(kind: SchemeKind, eps: f64, j_exp: u32, k_exp: u32, t_final: f64) -> SchemeConfig {
    SchemeConfig {
        kind,
        points: points_for_exponent(j_exp),
        eps,
        dt: (-(k_exp as f64)).exp2(),
        t_final,
        cfl_guard: true,
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Runs every sweep point and measures the phi-space error at `t_final`.
/// Rows come back in sweep order whatever the number of jobs.
pub fn converge(spec: &ConvergeSpec) -> std::result::Result<ConvergenceStudy, RunFailure> {
    let oracle = ExactRiemannSolution::new(&spec.phi, &spec.data).map_err(|e| bare_failure(spec, e))?;
    let points = spec.sweep.points();
    let pool = pool(spec.jobs).map_err(|e| bare_failure(spec, e))?;
    let results: Vec<std::result::Result<ConvergenceRow, RunFailure>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(j, k)| {
                let cfg = config_for(spec.kind, spec.eps, j, k, spec.t_final);
                let rec = run(&cfg, &spec.phi, &spec.data)?;
                let err = error_e2_phi(&rec.final_state, &oracle, spec.t_final)
                    .map_err(|e| RunFailure { error: e, partial: Box::new(rec.clone()) })?;
                Ok(ConvergenceRow { j_exp: j, k_exp: k, h: cfg.h(), dt: cfg.dt, error_e2: err, cpu_seconds: rec.cpu_seconds })
            })
            .collect()
    });
    let rows = results.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    let x: Vec<f64> = rows.iter().map(|r| if spec.sweep.varies_h() { r.h } else { r.dt }).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.error_e2).collect();
    let slope = if rows.len() >= 2 { loglog_slope(&x, &y) } else { f64::NAN };
    Ok(ConvergenceStudy { rows, slope })
}

fn bare_failure(spec: &ConvergeSpec, error: Error) -> RunFailure {
    let cfg = SchemeConfig::new(spec.kind, 5, 1.0, spec.t_final);
    RunFailure {
        error,
        partial: Box::new(RunRecord {
            config: cfg,
            phi: spec.phi,
            data: spec.data,
            final_state: GridState::new(vec![0.0; 5], 0.0),
            snapshots: Vec::new(),
            interface: Vec::new(),
            steps_taken: 0,
            cpu_seconds: 0.0,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub zeta_explicit: f64,
    pub zeta_twophase: f64,
    pub zeta_exact: f64,
    pub rel_err_explicit: f64,
    pub rel_err_twophase: f64,
}

#[derive(Debug, Clone)]
pub struct InterfaceComparison {
    pub xi_bar: f64,
    pub h: f64,
    pub rows: Vec<CompareRow>,
    /// sqrt(t) coefficients of zeta(t) - zeta(0), least squares through the origin.
    pub fit_explicit: f64,
    pub fit_twophase: f64,
}

/// Coefficient c minimizing sum (d_i - c sqrt(t_i))^2.
pub fn sqrt_t_coefficient(t: &[f64], d: &[f64]) -> f64 {
    let num: f64 = t.iter().zip(d).map(|(t, d)| d * t.sqrt()).sum();
    let den: f64 = t.iter().sum();
    num / den
}

/// Runs the explicit scheme and the two-phase scheme side by side at
/// dt = h^2/4 on `points` grid points and compares both interfaces with the
/// exact x0 + xi_bar sqrt(t).
pub fn compare_interface(
    phi: &PiecewiseLinearPhi,
    data: &RiemannData,
    points: usize,
    t_final: f64,
) -> std::result::Result<InterfaceComparison, RunFailure> {
    let h = 1.0 / (points as f64 - 1.0);
    let dt = 0.25 * h * h;
    let base = SchemeConfig::new(SchemeKind::Explicit, points, dt, t_final);
    let early = |e: Error| RunFailure {
        error: e,
        partial: Box::new(RunRecord {
            config: base,
            phi: *phi,
            data: *data,
            final_state: GridState::new(vec![0.0; points.max(2)], 0.0),
            snapshots: Vec::new(),
            interface: Vec::new(),
            steps_taken: 0,
            cpu_seconds: 0.0,
        }),
    };
    if steady_admissible(phi, data).map_err(early)? {
        return Err(early(Error::SteadyData));
    }
    let xi_bar = solve_xi_bar(phi, data).map_err(early)?;
    let explicit = run(&base, phi, data)?;
    let two = run(&SchemeConfig { kind: SchemeKind::TwoPhase, ..base }, phi, data)?;

    let z0e = explicit.interface[0].zeta;
    let z0t = two.interface[0].zeta;
    let mut rows = Vec::with_capacity(explicit.interface.len());
    for (e, p) in explicit.interface.iter().zip(&two.interface).skip(1) {
        let zeta_exact = data.x0 + xi_bar * e.t.sqrt();
        let shift = (zeta_exact - data.x0).abs();
        rows.push(CompareRow {
            t: e.t,
            zeta_explicit: e.zeta,
            zeta_twophase: p.zeta,
            zeta_exact,
            rel_err_explicit: (e.zeta - zeta_exact).abs() / shift,
            rel_err_twophase: (p.zeta - zeta_exact).abs() / shift,
        });
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let de: Vec<f64> = rows.iter().map(|r| r.zeta_explicit - z0e).collect();
    let dp: Vec<f64> = rows.iter().map(|r| r.zeta_twophase - z0t).collect();
    Ok(InterfaceComparison {
        xi_bar,
        h,
        fit_explicit: sqrt_t_coefficient(&ts, &de),
        fit_twophase: sqrt_t_coefficient(&ts, &dp),
        rows,
    })
}
