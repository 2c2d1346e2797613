//! CSV writers. Floats use 17 significant digits; comment lines start with '#'.

use std::io::{self, Write};

use fbdiff::exact::ExactRiemannSolution;
use fbdiff::harness::{ConvergeSpec, ConvergenceStudy, InterfaceComparison, Sweep};
use fbdiff::schemes::RunRecord;

use crate::args::Emit;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_exact(w: &mut dyn Write, sol: &ExactRiemannSolution, t: f64, samples: usize) -> io::Result<()> {
    let d = &sol.data;
    writeln!(w, "# exact uminus={} uplus={} x0={} t={} kind={:?}", d.u_minus, d.u_plus, d.x0, t, sol.kind)?;
    writeln!(w, "# xi_bar={}", num(sol.xi_bar))?;
    writeln!(w, "x,u,phi")?;
    for i in 0..samples {
        let x = i as f64 / (samples as f64 - 1.0);
        let (u, v) = sol.eval(x, t).map_err(io::Error::other)?;
        writeln!(w, "{},{},{}", num(x), num(u), num(v))?;
    }
    Ok(())
}

fn write_config(w: &mut dyn Write, rec: &RunRecord) -> io::Result<()> {
    let c = &rec.config;
    let d = &rec.data;
    writeln!(
        w,
        "# simulate scheme={} points={} h={} eps={} dt={} t_final={} cfl_guard={} uminus={} uplus={} x0={}",
        c.kind,
        c.points,
        num(c.h()),
        num(c.eps),
        num(c.dt),
        num(c.t_final),
        c.cfl_guard,
        d.u_minus,
        d.u_plus,
        d.x0
    )?;
    writeln!(w, "# steps={}", rec.steps_taken)
}

pub fn write_run(w: &mut dyn Write, rec: &RunRecord, emit: Emit) -> io::Result<()> {
    write_config(w, rec)?;
    let phi = &rec.phi;
    match emit {
        Emit::Final => {
            writeln!(w, "j,x,u,phi")?;
            let st = &rec.final_state;
            for (i, &u) in st.u.iter().enumerate() {
                writeln!(w, "{},{},{},{}", i + 1, num(st.x(i)), num(u), num(phi.eval(u)))?;
            }
        }
        Emit::Snapshots => {
            writeln!(w, "t,j,x,u,phi")?;
            let h = rec.final_state.h;
            for s in &rec.snapshots {
                for (i, (&u, &v)) in s.u.iter().zip(&s.v).enumerate() {
                    writeln!(w, "{},{},{},{},{}", num(s.t), i + 1, num(i as f64 * h), num(u), num(v))?;
                }
            }
        }
        Emit::Interface => {
            writeln!(w, "n,t,zeta,C,T_C,speed,unstable")?;
            for s in &rec.interface {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    s.step,
                    num(s.t),
                    num(s.zeta),
                    opt(s.c),
                    opt(s.level),
                    opt(s.speed),
                    s.unstable
                )?;
            }
        }
    }
    writeln!(w, "# cpu_seconds={}", rec.cpu_seconds)
}

pub fn write_spectrum(w: &mut dyn Write, header: &str, values: &[f64]) -> io::Result<()> {
    writeln!(w, "{header}")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, num(*v))?;
    }
    Ok(())
}

pub fn write_convergence(w: &mut dyn Write, spec: &ConvergeSpec, study: &ConvergenceStudy) -> io::Result<()> {
    let d = &spec.data;
    let vary = match spec.sweep {
        Sweep::VaryH { .. } => "h",
        Sweep::VaryDt { .. } => "dt",
    };
    writeln!(
        w,
        "# converge scheme={} eps={} vary={} t_final={} uminus={} uplus={} x0={} metric=E2_phi",
        spec.kind, spec.eps, vary, spec.t_final, d.u_minus, d.u_plus, d.x0
    )?;
    writeln!(w, "J_exponent,K_exponent,h,dt,error_E2,cpu_seconds")?;
    for r in &study.rows {
        writeln!(w, "{},{},{},{},{},{:.3}", r.j_exp, r.k_exp, num(r.h), num(r.dt), num(r.error_e2), r.cpu_seconds)?;
    }
    writeln!(w, "# slope,{}", num(study.slope))
}

pub fn write_comparison(w: &mut dyn Write, cmp: &InterfaceComparison) -> io::Result<()> {
    writeln!(w, "# compare-interface h={} xi_bar={}", num(cmp.h), num(cmp.xi_bar))?;
    writeln!(w, "t,zeta_explicit,zeta_twophase,zeta_exact,rel_err_explicit,rel_err_twophase")?;
    for r in &cmp.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(r.t),
            num(r.zeta_explicit),
            num(r.zeta_twophase),
            num(r.zeta_exact),
            num(r.rel_err_explicit),
            num(r.rel_err_twophase)
        )?;
    }
    writeln!(w, "# sqrt_t_fit_explicit,{}", num(cmp.fit_explicit))?;
    writeln!(w, "# sqrt_t_fit_twophase,{}", num(cmp.fit_twophase))
}
