mod args;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use fbdiff::exact::ExactRiemannSolution;
use fbdiff::harness::{compare_interface, converge, ConvergeSpec, Sweep};
use fbdiff::linalg::general_eigenvalues;
use fbdiff::schemes::{run, SchemeConfig};
use fbdiff::spectral::{build_a_hat, eigenvalues_a, spectrum_b};
use fbdiff::{Error, PiecewiseLinearPhi, RiemannData};

use args::*;

enum Failure {
    Usage(String),
    Numerical(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<fbdiff::schemes::RunFailure> for Failure {
    fn from(f: fbdiff::schemes::RunFailure) -> Self {
        if f.error.is_numerical() {
            Failure::Numerical(f.to_string())
        } else {
            Failure::Usage(f.error.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn open(out: &OutArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Other(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn riemann(d: &DataArgs) -> RiemannData {
    RiemannData::new(d.uminus, d.uplus, d.x0)
}

fn cmd_exact(a: &ExactArgs) -> CmdResult {
    if a.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let phi = PiecewiseLinearPhi::symmetric();
    let sol = ExactRiemannSolution::new(&phi, &riemann(&a.data))?;
    let mut w = open(&a.out)?;
    output::write_exact(&mut w, &sol, a.t_final, a.samples)?;
    Ok(w.flush()?)
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let phi = PiecewiseLinearPhi::symmetric();
    let points = a.grid.points(9);
    let h = 1.0 / (points as f64 - 1.0);
    let dt = match (a.dt, a.k_exp) {
        (Some(dt), _) => dt,
        (None, Some(k)) => (-(k as f64)).exp2(),
        (None, None) => 0.25 * h * h,
    };
    let cfg = SchemeConfig {
        kind: a.scheme.into(),
        points,
        eps: a.eps,
        dt,
        t_final: a.t_final,
        cfl_guard: !a.no_cfl_guard,
    };
    let rec = run(&cfg, &phi, &riemann(&a.data))?;
    let mut w = open(&a.out)?;
    output::write_run(&mut w, &rec, a.emit)?;
    Ok(w.flush()?)
}

fn cmd_spectrum(a: &SpectrumArgs) -> CmdResult {
    let n = a.grid.points(3);
    let mut w = open(&a.out)?;
    match a.matrix {
        MatrixKind::A => output::write_spectrum(&mut w, "j,lambda", &eigenvalues_a(n))?,
        MatrixKind::AHat => {
            let j_star = a.index.unwrap_or(n / 2);
            let hat = build_a_hat(n, j_star)?;
            let mut vals: Vec<f64> = general_eigenvalues(&hat.matrix)?.into_iter().map(|(re, _)| re).collect();
            vals.sort_by(f64::total_cmp);
            output::write_spectrum(&mut w, "j,lambda", &vals)?
        }
        MatrixKind::B => {
            let l = a.index.unwrap_or(n / 2);
            let dec = spectrum_b(n, l)?;
            output::write_spectrum(&mut w, "k,mu_real", &dec.values)?
        }
    }
    Ok(w.flush()?)
}

fn cmd_converge(a: &ConvergeArgs) -> CmdResult {
    if a.from > a.to {
        return Err(Failure::Usage(format!("empty sweep: --from {} > --to {}", a.from, a.to)));
    }
    let range: Vec<u32> = (a.from..=a.to).collect();
    let sweep = match a.vary {
        Vary::H => Sweep::VaryH { j_exps: range, k_exp: a.k_exp },
        Vary::Dt => Sweep::VaryDt {
            j_exp: a.j_exp.ok_or_else(|| Failure::Usage("--vary dt needs --j-exp".into()))?,
            k_exps: range,
        },
    };
    let spec = ConvergeSpec {
        kind: a.scheme.into(),
        eps: a.eps,
        phi: PiecewiseLinearPhi::symmetric(),
        data: riemann(&a.data),
        sweep,
        t_final: a.t_final,
        jobs: a.jobs,
    };
    let study = converge(&spec)?;
    let mut w = open(&a.out)?;
    output::write_convergence(&mut w, &spec, &study)?;
    Ok(w.flush()?)
}

fn cmd_compare(a: &CompareArgs) -> CmdResult {
    let points = match (a.grid.grid, a.grid.j_exp) {
        (Some(n), _) => n,
        (None, Some(j)) => fbdiff::grid::points_for_exponent(j),
        (None, None) => 101,
    };
    let phi = PiecewiseLinearPhi::symmetric();
    let cmp = compare_interface(&phi, &riemann(&a.data), points, a.t_final)?;
    let mut w = open(&a.out)?;
    output::write_comparison(&mut w, &cmp)?;
    Ok(w.flush()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact(a) => cmd_exact(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Converge(a) => cmd_converge(a),
        Command::CompareInterface(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
