mod common;

use fbdiff::exact::{solve_xi_bar, ExactRiemannSolution};
use fbdiff::grid::GridState;
use fbdiff::linalg::{DenseMatrix, Lu};
use fbdiff::phase::{entropy_speed_sign, riemann_initial, PhaseLabel, PiecewiseLinearPhi, RiemannData};
use fbdiff::schemes::*;
use fbdiff::spectral::{build_a_hat, expa_apply, DefectMatrix, NeumannLaplacian};
use fbdiff::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use common::max_abs;

fn sym() -> PiecewiseLinearPhi {
    PiecewiseLinearPhi::symmetric()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Two stable blocks with phi = v everywhere, split after `l` points.
fn flat_two_phase(phi: &PiecewiseLinearPhi, n: usize, l: usize, v: f64) -> GridState {
    let u = (0..n)
        .map(|i| {
            let side = if i < l { PhaseLabel::StableMinus } else { PhaseLabel::StablePlus };
            phi.branch_inverse(side, v)
        })
        .collect();
    GridState::new(u, 0.0)
}

#[test]
fn phi_constant_states_are_fixed_points() {
    let phi = sym();
    let n = 33;
    let h = 1.0 / 32.0;
    let dt = 0.25 * h * h;
    for v in [-0.7, 0.0, 0.4, 1.0] {
        let st = flat_two_phase(&phi, n, 12, v);
        let e = step_explicit(&st, &phi, dt, 0.0, true).unwrap();
        assert!(max_abs(&diff(&e.u, &st.u)) < 1e-14);
        let e = step_explicit(&st, &phi, dt, 1e-3, true).unwrap();
        assert!(max_abs(&diff(&e.u, &st.u)) < 1e-12);
        let i = step_implicit(&st, &phi, 10.0 * dt).unwrap();
        assert!(max_abs(&diff(&i.u, &st.u)) < 1e-12);
        let track = InterfaceTrack { zeta: 11.5 * h, j_star: 12, c_value: f64::NAN, level: f64::NAN, speed: 0.0 };
        let (t, tr) = two_phase_step(&st, &track, &phi, dt).unwrap();
        assert!(max_abs(&diff(&t.u, &st.u)) < 1e-14);
        assert_eq!(tr.speed, 0.0);
        assert_eq!(tr.j_star, 12);
    }
    // a state sitting in the unstable phase with constant phi is also stationary
    let st = GridState::new(vec![0.0; n], 0.0);
    assert_eq!(step_explicit(&st, &phi, dt, 0.0, true).unwrap().u, st.u);
    assert!(max_abs(&step_implicit(&st, &phi, dt).unwrap().u) < 1e-14);
}

#[test]
fn explicit_conserves_mass() {
    let phi = sym();
    let n = 65;
    let h = 1.0 / 64.0;
    let mut st = riemann_initial(n, &RiemannData::new(-2.0, 4.0, 0.5)).unwrap();
    let m0 = st.mass();
    for _ in 0..2000 {
        st = step_explicit(&st, &phi, 0.25 * h * h, 0.0, true).unwrap();
    }
    assert!((st.mass() - m0).abs() < 1e-10 * m0.abs().max(1.0), "{} vs {}", st.mass(), m0);
}

#[test]
fn implicit_conserves_mass_in_stable_regime() {
    let phi = sym();
    let n = 65;
    let mut st = riemann_initial(n, &RiemannData::new(-1.5, 2.0, 0.3)).unwrap();
    let m0 = st.mass();
    for _ in 0..50 {
        st = step_implicit(&st, &phi, 1e-3).unwrap();
    }
    assert!((st.mass() - m0).abs() < 1e-10);
}

#[test]
fn cfl_guard() {
    let phi = sym();
    let st = riemann_initial(17, &RiemannData::new(-2.0, 4.0, 0.5)).unwrap();
    let h = st.h;
    assert!(matches!(step_explicit(&st, &phi, 0.26 * h * h, 0.0, true), Err(Error::CflViolation(_))));
    assert!(step_explicit(&st, &phi, 0.26 * h * h, 0.0, false).is_ok());
    assert!(step_explicit(&st, &phi, 0.25 * h * h, 0.0, true).is_ok());
    let track = InterfaceTrack::from_data(17, &RiemannData::new(-2.0, 4.0, 0.5));
    assert!(matches!(two_phase_step(&st, &track, &phi, 0.3 * h * h), Err(Error::CflViolation(_))));
}

#[test]
fn regularized_step_matches_dense_solve() {
    let phi = sym();
    let n = 21;
    let st = riemann_initial(n, &RiemannData::new(-2.0, 4.0, 0.4)).unwrap();
    let (h, eps, dt) = (st.h, 1e-2, 1e-4);
    let a = NeumannLaplacian::new(n).dense();
    let m = DenseMatrix::from_fn(n, |i, j| eps * a[(i, j)] + if i == j { h * h } else { 0.0 });
    let rate = Lu::new(&m).unwrap().solve(&a.mul_vec(&st.phi_values(&phi)));
    let expect: Vec<f64> = st.u.iter().zip(&rate).map(|(u, r)| u - dt * r).collect();
    let got = step_explicit(&st, &phi, dt, eps, true).unwrap();
    assert!(max_abs(&diff(&got.u, &expect)) < 1e-12);
}

#[test]
fn regime_single_phase_is_scaled_laplacian() {
    let phi = sym();
    let n = 12;
    let st = GridState::new((0..n).map(|i| 1.2 + 0.1 * i as f64).collect(), 0.0);
    let reg = detect_regime(&st, &phi);
    let a = NeumannLaplacian::new(n).dense();
    let two_a = DenseMatrix::from_fn(n, |i, j| 2.0 * a[(i, j)]);
    assert!(reg.dense_m().max_abs_diff(&two_a) < 1e-15);
    assert!(max_abs(&reg.w) < 1e-15);
    assert!(reg.pattern.iter().all(|&p| p == PhaseLabel::StablePlus));
}

#[test]
fn regime_of_transition_configuration_is_defect_system() {
    let phi = sym();
    for (n, l) in [(10, 3), (16, 8), (9, 7)] {
        let mut u: Vec<f64> = (0..n).map(|i| if i < l { -1.0 } else { 2.3 }).collect();
        u[l - 1] = -0.999;
        let reg = detect_regime(&GridState::new(u, 0.0), &phi);
        let b = DefectMatrix::new(n, l).unwrap();
        assert!(reg.dense_m().max_abs_diff(&b.dense()) < 1e-15);
        assert!(max_abs(&diff(&reg.w, &b.forcing())) < 1e-15);
    }
}

#[test]
fn regime_residual_is_laplacian_of_phi() {
    // M U - W = A phi(U), so dV/ds = -A V with V = phi(U), s = 2t/h^2 on stable points
    let phi = sym();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let n = 30;
    let u: Vec<f64> = (0..n)
        .map(|i| if i < 13 { rng.gen_range(-3.0..-1.0) } else { rng.gen_range(1.0..3.0) })
        .collect();
    let st = GridState::new(u.clone(), 0.0);
    let reg = detect_regime(&st, &phi);
    let mu = reg.dense_m().mul_vec(&u);
    let lhs: Vec<f64> = mu.iter().zip(&reg.w).map(|(a, b)| a - b).collect();
    let rhs = NeumannLaplacian::new(n).apply(&st.phi_values(&phi));
    assert!(max_abs(&diff(&lhs, &rhs)) < 1e-13);
}

#[test]
fn implicit_large_step_projects_onto_mean() {
    let phi = sym();
    let n = 17;
    let u: Vec<f64> = (0..n).map(|i| 1.5 + 0.5 * (i as f64 * 0.7).sin()).collect();
    let st = GridState::new(u, 0.0);
    let out = step_implicit(&st, &phi, 1e6).unwrap();
    let v_limit = expa_apply(n, 1e9, &st.phi_values(&phi));
    assert!(max_abs(&diff(&out.phi_values(&phi), &v_limit)) < 1e-6);
}

#[test]
fn implicit_and_explicit_agree_as_dt_shrinks() {
    let phi = sym();
    let n = 17;
    let h = 1.0 / 16.0;
    let u0: Vec<f64> = (0..n).map(|i| 1.5 + 0.5 * (i as f64 * 0.9).cos()).collect();
    let t_end = 0.01;
    let integrate = |dt: f64, implicit: bool| {
        let mut st = GridState::new(u0.clone(), 0.0);
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            st = if implicit { step_implicit(&st, &phi, dt).unwrap() } else { step_explicit(&st, &phi, dt, 0.0, true).unwrap() };
        }
        st.u
    };
    let dt0 = 0.25 * h * h;
    let d1 = max_abs(&diff(&integrate(dt0, true), &integrate(dt0, false)));
    let d2 = max_abs(&diff(&integrate(dt0 / 2.0, true), &integrate(dt0 / 2.0, false)));
    let ratio = d1 / d2;
    assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn implicit_localizes_phase_crossings() {
    // (-2,4) drives a point through the unstable phase; the step must still
    // conserve mass and end with a consistent phase pattern
    let phi = sym();
    let n = 33;
    let mut st = riemann_initial(n, &RiemannData::new(-2.0, 4.0, 0.5)).unwrap();
    let m0 = st.mass();
    let mut crossed = false;
    for _ in 0..400 {
        let before = st.phases(&phi);
        st = step_implicit(&st, &phi, 2e-4).unwrap();
        crossed |= before != st.phases(&phi);
    }
    assert!(crossed);
    assert!((st.mass() - m0).abs() < 1e-9);
    assert!(st.u.iter().all(|x| x.is_finite()));
}

#[test]
fn threshold_examples() {
    let phi = sym();
    let st = GridState::new(vec![-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0], 0.0);
    assert_eq!(locate_interface_threshold(&st, &phi).unwrap(), (4, 5));
    let st = GridState::new(vec![-2.0, -2.0, -1.5, 0.3, 2.0, 2.5, 3.0], 0.0);
    let (l, r) = locate_interface_threshold(&st, &phi).unwrap();
    assert_eq!(r - l, 2);
    let st = GridState::new(vec![1.5; 9], 0.0);
    assert!(matches!(locate_interface_threshold(&st, &phi), Err(Error::NoInterface)));
}

#[test]
fn two_phase_transition_value_inside_range() {
    let phi = sym();
    let n = 17;
    let h = 1.0 / 16.0;
    // phi = -0.2 on the left bulk, 0.6 on the right bulk -> C = 0.2
    let mut st = flat_two_phase(&phi, n, 8, -0.2);
    for i in 8..n {
        st.u[i] = phi.branch_inverse(PhaseLabel::StablePlus, 0.6);
    }
    let track = InterfaceTrack { zeta: 7.5 * h, j_star: 8, c_value: f64::NAN, level: f64::NAN, speed: 0.0 };
    let (out, tr) = two_phase_step(&st, &track, &phi, 0.2 * h * h).unwrap();
    assert!((tr.c_value - 0.2).abs() < 1e-15);
    assert_eq!(tr.level, tr.c_value);
    assert_eq!(tr.speed, 0.0);
    assert_eq!(tr.zeta, track.zeta);
    assert!((phi.eval(out.u[7]) - 0.2).abs() < 1e-15);
    assert!((phi.eval(out.u[8]) - 0.2).abs() < 1e-15);
}

#[test]
fn two_phase_truncation_above_and_below() {
    let phi = sym();
    let n = 41;
    let h = 1.0 / 40.0;
    let dt = 0.25 * h * h;
    // x0 strictly inside a cell so one step cannot change j_star
    let data = RiemannData::new(-2.0, 4.0, 0.49);
    let st = riemann_initial(n, &data).unwrap();
    let track = InterfaceTrack::from_data(n, &data);
    let (out, tr) = two_phase_step(&st, &track, &phi, dt).unwrap();
    let k = track.j_star - 1;
    assert_eq!(tr.j_star, track.j_star);
    assert_eq!(tr.level, phi.big_b);
    assert!(tr.speed < 0.0);
    assert_eq!((out.u[k], out.u[k + 1]), (-1.0, 2.0));

    let data = RiemannData::new(-4.0, 2.0, 0.49);
    let st = riemann_initial(n, &data).unwrap();
    let track = InterfaceTrack::from_data(n, &data);
    let (out, tr) = two_phase_step(&st, &track, &phi, dt).unwrap();
    assert_eq!(tr.level, phi.big_a);
    assert!(tr.speed > 0.0);
    assert_eq!((out.u[k], out.u[k + 1]), (-2.0, 1.0));
}

#[test]
fn two_phase_rejects_boundary_interface() {
    let phi = sym();
    let st = flat_two_phase(&phi, 9, 1, 0.0);
    let track = InterfaceTrack { zeta: 0.01, j_star: 1, c_value: f64::NAN, level: f64::NAN, speed: 0.0 };
    assert!(matches!(two_phase_step(&st, &track, &phi, 1e-4), Err(Error::InterfaceAtBoundary(1))));
}

#[test]
fn frozen_interface_step_matches_reduced_laplacian() {
    let phi = sym();
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    let n = 24;
    let j_star = 11;
    let h = 1.0 / (n as f64 - 1.0);
    let dt = 0.2 * h * h;
    let u: Vec<f64> = (0..n)
        .map(|i| {
            let v = rng.gen_range(-0.9..0.9);
            let side = if i < j_star { PhaseLabel::StableMinus } else { PhaseLabel::StablePlus };
            phi.branch_inverse(side, v)
        })
        .collect();
    let st = GridState::new(u, 0.0);
    let track = InterfaceTrack { zeta: (j_star as f64 - 0.5) * h, j_star, c_value: f64::NAN, level: f64::NAN, speed: 0.0 };
    let (out, tr) = two_phase_step(&st, &track, &phi, dt).unwrap();
    assert_eq!(tr.j_star, j_star);
    let hat = build_a_hat(n, j_star).unwrap();
    let kept = hat.kept();
    let v_hat: Vec<f64> = kept.iter().map(|&i| phi.eval(st.u[i])).collect();
    let av = hat.matrix.mul_vec(&v_hat);
    let s = 2.0 * dt / (h * h);
    for (r, &i) in kept.iter().enumerate() {
        let expect = v_hat[r] - s * av[r];
        assert!((phi.eval(out.u[i]) - expect).abs() < 1e-12, "row {i}");
    }
}

#[test]
fn cell_index_keeps_node_ties() {
    let h = 0.1;
    assert_eq!(cell_of(0.5, h, 5), 5);
    assert_eq!(cell_of(0.5, h, 6), 6);
    assert_eq!(cell_of(0.39, h, 5), 4);
    assert_eq!(cell_of(0.61, h, 5), 7);
}

fn check_entropy_run(phi: &PiecewiseLinearPhi, data: &RiemannData, n: usize, t_final: f64) -> Result<(), String> {
    let h = 1.0 / (n as f64 - 1.0);
    let cfg = SchemeConfig::new(SchemeKind::TwoPhase, n, 0.25 * h * h, t_final);
    let rec = run(&cfg, phi, data).map_err(|e| e.to_string())?;
    for s in rec.interface.iter().skip(1) {
        if s.unstable != 0 {
            return Err(format!("unstable point at step {}", s.step));
        }
        let (c, level, speed) = (s.c.unwrap(), s.level.unwrap(), s.speed.unwrap());
        if !entropy_speed_sign(phi, level).admits(speed) {
            return Err(format!("speed {speed} at level {level}, step {}", s.step));
        }
        if level == c && speed != 0.0 {
            return Err(format!("moving with T(C) = C at step {}", s.step));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn two_phase_respects_entropy(um in -4.0f64..-1.0, up in 1.0f64..5.0, x0 in 0.3f64..0.7) {
        let phi = sym();
        let res = check_entropy_run(&phi, &RiemannData::new(um, up, x0), 65, 0.01);
        prop_assert!(res.is_ok(), "{:?}", res);
    }
}

#[test]
fn explicit_passes_through_spinodal_region() {
    let phi = sym();
    let n = 65;
    let h = 1.0 / 64.0;
    let mut st = riemann_initial(n, &RiemannData::new(-2.0, 4.0, 0.5)).unwrap();
    let mut was_left = vec![false; n];
    let mut visited_unstable = vec![false; n];
    let mut passage = false;
    for _ in 0..4000 {
        st = step_explicit(&st, &phi, 0.25 * h * h, 0.0, true).unwrap();
        for (i, &p) in st.phases(&phi).iter().enumerate() {
            match p {
                PhaseLabel::StableMinus => was_left[i] = true,
                PhaseLabel::Unstable if was_left[i] => visited_unstable[i] = true,
                PhaseLabel::StablePlus if visited_unstable[i] => passage = true,
                _ => {}
            }
        }
    }
    assert!(passage, "no point crossed from the minus phase to the plus phase");
}

#[test]
fn explicit_interface_moves_left_like_sqrt_t() {
    let phi = sym();
    let data = RiemannData::new(-2.0, 4.0, 0.5);
    let n = 101;
    let h = 0.01;
    let rec = run(&SchemeConfig::new(SchemeKind::Explicit, n, 0.25 * h * h, 0.05), &phi, &data).unwrap();
    let z: Vec<f64> = rec.interface.iter().map(|s| s.zeta).collect();
    assert!(z.last().unwrap() < &z[0]);
    let xi_bar = solve_xi_bar(&phi, &data).unwrap();
    let exact_end = data.x0 + xi_bar * 0.05f64.sqrt();
    assert!((z.last().unwrap() - exact_end).abs() < 2.0 * h);
}

#[test]
fn two_phase_boundary_admissible_data_settles_on_interface_value() {
    let phi = sym();
    let data = RiemannData::new(-2.0, 3.0, 0.5);
    let n = 33;
    let h = 1.0 / 32.0;
    let rec = run(&SchemeConfig::new(SchemeKind::TwoPhase, n, 0.25 * h * h, 1.5), &phi, &data).unwrap();
    let v = rec.final_state.phi_values(&phi);
    assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-6), "{v:?}");
    let drift = rec.interface.iter().map(|s| (s.zeta - 0.5).abs()).fold(0.0, f64::max);
    // C overshoots B by rounding-sized amounts early on; the interface stays in its cell
    assert!(drift < 0.5 * h, "drift {drift}");
}

#[test]
fn run_record_shape() {
    let phi = sym();
    let data = RiemannData::new(-1.0, 1.0, 0.5);
    let n = 65;
    let h = 1.0 / 64.0;
    let cfg = SchemeConfig::new(SchemeKind::Explicit, n, 0.25 * h * h, 0.05);
    let rec = run(&cfg, &phi, &data).unwrap();
    assert_eq!(rec.steps_taken, cfg.steps());
    assert_eq!(rec.interface.len(), cfg.steps() + 1);
    assert!(rec.snapshots.len() <= MAX_SNAPSHOTS);
    assert!(rec.snapshots.windows(2).all(|w| w[0].t < w[1].t));
    assert!(rec.interface.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(rec.snapshots.last().unwrap().t, 0.05);
    assert_eq!(rec.final_state.t, 0.05);
    let again = run(&cfg, &phi, &data).unwrap();
    assert_eq!(again.final_state.u, rec.final_state.u);
}

#[test]
fn run_failures_keep_partial_record() {
    let phi = sym();
    let data = RiemannData::new(-2.0, 4.0, 0.5);
    let bad = SchemeConfig::new(SchemeKind::Explicit, 33, 1e-3, 0.01);
    let f = run(&bad, &phi, &data).unwrap_err();
    assert!(matches!(f.error, Error::CflViolation(_)));

    let f = run(&SchemeConfig { eps: 0.1, ..SchemeConfig::new(SchemeKind::Implicit, 33, 1e-4, 0.01) }, &phi, &data).unwrap_err();
    assert!(matches!(f.error, Error::InvalidConfig(_)));

    let f = run(&SchemeConfig::new(SchemeKind::TwoPhase, 33, 1e-4, 0.01), &phi, &RiemannData::new(0.0, 2.0, 0.5)).unwrap_err();
    assert!(matches!(f.error, Error::NotTwoPhaseData(_)));

    // the interface of (-2,4) runs into the left wall when x0 is close to it
    let near = RiemannData::new(-2.0, 4.0, 0.1);
    let h = 1.0 / 32.0;
    let f = run(&SchemeConfig::new(SchemeKind::TwoPhase, 33, 0.25 * h * h, 1.0), &phi, &near).unwrap_err();
    assert!(matches!(f.error, Error::InterfaceAtBoundary(_)), "{f}");
    assert!(f.partial.steps_taken > 0);
    assert_eq!(f.partial.interface.len(), f.partial.steps_taken + 1);
}

#[test]
fn two_phase_error_shrinks_with_h() {
    let phi = sym();
    let data = RiemannData::new(-2.0, 4.0, 0.5);
    let sol = ExactRiemannSolution::new(&phi, &data).unwrap();
    let err = |n: usize| {
        let h = 1.0 / (n as f64 - 1.0);
        let rec = run(&SchemeConfig::new(SchemeKind::TwoPhase, n, 0.25 * h * h, 0.005), &phi, &data).unwrap();
        fbdiff::harness::error_e2_phi(&rec.final_state, &sol, 0.005).unwrap()
    };
    let (e1, e2) = (err(129), err(257));
    assert!(e2 < 0.6 * e1, "{e1} {e2}");
}
