//! End-to-end trajectory behavior through the public API: a full run from
//! rough data to carrying capacity, the classifier on its sample stream,
//! and observer cadence.

use kslab_core::transform::initial_average;
use kslab_core::{
    default_mesh, detect_time_scales, integrate, sample, Grid1D, InitialCondition, ModelParams,
    Regime, State, StepControl,
};

fn standard_run(
    eps: f64,
    r: f64,
    t_end: f64,
    observer_dt: f64,
) -> Vec<kslab_core::DiagnosticsSample> {
    let g = Grid1D::new(default_mesh(eps, 64)).unwrap();
    let s0 = State::from_ic(&InitialCondition::SquareWave, &g).unwrap();
    let avg0 = initial_average(&s0.u, &g);
    let ctrl = StepControl::standard(g.n(), t_end)
        .unwrap()
        .with_observer_dt(observer_dt);
    let p = ModelParams::new(eps, r).unwrap();
    let mut obs = |s: &State, g: &Grid1D| sample(s, g, avg0);
    let (_, samples) = integrate(s0, &p, &ctrl, &mut [&mut obs]).expect("stable run");
    samples
}

#[test]
fn square_wave_run_reaches_capacity_in_order() {
    let samples = standard_run(0.5, 0.1, 30.0, 0.01);

    assert!(samples.windows(2).all(|w| w[1].t > w[0].t));
    assert_eq!(samples[0].t, 0.0);
    let last = samples.last().unwrap();
    assert!((last.t - 30.0).abs() < 1e-9);

    // By t = 30 the density has leveled out below the arrival threshold and
    // the chemical gradient variable has died.
    assert!(last.l2_u_minus_1_sq < 0.01, "got {}", last.l2_u_minus_1_sq);
    assert!(last.l2_ux_sq < 1e-3);
    assert!(last.l2_v_sq < 1e-3);

    let report = detect_time_scales(&samples, 0.01).unwrap();
    assert_eq!(report.regime, Regime::Normal);
    let (tf, tl, ta) = (
        report.t_flatten.unwrap(),
        report.t_leave.unwrap(),
        report.t_arrive.unwrap(),
    );
    assert!(tf < tl && tl < ta, "phases out of order: {tf} {tl} {ta}");
    assert!((21.0..23.0).contains(&ta), "arrival time drifted to {ta}");
    let frac = report.relative_transition.unwrap();
    assert!((0.0..1.0).contains(&frac));
}

#[test]
fn lyapunov_functional_descends_from_rough_data() {
    let samples = standard_run(0.5, 0.1, 5.0, 0.01);
    let max_inc = samples
        .windows(2)
        .map(|w| w[1].e1 - w[0].e1)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(max_inc <= 1e-8, "E1 rose by {max_inc}");
}

#[test]
fn observer_interval_thins_sample_stream() {
    let fine = standard_run(0.5, 0.1, 1.0, 0.01);
    let coarse = standard_run(0.5, 0.1, 1.0, 0.1);
    assert!(coarse.len() < fine.len() / 5);
    // Cadence changes neither endpoint.
    assert_eq!(coarse.first().unwrap().t, fine.first().unwrap().t);
    assert_eq!(coarse.last().unwrap().t, fine.last().unwrap().t);
}
