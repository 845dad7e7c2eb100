use siflow_core::geodesic::{integrate, PhaseState};
use siflow_core::model::{Domain, ModelSpec, Parity, RootSpec};
use siflow_core::phase::assemble_model;
use siflow_core::radical::Sign;
use siflow_core::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Odd model on `(0, 3)`: simple root −1, double root 3.
fn model(xi: Rational) -> siflow_core::phase::Model {
    let roots = vec![
        RootSpec::simple(q(-1, 1), Sign::Plus, xi),
        RootSpec::multiple(q(3, 1), Sign::Minus, vec![q(1, 1), q(1, 2)]),
    ];
    let spec = ModelSpec::new(
        Parity::Odd,
        roots,
        q(1, 1),
        Domain::new(q(0, 1), Some(q(3, 1))),
    )
    .unwrap();
    assemble_model(&spec).unwrap()
}

fn start() -> PhaseState<f64> {
    PhaseState {
        t: 0.0,
        a: 1.2,
        y: 0.0,
        pa: 0.3,
        py: 0.7,
    }
}

#[test]
fn orbit_away_from_metric_singularity_conserves_invariants() {
    let tr = integrate(&model(q(-2, 1)), start(), 5.0, 1e-3, 50, ()).unwrap();
    assert!(!tr.exited);
    assert!(tr.drift.max() < 1e-10, "{:?}", tr.drift);
}

/// With `xi = 2`, `x'` vanishes inside `(0, 3)` and the orbit runs into it.
#[test]
fn zero_of_profile_derivative_truncates_the_orbit() {
    let m = model(q(2, 1));
    let tr = integrate(&m, start(), 5.0, 1e-3, 50, ()).unwrap();
    assert!(tr.exited);
    let last = &tr.samples.last().unwrap().state;
    assert!(last.t < 5.0);
    let dx = m.coeffs.dx.eval_numeric::<f64>(&last.a, ()).unwrap();
    let dx0 = m.coeffs.dx.eval_numeric::<f64>(&1.2, ()).unwrap();
    assert_eq!(dx.signum(), dx0.signum());
    assert!(tr.drift.max() < 1e-5, "{:?}", tr.drift);
}

#[test]
fn nonpositive_step_is_rejected() {
    assert!(integrate(&model(q(-2, 1)), start(), 1.0, 0.0, 1, ()).is_err());
}
