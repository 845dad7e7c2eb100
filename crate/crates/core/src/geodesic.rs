//! Geodesic flow of `H = W P_a² + a P_y²`, `W = (a/x')²`, integrated with
//! classical RK4, plus invariant monitoring.

use std::io::{self, Write};

use thiserror::Error;

use crate::bracket::{NumericPhase, PhasePoint};
use crate::numeric::Scalar;
use crate::phase::Model;
use crate::radical::{AlgebraError, NumericElement, RadicalElement, Sign};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("initial state is outside the domain: {0}")]
    InitialOutside(AlgebraError),
    #[error("invariant evaluation failed: {0}")]
    Algebra(#[from] AlgebraError),
}

/// Point `(a, y, P_a, P_y)` at flow time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState<S> {
    pub t: f64,
    pub a: S,
    pub y: S,
    pub pa: S,
    pub py: S,
}

/// Invariants at one sample.
#[derive(Clone, Debug)]
pub struct Sample<S> {
    pub state: PhaseState<S>,
    pub h: S,
    pub py: S,
    pub s1: S,
    pub s2: S,
}

/// Largest relative deviation of each invariant from its initial value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DriftStats {
    pub h: f64,
    pub py: f64,
    pub s1: f64,
    pub s2: f64,
}

impl DriftStats {
    pub fn max(&self) -> f64 {
        self.h.max(self.py).max(self.s1).max(self.s2)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub samples: Vec<Sample<S>>,
    /// Set when a stage left the working domain (a radicand or `x'` changed sign);
    /// the trajectory stops at the last good step.
    pub exited: bool,
    pub drift: DriftStats,
}

/// Compiled right-hand side and invariants of one model.
pub struct Dynamics<S: Scalar> {
    dx: NumericElement<S>,
    ddx: NumericElement<S>,
    probe: NumericElement<S>,
    h: NumericPhase<S>,
    s1: NumericPhase<S>,
    s2: NumericPhase<S>,
    ctx: S::Ctx,
}

struct Deriv<S> {
    a: S,
    y: S,
    pa: S,
    py: S,
}

impl<S: Scalar> Dynamics<S> {
    pub fn new(model: &Model, ctx: S::Ctx) -> Self {
        let dx = &model.coeffs.dx;
        Dynamics {
            dx: dx.compile(ctx),
            ddx: dx.differentiate().compile(ctx),
            probe: RadicalElement::one(model.basis()).compile(ctx),
            h: NumericPhase::new(&model.h, ctx),
            s1: NumericPhase::new(&model.s1, ctx),
            s2: NumericPhase::new(&model.s2, ctx),
            ctx,
        }
    }

    /// `side` is the sign of `x'` at the start of the step; the working
    /// domain ends where `x'` vanishes.
    fn rhs(&self, a: &S, pa: &S, py: &S, side: bool) -> Result<Deriv<S>, AlgebraError> {
        if !a.is_positive_value() {
            return Err(below_zero(a));
        }
        let rad = self.probe.radicals(a)?;
        let d1 = self.dx.eval_with_radicals(a, &rad);
        if d1.is_positive_value() != side || d1.to_f64() == 0.0 {
            return Err(AlgebraError::DivisionByZero);
        }
        let d2 = self.ddx.eval_with_radicals(a, &rad);
        let two = S::from_i64(2, self.ctx);
        let ratio = a.clone() / d1.clone();
        let w = ratio.clone() * ratio;
        // W' = 2a (x' − a x'') / x'^3
        let dw = two.clone() * a.clone() * (d1.clone() - a.clone() * d2)
            / (d1.clone() * d1.clone() * d1);
        Ok(Deriv {
            a: two.clone() * w * pa.clone(),
            y: two * a.clone() * py.clone(),
            pa: -(dw * pa.clone() * pa.clone() + py.clone() * py.clone()),
            py: S::from_i64(0, self.ctx),
        })
    }

    /// `Π = (a/x') P_a`.
    pub fn phase_point(&self, s: &PhaseState<S>) -> Result<(PhasePoint<S>, Vec<S>), AlgebraError> {
        let rad = self.probe.radicals(&s.a)?;
        let pi = s.a.clone() / self.dx.eval_with_radicals(&s.a, &rad) * s.pa.clone();
        Ok((
            PhasePoint {
                a: s.a.clone(),
                y: s.y.clone(),
                pi,
                py: s.py.clone(),
            },
            rad,
        ))
    }

    pub fn sample(&self, s: &PhaseState<S>) -> Result<Sample<S>, AlgebraError> {
        let (pt, rad) = self.phase_point(s)?;
        Ok(Sample {
            state: s.clone(),
            h: self.h.value(&pt, &rad, self.ctx),
            py: s.py.clone(),
            s1: self.s1.value(&pt, &rad, self.ctx),
            s2: self.s2.value(&pt, &rad, self.ctx),
        })
    }

    fn step(&self, s: &PhaseState<S>, h: &S, hf: f64) -> Result<PhaseState<S>, AlgebraError> {
        let half = h.clone() / S::from_i64(2, self.ctx);
        let six = S::from_i64(6, self.ctx);
        let two = S::from_i64(2, self.ctx);
        let side = self.dx.eval(&s.a)?.is_positive_value();
        let k1 = self.rhs(&s.a, &s.pa, &s.py, side)?;
        let k2 = self.rhs(
            &(s.a.clone() + half.clone() * k1.a.clone()),
            &(s.pa.clone() + half.clone() * k1.pa.clone()),
            &(s.py.clone() + half.clone() * k1.py.clone()),
            side,
        )?;
        let k3 = self.rhs(
            &(s.a.clone() + half.clone() * k2.a.clone()),
            &(s.pa.clone() + half.clone() * k2.pa.clone()),
            &(s.py.clone() + half.clone() * k2.py.clone()),
            side,
        )?;
        let k4 = self.rhs(
            &(s.a.clone() + h.clone() * k3.a.clone()),
            &(s.pa.clone() + h.clone() * k3.pa.clone()),
            &(s.py.clone() + h.clone() * k3.py.clone()),
            side,
        )?;
        let comb = |x: &S, d1: &S, d2: &S, d3: &S, d4: &S| {
            x.clone()
                + h.clone() / six.clone()
                    * (d1.clone()
                        + two.clone() * d2.clone()
                        + two.clone() * d3.clone()
                        + d4.clone())
        };
        let next = PhaseState {
            t: s.t + hf,
            a: comb(&s.a, &k1.a, &k2.a, &k3.a, &k4.a),
            y: comb(&s.y, &k1.y, &k2.y, &k3.y, &k4.y),
            pa: comb(&s.pa, &k1.pa, &k2.pa, &k3.pa, &k4.pa),
            py: comb(&s.py, &k1.py, &k2.py, &k3.py, &k4.py),
        };
        if !next.a.is_positive_value() {
            return Err(below_zero(&next.a));
        }
        if self.dx.eval(&next.a)?.is_positive_value() != side {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(next)
    }
}

/// The metric needs `a > 0`; reported as the radicand of a root at zero.
fn below_zero<S: Scalar>(a: &S) -> AlgebraError {
    AlgebraError::Domain {
        root: Rational::from_integer(0.into()),
        sign: Sign::Plus,
        at: a.to_f64(),
    }
}

impl<S: Scalar> NumericPhase<S> {
    /// Value only, given precomputed radicals.
    pub fn value(&self, pt: &PhasePoint<S>, radicals: &[S], ctx: S::Ctx) -> S {
        self.partials(pt, radicals, ctx).value
    }
}

fn relative_drift<S: Scalar>(values: impl Iterator<Item = S> + Clone, initial: &S) -> f64 {
    let scale = initial.abs().to_f64();
    let worst = values
        .clone()
        .map(|v| (v - initial.clone()).abs().to_f64())
        .fold(0.0, f64::max);
    if scale > 1e-12 {
        worst / scale
    } else {
        // invariant starts near zero: measure against its typical size along the orbit
        let typical = values.map(|v| v.abs().to_f64()).fold(0.0, f64::max);
        if typical > 0.0 {
            worst / typical
        } else {
            worst
        }
    }
}

fn drift_of<S: Scalar>(samples: &[Sample<S>]) -> DriftStats {
    let Some(first) = samples.first() else {
        return DriftStats::default();
    };
    DriftStats {
        h: relative_drift(samples.iter().map(|s| s.h.clone()), &first.h),
        py: relative_drift(samples.iter().map(|s| s.py.clone()), &first.py),
        s1: relative_drift(samples.iter().map(|s| s.s1.clone()), &first.s1),
        s2: relative_drift(samples.iter().map(|s| s.s2.clone()), &first.s2),
    }
}

/// Integrate from `s0` up to time `t_end` with fixed step `h`, sampling every `every` steps.
pub fn integrate<S: Scalar>(
    model: &Model,
    s0: PhaseState<S>,
    t_end: f64,
    h: f64,
    every: usize,
    ctx: S::Ctx,
) -> Result<Trajectory<S>, IntegrateError> {
    let dynamics = Dynamics::<S>::new(model, ctx);
    integrate_with(&dynamics, s0, t_end, h, every)
}

/// As [`integrate`], reusing compiled dynamics.
pub fn integrate_with<S: Scalar>(
    dynamics: &Dynamics<S>,
    s0: PhaseState<S>,
    t_end: f64,
    h: f64,
    every: usize,
) -> Result<Trajectory<S>, IntegrateError> {
    if h.is_nan() || h <= 0.0 {
        return Err(IntegrateError::BadStep(h));
    }
    let every = every.max(1);
    let steps = (t_end / h).round() as usize;
    let hs = S::from_f64(h, dynamics.ctx);
    let first = dynamics
        .sample(&s0)
        .map_err(IntegrateError::InitialOutside)?;
    let mut samples = vec![first];
    let mut state = s0;
    let mut exited = false;
    for i in 1..=steps {
        match dynamics.step(&state, &hs, h) {
            Ok(next) => state = next,
            Err(_) => {
                exited = true;
                break;
            }
        }
        if i % every == 0 || i == steps {
            samples.push(dynamics.sample(&state)?);
        }
    }
    let drift = drift_of(&samples);
    Ok(Trajectory {
        samples,
        exited,
        drift,
    })
}

/// Least-squares slope of `log2(drift)` against `log2(1/h)`.
pub fn convergence_order(steps: &[f64], drifts: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(drifts)
        .filter(|(_, d)| **d > 0.0)
        .map(|(h, d)| ((1.0 / h).log2(), d.log2()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

/// Drifts outside this window are left out of the order fit: below it
/// round-off dominates, above it the step is not yet asymptotic.
pub const ORDER_FIT_WINDOW: (f64, f64) = (1e-12, 1e-3);

/// Default ladder for [`observed_order`]: `0.4 · 2^{−j}`, `j = 0..7`.
pub fn halving_ladder() -> Vec<f64> {
    (0..7).map(|j| 0.4 / f64::powi(2.0, j)).collect()
}

/// Observed order of the worst invariant drift under the given step sizes.
///
/// Runs that leave the domain and drifts outside [`ORDER_FIT_WINDOW`] are
/// dropped; `NaN` when fewer than two points remain.
pub fn observed_order<S: Scalar>(
    dynamics: &Dynamics<S>,
    s0: &PhaseState<S>,
    t_end: f64,
    steps: &[f64],
) -> Result<f64, IntegrateError> {
    let mut kept_steps = Vec::new();
    let mut drifts = Vec::new();
    for &h in steps {
        let tr = integrate_with(dynamics, s0.clone(), t_end, h, 1)?;
        let d = tr.drift.h.max(tr.drift.s1).max(tr.drift.s2);
        if !tr.exited && d >= ORDER_FIT_WINDOW.0 && d <= ORDER_FIT_WINDOW.1 {
            kept_steps.push(h);
            drifts.push(d);
        }
    }
    Ok(convergence_order(&kept_steps, &drifts))
}

pub const CSV_HEADER: &str = "t,a,y,Pa,Py,H,Py_int,S1,S2";

/// One row per sample.
pub fn write_csv<S: Scalar, W: Write>(tr: &Trajectory<S>, mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in &tr.samples {
        let st = &s.state;
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            st.t,
            st.a.to_f64(),
            st.y.to_f64(),
            st.pa.to_f64(),
            st.py.to_f64(),
            s.h.to_f64(),
            s.py.to_f64(),
            s.s1.to_f64(),
            s.s2.to_f64()
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("mu vanishes at u = {0}: curvature singularity")]
    Singular(f64),
}

/// Sectional curvature `R = −(μ + u μ')/μ³` of `(μ² du² + dy²)/u²`.
pub fn curvature(mu: f64, dmu: f64, u: f64) -> Result<f64, CurvatureError> {
    if mu == 0.0 {
        return Err(CurvatureError::Singular(u));
    }
    Ok(-(mu + u * dmu) / (mu * mu * mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, ModelSpec, Parity, RootSpec};
    use crate::phase::assemble_model;

    fn quadratic_model() -> Model {
        let spec = ModelSpec::new(
            Parity::Even,
            vec![RootSpec::simple(
                Rational::from_integer((-1).into()),
                Sign::Plus,
                Rational::from_integer(1.into()),
            )],
            Rational::from_integer(0.into()),
            Domain::new(Rational::from_integer(0.into()), None),
        )
        .unwrap();
        assemble_model(&spec).unwrap()
    }

    #[test]
    fn conserves_invariants() {
        let m = quadratic_model();
        let s0 = PhaseState {
            t: 0.0,
            a: 0.5,
            y: 0.0,
            pa: 0.05,
            py: 0.1,
        };
        let tr = integrate::<f64>(&m, s0, 10.0, 1e-3, 10, ()).unwrap();
        assert!(!tr.exited);
        assert_eq!(tr.drift.py, 0.0);
        assert!(tr.drift.h < 1e-9, "{:?}", tr.drift);
        assert!(tr.drift.s1 < 1e-9 && tr.drift.s2 < 1e-9, "{:?}", tr.drift);
    }

    #[test]
    fn csv_header_and_rows() {
        let m = quadratic_model();
        let s0 = PhaseState {
            t: 0.0,
            a: 1.0,
            y: 0.0,
            pa: 0.1,
            py: 0.3,
        };
        let tr = integrate::<f64>(&m, s0, 0.05, 1e-2, 1, ()).unwrap();
        let mut buf = Vec::new();
        write_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,a,y,Pa,Py,H,Py_int,S1,S2\n"));
        assert_eq!(text.lines().count(), tr.samples.len() + 1);
    }

    #[test]
    fn curvature_examples() {
        for u in [0.1, 0.5, 2.0] {
            assert_eq!(curvature(1.0, 0.0, u).unwrap(), -1.0);
            let r = curvature(u, 1.0, u).unwrap();
            assert!((r + 2.0 / (u * u)).abs() < 1e-12);
        }
        assert!(curvature(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn rejects_bad_step() {
        let m = quadratic_model();
        let s0 = PhaseState {
            t: 0.0,
            a: 1.0,
            y: 0.0,
            pa: 0.1,
            py: 0.3,
        };
        assert_eq!(
            integrate::<f64>(&m, s0, 1.0, 0.0, 1, ()).unwrap_err(),
            IntegrateError::BadStep(0.0)
        );
    }
}
