//! Canonical Poisson bracket on `(a, y, P_a, P_y)` expressed in the
//! variables `(y, Π, P_y)` with `Π = w P_a`, `w = a/x'`.
//!
//! For `A = f y^j Π^p P_y^q` and `B = g y^m Π^r P_y^s`, with the convention
//! `{A, B} = ∂_P A ∂_Q B − ∂_Q A ∂_P B`,
//!
//! ```text
//! {A, B} = w (p f g' − r f' g) y^{j+m} Π^{p+r−1} P_y^{q+s}
//!        + f g (q m − j s) y^{j+m−1} Π^{p+r} P_y^{q+s−1}
//! ```
//!
//! The `a`-dependence of `Π` through `w` cancels between the two halves of
//! the `(a, P_a)` part, so only `f'` and `g'` appear.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numeric::Scalar;
use crate::phase::{Model, Monomial, PhasePolynomial};
use crate::radical::{AlgebraError, NumericElement, RadicalElement};
use crate::Rational;

/// Holds `w = a/x'`.
#[derive(Clone, Debug)]
pub struct BracketContext {
    w: RadicalElement,
}

impl BracketContext {
    pub fn new(dx: &RadicalElement) -> Result<Self, AlgebraError> {
        let w = &RadicalElement::var(dx.basis()) * &dx.invert()?;
        Ok(BracketContext { w })
    }

    pub fn for_model(model: &Model) -> Result<Self, AlgebraError> {
        BracketContext::new(&model.coeffs.dx)
    }

    /// Context with an arbitrary `w`; the bracket is canonical for any nonzero choice.
    pub fn with_w(w: RadicalElement) -> Self {
        BracketContext { w }
    }

    pub fn w(&self) -> &RadicalElement {
        &self.w
    }
}

/// The two halves of `{A, B}`: the `(a, P_a)` part without its factor `w`, and the `(y, P_y)` part.
fn bracket_parts(
    lhs: &PhasePolynomial,
    rhs: &PhasePolynomial,
) -> (PhasePolynomial, PhasePolynomial) {
    let basis = lhs.basis().clone();
    let with_d = |p: &PhasePolynomial| -> Vec<(Monomial, RadicalElement, RadicalElement)> {
        p.terms()
            .map(|(k, v)| (*k, v.clone(), v.differentiate()))
            .collect()
    };
    let a_terms = with_d(lhs);
    let b_terms = with_d(rhs);
    let mut ap = PhasePolynomial::zero(&basis);
    let mut yp = PhasePolynomial::zero(&basis);
    for ((j, p, q), f, df) in &a_terms {
        for ((m, r, s), g, dg) in &b_terms {
            let (j, p, q, m, r, s) = (*j, *p, *q, *m, *r, *s);
            if p + r > 0 {
                let mut c = RadicalElement::zero(&basis);
                if p > 0 && !dg.is_zero() {
                    c = &c + &(f * dg).scale_i64(p as i64);
                }
                if r > 0 && !df.is_zero() {
                    c = &c - &(df * g).scale_i64(r as i64);
                }
                ap.add_term((j + m, p + r - 1, q + s), c);
            }
            let weight = q as i64 * m as i64 - j as i64 * s as i64;
            if weight != 0 {
                yp.add_term((j + m - 1, p + r, q + s - 1), (f * g).scale_i64(weight));
            }
        }
    }
    (ap, yp)
}

/// Exact `{A, B}`.
pub fn poisson(
    lhs: &PhasePolynomial,
    rhs: &PhasePolynomial,
    ctx: &BracketContext,
) -> PhasePolynomial {
    let (ap, yp) = bracket_parts(lhs, rhs);
    if ap.is_zero() {
        return yp;
    }
    &ap.mul_element(&ctx.w) + &yp
}

/// `x' · {A, B} = a · (a, P_a)-part + x' · (y, P_y)-part`.
///
/// Vanishes exactly when the bracket does, and never needs `1/x'`.
pub fn poisson_cleared(
    lhs: &PhasePolynomial,
    rhs: &PhasePolynomial,
    dx: &RadicalElement,
) -> PhasePolynomial {
    let (ap, yp) = bracket_parts(lhs, rhs);
    let a = RadicalElement::var(dx.basis());
    &ap.mul_element(&a) + &yp.mul_element(dx)
}

/// True iff every coefficient vanishes in normal form.
pub fn is_zero(p: &PhasePolynomial) -> bool {
    p.is_zero()
}

/// One of the five bracket relations.
#[derive(Clone, Debug)]
pub struct BracketCheck {
    pub label: &'static str,
    pub passed: bool,
    /// Terms in the computed bracket.
    pub terms: usize,
    /// Terms left in the residual.
    pub residual_terms: usize,
    pub residual: Option<String>,
}

impl BracketCheck {
    fn new(
        label: &'static str,
        bracket: &PhasePolynomial,
        expected: Option<&PhasePolynomial>,
    ) -> Self {
        let residual = match expected {
            Some(e) => bracket - e,
            None => bracket.clone(),
        };
        let passed = residual.is_zero();
        BracketCheck {
            label,
            passed,
            terms: bracket.term_count(),
            residual_terms: residual.term_count(),
            residual: (!passed).then(|| residual.leading_terms(3)),
        }
    }
}

pub const CHECK_LABELS: [&str; 5] = [
    "{H,Py} = 0",
    "{H,S1} = 0",
    "{H,S2} = 0",
    "{Py,S1} = G",
    "{Py,S2} = S1",
];

#[derive(Clone, Debug)]
pub struct SuperintegrabilityReport {
    pub checks: Vec<BracketCheck>,
    pub elapsed: Duration,
}

impl SuperintegrabilityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Exact verification of the five relations.
///
/// The three vanishing brackets with `H` are tested in the cleared form
/// `x' {H, ·}`; their term counts refer to that form.
pub fn verify_superintegrability(model: &Model) -> Result<SuperintegrabilityReport, AlgebraError> {
    let start = Instant::now();
    let dx = &model.coeffs.dx;
    if dx.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let ctx = BracketContext::for_model(model)?;
    let py = PhasePolynomial::py(model.basis());
    let checks = vec![
        BracketCheck::new(CHECK_LABELS[0], &poisson_cleared(&model.h, &py, dx), None),
        BracketCheck::new(
            CHECK_LABELS[1],
            &poisson_cleared(&model.h, &model.s1, dx),
            None,
        ),
        BracketCheck::new(
            CHECK_LABELS[2],
            &poisson_cleared(&model.h, &model.s2, dx),
            None,
        ),
        BracketCheck::new(
            CHECK_LABELS[3],
            &poisson(&py, &model.s1, &ctx),
            Some(&model.g),
        ),
        BracketCheck::new(
            CHECK_LABELS[4],
            &poisson(&py, &model.s2, &ctx),
            Some(&model.s1),
        ),
    ];
    Ok(SuperintegrabilityReport {
        checks,
        elapsed: start.elapsed(),
    })
}

/// A point of phase space in `(a, y, Π, P_y)`.
#[derive(Clone, Debug)]
pub struct PhasePoint<S> {
    pub a: S,
    pub y: S,
    pub pi: S,
    pub py: S,
}

fn powi<S: Scalar>(x: &S, e: u32, one: &S) -> S {
    let mut out = one.clone();
    for _ in 0..e {
        out = out * x.clone();
    }
    out
}

/// Floating-point image of a phase polynomial that also carries coefficient derivatives.
pub struct NumericPhase<S: Scalar> {
    terms: Vec<(Monomial, NumericElement<S>, NumericElement<S>)>,
}

/// Value and first partials at a point: `(value, ∂_a at fixed Π, ∂_y, ∂_Π, ∂_{P_y})`.
#[derive(Clone, Debug)]
pub struct Partials<S> {
    pub value: S,
    pub da: S,
    pub dy: S,
    pub dpi: S,
    pub dpy: S,
}

impl<S: Scalar> NumericPhase<S> {
    pub fn new(p: &PhasePolynomial, ctx: S::Ctx) -> Self {
        let terms = p
            .terms()
            .map(|(k, v)| (*k, v.compile(ctx), v.differentiate().compile(ctx)))
            .collect();
        NumericPhase { terms }
    }

    pub fn partials(&self, pt: &PhasePoint<S>, radicals: &[S], ctx: S::Ctx) -> Partials<S> {
        let zero = S::from_i64(0, ctx);
        let one = S::from_i64(1, ctx);
        let mut out = Partials {
            value: zero.clone(),
            da: zero.clone(),
            dy: zero.clone(),
            dpi: zero.clone(),
            dpy: zero.clone(),
        };
        for ((j, p, q), f, df) in &self.terms {
            let fv = f.eval_with_radicals(&pt.a, radicals);
            let dfv = df.eval_with_radicals(&pt.a, radicals);
            let yj = powi(&pt.y, *j, &one);
            let pp = powi(&pt.pi, *p, &one);
            let qq = powi(&pt.py, *q, &one);
            let mono = yj.clone() * pp.clone() * qq.clone();
            out.value = out.value + fv.clone() * mono.clone();
            out.da = out.da + dfv * mono;
            if *j > 0 {
                let d = S::from_i64(*j as i64, ctx)
                    * powi(&pt.y, j - 1, &one)
                    * pp.clone()
                    * qq.clone();
                out.dy = out.dy + fv.clone() * d;
            }
            if *p > 0 {
                let d = S::from_i64(*p as i64, ctx)
                    * yj.clone()
                    * powi(&pt.pi, p - 1, &one)
                    * qq.clone();
                out.dpi = out.dpi + fv.clone() * d;
            }
            if *q > 0 {
                let d = S::from_i64(*q as i64, ctx) * yj * pp * powi(&pt.py, q - 1, &one);
                out.dpy = out.dpy + fv * d;
            }
        }
        out
    }
}

/// `{A, B}` from partials: `w (A_Π B_a − A_a B_Π) + (A_{P_y} B_y − A_y B_{P_y})`.
pub fn numeric_bracket<S: Scalar>(a: &Partials<S>, b: &Partials<S>, w: &S) -> S {
    w.clone() * (a.dpi.clone() * b.da.clone() - a.da.clone() * b.dpi.clone())
        + (a.dpy.clone() * b.dy.clone() - a.dy.clone() * b.dpy.clone())
}

#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub label: &'static str,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct NumericReport {
    pub checks: Vec<NumericCheck>,
    pub points: usize,
    pub digits: usize,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl NumericReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Admissible random phase points: `a` inside the middle of the domain, other coordinates in `[−1, 1]`.
pub fn random_phase_points<S: Scalar>(
    model: &Model,
    count: usize,
    seed: u64,
    ctx: S::Ctx,
) -> Vec<PhasePoint<S>> {
    use num_traits::ToPrimitive;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dom = &model.spec.domain;
    let lo = dom.lo.to_f64().unwrap_or(0.0);
    let width = dom
        .hi
        .as_ref()
        .map_or(3.0, |h| h.to_f64().unwrap_or(lo + 3.0) - lo);
    (0..count)
        .map(|_| {
            let a = lo + width * rng.gen_range(0.15..0.85);
            let mut coord = || S::from_f64(rng.gen_range(-1.0..1.0), ctx);
            let (y, pi, py) = (coord(), coord(), coord());
            PhasePoint {
                a: S::from_f64(a, ctx),
                y,
                pi,
                py,
            }
        })
        .collect()
}

/// The five relations evaluated at the given phase points.
pub fn verify_superintegrability_numeric<S: Scalar>(
    model: &Model,
    points: &[PhasePoint<S>],
    ctx: S::Ctx,
    tolerance: f64,
    digits: usize,
) -> Result<NumericReport, AlgebraError> {
    let start = Instant::now();
    let basis = model.basis();
    let h = NumericPhase::<S>::new(&model.h, ctx);
    let g = NumericPhase::<S>::new(&model.g, ctx);
    let s1 = NumericPhase::<S>::new(&model.s1, ctx);
    let s2 = NumericPhase::<S>::new(&model.s2, ctx);
    let py = NumericPhase::<S>::new(&PhasePolynomial::py(basis), ctx);
    let dx = model.coeffs.dx.compile::<S>(ctx);
    let probe = RadicalElement::one(basis).compile::<S>(ctx);

    let mut worst = [0.0f64; 5];
    for pt in points {
        let rad = probe.radicals(&pt.a)?;
        let w = pt.a.clone() / dx.eval_with_radicals(&pt.a, &rad);
        let ph = h.partials(pt, &rad, ctx);
        let pg = g.partials(pt, &rad, ctx);
        let p1 = s1.partials(pt, &rad, ctx);
        let p2 = s2.partials(pt, &rad, ctx);
        let pp = py.partials(pt, &rad, ctx);
        let residuals = [
            numeric_bracket(&ph, &pp, &w),
            numeric_bracket(&ph, &p1, &w),
            numeric_bracket(&ph, &p2, &w),
            numeric_bracket(&pp, &p1, &w) - pg.value.clone(),
            numeric_bracket(&pp, &p2, &w) - p1.value.clone(),
        ];
        for (slot, r) in worst.iter_mut().zip(residuals) {
            *slot = slot.max(r.abs().to_f64());
        }
    }
    let checks = CHECK_LABELS
        .iter()
        .zip(worst)
        .map(|(label, m)| NumericCheck {
            label,
            max_residual: m,
            passed: m < tolerance,
        })
        .collect();
    Ok(NumericReport {
        checks,
        points: points.len(),
        digits,
        tolerance,
        elapsed: start.elapsed(),
    })
}

/// Phase point from exact coordinates.
pub fn rational_point<S: Scalar>(
    a: &Rational,
    y: &Rational,
    pi: &Rational,
    py: &Rational,
    ctx: S::Ctx,
) -> PhasePoint<S> {
    PhasePoint {
        a: S::from_rational(a, ctx),
        y: S::from_rational(y, ctx),
        pi: S::from_rational(pi, ctx),
        py: S::from_rational(py, ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, ModelSpec, Parity, RootSpec};
    use crate::numeric::HpFloat;
    use crate::phase::assemble_model;
    use crate::radical::Sign;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn simple_model() -> Model {
        let spec = ModelSpec::new(
            Parity::Even,
            vec![RootSpec::simple(int(-1), Sign::Plus, int(1))],
            int(0),
            Domain::new(int(0), None),
        )
        .unwrap();
        assemble_model(&spec).unwrap()
    }

    #[test]
    fn canonical_pairs() {
        let m = simple_model();
        let ctx = BracketContext::for_model(&m).unwrap();
        let b = m.basis();
        let one = PhasePolynomial::monomial(b, (0, 0, 0), RadicalElement::one(b));
        let y = PhasePolynomial::y(b);
        let py = PhasePolynomial::py(b);
        assert_eq!(poisson(&y, &py, &ctx), -&one);
        assert_eq!(poisson(&py, &y, &ctx), one);
        assert!(is_zero(&poisson(&m.h, &py, &ctx)));
        assert!(is_zero(&poisson(&m.h, &m.h, &ctx)));
        assert!(is_zero(&(&m.s1 - &m.s1)));
    }

    #[test]
    fn quadratic_model_is_superintegrable() {
        let m = simple_model();
        let report = verify_superintegrability(&m).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {:?}", c.label, c.residual);
        }
    }

    #[test]
    fn numeric_agrees_for_quadratic_model() {
        let m = simple_model();
        let pts = random_phase_points::<HpFloat>(&m, 5, 7, 40);
        let rep = verify_superintegrability_numeric(&m, &pts, 40, 1e-30, 40).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.checks);
    }
}
