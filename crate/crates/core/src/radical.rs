//! Exact arithmetic in `Q(a)[R_1, .., R_t] / (R_α² − ε_α (a − a_α))`.
//!
//! Every element is kept in normal form: a map from the set of radicals
//! present (a bit mask, each `R_α` to the power 0 or 1) to a reduced
//! rational function of `a`. Zero coefficients are never stored, so an
//! element is zero iff its map is empty.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::numeric::Scalar;
use crate::poly::Poly;
use crate::ratfunc::RationalFunction;
use crate::Rational;

/// Upper bound on the number of radicals; conjugate inversion costs `2^t`.
pub const MAX_BASIS_ROOTS: usize = 8;

/// Set of radicals carried by a term, bit `α` standing for `R_α`.
pub type Mask = u16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("basis root {0} appears more than once")]
    DuplicateRoot(Rational),
    #[error("radical basis limited to {MAX_BASIS_ROOTS} roots, got {0}")]
    TooManyRoots(usize),
    #[error("operands live over different radical bases")]
    BasisMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand Δ = {sign}(a − {root}) is not positive at a = {at}")]
    Domain { root: Rational, sign: Sign, at: f64 },
    #[error("exponent vector has {got} entries, basis has {expected}")]
    ExponentLength { expected: usize, got: usize },
}

/// The sign `ε_α` in `Δ_α = ε_α (a − a_α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(self.to_i64().into())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BasisRoot {
    root: Rational,
    sign: Sign,
    delta: Poly,
}

/// Ordered list of `(a_α, ε_α)` defining the radicals `R_α = √Δ_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalBasis {
    roots: Vec<BasisRoot>,
}

impl RadicalBasis {
    pub fn new(roots: Vec<(Rational, Sign)>) -> Result<Arc<RadicalBasis>, AlgebraError> {
        if roots.len() > MAX_BASIS_ROOTS {
            return Err(AlgebraError::TooManyRoots(roots.len()));
        }
        for (i, (r, _)) in roots.iter().enumerate() {
            if roots[..i].iter().any(|(s, _)| s == r) {
                return Err(AlgebraError::DuplicateRoot(r.clone()));
            }
        }
        let roots = roots
            .into_iter()
            .map(|(root, sign)| {
                let s = sign.to_rational();
                let delta = Poly::linear(-(&s * &root), s);
                BasisRoot { root, sign, delta }
            })
            .collect();
        Ok(Arc::new(RadicalBasis { roots }))
    }

    /// Basis without radicals (pure rational functions).
    pub fn empty() -> Arc<RadicalBasis> {
        Arc::new(RadicalBasis { roots: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, i: usize) -> &Rational {
        &self.roots[i].root
    }

    pub fn sign(&self, i: usize) -> Sign {
        self.roots[i].sign
    }

    /// `Δ_i = ε_i (a − a_i)` as a polynomial.
    pub fn delta(&self, i: usize) -> &Poly {
        &self.roots[i].delta
    }

    pub fn index_of(&self, root: &Rational) -> Option<usize> {
        self.roots.iter().position(|b| &b.root == root)
    }

    /// `∏_{α ∈ mask} Δ_α`
    fn delta_product(&self, mask: Mask) -> Poly {
        let mut p = Poly::one();
        for i in 0..self.len() {
            if mask & (1 << i) != 0 {
                p = &p * self.delta(i);
            }
        }
        p
    }
}

/// One term `c · a^m · ∏ R_α^{e_α}` of a formal, unreduced sum.
#[derive(Debug, Clone)]
pub struct RawTerm {
    pub coeff: Rational,
    pub a_power: u32,
    pub exponents: Vec<u32>,
}

/// Element of the multi-radical extension in normal form.
#[derive(Clone, Debug)]
pub struct RadicalElement {
    basis: Arc<RadicalBasis>,
    terms: BTreeMap<Mask, RationalFunction>,
}

impl PartialEq for RadicalElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis)
            && self.terms == other.terms
    }
}

impl RadicalElement {
    pub fn zero(basis: &Arc<RadicalBasis>) -> Self {
        RadicalElement {
            basis: basis.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(basis: &Arc<RadicalBasis>) -> Self {
        RadicalElement::from_ratfunc(basis, RationalFunction::one())
    }

    pub fn constant(basis: &Arc<RadicalBasis>, c: Rational) -> Self {
        RadicalElement::from_ratfunc(basis, RationalFunction::constant(c))
    }

    pub fn from_i64(basis: &Arc<RadicalBasis>, c: i64) -> Self {
        RadicalElement::constant(basis, Rational::from_integer(c.into()))
    }

    pub fn from_poly(basis: &Arc<RadicalBasis>, p: Poly) -> Self {
        RadicalElement::from_ratfunc(basis, RationalFunction::from_poly(p))
    }

    pub fn from_ratfunc(basis: &Arc<RadicalBasis>, f: RationalFunction) -> Self {
        RadicalElement::monomial(basis, 0, f)
    }

    /// The variable `a` itself.
    pub fn var(basis: &Arc<RadicalBasis>) -> Self {
        RadicalElement::from_poly(basis, Poly::var())
    }

    /// `f · ∏_{α ∈ mask} R_α`, already in normal form.
    pub fn monomial(basis: &Arc<RadicalBasis>, mask: Mask, f: RationalFunction) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(mask, f);
        }
        RadicalElement {
            basis: basis.clone(),
            terms,
        }
    }

    /// The radical `R_i = √Δ_i`.
    pub fn radical(basis: &Arc<RadicalBasis>, i: usize) -> Self {
        RadicalElement::monomial(basis, 1 << i, RationalFunction::one())
    }

    /// `Δ_i^{twice/2}` for any integer `twice`, e.g. `twice = -3` gives `Δ_i^{-3/2} = R_i / Δ_i²`.
    pub fn delta_power(basis: &Arc<RadicalBasis>, i: usize, twice: i64) -> Self {
        let delta = basis.delta(i);
        let (mask, whole) = if twice.rem_euclid(2) == 1 {
            (1 << i, (twice - 1) / 2)
        } else {
            (0, twice / 2)
        };
        let f = if whole >= 0 {
            RationalFunction::from_poly(delta.pow(whole as u32))
        } else {
            RationalFunction::new(Poly::one(), delta.pow((-whole) as u32))
        };
        RadicalElement::monomial(basis, mask, f)
    }

    /// Reduce a formal sum of `c · a^m · ∏ R_α^{e_α}` to normal form.
    pub fn from_raw_terms(
        basis: &Arc<RadicalBasis>,
        raw: &[RawTerm],
    ) -> Result<Self, AlgebraError> {
        let mut out = RadicalElement::zero(basis);
        for t in raw {
            if t.exponents.len() != basis.len() {
                return Err(AlgebraError::ExponentLength {
                    expected: basis.len(),
                    got: t.exponents.len(),
                });
            }
            let mut poly = Poly::monomial(t.coeff.clone(), t.a_power as usize);
            let mut mask: Mask = 0;
            for (i, &e) in t.exponents.iter().enumerate() {
                poly = &poly * &basis.delta(i).pow(e / 2);
                if e % 2 == 1 {
                    mask |= 1 << i;
                }
            }
            out.add_term(mask, RationalFunction::from_poly(poly));
        }
        Ok(out)
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|f| f.is_one())
    }

    /// Number of radical components in normal form.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &RationalFunction)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    pub fn component(&self, mask: Mask) -> RationalFunction {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(RationalFunction::zero)
    }

    /// The element as a rational function when it carries no radicals.
    pub fn as_ratfunc(&self) -> Option<RationalFunction> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.as_ratfunc().and_then(|f| f.as_constant())
    }

    fn add_term(&mut self, mask: Mask, f: RationalFunction) {
        if f.is_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            None => {
                self.terms.insert(mask, f);
            }
            Some(old) => {
                let s = &old + &f;
                if !s.is_zero() {
                    self.terms.insert(mask, s);
                }
            }
        }
    }

    fn same_basis(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            Ok(())
        } else {
            Err(AlgebraError::BasisMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_basis(other)?;
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(*m, f.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&other.negate())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_basis(other)?;
        let mut out = RadicalElement::zero(&self.basis);
        for (m1, f1) in &self.terms {
            for (m2, f2) in &other.terms {
                let common = m1 & m2;
                let mut f = f1 * f2;
                if common != 0 {
                    f = f.mul_poly(&self.basis.delta_product(common));
                }
                out.add_term(m1 ^ m2, f);
            }
        }
        Ok(out)
    }

    pub fn negate(&self) -> Self {
        RadicalElement {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(m, f)| (*m, -f)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RadicalElement::zero(&self.basis);
        }
        RadicalElement {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(m, f)| (*m, f.scale(c))).collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&Rational::from_integer(c.into()))
    }

    pub fn mul_ratfunc(&self, g: &RationalFunction) -> Self {
        let mut out = RadicalElement::zero(&self.basis);
        for (m, f) in &self.terms {
            out.add_term(*m, f * g);
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        let mut out = RadicalElement::zero(&self.basis);
        for (m, f) in &self.terms {
            out.add_term(*m, f.mul_poly(p));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = RadicalElement::one(&self.basis);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Exact `d/da`, using `R_α' = ε_α R_α / (2 Δ_α)`.
    pub fn differentiate(&self) -> Self {
        let mut out = RadicalElement::zero(&self.basis);
        for (m, f) in &self.terms {
            let mut d = f.derivative();
            for i in 0..self.basis.len() {
                if m & (1 << i) != 0 {
                    let half_eps =
                        self.basis.sign(i).to_rational() / Rational::from_integer(2.into());
                    let g = f.div_poly(self.basis.delta(i)).scale(&half_eps);
                    d = &d + &g;
                }
            }
            out.add_term(*m, d);
        }
        out
    }

    /// `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Self {
        let mut d = self.clone();
        for _ in 0..k {
            d = d.differentiate();
        }
        d
    }

    /// Image under `R_i → −R_i`.
    pub fn conjugate(&self, i: usize) -> Self {
        RadicalElement {
            basis: self.basis.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, f)| (*m, if m & (1 << i) != 0 { -f } else { f.clone() }))
                .collect(),
        }
    }

    /// Multiplicative inverse by successive conjugate rationalization.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut num = RadicalElement::one(&self.basis);
        let mut den = self.clone();
        for i in 0..self.basis.len() {
            if den.terms.keys().any(|m| m & (1 << i) != 0) {
                let c = den.conjugate(i);
                num = &num * &c;
                den = &den * &c;
            }
        }
        let d = den.as_ratfunc().expect("norm is free of radicals");
        let inv = d.recip().ok_or(AlgebraError::DivisionByZero)?;
        Ok(num.mul_ratfunc(&inv))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(&other.invert()?)
    }

    /// Compile for repeated floating-point evaluation.
    pub fn compile<S: Scalar>(&self, ctx: S::Ctx) -> NumericElement<S> {
        NumericElement::new(self, ctx)
    }

    /// Value at `a` with every `R_α = +√Δ_α(a)`.
    pub fn eval_numeric<S: Scalar>(&self, a: &S, ctx: S::Ctx) -> Result<S, AlgebraError> {
        self.compile::<S>(ctx).eval(a)
    }

    /// Exact value of the rational parts at a rational point together with
    /// the radicands, i.e. `Σ_m c_m ∏_{α∈m} √Δ_α(a)` returned as `(mask, c_m)` pairs.
    pub fn eval_components(&self, a: &Rational) -> Option<Vec<(Mask, Rational)>> {
        self.terms
            .iter()
            .map(|(m, f)| f.eval(a).map(|v| (*m, v)))
            .collect()
    }
}

impl fmt::Display for RadicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for i in 0..self.basis.len() {
                if m & (1 << i) != 0 {
                    write!(f, "*R{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &RadicalElement {
    type Output = RadicalElement;
    fn add(self, rhs: &RadicalElement) -> RadicalElement {
        self.try_add(rhs).expect("radical basis mismatch")
    }
}

impl Sub for &RadicalElement {
    type Output = RadicalElement;
    fn sub(self, rhs: &RadicalElement) -> RadicalElement {
        self.try_sub(rhs).expect("radical basis mismatch")
    }
}

impl Mul for &RadicalElement {
    type Output = RadicalElement;
    fn mul(self, rhs: &RadicalElement) -> RadicalElement {
        self.try_mul(rhs).expect("radical basis mismatch")
    }
}

impl Neg for &RadicalElement {
    type Output = RadicalElement;
    fn neg(self) -> RadicalElement {
        self.negate()
    }
}

/// Floating-point image of a [`RadicalElement`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct NumericElement<S: Scalar> {
    roots: Vec<(S, Sign, Rational)>,
    terms: Vec<(Mask, Vec<S>, Vec<S>)>,
    zero: S,
}

impl<S: Scalar> NumericElement<S> {
    fn new(x: &RadicalElement, ctx: S::Ctx) -> Self {
        let conv = |p: &Poly| {
            p.coeffs()
                .iter()
                .map(|c| S::from_rational(c, ctx))
                .collect::<Vec<_>>()
        };
        let roots = (0..x.basis.len())
            .map(|i| {
                (
                    S::from_rational(x.basis.root(i), ctx),
                    x.basis.sign(i),
                    x.basis.root(i).clone(),
                )
            })
            .collect();
        let terms = x
            .terms
            .iter()
            .map(|(m, f)| (*m, conv(f.numerator()), conv(f.denominator())))
            .collect();
        NumericElement {
            roots,
            terms,
            zero: S::from_i64(0, ctx),
        }
    }

    fn horner(coeffs: &[S], a: &S, zero: &S) -> S {
        let mut acc = zero.clone();
        for c in coeffs.iter().rev() {
            acc = acc * a.clone() + c.clone();
        }
        acc
    }

    /// Square roots `√Δ_α(a)` for every basis root, or the first offending root.
    pub fn radicals(&self, a: &S) -> Result<Vec<S>, AlgebraError> {
        self.roots
            .iter()
            .map(|(r, s, exact)| {
                let d = match s {
                    Sign::Plus => a.clone() - r.clone(),
                    Sign::Minus => r.clone() - a.clone(),
                };
                if d.is_positive_value() {
                    Ok(d.sqrt())
                } else {
                    Err(AlgebraError::Domain {
                        root: exact.clone(),
                        sign: *s,
                        at: a.to_f64(),
                    })
                }
            })
            .collect()
    }

    pub fn eval(&self, a: &S) -> Result<S, AlgebraError> {
        let rad = self.radicals(a)?;
        Ok(self.eval_with_radicals(a, &rad))
    }

    /// Evaluate given precomputed `√Δ_α(a)`; lets several elements share one set of square roots.
    pub fn eval_with_radicals(&self, a: &S, radicals: &[S]) -> S {
        let mut total = self.zero.clone();
        for (m, num, den) in &self.terms {
            let mut v = Self::horner(num, a, &self.zero) / Self::horner(den, a, &self.zero);
            for (i, r) in radicals.iter().enumerate() {
                if m & (1 << i) != 0 {
                    v = v * r.clone();
                }
            }
            total = total + v;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::HpFloat;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn basis1(root: i64, sign: Sign) -> Arc<RadicalBasis> {
        RadicalBasis::new(vec![(q(root, 1), sign)]).unwrap()
    }

    #[test]
    fn normalize_square_and_cube() {
        let b = basis1(0, Sign::Plus);
        let sq = RadicalElement::from_raw_terms(
            &b,
            &[RawTerm {
                coeff: q(1, 1),
                a_power: 0,
                exponents: vec![2],
            }],
        )
        .unwrap();
        assert_eq!(sq, RadicalElement::var(&b));

        let cancel = RadicalElement::from_raw_terms(
            &b,
            &[
                RawTerm {
                    coeff: q(1, 1),
                    a_power: 0,
                    exponents: vec![1],
                },
                RawTerm {
                    coeff: q(-1, 1),
                    a_power: 0,
                    exponents: vec![1],
                },
            ],
        )
        .unwrap();
        assert!(cancel.is_zero());

        let b2 = basis1(2, Sign::Minus);
        let cube = RadicalElement::from_raw_terms(
            &b2,
            &[RawTerm {
                coeff: q(1, 1),
                a_power: 0,
                exponents: vec![3],
            }],
        )
        .unwrap();
        let expected = RadicalElement::monomial(
            &b2,
            1,
            RationalFunction::from_poly(Poly::from_i64s(&[2, -1])),
        );
        assert_eq!(cube, expected);
    }

    #[test]
    fn duplicate_roots_rejected() {
        let err =
            RadicalBasis::new(vec![(q(1, 1), Sign::Plus), (q(1, 1), Sign::Minus)]).unwrap_err();
        assert_eq!(err, AlgebraError::DuplicateRoot(q(1, 1)));
    }

    #[test]
    fn products() {
        let b = basis1(0, Sign::Plus);
        let inv_sqrt = RadicalElement::delta_power(&b, 0, -1);
        let p = &inv_sqrt * &inv_sqrt;
        assert_eq!(p, RadicalElement::delta_power(&b, 0, -2));

        let r = RadicalElement::radical(&b, 0);
        let one = RadicalElement::one(&b);
        let lhs = &(&one + &r) * &(&one - &r);
        assert_eq!(
            lhs,
            RadicalElement::from_poly(&b, Poly::from_i64s(&[1, -1]))
        );

        let x = &r + &RadicalElement::var(&b);
        assert!((&x + &x.negate()).is_zero());
    }

    #[test]
    fn mismatched_bases_rejected() {
        let a = RadicalElement::radical(&basis1(0, Sign::Plus), 0);
        let b = RadicalElement::radical(&basis1(1, Sign::Plus), 0);
        assert_eq!(a.try_mul(&b).unwrap_err(), AlgebraError::BasisMismatch);
    }

    #[test]
    fn derivative_of_inverse_sqrt() {
        let b = basis1(0, Sign::Plus);
        let d = RadicalElement::delta_power(&b, 0, -1).differentiate();
        // −(1/2) a^{−3/2} = −(1/2) R / a²
        assert_eq!(d, RadicalElement::delta_power(&b, 0, -3).scale(&q(-1, 2)));
        assert!(RadicalElement::constant(&b, q(7, 3))
            .differentiate()
            .is_zero());
    }

    #[test]
    fn inversion_examples() {
        let b = basis1(0, Sign::Plus);
        let one = RadicalElement::one(&b);
        let r = RadicalElement::radical(&b, 0);
        let inv = (&one + &r).invert().unwrap();
        let expected = RadicalElement::from_ratfunc(
            &b,
            RationalFunction::new(Poly::one(), Poly::from_i64s(&[1, -1])),
        )
        .try_mul(&(&one - &r))
        .unwrap();
        assert_eq!(inv, expected);
        assert_eq!(r.invert().unwrap(), RadicalElement::delta_power(&b, 0, -1));
        assert_eq!(
            RadicalElement::zero(&b).invert().unwrap_err(),
            AlgebraError::DivisionByZero
        );
    }

    #[test]
    fn numeric_evaluation() {
        let b = basis1(0, Sign::Plus);
        let x = RadicalElement::monomial(&b, 1, RationalFunction::new(Poly::one(), Poly::var()));
        assert!((x.eval_numeric(&4.0f64, ()).unwrap() - 0.5).abs() < 1e-15);
        let c = RadicalElement::constant(&b, q(3, 2));
        assert_eq!(c.eval_numeric(&9.0f64, ()).unwrap(), 1.5);
        let hp = x.eval_numeric(&HpFloat::from_i64(4, 40), 40).unwrap();
        assert!((hp - HpFloat::from_rational(&q(1, 2), 40)).abs().to_f64() < 1e-39);
        let err = x.eval_numeric(&-1.0f64, ()).unwrap_err();
        assert!(matches!(err, AlgebraError::Domain { .. }));
    }
}
