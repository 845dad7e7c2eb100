//! Model specifications and the exact coefficient families `x`, `b_k`, `c_k`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::Poly;
use crate::radical::{AlgebraError, RadicalBasis, RadicalElement, Sign};
use crate::symmetric::{
    binomial, pochhammer, pochhammer_ratio, sigma, sigma_quotient, terminating_2f1, RootMultiset,
    SigmaTable, SymmetricError,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model needs at least one root")]
    NoRoots,
    #[error("root {root} has multiplicity {multiplicity} but {params} parameters")]
    ParamCount {
        root: Rational,
        multiplicity: u32,
        params: usize,
    },
    #[error("odd parity requires a nonzero nu")]
    ZeroNu,
    #[error("nu is only meaningful for odd parity")]
    NuForEven,
    #[error("domain lower end {0} is negative")]
    NegativeDomain(Rational),
    #[error("domain ({lo}, {hi}) is empty")]
    EmptyDomain { lo: Rational, hi: Rational },
    #[error("Δ for root {root} (sign {sign}) is not positive on the domain")]
    SignInconsistent { root: Rational, sign: Sign },
    #[error("all parameters vanish, so x' is identically zero")]
    DegenerateProfile,
    #[error("{object} has momentum degree {got}, expected {expected}")]
    DegreeBookkeeping {
        object: &'static str,
        expected: u32,
        got: u32,
    },
    #[error("hypergeometric denominator vanishes for l = {l}, M = {m}")]
    HypergeometricPole { l: u32, m: u32 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// One root `a_α` of `F` with its multiplicity, sign `ε_α` and parameters.
///
/// A simple root carries the single parameter `ξ_i`; a root of multiplicity
/// `r` carries `μ_{α,1}, .., μ_{α,r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSpec {
    pub value: Rational,
    pub multiplicity: u32,
    pub sign: Sign,
    pub params: Vec<Rational>,
}

impl RootSpec {
    pub fn simple(value: Rational, sign: Sign, xi: Rational) -> Self {
        RootSpec {
            value,
            multiplicity: 1,
            sign,
            params: vec![xi],
        }
    }

    pub fn multiple(value: Rational, sign: Sign, mu: Vec<Rational>) -> Self {
        RootSpec {
            value,
            multiplicity: mu.len() as u32,
            sign,
            params: mu,
        }
    }
}

/// Open interval `(lo, hi)` of admissible `a`; `hi = None` means unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lo: Rational,
    pub hi: Option<Rational>,
}

impl Domain {
    pub fn new(lo: Rational, hi: Option<Rational>) -> Self {
        Domain { lo, hi }
    }

    pub fn contains(&self, a: &Rational) -> bool {
        a > &self.lo && self.hi.as_ref().is_none_or(|h| a < h)
    }

    pub fn contains_f64(&self, a: f64) -> bool {
        use num_traits::ToPrimitive;
        let lo = self.lo.to_f64().unwrap_or(f64::NAN);
        a > lo
            && self
                .hi
                .as_ref()
                .is_none_or(|h| a < h.to_f64().unwrap_or(f64::NAN))
    }

    /// `count` rational points strictly inside, evenly spread (over `(lo, lo+span)` if unbounded).
    pub fn sample_points(&self, count: usize) -> Vec<Rational> {
        let hi = self
            .hi
            .clone()
            .unwrap_or_else(|| &self.lo + Rational::from_integer(4.into()));
        let width = &hi - &self.lo;
        (1..=count)
            .map(|j| {
                &self.lo + &width * Rational::new((j as i64).into(), ((count + 1) as i64).into())
            })
            .collect()
    }
}

/// Full description of one model: roots of `F`, parameters, parity and domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub parity: Parity,
    pub roots: Vec<RootSpec>,
    pub nu: Rational,
    pub domain: Domain,
}

impl ModelSpec {
    /// Construct and validate.
    pub fn new(
        parity: Parity,
        roots: Vec<RootSpec>,
        nu: Rational,
        domain: Domain,
    ) -> Result<Self, ModelError> {
        let spec = ModelSpec {
            parity,
            roots,
            nu,
            domain,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.roots.is_empty() {
            return Err(ModelError::NoRoots);
        }
        for r in &self.roots {
            if r.multiplicity == 0 || r.params.len() != r.multiplicity as usize {
                return Err(ModelError::ParamCount {
                    root: r.value.clone(),
                    multiplicity: r.multiplicity,
                    params: r.params.len(),
                });
            }
        }
        self.multiset()?;
        self.basis()?;
        match self.parity {
            Parity::Odd if self.nu.is_zero() => return Err(ModelError::ZeroNu),
            Parity::Even if !self.nu.is_zero() => return Err(ModelError::NuForEven),
            _ => {}
        }
        if self.domain.lo.is_negative() {
            return Err(ModelError::NegativeDomain(self.domain.lo.clone()));
        }
        if let Some(hi) = &self.domain.hi {
            if hi <= &self.domain.lo {
                return Err(ModelError::EmptyDomain {
                    lo: self.domain.lo.clone(),
                    hi: hi.clone(),
                });
            }
        }
        for r in &self.roots {
            let ok = match r.sign {
                Sign::Plus => r.value <= self.domain.lo,
                Sign::Minus => self.domain.hi.as_ref().is_some_and(|h| &r.value >= h),
            };
            if !ok {
                return Err(ModelError::SignInconsistent {
                    root: r.value.clone(),
                    sign: r.sign,
                });
            }
        }
        if self.parity == Parity::Even
            && self
                .roots
                .iter()
                .all(|r| r.params.iter().all(|p| p.is_zero()))
        {
            return Err(ModelError::DegenerateProfile);
        }
        Ok(())
    }

    /// Degree `n` of `F`.
    pub fn n(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity as usize).sum()
    }

    pub fn multiset(&self) -> Result<RootMultiset, SymmetricError> {
        RootMultiset::new(
            self.roots
                .iter()
                .map(|r| (r.value.clone(), r.multiplicity))
                .collect(),
        )
    }

    pub fn basis(&self) -> Result<Arc<RadicalBasis>, AlgebraError> {
        RadicalBasis::new(
            self.roots
                .iter()
                .map(|r| (r.value.clone(), r.sign))
                .collect(),
        )
    }

    /// `F(a)` expanded from its roots.
    pub fn f_poly(&self) -> Poly {
        Poly::from_roots(self.roots.iter().map(|r| (&r.value, r.multiplicity)))
    }

    /// `A_k`, the coefficient of `a^k` in `F`.
    pub fn a_coeff(&self, k: usize) -> Rational {
        self.f_poly().coeff(k)
    }

    /// Momentum degree of the integrals `S1`, `S2`.
    pub fn integral_degree(&self) -> usize {
        match self.parity {
            Parity::Even => 2 * self.n(),
            Parity::Odd => 2 * self.n() + 1,
        }
    }
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn sign_pow(base: i64, e: i64) -> Rational {
    if base == -1 && e.rem_euclid(2) == 1 {
        int(-1)
    } else {
        int(1)
    }
}

/// Shared state for one spec: basis, `F` and its root tables.
struct Builder<'a> {
    spec: &'a ModelSpec,
    basis: Arc<RadicalBasis>,
    f: RootMultiset,
    plain: SigmaTable,
}

impl<'a> Builder<'a> {
    fn new(spec: &'a ModelSpec) -> Result<Self, ModelError> {
        let f = spec.multiset()?;
        let plain = sigma(&f);
        Ok(Builder {
            spec,
            basis: spec.basis()?,
            f,
            plain,
        })
    }

    fn delta_pow(&self, i: usize, twice: i64) -> RadicalElement {
        RadicalElement::delta_power(&self.basis, i, twice)
    }

    fn value(&self, i: usize) -> &Rational {
        &self.spec.roots[i].value
    }

    fn eps(&self, i: usize) -> i64 {
        self.spec.roots[i].sign.to_i64()
    }

    /// `σ^{(α,s)}` with optional extra simple roots divided out.
    fn deflated(&self, alpha: usize, s: u32, extra: &[usize]) -> Result<SigmaTable, ModelError> {
        let mut div = vec![(self.value(alpha).clone(), s)];
        div.extend(extra.iter().map(|&j| (self.value(j).clone(), 1)));
        Ok(sigma_quotient(&self.f, &div)?)
    }

    fn nu_term(&self) -> bool {
        self.spec.parity == Parity::Odd
    }
}

/// Profile function `x(a)`.
///
/// For odd parity the linear part `ν a / 2` is accompanied by the constant
/// `ν σ_1`, so that `Op_n[F] x = (n + 1/2) ν a` holds on the nose; only `x'`
/// enters the metric, so the constant is immaterial there.
pub fn build_x(spec: &ModelSpec) -> Result<RadicalElement, ModelError> {
    let bld = Builder::new(spec)?;
    let mut x = RadicalElement::zero(&bld.basis);
    for (i, r) in spec.roots.iter().enumerate() {
        for (l, mu) in r.params.iter().enumerate() {
            let l = l as i64 + 1;
            x = &x + &bld.delta_pow(i, 1 - 2 * l).scale(mu);
        }
    }
    if bld.nu_term() {
        let lin = Poly::linear(&spec.nu * bld.plain.get(1), &spec.nu / int(2));
        x = &x + &RadicalElement::from_poly(&bld.basis, lin);
    }
    Ok(x)
}

/// `Op_n[F] x = Σ_{s=0}^{n} F^{(n−s)}/(n−s)! · D^s x / (1/2)_s`.
pub fn apply_op_n(spec: &ModelSpec, x: &RadicalElement) -> RadicalElement {
    let n = spec.n();
    let f = spec.f_poly();
    let half = frac(1, 2);
    let mut out = RadicalElement::zero(x.basis());
    let mut d = x.clone();
    for s in 0..=n {
        let coef = f.taylor_derivative(n - s);
        let term = d
            .mul_poly(&coef)
            .scale(&pochhammer(&half, s as u32).recip());
        out = &out + &term;
        if s < n {
            d = d.differentiate();
        }
    }
    out
}

/// Right-hand side of the profile equation: `0` (even) or `(n + 1/2) ν a` (odd).
pub fn op_n_target(spec: &ModelSpec, basis: &Arc<RadicalBasis>) -> RadicalElement {
    match spec.parity {
        Parity::Even => RadicalElement::zero(basis),
        Parity::Odd => {
            let c = (int(spec.n() as i64) + frac(1, 2)) * &spec.nu;
            RadicalElement::from_poly(basis, Poly::monomial(c, 1))
        }
    }
}

/// `b_k` for `k = 0..=n` (`b_0 = 0` for even parity, `ν` for odd).
pub fn build_b(spec: &ModelSpec) -> Result<Vec<RadicalElement>, ModelError> {
    let bld = Builder::new(spec)?;
    let n = spec.n();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n as i64 {
        let mut tot = RadicalElement::zero(&bld.basis);
        for (i, r) in spec.roots.iter().enumerate() {
            let e = bld.eps(i);
            for (l0, mu) in r.params.iter().enumerate() {
                let l = l0 as i64 + 1;
                let lead = mu / pochhammer_ratio(l);
                for s in 1..=l {
                    let sig = bld.deflated(i, s as u32, &[])?.get(k - s);
                    if sig.is_zero() {
                        continue;
                    }
                    let c = &lead * sign_pow(-e, s - 1) * sig * pochhammer_ratio(l - s + 1);
                    tot = &tot + &bld.delta_pow(i, -(2 * (l - s) + 1)).scale(&c);
                }
            }
        }
        if bld.nu_term() {
            tot = &tot + &RadicalElement::constant(&bld.basis, &spec.nu * bld.plain.get(k));
        }
        out.push(tot.scale(&sign_pow(-1, k)));
    }
    Ok(out)
}

/// Intermediate `b̃_k`, `k = 0..=n`, obtained from partial sums of `Op_n`.
pub fn build_b_tilde(spec: &ModelSpec, x: &RadicalElement) -> Vec<RadicalElement> {
    let n = spec.n();
    let f = spec.f_poly();
    let half = frac(1, 2);
    let mut derivs = vec![x.clone()];
    for _ in 0..=n {
        let next = derivs.last().unwrap().differentiate();
        derivs.push(next);
    }
    let shift = match spec.parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    (0..=n)
        .map(|k| {
            if spec.parity == Parity::Odd && k == n {
                return RadicalElement::constant(x.basis(), spec.nu.clone());
            }
            let top = k + shift;
            let mut acc = RadicalElement::zero(x.basis());
            for (s, d) in derivs.iter().enumerate().take(top + 1).skip(1) {
                let term = d.mul_poly(&f.taylor_derivative(top - s));
                acc = &acc + &term.scale(&pochhammer(&half, s as u32).recip());
            }
            acc
        })
        .collect()
}

/// `b_k` recovered from the `b̃` table by the binomial transform.
pub fn b_from_tilde(spec: &ModelSpec, bt: &[RadicalElement]) -> Vec<RadicalElement> {
    let n = spec.n() as i64;
    let basis = bt[0].basis().clone();
    let minus_a = Poly::from_i64s(&[0, -1]);
    (0..=n)
        .map(|k| {
            let mut acc = RadicalElement::zero(&basis);
            let (start, offset) = match spec.parity {
                Parity::Even => (1, 1),
                Parity::Odd => (0, 0),
            };
            for s in start..=k {
                let c = binomial(n - s, k - s);
                let idx = (n - s + offset) as usize;
                let term = bt[idx].mul_poly(&minus_a.pow((k - s) as u32)).scale(&c);
                acc = &acc + &term;
            }
            acc
        })
        .collect()
}

/// Coefficients `c_k` for `k = 0..=n`.
pub fn build_c(spec: &ModelSpec) -> Result<Vec<RadicalElement>, ModelError> {
    build_c_routed(spec, &[])
}

/// As [`build_c`], but routing the listed simple roots through the
/// multiple-root formulas with `r = 1`.
pub fn build_c_routed(
    spec: &ModelSpec,
    as_multiple: &[usize],
) -> Result<Vec<RadicalElement>, ModelError> {
    let bld = Builder::new(spec)?;
    let n = spec.n();
    let multi: Vec<usize> = (0..spec.roots.len())
        .filter(|&i| spec.roots[i].multiplicity >= 2 || as_multiple.contains(&i))
        .collect();
    let simple: Vec<usize> = (0..spec.roots.len())
        .filter(|i| !multi.contains(i))
        .collect();

    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n as i64 {
        let zero = RadicalElement::zero(&bld.basis);

        // same-root μμ terms
        let mut mm = zero.clone();
        for &al in &multi {
            let e = bld.eps(al);
            let mus = &spec.roots[al].params;
            for (l0, mul) in mus.iter().enumerate() {
                let l = l0 as i64 + 1;
                for (m0, mum) in mus.iter().enumerate() {
                    let m = m0 as i64 + 1;
                    for s in 1..=l {
                        let sig = bld.deflated(al, s as u32, &[])?.get(k - s);
                        if sig.is_zero() {
                            continue;
                        }
                        let power = l + m - s;
                        assert!(power > 0, "vanishing denominator l + m − s");
                        let c = int(2) * mul * mum / pochhammer_ratio(l)
                            * sign_pow(-e, s - 1)
                            * sig
                            * pochhammer_ratio(l - s + 1)
                            * (int(m) - frac(1, 2))
                            / int(power);
                        mm = &mm + &bld.delta_pow(al, -2 * power).scale(&c);
                    }
                }
            }
        }

        // cross μμ terms between distinct multiple roots
        for &al in &multi {
            for &be in &multi {
                if al == be {
                    continue;
                }
                let eb = bld.eps(be);
                for (l0, mul) in spec.roots[al].params.iter().enumerate() {
                    let l = l0 as u32 + 1;
                    for (m0, mum) in spec.roots[be].params.iter().enumerate() {
                        let m = m0 as i64 + 1;
                        for s in 1..=m {
                            let sig = bld.deflated(be, s as u32, &[])?.get(k - s);
                            if sig.is_zero() {
                                continue;
                            }
                            let c = int(2) * mul * mum / pochhammer_ratio(m)
                                * sign_pow(-eb, s - 1)
                                * sig
                                * pochhammer_ratio(m - s + 1)
                                * int(-bld.eps(al));
                            let i = cross_integral(&bld, al, be, l, (m - s) as u32)?;
                            mm = &mm + &i.scale(&c);
                        }
                    }
                }
            }
        }

        // μξ terms
        let mut mx = zero.clone();
        for &al in &multi {
            let e = bld.eps(al);
            for (l0, mu) in spec.roots[al].params.iter().enumerate() {
                let l = l0 as i64 + 1;
                for &i in &simple {
                    let xi = &spec.roots[i].params[0];
                    for s in 1..=l {
                        let t = bld.deflated(al, s as u32, &[i])?;
                        let poly = Poly::linear(t.get(k - s), t.get(k - s - 1));
                        if poly.is_zero() {
                            continue;
                        }
                        let c = mu / pochhammer_ratio(l)
                            * xi
                            * sign_pow(-e, s - 1)
                            * pochhammer_ratio(l - s + 1);
                        let rad = &bld.delta_pow(i, -1) * &bld.delta_pow(al, -(2 * (l - s) + 1));
                        mx = &mx + &rad.mul_poly(&poly).scale(&c);
                    }
                }
            }
        }

        // ξξ terms
        let mut xx = zero.clone();
        for &i in &simple {
            let xi = &spec.roots[i].params[0];
            let sig = bld.deflated(i, 1, &[])?.get(k - 1);
            xx = &xx + &bld.delta_pow(i, -2).scale(&(xi * xi * sig));
            for &j in &simple {
                if i == j {
                    continue;
                }
                let xj = &spec.roots[j].params[0];
                let t = bld.deflated(i, 1, &[j])?;
                let poly = Poly::linear(t.get(k - 1), t.get(k - 2));
                let rad = &bld.delta_pow(i, -1) * &bld.delta_pow(j, -1);
                xx = &xx + &rad.mul_poly(&poly).scale(&(xi * xj));
            }
        }

        let mut inner = &(&mm + &mx.scale_i64(2)) + &xx;

        if bld.nu_term() {
            let nu = &spec.nu;
            let vv = RadicalElement::from_poly(
                &bld.basis,
                Poly::monomial(nu * nu * bld.plain.get(k), 1),
            );
            let mut vx = zero.clone();
            for &i in &simple {
                let xi = &spec.roots[i].params[0];
                let t = bld.deflated(i, 1, &[])?;
                let poly = Poly::linear(t.get(k), t.get(k - 1));
                vx = &vx + &bld.delta_pow(i, -1).mul_poly(&poly).scale(&(nu * xi));
            }
            let mut vm = zero.clone();
            for &al in &multi {
                let e = bld.eps(al);
                for (l0, mu) in spec.roots[al].params.iter().enumerate() {
                    let l = l0 as i64 + 1;
                    let lead = nu * mu / pochhammer_ratio(l);
                    let mut t = bld
                        .delta_pow(al, 1 - 2 * l)
                        .scale(&(bld.plain.get(k) * pochhammer_ratio(l)));
                    for s in 1..=l {
                        let sig = bld.deflated(al, s as u32, &[])?.get(k - s);
                        if sig.is_zero() {
                            continue;
                        }
                        let c = sign_pow(-e, s) * sig * pochhammer_ratio(l - s + 1)
                            / int(2 * l - 2 * s - 1);
                        t = &t + &bld.delta_pow(al, 2 * s - 2 * l + 1).scale(&c);
                    }
                    vm = &vm + &t.scale(&lead);
                }
            }
            inner = &(&(&inner + &vv) + &vx.scale_i64(2)) + &vm.scale_i64(2);
        }

        let pre = sign_pow(-1, k + 1) * frac(1, 2);
        out.push(inner.scale(&pre));
    }
    Ok(out)
}

/// `I^{α,β}_{l,M}`, an antiderivative of `Δ_β^{−M−1/2} Δ_α^{−l−1/2}` up to the sign `−ε_α`,
/// written as a terminating hypergeometric polynomial in `Δ_α`.
fn cross_integral(
    bld: &Builder<'_>,
    al: usize,
    be: usize,
    l: u32,
    m: u32,
) -> Result<RadicalElement, ModelError> {
    let (ea, eb) = (bld.eps(al), bld.eps(be));
    let eta = int(eb) * (bld.value(al) - bld.value(be));
    let sg = int(ea * eb);
    let z = bld.basis.delta(al).scale(&(-sg / &eta));
    let c = frac(3, 2) - int(l as i64);
    let hyp = terminating_2f1(&Rational::one(), l + m - 1, &c, &z)
        .ok_or(ModelError::HypergeometricPole { l, m })?;
    let rad = &bld.delta_pow(be, 1 - 2 * m as i64) * &bld.delta_pow(al, 1 - 2 * l as i64);
    Ok(rad.mul_poly(&hyp).scale(&(-int(ea) / eta)))
}

/// Everything the phase-space assembly needs.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub x: RadicalElement,
    pub dx: RadicalElement,
    /// `b_0..=b_n`
    pub b: Vec<RadicalElement>,
    /// `c_0..=c_n`
    pub c: Vec<RadicalElement>,
    /// `b̃_0..=b̃_n`
    pub b_tilde: Vec<RadicalElement>,
}

impl CoefficientSet {
    pub fn build(spec: &ModelSpec) -> Result<Self, ModelError> {
        spec.validate()?;
        let x = build_x(spec)?;
        let dx = x.differentiate();
        let b_tilde = build_b_tilde(spec, &x);
        Ok(CoefficientSet {
            b: build_b(spec)?,
            c: build_c(spec)?,
            dx,
            x,
            b_tilde,
        })
    }
}

/// Outcome of one exact identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub label: String,
    pub passed: bool,
    /// Normal form of the residual when it is not zero.
    pub residual: Option<String>,
}

impl RelationCheck {
    pub fn from_residual(label: impl Into<String>, residual: &RadicalElement) -> Self {
        let passed = residual.is_zero();
        RelationCheck {
            label: label.into(),
            passed,
            residual: (!passed).then(|| residual.to_string()),
        }
    }
}

pub fn all_pass(checks: &[RelationCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// The differential system satisfied by the `b_k`:
/// `b'_{k+1} = a b'_k + b_k/2 + (−1)^{k+1} σ_k x'` and the terminal relation
/// `0 = a b'_n + b_n/2 + (−1)^{n+1} σ_n x'`, seeded by `b_1 = −x` (even) or
/// `b_0 = ν`, `b_1 = ν a/2 − x` (odd).
pub fn verify_b_recurrence(
    spec: &ModelSpec,
    coeffs: &CoefficientSet,
) -> Result<Vec<RelationCheck>, ModelError> {
    let f = spec.multiset()?;
    let sig = sigma(&f);
    let n = spec.n();
    let basis = coeffs.x.basis().clone();
    let b = &coeffs.b;
    let db: Vec<RadicalElement> = b.iter().map(|e| e.differentiate()).collect();
    let a = RadicalElement::var(&basis);
    let half = frac(1, 2);
    let mut out = Vec::new();

    let first = match spec.parity {
        Parity::Even => &b[1] + &coeffs.x,
        Parity::Odd => {
            let c0 = &b[0] - &RadicalElement::constant(&basis, spec.nu.clone());
            out.push(RelationCheck::from_residual("b_0 = nu", &c0));
            let lin = RadicalElement::from_poly(&basis, Poly::monomial(&spec.nu * &half, 1));
            &(&b[1] + &coeffs.x) - &lin
        }
    };
    out.push(RelationCheck::from_residual("b_1 initial value", &first));

    let start = match spec.parity {
        Parity::Even => 1,
        Parity::Odd => 0,
    };
    let rhs = |k: usize| -> RadicalElement {
        let s = coeffs
            .dx
            .scale(&(sign_pow(-1, k as i64 + 1) * sig.get(k as i64)));
        &(&(&a * &db[k]) + &b[k].scale(&half)) + &s
    };
    for k in start..n {
        let res = &db[k + 1] - &rhs(k);
        out.push(RelationCheck::from_residual(
            format!("b'_{} step", k + 1),
            &res,
        ));
    }
    out.push(RelationCheck::from_residual("terminal relation", &rhs(n)));
    Ok(out)
}

/// `c'_k + b_k x' = 0` for every `k`.
pub fn verify_c_derivative(spec: &ModelSpec, coeffs: &CoefficientSet) -> Vec<RelationCheck> {
    let start = match spec.parity {
        Parity::Even => 1,
        Parity::Odd => 0,
    };
    (start..=spec.n())
        .map(|k| {
            let res = &coeffs.c[k].differentiate() + &(&coeffs.b[k] * &coeffs.dx);
            RelationCheck::from_residual(format!("c'_{k} = -b_{k} x'"), &res)
        })
        .collect()
}

/// `Op_n[F] x` against its right-hand side.
pub fn verify_profile_equation(spec: &ModelSpec, x: &RadicalElement) -> RelationCheck {
    let res = &apply_op_n(spec, x) - &op_n_target(spec, x.basis());
    RelationCheck::from_residual("Op_n[F] x", &res)
}

/// `b_k` from the closed form against the `b̃` route.
pub fn verify_b_tilde(spec: &ModelSpec, coeffs: &CoefficientSet) -> Vec<RelationCheck> {
    let alt = b_from_tilde(spec, &coeffs.b_tilde);
    alt.iter()
        .zip(&coeffs.b)
        .enumerate()
        .map(|(k, (u, v))| RelationCheck::from_residual(format!("b_{k} via b-tilde"), &(u - v)))
        .collect()
}
