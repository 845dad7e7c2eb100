//! Exact checks of the auxiliary identities (derivative sums, deflated
//! symmetric functions, antiderivatives) and of the parametric solution of
//! the quartic Novichkov equations.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::Poly;
use crate::radical::{AlgebraError, RadicalBasis, RadicalElement, Sign};
use crate::ratfunc::RationalFunction;
use crate::sweep::{nonzero_in, rational_in};
use crate::symmetric::{
    binomial, pochhammer, pochhammer_ratio, sigma_deflated, terminating_2f1, RootMultiset,
    SymmetricError,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AppendixError {
    #[error("roots a_alpha = a_beta = {0}: eta vanishes")]
    EqualRoots(Rational),
    #[error("2F1 denominator vanishes for l = {l}, M = {m}")]
    SurvivingPole { l: u32, m: u32 },
    #[error("B_4 = 0: a root of F vanishes")]
    ZeroRoot,
    #[error("a_1 = a_2: use the multiple-root branch")]
    UseMultipleBranch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn factorial(k: u32) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, j| acc * q(j))
}

fn sign_pow(sign: &Rational, k: u32) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        sign.clone()
    }
}

/// Which antiderivative of the `u`-family is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UFamily {
    /// `∫ (1+t²)^{l−1}`
    Polynomial,
    /// `∫ (t²+ε)^{−l−1/2}`
    Shifted(Sign),
    /// `∫ (1−t²)^{−l−1/2}`
    Unit,
}

/// Identities over the deflated symmetric functions, swept over every valid index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaIdentity {
    /// multiply `F/(τ−a_1)^s` by `τ−a_1`
    Bid1,
    /// multiply `F/((τ−a_1)^s(τ−a_i))` by `τ−a_i`
    Bid2,
    /// multiply `F/((τ−a_1)^s(τ−a_i))` by `τ−a_1`
    Bid3,
    /// truncated geometric sum `Λ^i_{k−1}`
    Lambda,
}

/// One randomized instance of an identity.
#[derive(Debug, Clone, PartialEq)]
pub enum AppendixCase {
    /// `Σ_{s=p}^k F^{(k−s)}/(k−s)! · D^s x_l/(1/2)_s` against its closed form, `x_l = Δ_1^{1/2−l}`.
    DerivativeSum {
        f: RootMultiset,
        root: Rational,
        sign: Sign,
        p: u32,
        k: u32,
        l: u32,
    },
    Sigma {
        identity: SigmaIdentity,
        root: Rational,
        multiplicity: u32,
        simple: Vec<Rational>,
    },
    UAntiderivative {
        family: UFamily,
        l: u32,
    },
    /// `∫ (l−1/2) Δ_α^{−l−1/2} Δ_β^{−1/2}`
    Int0 {
        l: u32,
        alpha: (Rational, Sign),
        beta: (Rational, Sign),
    },
    /// `∫ (l−1/2) Δ_α^{−l−1/2} Δ_β^{−M−1/2}` via a terminating `₂F₁`
    Int1 {
        l: u32,
        m: u32,
        alpha: (Rational, Sign),
        beta: (Rational, Sign),
    },
    /// the `M = 0` closed form of `Int1` equals that of `Int0`
    Int1Reduction {
        l: u32,
        alpha: (Rational, Sign),
        beta: (Rational, Sign),
    },
    /// `(1/𝒫_l) Σ_{s>k} C(s−1,k) 𝒫_s = (2l−1)/(2k+1) C(l−1,k)` for all `k < l`
    PochhammerSums {
        l: u32,
    },
}

impl AppendixCase {
    /// Stable identity name used in reports.
    pub fn identity(&self) -> &'static str {
        match self {
            AppendixCase::DerivativeSum { .. } => "A.form1",
            AppendixCase::Sigma { identity, .. } => match identity {
                SigmaIdentity::Bid1 => "B.bid1",
                SigmaIdentity::Bid2 => "B.bid2",
                SigmaIdentity::Bid3 => "B.bid3",
                SigmaIdentity::Lambda => "B.lambda",
            },
            AppendixCase::UAntiderivative { family, .. } => match family {
                UFamily::Polynomial => "C.int2",
                UFamily::Shifted(_) => "C.int3",
                UFamily::Unit => "C.int4",
            },
            AppendixCase::Int0 { .. } => "C.int0",
            AppendixCase::Int1 { .. } => "C.int1",
            AppendixCase::Int1Reduction { .. } => "C.int1-M0",
            AppendixCase::PochhammerSums { .. } => "C.idCls",
        }
    }
}

impl fmt::Display for AppendixCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppendixCase::DerivativeSum {
                f: fm,
                root,
                sign,
                p,
                k,
                l,
            } => {
                write!(
                    f,
                    "F={}, a1={root}, eps={sign}, p={p}, k={k}, l={l}",
                    fm.polynomial()
                )
            }
            AppendixCase::Sigma {
                root,
                multiplicity,
                simple,
                ..
            } => {
                let s: Vec<String> = simple.iter().map(|r| r.to_string()).collect();
                write!(f, "a1={root} (r={multiplicity}), simple=[{}]", s.join(", "))
            }
            AppendixCase::UAntiderivative { family, l } => match family {
                UFamily::Shifted(e) => write!(f, "eps={e}, l={l}"),
                _ => write!(f, "l={l}"),
            },
            AppendixCase::Int0 { l, alpha, beta }
            | AppendixCase::Int1Reduction { l, alpha, beta } => {
                write!(
                    f,
                    "l={l}, alpha=({}, {}), beta=({}, {})",
                    alpha.0, alpha.1, beta.0, beta.1
                )
            }
            AppendixCase::Int1 { l, m, alpha, beta } => {
                write!(
                    f,
                    "l={l}, M={m}, alpha=({}, {}), beta=({}, {})",
                    alpha.0, alpha.1, beta.0, beta.1
                )
            }
            AppendixCase::PochhammerSums { l } => write!(f, "l={l}"),
        }
    }
}

/// Result of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub identity: &'static str,
    pub case: String,
    pub passed: bool,
    /// First failing index tuple or a nonzero residual.
    pub detail: Option<String>,
}

pub fn check_case(case: &AppendixCase) -> Result<CaseOutcome, AppendixError> {
    let detail = match case {
        AppendixCase::DerivativeSum {
            f,
            root,
            sign,
            p,
            k,
            l,
        } => {
            let (lhs, rhs) = derivative_sum_sides(&f.polynomial(), root, *sign, *p, *k, *l)?;
            residual_detail(&(&lhs - &rhs))
        }
        AppendixCase::Sigma {
            identity,
            root,
            multiplicity,
            simple,
        } => check_sigma_identity(*identity, root, *multiplicity, simple)?,
        AppendixCase::UAntiderivative { family, l } => {
            residual_detail(&u_antiderivative_residual(*family, *l)?)
        }
        AppendixCase::Int0 { l, alpha, beta } => {
            let (basis, rhs) = int0_closed_form(*l, alpha, beta)?;
            residual_detail(&(&rhs.differentiate() - &integrand(&basis, *l, 0)))
        }
        AppendixCase::Int1 { l, m, alpha, beta } => {
            let (basis, rhs) = int1_closed_form(*l, *m, alpha, beta)?;
            residual_detail(&(&rhs.differentiate() - &integrand(&basis, *l, *m)))
        }
        AppendixCase::Int1Reduction { l, alpha, beta } => {
            let (_, r0) = int0_closed_form(*l, alpha, beta)?;
            let (_, r1) = int1_closed_form(*l, 0, alpha, beta)?;
            residual_detail(&(&r1 - &r0))
        }
        AppendixCase::PochhammerSums { l } => {
            let pl = pochhammer_ratio(*l as i64);
            (0..*l as i64)
                .find(|&k| {
                    let lhs: Rational = (k + 1..=*l as i64)
                        .map(|s| binomial(s - 1, k) * pochhammer_ratio(s))
                        .sum::<Rational>()
                        / &pl;
                    let rhs = q(2 * *l as i64 - 1) / q(2 * k + 1) * binomial(*l as i64 - 1, k);
                    lhs != rhs
                })
                .map(|k| format!("fails at k={k}"))
        }
    };
    Ok(CaseOutcome {
        identity: case.identity(),
        case: case.to_string(),
        passed: detail.is_none(),
        detail,
    })
}

fn residual_detail(r: &RadicalElement) -> Option<String> {
    (!r.is_zero()).then(|| {
        let s = r.to_string();
        if s.len() > 200 {
            format!("{}...", &s[..200])
        } else {
            s
        }
    })
}

/// Both sides of the derivative-sum identity.
pub fn derivative_sum_sides(
    f: &Poly,
    root: &Rational,
    sign: Sign,
    p: u32,
    k: u32,
    l: u32,
) -> Result<(RadicalElement, RadicalElement), AppendixError> {
    let basis = RadicalBasis::new(vec![(root.clone(), sign)])?;
    let x = RadicalElement::delta_power(&basis, 0, 1 - 2 * l as i64);
    let mut lhs = RadicalElement::zero(&basis);
    let mut dx = x.nth_derivative(p as usize);
    for s in p..=k {
        let fk = RadicalElement::from_poly(&basis, f.taylor_derivative((k - s) as usize));
        lhs = &lhs + &(&fk * &dx).scale(&(Rational::one() / pochhammer(&half(), s)));
        dx = dx.differentiate();
    }

    let neg_eps = -sign.to_rational();
    let delta = basis.delta(0).clone();
    let mut rhs = RadicalElement::zero(&basis);
    let p_half = Rational::from_integer(p.into()) - half();
    for s in 1..=l {
        let c = pochhammer(&p_half, l - s) / factorial(l - s);
        let ratio =
            RadicalElement::from_ratfunc(&basis, RationalFunction::new(f.clone(), delta.pow(s)));
        let d = ratio
            .nth_derivative((k - p) as usize)
            .scale(&(Rational::one() / factorial(k - p)));
        let pw = RadicalElement::delta_power(&basis, 0, 2 * s as i64 - 2 * (l + p) as i64 + 1);
        rhs = &rhs + &(&pw * &d).scale(&c);
    }
    let pref = sign_pow(&neg_eps, p) / pochhammer_ratio(l as i64);
    Ok((lhs, rhs.scale(&pref)))
}

/// Sweeps every valid index of the identity; `Some(detail)` on the first failure.
fn check_sigma_identity(
    identity: SigmaIdentity,
    a1: &Rational,
    r: u32,
    simple: &[Rational],
) -> Result<Option<String>, AppendixError> {
    let mut roots = vec![(a1.clone(), r)];
    roots.extend(simple.iter().map(|a| (a.clone(), 1)));
    let f = RootMultiset::new(roots)?;
    let n = f.degree() as i64;
    let plain = |s: u32| sigma_deflated(&f, a1, s, None);
    let with_i = |s: u32, ai: &Rational| sigma_deflated(&f, a1, s, Some(ai));
    match identity {
        SigmaIdentity::Bid1 => {
            for s in 1..=r {
                let (ts, tm) = (plain(s)?, plain(s - 1)?);
                let si = s as i64;
                for k in 0..=n + si - 1 {
                    if ts.get(k - si + 1) + a1 * ts.get(k - si) != tm.get(k - si + 1) {
                        return Ok(Some(format!("fails at s={s}, k={k}")));
                    }
                }
            }
        }
        SigmaIdentity::Bid2 => {
            for ai in simple {
                for s in 0..=r {
                    let (ts, ti) = (plain(s)?, with_i(s, ai)?);
                    let si = s as i64;
                    for k in 0..=n + si {
                        if ts.get(k - si) != ti.get(k - si) + ai * ti.get(k - si - 1) {
                            return Ok(Some(format!("fails at i={ai}, s={s}, k={k}")));
                        }
                    }
                }
            }
        }
        SigmaIdentity::Bid3 => {
            for ai in simple {
                for s in 1..=r {
                    let (tm, ts) = (with_i(s - 1, ai)?, with_i(s, ai)?);
                    let si = s as i64;
                    for k in 0..=n + si {
                        if tm.get(k - si) != ts.get(k - si) + a1 * ts.get(k - si - 1) {
                            return Ok(Some(format!("fails at i={ai}, s={s}, k={k}")));
                        }
                    }
                }
            }
        }
        SigmaIdentity::Lambda => {
            for ai in simple {
                let d = a1 - ai;
                let ti = with_i(0, ai)?;
                let tables: Vec<_> = (1..=r).map(plain).collect::<Result<_, _>>()?;
                // m = l − t ranges over 1..=r
                for m in 1..=r {
                    let tm = with_i(m, ai)?;
                    let mi = m as i64;
                    for k in 0..=n + 1 {
                        let mut lam = ti.get(k - 1);
                        let mut pw = Rational::one();
                        for s in 0..mi {
                            lam -= &pw * tables[s as usize].get(k - s - 1);
                            pw *= &d;
                        }
                        if lam != &pw * tm.get(k - mi - 1) {
                            return Ok(Some(format!("fails at i={ai}, l-t={m}, k={k}")));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `D_u(RHS) − integrand`, written in `w = 1 + u²`, `u² + ε` or `1 − u²` so
/// that every power is a half-integer power of a single linear radicand.
pub fn u_antiderivative_residual(family: UFamily, l: u32) -> Result<RadicalElement, AppendixError> {
    let basis = RadicalBasis::new(vec![(Rational::zero(), Sign::Plus)])?;
    let w = RadicalElement::var(&basis);
    let wp = |twice: i64| RadicalElement::delta_power(&basis, 0, twice);
    let pl = pochhammer_ratio(l as i64);
    let li = l as i64;
    let mut d = RadicalElement::zero(&basis);
    let target = match family {
        UFamily::Polynomial => {
            // d/du (u w^{s−1}) = w^{s−1} + 2(s−1)(w−1) w^{s−2}
            for s in 1..=li {
                let u2 = &w - &RadicalElement::one(&basis);
                let term = &wp(2 * s - 2) + &(&u2 * &wp(2 * s - 4)).scale(&q(2 * (s - 1)));
                d = &d + &term.scale(&pochhammer_ratio(s));
            }
            wp(2 * li - 2).scale(&q(2 * li - 1))
        }
        UFamily::Shifted(eps) => {
            let e = eps.to_rational();
            let u2 = &w - &RadicalElement::constant(&basis, e.clone());
            // d/du (u w^{1/2−s}) = w^{1/2−s} + (1−2s) u² w^{−1/2−s}
            for s in 1..=li {
                let term = &wp(1 - 2 * s) + &(&u2 * &wp(-1 - 2 * s)).scale(&q(1 - 2 * s));
                let c = &e * sign_pow(&e, (li - s) as u32) * pochhammer_ratio(s);
                d = &d + &term.scale(&c);
            }
            wp(-2 * li - 1).scale(&q(2 * li - 1))
        }
        UFamily::Unit => {
            let u2 = &RadicalElement::one(&basis) - &w;
            // d/du (u w^{1/2−s}) = w^{1/2−s} + (2s−1) u² w^{−1/2−s}
            for s in 1..=li {
                let term = &wp(1 - 2 * s) + &(&u2 * &wp(-1 - 2 * s)).scale(&q(2 * s - 1));
                d = &d + &term.scale(&pochhammer_ratio(s));
            }
            wp(-2 * li - 1).scale(&q(2 * li - 1))
        }
    };
    Ok(&d.scale(&(Rational::one() / pl)) - &target)
}

fn pair_basis(
    alpha: &(Rational, Sign),
    beta: &(Rational, Sign),
) -> Result<Arc<RadicalBasis>, AppendixError> {
    if alpha.0 == beta.0 {
        return Err(AppendixError::EqualRoots(alpha.0.clone()));
    }
    Ok(RadicalBasis::new(vec![alpha.clone(), beta.clone()])?)
}

/// `(l−1/2) Δ_α^{−l−1/2} Δ_β^{−M−1/2}` over a two-root basis.
fn integrand(basis: &Arc<RadicalBasis>, l: u32, m: u32) -> RadicalElement {
    let a = RadicalElement::delta_power(basis, 0, -2 * l as i64 - 1);
    let b = RadicalElement::delta_power(basis, 1, -2 * m as i64 - 1);
    (&a * &b).scale(&(q(l as i64) - half()))
}

/// Closed-form antiderivative for `M = 0`.
pub fn int0_closed_form(
    l: u32,
    alpha: &(Rational, Sign),
    beta: &(Rational, Sign),
) -> Result<(Arc<RadicalBasis>, RadicalElement), AppendixError> {
    let basis = pair_basis(alpha, beta)?;
    let eta = alpha.1.to_rational() * (&beta.0 - &alpha.0);
    let li = l as i64;
    let mut sum = RadicalElement::zero(&basis);
    let mut eta_pow = Rational::one();
    for s in 1..=li {
        eta_pow *= &eta;
        let c = pochhammer_ratio(li - s + 1) / &eta_pow;
        sum = &sum + &RadicalElement::delta_power(&basis, 0, -(2 * (li - s) + 1)).scale(&c);
    }
    let front =
        RadicalElement::radical(&basis, 1).scale(&(beta.1.to_rational() / pochhammer_ratio(li)));
    Ok((basis.clone(), &front * &sum))
}

/// Closed-form antiderivative for any `M ≥ 0`, with the `₂F₁` summed as a polynomial.
pub fn int1_closed_form(
    l: u32,
    m: u32,
    alpha: &(Rational, Sign),
    beta: &(Rational, Sign),
) -> Result<(Arc<RadicalBasis>, RadicalElement), AppendixError> {
    let basis = pair_basis(alpha, beta)?;
    let ea = alpha.1.to_rational();
    let eta_t = beta.1.to_rational() * (&alpha.0 - &beta.0);
    let sigma = alpha.1.times(beta.1).to_rational();
    let z = basis.delta(0).scale(&(-sigma / &eta_t));
    let c = q(3) / q(2) - q(l as i64);
    let f = terminating_2f1(&Rational::one(), l + m - 1, &c, &z)
        .ok_or(AppendixError::SurvivingPole { l, m })?;
    let pa = RadicalElement::delta_power(&basis, 0, 1 - 2 * l as i64);
    let pb = RadicalElement::delta_power(&basis, 1, 1 - 2 * m as i64);
    let rhs = (&(&pa * &pb) * &RadicalElement::from_poly(&basis, f)).scale(&(-ea / eta_t));
    Ok((basis, rhs))
}

/// Families of cases a suite sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    A,
    B,
    C,
}

impl Suite {
    pub fn from_name(s: &str) -> Option<Suite> {
        match s {
            "A" | "a" => Some(Suite::A),
            "B" | "b" => Some(Suite::B),
            "C" | "c" => Some(Suite::C),
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::A => "A",
            Suite::B => "B",
            Suite::C => "C",
        })
    }
}

fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn distinct_rationals(rng: &mut impl Rng, count: usize, avoid: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < count {
        let r = rational_in(rng, 5, 3);
        if !out.contains(&r) && !avoid.contains(&r) {
            out.push(r);
        }
    }
    out
}

fn random_pair(rng: &mut impl Rng) -> ((Rational, Sign), (Rational, Sign)) {
    let v = distinct_rationals(rng, 2, &[]);
    (
        (v[0].clone(), random_sign(rng)),
        (v[1].clone(), random_sign(rng)),
    )
}

/// `cases` random instances per identity of the suite (`n ≤ 5`, `l, M ≤ 4`).
pub fn generate_cases(suite: Suite, cases: usize, seed: u64) -> Vec<AppendixCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    match suite {
        Suite::A => {
            for _ in 0..cases {
                let n = rng.gen_range(1..=5u32);
                let root = rational_in(&mut rng, 5, 3);
                // half the time F vanishes at a_1 to some order
                let r = if rng.gen_bool(0.5) {
                    rng.gen_range(1..=n)
                } else {
                    0
                };
                let mut roots = if r > 0 {
                    vec![(root.clone(), r)]
                } else {
                    Vec::new()
                };
                let others =
                    distinct_rationals(&mut rng, (n - r) as usize, std::slice::from_ref(&root));
                roots.extend(others.into_iter().map(|v| (v, 1)));
                let f = RootMultiset::new(roots).expect("distinct roots");
                let k = rng.gen_range(0..=n + 1);
                let p = rng.gen_range(0..=k);
                let l = rng.gen_range(1..=4);
                out.push(AppendixCase::DerivativeSum {
                    f,
                    root,
                    sign: random_sign(&mut rng),
                    p,
                    k,
                    l,
                });
            }
        }
        Suite::B => {
            for identity in [
                SigmaIdentity::Bid1,
                SigmaIdentity::Bid2,
                SigmaIdentity::Bid3,
                SigmaIdentity::Lambda,
            ] {
                for _ in 0..cases {
                    let r = rng.gen_range(2..=4u32);
                    let count = rng.gen_range(1..=5 - r) as usize;
                    let root = rational_in(&mut rng, 5, 3);
                    let simple = distinct_rationals(&mut rng, count, std::slice::from_ref(&root));
                    out.push(AppendixCase::Sigma {
                        identity,
                        root,
                        multiplicity: r,
                        simple,
                    });
                }
            }
        }
        Suite::C => {
            for _ in 0..cases {
                let l = rng.gen_range(1..=6);
                out.push(AppendixCase::UAntiderivative {
                    family: UFamily::Polynomial,
                    l,
                });
            }
            for _ in 0..cases {
                let l = rng.gen_range(1..=6);
                out.push(AppendixCase::UAntiderivative {
                    family: UFamily::Shifted(random_sign(&mut rng)),
                    l,
                });
            }
            for _ in 0..cases {
                let l = rng.gen_range(1..=6);
                out.push(AppendixCase::UAntiderivative {
                    family: UFamily::Unit,
                    l,
                });
            }
            for _ in 0..cases {
                let (alpha, beta) = random_pair(&mut rng);
                out.push(AppendixCase::Int0 {
                    l: rng.gen_range(1..=4),
                    alpha,
                    beta,
                });
            }
            for _ in 0..cases {
                let (alpha, beta) = random_pair(&mut rng);
                out.push(AppendixCase::Int1 {
                    l: rng.gen_range(1..=4),
                    m: rng.gen_range(0..=4),
                    alpha,
                    beta,
                });
            }
            for _ in 0..cases {
                let (alpha, beta) = random_pair(&mut rng);
                out.push(AppendixCase::Int1Reduction {
                    l: rng.gen_range(1..=4),
                    alpha,
                    beta,
                });
            }
            for _ in 0..cases {
                out.push(AppendixCase::PochhammerSums {
                    l: rng.gen_range(1..=12),
                });
            }
        }
    }
    out
}

/// Pass counts for one identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityTally {
    pub identity: &'static str,
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<CaseOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub tallies: Vec<IdentityTally>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.tallies.iter().all(|t| t.passed == t.total)
    }

    pub fn total(&self) -> usize {
        self.tallies.iter().map(|t| t.total).sum()
    }

    pub fn passed(&self) -> usize {
        self.tallies.iter().map(|t| t.passed).sum()
    }
}

/// Generate and check `cases` instances per identity, in parallel; the
/// report order only depends on the seed.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> Result<SuiteReport, AppendixError> {
    let all = generate_cases(suite, cases, seed);
    let outcomes: Vec<CaseOutcome> = all.par_iter().map(check_case).collect::<Result<_, _>>()?;
    let mut tallies: Vec<IdentityTally> = Vec::new();
    for o in outcomes {
        let slot = match tallies.iter().position(|t| t.identity == o.identity) {
            Some(i) => i,
            None => {
                tallies.push(IdentityTally {
                    identity: o.identity,
                    total: 0,
                    passed: 0,
                    failures: Vec::new(),
                });
                tallies.len() - 1
            }
        };
        let t = &mut tallies[slot];
        t.total += 1;
        if o.passed {
            t.passed += 1;
        } else {
            t.failures.push(o);
        }
    }
    Ok(SuiteReport {
        suite,
        seed,
        tallies,
    })
}

/// The two roots (or one double root) of `F` for the quartic case.
#[derive(Debug, Clone, PartialEq)]
pub enum NovichkovBranch {
    Distinct {
        a1: Rational,
        a2: Rational,
        xi1: Rational,
        xi2: Rational,
    },
    Multiple {
        a1: Rational,
        mu1: Rational,
        mu2: Rational,
    },
}

impl fmt::Display for NovichkovBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NovichkovBranch::Distinct { a1, a2, xi1, xi2 } => {
                write!(
                    f,
                    "distinct: a1 = {a1}, a2 = {a2}, xi1 = {xi1}, xi2 = {xi2}"
                )
            }
            NovichkovBranch::Multiple { a1, mu1, mu2 } => {
                write!(f, "multiple: a1 = {a1}, mu1 = {mu1}, mu2 = {mu2}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NovichkovParams {
    pub branch: NovichkovBranch,
    /// Free shift of `h`.
    pub b1: Rational,
    /// Integration constant of `t(a)`; fixes `B_3 = A_0 t_0`.
    pub t0: Rational,
}

impl NovichkovParams {
    pub fn distinct(a1: Rational, a2: Rational, xi1: Rational, xi2: Rational) -> Self {
        NovichkovParams {
            branch: NovichkovBranch::Distinct { a1, a2, xi1, xi2 },
            b1: Rational::zero(),
            t0: Rational::zero(),
        }
    }

    pub fn multiple(a1: Rational, mu1: Rational, mu2: Rational) -> Self {
        NovichkovParams {
            branch: NovichkovBranch::Multiple { a1, mu1, mu2 },
            b1: Rational::zero(),
            t0: Rational::zero(),
        }
    }

    /// `(A_0, A_1)` of `F = a² + A_1 a + A_0`.
    fn f_coeffs(&self) -> (Rational, Rational) {
        match &self.branch {
            NovichkovBranch::Distinct { a1, a2, .. } => (a1 * a2, -(a1 + a2)),
            NovichkovBranch::Multiple { a1, .. } => (a1 * a1, -(a1 * q(2))),
        }
    }

    /// `B_0 ..= B_4`.
    pub fn b_constants(&self) -> [Rational; 5] {
        let (a0, a1) = self.f_coeffs();
        [Rational::one(), self.b1.clone(), a1, &a0 * &self.t0, -a0]
    }

    /// `(B_5, B_6)` from the closed forms.
    pub fn closed_form_constants(&self) -> (Rational, Rational) {
        match &self.branch {
            NovichkovBranch::Distinct { a1, a2, xi1, xi2 } => {
                let pre = (a1 - a2) / (a1 * a2);
                let b5 = &pre * (a1 * a1 * xi2 * xi2 - a2 * a2 * xi1 * xi1);
                let b6 = -(&pre * (a1 * xi2 * xi2 - a2 * xi1 * xi1));
                (b5, b6)
            }
            NovichkovBranch::Multiple { a1, mu1, mu2 } => {
                let b5 = q(4) * mu2 / a1 * (q(2) * mu2 - a1 * mu1);
                let b6 = -(q(4) * mu2 / (a1 * a1) * (mu2 - a1 * mu1));
                (b5, b6)
            }
        }
    }
}

/// Exact residuals of the two quartic equations on the parametric solution.
#[derive(Debug, Clone, PartialEq)]
pub struct NovichkovOutcome {
    /// `N1` left side minus the closed-form `B_5`.
    pub residual_n1: RadicalElement,
    pub residual_n2: RadicalElement,
    /// `𝒯 + a x + 2 F x'`.
    pub residual_t: RadicalElement,
    /// Left sides when they reduce to constants.
    pub b5: Option<Rational>,
    pub b6: Option<Rational>,
    pub b5_closed: Rational,
    pub b6_closed: Rational,
}

impl NovichkovOutcome {
    pub fn passed(&self) -> bool {
        self.residual_n1.is_zero() && self.residual_n2.is_zero() && self.residual_t.is_zero()
    }
}

pub fn novichkov_residuals(params: &NovichkovParams) -> Result<NovichkovOutcome, AppendixError> {
    let (a0, _) = params.f_coeffs();
    if a0.is_zero() {
        return Err(AppendixError::ZeroRoot);
    }
    let (basis, x, t, f) = match &params.branch {
        NovichkovBranch::Distinct { a1, a2, xi1, xi2 } => {
            if a1 == a2 {
                return Err(AppendixError::UseMultipleBranch);
            }
            let basis =
                RadicalBasis::new(vec![(a1.clone(), Sign::Plus), (a2.clone(), Sign::Plus)])?;
            let r1 = RadicalElement::delta_power(&basis, 0, -1);
            let r2 = RadicalElement::delta_power(&basis, 1, -1);
            let x = &r1.scale(xi1) + &r2.scale(xi2);
            let t = -&(&r1.scale(&(a2 * xi1)) + &r2.scale(&(a1 * xi2)));
            (basis, x, t, Poly::from_roots([(a1, 1), (a2, 1)]))
        }
        NovichkovBranch::Multiple { a1, mu1, mu2 } => {
            let basis = RadicalBasis::new(vec![(a1.clone(), Sign::Plus)])?;
            let r1 = RadicalElement::delta_power(&basis, 0, -1);
            let r3 = RadicalElement::delta_power(&basis, 0, -3);
            let x = &r1.scale(mu1) + &r3.scale(mu2);
            let t = &r1.scale(&(q(2) * mu2 - a1 * mu1)) - &r3.scale(&(a1 * mu2));
            (basis, x, t, Poly::from_roots([(a1, 2)]))
        }
    };
    let a = RadicalElement::var(&basis);
    let residual_t = &(&t + &(&a * &x))
        + &(&RadicalElement::from_poly(&basis, f) * &x.differentiate()).scale(&q(2));

    let [_, b1, b2, _, b4] = params.b_constants();
    // ℋ = h − B_1 with h = x + B_1; h_t² = a
    let h = &x;
    let n1 = &(&(&(h * &t) * &a).scale(&q(2)) - &(h * h).scale(&b4))
        + &(&(&a.scale(&(&b2 / &b4)) - &RadicalElement::one(&basis)) * &(&t * &t));
    let n2 = &(&(&(&a + &RadicalElement::constant(&basis, b2.clone())) * &(h * h))
        + &(&a * &(&t * &t)).scale(&(Rational::one() / &b4)))
        - &(h * &t).scale(&q(2));
    let _ = b1;
    let (b5_closed, b6_closed) = params.closed_form_constants();
    Ok(NovichkovOutcome {
        residual_n1: &n1 - &RadicalElement::constant(&basis, b5_closed.clone()),
        residual_n2: &n2 - &RadicalElement::constant(&basis, b6_closed.clone()),
        residual_t,
        b5: n1.as_constant(),
        b6: n2.as_constant(),
        b5_closed,
        b6_closed,
    })
}

/// Random admissible parameters for one branch.
pub fn generate_novichkov(multiple: bool, cases: usize, seed: u64) -> Vec<NovichkovParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|_| {
            let mut p = if multiple {
                NovichkovParams::multiple(
                    nonzero_in(&mut rng, 5, 3),
                    rational_in(&mut rng, 3, 3),
                    rational_in(&mut rng, 3, 3),
                )
            } else {
                let a1 = nonzero_in(&mut rng, 5, 3);
                let a2 = loop {
                    let v = nonzero_in(&mut rng, 5, 3);
                    if v != a1 {
                        break v;
                    }
                };
                NovichkovParams::distinct(
                    a1,
                    a2,
                    rational_in(&mut rng, 3, 3),
                    rational_in(&mut rng, 3, 3),
                )
            };
            p.b1 = rational_in(&mut rng, 3, 3);
            p.t0 = rational_in(&mut rng, 3, 3);
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[(i64, u32)]) -> RootMultiset {
        RootMultiset::new(v.iter().map(|&(r, m)| (q(r), m)).collect()).unwrap()
    }

    #[test]
    fn derivative_sum_small_case() {
        let f = ms(&[(1, 1), (3, 1)]).polynomial();
        let (lhs, rhs) = derivative_sum_sides(&f, &q(1), Sign::Plus, 1, 2, 1).unwrap();
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn derivative_sum_vanishes_on_kernel() {
        let f = ms(&[(1, 3), (-2, 1)]).polynomial();
        for l in 1..=3 {
            let (lhs, rhs) = derivative_sum_sides(&f, &q(1), Sign::Plus, 0, 4, l).unwrap();
            assert!(lhs.is_zero(), "l={l}");
            assert!(rhs.is_zero());
        }
    }

    #[test]
    fn sigma_sweeps_on_fixed_polynomials() {
        for id in [
            SigmaIdentity::Bid1,
            SigmaIdentity::Bid2,
            SigmaIdentity::Bid3,
            SigmaIdentity::Lambda,
        ] {
            assert_eq!(check_sigma_identity(id, &q(1), 2, &[q(2)]).unwrap(), None);
            assert_eq!(
                check_sigma_identity(id, &q(1), 3, &[q(2), q(-1)]).unwrap(),
                None
            );
        }
    }

    #[test]
    fn int0_first_case() {
        let alpha = (q(1), Sign::Plus);
        let beta = (q(-2), Sign::Plus);
        let (basis, rhs) = int0_closed_form(1, &alpha, &beta).unwrap();
        let expected = (&RadicalElement::delta_power(&basis, 0, -3)
            * &RadicalElement::delta_power(&basis, 1, -1))
            .scale(&half());
        assert_eq!(rhs.differentiate(), expected);
    }

    #[test]
    fn int1_rejects_equal_roots() {
        let alpha = (q(1), Sign::Plus);
        assert_eq!(
            int1_closed_form(1, 1, &alpha, &alpha).unwrap_err(),
            AppendixError::EqualRoots(q(1))
        );
    }

    #[test]
    fn hypergeometric_linear_case() {
        let z = Poly::var();
        let f = terminating_2f1(&Rational::one(), 1, &half(), &z).unwrap();
        assert_eq!(f, Poly::from_i64s(&[1, -2]));
    }

    #[test]
    fn pochhammer_sum_example() {
        let lhs = (pochhammer_ratio(1) + pochhammer_ratio(2)) / pochhammer_ratio(2);
        assert_eq!(lhs, q(3));
        let out = check_case(&AppendixCase::PochhammerSums { l: 2 }).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn novichkov_example_constants() {
        let p = NovichkovParams::distinct(q(1), q(2), q(1), q(1));
        let out = novichkov_residuals(&p).unwrap();
        assert!(out.passed());
        assert_eq!(out.b5, Some(Rational::new(3.into(), 2.into())));
        assert_eq!(out.b6, Some(Rational::new((-1).into(), 2.into())));
    }

    #[test]
    fn novichkov_branch_errors() {
        let p = NovichkovParams::distinct(q(1), q(1), q(1), q(1));
        assert_eq!(
            novichkov_residuals(&p).unwrap_err(),
            AppendixError::UseMultipleBranch
        );
        let p = NovichkovParams::multiple(q(0), q(1), q(1));
        assert_eq!(
            novichkov_residuals(&p).unwrap_err(),
            AppendixError::ZeroRoot
        );
    }

    #[test]
    fn suites_are_deterministic() {
        assert_eq!(
            generate_cases(Suite::C, 5, 7),
            generate_cases(Suite::C, 5, 7)
        );
    }
}
