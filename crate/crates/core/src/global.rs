//! Families of globally defined models: mapping to a [`ModelSpec`], the
//! closed-form coordinate change `t = u Ω(u)`, and classification of the
//! underlying manifold.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{Domain, ModelError, ModelSpec, Parity, RootSpec};
use crate::radical::Sign;
use crate::symmetric::pochhammer_ratio;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlobalError {
    #[error("family needs at least one parameter at the multiple root")]
    NoMultipleRoot,
    #[error("simple root {0}: the coefficient (−ε a_i)^(3/2) is irrational, so x is not exact")]
    NotSquare(Rational),
    #[error("u = {0} lies outside the family's interval")]
    OutsideInterval(f64),
    #[error("family {0} takes no second root or simple roots")]
    UnexpectedParameters(GlobalFamily),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The example families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlobalFamily {
    /// Even degree, `F = (a−1)^r F̂`, `a ∈ (0,1)`, `u = √(a/(1−a))`.
    EvenUnit,
    /// Even degree, `F = (a−a_1)^{r_1}(a−a_2)^{r_2} F̂`, `a ∈ (a_1,a_2)`; the coordinate is `a` itself.
    EvenBand,
    /// Odd degree, `Δ = 1 − u²`, `u ∈ (0,1)`.
    OddUnit,
    /// Odd degree, `Δ = 1 + u²`, `μ = 1 + Σ ..`.
    OddPlus,
    /// Odd degree, `Δ = 1 + u²`, `μ = 1 − Σ ..`.
    OddMinus,
    /// Odd degree, `Δ = u² − 1`, `u > 1`.
    OddExterior,
}

impl GlobalFamily {
    pub const ALL: [GlobalFamily; 6] = [
        GlobalFamily::EvenUnit,
        GlobalFamily::EvenBand,
        GlobalFamily::OddUnit,
        GlobalFamily::OddPlus,
        GlobalFamily::OddMinus,
        GlobalFamily::OddExterior,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GlobalFamily::EvenUnit => "even-unit",
            GlobalFamily::EvenBand => "even-band",
            GlobalFamily::OddUnit => "odd-unit",
            GlobalFamily::OddPlus => "odd-plus",
            GlobalFamily::OddMinus => "odd-minus",
            GlobalFamily::OddExterior => "odd-exterior",
        }
    }

    pub fn from_name(s: &str) -> Option<GlobalFamily> {
        GlobalFamily::ALL.into_iter().find(|f| f.name() == s)
    }

    fn is_odd(self) -> bool {
        !matches!(self, GlobalFamily::EvenUnit | GlobalFamily::EvenBand)
    }
}

impl fmt::Display for GlobalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one family member.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalExampleSpec {
    pub family: GlobalFamily,
    /// `μ_1..μ_r` at the (first) multiple root.
    pub mu: Vec<Rational>,
    /// `ν_1..ν_{r_2}` at the second root (band family only).
    pub nu: Vec<Rational>,
    /// Band family: `(a_1, a_2)`.
    pub band: Option<(Rational, Rational)>,
    /// Simple roots `(a_i, ξ_i)` (even families only).
    pub simple: Vec<(Rational, Rational)>,
}

impl GlobalExampleSpec {
    /// An odd family member or an even-unit member without simple roots.
    pub fn single_root(family: GlobalFamily, mu: Vec<Rational>) -> Self {
        GlobalExampleSpec {
            family,
            mu,
            nu: Vec::new(),
            band: None,
            simple: Vec::new(),
        }
    }

    /// A compliant member of each family, used as a default.
    pub fn example(family: GlobalFamily) -> Self {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let mut s = GlobalExampleSpec::single_root(family, vec![r(1, 1)]);
        match family {
            GlobalFamily::EvenUnit => {
                s.mu = vec![r(1, 1), r(1, 2)];
                s.simple = vec![(r(-1, 1), r(1, 1)), (r(4, 1), r(1, 2))];
            }
            GlobalFamily::EvenBand => {
                s.band = Some((r(1, 1), r(3, 1)));
                s.nu = vec![r(1, 1)];
                s.simple = vec![(r(-1, 1), r(1, 1))];
            }
            GlobalFamily::OddUnit => {}
            GlobalFamily::OddPlus => s.mu = vec![r(1, 1), r(1, 2)],
            GlobalFamily::OddMinus => s.mu = vec![r(3, 10), r(1, 5)],
            GlobalFamily::OddExterior => s.mu = vec![r(1, 1), r(1, 1)],
        }
        s
    }

    /// An interior coordinate value, well away from the interval ends.
    pub fn reference_coordinate(&self) -> f64 {
        match self.interval() {
            (lo, Some(hi)) => 0.5 * (lo + hi),
            (lo, None) => lo + 1.0,
        }
    }

    /// The `u`-interval (or `a`-interval for the band family).
    pub fn interval(&self) -> (f64, Option<f64>) {
        match self.family {
            GlobalFamily::EvenUnit | GlobalFamily::OddPlus | GlobalFamily::OddMinus => (0.0, None),
            GlobalFamily::OddUnit => (0.0, Some(1.0)),
            GlobalFamily::OddExterior => (1.0, None),
            GlobalFamily::EvenBand => {
                let (a1, a2) = self
                    .band
                    .clone()
                    .unwrap_or_else(|| (Rational::zero(), Rational::one()));
                (f64v(&a1), Some(f64v(&a2)))
            }
        }
    }

    fn check_interval(&self, u: f64) -> Result<(), GlobalError> {
        let (lo, hi) = self.interval();
        if u > lo && hi.is_none_or(|h| u < h) {
            Ok(())
        } else {
            Err(GlobalError::OutsideInterval(u))
        }
    }

    fn band_roots(&self) -> (Rational, Rational) {
        self.band
            .clone()
            .unwrap_or_else(|| (Rational::zero(), Rational::one()))
    }

    /// Sign making `Δ_i > 0` on the family's `a`-interval.
    fn simple_sign(&self, ai: &Rational) -> Sign {
        match self.family {
            GlobalFamily::EvenBand => {
                if ai < &self.band_roots().0 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
            _ => {
                if ai.is_negative() {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
        }
    }

    /// The model whose metric this family describes.
    pub fn to_model_spec(&self) -> Result<ModelSpec, GlobalError> {
        if self.mu.is_empty() {
            return Err(GlobalError::NoMultipleRoot);
        }
        let one = Rational::one();
        let zero = Rational::zero();
        if self.family.is_odd() && (!self.nu.is_empty() || !self.simple.is_empty()) {
            return Err(GlobalError::UnexpectedParameters(self.family));
        }
        let neg = |v: &[Rational]| v.iter().map(|m| -m).collect::<Vec<_>>();
        let (roots, parity, domain) = match self.family {
            GlobalFamily::EvenUnit => {
                let half = Rational::new(1.into(), 2.into());
                let mut roots = vec![RootSpec::multiple(
                    one.clone(),
                    Sign::Minus,
                    self.mu.iter().map(|m| m * &half).collect(),
                )];
                for (ai, xi) in &self.simple {
                    let sign = self.simple_sign(ai);
                    let e = sign.to_rational();
                    let base = -(&e * ai);
                    let root =
                        rational_sqrt(&base).ok_or_else(|| GlobalError::NotSquare(ai.clone()))?;
                    roots.push(RootSpec::simple(
                        ai.clone(),
                        sign,
                        -(&e * xi * &base * root),
                    ));
                }
                (
                    roots,
                    Parity::Even,
                    Domain::new(zero.clone(), Some(one.clone())),
                )
            }
            GlobalFamily::EvenBand => {
                let (a1, a2) = self.band_roots();
                let mut roots = vec![RootSpec::multiple(a1.clone(), Sign::Plus, neg(&self.mu))];
                if !self.nu.is_empty() {
                    roots.push(RootSpec::multiple(a2.clone(), Sign::Minus, self.nu.clone()));
                }
                for (ai, xi) in &self.simple {
                    let sign = self.simple_sign(ai);
                    let p = -(Rational::from_integer(2.into()) * sign.to_rational() * xi);
                    roots.push(RootSpec::simple(ai.clone(), sign, p));
                }
                (roots, Parity::Even, Domain::new(a1, Some(a2)))
            }
            GlobalFamily::OddUnit => (
                vec![RootSpec::multiple(
                    one.clone(),
                    Sign::Minus,
                    self.mu.clone(),
                )],
                Parity::Odd,
                Domain::new(zero.clone(), Some(one.clone())),
            ),
            GlobalFamily::OddPlus => (
                vec![RootSpec::multiple(-one.clone(), Sign::Plus, neg(&self.mu))],
                Parity::Odd,
                Domain::new(zero.clone(), None),
            ),
            GlobalFamily::OddMinus => (
                vec![RootSpec::multiple(
                    -one.clone(),
                    Sign::Plus,
                    self.mu.clone(),
                )],
                Parity::Odd,
                Domain::new(zero.clone(), None),
            ),
            GlobalFamily::OddExterior => (
                vec![RootSpec::multiple(one.clone(), Sign::Plus, neg(&self.mu))],
                Parity::Odd,
                Domain::new(one.clone(), None),
            ),
        };
        let nu = if parity == Parity::Odd { one } else { zero };
        Ok(ModelSpec::new(parity, roots, nu, domain)?)
    }

    /// `a` as a function of the family coordinate.
    pub fn a_of(&self, u: f64) -> f64 {
        match self.family {
            GlobalFamily::EvenUnit => u * u / (1.0 + u * u),
            GlobalFamily::EvenBand => u,
            _ => u * u,
        }
    }

    /// Radicand `Δ(u)` and its sign pattern for the odd families.
    fn odd_delta(&self, u: f64) -> (f64, f64) {
        match self.family {
            GlobalFamily::OddUnit => (1.0 - u * u, -2.0 * u),
            GlobalFamily::OddExterior => (u * u - 1.0, 2.0 * u),
            _ => (1.0 + u * u, 2.0 * u),
        }
    }

    fn odd_sign(&self) -> f64 {
        if self.family == GlobalFamily::OddMinus {
            -1.0
        } else {
            1.0
        }
    }

    /// Closed-form `(Ω, t = u Ω)`.
    pub fn omega_transform(&self, u: f64) -> Result<(f64, f64), GlobalError> {
        self.check_interval(u)?;
        let mu: Vec<f64> = self.mu.iter().map(f64v).collect();
        let p = |l: i64| f64v(&pochhammer_ratio(l));
        let omega = match self.family {
            GlobalFamily::EvenUnit => {
                let w = 1.0 + u * u;
                let mut o = 0.0;
                for (l0, m) in mu.iter().enumerate() {
                    let l = l0 as i64 + 1;
                    let inner: f64 = (1..=l).map(|s| p(s) * w.powi(s as i32 - 1)).sum();
                    o += m / (2.0 * p(l)) * inner;
                }
                for (ai, xi) in &self.simple {
                    let rho = 1.0 - 1.0 / f64v(ai);
                    o += f64v(xi) / (1.0 + rho * u * u).sqrt();
                }
                o
            }
            GlobalFamily::EvenBand => {
                let (a1, a2) = self.band_roots();
                let (a1, a2) = (f64v(&a1), f64v(&a2));
                let a = u;
                let mut o = 0.0;
                for (l0, m) in mu.iter().enumerate() {
                    let l = l0 as i64 + 1;
                    for s in 1..=l {
                        o += m / p(l) * p(s)
                            / (-a1).powi((l - s + 1) as i32)
                            / (a - a1).powf(s as f64 - 0.5);
                    }
                }
                for (l0, n) in self.nu.iter().map(f64v).enumerate() {
                    let l = l0 as i64 + 1;
                    for s in 1..=l {
                        o += n / p(l) * p(s)
                            / a2.powi((l - s + 1) as i32)
                            / (a2 - a).powf(s as f64 - 0.5);
                    }
                }
                for (ai, xi) in &self.simple {
                    let e = self.simple_sign(ai).to_i64() as f64;
                    let ai = f64v(ai);
                    o -= 2.0 * e * f64v(xi) / (ai * (e * (a - ai)).sqrt());
                }
                // t = √a · Ω for this family
                return Ok((o, a.sqrt() * o));
            }
            GlobalFamily::OddExterior => {
                let (d, _) = self.odd_delta(u);
                let mut o = 1.0;
                for (l0, m) in mu.iter().enumerate() {
                    let l = l0 as i64 + 1;
                    for s in 1..=l {
                        let sg = if (l - s) % 2 == 0 { 1.0 } else { -1.0 };
                        o -= sg * m / p(l) * p(s) / d.powf(s as f64 - 0.5);
                    }
                }
                o
            }
            _ => {
                let (d, _) = self.odd_delta(u);
                let mut o = 0.0;
                for (l0, m) in mu.iter().enumerate() {
                    let l = l0 as i64 + 1;
                    for s in 1..=l {
                        o += m / p(l) * p(s) / d.powf(s as f64 - 0.5);
                    }
                }
                1.0 + self.odd_sign() * o
            }
        };
        Ok((omega, u * omega))
    }
}

/// `μ(u)` and `μ'(u)` such that the metric reads `(μ² du² + dy²)/u²`, up to
/// a conformal factor for the even families. For the band family the
/// coordinate is `a` and `μ = dt/da`.
pub trait MuProfile {
    fn mu(&self, u: f64) -> f64;
    fn dmu(&self, u: f64) -> f64;
}

impl MuProfile for GlobalExampleSpec {
    fn mu(&self, u: f64) -> f64 {
        self.mu_and_derivative(u).0
    }

    fn dmu(&self, u: f64) -> f64 {
        self.mu_and_derivative(u).1
    }
}

impl GlobalExampleSpec {
    fn mu_and_derivative(&self, u: f64) -> (f64, f64) {
        let mu: Vec<f64> = self.mu.iter().map(f64v).collect();
        match self.family {
            GlobalFamily::EvenUnit => {
                let w = 1.0 + u * u;
                let (mut m, mut dm) = (0.0, 0.0);
                for (l0, c) in mu.iter().enumerate() {
                    let l = l0 as f64 + 1.0;
                    m += (l - 0.5) * c * w.powf(l - 1.0);
                    dm += (l - 0.5) * c * (l - 1.0) * 2.0 * u * w.powf(l - 2.0);
                }
                for (ai, xi) in &self.simple {
                    let rho = 1.0 - 1.0 / f64v(ai);
                    let q = 1.0 + rho * u * u;
                    let xi = f64v(xi);
                    m += xi * q.powf(-1.5);
                    dm += xi * (-1.5) * 2.0 * rho * u * q.powf(-2.5);
                }
                (m, dm)
            }
            GlobalFamily::EvenBand => {
                let (a1, a2) = self.band_roots();
                let (a1, a2) = (f64v(&a1), f64v(&a2));
                let a = u;
                let (mut d1, mut d2) = (0.0, 0.0);
                for (l0, c) in mu.iter().enumerate() {
                    let l = l0 as f64 + 1.0;
                    d1 += (l - 0.5) * c * (a - a1).powf(-l - 0.5);
                    d2 -= (l - 0.5) * (l + 0.5) * c * (a - a1).powf(-l - 1.5);
                }
                for (l0, c) in self.nu.iter().map(f64v).enumerate() {
                    let l = l0 as f64 + 1.0;
                    d1 += (l - 0.5) * c * (a2 - a).powf(-l - 0.5);
                    d2 += (l - 0.5) * (l + 0.5) * c * (a2 - a).powf(-l - 1.5);
                }
                for (ai, xi) in &self.simple {
                    let e = self.simple_sign(ai).to_i64() as f64;
                    let d = e * (a - f64v(ai));
                    d1 += f64v(xi) * d.powf(-1.5);
                    d2 += f64v(xi) * (-1.5) * e * d.powf(-2.5);
                }
                (d1 / a.sqrt(), d2 / a.sqrt() - d1 / (2.0 * a.powf(1.5)))
            }
            _ => {
                let (d, dd) = self.odd_delta(u);
                let sg = self.odd_sign();
                let (mut m, mut dm) = (1.0, 0.0);
                for (l0, c) in mu.iter().enumerate() {
                    let l = l0 as f64 + 1.0;
                    m += sg * (2.0 * l - 1.0) * c * d.powf(-l - 0.5);
                    dm += sg * (2.0 * l - 1.0) * c * (-l - 0.5) * d.powf(-l - 1.5) * dd;
                }
                (m, dm)
            }
        }
    }
}

/// Manifold tag returned by [`classify_global`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    H2,
    R2,
    Rejected(String),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::H2 => write!(f, "H2"),
            Classification::R2 => write!(f, "R2"),
            Classification::Rejected(r) => write!(f, "rejected: {r}"),
        }
    }
}

fn f64v(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a nonnegative rational, if it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Checks the sufficient conditions for the family and returns the manifold tag.
pub fn classify_global(spec: &GlobalExampleSpec) -> Classification {
    let reject = |s: &str| Classification::Rejected(s.to_string());
    if spec.mu.is_empty() {
        return reject("no parameters at the multiple root");
    }
    let zero = Rational::zero();
    let one = Rational::one();
    match spec.family {
        GlobalFamily::EvenUnit => {
            if spec.mu.iter().any(|m| m < &zero) {
                return reject("mu_l must be nonnegative");
            }
            if spec.simple.iter().any(|(_, xi)| xi < &zero) {
                return reject("xi_i must be nonnegative");
            }
            if spec.simple.iter().any(|(ai, _)| !(ai < &zero || ai > &one)) {
                return reject("simple roots must satisfy a_i < 0 or a_i > 1");
            }
            if spec
                .mu
                .iter()
                .chain(spec.simple.iter().map(|(_, x)| x))
                .all(|m| m.is_zero())
            {
                return reject("all parameters vanish");
            }
        }
        GlobalFamily::EvenBand => {
            let Some((a1, a2)) = &spec.band else {
                return reject("band family needs a_1 and a_2");
            };
            if !(&zero < a1 && a1 < a2) {
                return reject("requires 0 < a_1 < a_2");
            }
            if spec.nu.is_empty() {
                return reject("t(a) must diverge at both ends: nu_l missing");
            }
            if spec.mu.iter().chain(&spec.nu).any(|m| m <= &zero) {
                return reject("mu_l and nu_l must be strictly positive");
            }
            if spec.simple.iter().any(|(_, xi)| xi <= &zero) {
                return reject("xi_i must be strictly positive");
            }
            if spec.simple.iter().any(|(ai, _)| ai >= a1 && ai <= a2) {
                return reject("simple roots must lie outside [a_1, a_2]");
            }
        }
        _ => {
            if !spec.nu.is_empty() || !spec.simple.is_empty() {
                return reject("odd families take a single multiple root");
            }
            if spec.mu.iter().any(|m| m <= &zero) {
                return reject("mu_l must be strictly positive");
            }
            if spec.family == GlobalFamily::OddMinus {
                let bound: Rational = spec
                    .mu
                    .iter()
                    .enumerate()
                    .map(|(l0, m)| m * Rational::from_integer((2 * l0 as i64 + 1).into()))
                    .sum();
                if bound >= one {
                    return reject("bound violated: sum (2l-1) mu_l must be < 1");
                }
            }
        }
    }

    // dense sampling: μ > 0 (t strictly increasing) and Ω never vanishing
    let (lo, hi) = spec.interval();
    let top = hi.unwrap_or(lo + 50.0);
    for j in 1..2000 {
        let u = lo + (top - lo) * j as f64 / 2000.0;
        if spec.mu(u) <= 0.0 {
            return Classification::Rejected(format!("mu(u) <= 0 at u = {u}"));
        }
        if spec.family != GlobalFamily::EvenBand && spec.family != GlobalFamily::OddExterior {
            match spec.omega_transform(u) {
                Ok((o, _)) if o > 0.0 => {}
                _ => {
                    return Classification::Rejected(format!(
                        "conformal factor vanishes near u = {u}"
                    ))
                }
            }
        }
    }
    match spec.family {
        GlobalFamily::EvenBand | GlobalFamily::OddExterior => Classification::R2,
        _ => Classification::H2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn odd_unit_single_parameter() {
        let s = GlobalExampleSpec::single_root(GlobalFamily::OddUnit, vec![q(1, 1)]);
        for u in [0.1, 0.4, 0.8] {
            let (o, t) = s.omega_transform(u).unwrap();
            assert!((o - (1.0 + 1.0 / (1.0 - u * u).sqrt())).abs() < 1e-14);
            assert!((t - u * o).abs() < 1e-15);
        }
        assert!(s.omega_transform(1.5).is_err());
        assert!(s.omega_transform(1e-9).unwrap().1 < 1e-8);
    }

    #[test]
    fn classification_examples() {
        let ok = GlobalExampleSpec::single_root(GlobalFamily::OddMinus, vec![q(3, 10), q(1, 5)]);
        assert_eq!(classify_global(&ok), Classification::H2);
        let bad = GlobalExampleSpec::single_root(GlobalFamily::OddMinus, vec![q(1, 2), q(1, 3)]);
        assert!(
            matches!(classify_global(&bad), Classification::Rejected(r) if r.contains("bound"))
        );
        let ext = GlobalExampleSpec::single_root(GlobalFamily::OddExterior, vec![q(1, 1), q(1, 1)]);
        assert_eq!(classify_global(&ext), Classification::R2);
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&q(2, 1)), None);
        assert_eq!(rational_sqrt(&q(-1, 1)), None);
    }
}
