//! Elementary symmetric functions of the roots of `F` and of its deflations
//! `F / ((τ − a_α)^s (τ − a_i) ..)`, with exact zero padding outside the
//! index window.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::Poly;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetricError {
    #[error("root {0} listed more than once")]
    DuplicateRoot(Rational),
    #[error("root {0} has zero multiplicity")]
    ZeroMultiplicity(Rational),
    #[error("{0} is not a root of F")]
    UnknownRoot(Rational),
    #[error("cannot divide by (τ − {root})^{s}: multiplicity is only {multiplicity}")]
    ExcessDeflation {
        root: Rational,
        s: u32,
        multiplicity: u32,
    },
}

/// Roots of the monic polynomial `F(τ) = ∏ (τ − a_α)^{r_α}`, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMultiset {
    roots: Vec<(Rational, u32)>,
}

impl RootMultiset {
    pub fn new(roots: Vec<(Rational, u32)>) -> Result<Self, SymmetricError> {
        for (i, (r, m)) in roots.iter().enumerate() {
            if *m == 0 {
                return Err(SymmetricError::ZeroMultiplicity(r.clone()));
            }
            if roots[..i].iter().any(|(s, _)| s == r) {
                return Err(SymmetricError::DuplicateRoot(r.clone()));
            }
        }
        Ok(RootMultiset { roots })
    }

    pub fn roots(&self) -> &[(Rational, u32)] {
        &self.roots
    }

    pub fn degree(&self) -> u32 {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, root: &Rational) -> u32 {
        self.roots
            .iter()
            .find(|(r, _)| r == root)
            .map_or(0, |(_, m)| *m)
    }

    /// `F` as a monic polynomial in one variable.
    pub fn polynomial(&self) -> Poly {
        Poly::from_roots(self.roots.iter().map(|(r, m)| (r, *m)))
    }
}

/// Which deflation of `F` a table belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaFamily {
    Plain,
    /// `F / ∏ (τ − root)^power`
    Deflated(Vec<(Rational, u32)>),
}

/// `σ_0, σ_1, ..` of a monic polynomial `Σ (−1)^k σ_k τ^{deg − k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    family: SigmaFamily,
    values: Vec<Rational>,
}

impl SigmaTable {
    fn from_poly(family: SigmaFamily, p: &Poly) -> Self {
        let deg = p.degree().unwrap_or(0);
        let values = (0..=deg)
            .map(|k| {
                let c = p.coeff(deg - k);
                if k % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        SigmaTable { family, values }
    }

    pub fn family(&self) -> &SigmaFamily {
        &self.family
    }

    /// Degree of the underlying polynomial (last nonzero index).
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `σ_k`, exactly zero for `k < 0` or `k > degree`.
    pub fn get(&self, k: i64) -> Rational {
        if k < 0 {
            return Rational::zero();
        }
        self.values
            .get(k as usize)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// Plain table of `F`.
pub fn sigma(f: &RootMultiset) -> SigmaTable {
    SigmaTable::from_poly(SigmaFamily::Plain, &f.polynomial())
}

/// Table of `F / ∏ (τ − root)^power` for any admissible list of divisors.
pub fn sigma_quotient(
    f: &RootMultiset,
    divisors: &[(Rational, u32)],
) -> Result<SigmaTable, SymmetricError> {
    let mut remaining: Vec<(Rational, u32)> = f.roots.clone();
    for (root, s) in divisors {
        let slot = remaining
            .iter_mut()
            .find(|(r, _)| r == root)
            .ok_or_else(|| SymmetricError::UnknownRoot(root.clone()))?;
        if *s > slot.1 {
            return Err(SymmetricError::ExcessDeflation {
                root: root.clone(),
                s: *s,
                multiplicity: f.multiplicity(root),
            });
        }
        slot.1 -= s;
    }
    let p = Poly::from_roots(remaining.iter().map(|(r, m)| (r, *m)));
    let family = if divisors.iter().all(|(_, s)| *s == 0) {
        SigmaFamily::Plain
    } else {
        SigmaFamily::Deflated(divisors.iter().filter(|(_, s)| *s > 0).cloned().collect())
    };
    Ok(SigmaTable::from_poly(family, &p))
}

/// `σ^{(α,s)}` (no `i`) or `σ^{(α,s) i}`. With `s = 0` and an `i` this is `σ^i`.
pub fn sigma_deflated(
    f: &RootMultiset,
    alpha: &Rational,
    s: u32,
    i: Option<&Rational>,
) -> Result<SigmaTable, SymmetricError> {
    let mut divisors = vec![(alpha.clone(), s)];
    if let Some(i) = i {
        divisors.push((i.clone(), 1));
    }
    sigma_quotient(f, &divisors)
}

/// Rising factorial `(x)_k`.
pub fn pochhammer(x: &Rational, k: u32) -> Rational {
    let mut out = Rational::one();
    for j in 0..k {
        out *= x + Rational::from_integer(j.into());
    }
    out
}

/// `𝒫_l = (1/2)_{l−1} / (l−1)!`, taken as zero for `l ≤ 0`.
pub fn pochhammer_ratio(l: i64) -> Rational {
    if l <= 0 {
        return Rational::zero();
    }
    let half = Rational::new(1.into(), 2.into());
    let mut out = Rational::one();
    for j in 1..l {
        // multiply by (1/2 + j − 1) / j
        out = out * (&half + Rational::from_integer((j - 1).into()))
            / Rational::from_integer(j.into());
    }
    out
}

/// Binomial coefficient, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut out = BigInt::one();
    for j in 0..k {
        out = out * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_integer(out)
}

/// Terminating `₂F₁(A, −N; C; z)` as a polynomial in `z`.
///
/// Returns `None` when some `C + q` with `q < N` vanishes.
pub fn terminating_2f1(a: &Rational, n: u32, c: &Rational, z: &Poly) -> Option<Poly> {
    let mut total = Poly::zero();
    let mut term = Poly::one();
    let minus_n = Rational::from_integer((-(n as i64)).into());
    for q in 0..=n {
        total = &total + &term;
        if q == n {
            break;
        }
        let qr = Rational::from_integer(q.into());
        let den = (c + &qr) * (&qr + Rational::one());
        if den.is_zero() {
            return None;
        }
        let factor = (a + &qr) * (&minus_n + &qr) / den;
        term = &term.scale(&factor) * z;
    }
    Some(total)
}
