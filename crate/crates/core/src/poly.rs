//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Polynomial in one variable with exact rational coefficients, stored in
/// ascending order with no trailing zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The identity polynomial `a`.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `c0 + c1 a`
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Poly::from_coeffs(vec![c0, c1])
    }

    /// `c a^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// Monic polynomial `∏ (a − r)^m` over the given roots.
    pub fn from_roots<'a, I>(roots: I) -> Self
    where
        I: IntoIterator<Item = (&'a Rational, u32)>,
    {
        let mut p = Poly::one();
        for (r, m) in roots {
            let factor = Poly::linear(-r.clone(), Rational::one());
            for _ in 0..m {
                p = &p * &factor;
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `a^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.leading();
        if lead.is_one() {
            return self.clone();
        }
        self.scale(&lead.recip())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Normalized Taylor coefficient polynomial `p^{(j)} / j!`.
    pub fn taylor_derivative(&self, j: usize) -> Self {
        // p^{(j)}/j! has coefficient C(k, j) c_k at a^{k-j}
        if j == 0 {
            return self.clone();
        }
        let mut out = Vec::new();
        let mut binom = Rational::one(); // C(j, j)
        for k in j..self.coeffs.len() {
            if k > j {
                binom = binom * Rational::from_integer(k.into())
                    / Rational::from_integer((k - j).into());
            }
            out.push(&self.coeffs[k] * &binom);
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = divisor.leading().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    let t = &c * dc;
                    rem[i + j] -= t;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Quotient of an exact division; panics (debug) if there is a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut x, mut y) = (self.clone(), other.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Substitute `a -> a + shift`.
    pub fn shift(&self, shift: &Rational) -> Poly {
        let mut out = Poly::zero();
        let lin = Poly::linear(shift.clone(), Rational::one());
        for c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(c.clone());
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "a")?,
                (1, false) => write!(f, "{mag}*a")?,
                (_, true) => write!(f, "a^{k}")?,
                (_, false) => write!(f, "{mag}*a^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut v = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            v[i] += c;
        }
        Poly::from_coeffs(v)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            v[i] -= c;
        }
        Poly::from_coeffs(v)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn roots_expand() {
        let p = Poly::from_roots([(&q(1, 1), 2), (&q(2, 1), 1)]);
        assert_eq!(p, Poly::from_i64s(&[-2, 5, -4, 1]));
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_roots([(&q(1, 1), 2), (&q(3, 2), 1)]);
        let b = Poly::from_roots([(&q(1, 1), 1), (&q(-2, 1), 1)]);
        assert_eq!(a.gcd(&b), Poly::from_i64s(&[-1, 1]));
        let (qq, r) = a.div_rem(&b);
        assert_eq!(&(&qq * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn taylor_derivative_matches_repeated_derivative() {
        let p = Poly::from_i64s(&[3, -1, 4, 1, -5, 9]);
        let mut d = p.clone();
        let mut fact = Rational::one();
        for j in 0..7usize {
            if j > 0 {
                d = d.derivative();
                fact *= Rational::from_integer(j.into());
            }
            assert_eq!(p.taylor_derivative(j), d.scale(&fact.recip()));
        }
    }

    #[test]
    fn shift_is_substitution() {
        let p = Poly::from_i64s(&[1, 2, 3]);
        let s = p.shift(&q(1, 2));
        for x in [q(0, 1), q(3, 7), q(-5, 2)] {
            assert_eq!(s.eval(&x), p.eval(&(&x + q(1, 2))));
        }
    }
}
