//! Rational functions in `a` with exact coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::Rational;

/// Reduced fraction of polynomials. The denominator is monic and coprime
/// to the numerator, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFunction {
            num,
            den: Poly::one(),
        }
    }

    /// Build `num / den` and reduce. Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let lead = den.leading();
        if lead.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lead.recip();
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_constant(&self) -> Option<Rational> {
        (self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        RationalFunction::new(&self.num * p, self.den.clone())
    }

    pub fn div_poly(&self, p: &Poly) -> Self {
        RationalFunction::new(self.num.clone(), &self.den * p)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RationalFunction::new(self.den.clone(), self.num.clone()))
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return RationalFunction::from_poly(self.num.derivative());
        }
        // (n/d)' = (n' d - n d') / d^2
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalFunction::new(top, &self.den * &self.den)
    }

    /// Evaluate at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        RationalFunction {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        RationalFunction::zero()
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl From<Rational> for RationalFunction {
    fn from(c: Rational) -> Self {
        RationalFunction::constant(c)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            // coprime denominators: only the numerator can share factors with them
            return RationalFunction::new(num, &self.den * &rhs.den);
        }
        let left = rhs.den.exact_div(&g);
        let right = self.den.exact_div(&g);
        let num = &(&self.num * &left) + &(&rhs.num * &right);
        RationalFunction::new(num, &self.den * &left)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        // cross-cancel before multiplying to keep degrees low
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1)
        };
        let d2 = if g1.is_one() {
            rhs.den.clone()
        } else {
            rhs.den.exact_div(&g1)
        };
        let n2 = if g2.is_one() {
            rhs.num.clone()
        } else {
            rhs.num.exact_div(&g2)
        };
        let d1 = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2)
        };
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lead = den.leading();
        if lead.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lead.recip();
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn reduces_to_lowest_terms() {
        let f = RationalFunction::new(
            Poly::from_i64s(&[-2, 2]),
            Poly::from_i64s(&[-3, 2, 1]).scale(&q(3)),
        );
        assert_eq!(
            f.numerator(),
            &Poly::constant(Rational::new(2.into(), 3.into()))
        );
        assert_eq!(f.denominator(), &Poly::from_i64s(&[3, 1]));
    }

    #[test]
    fn field_operations() {
        let f = RationalFunction::new(Poly::from_i64s(&[1, 1]), Poly::from_i64s(&[0, 1]));
        let g = RationalFunction::new(Poly::from_i64s(&[2]), Poly::from_i64s(&[-1, 1]));
        let s = &f + &g;
        let back = &s - &g;
        assert_eq!(back, f);
        let p = &f * &f.recip().unwrap();
        assert!(p.is_one());
        // quotient rule versus product rule
        let lhs = (&f * &g).derivative();
        let rhs = &(&f.derivative() * &g) + &(&f * &g.derivative());
        assert_eq!(lhs, rhs);
    }
}
