//! Polynomials in `(y, Π, P_y)` over the radical field, and assembly of
//! `H, G, Q1, Q2, S1, S2`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::model::{CoefficientSet, ModelError, ModelSpec, Parity};
use crate::poly::Poly;
use crate::radical::{RadicalBasis, RadicalElement};
use crate::symmetric::binomial;
use crate::Rational;

/// Exponents `(j, p, q)` of `y^j Π^p P_y^q`.
pub type Monomial = (u32, u32, u32);

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePolynomial {
    basis: Arc<RadicalBasis>,
    terms: BTreeMap<Monomial, RadicalElement>,
}

impl PhasePolynomial {
    pub fn zero(basis: &Arc<RadicalBasis>) -> Self {
        PhasePolynomial {
            basis: basis.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(basis: &Arc<RadicalBasis>, key: Monomial, coeff: RadicalElement) -> Self {
        let mut p = PhasePolynomial::zero(basis);
        p.add_term(key, coeff);
        p
    }

    /// `y`
    pub fn y(basis: &Arc<RadicalBasis>) -> Self {
        PhasePolynomial::monomial(basis, (1, 0, 0), RadicalElement::one(basis))
    }

    /// `Π = (a/x') P_a`
    pub fn pi(basis: &Arc<RadicalBasis>) -> Self {
        PhasePolynomial::monomial(basis, (0, 1, 0), RadicalElement::one(basis))
    }

    /// `P_y`
    pub fn py(basis: &Arc<RadicalBasis>) -> Self {
        PhasePolynomial::monomial(basis, (0, 0, 1), RadicalElement::one(basis))
    }

    pub fn basis(&self) -> &Arc<RadicalBasis> {
        &self.basis
    }

    pub fn add_term(&mut self, key: Monomial, coeff: RadicalElement) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, coeff);
            }
            Some(old) => {
                let s = &old + &coeff;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RadicalElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: Monomial) -> Option<&RadicalElement> {
        self.terms.get(&key)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True iff every coefficient has an empty normal form.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `p + q` over the support.
    pub fn momentum_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, p, q)| p + q).max()
    }

    pub fn y_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(j, _, _)| *j).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = PhasePolynomial::zero(&self.basis);
        for (k, v) in &self.terms {
            out.add_term(*k, v.scale(c));
        }
        out
    }

    pub fn mul_element(&self, e: &RadicalElement) -> Self {
        let mut out = PhasePolynomial::zero(&self.basis);
        for (k, v) in &self.terms {
            out.add_term(*k, v * e);
        }
        out
    }

    /// Multiply by `y^j Π^p P_y^q`.
    pub fn shift(&self, by: Monomial) -> Self {
        PhasePolynomial {
            basis: self.basis.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| ((k.0 + by.0, k.1 + by.1, k.2 + by.2), v.clone()))
                .collect(),
        }
    }

    /// `∂/∂y`
    pub fn d_dy(&self) -> Self {
        let mut out = PhasePolynomial::zero(&self.basis);
        for ((j, p, q), v) in &self.terms {
            if *j > 0 {
                out.add_term((j - 1, *p, *q), v.scale_i64(*j as i64));
            }
        }
        out
    }

    /// The first few terms, for failure reports.
    pub fn leading_terms(&self, count: usize) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .take(count)
            .map(|(k, v)| format!("[{v}] {}", fmt_key(*k)))
            .collect();
        parts.join(" + ")
    }
}

fn fmt_key((j, p, q): Monomial) -> String {
    let mut s = String::new();
    for (name, e) in [("y", j), ("Pi", p), ("Py", q)] {
        match e {
            0 => {}
            1 => s.push_str(&format!("*{name}")),
            _ => s.push_str(&format!("*{name}^{e}")),
        }
    }
    if s.is_empty() {
        "1".to_string()
    } else {
        s[1..].to_string()
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| format!("[{v}] {}", fmt_key(*k)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn add(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        PhasePolynomial {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(k, v)| (*k, v.negate())).collect(),
        }
    }
}

impl Sub for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn sub(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn mul(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero(&self.basis);
        for (k1, v1) in &self.terms {
            for (k2, v2) in &rhs.terms {
                out.add_term((k1.0 + k2.0, k1.1 + k2.1, k1.2 + k2.2), v1 * v2);
            }
        }
        out
    }
}

/// `H^k = Σ_i C(k,i) a^{k−i} Π^{2i} P_y^{2(k−i)}`, shifted by a monomial and scaled.
fn hamiltonian_power(
    basis: &Arc<RadicalBasis>,
    k: u32,
    coeff: &RadicalElement,
    by: Monomial,
) -> PhasePolynomial {
    let mut out = PhasePolynomial::zero(basis);
    for i in 0..=k {
        let c = coeff.mul_poly(&Poly::monomial(
            binomial(k as i64, i as i64),
            (k - i) as usize,
        ));
        out.add_term((by.0, by.1 + 2 * i, by.2 + 2 * (k - i)), c);
    }
    out
}

/// A fully assembled system.
#[derive(Clone, Debug)]
pub struct Model {
    pub spec: ModelSpec,
    pub coeffs: CoefficientSet,
    pub h: PhasePolynomial,
    pub g: PhasePolynomial,
    pub q1: PhasePolynomial,
    pub q2: PhasePolynomial,
    pub s1: PhasePolynomial,
    pub s2: PhasePolynomial,
    /// `x'/a`, so that the metric reads `(x'/a)² da² + dy²/a`.
    pub metric_factor: RadicalElement,
}

impl Model {
    pub fn basis(&self) -> &Arc<RadicalBasis> {
        self.coeffs.x.basis()
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }
}

/// Build coefficients and expand every integral in `(y, Π, P_y)`.
pub fn assemble_model(spec: &ModelSpec) -> Result<Model, ModelError> {
    let coeffs = CoefficientSet::build(spec)?;
    assemble_from(spec, coeffs)
}

/// Assembly from an already computed coefficient set.
pub fn assemble_from(spec: &ModelSpec, coeffs: CoefficientSet) -> Result<Model, ModelError> {
    let basis = coeffs.x.basis().clone();
    let n = spec.n() as u32;
    let one = RadicalElement::one(&basis);
    let mut h = PhasePolynomial::zero(&basis);
    h.add_term((0, 2, 0), one.clone());
    h.add_term((0, 0, 2), RadicalElement::var(&basis));

    let extra = match spec.parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let f = spec.f_poly();
    let mut g = PhasePolynomial::zero(&basis);
    for k in 0..=n {
        let ak = RadicalElement::constant(&basis, f.coeff(k as usize));
        g = &g + &hamiltonian_power(&basis, k, &ak, (0, 0, 2 * (n - k) + extra));
    }

    let mut q1 = PhasePolynomial::zero(&basis);
    let mut q2 = PhasePolynomial::zero(&basis);
    let start = match spec.parity {
        Parity::Even => 1,
        Parity::Odd => 0,
    };
    for k in start..=n {
        let (q1_py, q2_py) = match spec.parity {
            Parity::Even => (2 * k - 1, 2 * k),
            Parity::Odd => (2 * k, 2 * k + 1),
        };
        q1 = &q1 + &hamiltonian_power(&basis, n - k, &coeffs.b[k as usize], (0, 1, q1_py));
        q2 = &q2 + &hamiltonian_power(&basis, n - k, &coeffs.c[k as usize], (0, 0, q2_py));
    }

    let y = PhasePolynomial::y(&basis);
    let s1 = &q1 + &(&y * &g);
    let half = Rational::new(1.into(), 2.into());
    let s2 = &(&q2 + &(&y * &q1)) + &(&(&y * &y) * &g).scale(&half);

    let expected = spec.integral_degree() as u32;
    for (name, poly) in [("Q1", &q1), ("S1", &s1), ("G", &g)] {
        let got = poly.momentum_degree().unwrap_or(0);
        if got != expected {
            return Err(ModelError::DegreeBookkeeping {
                object: name,
                expected,
                got,
            });
        }
    }

    let metric_factor = coeffs
        .dx
        .mul_ratfunc(&crate::ratfunc::RationalFunction::new(
            Poly::one(),
            Poly::var(),
        ));
    Ok(Model {
        spec: spec.clone(),
        coeffs,
        h,
        g,
        q1,
        q2,
        s1,
        s2,
        metric_factor,
    })
}
