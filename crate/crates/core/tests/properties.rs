use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siflow_core::bracket::{poisson, BracketContext};
use siflow_core::model::{
    all_pass, verify_c_derivative, verify_profile_equation, CoefficientSet, Parity,
};
use siflow_core::phase::PhasePolynomial;
use siflow_core::poly::Poly;
use siflow_core::radical::{RadicalBasis, RadicalElement, Sign};
use siflow_core::ratfunc::RationalFunction;
use siflow_core::sweep::{random_spec, SweepRanges};
use siflow_core::symmetric::{
    binomial, pochhammer, pochhammer_ratio, sigma, sigma_deflated, terminating_2f1, RootMultiset,
};
use siflow_core::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Roots −1 (+), 1/2 (+), 3 (−): every radicand is positive on (1/2, 3).
fn basis() -> Arc<RadicalBasis> {
    RadicalBasis::new(vec![
        (q(-1, 1), Sign::Plus),
        (q(1, 2), Sign::Plus),
        (q(3, 1), Sign::Minus),
    ])
    .unwrap()
}

/// Denominators without zeros on (1/2, 3).
fn denominator(k: usize) -> Poly {
    match k {
        0 => Poly::one(),
        1 => Poly::from_i64s(&[2, 1]),
        2 => Poly::from_i64s(&[-5, 1]),
        _ => Poly::from_i64s(&[3, 1]).pow(2),
    }
}

fn element() -> impl Strategy<Value = RadicalElement> {
    let term = (0u16..8, prop::collection::vec(-4i64..=4, 1..=3), 0usize..4);
    prop::collection::vec(term, 0..=3).prop_map(|terms| {
        let b = basis();
        let mut e = RadicalElement::zero(&b);
        for (mask, coeffs, den) in terms {
            let f = RationalFunction::new(Poly::from_i64s(&coeffs), denominator(den));
            e = &e + &RadicalElement::monomial(&b, mask, f);
        }
        e
    })
}

fn eval(e: &RadicalElement, a: f64) -> f64 {
    e.eval_numeric::<f64>(&a, ()).unwrap()
}

fn phase_poly() -> impl Strategy<Value = PhasePolynomial> {
    let term = ((0u32..=2, 0u32..=2, 0u32..=2), element());
    prop::collection::vec(term, 0..=2).prop_map(|terms| {
        let b = basis();
        let mut p = PhasePolynomial::zero(&b);
        for (key, c) in terms {
            p.add_term(key, c);
        }
        p
    })
}

fn bracket_ctx() -> BracketContext {
    let b = basis();
    // any nonzero w gives a Poisson structure
    let w = &RadicalElement::var(&b) * &RadicalElement::radical(&b, 1);
    BracketContext::with_w(w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(x in element(), y in element(), z in element()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn derivative_is_a_derivation(x in element(), y in element()) {
        let lhs = (&x * &y).differentiate();
        let rhs = &(&x.differentiate() * &y) + &(&x * &y.differentiate());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_exact(x in element()) {
        prop_assume!(!x.is_zero());
        let inv = x.invert().unwrap();
        prop_assert!((&x * &inv).is_one());
    }

    #[test]
    fn numeric_evaluation_is_a_homomorphism(x in element(), y in element(), a in 0.6f64..2.9) {
        let (ex, ey) = (eval(&x, a), eval(&y, a));
        let prod = eval(&(&x * &y), a);
        let sum = eval(&(&x + &y), a);
        prop_assert!((prod - ex * ey).abs() <= 1e-9 * (1.0 + (ex * ey).abs()));
        prop_assert!((sum - (ex + ey)).abs() <= 1e-9 * (1.0 + ex.abs() + ey.abs()));
    }

    #[test]
    fn derivative_matches_finite_difference(x in element(), a in 0.7f64..2.8) {
        let h = 1e-6;
        let fd = (eval(&x, a + h) - eval(&x, a - h)) / (2.0 * h);
        let d = eval(&x.differentiate(), a);
        prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bracket_is_antisymmetric(f in phase_poly(), g in phase_poly()) {
        let ctx = bracket_ctx();
        prop_assert_eq!(poisson(&f, &g, &ctx), -&poisson(&g, &f, &ctx));
    }

    #[test]
    fn bracket_obeys_leibniz(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        let ctx = bracket_ctx();
        let lhs = poisson(&f, &(&g * &h), &ctx);
        let rhs = &(&poisson(&f, &g, &ctx) * &h) + &(&g * &poisson(&f, &h, &ctx));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_obeys_jacobi(f in phase_poly(), g in phase_poly(), h in phase_poly()) {
        let ctx = bracket_ctx();
        let t1 = poisson(&f, &poisson(&g, &h, &ctx), &ctx);
        let t2 = poisson(&g, &poisson(&h, &f, &ctx), &ctx);
        let t3 = poisson(&h, &poisson(&f, &g, &ctx), &ctx);
        prop_assert!((&(&t1 + &t2) + &t3).is_zero());
    }
}

fn multiset() -> impl Strategy<Value = RootMultiset> {
    prop::collection::btree_map((-10i64..=10, 1i64..=3), 1u32..=3, 1..=3).prop_map(|m| {
        let mut seen = Vec::new();
        let mut roots = Vec::new();
        for ((n, d), mult) in m {
            let r = q(n, d);
            if !seen.contains(&r) {
                seen.push(r.clone());
                roots.push((r, mult));
            }
        }
        RootMultiset::new(roots).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `F(τ) = Σ (−1)^k σ_k τ^{n−k}`.
    #[test]
    fn sigma_reassembles_the_polynomial(f in multiset()) {
        let t = sigma(&f);
        let n = f.degree() as usize;
        let mut coeffs = vec![Rational::zero(); n + 1];
        for k in 0..=n {
            let s = t.get(k as i64);
            coeffs[n - k] = if k % 2 == 0 { s } else { -s };
        }
        prop_assert_eq!(Poly::from_coeffs(coeffs), f.polynomial());
    }

    /// Deflated tables agree with exact polynomial division.
    #[test]
    fn deflation_is_division(f in multiset(), pick in 0usize..3) {
        let roots = f.roots().to_vec();
        let (alpha, mult) = roots[pick % roots.len()].clone();
        for s in 0..=mult {
            let t = sigma_deflated(&f, &alpha, s, None).unwrap();
            let quotient = f.polynomial().exact_div(&Poly::from_roots([(&alpha, s)]));
            let m = quotient.degree().unwrap();
            for k in 0..=m {
                let c = quotient.coeff(m - k);
                let expected = if k % 2 == 0 { c } else { -c };
                prop_assert_eq!(t.get(k as i64), expected);
            }
            prop_assert!(t.get(-1).is_zero() && t.get(m as i64 + 1).is_zero());
        }
        prop_assert!(sigma_deflated(&f, &alpha, mult + 1, None).is_err());
    }

    #[test]
    fn pochhammer_ratio_recurrence(l in 1i64..40) {
        prop_assert_eq!(pochhammer_ratio(l + 1), pochhammer_ratio(l) * (q(l, 1) - q(1, 2)) / q(l, 1));
        prop_assert_eq!(pochhammer_ratio(l), pochhammer(&q(1, 2), (l - 1) as u32) / pochhammer(&q(1, 1), (l - 1) as u32));
    }

    #[test]
    fn pascal_rule(n in 1i64..60, k in 0i64..60) {
        prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
    }

    /// Chu-Vandermonde: `₂F₁(b, −n; c; 1) = (c−b)_n / (c)_n`.
    #[test]
    fn chu_vandermonde(n in 0u32..8, bn in -6i64..6, cn in 1i64..9) {
        let b = q(bn, 2);
        let c = q(2 * cn + 1, 2);
        let f = terminating_2f1(&b, n, &c, &Poly::var()).unwrap();
        prop_assert_eq!(f.eval(&Rational::one()), pochhammer(&(&c - &b), n) / pochhammer(&c, n));
    }

    /// Random specs satisfy the profile equation and `c'_k = −b_k x'`.
    #[test]
    fn random_specs_satisfy_model_relations(seed in any::<u64>(), n in 1u32..=4, odd in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let spec = random_spec(&mut rng, parity, n, &SweepRanges::default());
        let cs = CoefficientSet::build(&spec).unwrap();
        prop_assert!(verify_profile_equation(&spec, &cs.x).passed);
        prop_assert!(all_pass(&verify_c_derivative(&spec, &cs)));
    }
}
