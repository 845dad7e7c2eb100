use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siflow_core::geodesic::curvature;
use siflow_core::global::{
    classify_global, Classification, GlobalExampleSpec, GlobalFamily, MuProfile,
};
use siflow_core::model::CoefficientSet;
use siflow_core::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Adaptive Simpson quadrature, independent of the closed forms.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Where `t` is anchored: `t(0) = 0` for families starting at `u = 0`,
/// otherwise compare differences from the reference coordinate.
fn check_against_quadrature(spec: &GlobalExampleSpec, seed: u64) {
    let (lo, hi) = spec.interval();
    let span = hi.map_or(4.0, |h| h - lo);
    let anchored = lo == 0.0 && spec.family != GlobalFamily::EvenBand;
    let base = if anchored {
        0.0
    } else {
        spec.reference_coordinate()
    };
    let t_base = if anchored {
        0.0
    } else {
        spec.omega_transform(base).unwrap().1
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let u = lo + span * rng.gen_range(0.05..0.95);
        let (_, t) = spec.omega_transform(u).unwrap();
        let integral = simpson(&|v| spec.mu(v), base.min(u), base.max(u), 1e-14);
        let oracle = if u >= base { integral } else { -integral };
        let scale = 1.0f64.max(oracle.abs());
        assert!(
            ((t - t_base) - oracle).abs() < 1e-12 * scale,
            "{} u={u}: {} vs {oracle}",
            spec.family,
            t - t_base
        );
    }
}

#[test]
fn closed_forms_match_quadrature() {
    for (i, family) in GlobalFamily::ALL.into_iter().enumerate() {
        check_against_quadrature(&GlobalExampleSpec::example(family), i as u64);
    }
}

/// `μ` from the closed form against `x'` of the assembled model.
#[test]
fn profiles_match_model_derivative() {
    for family in GlobalFamily::ALL {
        let spec = GlobalExampleSpec::example(family);
        let model = spec.to_model_spec().unwrap();
        let dx = CoefficientSet::build(&model).unwrap().dx;
        let (lo, hi) = spec.interval();
        let span = hi.map_or(3.0, |h| h - lo);
        for j in 1..10 {
            let u = lo + span * j as f64 / 10.0;
            let a = spec.a_of(u);
            let xp: f64 = dx.eval_numeric(&a, ()).unwrap();
            let expected = match family {
                GlobalFamily::EvenUnit => 2.0 * xp / (1.0 + u * u).powf(1.5),
                GlobalFamily::EvenBand => xp / a.sqrt(),
                _ => 2.0 * xp,
            };
            let got = spec.mu(u);
            assert!(
                (got - expected).abs() < 1e-10 * expected.abs().max(1.0),
                "{family} u={u}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn derivative_of_profile_matches_finite_difference() {
    for family in GlobalFamily::ALL {
        let spec = GlobalExampleSpec::example(family);
        let u = spec.reference_coordinate();
        let h = 1e-5;
        let fd = (spec.mu(u + h) - spec.mu(u - h)) / (2.0 * h);
        assert!(
            (spec.dmu(u) - fd).abs() < 1e-6 * fd.abs().max(1.0),
            "{family}"
        );
    }
}

#[test]
fn curvature_finite_for_unit_family() {
    let spec = GlobalExampleSpec::single_root(GlobalFamily::OddUnit, vec![r(1, 1), r(1, 3)]);
    for u in [0.05, 0.3, 0.6, 0.95] {
        let k = curvature(spec.mu(u), spec.dmu(u), u).unwrap();
        assert!(k.is_finite());
    }
}

#[test]
fn documented_classifications() {
    let good = GlobalExampleSpec::single_root(GlobalFamily::OddMinus, vec![r(9, 10)]);
    assert_eq!(classify_global(&good), Classification::H2);
    let bad = GlobalExampleSpec::single_root(GlobalFamily::OddMinus, vec![r(3, 2)]);
    assert!(matches!(classify_global(&bad), Classification::Rejected(_)));
    let ext = GlobalExampleSpec::single_root(GlobalFamily::OddExterior, vec![r(1, 1), r(1, 1)]);
    assert_eq!(classify_global(&ext), Classification::R2);
    let tags: Vec<String> = GlobalFamily::ALL
        .iter()
        .map(|f| classify_global(&GlobalExampleSpec::example(*f)).to_string())
        .collect();
    assert_eq!(tags, ["H2", "R2", "H2", "H2", "H2", "R2"]);
}

#[test]
fn rejections_name_the_constraint() {
    let mut s = GlobalExampleSpec::example(GlobalFamily::EvenBand);
    s.nu.clear();
    assert!(classify_global(&s).to_string().contains("nu_l"));
    let s = GlobalExampleSpec::single_root(GlobalFamily::OddPlus, vec![r(-1, 1)]);
    assert!(classify_global(&s).to_string().contains("positive"));
    let mut s = GlobalExampleSpec::example(GlobalFamily::EvenUnit);
    s.simple.push((r(1, 2), r(1, 1)));
    assert!(classify_global(&s).to_string().contains("a_i < 0"));
}

#[test]
fn irrational_simple_coefficient_is_refused() {
    let mut s = GlobalExampleSpec::example(GlobalFamily::EvenUnit);
    s.simple = vec![(r(-2, 1), r(1, 1))];
    assert!(s.to_model_spec().is_err());
}

fn positive_params(max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(
        (1i64..=20, 1i64..=10).prop_map(|(n, d)| r(n, d)),
        1..=max_len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `dt/du = μ > 0` at dense samples for compliant odd parameters.
    #[test]
    fn compliant_odd_families_are_monotone(mu in positive_params(3), pick in 0usize..3) {
        let family = [GlobalFamily::OddUnit, GlobalFamily::OddPlus, GlobalFamily::OddExterior][pick];
        let spec = GlobalExampleSpec::single_root(family, mu);
        let (lo, hi) = spec.interval();
        let top = hi.unwrap_or(lo + 20.0);
        for j in 1..400 {
            let u = lo + (top - lo) * j as f64 / 400.0;
            prop_assert!(spec.mu(u) > 0.0);
        }
        prop_assert!(!matches!(classify_global(&spec), Classification::Rejected(_)));
    }

    /// The inner sum is bounded by `Σ (2l−1) μ_l` for all `u ≥ 0`.
    #[test]
    fn minus_family_bound(mu in positive_params(4), u in 0.0f64..30.0) {
        let spec = GlobalExampleSpec::single_root(GlobalFamily::OddPlus, mu.clone());
        let (omega, _) = spec.omega_transform(u.max(1e-9)).unwrap();
        let bound: f64 = mu.iter().enumerate()
            .map(|(l0, m)| (2 * l0 + 1) as f64 * num_traits::ToPrimitive::to_f64(m).unwrap())
            .sum();
        prop_assert!(omega - 1.0 <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn minus_family_classification_follows_bound(mu in positive_params(3)) {
        let spec = GlobalExampleSpec::single_root(GlobalFamily::OddMinus, mu.clone());
        let bound: Rational = mu.iter().enumerate().map(|(l0, m)| m * r(2 * l0 as i64 + 1, 1)).sum();
        let tag = classify_global(&spec);
        if bound < r(1, 1) {
            prop_assert_eq!(tag, Classification::H2);
        } else {
            prop_assert!(matches!(tag, Classification::Rejected(_)));
        }
    }
}
