use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use qdc_core::expr::parse_expr;
use qdc_core::ncalg::{Gen, Kind, Polynomial, Word};
use qdc_core::presentations::{presentation, Presentation, PresentationName};
use qdc_core::rewrite::Strategy as Redex;
use qdc_core::rmatrix::Convention;
use qdc_core::scalar::{BiPoly, UPoly};
use qdc_core::Scalar;

fn bipoly() -> impl Strategy<Value = BiPoly> {
    // coefficients of x^0, x^1, each a polynomial in p of degree < 4
    prop::collection::vec(prop::collection::vec(-4i64..=4, 0..4), 0..3).prop_map(|rows| {
        BiPoly::from_coeffs(
            rows.into_iter().map(|r| UPoly::from_coeffs(r.into_iter().map(BigInt::from).collect())).collect(),
        )
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (bipoly(), bipoly(), any::<bool>()).prop_map(|(num, den, whole)| {
        if whole || den.is_zero() {
            Scalar::from_parts(num, BiPoly::one()).unwrap()
        } else {
            Scalar::from_parts(num, den).unwrap()
        }
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

fn gen(kinds: &'static [Kind]) -> impl Strategy<Value = Gen> {
    (prop::sample::select(kinds), 0usize..2, 0usize..2).prop_map(|(k, i, j)| Gen::new(k, i, j))
}

fn poly_over(kinds: &'static [Kind], max_len: usize) -> impl Strategy<Value = Polynomial> {
    let term = (scalar(), prop::collection::vec(gen(kinds), 0..=max_len));
    prop::collection::vec(term, 0..4)
        .prop_map(|terms| Polynomial::from_terms(2, terms.into_iter().map(|(c, w)| (Word::from_gens(&w), c))))
}

const ALL_KINDS: &[Kind] = &[Kind::T, Kind::L, Kind::Om, Kind::OmL, Kind::OmT, Kind::Im, Kind::ImL];
const EVEN_KINDS: &[Kind] = &[Kind::T, Kind::L];
const SWZ_KINDS: &[Kind] = &[Kind::T, Kind::L, Kind::Om, Kind::Im];

fn swz2() -> &'static Presentation {
    static P: OnceLock<Presentation> = OnceLock::new();
    P.get_or_init(|| presentation(PresentationName::Swz, 2, Convention::Standard).unwrap())
}

fn lbasis2() -> &'static Presentation {
    static P: OnceLock<Presentation> = OnceLock::new();
    P.get_or_init(|| presentation(PresentationName::Lbasis, 2, Convention::Standard).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Scalar::one(), a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.checked_inv().unwrap()).is_one());
        } else {
            prop_assert!(a.checked_inv().is_err());
        }
    }

    #[test]
    fn eval_is_a_homomorphism(a in scalar(), b in scalar(), p0 in rational(), x0 in rational()) {
        let at = |s: &Scalar| s.eval_at(&p0, &x0);
        if let (Ok(va), Ok(vb)) = (at(&a), at(&b)) {
            prop_assert_eq!(at(&(&a + &b)).unwrap(), &va + &vb);
            if let Ok(vab) = at(&(&a * &b)) {
                prop_assert_eq!(vab, &va * &vb);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_print_round_trip(p in poly_over(ALL_KINDS, 3)) {
        let printed = p.to_expr_string();
        prop_assert_eq!(parse_expr(&printed, 2).unwrap(), p, "{}", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(a in poly_over(ALL_KINDS, 2), b in poly_over(ALL_KINDS, 2), c in poly_over(ALL_KINDS, 2)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn substitution_is_a_homomorphism(
        a in poly_over(ALL_KINDS, 2),
        b in poly_over(ALL_KINDS, 2),
        images in prop::collection::vec(poly_over(EVEN_KINDS, 2), 4),
    ) {
        let table: HashMap<Gen, Polynomial> = images
            .into_iter()
            .enumerate()
            .map(|(k, img)| (Gen::new(Kind::T, k / 2, k % 2), img))
            .collect();
        let sub = |p: &Polynomial| p.substitute(&table).unwrap();
        prop_assert_eq!(sub(&a.mul(&b)), sub(&a).mul(&sub(&b)));
        prop_assert_eq!(sub(&a.add(&b)), sub(&a).add(&sub(&b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_forms_do_not_depend_on_redex_order(p in poly_over(SWZ_KINDS, 3), seed in any::<u64>()) {
        let rules = &swz2().rules;
        let a = rules.reduce_with(&p, Redex::Insertion).unwrap();
        let b = rules.reduce_with(&p, Redex::Shuffled(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(rules.reduce(&a).unwrap(), a);
    }

    #[test]
    fn reduction_is_linear(a in poly_over(SWZ_KINDS, 3), b in poly_over(SWZ_KINDS, 3), s in scalar()) {
        let rules = &swz2().rules;
        let lhs = rules.reduce(&a.add(&b.scale(&s))).unwrap();
        let rhs = rules.reduce(&a).unwrap().add(&rules.reduce(&b).unwrap().scale(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lbasis_reduction_is_idempotent(p in poly_over(&[Kind::T, Kind::L, Kind::OmL, Kind::ImL], 3)) {
        let rules = &lbasis2().rules;
        let nf = rules.reduce(&p).unwrap();
        prop_assert!(nf.terms().all(|(w, _)| rules.is_normal(w)));
        prop_assert_eq!(rules.reduce(&nf).unwrap(), nf);
    }
}
