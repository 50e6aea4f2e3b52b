use std::sync::OnceLock;

use qdc_core::ncalg::Kind;
use qdc_core::presentations::{presentation, Presentation, PresentationName};
use qdc_core::rewrite::overlap_check;
use qdc_core::rmatrix::Convention;

fn built(name: PresentationName, n: usize) -> &'static Presentation {
    static CACHE: OnceLock<Vec<Presentation>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        [2, 3]
            .iter()
            .flat_map(|&n| PresentationName::ALL.map(|p| presentation(p, n, Convention::Standard).unwrap()))
            .collect()
    });
    all.iter().find(|p| p.name == name && p.n() == n).unwrap()
}

#[test]
fn every_relation_reduces_to_zero_in_its_own_presentation() {
    for n in [2, 3] {
        for name in PresentationName::ALL {
            let p = built(name, n);
            for rel in p.relations() {
                let nf = p.reduce(&rel.poly).unwrap();
                assert!(nf.is_zero(), "{name}({n}) {}: {nf}", rel.source);
            }
        }
    }
}

#[test]
fn fp_has_n_squared_minus_one_forms() {
    for n in [2, 3] {
        let p = built(PresentationName::Fp, n);
        let forms = p.generators.iter().filter(|g| g.kind() == Kind::OmT).count();
        assert_eq!(forms, n * n - 1);
        assert_eq!(p.eliminated.len(), 1);
    }
}

// Ranks of each lbasis family on its own, recorded from the first derivation.
#[test]
fn lbasis_family_ranks() {
    let golden = |n: usize| {
        let (sq, sym) = (n * n * n * n, n * n * (n * n + 1) / 2);
        let quad = n * n * (n * n - 1) / 2;
        vec![
            ("eq-s2-TT", quad),
            ("eq-s2-TL", sq),
            ("eq-s2-TOm", sq),
            ("eq-s2-OmOm", sym),
            ("eq-s2-LL", quad),
            ("eq-s2-LOm", sq),
            ("eq-s3-TIm", sq),
            ("eq-s3-ImIm", sym),
            ("eq-s3-LIm", sq),
            ("eq-ss3", sq),
        ]
    };
    for n in [2, 3] {
        let got = built(PresentationName::Lbasis, n).family_ranks().unwrap();
        let got: Vec<(&str, usize)> = got.iter().map(|(id, r)| (id.as_str(), *r)).collect();
        assert_eq!(got, golden(n), "N = {n}");
    }
}

#[test]
fn rule_counts() {
    let counts: Vec<usize> =
        [2, 3].iter().flat_map(|&n| PresentationName::ALL.map(|p| built(p, n).rules.len())).collect();
    assert_eq!(counts, [6, 128, 128, 113, 36, 648, 648, 613]);
}

#[test]
fn degree_two_normal_words_have_pbw_count() {
    // quadratic PBW: even generators commute up to order, odd ones anticommute
    for n in [2, 3] {
        for name in PresentationName::ALL {
            let p = built(name, n);
            let (mut even, mut odd) = (0usize, 0usize);
            for g in &p.generators {
                if g.kind().parity() == 0 {
                    even += 1
                } else {
                    odd += 1
                }
            }
            let expect = even * (even + 1) / 2 + odd * odd.saturating_sub(1) / 2 + even * odd;
            assert_eq!(p.good_words.len(), expect, "{name}({n})");
        }
    }
}

#[test]
fn overlaps_resolve_at_degree_three() {
    for n in [2, 3] {
        for name in PresentationName::ALL {
            let bad = overlap_check(&built(name, n).rules, 3).unwrap();
            assert!(bad.is_empty(), "{name}({n}): {} unresolved, first {}", bad.len(), bad[0].word);
        }
    }
}

// Under the inverse convention the fp system is inconsistent; the other
// presentations still build and are self-consistent.
#[test]
fn inverse_convention() {
    for name in [PresentationName::FrtT, PresentationName::Swz, PresentationName::Lbasis] {
        let p = presentation(name, 2, Convention::Inverse).unwrap();
        assert!(p.relations().iter().all(|r| p.reduce(&r.poly).unwrap().is_zero()));
    }
    let err = presentation(PresentationName::Fp, 2, Convention::Inverse).unwrap_err();
    assert!(matches!(err, qdc_core::QdcError::Unorientable { .. }), "{err}");
}

// With left-hand sides of length <= 2 every ambiguity has length <= 3, so the
// degree-3 overlap check covers all of them.
#[test]
fn left_hand_sides_are_at_most_quadratic() {
    for n in [2, 3] {
        for name in PresentationName::ALL {
            assert!(built(name, n).rules.rules().iter().all(|r| r.lhs.len() <= 2), "{name}({n})");
        }
    }
}
