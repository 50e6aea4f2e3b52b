//! Critical-pair analysis (diamond-lemma style) and bounded completion.

use rayon::prelude::*;
use serde::Serialize;

use super::{orient_relations, Relation, Rule, RuleSet};
use crate::error::Result;
use crate::ncalg::{Polynomial, Word};

/// An ambiguity whose two one-step rewrites do not reduce to the same
/// normal form.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPair {
    pub word: String,
    pub rules: (usize, usize),
    pub difference: String,
    #[serde(skip)]
    pub difference_poly: Option<Polynomial>,
}

/// An ambiguous word with the two `(position, rule)` redexes it contains.
pub type Ambiguity = (Word, (usize, usize), (usize, usize));

/// Ambiguous words of length at most `max_degree`: proper overlaps of two
/// left-hand sides and inclusions of one left-hand side in another.
pub fn overlap_words(rules: &RuleSet, max_degree: usize) -> Vec<Ambiguity> {
    let rs = rules.rules();
    let mut out = Vec::new();
    for (ia, a) in rs.iter().enumerate() {
        let la = a.lhs.letters();
        for (ib, b) in rs.iter().enumerate() {
            let lb = b.lhs.letters();
            // suffix of a (length k) equals prefix of b, both proper
            for k in 1..la.len().min(lb.len()) {
                if la[la.len() - k..] == lb[..k] {
                    let w = a.lhs.concat(&Word::from_gens(&lb[k..]));
                    if w.len() <= max_degree {
                        out.push((w, (0, ia), (la.len() - k, ib)));
                    }
                }
            }
            // b strictly inside a
            if ia != ib && lb.len() < la.len() {
                for pos in 0..=la.len() - lb.len() {
                    if la[pos..pos + lb.len()] == *lb {
                        out.push((a.lhs.clone(), (0, ia), (pos, ib)));
                    }
                }
            }
        }
    }
    out
}

/// All ambiguities up to `max_degree` whose two rewrites reduce to different
/// normal forms. Empty output certifies local confluence up to that degree.
pub fn overlap_check(rules: &RuleSet, max_degree: usize) -> Result<Vec<CriticalPair>> {
    let ambiguities = overlap_words(rules, max_degree);
    let results: Vec<Result<Option<CriticalPair>>> = ambiguities
        .par_iter()
        .map(|(w, (pa, ra), (pb, rb))| {
            let left = rules.reduce(&rules.apply_at(w, *pa, *ra))?;
            let right = rules.reduce(&rules.apply_at(w, *pb, *rb))?;
            let diff = left.sub(&right);
            Ok((!diff.is_zero()).then(|| CriticalPair {
                word: w.to_string(),
                rules: (*ra, *rb),
                difference: diff.to_expr_string(),
                difference_poly: Some(diff),
            }))
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        if let Some(cp) = r? {
            out.push(cp);
        }
    }
    out.sort_by(|a, b| a.word.cmp(&b.word).then(a.rules.cmp(&b.rules)));
    Ok(out)
}

/// Outcome of [`complete_bounded`].
#[derive(Debug)]
pub struct Completion {
    pub rules: RuleSet,
    pub added: usize,
    /// Unresolved pairs remained when a bound was hit.
    pub truncated: bool,
    pub remaining: Vec<CriticalPair>,
}

/// Knuth–Bendix style completion: orient the normal forms of unresolved
/// critical pairs as new rules and inter-reduce, until everything up to
/// `max_degree` resolves or `max_rules` new rules have been added.
pub fn complete_bounded(rules: &RuleSet, max_degree: usize, max_rules: usize) -> Result<Completion> {
    let n = rules.n();
    let mut current = rules.clone();
    let mut added = 0usize;
    loop {
        let pairs = overlap_check(&current, max_degree)?;
        if pairs.is_empty() {
            return Ok(Completion { rules: current, added, truncated: false, remaining: pairs });
        }
        if added >= max_rules {
            return Ok(Completion { rules: current, added, truncated: true, remaining: pairs });
        }
        // all current rules as relations plus the new differences, re-oriented
        let mut relations: Vec<Relation> =
            current.rules().iter().map(|r| Relation::new(r.as_relation(), r.source.clone())).collect();
        let before = current.len();
        let budget = max_rules - added;
        for cp in pairs.iter().take(budget) {
            if let Some(d) = &cp.difference_poly {
                relations.push(Relation::new(d.clone(), "completion"));
            }
        }
        let oriented = orient_relations(n, &relations, &[])?;
        // rules whose lhs is reducible by another rule are turned back into relations
        let reoriented = interreduce(n, oriented.rules.rules().to_vec())?;
        let grew = reoriented.len().saturating_sub(before);
        added += grew.max(1);
        current = reoriented.with_step_cap(rules.step_cap());
    }
}

/// Drop rules whose left-hand side contains another rule's left-hand side,
/// feeding them back as relations, and bring every right-hand side to normal
/// form.
fn interreduce(n: usize, mut rules: Vec<Rule>) -> Result<RuleSet> {
    loop {
        rules.sort_by(|a, b| a.lhs.cmp(&b.lhs));
        let mut keep: Vec<Rule> = Vec::new();
        let mut leftovers: Vec<Rule> = Vec::new();
        for r in rules {
            let probe = RuleSet::from_rules(n, keep.clone())?;
            if probe.redexes(&r.lhs).is_empty() {
                keep.push(r);
            } else {
                leftovers.push(r);
            }
        }
        let base = RuleSet::from_rules(n, keep.clone())?;
        if leftovers.is_empty() {
            let mut out = Vec::with_capacity(keep.len());
            for r in keep {
                let rhs = base.reduce(&r.rhs)?;
                out.push(Rule { lhs: r.lhs, rhs, source: r.source });
            }
            return RuleSet::from_rules(n, out);
        }
        let mut relations: Vec<Relation> =
            keep.iter().map(|r| Relation::new(r.as_relation(), r.source.clone())).collect();
        for r in leftovers {
            let red = base.reduce(&r.as_relation())?;
            if !red.is_zero() {
                relations.push(Relation::new(red, r.source.clone()));
            }
        }
        rules = orient_relations(n, &relations, &[])?.rules.rules().to_vec();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{Gen, Kind, PolyMatrix};
    use crate::rewrite::orient_relations;
    use crate::rmatrix::{build_rhat, Convention};
    use crate::scalar::Scalar;

    fn frt_rules(n: usize) -> RuleSet {
        let r = build_rhat(n, Convention::Standard).unwrap();
        let t = PolyMatrix::generators(n, Kind::T);
        let t1t2 = t.embed1().unwrap().mul(&t.embed2().unwrap()).unwrap();
        let rel = t1t2.lmul_scalar(&r.matrix).unwrap().sub(&t1t2.rmul_scalar(&r.matrix).unwrap()).unwrap();
        let rels: Vec<_> = rel.entries().iter().map(|p| Relation::new(p.clone(), "eq-zum-TT")).collect();
        orient_relations(n, &rels, &[]).unwrap().rules
    }

    fn broken(rules: &RuleSet) -> RuleSet {
        // T12 T11 -> q T11 T12 becomes q^2 T11 T12
        let (w, _) = rules.rules()[0].rhs.leading().unwrap();
        let w = w.clone();
        rules.with_mutated_coefficient(0, &w, &Scalar::p_pow(2)).unwrap()
    }

    #[test]
    fn frt2_is_confluent_at_degree_three() {
        let rs = frt_rules(2);
        assert!(!overlap_words(&rs, 3).is_empty());
        assert!(overlap_check(&rs, 3).unwrap().is_empty());
    }

    #[test]
    fn mutated_frt2_has_unresolved_pairs() {
        let bad = broken(&frt_rules(2));
        assert!(!overlap_check(&bad, 3).unwrap().is_empty());
    }

    #[test]
    fn completion_of_confluent_input_is_unchanged() {
        let rs = frt_rules(2);
        let c = complete_bounded(&rs, 3, 10).unwrap();
        assert!(!c.truncated);
        assert_eq!(c.added, 0);
        assert_eq!(c.rules.rules(), rs.rules());
    }

    #[test]
    fn completion_grows_a_broken_system() {
        let bad = broken(&frt_rules(2));
        let c = complete_bounded(&bad, 3, 50).unwrap();
        assert!(c.added >= 1);
        assert!(c.rules.len() > bad.len() || c.rules.rules() != bad.rules());
    }

    #[test]
    fn zero_budget_truncates() {
        let bad = broken(&frt_rules(2));
        let c = complete_bounded(&bad, 3, 0).unwrap();
        assert!(c.truncated);
        assert_eq!(c.rules.rules(), bad.rules());
    }

    #[test]
    fn inclusion_ambiguities_are_found() {
        let a = Gen::new(Kind::T, 0, 1);
        let b = Gen::new(Kind::T, 0, 0);
        let rules = vec![
            Rule {
                lhs: Word::from_gens(&[b, a]),
                rhs: Polynomial::term(2, Scalar::one(), Word::from_gens(&[a, a])),
                source: "x".into(),
            },
            Rule { lhs: Word::single(b), rhs: Polynomial::term(2, Scalar::one(), Word::single(a)), source: "y".into() },
        ];
        let rs = RuleSet::from_rules(2, rules).unwrap();
        let amb = overlap_words(&rs, 3);
        assert!(amb.iter().any(|(w, _, (pos, rb))| w.len() == 2 && *pos == 0 && *rb == 1));
    }
}
