//! Relation compiler and normal-form engine.
//!
//! Relations are turned into oriented rules by sparse Gaussian elimination
//! over `Q(p, x)`, pivoting on the largest word of each row in the
//! degree-lexicographic order of [`Word`]. Every rule therefore rewrites its
//! left-hand side into a combination of strictly smaller words, which makes
//! reduction terminate even with inhomogeneous (lower-degree) tails.

mod overlap;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use overlap::{complete_bounded, overlap_check, overlap_words, Ambiguity, Completion, CriticalPair};

use crate::error::{QdcError, Result};
use crate::ncalg::{Gen, Polynomial, Word};
use crate::scalar::Scalar;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

/// One relation component with the identifier of the family it came from.
#[derive(Clone, Debug)]
pub struct Relation {
    pub poly: Polynomial,
    pub source: String,
}

impl Relation {
    pub fn new(poly: Polynomial, source: impl Into<String>) -> Self {
        Relation { poly, source: source.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    /// Every word here is smaller than `lhs`.
    pub rhs: Polynomial,
    pub source: String,
}

#[derive(Serialize)]
pub struct RuleRecord {
    pub lhs: String,
    pub rhs: String,
    pub source: String,
}

impl Rule {
    /// `lhs - rhs`, the relation this rule encodes.
    pub fn as_relation(&self) -> Polynomial {
        Polynomial::term(self.rhs.n(), Scalar::one(), self.lhs.clone()).sub(&self.rhs)
    }

    pub fn record(&self) -> RuleRecord {
        RuleRecord { lhs: self.lhs.to_string(), rhs: self.rhs.to_expr_string(), source: self.source.clone() }
    }
}

/// How [`RuleSet::reduce_with`] picks the next redex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Memoized left-insertion normal ordering.
    Insertion,
    /// Largest word first, redex position chosen by a seeded RNG.
    Shuffled(u64),
}

/// Oriented, terminating rewrite system.
pub struct RuleSet {
    n: usize,
    rules: Vec<Rule>,
    singles: HashMap<Gen, usize>,
    pairs: HashMap<(Gen, Gen), usize>,
    /// Rules with lhs longer than two letters, keyed by first letter.
    longer: HashMap<Gen, Vec<usize>>,
    step_cap: u64,
    cache: DashMap<Word, Arc<Polynomial>>,
}

impl Clone for RuleSet {
    fn clone(&self) -> Self {
        RuleSet::from_rules(self.n, self.rules.clone()).expect("valid rules").with_step_cap(self.step_cap)
    }
}

impl std::fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RuleSet").field("n", &self.n).field("rules", &self.rules.len()).finish()
    }
}

impl RuleSet {
    pub fn empty(n: usize) -> Self {
        RuleSet {
            n,
            rules: Vec::new(),
            singles: HashMap::new(),
            pairs: HashMap::new(),
            longer: HashMap::new(),
            step_cap: DEFAULT_STEP_CAP,
            cache: DashMap::new(),
        }
    }

    /// Build from explicit rules. Rejects duplicate left-hand sides, empty
    /// left-hand sides and rules that are not order-decreasing.
    pub fn from_rules(n: usize, rules: Vec<Rule>) -> Result<Self> {
        let mut rs = RuleSet::empty(n);
        for rule in rules {
            rs.push(rule)?;
        }
        Ok(rs)
    }

    fn push(&mut self, rule: Rule) -> Result<()> {
        let bad = |reason: &str| QdcError::Unorientable { family: rule.source.clone(), reason: reason.to_string() };
        if rule.lhs.is_empty() {
            return Err(bad("constant leading term"));
        }
        if rule.rhs.terms().any(|(w, _)| *w >= rule.lhs) {
            return Err(bad("rule is not order-decreasing"));
        }
        let idx = self.rules.len();
        let l = rule.lhs.letters();
        let dup = match l.len() {
            1 => self.singles.insert(l[0], idx).is_some(),
            2 => self.pairs.insert((l[0], l[1]), idx).is_some(),
            _ => {
                let bucket = self.longer.entry(l[0]).or_default();
                let dup = bucket.iter().any(|&j| self.rules[j].lhs == rule.lhs);
                bucket.push(idx);
                dup
            }
        };
        if dup {
            return Err(bad("duplicate left-hand side"));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn step_cap(&self) -> u64 {
        self.step_cap
    }

    pub fn records(&self) -> Vec<RuleRecord> {
        self.rules.iter().map(Rule::record).collect()
    }

    /// Copy of this rule set with the coefficient of `word` in rule `idx`
    /// multiplied by `factor` (used for negative controls).
    pub fn with_mutated_coefficient(&self, idx: usize, word: &Word, factor: &Scalar) -> Result<Self> {
        let mut rules = self.rules.clone();
        let rule = rules.get_mut(idx).ok_or_else(|| QdcError::Unknown(format!("rule {idx}")))?;
        let c = rule.rhs.coeff(word).cloned().ok_or_else(|| QdcError::Unknown(format!("word {word}")))?;
        let delta = &(&c * factor) - &c;
        rule.rhs.add_term(word.clone(), delta);
        Ok(RuleSet::from_rules(self.n, rules)?.with_step_cap(self.step_cap))
    }

    /// Index of the rule whose left-hand side matches `w` at `pos`.
    fn match_at(&self, w: &[Gen], pos: usize) -> Option<usize> {
        if let Some(&i) = self.singles.get(&w[pos]) {
            return Some(i);
        }
        if pos + 1 < w.len() {
            if let Some(&i) = self.pairs.get(&(w[pos], w[pos + 1])) {
                return Some(i);
            }
        }
        if let Some(bucket) = self.longer.get(&w[pos]) {
            for &i in bucket {
                let l = self.rules[i].lhs.letters();
                if w.len() - pos >= l.len() && &w[pos..pos + l.len()] == l {
                    return Some(i);
                }
            }
        }
        None
    }

    /// All `(position, rule)` redexes in `w`.
    pub fn redexes(&self, w: &Word) -> Vec<(usize, usize)> {
        let l = w.letters();
        let mut out = Vec::new();
        for pos in 0..l.len() {
            if let Some(&i) = self.singles.get(&l[pos]) {
                out.push((pos, i));
            }
            if pos + 1 < l.len() {
                if let Some(&i) = self.pairs.get(&(l[pos], l[pos + 1])) {
                    out.push((pos, i));
                }
            }
            if let Some(bucket) = self.longer.get(&l[pos]) {
                for &i in bucket {
                    let lhs = self.rules[i].lhs.letters();
                    if l.len() - pos >= lhs.len() && &l[pos..pos + lhs.len()] == lhs {
                        out.push((pos, i));
                    }
                }
            }
        }
        out
    }

    pub fn is_normal(&self, w: &Word) -> bool {
        let l = w.letters();
        (0..l.len()).all(|pos| self.match_at(l, pos).is_none())
    }

    /// Replace the redex of rule `rule` at `pos` in `w`: `c * prefix * rhs * suffix`.
    pub fn apply_at(&self, w: &Word, pos: usize, rule: usize) -> Polynomial {
        let r = &self.rules[rule];
        let l = w.letters();
        let prefix = Word::from_gens(&l[..pos]);
        let suffix = Word::from_gens(&l[pos + r.lhs.len()..]);
        Polynomial::from_terms(self.n, r.rhs.terms().map(|(rw, c)| (prefix.concat(rw).concat(&suffix), c.clone())))
    }

    /// Normal form of `p` with the default (memoized) strategy.
    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial> {
        self.reduce_with(p, Strategy::Insertion)
    }

    pub fn reduce_with(&self, p: &Polynomial, strategy: Strategy) -> Result<Polynomial> {
        if p.n() != self.n && !self.rules.is_empty() {
            return Err(QdcError::MixedN(p.n(), self.n));
        }
        match strategy {
            Strategy::Insertion => {
                let steps = AtomicU64::new(0);
                let mut out = Polynomial::zero(p.n());
                for (w, c) in p.terms() {
                    let nf = self.nf_word(w, &steps)?;
                    out.add_scaled(c, &nf);
                }
                Ok(out)
            }
            Strategy::Shuffled(seed) => self.reduce_shuffled(p, seed),
        }
    }

    fn bump(&self, steps: &AtomicU64) -> Result<()> {
        if steps.fetch_add(1, Ordering::Relaxed) >= self.step_cap {
            return Err(QdcError::StepCapExceeded(self.step_cap));
        }
        Ok(())
    }

    /// Normal form of a single word by inserting its letters right to left
    /// into an already normal suffix.
    fn nf_word(&self, w: &Word, steps: &AtomicU64) -> Result<Polynomial> {
        self.nf_prepend(w.letters(), Polynomial::one(self.n), steps)
    }

    /// Normal form of `letters * tail`, where `tail` is already normal.
    fn nf_prepend(&self, letters: &[Gen], tail: Polynomial, steps: &AtomicU64) -> Result<Polynomial> {
        let mut acc = tail;
        for &g in letters.iter().rev() {
            let mut next = Polynomial::zero(self.n);
            for (v, c) in acc.terms() {
                let ins = self.nf_insert(g, v, steps)?;
                next.add_scaled(c, &ins);
            }
            acc = next;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Normal form of `g * v` for a normal word `v`. Any redex must start at
    /// position 0.
    fn nf_insert(&self, g: Gen, v: &Word, steps: &AtomicU64) -> Result<Arc<Polynomial>> {
        let mut key = Word::single(g);
        key.0.extend_from_slice(v.letters());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(Arc::clone(hit.value()));
        }
        let result = match self.match_at(key.letters(), 0) {
            None => Polynomial::term(self.n, Scalar::one(), key.clone()),
            Some(ri) => {
                self.bump(steps)?;
                let rule = &self.rules[ri];
                let rest = Word::from_gens(&key.letters()[rule.lhs.len()..]);
                let mut out = Polynomial::zero(self.n);
                for (rw, c) in rule.rhs.terms() {
                    let tail = Polynomial::term(self.n, Scalar::one(), rest.clone());
                    let nf = self.nf_prepend(rw.letters(), tail, steps)?;
                    out.add_scaled(c, &nf);
                }
                out
            }
        };
        let result = Arc::new(result);
        self.cache.insert(key, Arc::clone(&result));
        Ok(result)
    }

    /// Reference reducer: repeatedly rewrite the largest reducible word at a
    /// randomly chosen redex. Independent of the memo table.
    fn reduce_shuffled(&self, p: &Polynomial, seed: u64) -> Result<Polynomial> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pending: BTreeMap<Word, Scalar> = p.clone().into_terms();
        let mut out = Polynomial::zero(p.n());
        let mut steps = 0u64;
        while let Some((w, c)) = pending.pop_last() {
            let redexes = self.redexes(&w);
            let Some(&(pos, ri)) = redexes.choose(&mut rng) else {
                out.add_term(w, c);
                continue;
            };
            steps += 1;
            if steps > self.step_cap {
                return Err(QdcError::StepCapExceeded(self.step_cap));
            }
            for (rw, rc) in self.apply_at(&w, pos, ri).terms() {
                let v = &c * rc;
                let e = pending.entry(rw.clone()).or_insert_with(Scalar::zero);
                *e = &*e + &v;
                if e.is_zero() {
                    pending.remove(rw);
                }
            }
        }
        Ok(out)
    }

    /// Number of cached normal forms.
    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }
}

/// Result of compiling relations.
#[derive(Debug)]
pub struct Oriented {
    pub rules: RuleSet,
    /// Degree-2 words over the supplied generators that no rule rewrites.
    pub good_words: Vec<Word>,
    /// Rank of the relation span.
    pub rank: usize,
}

/// Gaussian elimination on the span of the relations, pivoting on the largest
/// word of each row; each reduced row becomes one rule `lead -> -tail`.
pub fn orient_relations(n: usize, relations: &[Relation], generators: &[Gen]) -> Result<Oriented> {
    // pivot word -> (monic row, source)
    let mut pivots: BTreeMap<Word, (Polynomial, String)> = BTreeMap::new();
    for rel in relations {
        if rel.poly.n() != n {
            return Err(QdcError::MixedN(rel.poly.n(), n));
        }
        let mut row = rel.poly.clone();
        loop {
            let Some((lw, lc)) = row.leading().map(|(w, c)| (w.clone(), c.clone())) else { break };
            match pivots.get(&lw) {
                Some((prow, _)) => {
                    let f = -&lc;
                    row.add_scaled(&f, prow);
                }
                None => {
                    if lw.is_empty() {
                        return Err(QdcError::Unorientable {
                            family: rel.source.clone(),
                            reason: "relations imply 1 = 0".into(),
                        });
                    }
                    let row = row.scale(&lc.inv());
                    pivots.insert(lw, (row, rel.source.clone()));
                    break;
                }
            }
        }
    }
    // back-substitution, smallest pivots first so each one is already reduced
    let keys: Vec<Word> = pivots.keys().cloned().collect();
    for key in &keys {
        let (mut row, src) = pivots.remove(key).unwrap();
        let tail_pivots: Vec<Word> =
            row.terms().filter(|(w, _)| *w != key && pivots.contains_key(*w)).map(|(w, _)| w.clone()).collect();
        for w in tail_pivots.iter().rev() {
            if let Some(c) = row.coeff(w).cloned() {
                let (prow, _) = &pivots[w];
                row.add_scaled(&-&c, prow);
            }
        }
        pivots.insert(key.clone(), (row, src));
    }
    let rank = pivots.len();
    let mut rules = Vec::with_capacity(rank);
    for (lhs, (row, source)) in pivots {
        let mut rhs = row.neg();
        rhs.add_term(lhs.clone(), Scalar::one());
        rules.push(Rule { lhs, rhs, source });
    }
    let rules = RuleSet::from_rules(n, rules)?;
    let mut good_words = Vec::new();
    for &a in generators {
        for &b in generators {
            let w = Word::from_gens(&[a, b]);
            if rules.is_normal(&w) {
                good_words.push(w);
            }
        }
    }
    good_words.sort();
    Ok(Oriented { rules, good_words, rank })
}
