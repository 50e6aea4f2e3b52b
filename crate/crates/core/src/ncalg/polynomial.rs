use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Signed;

use super::{Gen, Word};
use crate::error::{QdcError, Result};
use crate::scalar::Scalar;

/// Finite `Q(p, x)`-linear combination of words for a fixed matrix size `N`.
///
/// Terms are kept in a map keyed by [`Word`] so iteration follows the
/// monomial order and no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Word, Scalar>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Self::term(n, c, Word::empty())
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Scalar::one())
    }

    pub fn term(n: usize, c: Scalar, w: Word) -> Self {
        let mut p = Self::zero(n);
        p.add_term(w, c);
        p
    }

    pub fn gen(n: usize, g: Gen) -> Self {
        Self::term(n, Scalar::one(), Word::single(g))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&Scalar> {
        self.terms.get(w)
    }

    /// Largest word and its coefficient.
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn pop_leading(&mut self) -> Option<(Word, Scalar)> {
        self.terms.pop_last()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = Self::zero(n);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Accumulate `c * w`, dropping the word if the coefficient cancels.
    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(QdcError::MixedN(self.n, other.n));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let (mut out, src) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (w, c) in &src.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: &Scalar, other: &Self) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), s * c);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), other);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Polynomial { n: self.n, terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }

    /// Parity if every word has the same parity; `Some(0)` for zero.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(Word::parity);
        let first = it.next().unwrap_or(0);
        it.all(|p| p == first).then_some(first)
    }

    /// Form degree if uniform across all words.
    pub fn form_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Word::form_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// `ab - (-1)^{|a||b|} ba`
    pub fn graded_commutator(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let pa = self.parity().ok_or(QdcError::InhomogeneousParity)?;
        let pb = other.parity().ok_or(QdcError::InhomogeneousParity)?;
        let ab = self.mul(other);
        let ba = other.mul(self);
        Ok(if pa & pb == 1 { ab.add(&ba) } else { ab.sub(&ba) })
    }

    /// Homomorphic image under `table`; generators not in the table map to
    /// themselves.
    pub fn substitute(&self, table: &HashMap<Gen, Polynomial>) -> Result<Self> {
        for (g, img) in table {
            match img.parity() {
                Some(p) if p == g.parity() || img.is_zero() => {}
                _ => return Err(QdcError::ParityViolation(g.to_string())),
            }
            self.check_n(img)?;
        }
        let mut out = Self::zero(self.n);
        for (w, c) in &self.terms {
            let mut acc = Self::constant(self.n, c.clone());
            for g in w.letters() {
                acc = match table.get(g) {
                    Some(img) => acc.mul(img),
                    None => acc.mul(&Self::gen(self.n, *g)),
                };
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        Self::from_terms(self.n, self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Canonical string in the expression grammar, leading term first.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.numerator().lead_int().is_some_and(|l| l.is_negative());
            let mag = if negative { -c } else { c.clone() };
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let coeff = if mag.is_one() && !w.is_empty() {
                String::new()
            } else if mag.denominator().is_one() && mag.numerator().term_count() == 1 {
                mag.to_expr_string()
            } else {
                format!("({})", mag.to_expr_string())
            };
            match (coeff.is_empty(), w.is_empty()) {
                (true, _) => out.push_str(&w.to_string()),
                (false, true) => out.push_str(&coeff),
                (false, false) => {
                    out.push_str(&coeff);
                    out.push('*');
                    out.push_str(&w.to_string());
                }
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[N={}]({})", self.n, self.to_expr_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::Kind;
    use crate::scalar::Constants;

    fn t(i: usize, j: usize) -> Polynomial {
        Polynomial::gen(2, Gen::new(Kind::T, i - 1, j - 1))
    }

    #[test]
    fn unit_law() {
        assert_eq!(t(1, 1).mul(&Polynomial::one(2)), t(1, 1));
    }

    #[test]
    fn noncommutative_expansion_keeps_cross_terms() {
        let a = t(1, 1).add(&t(2, 2));
        let b = t(1, 1).sub(&t(2, 2));
        let prod = a.mul(&b);
        let expected =
            t(1, 1).mul(&t(1, 1)).sub(&t(1, 1).mul(&t(2, 2))).add(&t(2, 2).mul(&t(1, 1))).sub(&t(2, 2).mul(&t(2, 2)));
        assert_eq!(prod, expected);
        assert_eq!(prod.len(), 4);
    }

    #[test]
    fn cancellation() {
        let lam = Constants::new(2).unwrap().lambda;
        let om = Polynomial::gen(2, Gen::new(Kind::OmT, 0, 1));
        assert!(om.scale(&lam).sub(&om.scale(&lam)).is_zero());
    }

    #[test]
    fn graded_commutators() {
        assert!(t(1, 1).graded_commutator(&t(1, 1)).unwrap().is_zero());
        let a = Polynomial::gen(2, Gen::new(Kind::Om, 0, 0));
        let b = Polynomial::gen(2, Gen::new(Kind::Im, 0, 1));
        assert_eq!(a.graded_commutator(&b).unwrap(), a.mul(&b).add(&b.mul(&a)));
        let mixed = t(1, 1).add(&a);
        assert!(matches!(mixed.graded_commutator(&a), Err(QdcError::InhomogeneousParity)));
    }

    #[test]
    fn mixed_n_rejected() {
        let a = Polynomial::gen(3, Gen::new(Kind::T, 0, 0));
        assert!(matches!(t(1, 1).try_mul(&a), Err(QdcError::MixedN(2, 3))));
    }

    #[test]
    fn substitution_identity_and_parity_guard() {
        let p = t(1, 2).mul(&t(2, 1)).add(&Polynomial::constant(2, Scalar::p()));
        assert_eq!(p.substitute(&HashMap::new()).unwrap(), p);
        let mut bad = HashMap::new();
        bad.insert(Gen::new(Kind::T, 0, 1), Polynomial::gen(2, Gen::new(Kind::Om, 0, 0)));
        assert!(matches!(p.substitute(&bad), Err(QdcError::ParityViolation(_))));
    }

    #[test]
    fn printing_is_leading_term_first() {
        let lam = Constants::new(2).unwrap().lambda;
        let p = t(1, 1)
            .mul(&t(2, 2))
            .sub(&t(1, 2).mul(&t(2, 1)).scale(&lam))
            .add(&Polynomial::constant(2, Scalar::from_int(-3)));
        assert_eq!(p.to_string(), "T[1,1]*T[2,2] - ((p^4 - 1)/p^2)*T[1,2]*T[2,1] - 3");
    }
}
