//! Commutative integer polynomials used as numerators and denominators of
//! [`Scalar`](super::Scalar) values.
//!
//! `UPoly` is dense in `p`; `BiPoly` is dense in `x` with `UPoly`
//! coefficients, i.e. an element of `Z[p][x]`. Both keep the invariant that
//! the highest stored coefficient is nonzero, so structural equality is
//! polynomial equality.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense univariate polynomial over `Z` in `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        let mut u = UPoly { coeffs: vec![c] };
        u.trim();
        u
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// `c * p^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        UPoly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut u = UPoly { coeffs };
        u.trim();
        u
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Number of nonzero coefficients.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn neg(&self) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() { (self, other) } else { (other, self) };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiply by `p^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UPoly { coeffs }
    }

    /// Divide by `p^k`; caller guarantees `k <= valuation`.
    pub fn shift_down(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        UPoly { coeffs: self.coeffs[k..].to_vec() }
    }

    /// Exact division of every coefficient by an integer.
    pub fn div_int(&self, d: &BigInt) -> Self {
        if d.is_one() {
            return self.clone();
        }
        UPoly { coeffs: self.coeffs.iter().map(|c| c / d).collect() }
    }

    /// Integer content (nonnegative gcd of the coefficients).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.lead().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        self.div_int(&c)
    }

    pub fn is_monomial(&self) -> bool {
        self.term_count() == 1
    }

    /// Pseudo-remainder of `self` by `divisor` (which must be nonzero).
    pub fn prem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("prem by zero polynomial");
        let lc = divisor.lead().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let rl = r.lead().unwrap().clone();
            // r = lc*r - rl*p^(rd-dd)*divisor
            let mut next = r.scale(&lc);
            let sub = divisor.scale(&rl).shift_up(rd - dd);
            next = next.sub(&sub);
            r = next;
        }
        r
    }

    /// Exact division; `None` if `divisor` does not divide `self` over `Z`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        if dd == 0 {
            let d = &divisor.coeffs[0];
            if self.coeffs.iter().any(|c| !(c % d).is_zero()) {
                return None;
            }
            return Some(self.div_int(d));
        }
        let lc = divisor.lead().unwrap();
        let mut r = self.clone();
        let sd = self.degree()?;
        if sd < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        while let Some(rd) = r.degree() {
            if rd < dd {
                return None;
            }
            let (quo, rem) = r.lead().unwrap().div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            r = r.sub(&divisor.scale(&quo).shift_up(rd - dd));
            q[rd - dd] = quo;
        }
        Some(Self::from_coeffs(q))
    }

    /// Greatest common divisor over `Z[p]`, normalized to a positive leading
    /// coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_keep_content();
        }
        if other.is_zero() {
            return self.primitive_keep_content();
        }
        let ca = self.content();
        let cb = other.content();
        let c = ca.gcd(&cb);
        // Monomial fast paths: gcd is c * p^min(valuation) if either side is a monomial.
        if self.is_monomial() || other.is_monomial() {
            let mut k = self.valuation().min(other.valuation());
            if self.is_monomial() {
                k = k.min(self.degree().unwrap());
            }
            if other.is_monomial() {
                k = k.min(other.degree().unwrap());
            }
            return Self::monomial(c, k);
        }
        let va = self.valuation();
        let vb = other.valuation();
        let v = va.min(vb);
        let mut a = self.shift_down(va).div_int(&ca);
        let mut b = other.shift_down(vb).div_int(&cb);
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive().scale(&c).shift_up(v)
    }

    fn primitive_keep_content(&self) -> Self {
        if self.lead().is_some_and(|l| l.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn eval(&self, at: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + BigRational::from_integer(c.clone());
        }
        acc
    }
}

/// Polynomial in `x` with coefficients in `Z[p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    coeffs: Vec<UPoly>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_upoly(UPoly::one())
    }

    pub fn from_upoly(u: UPoly) -> Self {
        let mut b = BiPoly { coeffs: vec![u] };
        b.trim();
        b
    }

    pub fn from_coeffs(coeffs: Vec<UPoly>) -> Self {
        let mut b = BiPoly { coeffs };
        b.trim();
        b
    }

    /// `c * p^i * x^j`
    pub fn monomial(c: BigInt, i: usize, j: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![UPoly::zero(); j + 1];
        coeffs[j] = UPoly::monomial(c, i);
        BiPoly { coeffs }
    }

    pub fn integer(c: BigInt) -> Self {
        Self::from_upoly(UPoly::constant(c))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True when the polynomial does not involve `x`.
    pub fn is_x_free(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading integer coefficient: highest `x` power, then highest `p` power.
    pub fn lead_int(&self) -> Option<&BigInt> {
        self.coeffs.last().and_then(|u| u.lead())
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().map(UPoly::term_count).sum()
    }

    /// Single term `c * p^i * x^j`.
    pub fn as_monomial(&self) -> Option<(&BigInt, usize, usize)> {
        if self.term_count() != 1 {
            return None;
        }
        let j = self.coeffs.len() - 1;
        let u = &self.coeffs[j];
        let i = u.degree().unwrap();
        Some((u.lead().unwrap(), i, j))
    }

    pub fn neg(&self) -> Self {
        BiPoly { coeffs: self.coeffs.iter().map(UPoly::neg).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() { (self, other) } else { (other, self) };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c = c.add(s);
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.coeffs.len() == 1 && other.coeffs.len() == 1 {
            return Self::from_upoly(self.coeffs[0].mul(&other.coeffs[0]));
        }
        let mut coeffs = vec![UPoly::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale_upoly(&self, u: &UPoly) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.mul(u)).collect())
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|u| u.scale(c)).collect())
    }

    pub fn div_int(&self, d: &BigInt) -> Self {
        BiPoly { coeffs: self.coeffs.iter().map(|u| u.div_int(d)).collect() }
    }

    /// Multiply by `p^k x^m`.
    pub fn shift(&self, k: usize, m: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![UPoly::zero(); m];
        coeffs.extend(self.coeffs.iter().map(|u| u.shift_up(k)));
        BiPoly { coeffs }
    }

    /// Divide by `p^k x^m`; caller guarantees divisibility.
    pub fn unshift(&self, k: usize, m: usize) -> Self {
        BiPoly { coeffs: self.coeffs[m..].iter().map(|u| u.shift_down(k)).collect() }
    }

    pub fn p_valuation(&self) -> usize {
        self.coeffs.iter().filter(|u| !u.is_zero()).map(UPoly::valuation).min().unwrap_or(0)
    }

    pub fn x_valuation(&self) -> usize {
        self.coeffs.iter().position(|u| !u.is_zero()).unwrap_or(0)
    }

    pub fn int_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for u in &self.coeffs {
            for c in u.coeffs() {
                if !c.is_zero() {
                    g = g.gcd(c);
                    if g.is_one() {
                        return g;
                    }
                }
            }
        }
        g
    }

    /// Content with respect to `x`: gcd in `Z[p]` of the coefficients.
    pub fn x_content(&self) -> UPoly {
        let mut g = UPoly::zero();
        for u in &self.coeffs {
            if !u.is_zero() {
                g = g.gcd(u);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    fn div_upoly_exact(&self, d: &UPoly) -> Option<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for u in &self.coeffs {
            coeffs.push(u.div_exact(d)?);
        }
        Some(Self::from_coeffs(coeffs))
    }

    /// Pseudo-remainder in `x` over `Z[p]`.
    fn prem_x(&self, divisor: &Self) -> Self {
        let dd = divisor.x_degree().expect("prem by zero polynomial");
        let lc = divisor.coeffs.last().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.x_degree() {
            if rd < dd {
                break;
            }
            let rl = r.coeffs.last().unwrap().clone();
            r = r.scale_upoly(&lc).sub(&divisor.scale_upoly(&rl).shift(0, rd - dd));
        }
        r
    }

    /// Primitive part with respect to `x`, sign fixed so the leading integer
    /// coefficient is positive.
    fn x_primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.x_content();
        let mut r = self.div_upoly_exact(&c).expect("content divides");
        if r.lead_int().is_some_and(|l| l.is_negative()) {
            r = r.neg();
        }
        r
    }

    /// Exact division in `Z[p][x]`; `None` if not divisible.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.x_degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        if dd == 0 {
            return self.div_upoly_exact(&divisor.coeffs[0]);
        }
        let sd = self.x_degree()?;
        if sd < dd {
            return None;
        }
        let lc = divisor.coeffs.last().unwrap();
        let mut r = self.clone();
        let mut q = vec![UPoly::zero(); sd - dd + 1];
        while let Some(rd) = r.x_degree() {
            if rd < dd {
                return None;
            }
            let quo = r.coeffs.last().unwrap().div_exact(lc)?;
            r = r.sub(&divisor.scale_upoly(&quo).shift(0, rd - dd));
            q[rd - dd] = quo;
        }
        Some(Self::from_coeffs(q))
    }

    /// Greatest common divisor in `Z[p][x]` with positive leading integer
    /// coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.sign_normalized();
        }
        if other.is_zero() {
            return self.sign_normalized();
        }
        if self.is_x_free() && other.is_x_free() {
            return Self::from_upoly(self.coeffs[0].gcd(&other.coeffs[0]));
        }
        if let Some(g) = self.monomial_gcd(other) {
            return g;
        }
        let ca = self.x_content();
        let cb = other.x_content();
        let c = ca.gcd(&cb);
        if self.is_x_free() || other.is_x_free() {
            return Self::from_upoly(c);
        }
        let mut a = self.div_upoly_exact(&ca).unwrap();
        let mut b = other.div_upoly_exact(&cb).unwrap();
        if a.x_degree() < b.x_degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.x_degree().is_some_and(|d| d > 0) {
            let r = a.prem_x(&b);
            a = b;
            b = r.x_primitive();
        }
        let g = if b.is_zero() { a.x_primitive() } else { Self::one() };
        g.scale_upoly(&c).sign_normalized()
    }

    fn monomial_gcd(&self, other: &Self) -> Option<Self> {
        let (mono, poly) = match (self.as_monomial(), other.as_monomial()) {
            (Some(_), _) => (self, other),
            (None, Some(_)) => (other, self),
            _ => return None,
        };
        let (c, i, j) = mono.as_monomial().unwrap();
        let g = c.gcd(&poly.int_content());
        let k = i.min(poly.p_valuation());
        let m = j.min(poly.x_valuation());
        Some(Self::monomial(g, k, m))
    }

    fn sign_normalized(&self) -> Self {
        if self.lead_int().is_some_and(|l| l.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn eval(&self, p: &BigRational, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for u in self.coeffs.iter().rev() {
            acc = acc * x + u.eval(p);
        }
        acc
    }

    /// Terms `(coeff, p_exp, x_exp)` in descending `(x_exp, p_exp)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, usize, usize)> {
        self.coeffs.iter().enumerate().rev().flat_map(|(j, u)| {
            u.coeffs().iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (c, i, j))
        })
    }

    /// Total order used only for deterministic sorting of scalar keys.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let a: Vec<_> = self.terms().collect();
        let b: Vec<_> = other.terms().collect();
        for (s, o) in a.iter().zip(&b) {
            let c = (s.2, s.1).cmp(&(o.2, o.1)).then_with(|| s.0.cmp(o.0));
            if c != Ordering::Equal {
                return c;
            }
        }
        a.len().cmp(&b.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(cs: &[i64]) -> UPoly {
        UPoly::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn upoly_gcd_of_shared_factor() {
        // (p-1)(p+2) and (p-1)(p-3)
        let a = up(&[-2, 1, 1]);
        let b = up(&[3, -4, 1]);
        assert_eq!(a.gcd(&b), up(&[-1, 1]));
    }

    #[test]
    fn upoly_gcd_with_content_and_powers_of_p() {
        let a = up(&[0, 0, 4, 4]); // 4p^2(p+1)
        let b = up(&[0, 6, 6]); // 6p(p+1)
        assert_eq!(a.gcd(&b), up(&[0, 2, 2]));
    }

    #[test]
    fn upoly_exact_division() {
        let a = up(&[-1, 0, 0, 0, 1]); // p^4 - 1
        let b = up(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&b), Some(up(&[1, 0, 1])));
        assert_eq!(a.div_exact(&up(&[0, 1])), None);
    }

    #[test]
    fn bipoly_gcd_in_x() {
        // (x - p)(x + 1) and (x - p)(p x + 2)
        let xm = BiPoly::from_coeffs(vec![up(&[0, -1]), up(&[1])]);
        let a = xm.mul(&BiPoly::from_coeffs(vec![up(&[1]), up(&[1])]));
        let b = xm.mul(&BiPoly::from_coeffs(vec![up(&[2]), up(&[0, 1])]));
        assert_eq!(a.gcd(&b), xm);
    }

    #[test]
    fn bipoly_gcd_coprime() {
        let a = BiPoly::from_coeffs(vec![up(&[1]), up(&[1])]);
        let b = BiPoly::from_coeffs(vec![up(&[0, 1]), up(&[1])]);
        assert!(a.gcd(&b).is_one());
    }
}
