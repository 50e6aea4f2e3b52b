//! Exact arithmetic in the rational function field `Q(p, x)`.
//!
//! `p` is the `N`-th root of the deformation parameter (`q = p^N`), so every
//! power of `q` that shows up in the relations, including `q^{2/N} = p^2`, is
//! a plain power of `p`. `x` is the free parameter of the differential family.
//!
//! A [`Scalar`] is stored as a fraction of two integer polynomials that is
//! reduced by their gcd over `Z[p, x]`, with the leading integer coefficient
//! of the denominator (highest `x` power, then highest `p` power) positive.
//! That makes structural equality coincide with field equality.

mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use poly::{BiPoly, UPoly};

use crate::error::{QdcError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: BiPoly,
    den: BiPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: BiPoly::zero(), den: BiPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: BiPoly::one(), den: BiPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { num: BiPoly::integer(BigInt::from(n)), den: BiPoly::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar { num: BiPoly::integer(n), den: BiPoly::one() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        Scalar::from_int(n).checked_div(&Scalar::from_int(d))
    }

    /// `p^k` for any integer `k`.
    pub fn p_pow(k: i64) -> Self {
        let m = BiPoly::monomial(BigInt::one(), k.unsigned_abs() as usize, 0);
        if k >= 0 {
            Scalar { num: m, den: BiPoly::one() }
        } else {
            Scalar { num: BiPoly::one(), den: m }
        }
    }

    pub fn p() -> Self {
        Scalar::p_pow(1)
    }

    pub fn x() -> Self {
        Scalar { num: BiPoly::monomial(BigInt::one(), 0, 1), den: BiPoly::one() }
    }

    /// Build from an arbitrary fraction, normalizing it.
    pub fn from_parts(num: BiPoly, den: BiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(QdcError::DivisionByZero);
        }
        Ok(Scalar::normalized(num, den))
    }

    pub fn numerator(&self) -> &BiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_x_free(&self) -> bool {
        self.num.is_x_free() && self.den.is_x_free()
    }

    /// Plain integer value, if the scalar is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if !self.den.is_one() {
            return None;
        }
        if self.num.is_zero() {
            return Some(BigInt::zero());
        }
        match self.num.as_monomial() {
            Some((c, 0, 0)) => Some(c.clone()),
            _ => None,
        }
    }

    fn normalized(num: BiPoly, den: BiPoly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_one() {
            return Scalar { num, den };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides numerator"), den.div_exact(&g).expect("gcd divides denominator"))
        };
        if den.lead_int().is_some_and(|l| l.is_negative()) {
            num = num.neg();
            den = den.neg();
        }
        Scalar { num, den }
    }

    /// Re-normalize an arbitrary representation. Idempotent on canonical values.
    pub fn normalize(&self) -> Self {
        Scalar::normalized(self.num.clone(), self.den.clone())
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(QdcError::DivisionByZero);
        }
        let (mut num, mut den) = (self.den.clone(), self.num.clone());
        if den.lead_int().is_some_and(|l| l.is_negative()) {
            num = num.neg();
            den = den.neg();
        }
        Ok(Scalar { num, den })
    }

    pub fn inv(&self) -> Self {
        self.checked_inv().expect("inverse of zero scalar")
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.checked_inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.checked_inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    fn add_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Scalar::normalized(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_one() {
            return Scalar::normalized(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        if other.den.is_one() {
            return Scalar::normalized(other.num.mul(&self.den).add(&self.num), self.den.clone());
        }
        // a/b + c/d = (a*(d/g) + c*(b/g)) / (b*d/g)
        let g = self.den.gcd(&other.den);
        let bg = self.den.div_exact(&g).unwrap();
        let dg = other.den.div_exact(&g).unwrap();
        let num = self.num.mul(&dg).add(&other.num.mul(&bg));
        Scalar::normalized(num, bg.mul(&other.den))
    }

    fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Scalar { num: self.num.mul(&other.num), den: BiPoly::one() };
        }
        // cross-cancel before multiplying; both inputs are already reduced
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), other.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        let mut num = a.mul(&c);
        let mut den = b.mul(&d);
        if den.lead_int().is_some_and(|l| l.is_negative()) {
            num = num.neg();
            den = den.neg();
        }
        Scalar { num, den }
    }

    /// Exact value at `(p, x) = (p0, x0)`.
    ///
    /// Rejects `p0 ∈ {0, 1, -1}`, where `q` is not generic, and poles.
    pub fn eval_at(&self, p0: &BigRational, x0: &BigRational) -> Result<BigRational> {
        if p0.is_zero() || p0.abs().is_one() {
            return Err(QdcError::DegeneratePoint(p0.to_string()));
        }
        let d = self.den.eval(p0, x0);
        if d.is_zero() {
            return Err(QdcError::Pole(format!("p={p0}, x={x0}")));
        }
        Ok(self.num.eval(p0, x0) / d)
    }

    /// Canonical string in the expression grammar (`p`, `x`, integers).
    pub fn to_expr_string(&self) -> String {
        let num = fmt_bipoly(&self.num);
        if self.den.is_one() {
            return num;
        }
        let num = if self.num.term_count() > 1 { format!("({num})") } else { num };
        let den = fmt_bipoly(&self.den);
        let den = if self.den.term_count() > 1
            || self.den.as_monomial().is_some_and(|(c, i, j)| !c.is_one() && (i > 0 || j > 0))
        {
            format!("({den})")
        } else {
            den
        };
        format!("{num}/{den}")
    }
}

fn fmt_bipoly(b: &BiPoly) -> String {
    if b.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (c, i, j)) in b.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        if !mag.is_one() || (i == 0 && j == 0) {
            factors.push(mag.to_string());
        }
        match i {
            0 => {}
            1 => factors.push("p".to_string()),
            _ => factors.push(format!("p^{i}")),
        }
        match j {
            0 => {}
            1 => factors.push("x".to_string()),
            _ => factors.push(format!("x^{j}")),
        }
        out.push_str(&factors.join("*"));
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.to_expr_string())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.add_ref(&-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.mul_ref(rhs)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.mul_ref(&rhs.inv())
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// Named constants of the `GL_q(N)` calculus, all expressed in `p = q^{1/N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constants {
    pub n: usize,
    /// `q = p^N`
    pub q: Scalar,
    /// `q - q^{-1}`
    pub lambda: Scalar,
    /// `(q^N - q^{-N}) / (q - q^{-1})`
    pub n_q: Scalar,
    /// `lambda q^N (N_q + lambda q^N)^{-1}`
    pub kappa: Scalar,
}

impl Constants {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QdcError::InvalidDimension(0));
        }
        let q = Scalar::p_pow(n as i64);
        let q_inv = q.inv();
        let lambda = &q - &q_inv;
        let qn = q.pow(n as i64)?;
        let n_q = (&qn - &qn.inv()).checked_div(&lambda)?;
        let lam_qn = &lambda * &qn;
        let kappa = lam_qn.checked_div(&(&n_q + &lam_qn))?;
        Ok(Constants { n, q, lambda, n_q, kappa })
    }

    /// `q^k`
    pub fn q_pow(&self, k: i64) -> Scalar {
        Scalar::p_pow(k * self.n as i64)
    }
}
