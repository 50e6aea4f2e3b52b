//! The `GL_q(N)` braid R-matrix on `V ⊗ V`, its inverse, and q-trace weights.
//!
//! Tensor indices are flattened as `(i, k) -> i * N + k` with 0-based `i, k`;
//! an entry `R[(i,k),(j,l)]` maps `e_j ⊗ e_l` to a multiple of `e_i ⊗ e_k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QdcError, Result};
use crate::scalar::{Constants, Scalar};

/// Which of the two mutually inverse Hecke R-matrices plays the role of `R̂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Standard,
    Inverse,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::Inverse => "inverse",
        }
    }

    /// Sign `s` in the Hecke relation `R̂ - R̂^{-1} = s λ`.
    pub fn hecke_sign(self) -> i64 {
        match self {
            Convention::Standard => 1,
            Convention::Inverse => -1,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "inverse" => Ok(Convention::Inverse),
            other => Err(QdcError::Unknown(format!("convention {other}"))),
        }
    }
}

/// Square matrix over [`Scalar`] stored sparsely by `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(dim: usize) -> Self {
        ScalarMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar_identity(dim, &Scalar::one())
    }

    pub fn scalar_identity(dim: usize, s: &Scalar) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.entries.get(&(r, c))
    }

    pub fn set(&mut self, r: usize, c: usize, s: Scalar) {
        assert!(r < self.dim && c < self.dim, "index out of range");
        if s.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), s);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), s)| (r, c, s))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(QdcError::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (r, c, s) in other.nonzeros() {
            let v = &out.get(r, c) + s;
            out.set(r, c, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zeros(self.dim);
        for (r, c, v) in self.nonzeros() {
            out.set(r, c, v * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut rows: Vec<Vec<(usize, &Scalar)>> = vec![Vec::new(); self.dim];
        for (r, c, v) in other.nonzeros() {
            rows[r].push((c, v));
        }
        let mut out = Self::zeros(self.dim);
        for (r, k, a) in self.nonzeros() {
            for &(c, b) in &rows[k] {
                let v = &out.get(r, c) + &(a * b);
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// `A ⊗ B` with row index `r_a * dim_b + r_b`.
    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut out = Self::zeros(d);
        for (ra, ca, a) in self.nonzeros() {
            for (rb, cb, b) in other.nonzeros() {
                out.set(ra * other.dim + rb, ca * other.dim + cb, a * b);
            }
        }
        out
    }

    /// Inverse by Gauss–Jordan elimination over `Q(p, x)`.
    pub fn inverse_gauss(&self) -> Result<Self> {
        let n = self.dim;
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|r| (0..n).map(|c| self.get(r, c)).collect()).collect();
        let mut inv: Vec<Vec<Scalar>> =
            (0..n).map(|r| (0..n).map(|c| if r == c { Scalar::one() } else { Scalar::zero() }).collect()).collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| QdcError::Consistency("singular matrix".into()))?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let pinv = a[col][col].inv();
            for c in 0..n {
                a[col][c] = &a[col][c] * &pinv;
                inv[col][c] = &inv[col][c] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..n {
                    if !a[col][c].is_zero() {
                        a[r][c] = &a[r][c] - &(&f * &a[col][c]);
                    }
                    if !inv[col][c].is_zero() {
                        inv[r][c] = &inv[r][c] - &(&f * &inv[col][c]);
                    }
                }
            }
        }
        let mut out = Self::zeros(n);
        for (r, row) in inv.into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }
}

/// `R̂` together with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix {
    pub n: usize,
    pub convention: Convention,
    pub matrix: ScalarMatrix,
}

impl RMatrix {
    #[inline]
    pub fn idx(&self, i: usize, k: usize) -> usize {
        i * self.n + k
    }

    /// Entry `R[(i,k),(j,l)]`, 0-based.
    pub fn at(&self, i: usize, k: usize, j: usize, l: usize) -> Scalar {
        self.matrix.get(self.idx(i, k), self.idx(j, l))
    }

    /// JSON-ready entry list with 1-based tensor indices `[i, k, j, l, value]`.
    pub fn entry_list(&self) -> Vec<(usize, usize, usize, usize, String)> {
        self.matrix
            .nonzeros()
            .map(|(r, c, s)| (r / self.n + 1, r % self.n + 1, c / self.n + 1, c % self.n + 1, s.to_expr_string()))
            .collect()
    }
}

/// The standard Hecke R-matrix
/// `Σ_i q e_ii⊗e_ii + Σ_{i≠j} e_ij⊗e_ji + λ Σ_{i<j} e_ii⊗e_jj`,
/// or its inverse. The λ block sits at tensor index `(i, j)` with `i < j`;
/// this is the placement for which the q-trace with weights `q^{-N-1+2i}`
/// satisfies `Tr_2(D_2 R̂ X_1 R̂^{-1}) = Tr_q(X)`.
pub fn build_rhat(n: usize, convention: Convention) -> Result<RMatrix> {
    if n == 0 {
        return Err(QdcError::InvalidDimension(0));
    }
    let c = Constants::new(n)?;
    let idx = |i: usize, k: usize| i * n + k;
    let mut m = ScalarMatrix::zeros(n * n);
    for i in 0..n {
        m.set(idx(i, i), idx(i, i), c.q.clone());
        for j in 0..n {
            if i != j {
                // e_ij ⊗ e_ji : e_j ⊗ e_i -> e_i ⊗ e_j
                m.set(idx(i, j), idx(j, i), Scalar::one());
            }
            if i < j {
                m.set(idx(i, j), idx(i, j), c.lambda.clone());
            }
        }
    }
    let matrix = match convention {
        Convention::Standard => m,
        Convention::Inverse => m.sub(&ScalarMatrix::scalar_identity(n * n, &c.lambda))?,
    };
    Ok(RMatrix { n, convention, matrix })
}

/// `R̂^{-1} = R̂ - sλ` from the Hecke relation, verified by multiplication.
pub fn rhat_inverse(r: &RMatrix) -> Result<RMatrix> {
    let c = Constants::new(r.n)?;
    let shift = &c.lambda * &Scalar::from_int(r.convention.hecke_sign());
    let inv = r.matrix.sub(&ScalarMatrix::scalar_identity(r.matrix.dim(), &shift))?;
    let prod = r.matrix.mul(&inv)?;
    if prod != ScalarMatrix::identity(r.matrix.dim()) {
        return Err(QdcError::Consistency("R̂ is not Hecke: R̂ (R̂ - λ) ≠ 1".into()));
    }
    let convention = match r.convention {
        Convention::Standard => Convention::Inverse,
        Convention::Inverse => Convention::Standard,
    };
    Ok(RMatrix { n: r.n, convention, matrix: inv })
}

/// Braid Yang–Baxter residual `R12 R23 R12 - R23 R12 R23` is zero.
pub fn ybe_holds(r: &RMatrix) -> bool {
    let id = ScalarMatrix::identity(r.n);
    let r12 = r.matrix.kron(&id);
    let r23 = id.kron(&r.matrix);
    let lhs = r12.mul(&r23).and_then(|m| m.mul(&r12));
    let rhs = r23.mul(&r12).and_then(|m| m.mul(&r23));
    matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
}

/// Hecke relation `(R̂ - sλ) R̂ = 1`, i.e. `R̂² - sλR̂ - 1 = 0`.
pub fn hecke_holds(r: &RMatrix) -> bool {
    let Ok(c) = Constants::new(r.n) else { return false };
    let shift = &c.lambda * &Scalar::from_int(r.convention.hecke_sign());
    let dim = r.matrix.dim();
    let Ok(sq) = r.matrix.mul(&r.matrix) else { return false };
    let residual = sq.sub(&r.matrix.scale(&shift)).and_then(|m| m.sub(&ScalarMatrix::identity(dim)));
    matches!(residual, Ok(m) if m.is_zero())
}

pub fn check_ybe(n: usize, convention: Convention) -> bool {
    build_rhat(n, convention).map(|r| ybe_holds(&r)).unwrap_or(false)
}

pub fn check_hecke(n: usize, convention: Convention) -> bool {
    build_rhat(n, convention).map(|r| hecke_holds(&r)).unwrap_or(false)
}

/// `w_i = q^{-N-1+2i}` for `i = 1..N`.
pub fn qtrace_weights(n: usize) -> Vec<Scalar> {
    (1..=n).map(|i| Scalar::p_pow(n as i64 * (2 * i as i64 - n as i64 - 1))).collect()
}

/// Weighted trace `Σ_i w_i M_ii` over any ring with the needed operations.
pub fn qtrace<T, F>(n: usize, diag: F) -> T
where
    T: Default + std::ops::Add<Output = T>,
    F: Fn(usize, &Scalar) -> T,
{
    qtrace_weights(n).iter().enumerate().fold(T::default(), |acc, (i, w)| acc + diag(i, w))
}

/// q-trace of a scalar matrix.
pub fn qtrace_scalar(m: &ScalarMatrix, n: usize) -> Result<Scalar> {
    if m.dim() != n {
        return Err(QdcError::DimensionMismatch(format!("{}x{} matrix, N = {n}", m.dim(), m.dim())));
    }
    Ok(qtrace(n, |i, w| w * &m.get(i, i)))
}
