use super::{Gen, Kind, Polynomial};
use crate::error::{QdcError, Result};
use crate::rmatrix::{qtrace_weights, ScalarMatrix};
use crate::scalar::Scalar;

/// Matrix with noncommuting polynomial entries. Products keep the left
/// factor's entries to the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { n, rows, cols, entries: vec![Polynomial::zero(n); rows * cols] }
    }

    /// Scalar multiple of the identity of size `dim`.
    pub fn scalar_identity(n: usize, dim: usize, s: &Scalar) -> Self {
        let mut m = Self::zeros(n, dim, dim);
        for i in 0..dim {
            m.set(i, i, Polynomial::constant(n, s.clone()));
        }
        m
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        Self::scalar_identity(n, dim, &Scalar::one())
    }

    /// The `N x N` matrix of generators `K[i, j]`.
    pub fn generators(n: usize, kind: Kind) -> Self {
        let mut m = Self::zeros(n, n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, Polynomial::gen(n, Gen::new(kind, i, j)));
            }
        }
        m
    }

    pub fn from_fn(n: usize, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Polynomial) -> Self {
        let mut m = Self::zeros(n, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Scalar matrix viewed as a matrix of constant polynomials.
    pub fn lift(n: usize, s: &ScalarMatrix) -> Self {
        let mut m = Self::zeros(n, s.dim(), s.dim());
        for (r, c, v) in s.nonzeros() {
            m.set(r, c, Polynomial::constant(n, v.clone()));
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        let cols = self.cols;
        self.entries[r * cols + c] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Self {
        PolyMatrix { n: self.n, rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Polynomial) -> Result<Polynomial> + Send + Sync) -> Result<Self> {
        use rayon::prelude::*;
        let entries = self.entries.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { n: self.n, rows: self.rows, cols: self.cols, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(QdcError::MixedN(self.n, other.n));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QdcError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect();
        Ok(PolyMatrix { entries, ..*self.shape() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect();
        Ok(PolyMatrix { entries, ..*self.shape() })
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|p| p.scale(s))
    }

    fn shape(&self) -> Box<PolyMatrix> {
        Box::new(PolyMatrix { n: self.n, rows: self.rows, cols: self.cols, entries: Vec::new() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(QdcError::MixedN(self.n, other.n));
        }
        if self.cols != other.rows {
            return Err(QdcError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.n, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * out.cols + c;
                    let prod = a.mul(b);
                    out.entries[idx].add_assign(&prod);
                }
            }
        }
        Ok(out)
    }

    /// Left multiplication by a scalar matrix, skipping structural zeros.
    pub fn lmul_scalar(&self, s: &ScalarMatrix) -> Result<Self> {
        if s.dim() != self.rows {
            return Err(QdcError::DimensionMismatch(format!("{} vs {} rows", s.dim(), self.rows)));
        }
        let mut out = Self::zeros(self.n, self.rows, self.cols);
        for (r, k, v) in s.nonzeros() {
            for c in 0..self.cols {
                let b = self.get(k, c);
                if !b.is_zero() {
                    out.entries[r * self.cols + c].add_scaled(v, b);
                }
            }
        }
        Ok(out)
    }

    /// Right multiplication by a scalar matrix.
    pub fn rmul_scalar(&self, s: &ScalarMatrix) -> Result<Self> {
        if s.dim() != self.cols {
            return Err(QdcError::DimensionMismatch(format!("{} cols vs {}", self.cols, s.dim())));
        }
        let mut out = Self::zeros(self.n, self.rows, self.cols);
        for (k, c, v) in s.nonzeros() {
            for r in 0..self.rows {
                let a = self.get(r, k);
                if !a.is_zero() {
                    out.entries[r * self.cols + c].add_scaled(v, a);
                }
            }
        }
        Ok(out)
    }

    fn require_square_n(&self) -> Result<()> {
        if self.rows != self.n || self.cols != self.n {
            return Err(QdcError::DimensionMismatch(format!(
                "expected {0}x{0}, got {1}x{2}",
                self.n, self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// `A ⊗ Id`: entry `((i,a),(j,b)) = δ_ab A_ij`.
    pub fn embed1(&self) -> Result<Self> {
        self.require_square_n()?;
        let n = self.n;
        let mut out = Self::zeros(n, n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for b in 0..n {
                    out.set(i * n + b, j * n + b, a.clone());
                }
            }
        }
        Ok(out)
    }

    /// `Id ⊗ A`: entry `((a,i),(b,j)) = δ_ab A_ij`.
    pub fn embed2(&self) -> Result<Self> {
        self.require_square_n()?;
        let n = self.n;
        let mut out = Self::zeros(n, n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for b in 0..n {
                    out.set(b * n + i, b * n + j, a.clone());
                }
            }
        }
        Ok(out)
    }

    /// `Σ_i q^{-N-1+2i} A_ii`
    pub fn qtrace(&self) -> Result<Polynomial> {
        self.qtrace_with(&qtrace_weights(self.n))
    }

    /// `Σ_i w_i A_ii` with explicit weights.
    pub fn qtrace_with(&self, weights: &[Scalar]) -> Result<Polynomial> {
        self.require_square_n()?;
        if weights.len() != self.n {
            return Err(QdcError::DimensionMismatch(format!("{} weights for N = {}", weights.len(), self.n)));
        }
        let mut acc = Polynomial::zero(self.n);
        for (i, w) in weights.iter().enumerate() {
            acc.add_scaled(w, self.get(i, i));
        }
        Ok(acc)
    }

    /// Anticommutator `AB + BA` of matrices.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, usize)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, usize)>) {
        let n = used.len();
        if prefix.len() == n {
            let inv =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| prefix[i] > prefix[j]).count();
            out.push((prefix.clone(), inv));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn qdet_impl(m: &PolyMatrix, columns: bool) -> Result<Polynomial> {
    if m.rows != m.cols {
        return Err(QdcError::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let n = m.n;
    let d = m.rows;
    // −q where q = p^N
    let mq = -Scalar::p_pow(n as i64);
    let mut acc = Polynomial::zero(n);
    for (sigma, inversions) in permutations(d) {
        let mut prod = Polynomial::constant(n, mq.pow(inversions as i64)?);
        for (i, &s) in sigma.iter().enumerate() {
            let e = if columns { m.get(s, i) } else { m.get(i, s) };
            prod = prod.mul(e);
            if prod.is_zero() {
                break;
            }
        }
        acc.add_assign(&prod);
    }
    Ok(acc)
}

/// Row-ordered q-determinant `Σ_σ (-q)^{ℓ(σ)} M_{1σ(1)} ... M_{Nσ(N)}`.
pub fn qdet(m: &PolyMatrix) -> Result<Polynomial> {
    qdet_impl(m, false)
}

/// Column-ordered variant `Σ_σ (-q)^{ℓ(σ)} M_{σ(1)1} ... M_{σ(N)N}`.
pub fn qdet_columns(m: &PolyMatrix) -> Result<Polynomial> {
    qdet_impl(m, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::{build_rhat, Convention};
    use crate::scalar::Constants;

    fn g(kind: Kind, i: usize, j: usize) -> Polynomial {
        Polynomial::gen(2, Gen::new(kind, i - 1, j - 1))
    }

    #[test]
    fn embed1_is_tensor_with_identity() {
        let l = PolyMatrix::generators(2, Kind::L);
        let e = l.embed1().unwrap();
        for (i, a, j, b) in itertools_product() {
            let expected = if a == b { g(Kind::L, i + 1, j + 1) } else { Polynomial::zero(2) };
            assert_eq!(*e.get(i * 2 + a, j * 2 + b), expected);
        }
        let e2 = l.embed2().unwrap();
        for (a, i, b, j) in itertools_product() {
            let expected = if a == b { g(Kind::L, i + 1, j + 1) } else { Polynomial::zero(2) };
            assert_eq!(*e2.get(a * 2 + i, b * 2 + j), expected);
        }
    }

    fn itertools_product() -> Vec<(usize, usize, usize, usize)> {
        let mut v = Vec::new();
        for i in 0..2 {
            for a in 0..2 {
                for j in 0..2 {
                    for b in 0..2 {
                        v.push((i, a, j, b));
                    }
                }
            }
        }
        v
    }

    #[test]
    fn rtt_has_sixteen_components() {
        let r = build_rhat(2, Convention::Standard).unwrap();
        let t = PolyMatrix::generators(2, Kind::T);
        let t1 = t.embed1().unwrap();
        let t2 = t.embed2().unwrap();
        let t1t2 = t1.mul(&t2).unwrap();
        let rel = t1t2.lmul_scalar(&r.matrix).unwrap().sub(&t1t2.rmul_scalar(&r.matrix).unwrap()).unwrap();
        assert_eq!(rel.entries().len(), 16);
    }

    #[test]
    fn lifted_multiplication_matches_scalar_path() {
        let r = build_rhat(2, Convention::Standard).unwrap();
        let t1 = PolyMatrix::generators(2, Kind::T).embed1().unwrap();
        let lifted = PolyMatrix::lift(2, &r.matrix);
        assert_eq!(lifted.mul(&t1).unwrap(), t1.lmul_scalar(&r.matrix).unwrap());
        assert_eq!(t1.mul(&lifted).unwrap(), t1.rmul_scalar(&r.matrix).unwrap());
    }

    #[test]
    fn qdet_small_cases() {
        let t1 = PolyMatrix::generators(1, Kind::T);
        assert_eq!(qdet(&t1).unwrap(), Polynomial::gen(1, Gen::new(Kind::T, 0, 0)));
        let t = PolyMatrix::generators(2, Kind::T);
        let q = Constants::new(2).unwrap().q;
        let expected = g(Kind::T, 1, 1).mul(&g(Kind::T, 2, 2)).sub(&g(Kind::T, 1, 2).mul(&g(Kind::T, 2, 1)).scale(&q));
        assert_eq!(qdet(&t).unwrap(), expected);
        let expected_cols =
            g(Kind::T, 1, 1).mul(&g(Kind::T, 2, 2)).sub(&g(Kind::T, 2, 1).mul(&g(Kind::T, 1, 2)).scale(&q));
        assert_eq!(qdet_columns(&t).unwrap(), expected_cols);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn qtrace_of_om_l_at_two() {
        let om = PolyMatrix::generators(2, Kind::OmL);
        let tr = om.qtrace().unwrap();
        let expected = g(Kind::OmL, 1, 1).scale(&Scalar::p_pow(-2)).add(&g(Kind::OmL, 2, 2).scale(&Scalar::p_pow(2)));
        assert_eq!(tr, expected);
    }

    #[test]
    fn shape_errors() {
        let a = PolyMatrix::zeros(2, 2, 3);
        let b = PolyMatrix::zeros(2, 2, 3);
        assert!(a.mul(&b).is_err());
        assert!(a.embed1().is_err());
        assert!(a.qtrace().is_err());
        assert!(PolyMatrix::zeros(3, 3, 3).add(&PolyMatrix::zeros(2, 3, 3)).is_err());
    }
}
