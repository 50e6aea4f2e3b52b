//! Generator/relation systems for the `GL_q(N)` differential algebra in its
//! original basis (`swz`), in the L-basis (`lbasis`), and for the traceless
//! `SL_q(N)` subalgebra (`fp`), plus the quantum matrix algebra `frt_T`.
//!
//! Matrix relations are written with subscript-1 embeddings `X ⊗ 1` and
//! expanded into their `N^4` components. Each component list is tagged with a
//! stable family identifier such as `eq-zum-TT` or `eq-ss3`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QdcError, Result};
use crate::ncalg::{qdet, Gen, Kind, PolyMatrix, Polynomial, Word};
use crate::rewrite::{orient_relations, Relation, RuleSet};
use crate::rmatrix::{build_rhat, qtrace_weights, rhat_inverse, Convention, ScalarMatrix};
use crate::scalar::{Constants, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresentationName {
    FrtT,
    Swz,
    Lbasis,
    Fp,
}

impl PresentationName {
    pub const ALL: [PresentationName; 4] =
        [PresentationName::FrtT, PresentationName::Swz, PresentationName::Lbasis, PresentationName::Fp];

    pub fn as_str(self) -> &'static str {
        match self {
            PresentationName::FrtT => "frt_T",
            PresentationName::Swz => "swz",
            PresentationName::Lbasis => "lbasis",
            PresentationName::Fp => "fp",
        }
    }

    pub fn kinds(self) -> &'static [Kind] {
        match self {
            PresentationName::FrtT => &[Kind::T],
            PresentationName::Swz => &[Kind::T, Kind::L, Kind::Om, Kind::Im],
            PresentationName::Lbasis => &[Kind::T, Kind::L, Kind::OmL, Kind::ImL],
            PresentationName::Fp => &[Kind::T, Kind::L, Kind::OmT, Kind::ImL],
        }
    }
}

impl fmt::Display for PresentationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PresentationName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for PresentationName {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Self> {
        PresentationName::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| QdcError::Unknown(format!("presentation {s}")))
    }
}

/// Single-coefficient perturbations used as negative controls: each one
/// multiplies a single constant by `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutation {
    /// `κ_q -> q κ_q`
    Kappa,
    /// one swap entry of `R̂` scaled by `q`
    Rhat,
    /// `1/N_q -> q/N_q` in the traceless projector
    Projector,
    /// the scalar term `κ_q/(λ(1-κ_q))` of the `ℑ^L Ω̃` relation scaled by `q`
    Ss4Constant,
    /// first q-trace weight scaled by `q`
    QtraceWeights,
}

impl Mutation {
    pub const ALL: [Mutation; 5] =
        [Mutation::Kappa, Mutation::Rhat, Mutation::Projector, Mutation::Ss4Constant, Mutation::QtraceWeights];

    pub fn as_str(self) -> &'static str {
        match self {
            Mutation::Kappa => "kappa",
            Mutation::Rhat => "rhat",
            Mutation::Projector => "projector",
            Mutation::Ss4Constant => "ss4-constant",
            Mutation::QtraceWeights => "qtrace-weights",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mutation {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| QdcError::Unknown(format!("mutation {s}")))
    }
}

/// R-matrices, q-trace weights and named constants for one `(N, convention)`,
/// optionally perturbed by a [`Mutation`].
#[derive(Clone, Debug)]
pub struct Context {
    pub n: usize,
    pub convention: Convention,
    pub mutation: Option<Mutation>,
    pub consts: Constants,
    pub r: ScalarMatrix,
    pub r_inv: ScalarMatrix,
    pub weights: Vec<Scalar>,
    /// coefficient of `Tr_q Ω^L` in the traceless projector, `1/N_q`
    pub projector: Scalar,
    /// scalar term of the `ℑ^L Ω̃` relation, `κ_q/(λ(1-κ_q))`
    pub ss4_constant: Scalar,
}

impl Context {
    pub fn new(n: usize, convention: Convention) -> Result<Self> {
        Self::with_mutation(n, convention, None)
    }

    pub fn with_mutation(n: usize, convention: Convention, mutation: Option<Mutation>) -> Result<Self> {
        let rhat = build_rhat(n, convention)?;
        let mut consts = Constants::new(n)?;
        let q = consts.q.clone();
        let mut r = rhat.matrix.clone();
        let mut r_inv = rhat_inverse(&rhat)?.matrix;
        let mut weights = qtrace_weights(n);
        let mut projector = consts.n_q.inv();
        let k = &consts.kappa;
        let mut ss4_constant = k / &(&consts.lambda * &(&Scalar::one() - k));
        match mutation {
            None => {}
            Some(Mutation::Kappa) => consts.kappa = &consts.kappa * &q,
            Some(Mutation::Rhat) => {
                if n < 2 {
                    return Err(QdcError::Unavailable("rhat mutation".into(), n));
                }
                let (a, b) = (rhat.idx(0, 1), rhat.idx(1, 0));
                r.set(a, b, &r.get(a, b) * &q);
                r_inv = r.inverse_gauss()?;
            }
            Some(Mutation::Projector) => projector = &projector * &q,
            Some(Mutation::Ss4Constant) => ss4_constant = &ss4_constant * &q,
            Some(Mutation::QtraceWeights) => weights[0] = &weights[0] * &q,
        }
        Ok(Context { n, convention, mutation, consts, r, r_inv, weights, projector, ss4_constant })
    }

    pub fn gens(&self, kind: Kind) -> PolyMatrix {
        PolyMatrix::generators(self.n, kind)
    }

    pub fn identity(&self) -> PolyMatrix {
        PolyMatrix::identity(self.n, self.n)
    }

    /// `s · 1` on `C^N ⊗ C^N`.
    pub fn scalar2(&self, s: &Scalar) -> PolyMatrix {
        PolyMatrix::scalar_identity(self.n, self.n * self.n, s)
    }

    pub fn lift(&self, s: &ScalarMatrix) -> PolyMatrix {
        PolyMatrix::lift(self.n, s)
    }

    pub fn qtrace(&self, m: &PolyMatrix) -> Result<Polynomial> {
        m.qtrace_with(&self.weights)
    }
}

/// Factor in a product of `N^2 x N^2` matrices.
#[derive(Clone, Copy)]
pub enum F<'a> {
    S(&'a ScalarMatrix),
    P(&'a PolyMatrix),
}

/// Ordered product of scalar and operator matrices.
pub fn chain(n: usize, factors: &[F<'_>]) -> Result<PolyMatrix> {
    let dim = match factors.first() {
        Some(F::S(s)) => s.dim(),
        Some(F::P(p)) => p.rows(),
        None => return Err(QdcError::DimensionMismatch("empty product".into())),
    };
    let mut acc = PolyMatrix::identity(n, dim);
    for f in factors {
        acc = match f {
            F::S(s) => acc.rmul_scalar(s)?,
            F::P(p) => acc.mul(p)?,
        };
    }
    Ok(acc)
}

/// A relation family and its nonzero components.
#[derive(Clone, Debug)]
pub struct Family {
    pub id: String,
    pub components: Vec<Polynomial>,
}

impl Family {
    fn from_matrix(id: &str, m: &PolyMatrix) -> Self {
        Family { id: id.to_string(), components: m.entries().iter().filter(|p| !p.is_zero()).cloned().collect() }
    }
}

/// Relation families of a presentation as `lhs - rhs` matrices.
pub fn family_matrices(name: PresentationName, ctx: &Context) -> Result<Vec<(String, PolyMatrix)>> {
    let n = ctx.n;
    let (r, ri) = (&ctx.r, &ctx.r_inv);
    let t = ctx.gens(Kind::T);
    let (t1, t2) = (t.embed1()?, t.embed2()?);
    let tt = chain(n, &[F::S(r), F::P(&t1), F::P(&t2)])?.sub(&chain(n, &[F::P(&t1), F::P(&t2), F::S(r)])?)?;
    let (om_kind, im_kind, tag) = match name {
        PresentationName::FrtT => return Ok(vec![("eq-zum-TT".into(), tt)]),
        PresentationName::Swz => (Kind::Om, Kind::Im, "zum"),
        PresentationName::Lbasis => (Kind::OmL, Kind::ImL, "s2"),
        PresentationName::Fp => (Kind::OmT, Kind::ImL, "s2p"),
    };
    let l = ctx.gens(Kind::L);
    let (l1, l2) = (l.embed1()?, l.embed2()?);
    let om = ctx.gens(om_kind);
    let (o1, o2) = (om.embed1()?, om.embed2()?);
    let im = ctx.gens(im_kind);
    let (i1, i2) = (im.embed1()?, im.embed2()?);

    // R X R Y - Y R X R, the reflection-type exchange with L
    let rlr = chain(n, &[F::S(r), F::P(&l1), F::S(r)])?;
    let exchange = |y: &PolyMatrix| -> Result<PolyMatrix> { rlr.mul(y)?.sub(&y.mul(&rlr)?) };
    // A X B X + X C X D
    let quad = |x: &PolyMatrix,
                a: &ScalarMatrix,
                b: &ScalarMatrix,
                c: &ScalarMatrix,
                d: &ScalarMatrix|
     -> Result<PolyMatrix> {
        chain(n, &[F::S(a), F::P(x), F::S(b), F::P(x)])?.add(&chain(n, &[F::P(x), F::S(c), F::P(x), F::S(d)])?)
    };
    // T_1 Y_2 - A Y_1 B T_1
    let t_exchange = |y1: &PolyMatrix, y2: &PolyMatrix, a: &ScalarMatrix, b: &ScalarMatrix| -> Result<PolyMatrix> {
        t1.mul(y2)?.sub(&chain(n, &[F::S(a), F::P(y1), F::S(b), F::P(&t1)])?)
    };
    // Y_1 A X_1 B + C X_1 D Y_1
    let pairing =
        |y: &PolyMatrix, x: &PolyMatrix, a: &ScalarMatrix, b: &ScalarMatrix, c: &ScalarMatrix, d: &ScalarMatrix| {
            chain(n, &[F::P(y), F::S(a), F::P(x), F::S(b)])?.add(&chain(n, &[F::S(c), F::P(x), F::S(d), F::P(y)])?)
        };

    let mut out = vec![(format!("eq-{tag}-TT"), tt)];
    let tl = t1.mul(&l2)?;
    let tl = if name == PresentationName::Swz { tl } else { tl.scale(&Scalar::p_pow(2)) };
    out.push((format!("eq-{tag}-TL"), tl.sub(&rlr.mul(&t1)?)?));
    if name == PresentationName::Swz {
        out.push(("eq-zum-TOm".into(), t_exchange(&o1, &o2, ri, ri)?));
        out.push(("eq-zum-OmOm".into(), quad(&o1, ri, ri, ri, r)?));
        out.push(("eq-zum-LL".into(), exchange(&l1)?));
        out.push(("eq-zum-LOm".into(), exchange(&o1)?));
        out.push(("eq-8.61-TIm".into(), t_exchange(&i1, &i2, r, r)?));
        out.push(("eq-8.61-ImOm".into(), pairing(&i1, &o1, ri, ri, ri, ri)?.add(&ctx.lift(ri))?));
        out.push(("eq-8.61-LIm".into(), exchange(&i1)?));
        out.push(("eq-8.61-ImIm".into(), quad(&i1, r, r, r, ri)?));
        return Ok(out);
    }
    out.push((format!("eq-{tag}-TOm"), t_exchange(&o1, &o2, r, ri)?));
    let omom = quad(&o1, r, r, r, ri)?;
    if name == PresentationName::Lbasis {
        out.push(("eq-s2-OmOm".into(), omom));
    } else {
        let sq1 = om.mul(&om)?.embed1()?;
        let rhs = sq1.add(&chain(n, &[F::S(r), F::P(&sq1), F::S(r)])?)?.scale(&ctx.consts.kappa);
        out.push(("eq-s2pp".into(), omom.sub(&rhs)?));
    }
    out.push((format!("eq-{tag}-LL"), exchange(&l1)?));
    out.push((format!("eq-{tag}-LOm"), exchange(&o1)?));
    out.push(("eq-s3-TIm".into(), t_exchange(&i1, &i2, r, ri)?));
    out.push(("eq-s3-ImIm".into(), quad(&i1, r, ri, ri, ri)?));
    out.push(("eq-s3-LIm".into(), exchange(&i1)?));
    let pair = pairing(&i1, &o1, ri, r, r, ri)?.add(&ctx.lift(r))?;
    if name == PresentationName::Lbasis {
        out.push(("eq-ss3".into(), pair));
    } else {
        out.push(("eq-ss4".into(), pair.sub(&ctx.scalar2(&ctx.ss4_constant))?));
    }
    Ok(out)
}

/// The linear relation `Tr_q Ω̃ = 0` solved for `Ω̃_NN`.
pub fn trace_elimination(ctx: &Context) -> (Gen, Polynomial) {
    let n = ctx.n;
    let w = &ctx.weights;
    let last = Gen::new(Kind::OmT, n - 1, n - 1);
    let inv = w[n - 1].inv();
    let mut img = Polynomial::zero(n);
    for (i, wi) in w.iter().enumerate().take(n - 1) {
        img.add_term(Word::single(Gen::new(Kind::OmT, i, i)), -&(wi * &inv));
    }
    (last, img)
}

/// Generator/relation system with its compiled rule set.
#[derive(Debug)]
pub struct Presentation {
    pub name: PresentationName,
    pub ctx: Context,
    /// Independent generators (eliminated ones excluded).
    pub generators: Vec<Gen>,
    /// Generators removed by a linear relation, with their images.
    pub eliminated: Vec<(Gen, Polynomial)>,
    pub families: Vec<Family>,
    pub rules: RuleSet,
    /// Irreducible degree-2 words.
    pub good_words: Vec<Word>,
}

impl Presentation {
    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial> {
        self.rules.reduce(p)
    }

    pub fn relations(&self) -> Vec<Relation> {
        self.families
            .iter()
            .flat_map(|f| f.components.iter().map(move |c| Relation::new(c.clone(), f.id.clone())))
            .collect()
    }

    /// Rank of each family's component system taken on its own.
    pub fn family_ranks(&self) -> Result<Vec<(String, usize)>> {
        self.families
            .iter()
            .map(|f| {
                let rels: Vec<_> = f.components.iter().map(|c| Relation::new(c.clone(), f.id.clone())).collect();
                Ok((f.id.clone(), orient_relations(self.n(), &rels, &[])?.rank))
            })
            .collect()
    }
}

pub fn presentation(name: PresentationName, n: usize, convention: Convention) -> Result<Presentation> {
    if n == 0 || n > Gen::MAX_INDEX + 1 {
        return Err(QdcError::InvalidDimension(n));
    }
    presentation_in(name, Context::new(n, convention)?)
}

/// Build a presentation over a given (possibly mutated) context.
pub fn presentation_in(name: PresentationName, ctx: Context) -> Result<Presentation> {
    let n = ctx.n;
    if n < 2 && name != PresentationName::FrtT {
        return Err(QdcError::Unavailable(name.to_string(), n));
    }
    let mut generators: Vec<Gen> = Vec::new();
    for &k in name.kinds() {
        for i in 0..n {
            for j in 0..n {
                generators.push(Gen::new(k, i, j));
            }
        }
    }
    generators.sort();
    let mut eliminated = Vec::new();
    if name == PresentationName::Fp {
        let (g, img) = trace_elimination(&ctx);
        generators.retain(|&x| x != g);
        eliminated.push((g, img));
    }
    let table: HashMap<Gen, Polynomial> = eliminated.iter().cloned().collect();
    let mut families = Vec::new();
    for (id, m) in family_matrices(name, &ctx)? {
        let m = if table.is_empty() { m } else { m.try_map(|p| p.substitute(&table))? };
        families.push(Family::from_matrix(&id, &m));
    }
    let mut relations: Vec<Relation> = families
        .iter()
        .flat_map(|f| f.components.iter().map(move |c| Relation::new(c.clone(), f.id.clone())))
        .collect();
    for (g, img) in &eliminated {
        relations.push(Relation::new(Polynomial::gen(n, *g).sub(img), "eq-isa1-trace"));
    }
    let oriented = orient_relations(n, &relations, &generators).map_err(|e| match e {
        QdcError::Unorientable { family, reason } => {
            QdcError::Unorientable { family: format!("{name}/{family}"), reason }
        }
        other => other,
    })?;
    Ok(Presentation {
        name,
        ctx,
        generators,
        eliminated,
        families,
        rules: oriented.rules,
        good_words: oriented.good_words,
    })
}

/// Composite symbols built from the generators.
#[derive(Clone, Debug)]
pub struct DefinedSymbols {
    pub n: usize,
    /// `Ω^L - (1/N_q) Tr_q(Ω^L) 1`
    pub om_tilde: PolyMatrix,
    /// `Tr_q Ω^L`
    pub tr_om_l: Polynomial,
    /// `L (1 - λ Ω ℑ)`, i.e. `W L` in the original basis
    pub wl: PolyMatrix,
    /// `Ω (1 + x W L)`
    pub om_x: PolyMatrix,
    /// `(q^N / λ) Tr_q(Ω + x Ω W L)`
    pub xi_x: Polynomial,
    /// `1 - λ Ω^L ℑ^L`
    pub w: PolyMatrix,
    /// `1 - λ ℑ^L Ω^L`
    pub w_bar: PolyMatrix,
    pub det_t: Polynomial,
}

pub fn defined_symbols(ctx: &Context) -> Result<DefinedSymbols> {
    let n = ctx.n;
    let c = &ctx.consts;
    let one = ctx.identity();
    let om_l = ctx.gens(Kind::OmL);
    let im_l = ctx.gens(Kind::ImL);
    let tr_om_l = ctx.qtrace(&om_l)?;
    let shift = tr_om_l.scale(&ctx.projector);
    let om_tilde =
        PolyMatrix::from_fn(n, n, n, |i, j| if i == j { om_l.get(i, j).sub(&shift) } else { om_l.get(i, j).clone() });
    let om = ctx.gens(Kind::Om);
    let im = ctx.gens(Kind::Im);
    let l = ctx.gens(Kind::L);
    let wl = l.mul(&one.sub(&om.mul(&im)?.scale(&c.lambda))?)?;
    let om_x = om.mul(&one.add(&wl.scale(&Scalar::x()))?)?;
    let xi_x = ctx.qtrace(&om_x)?.scale(&(&c.q_pow(n as i64) / &c.lambda));
    let w = one.sub(&om_l.mul(&im_l)?.scale(&c.lambda))?;
    let w_bar = one.sub(&im_l.mul(&om_l)?.scale(&c.lambda))?;
    let det_t = qdet(&ctx.gens(Kind::T))?;
    Ok(DefinedSymbols { n, om_tilde, tr_om_l, wl, om_x, xi_x, w, w_bar, det_t })
}

/// Substitution `Ω̃_ij -> Ω̃_ij(Ω^L)`.
pub fn om_tilde_table(sym: &DefinedSymbols) -> HashMap<Gen, Polynomial> {
    let n = sym.n;
    let mut t = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            t.insert(Gen::new(Kind::OmT, i, j), sym.om_tilde.get(i, j).clone());
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frt_t_n1_has_no_relations() {
        let p = presentation(PresentationName::FrtT, 1, Convention::Standard).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert!(p.rules.is_empty());
    }

    #[test]
    fn differential_presentations_need_n2() {
        assert!(matches!(presentation(PresentationName::Swz, 1, Convention::Standard), Err(QdcError::Unavailable(..))));
    }

    #[test]
    fn fp_eliminates_last_diagonal_form() {
        let ctx = Context::new(2, Convention::Standard).unwrap();
        let (g, img) = trace_elimination(&ctx);
        assert_eq!(g, Gen::new(Kind::OmT, 1, 1));
        // q^-1 Ω̃11 + q Ω̃22 = 0
        assert_eq!(img.to_string(), "-(1/p^4)*OmT[1,1]");
    }

    #[test]
    fn symbols_at_two() {
        let ctx = Context::new(2, Convention::Standard).unwrap();
        let s = defined_symbols(&ctx).unwrap();
        assert_eq!(s.tr_om_l.to_string(), "p^2*OmL[2,2] + (1/p^2)*OmL[1,1]");
        assert_eq!(s.w_bar.get(0, 1).len(), 2);
        assert_eq!(s.w_bar.get(0, 0).len(), 3);
        // Ω̃11 = (1 - q^-1/N_q) Ω^L11 - (q/N_q) Ω^L22
        let nq = &ctx.consts.n_q;
        let a = &Scalar::one() - &(&Scalar::p_pow(-2) / nq);
        let b = -&(&Scalar::p_pow(2) / nq);
        let expect = Polynomial::gen(2, Gen::new(Kind::OmL, 0, 0))
            .scale(&a)
            .add(&Polynomial::gen(2, Gen::new(Kind::OmL, 1, 1)).scale(&b));
        assert_eq!(s.om_tilde.get(0, 0), &expect);
    }

    #[test]
    fn xi_at_x_zero() {
        let ctx = Context::new(2, Convention::Standard).unwrap();
        let s = defined_symbols(&ctx).unwrap();
        let c = &ctx.consts;
        let xi0 = ctx.qtrace(&ctx.gens(Kind::Om)).unwrap().scale(&(&c.q_pow(2) / &c.lambda));
        let rest = s.xi_x.sub(&xi0);
        assert!(!rest.is_zero());
        assert!(rest.terms().all(|(_, k)| k.numerator().x_valuation() >= 1));
    }

    #[test]
    fn fp_has_n2_minus_one_forms() {
        for n in [2, 3] {
            let p = presentation(PresentationName::Fp, n, Convention::Standard).unwrap();
            let forms = p.generators.iter().filter(|g| g.kind() == Kind::OmT).count();
            assert_eq!(forms, n * n - 1);
        }
    }

    #[test]
    fn mutations_change_their_parameter_only() {
        let base = Context::new(2, Convention::Standard).unwrap();
        for m in Mutation::ALL {
            let c = Context::with_mutation(2, Convention::Standard, Some(m)).unwrap();
            let changed = [
                c.consts.kappa != base.consts.kappa,
                c.r != base.r,
                c.projector != base.projector,
                c.ss4_constant != base.ss4_constant,
                c.weights != base.weights,
            ];
            assert_eq!(changed.iter().filter(|&&b| b).count(), 1, "{m}");
            assert_eq!(m.as_str().parse::<Mutation>().unwrap(), m);
        }
    }
}
