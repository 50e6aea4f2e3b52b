//! Named verification checks. Each check builds the relevant matrix
//! identity, reduces every component in the appropriate presentation and
//! passes iff all components reduce to zero; otherwise the first nonzero
//! normal form is reported as witness.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QdcError, Result};
use crate::ncalg::{Kind, PolyMatrix, Polynomial};
use crate::presentations::{
    chain, defined_symbols, family_matrices, om_tilde_table, presentation_in, Context, DefinedSymbols, Mutation,
    Presentation, PresentationName, F,
};
use crate::rewrite::{overlap_check, Strategy};
use crate::rmatrix::{Convention, ScalarMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    YbeHecke,
    QtraceTraceless,
    DetqCentral,
    PbwOverlaps,
    HelperIdentities,
    FpEmbedding,
    OmegaXRelation,
    XiNilpotent,
    LeibnizClosure,
    WRelations,
    WwRelation,
    WwbarIdentity,
    OmegaLBasisChange,
}

impl Check {
    pub const ALL: [Check; 13] = [
        Check::YbeHecke,
        Check::QtraceTraceless,
        Check::DetqCentral,
        Check::PbwOverlaps,
        Check::HelperIdentities,
        Check::FpEmbedding,
        Check::OmegaXRelation,
        Check::XiNilpotent,
        Check::LeibnizClosure,
        Check::WRelations,
        Check::WwRelation,
        Check::WwbarIdentity,
        Check::OmegaLBasisChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::YbeHecke => "ybe_hecke",
            Check::QtraceTraceless => "qtrace_traceless",
            Check::DetqCentral => "detq_central",
            Check::PbwOverlaps => "pbw_overlaps",
            Check::HelperIdentities => "helper_identities",
            Check::FpEmbedding => "fp_embedding",
            Check::OmegaXRelation => "omega_x_relation",
            Check::XiNilpotent => "xi_nilpotent",
            Check::LeibnizClosure => "leibniz_closure",
            Check::WRelations => "w_relations",
            Check::WwRelation => "ww_relation",
            Check::WwbarIdentity => "wwbar_identity",
            Check::OmegaLBasisChange => "omegaL_basis_change",
        }
    }

    /// `C1` … `C13`.
    pub fn code(self) -> String {
        format!("C{}", self as usize + 1)
    }

    /// Checks that default to N = 2 only and need opting in above that.
    pub fn heavy(self) -> bool {
        matches!(self, Check::OmegaXRelation | Check::WRelations | Check::WwRelation | Check::WwbarIdentity)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s || c.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| QdcError::Unknown(format!("check {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Matrix,
    Swz,
    Lbasis,
    FpEmbed,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::All, Suite::Matrix, Suite::Swz, Suite::Lbasis, Suite::FpEmbed];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Matrix => "matrix",
            Suite::Swz => "swz",
            Suite::Lbasis => "lbasis",
            Suite::FpEmbed => "fp-embed",
        }
    }

    pub fn checks(self) -> Vec<Check> {
        use Check::*;
        match self {
            Suite::All => Check::ALL.to_vec(),
            Suite::Matrix => vec![YbeHecke, QtraceTraceless, DetqCentral],
            Suite::Swz => vec![PbwOverlaps, OmegaXRelation, XiNilpotent, LeibnizClosure, OmegaLBasisChange],
            Suite::Lbasis => vec![PbwOverlaps, HelperIdentities, WRelations, WwRelation, WwbarIdentity],
            Suite::FpEmbed => vec![HelperIdentities, FpEmbedding, OmegaLBasisChange],
        }
    }

    /// Presentations whose overlaps `pbw_overlaps` examines in this suite.
    pub fn overlap_targets(self) -> Vec<PresentationName> {
        match self {
            Suite::Swz => vec![PresentationName::Swz],
            Suite::Lbasis => vec![PresentationName::Lbasis, PresentationName::Fp],
            _ => PresentationName::ALL.to_vec(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = QdcError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.iter().copied().find(|x| x.as_str() == s).ok_or_else(|| QdcError::Unknown(format!("suite {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub status: Status,
    /// Nonzero normal form that refutes the identity.
    pub witness: Option<String>,
    /// Which component or sub-identity the witness belongs to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    #[serde(skip)]
    pub witness_poly: Option<Polynomial>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    fn skip(check: Check, n: usize, reason: String) -> Self {
        CheckResult {
            name: check.name().into(),
            n,
            status: Status::Skip,
            witness: None,
            component: None,
            reason: Some(reason),
            millis: None,
            witness_poly: None,
            elapsed: Duration::ZERO,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub convention: Convention,
    pub mutation: Option<Mutation>,
    pub strategy: Strategy,
    pub budget: Option<Duration>,
    /// Run C7 and C10–C12 above N = 2.
    pub heavy: bool,
    /// Report elapsed milliseconds (makes reports run-dependent).
    pub timings: bool,
    /// Word length up to which `pbw_overlaps` resolves critical pairs.
    pub max_degree: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            convention: Convention::Standard,
            mutation: None,
            strategy: Strategy::Insertion,
            budget: None,
            heavy: false,
            timings: false,
            max_degree: 3,
        }
    }
}

/// Cooperative deadline shared by every check of a run.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    cancelled: Arc<AtomicBool>,
}

impl Budget {
    pub fn new(limit: Option<Duration>) -> Self {
        Budget { deadline: limit.map(|d| Instant::now() + d), cancelled: Arc::new(AtomicBool::new(false)) }
    }

    pub fn cancel(&self) {
        self.cancelled.store(true, Ordering::Relaxed);
    }

    pub fn check(&self) -> Result<()> {
        if self.cancelled.load(Ordering::Relaxed) || self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(QdcError::BudgetExceeded);
        }
        Ok(())
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }
}

type Shared = OnceLock<std::result::Result<Presentation, QdcError>>;

/// Lazily built presentations and symbols for one run.
pub struct Workspace {
    pub ctx: Context,
    pub options: RunOptions,
    pub budget: Budget,
    frt: Shared,
    swz: Shared,
    lbasis: Shared,
    fp: Shared,
    symbols: OnceLock<std::result::Result<DefinedSymbols, QdcError>>,
}

impl Workspace {
    pub fn new(n: usize, options: RunOptions) -> Result<Self> {
        if n == 0 {
            return Err(QdcError::InvalidDimension(0));
        }
        let ctx = Context::with_mutation(n, options.convention, options.mutation)?;
        let budget = Budget::new(options.budget);
        Ok(Workspace {
            ctx,
            options,
            budget,
            frt: OnceLock::new(),
            swz: OnceLock::new(),
            lbasis: OnceLock::new(),
            fp: OnceLock::new(),
            symbols: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn presentation(&self, name: PresentationName) -> Result<&Presentation> {
        let slot = match name {
            PresentationName::FrtT => &self.frt,
            PresentationName::Swz => &self.swz,
            PresentationName::Lbasis => &self.lbasis,
            PresentationName::Fp => &self.fp,
        };
        slot.get_or_init(|| {
            self.budget.check()?;
            presentation_in(name, self.ctx.clone())
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    pub fn symbols(&self) -> Result<&DefinedSymbols> {
        self.symbols.get_or_init(|| defined_symbols(&self.ctx)).as_ref().map_err(Clone::clone)
    }
}

/// Outcome of a single check body.
enum Outcome {
    Pass,
    Fail { component: String, witness: Polynomial },
}

/// Reduces matrices and polynomials in one presentation under the run's
/// strategy and budget.
struct Reducer<'a> {
    pres: &'a Presentation,
    strategy: Strategy,
    budget: &'a Budget,
}

impl Reducer<'_> {
    fn poly(&self, p: &Polynomial) -> Result<Polynomial> {
        self.budget.check()?;
        self.pres.rules.reduce_with(p, self.strategy)
    }

    fn matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix> {
        m.try_map(|p| self.poly(p))
    }

    /// Product of factors, reducing after every operator multiplication.
    fn chain(&self, factors: &[F<'_>]) -> Result<PolyMatrix> {
        let n = self.pres.n();
        let mut acc: Option<PolyMatrix> = None;
        for f in factors {
            acc = Some(match (acc, f) {
                (None, f) => chain(n, &[*f])?,
                (Some(a), F::S(s)) => a.rmul_scalar(s)?,
                (Some(a), F::P(p)) => self.matrix(&a.mul(p)?)?,
            });
        }
        acc.ok_or_else(|| QdcError::DimensionMismatch("empty product".into()))
    }

    /// First nonzero component of the reduced matrix, labelled by its index.
    fn zero_matrix(&self, label: &str, m: &PolyMatrix) -> Result<Outcome> {
        let red = self.matrix(m)?;
        let dim = red.cols();
        Ok(match red.entries().iter().position(|p| !p.is_zero()) {
            None => Outcome::Pass,
            Some(k) => Outcome::Fail {
                component: component_label(label, self.pres.n(), k / dim, k % dim, red.rows() > self.pres.n()),
                witness: red.entries()[k].clone(),
            },
        })
    }

    fn zero_poly(&self, label: &str, p: &Polynomial) -> Result<Outcome> {
        let red = self.poly(p)?;
        Ok(if red.is_zero() { Outcome::Pass } else { Outcome::Fail { component: label.into(), witness: red } })
    }
}

fn component_label(label: &str, n: usize, r: usize, c: usize, tensor: bool) -> String {
    if tensor {
        format!("{label}[({},{}),({},{})]", r / n + 1, r % n + 1, c / n + 1, c % n + 1)
    } else {
        format!("{label}[{},{}]", r + 1, c + 1)
    }
}

/// Sequence outcomes, stopping at the first failure.
fn all_of(parts: impl IntoIterator<Item = Result<Outcome>>) -> Result<Outcome> {
    for p in parts {
        if let o @ Outcome::Fail { .. } = p? {
            return Ok(o);
        }
    }
    Ok(Outcome::Pass)
}

fn scalar_outcome(label: &str, n: usize, m: &ScalarMatrix) -> Outcome {
    match m.nonzeros().next() {
        None => Outcome::Pass,
        Some((r, c, v)) => Outcome::Fail {
            component: component_label(label, n, r, c, m.dim() > n),
            witness: Polynomial::constant(n, v.clone()),
        },
    }
}

fn run_body(ws: &Workspace, check: Check, suite: Suite) -> Result<Outcome> {
    let ctx = &ws.ctx;
    let n = ctx.n;
    let (r, ri) = (&ctx.r, &ctx.r_inv);
    let red = |name| -> Result<Reducer<'_>> {
        Ok(Reducer { pres: ws.presentation(name)?, strategy: ws.options.strategy, budget: &ws.budget })
    };
    match check {
        Check::YbeHecke => {
            let id = ScalarMatrix::identity(n);
            let (r12, r23) = (r.kron(&id), id.kron(r));
            let ybe = r12.mul(&r23)?.mul(&r12)?.sub(&r23.mul(&r12)?.mul(&r23)?)?;
            let s = Scalar::from_int(ctx.convention.hecke_sign());
            let hecke = r.sub(ri)?.sub(&ScalarMatrix::scalar_identity(n * n, &(&ctx.consts.lambda * &s)))?;
            let inverse = r.mul(ri)?.sub(&ScalarMatrix::identity(n * n))?;
            Ok(match scalar_outcome("ybe", n * n, &ybe) {
                Outcome::Pass => match scalar_outcome("hecke", n, &hecke) {
                    Outcome::Pass => scalar_outcome("inverse", n, &inverse),
                    o => o,
                },
                o => o,
            })
        }
        Check::QtraceTraceless => {
            let sym = ws.symbols()?;
            let tr = ctx.qtrace(&sym.om_tilde)?;
            Ok(if tr.is_zero() {
                Outcome::Pass
            } else {
                Outcome::Fail { component: "Tr_q(OmTilde)".into(), witness: tr }
            })
        }
        Check::DetqCentral => {
            let rd = red(PresentationName::FrtT)?;
            let det = ws.symbols()?.det_t.clone();
            let t = ctx.gens(Kind::T);
            all_of((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
                rd.zero_poly(
                    &component_label("[DetT,T]", n, i, j, false),
                    &det.mul(t.get(i, j)).sub(&t.get(i, j).mul(&det)),
                )
            }))
        }
        Check::PbwOverlaps => {
            for name in suite.overlap_targets() {
                if name != PresentationName::FrtT && n < 2 {
                    continue;
                }
                let p = match ws.presentation(name) {
                    Ok(p) => p,
                    // an inconsistent system is the strongest possible overlap failure
                    Err(QdcError::Unorientable { family, .. }) => {
                        return Ok(Outcome::Fail { component: format!("{family}: 1 = 0"), witness: Polynomial::one(n) })
                    }
                    Err(e) => return Err(e),
                };
                ws.budget.check()?;
                if let Some(cp) = overlap_check(&p.rules, ws.options.max_degree)?.into_iter().next() {
                    return Ok(Outcome::Fail {
                        component: format!("{name}:{}", cp.word),
                        witness: cp.difference_poly.unwrap_or_else(|| Polynomial::zero(n)),
                    });
                }
            }
            Ok(Outcome::Pass)
        }
        Check::HelperIdentities => {
            let rd = red(PresentationName::Lbasis)?;
            let sym = ws.symbols()?;
            let tr = &sym.tr_om_l;
            let c = &ctx.consts;
            let coeff = &(&c.lambda * &c.q_pow(n as i64)) * &(&c.kappa - &Scalar::one());
            let sq = rd.chain(&[F::P(&sym.om_tilde), F::P(&sym.om_tilde)])?;
            let anti = sym.om_tilde.map(|o| tr.mul(o).add(&o.mul(tr)));
            all_of([rd.zero_poly("(TrOmL)^2", &tr.mul(tr)), rd.zero_matrix("helper2", &anti.sub(&sq.scale(&coeff))?)])
        }
        Check::FpEmbedding => {
            let rd = red(PresentationName::Lbasis)?;
            let table = om_tilde_table(ws.symbols()?);
            let fams = family_matrices(PresentationName::Fp, ctx)?;
            all_of(fams.into_iter().filter(|(id, _)| !id.starts_with("eq-s3")).map(|(id, m)| {
                let m = m.try_map(|p| p.substitute(&table))?;
                rd.zero_matrix(&id, &m)
            }))
        }
        Check::OmegaXRelation => {
            let rd = red(PresentationName::Swz)?;
            let omx = rd.matrix(&ws.symbols()?.om_x)?;
            let x1 = omx.embed1()?;
            let lhs = rd.chain(&[F::S(r), F::P(&x1), F::S(ri), F::P(&x1)])?;
            let rhs = rd.chain(&[F::P(&x1), F::S(ri), F::P(&x1), F::S(ri)])?;
            rd.zero_matrix("OmX", &lhs.add(&rhs)?)
        }
        Check::XiNilpotent => {
            let rd = red(PresentationName::Swz)?;
            let xi = rd.poly(&ws.symbols()?.xi_x)?;
            rd.zero_poly("XiX*XiX", &xi.mul(&xi))
        }
        Check::LeibnizClosure => {
            let rd = red(PresentationName::Swz)?;
            let xi = rd.poly(&ws.symbols()?.xi_x)?;
            let t = ctx.gens(Kind::T);
            for i in 0..n {
                for j in 0..n {
                    let label = component_label("dT", n, i, j, false);
                    let d = rd.poly(&xi.graded_commutator(t.get(i, j))?)?;
                    if d.is_zero() || d.form_degree() != Some(1) {
                        return Ok(Outcome::Fail { component: format!("{label} form degree"), witness: d });
                    }
                    if let o @ Outcome::Fail { .. } = rd.zero_poly(&format!("d{label}"), &xi.graded_commutator(&d)?)? {
                        return Ok(o);
                    }
                }
            }
            Ok(Outcome::Pass)
        }
        Check::WRelations => {
            let rd = red(PresentationName::Lbasis)?;
            let sym = ws.symbols()?;
            let (w1, wb1) = (sym.w.embed1()?, sym.w_bar.embed1()?);
            let a = rd.chain(&[F::S(ri), F::P(&wb1), F::S(r), F::P(&w1)])?.sub(&rd.chain(&[
                F::P(&w1),
                F::S(ri),
                F::P(&wb1),
                F::S(r),
            ])?)?;
            let braided = |m: &PolyMatrix| -> Result<PolyMatrix> {
                rd.chain(&[F::S(ri), F::P(m), F::S(ri), F::P(m)])?.sub(&rd.chain(&[
                    F::P(m),
                    F::S(ri),
                    F::P(m),
                    F::S(ri),
                ])?)
            };
            all_of([
                rd.zero_matrix("WbarW", &a),
                braided(&wb1).and_then(|m| rd.zero_matrix("WbarWbar", &m)),
                braided(&w1).and_then(|m| rd.zero_matrix("WW", &m)),
            ])
        }
        Check::WwRelation => {
            let rd = red(PresentationName::Lbasis)?;
            let sym = ws.symbols()?;
            let m1 = rd.chain(&[F::P(&sym.w_bar), F::P(&sym.w)])?.embed1()?;
            let e = rd.chain(&[F::S(ri), F::P(&m1), F::S(ri), F::P(&m1)])?.sub(&rd.chain(&[
                F::P(&m1),
                F::S(ri),
                F::P(&m1),
                F::S(ri),
            ])?)?;
            rd.zero_matrix("(WbarW)", &e)
        }
        Check::WwbarIdentity => {
            let rd = red(PresentationName::Lbasis)?;
            let sym = ws.symbols()?;
            let c = &ctx.consts;
            let one_k = &Scalar::one() - &c.kappa;
            let im = ctx.gens(Kind::ImL);
            let ot = &sym.om_tilde;
            let lhs = rd.chain(&[F::P(&sym.w_bar), F::P(&sym.w)])?;
            let anti = rd.matrix(&ot.anticommutator(&im)?)?;
            let sandwich = rd.chain(&[F::P(&im), F::P(ot), F::P(ot), F::P(&im)])?;
            let rhs = PolyMatrix::scalar_identity(n, n, &one_k.inv())
                .sub(&anti.scale(&c.lambda))?
                .add(&sandwich.scale(&(&(&c.lambda * &c.lambda) * &one_k)))?;
            rd.zero_matrix("WbarW", &lhs.sub(&rhs)?)
        }
        Check::OmegaLBasisChange => {
            let rd = red(PresentationName::Swz)?;
            let oml = rd.chain(&[F::P(&ctx.gens(Kind::L)), F::P(&ctx.gens(Kind::Om))])?;
            let (o1, o2) = (oml.embed1()?, oml.embed2()?);
            let t1 = ctx.gens(Kind::T).embed1()?;
            let tom =
                rd.chain(&[F::P(&t1), F::P(&o2)])?.sub(&rd.chain(&[F::S(r), F::P(&o1), F::S(ri), F::P(&t1)])?)?;
            let omom = rd.chain(&[F::S(r), F::P(&o1), F::S(r), F::P(&o1)])?.add(&rd.chain(&[
                F::P(&o1),
                F::S(r),
                F::P(&o1),
                F::S(ri),
            ])?)?;
            all_of([rd.zero_matrix("TOmL", &tom), rd.zero_matrix("OmLOmL", &omom)])
        }
    }
}

/// Run one check within a workspace.
pub fn run_check_in(ws: &Workspace, check: Check, suite: Suite) -> CheckResult {
    let n = ws.n();
    if check.heavy() && n > 2 && !ws.options.heavy {
        return CheckResult::skip(check, n, format!("{} runs at N = 2 by default; opt in for N = {n}", check.name()));
    }
    let start = Instant::now();
    let outcome = run_body(ws, check, suite);
    let elapsed = start.elapsed();
    let millis = ws.options.timings.then_some(elapsed.as_millis() as u64);
    let mut res = match outcome {
        Ok(Outcome::Pass) => CheckResult {
            name: check.name().into(),
            n,
            status: Status::Pass,
            witness: None,
            component: None,
            reason: None,
            millis,
            witness_poly: None,
            elapsed,
        },
        Ok(Outcome::Fail { component, witness }) => CheckResult {
            name: check.name().into(),
            n,
            status: Status::Fail,
            witness: Some(witness.to_expr_string()),
            component: Some(component),
            reason: None,
            millis,
            witness_poly: Some(witness),
            elapsed,
        },
        Err(QdcError::BudgetExceeded) => CheckResult::skip(check, n, "budget exceeded".into()),
        Err(e) => CheckResult::skip(check, n, e.to_string()),
    };
    res.elapsed = elapsed;
    res
}

/// Run one check with a fresh workspace.
pub fn run_check(check: Check, n: usize, options: &RunOptions) -> CheckResult {
    match Workspace::new(n, options.clone()) {
        Ok(ws) => run_check_in(&ws, check, Suite::All),
        Err(e) => CheckResult::skip(check, n, e.to_string()),
    }
}

/// Run a suite. Checks run concurrently; results come back in catalog order.
/// With a budget, checks still running at the deadline are reported as
/// skipped and abandoned.
pub fn run_suite(suite: Suite, n: usize, options: &RunOptions) -> Vec<CheckResult> {
    let checks = suite.checks();
    let ws = match Workspace::new(n, options.clone()) {
        Ok(ws) => Arc::new(ws),
        Err(e) => return checks.iter().map(|&c| CheckResult::skip(c, n, e.to_string())).collect(),
    };
    let slots: Arc<Mutex<Vec<Option<CheckResult>>>> = Arc::new(Mutex::new(vec![None; checks.len()]));
    let worker = {
        let (ws, slots, checks) = (ws.clone(), slots.clone(), checks.clone());
        std::thread::spawn(move || {
            checks.par_iter().enumerate().for_each(|(k, &c)| {
                let res = run_check_in(&ws, c, suite);
                slots.lock().expect("result slots")[k] = Some(res);
            });
        })
    };
    match ws.budget.remaining() {
        None => {
            let _ = worker.join();
        }
        Some(_) => {
            // poll until the worker finishes or the deadline passes
            while !worker.is_finished() {
                match ws.budget.remaining() {
                    Some(left) if !left.is_zero() => std::thread::sleep(left.min(Duration::from_millis(20))),
                    _ => break,
                }
            }
            ws.budget.cancel();
            // give cooperative checks a moment to notice
            let grace = Instant::now() + Duration::from_millis(200);
            while !worker.is_finished() && Instant::now() < grace {
                std::thread::sleep(Duration::from_millis(5));
            }
        }
    }
    let slots = slots.lock().expect("result slots");
    checks
        .iter()
        .zip(slots.iter())
        .map(|(&c, s)| s.clone().unwrap_or_else(|| CheckResult::skip(c, n, "budget exceeded".into())))
        .collect()
}

/// Aggregate status: fail if anything failed, else skip if anything skipped.
pub fn aggregate(results: &[CheckResult]) -> Status {
    if results.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if results.iter().any(|r| r.status == Status::Skip) {
        Status::Skip
    } else {
        Status::Pass
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub suite: &'a str,
    #[serde(rename = "N")]
    pub n: usize,
    pub convention: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<&'a str>,
    pub status: Status,
    pub checks: &'a [CheckResult],
}

pub const REPORT_SCHEMA: &str = "qdc-report/1";

pub fn report<'a>(suite: Suite, n: usize, options: &'a RunOptions, results: &'a [CheckResult]) -> Report<'a> {
    Report {
        schema: REPORT_SCHEMA,
        suite: suite.as_str(),
        n,
        convention: options.convention.as_str(),
        mutation: options.mutation.map(|m| m.as_str()),
        status: aggregate(results),
        checks: results,
    }
}
