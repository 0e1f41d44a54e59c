//! Verification suites: relation residuals, Cuntz-Krieger defects, the
//! commutant shift, tail identification, the Γ sandwich and the gauge
//! action, each producing [`CheckReport`]s.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::carrier::Carrier;
use crate::fock::{
    eval_poly, gauge_expectation, gauge_unitary, morphism_op, right_op, FockError, Representation,
};
use crate::graph::{DirectedGraph, VertexId};
use crate::kgraph::{KGraph, KGraphError, Morphism};
use crate::norms::{numeric_rank, op_norm, NormError, NormEstimate, NormOptions};
use crate::path_space::{choose_tails, FockBasis, GammaBasis, PathSpaceError};
use crate::poly::{NcPolynomial, PolyError};
use crate::sparse::SparseOperator;

/// Bound for residuals that vanish exactly up to rounding in products.
pub const EXACT_BOUND: f64 = 1e-14;
/// Bound for gauge conjugation residuals.
pub const GAUGE_BOUND: f64 = 1e-12;
/// Singular values above this count toward a numeric rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Tck,
    Ck,
    Shift,
    Identify,
    Hrlemma,
    Gauge,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Tck,
        Suite::Ck,
        Suite::Shift,
        Suite::Identify,
        Suite::Hrlemma,
        Suite::Gauge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tck => "tck",
            Suite::Ck => "ck",
            Suite::Shift => "shift",
            Suite::Identify => "identify",
            Suite::Hrlemma => "hrlemma",
            Suite::Gauge => "gauge",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("{suite} needs a graph without sources; {carrier} has sources")]
    HasSources { suite: Suite, carrier: String },
    #[error("{suite} applies to {expected} carriers only")]
    WrongCarrier { suite: Suite, expected: &'static str },
    #[error("tail depth {t} is below the truncation {n}")]
    TailsTooShort { t: usize, n: usize },
    #[error("polynomial degree {degree} exceeds the truncation {n}")]
    DegreeTooHigh { degree: usize, n: usize },
    #[error("the shift length must be at least 1")]
    ZeroShift,
    #[error("polynomial must be adjoint-free")]
    NotAdjointFree,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    PathSpace(#[from] PathSpaceError),
    #[error(transparent)]
    KGraph(#[from] KGraphError),
}

/// Parameters shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub t: Option<usize>,
    pub d: Option<usize>,
    pub tol: f64,
    pub seed: u64,
}

impl Params {
    pub fn new(n: usize) -> Self {
        Params {
            n,
            m: 0,
            t: None,
            d: None,
            tol: 1e-8,
            seed: 42,
        }
    }

    pub fn with_m(self, m: usize) -> Self {
        Params { m, ..self }
    }

    pub fn with_t(self, t: usize) -> Self {
        Params { t: Some(t), ..self }
    }

    pub fn with_d(self, d: usize) -> Self {
        Params { d: Some(d), ..self }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Params { tol, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Params { seed, ..self }
    }

    pub fn norm_options(&self) -> NormOptions {
        NormOptions::with_tol(self.tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: Suite,
    pub carrier: String,
    pub check: String,
    pub params: Params,
    pub value: f64,
    pub bound: f64,
    pub anchor: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(suite: Suite, carrier: &str, check: &str, params: Params, anchor: &'static str) -> Self {
        CheckReport {
            suite,
            carrier: carrier.to_string(),
            check: check.to_string(),
            params,
            value: 0.0,
            bound: 0.0,
            anchor,
            pass: false,
            detail: String::new(),
        }
    }

    /// Passes when `value <= bound`.
    fn at_most(mut self, value: f64, bound: f64) -> Self {
        self.value = value;
        self.bound = bound;
        self.pass = value <= bound;
        self
    }

    fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    /// The machine-readable `CHECK ...` line.
    pub fn line(&self) -> String {
        format!(
            "CHECK {} {} N={} M={} tol={:e} seed={} value={:e} bound={:e} anchor=\"{}:{}\" {}",
            self.suite,
            self.carrier,
            self.params.n,
            self.params.m,
            self.params.tol,
            self.params.seed,
            self.value,
            self.bound,
            self.anchor,
            self.check,
            self.verdict()
        )
    }

    /// A human-readable line.
    pub fn text(&self) -> String {
        let mut s = format!(
            "{} {:<8} {:<10} {:<26} value={:e} bound={:e}",
            self.verdict(),
            self.suite.name(),
            self.carrier,
            self.check,
            self.value,
            self.bound
        );
        if !self.detail.is_empty() {
            s.push_str("  ");
            s.push_str(&self.detail);
        }
        s
    }
}

/// Generator operators of a representation, with optional replacements
/// for individual morphisms. Replacements serve as negative controls.
pub struct Family<'a> {
    rep: &'a dyn Representation,
    overrides: HashMap<Morphism, SparseOperator>,
}

impl<'a> Family<'a> {
    pub fn new(rep: &'a dyn Representation) -> Self {
        Family {
            rep,
            overrides: HashMap::new(),
        }
    }

    pub fn with_override(mut self, m: Morphism, op: SparseOperator) -> Self {
        self.overrides.insert(m, op);
        self
    }

    pub fn rep(&self) -> &dyn Representation {
        self.rep
    }

    pub fn op(&self, m: &Morphism) -> SparseOperator {
        self.overrides
            .get(m)
            .cloned()
            .unwrap_or_else(|| morphism_op(self.rep, m))
    }
}

fn square(a: &SparseOperator, idx: &[usize]) -> SparseOperator {
    a.restrict(idx, idx)
}

fn mul(a: &SparseOperator, b: &SparseOperator) -> SparseOperator {
    a.mul(b).expect("operators on one basis")
}

fn sub(a: &SparseOperator, b: &SparseOperator) -> SparseOperator {
    a.sub(b).expect("operators on one basis")
}

/// `max(‖Q² - Q‖, ‖Q - Q^*‖)` entrywise.
fn projection_residual(q: &SparseOperator) -> f64 {
    sub(&mul(q, q), q).max_abs().max(sub(q, &q.adjoint()).max_abs())
}

fn all_morphisms(carrier: &Carrier, max_level: usize) -> Vec<Morphism> {
    let g = carrier.skeleton();
    (0..=max_level)
        .flat_map(|l| g.vertices().flat_map(move |v| carrier.morphisms_at(l, v)))
        .collect()
}

/// Degrees `n` checked against the range-sum relation: each unit vector
/// and the all-ones vector.
pub fn relation_degrees(k: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (0..k)
        .map(|j| {
            let mut n = vec![0; k];
            n[j] = 1;
            n
        })
        .collect();
    if k > 1 {
        out.push(vec![1; k]);
    }
    out
}

const TCK_ANCHOR: &str = "toeplitz-ck-relations";

/// Interior residuals of the Toeplitz-Cuntz-Krieger relations.
pub fn check_tck_family(family: &Family<'_>, name: &str, params: Params) -> Vec<CheckReport> {
    let rep = family.rep();
    let carrier = rep.carrier().clone();
    let g = carrier.skeleton();
    let report = |check: &str, value: f64| {
        CheckReport::new(Suite::Tck, name, check, params, TCK_ANCHOR).at_most(value, EXACT_BOUND)
    };
    let vertices: Vec<VertexId> = g.vertices().collect();
    let proj: Vec<SparseOperator> = vertices
        .iter()
        .map(|&v| family.op(&carrier.identity(v)))
        .collect();
    let mut out = Vec::new();

    let mut r1: f64 = 0.0;
    for (i, p) in proj.iter().enumerate() {
        r1 = r1.max(projection_residual(p));
        for (j, q) in proj.iter().enumerate() {
            if i != j {
                r1 = r1.max(mul(p, q).max_abs());
            }
        }
    }
    out.push(report("vertex-projections", r1));

    let inner1 = rep.interior(1);
    match carrier.as_ref() {
        Carrier::Graph(_) => {
            let edges: Vec<(Morphism, SparseOperator)> = g
                .edge_ids()
                .map(|e| {
                    let m = carrier.edge(e);
                    let op = family.op(&m);
                    (m, op)
                })
                .collect();
            let mut r2: f64 = 0.0;
            for (a, (_, la)) in edges.iter().enumerate() {
                for (b, (_, lb)) in edges.iter().enumerate() {
                    if a != b {
                        r2 = r2.max(square(&mul(&la.adjoint(), lb), &inner1).max_abs());
                    }
                }
            }
            out.push(report("edge-orthogonality", r2));
            let mut r3: f64 = 0.0;
            for (m, l) in &edges {
                let ps = &proj[m.source().0];
                r3 = r3.max(square(&sub(&mul(&l.adjoint(), l), ps), &inner1).max_abs());
            }
            out.push(report("isometry-on-source", r3));
            let mut r4: f64 = 0.0;
            for (vi, &v) in vertices.iter().enumerate() {
                let mut q = proj[vi].clone();
                for (m, l) in &edges {
                    if m.range() == v {
                        q = sub(&q, &mul(l, &l.adjoint()));
                    }
                }
                r4 = r4.max(projection_residual(&square(&q, &inner1)));
            }
            out.push(report("range-sum-bound", r4));
        }
        Carrier::KGraph(kg) => {
            let low = all_morphisms(&carrier, 1);
            let mut r2: f64 = 0.0;
            for a in &low {
                for b in &low {
                    let margin = a.grading() + b.grading();
                    let inner = rep.interior(margin);
                    let prod = mul(&family.op(a), &family.op(b));
                    let want = match kg.compose(a, b) {
                        Ok(ab) => family.op(&ab),
                        Err(_) => SparseOperator::zeros(rep.dim(), rep.dim()),
                    };
                    r2 = r2.max(square(&sub(&prod, &want), &inner).max_abs());
                }
            }
            out.push(report("multiplicativity", r2));
            let mut r3: f64 = 0.0;
            for m in all_morphisms(&carrier, 2) {
                let inner = rep.interior(m.grading());
                let s = family.op(&m);
                let ps = &proj[m.source().0];
                r3 = r3.max(square(&sub(&mul(&s.adjoint(), &s), ps), &inner).max_abs());
            }
            out.push(report("isometry-on-source", r3));
            let mut r4: f64 = 0.0;
            let mut orth: f64 = 0.0;
            for n in relation_degrees(kg.k()) {
                let margin = n.iter().sum::<u32>() as usize;
                let inner = rep.interior(margin);
                for (vi, &v) in vertices.iter().enumerate() {
                    let ms = kg.enumerate(&n, v);
                    let ops: Vec<SparseOperator> = ms.iter().map(|m| family.op(m)).collect();
                    let mut q = proj[vi].clone();
                    for s in &ops {
                        q = sub(&q, &mul(s, &s.adjoint()));
                    }
                    r4 = r4.max(projection_residual(&square(&q, &inner)));
                    for (a, sa) in ops.iter().enumerate() {
                        for (b, sb) in ops.iter().enumerate() {
                            if a != b {
                                orth = orth.max(square(&mul(&sa.adjoint(), sb), &inner).max_abs());
                            }
                        }
                    }
                }
            }
            out.push(report("range-orthogonality", orth));
            out.push(report("range-sum-bound", r4));
        }
    }
    out
}

/// The basis the relation suites act on: the Fock space for a 1-graph, the
/// Γ space with tails of depth `M` for a k-graph.
pub enum SuiteBasis {
    Fock(FockBasis),
    Gamma(GammaBasis),
}

impl SuiteBasis {
    pub fn build(carrier: &Carrier, params: Params) -> Result<Self, VerifyError> {
        let arc = Arc::new(carrier.clone());
        Ok(match carrier {
            Carrier::Graph(_) => SuiteBasis::Fock(FockBasis::new(arc, params.n)),
            Carrier::KGraph(kg) => {
                let tails = choose_tails(kg, params.m);
                SuiteBasis::Gamma(GammaBasis::new(arc, tails, params.n, params.m)?)
            }
        })
    }

    pub fn rep(&self) -> &dyn Representation {
        match self {
            SuiteBasis::Fock(b) => b,
            SuiteBasis::Gamma(b) => b,
        }
    }
}

pub fn check_tck(carrier: &Carrier, name: &str, params: Params) -> Result<Vec<CheckReport>, VerifyError> {
    let basis = SuiteBasis::build(carrier, params)?;
    Ok(check_tck_family(&Family::new(basis.rep()), name, params))
}

const CK_ANCHOR: &str = "ck-defect-rank";
const CK_EQUALITY_ANCHOR: &str = "ck-equality";

/// Defects `P_x - Σ_{r(e)=x} L_e L_e^*` on the interior of a Fock basis over
/// a graph without sources: each should be the rank-one projection onto
/// `ξ_x`.
pub fn check_ck_defects_family(family: &Family<'_>, name: &str, params: Params, note: &str) -> Vec<CheckReport> {
    let rep = family.rep();
    let carrier = rep.carrier().clone();
    let g = carrier.skeleton();
    let inner = rep.interior(1);
    let mut out = Vec::new();
    for profile in g.vertex_profiles() {
        if !profile.ck_applicable {
            continue;
        }
        let v = profile.vertex;
        let mut d = family.op(&carrier.identity(v));
        for &e in g.incoming(v) {
            let l = family.op(&carrier.edge(e));
            d = sub(&d, &mul(&l, &l.adjoint()));
        }
        let d = square(&d, &inner);
        let rank = numeric_rank(&d, RANK_TOL);
        let mut xi = vec![Complex64::new(0.0, 0.0); inner.len()];
        // Vertex and edge ids share a namespace, so the label named after
        // the vertex is the vertex itself.
        let vname = g.vertex_name(v);
        if let Some(p) = inner.iter().position(|&j| rep.basis_name(j) == vname) {
            xi[p] = Complex64::new(1.0, 0.0);
        }
        let resid = sub(&d, &SparseOperator::diagonal(&xi)).max_abs();
        let mut r = CheckReport::new(Suite::Ck, name, &format!("defect-rank@{}", profile.name), params, CK_ANCHOR);
        r.value = rank as f64;
        r.bound = 1.0;
        r.pass = rank == 1 && resid <= EXACT_BOUND;
        let mut detail = format!("distance to the vertex projection {resid:e}");
        if !note.is_empty() {
            detail = format!("{note}; {detail}");
        }
        out.push(r.detail(detail));
    }
    out
}

/// Classes `(λ, v, i)` on which `Σ_{λ∈Λ^n(v)} S_λ S_λ^* = S_v` is witnessed
/// inside the truncation.
pub fn ck_interior(gamma: &GammaBasis, n: &[u32]) -> Vec<usize> {
    let k = gamma.kgraph().k();
    let total = n.iter().sum::<u32>() as usize;
    let top = *n.iter().max().unwrap_or(&0) as usize;
    let reach = k * top;
    let numerator_margin = total.max(reach.saturating_sub(total));
    gamma.interior(numerator_margin, reach)
}

/// The Cuntz-Krieger equality on the Γ space for each degree of
/// [`relation_degrees`].
pub fn check_ck_equality_family(family: &Family<'_>, gamma: &GammaBasis, name: &str, params: Params) -> Vec<CheckReport> {
    let kg = gamma.kgraph();
    let carrier = gamma.carrier();
    let mut out = Vec::new();
    for n in relation_degrees(kg.k()) {
        let inner = ck_interior(gamma, &n);
        let mut resid: f64 = 0.0;
        for v in kg.skeleton().vertices() {
            let mut q = family.op(&carrier.identity(v));
            for m in kg.enumerate(&n, v) {
                let s = family.op(&m);
                q = sub(&q, &mul(&s, &s.adjoint()));
            }
            resid = resid.max(square(&q, &inner).max_abs());
        }
        let label: Vec<String> = n.iter().map(|x| x.to_string()).collect();
        let r = CheckReport::new(Suite::Ck, name, &format!("equality@({})", label.join(",")), params, CK_EQUALITY_ANCHOR);
        let r = if inner.is_empty() {
            let mut r = r.at_most(0.0, EXACT_BOUND);
            r.pass = false;
            r.detail("empty interior; raise N or M")
        } else {
            r.at_most(resid, EXACT_BOUND)
                .detail(format!("{} interior classes", inner.len()))
        };
        out.push(r);
    }
    out
}

pub fn check_ck_defects(carrier: &Carrier, name: &str, params: Params) -> Result<Vec<CheckReport>, VerifyError> {
    match carrier {
        Carrier::Graph(g) => {
            let (gs, note) = if g.has_sources() {
                let t = params.t.unwrap_or(params.n).max(1);
                (g.add_tails(t), format!("tails of depth {t} added"))
            } else {
                (g.clone(), String::new())
            };
            let basis = FockBasis::new(Arc::new(Carrier::Graph(gs)), params.n);
            Ok(check_ck_defects_family(&Family::new(&basis), name, params, &note))
        }
        Carrier::KGraph(kg) => {
            let gamma = GammaBasis::new(
                Arc::new(carrier.clone()),
                choose_tails(kg, params.m),
                params.n,
                params.m,
            )?;
            Ok(check_ck_equality_family(&Family::new(&gamma), &gamma, name, params))
        }
    }
}

/// For each vertex `x`, the path `w_x` of length `d` with range `x` built
/// from lowest-numbered incoming edges.
pub fn shift_paths(carrier: &Carrier, d: usize) -> Vec<Morphism> {
    let g = carrier.skeleton();
    g.vertices()
        .map(|x| {
            let mut at = x;
            let mut names = Vec::with_capacity(d);
            for _ in 0..d {
                let e = *g.incoming(at).iter().min().expect("no sources");
                names.push(g.edge_name(e));
                at = g.source(e);
            }
            carrier.path(&names).expect("chained edges compose")
        })
        .collect()
}

const SHIFT_ANCHOR: &str = "commutant-shift";

/// `R_d = Σ_x R_{w_x}` from level `N` into level `N + d`; checks that it is
/// an isometry and that it intertwines the compressions of each polynomial.
pub fn check_commutant_shift(
    g: &DirectedGraph,
    name: &str,
    polys: &[NcPolynomial],
    params: Params,
) -> Result<Vec<CheckReport>, VerifyError> {
    let d = params.d.unwrap_or(1);
    if d == 0 {
        return Err(VerifyError::ZeroShift);
    }
    if g.has_sources() {
        return Err(VerifyError::HasSources {
            suite: Suite::Shift,
            carrier: name.to_string(),
        });
    }
    if polys.iter().any(|p| !p.is_adjoint_free()) {
        return Err(VerifyError::NotAdjointFree);
    }
    let carrier = Arc::new(Carrier::Graph(g.clone()));
    let small = FockBasis::new(carrier.clone(), params.n);
    let big = FockBasis::new(carrier.clone(), params.n + d);
    let mut r = SparseOperator::zeros(big.dim(), small.dim());
    for w in shift_paths(&carrier, d) {
        r = r.add(&right_op(&small, &big, &w)).expect("same shape");
    }
    let iso = sub(&mul(&r.adjoint(), &r), &SparseOperator::identity(small.dim())).max_abs();
    let mut inter: f64 = 0.0;
    for p in polys {
        let rn = r.ampliate(p.size());
        let lhs = mul(&mul(&rn.adjoint(), &eval_poly(p, &big)?), &rn);
        inter = inter.max(sub(&lhs, &eval_poly(p, &small)?).max_abs());
    }
    Ok(vec![
        CheckReport::new(Suite::Shift, name, "isometry", params, SHIFT_ANCHOR)
            .at_most(iso, EXACT_BOUND)
            .detail(format!("d={d}")),
        CheckReport::new(Suite::Shift, name, "intertwining", params, SHIFT_ANCHOR)
            .at_most(inter, EXACT_BOUND)
            .detail(format!("d={d}, {} polynomials", polys.len())),
    ])
}

const IDENTIFY_ANCHOR: &str = "tail-identification";

/// Compares each polynomial on the Fock space of `g` with its image on the
/// Fock space of `g` with tails of depth `T`, both at level `N`.
pub fn check_identify(
    g: &DirectedGraph,
    name: &str,
    polys: &[NcPolynomial],
    params: Params,
) -> Result<Vec<CheckReport>, VerifyError> {
    let t = params.t.unwrap_or(params.n);
    if t < params.n {
        return Err(VerifyError::TailsTooShort { t, n: params.n });
    }
    if polys.iter().any(|p| !p.is_adjoint_free()) {
        return Err(VerifyError::NotAdjointFree);
    }
    let gs = if g.has_sources() { g.add_tails(t.max(1)) } else { g.clone() };
    let ca = Arc::new(Carrier::Graph(g.clone()));
    let cb = Arc::new(Carrier::Graph(gs.clone()));
    let a = FockBasis::new(ca.clone(), params.n);
    let b = FockBasis::new(cb.clone(), params.n);
    // Positions of the paths of g inside the larger basis.
    let embed: Vec<usize> = a
        .labels()
        .iter()
        .map(|m| {
            let names: Vec<&str> = m.word().iter().map(|&e| g.edge_name(e)).collect();
            let image = if names.is_empty() {
                cb.resolve(g.vertex_name(m.range()))
            } else {
                cb.path(&names)
            };
            b.index_of(&image.expect("tails keep the original ids")).expect("same level")
        })
        .collect();
    let tail_cols: Vec<usize> = (0..b.dim())
        .filter(|&j| !gs.is_original_vertex(b.label(j).range()))
        .collect();
    let opts = params.norm_options();
    let mut gap: f64 = 0.0;
    let mut vanish: f64 = 0.0;
    let mut block: f64 = 0.0;
    for p in polys {
        let degree = p.degree(&ca)?;
        if degree > params.n {
            return Err(VerifyError::DegreeTooHigh { degree, n: params.n });
        }
        let pa = eval_poly(p, &a)?;
        let pb = eval_poly(p, &b)?;
        let na = op_norm(&pa, opts).require()?;
        let nb = op_norm(&pb, opts).require()?;
        gap = gap.max((na.value - nb.value).abs());
        let n = p.size();
        let bd = b.dim();
        let all: Vec<usize> = (0..n * bd).collect();
        let cols: Vec<usize> = (0..n)
            .flat_map(|k| tail_cols.iter().map(move |&j| k * bd + j))
            .collect();
        vanish = vanish.max(pb.restrict(&all, &cols).max_abs());
        let emb: Vec<usize> = (0..n)
            .flat_map(|k| embed.iter().map(move |&j| k * bd + j))
            .collect();
        block = block.max(sub(&pb.restrict(&emb, &emb), &pa).max_abs());
    }
    let tails = if g.has_sources() {
        format!("tails of depth {t}")
    } else {
        "no sources, no tails".to_string()
    };
    Ok(vec![
        CheckReport::new(Suite::Identify, name, "norm-gap", params, IDENTIFY_ANCHOR)
            .at_most(gap, 2.0 * params.tol)
            .detail(format!("{tails}, {} polynomials", polys.len())),
        CheckReport::new(Suite::Identify, name, "tail-complement", params, IDENTIFY_ANCHOR)
            .at_most(vanish, 0.0)
            .detail(format!("{} tail-range labels", tail_cols.len())),
        CheckReport::new(Suite::Identify, name, "block-equality", params, IDENTIFY_ANCHOR)
            .at_most(block, 0.0),
    ])
}

/// `‖Π_N p(L) Π_N‖`, `‖p(S')‖` on the Γ space at `(N, M)`, and
/// `‖Π_{N+M} p(L) Π_{N+M}‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub lower: NormEstimate,
    pub middle: NormEstimate,
    pub upper: NormEstimate,
}

pub fn hrlemma_norms(kg: &KGraph, p: &NcPolynomial, params: Params) -> Result<Sandwich, VerifyError> {
    let carrier = Arc::new(Carrier::KGraph(kg.clone()));
    if !p.is_adjoint_free() {
        return Err(VerifyError::NotAdjointFree);
    }
    let degree = p.degree(&carrier)?;
    if degree > params.n {
        return Err(VerifyError::DegreeTooHigh { degree, n: params.n });
    }
    let opts = params.norm_options();
    let lower_basis = FockBasis::new(carrier.clone(), params.n);
    let gamma = GammaBasis::new(carrier.clone(), choose_tails(kg, params.m), params.n, params.m)?;
    let upper_basis = FockBasis::new(carrier.clone(), params.n + params.m);
    Ok(Sandwich {
        lower: op_norm(&eval_poly(p, &lower_basis)?, opts).require()?,
        middle: op_norm(&eval_poly(p, &gamma)?, opts).require()?,
        upper: op_norm(&eval_poly(p, &upper_basis)?, opts).require()?,
    })
}

const HR_ANCHOR: &str = "gamma-sandwich";

/// The polynomial `Σ_v S_v + Σ_e S_e`.
pub fn generator_sum(carrier: &Carrier) -> NcPolynomial {
    let g = carrier.skeleton();
    let mut names: Vec<&str> = g.vertices().map(|v| g.vertex_name(v)).collect();
    names.extend(g.edge_ids().map(|e| g.edge_name(e)));
    NcPolynomial::sum_of(&names)
}

pub fn check_hrlemma(
    kg: &KGraph,
    name: &str,
    polys: &[NcPolynomial],
    params: Params,
) -> Result<Vec<CheckReport>, VerifyError> {
    let tol = params.tol;
    let mut below: f64 = f64::NEG_INFINITY;
    let mut above: f64 = f64::NEG_INFINITY;
    let mut coincide: f64 = 0.0;
    let mut first: Option<Sandwich> = None;
    for p in polys {
        let s = hrlemma_norms(kg, p, params)?;
        below = below.max(s.lower.value - s.middle.value);
        above = above.max(s.middle.value - s.upper.value);
        coincide = coincide.max((s.middle.value - s.lower.value).abs());
        first.get_or_insert(s);
    }
    let shown = first
        .map(|s| {
            format!(
                "first polynomial: lower={:.12} middle={:.12} upper={:.12}",
                s.lower.value, s.middle.value, s.upper.value
            )
        })
        .unwrap_or_default();
    let mut out = vec![
        CheckReport::new(Suite::Hrlemma, name, "sandwich-lower", params, HR_ANCHOR)
            .at_most(below.max(0.0), tol)
            .detail(shown.clone()),
        CheckReport::new(Suite::Hrlemma, name, "sandwich-upper", params, HR_ANCHOR)
            .at_most(above.max(0.0), tol)
            .detail(format!("{} polynomials", polys.len())),
    ];
    if params.m == 0 {
        out.push(
            CheckReport::new(Suite::Hrlemma, name, "fock-coincidence", params, HR_ANCHOR)
                .at_most(coincide, 2.0 * tol),
        );
    }
    Ok(out)
}

const GAUGE_ANCHOR: &str = "gauge-covariance";

/// Phases `exp(2πi j / samples)` in every coordinate.
fn phase_grid(k: usize, samples: usize) -> Vec<Vec<Complex64>> {
    let total = samples.pow(k as u32);
    (0..total)
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let j = idx % samples;
                    idx /= samples;
                    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64)
                })
                .collect()
        })
        .collect()
}

/// Conjugation residuals `‖U_t^* S_g U_t - t^{d(g)} S_g‖` for the generators
/// and the degree-zero projection of the gauge expectation.
pub fn check_gauge_family(family: &Family<'_>, name: &str, params: Params, samples: usize) -> Result<Vec<CheckReport>, VerifyError> {
    let rep = family.rep();
    let carrier = rep.carrier().clone();
    let gens = all_morphisms(&carrier, 1);
    let ops: Vec<SparseOperator> = gens.iter().map(|m| family.op(m)).collect();
    let mut conj: f64 = 0.0;
    for t in phase_grid(carrier.rank(), samples.max(1)) {
        let u = gauge_unitary(rep, &t)?;
        for (m, s) in gens.iter().zip(&ops) {
            let scale: Complex64 = t
                .iter()
                .zip(m.degree())
                .map(|(z, &d)| z.powi(d as i32))
                .product();
            conj = conj.max(sub(&u.conjugate(s), &s.scale(scale)).max_abs());
        }
    }
    let widest = (0..rep.dim())
        .flat_map(|j| rep.phase_exponent(j))
        .map(|m| m.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let order = 2 * widest + 2;
    let mut mixed = SparseOperator::zeros(rep.dim(), rep.dim());
    let mut expected = mixed.clone();
    for (m, s) in gens.iter().zip(&ops) {
        if m.is_vertex() {
            continue;
        }
        let ss = mul(s, &s.adjoint());
        mixed = mixed.add(s).unwrap().add(&ss).unwrap();
        expected = expected.add(&ss).unwrap();
    }
    let phi = gauge_expectation(&mixed, rep, order)?;
    let resid = sub(&phi, &expected).max_abs();
    Ok(vec![
        CheckReport::new(Suite::Gauge, name, "conjugation", params, GAUGE_ANCHOR)
            .at_most(conj, GAUGE_BOUND)
            .detail(format!("{} phases", samples.pow(carrier.rank() as u32))),
        CheckReport::new(Suite::Gauge, name, "expectation", params, GAUGE_ANCHOR)
            .at_most(resid, 0.0)
            .detail(format!("order {order}")),
    ])
}

pub fn check_gauge(carrier: &Carrier, name: &str, params: Params, samples: usize) -> Result<Vec<CheckReport>, VerifyError> {
    let basis = SuiteBasis::build(carrier, params)?;
    check_gauge_family(&Family::new(basis.rep()), name, params, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::random_family;

    fn all_pass(reports: &[CheckReport]) -> bool {
        reports.iter().all(|r| r.pass)
    }

    /// Copy of `op` with one entry toggled between 0 and 1.
    fn flip(op: &SparseOperator, r: usize, c: usize) -> SparseOperator {
        let v = if op.get(r, c) == Complex64::new(0.0, 0.0) { 1.0 } else { 0.0 };
        op.with_entry(r, c, Complex64::new(v, 0.0))
    }

    #[test]
    fn tck_on_fixtures() {
        for (name, g) in fixtures::graphs() {
            let reps = check_tck(&Carrier::from(g), name, Params::new(4)).unwrap();
            assert!(all_pass(&reps), "{name}: {reps:?}");
        }
        let reps = check_tck(&Carrier::from(fixtures::torus2()), "TORUS2", Params::new(2).with_m(2)).unwrap();
        assert!(all_pass(&reps), "{reps:?}");
    }

    #[test]
    fn tck_mutation_fails() {
        let c = Arc::new(Carrier::from(fixtures::cuntz2()));
        let basis = FockBasis::new(c.clone(), 4);
        let e1 = c.resolve("e1").unwrap();
        let op = flip(&morphism_op(&basis, &e1), 0, 0);
        let fam = Family::new(&basis).with_override(e1, op);
        assert!(!all_pass(&check_tck_family(&fam, "CUNTZ2", Params::new(4))));
    }

    #[test]
    fn ck_defects_after_tails() {
        let reps = check_ck_defects(&Carrier::from(fixtures::flag()), "FLAG", Params::new(6).with_t(6)).unwrap();
        let names: Vec<&str> = reps.iter().map(|r| r.check.as_str()).collect();
        assert!(names.contains(&"defect-rank@x"));
        assert!(names.contains(&"defect-rank@y"));
        assert!(all_pass(&reps), "{reps:?}");
    }

    #[test]
    fn ck_defect_mutation_has_rank_two() {
        let g = fixtures::flag().add_tails(6);
        let c = Arc::new(Carrier::from(g));
        let basis = FockBasis::new(c.clone(), 6);
        let f = c.resolve("f").unwrap();
        let lf = morphism_op(&basis, &f);
        let (r0, c0, _) = lf.entries().nth(1).unwrap();
        let fam = Family::new(&basis).with_override(f, lf.with_entry(r0, c0, Complex64::new(0.0, 0.0)));
        let reps = check_ck_defects_family(&fam, "FLAG", Params::new(6), "");
        let y = reps.iter().find(|r| r.check == "defect-rank@y").unwrap();
        assert!(!y.pass);
        assert_eq!(y.value, 2.0);
    }

    #[test]
    fn ck_equality_on_torus() {
        let reps = check_ck_defects(&Carrier::from(fixtures::torus2()), "TORUS2", Params::new(3).with_m(4)).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(all_pass(&reps), "{reps:?}");
    }

    #[test]
    fn ck_equality_fails_off_interior() {
        // Without the margin the truncation cuts off the witnesses.
        let kg = fixtures::torus2();
        let gamma = GammaBasis::new(Arc::new(Carrier::from(kg.clone())), choose_tails(&kg, 2), 2, 2).unwrap();
        let fam = Family::new(&gamma);
        let v = kg.skeleton().vertex_by_name("v").unwrap();
        let mut q = fam.op(&kg.identity(v));
        for m in kg.enumerate(&[1, 1], v) {
            let s = fam.op(&m);
            q = sub(&q, &mul(&s, &s.adjoint()));
        }
        assert!(q.max_abs() > 0.5);
    }

    #[test]
    fn shift_on_loops() {
        let g = fixtures::loop1();
        let p = vec![NcPolynomial::sum_of(&["v", "e"])];
        let reps = check_commutant_shift(&g, "LOOP1", &p, Params::new(5).with_d(1)).unwrap();
        assert!(all_pass(&reps));
        let c = fixtures::cuntz2();
        let polys = random_family(&Carrier::from(c.clone()), 6, 3, 1);
        let reps = check_commutant_shift(&c, "CUNTZ2", &polys, Params::new(4).with_d(2)).unwrap();
        assert!(all_pass(&reps));
        assert!(matches!(
            check_commutant_shift(&fixtures::flag(), "FLAG", &p, Params::new(3)),
            Err(VerifyError::HasSources { .. })
        ));
    }

    #[test]
    fn identify_on_flag() {
        let g = fixtures::flag();
        let mut polys = random_family(&Carrier::from(g.clone()), 4, 3, 5);
        polys.push(NcPolynomial::sum_of(&["x"]));
        let reps = check_identify(&g, "FLAG", &polys, Params::new(6).with_t(6)).unwrap();
        assert!(all_pass(&reps), "{reps:?}");
        assert!(matches!(
            check_identify(&g, "FLAG", &polys, Params::new(6).with_t(5)),
            Err(VerifyError::TailsTooShort { .. })
        ));
    }

    #[test]
    fn sandwich_on_torus() {
        let kg = fixtures::torus2();
        let p = vec![NcPolynomial::sum_of(&["v", "b"])];
        let reps = check_hrlemma(&kg, "TORUS2", &p, Params::new(6).with_m(3)).unwrap();
        assert!(all_pass(&reps), "{reps:?}");
        let reps = check_hrlemma(&kg, "TORUS2", &p, Params::new(6).with_m(0)).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(all_pass(&reps), "{reps:?}");
        assert!(matches!(
            check_hrlemma(&kg, "TORUS2", &p, Params::new(0)),
            Err(VerifyError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn loop_sandwich_middle() {
        let kg = KGraph::from_graph(&fixtures::loop1()).unwrap();
        let p = NcPolynomial::sum_of(&["v", "e"]);
        let s = hrlemma_norms(&kg, &p, Params::new(4).with_m(2)).unwrap();
        let want = 2.0 * (PI / 15.0).cos();
        assert!((s.middle.value - want).abs() < 1e-8);
        assert!((s.lower.value - 2.0 * (PI / 11.0).cos()).abs() < 1e-8);
        assert!((s.upper.value - want).abs() < 1e-8);
    }

    #[test]
    fn gauge_suite() {
        for (name, g) in fixtures::graphs() {
            let reps = check_gauge(&Carrier::from(g), name, Params::new(4), 8).unwrap();
            assert!(all_pass(&reps), "{name}: {reps:?}");
        }
        let reps = check_gauge(&Carrier::from(fixtures::torus2()), "TORUS2", Params::new(3).with_m(2), 4).unwrap();
        assert!(all_pass(&reps), "{reps:?}");
    }

    #[test]
    fn line_format() {
        let r = CheckReport::new(Suite::Tck, "LOOP1", "vertex-projections", Params::new(4), TCK_ANCHOR)
            .at_most(0.0, EXACT_BOUND);
        assert_eq!(
            r.line(),
            "CHECK tck LOOP1 N=4 M=0 tol=1e-8 seed=42 value=0e0 bound=1e-14 \
             anchor=\"toeplitz-ck-relations:vertex-projections\" PASS"
        );
    }
}
