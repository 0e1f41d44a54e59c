//! Exact arithmetic in the span of `S_μ S_ν^*` inside the Toeplitz algebra
//! of a directed graph.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::carrier::Carrier;
use crate::fock::morphism_op;
use crate::graph::DirectedGraph;
use crate::kgraph::Morphism;
use crate::path_space::FockBasis;
use crate::sparse::SparseOperator;

pub type Coefficient = Complex<BigRational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToeplitzError {
    #[error("elements live over different graphs")]
    CarrierMismatch,
    #[error("paths `{0}` and `{1}` have different sources")]
    SourceMismatch(String, String),
    #[error("unknown path `{0}`")]
    UnknownPath(String),
}

/// A finite sum `Σ c_{μ,ν} S_μ S_ν^*` with `s(μ) = s(ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzElement {
    carrier: Arc<Carrier>,
    terms: BTreeMap<(Morphism, Morphism), Coefficient>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn coefficient(re: BigRational, im: BigRational) -> Coefficient {
    Complex::new(re, im)
}

impl ToeplitzElement {
    pub fn zero(graph: &DirectedGraph) -> Self {
        Self::zero_on(Arc::new(Carrier::Graph(graph.clone())))
    }

    pub fn zero_on(carrier: Arc<Carrier>) -> Self {
        ToeplitzElement {
            carrier,
            terms: BTreeMap::new(),
        }
    }

    /// `coeff · S_μ S_ν^*` with paths given as morphisms of the carrier.
    pub fn monomial(
        carrier: Arc<Carrier>,
        mu: Morphism,
        nu: Morphism,
        coeff: Coefficient,
    ) -> Result<Self, ToeplitzError> {
        if mu.source() != nu.source() {
            return Err(ToeplitzError::SourceMismatch(
                carrier.label(&mu),
                carrier.label(&nu),
            ));
        }
        let mut out = Self::zero_on(carrier);
        out.accumulate(mu, nu, coeff);
        Ok(out)
    }

    /// `coeff · S_μ S_ν^*` with paths written as dotted edge ids (`f.a`) or a
    /// vertex id.
    pub fn parse_monomial(
        carrier: Arc<Carrier>,
        mu: &str,
        nu: &str,
        coeff: Coefficient,
    ) -> Result<Self, ToeplitzError> {
        let find = |s: &str| -> Result<Morphism, ToeplitzError> {
            carrier
                .resolve(s)
                .or_else(|| carrier.path(&s.split('.').collect::<Vec<_>>()))
                .ok_or_else(|| ToeplitzError::UnknownPath(s.to_string()))
        };
        let (m, n) = (find(mu)?, find(nu)?);
        Self::monomial(carrier, m, n, coeff)
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
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

    pub fn terms(&self) -> impl Iterator<Item = (&Morphism, &Morphism, &Coefficient)> {
        self.terms.iter().map(|((m, n), c)| (m, n, c))
    }

    pub fn coefficient(&self, mu: &Morphism, nu: &Morphism) -> Coefficient {
        self.terms
            .get(&(mu.clone(), nu.clone()))
            .cloned()
            .unwrap_or_else(Coefficient::zero)
    }

    fn accumulate(&mut self, mu: Morphism, nu: Morphism, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let key = (mu, nu);
        let sum = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    fn same_carrier(&self, other: &Self) -> Result<(), ToeplitzError> {
        if Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier {
            Ok(())
        } else {
            Err(ToeplitzError::CarrierMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ToeplitzError> {
        self.same_carrier(other)?;
        let mut out = self.clone();
        for (m, n, c) in other.terms() {
            out.accumulate(m.clone(), n.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Coefficient) -> Self {
        let mut out = Self::zero_on(self.carrier.clone());
        for (m, n, c) in self.terms() {
            out.accumulate(m.clone(), n.clone(), c * s);
        }
        out
    }
}

/// `Some(rest)` with `long = short ∘ rest` when the word of `short` is a
/// prefix of the word of `long` and the ranges agree.
fn strip_prefix(carrier: &Carrier, long: &Morphism, short: &Morphism) -> Option<Morphism> {
    if long.range() != short.range() || !long.word().starts_with(short.word()) {
        return None;
    }
    let g = carrier.skeleton();
    let rest = &long.word()[short.word().len()..];
    let names: Vec<&str> = rest.iter().map(|&e| g.edge_name(e)).collect();
    if names.is_empty() {
        Some(carrier.identity(short.source()))
    } else {
        carrier.path(&names)
    }
}

fn compose(carrier: &Carrier, a: &Morphism, b: &Morphism) -> Morphism {
    carrier.compose(a, b).expect("prefix cancellation keeps paths composable")
}

/// Product by the prefix-cancellation rule:
/// `(S_μ S_ν^*)(S_α S_β^*)` is `S_{μα'} S_β^*` when `α = να'`,
/// `S_μ S_{βν'}^*` when `ν = αν'`, and zero otherwise.
pub fn te_mul(a: &ToeplitzElement, b: &ToeplitzElement) -> Result<ToeplitzElement, ToeplitzError> {
    a.same_carrier(b)?;
    let carrier = a.carrier.clone();
    let mut out = ToeplitzElement::zero_on(carrier.clone());
    for (mu, nu, c1) in a.terms() {
        for (alpha, beta, c2) in b.terms() {
            let c = c1 * c2;
            if let Some(rest) = strip_prefix(&carrier, alpha, nu) {
                out.accumulate(compose(&carrier, mu, &rest), beta.clone(), c);
            } else if let Some(rest) = strip_prefix(&carrier, nu, alpha) {
                out.accumulate(mu.clone(), compose(&carrier, beta, &rest), c);
            }
        }
    }
    Ok(out)
}

pub fn te_adjoint(a: &ToeplitzElement) -> ToeplitzElement {
    let mut out = ToeplitzElement::zero_on(a.carrier.clone());
    for (mu, nu, c) in a.terms() {
        out.accumulate(nu.clone(), mu.clone(), c.conj());
    }
    out
}

fn to_f64(c: &Coefficient) -> Complex64 {
    Complex64::new(
        c.re.to_f64().expect("finite rational"),
        c.im.to_f64().expect("finite rational"),
    )
}

/// `Σ c · L_μ L_ν^*` on a Fock basis over the same graph.
pub fn te_to_matrix(a: &ToeplitzElement, basis: &FockBasis) -> Result<SparseOperator, ToeplitzError> {
    if a.carrier.as_ref() != basis.carrier().as_ref() {
        return Err(ToeplitzError::CarrierMismatch);
    }
    let n = basis.dim();
    let mut acc = SparseOperator::zeros(n, n);
    for (mu, nu, c) in a.terms() {
        let lm = morphism_op(basis, mu);
        let ln = morphism_op(basis, nu);
        let t = lm.mul(&ln.adjoint()).expect("square operators");
        acc = acc.add(&t.scale(to_f64(c))).expect("same shape");
    }
    Ok(acc)
}

impl fmt::Display for ToeplitzElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, n, c)| {
                format!(
                    "({} + {}i) S_{} S_{}*",
                    c.re,
                    c.im,
                    self.carrier.label(m),
                    self.carrier.label(n)
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
