//! Generators as sparse operators on truncated bases, polynomial
//! evaluation, and the gauge action.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::carrier::Carrier;
use crate::graph::VertexId;
use crate::kgraph::Morphism;
use crate::path_space::{FockBasis, GammaBasis};
use crate::poly::{resolve, Letter, NcPolynomial, PolyError};
use crate::sparse::{SparseError, SparseOperator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error("phase {0} is not on the unit circle")]
    NonUnimodular(Complex64),
    #[error("expected {expected} phase coordinates, got {got}")]
    WrongRank { got: usize, expected: usize },
    #[error("averaging order {order} too small, need more than {required}")]
    OrderTooSmall { order: usize, required: usize },
}

/// A truncated orthonormal basis on which the path category acts by
/// partial bijections of basis vectors.
pub trait Representation {
    fn carrier(&self) -> &Arc<Carrier>;

    fn dim(&self) -> usize;

    /// Index of `g · ξ_j`, or `None` when the product vanishes or leaves
    /// the truncation.
    fn act(&self, g: &Morphism, j: usize) -> Option<usize>;

    /// Range vertex of the label of `ξ_j`.
    fn range(&self, j: usize) -> VertexId;

    /// Exponent `m` with `U_t ξ_j = t^m ξ_j`.
    fn phase_exponent(&self, j: usize) -> Vec<i64>;

    /// Indices whose labels stay in the truncation after prepending any
    /// morphism of degree at most `margin`.
    fn interior(&self, margin: usize) -> Vec<usize>;

    fn basis_name(&self, j: usize) -> String;
}

impl Representation for FockBasis {
    fn carrier(&self) -> &Arc<Carrier> {
        FockBasis::carrier(self)
    }

    fn dim(&self) -> usize {
        FockBasis::dim(self)
    }

    fn act(&self, g: &Morphism, j: usize) -> Option<usize> {
        let w = self.label(j);
        if g.source() != w.range() || g.grading() + w.grading() > self.truncation() {
            return None;
        }
        let gw = FockBasis::carrier(self).compose(g, w).ok()?;
        self.index_of(&gw)
    }

    fn range(&self, j: usize) -> VertexId {
        self.label(j).range()
    }

    fn phase_exponent(&self, j: usize) -> Vec<i64> {
        self.label(j).degree().iter().map(|&d| -(d as i64)).collect()
    }

    fn interior(&self, margin: usize) -> Vec<usize> {
        FockBasis::interior(self, margin)
    }

    fn basis_name(&self, j: usize) -> String {
        FockBasis::carrier(self).label(self.label(j))
    }
}

impl Representation for GammaBasis {
    fn carrier(&self) -> &Arc<Carrier> {
        GammaBasis::carrier(self)
    }

    fn dim(&self) -> usize {
        GammaBasis::dim(self)
    }

    fn act(&self, g: &Morphism, j: usize) -> Option<usize> {
        let c = self.class(j);
        if g.source() != c.numerator.range() {
            return None;
        }
        let num = self.kgraph().compose(g, &c.numerator).ok()?;
        let reduced = self.reduce(num, c.vertex, c.index).ok()?;
        self.index_of(&reduced)
    }

    fn range(&self, j: usize) -> VertexId {
        self.class(j).numerator.range()
    }

    fn phase_exponent(&self, j: usize) -> Vec<i64> {
        let c = self.class(j);
        let mu = self.tails().prefix(c.vertex, c.index);
        mu.degree()
            .iter()
            .zip(c.numerator.degree())
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect()
    }

    fn interior(&self, margin: usize) -> Vec<usize> {
        GammaBasis::interior(self, margin, 0)
    }

    fn basis_name(&self, j: usize) -> String {
        self.class_name(j)
    }
}

/// The operator of a morphism: `ξ_j ↦ ξ_{g·j}`, zero columns elsewhere.
pub fn morphism_op(rep: &dyn Representation, g: &Morphism) -> SparseOperator {
    let n = rep.dim();
    let entries = (0..n).filter_map(|j| rep.act(g, j).map(|i| (i, j, Complex64::new(1.0, 0.0))));
    SparseOperator::from_triplets(n, n, entries).expect("the action is injective on basis vectors")
}

/// `L_g` (or `S'_g`) for an edge id, vertex id, or dotted path such as
/// `f.a`.
pub fn creation_op(rep: &dyn Representation, symbol: &str) -> Result<SparseOperator, FockError> {
    let carrier = rep.carrier();
    let m = match carrier.resolve(symbol) {
        Some(m) => m,
        None => {
            let parts: Vec<&str> = symbol.split('.').collect();
            if parts.len() < 2 {
                return Err(PolyError::UnknownSymbol(symbol.to_string()).into());
            }
            match carrier.path(&parts) {
                Some(m) => m,
                None => {
                    // Known edges that do not compose give the zero operator.
                    if parts.iter().all(|p| carrier.skeleton().edge_by_name(p).is_some()) {
                        return Ok(SparseOperator::zeros(rep.dim(), rep.dim()));
                    }
                    return Err(PolyError::UnknownSymbol(symbol.to_string()).into());
                }
            }
        }
    };
    Ok(morphism_op(rep, &m))
}

/// Diagonal projection onto the labels with range `v`.
pub fn vertex_projection(rep: &dyn Representation, v: VertexId) -> SparseOperator {
    morphism_op(rep, &rep.carrier().identity(v))
}

/// `R_w: ξ_u ↦ ξ_{u w}` from `domain` into `codomain`.
pub fn right_op(domain: &FockBasis, codomain: &FockBasis, w: &Morphism) -> SparseOperator {
    let carrier = domain.carrier();
    let entries = (0..domain.dim()).filter_map(|j| {
        let u = domain.label(j);
        if u.source() != w.range() {
            return None;
        }
        let uw = carrier.compose(u, w).ok()?;
        codomain
            .index_of(&uw)
            .map(|i| (i, j, Complex64::new(1.0, 0.0)))
    });
    SparseOperator::from_triplets(codomain.dim(), domain.dim(), entries)
        .expect("right concatenation is injective")
}

/// Evaluates `p` on `rep` as one operator on the `n`-fold ampliation.
///
/// Maximal runs of unstarred letters are composed into one morphism before
/// being represented, and runs of starred letters become the adjoint of
/// the reversed composite; words that do not compose give zero. Each run is
/// therefore the compression of the corresponding generator, even when the
/// truncation is not closed under removing letters.
pub fn eval_poly(p: &NcPolynomial, rep: &dyn Representation) -> Result<SparseOperator, FockError> {
    let n = rep.dim();
    let carrier = rep.carrier().clone();
    let mut cache: HashMap<Morphism, SparseOperator> = HashMap::new();
    let size = p.size();
    let mut blocks = Vec::new();
    for r in 0..size {
        for c in 0..size {
            let mut acc = SparseOperator::zeros(n, n);
            for t in p.entry(r, c) {
                let w = eval_word(&carrier, rep, &t.word, &mut cache)?;
                acc = acc.add(&w.scale(t.coeff))?;
            }
            if !acc.is_zero() {
                blocks.push((r, c, acc));
            }
        }
    }
    Ok(SparseOperator::blocks(size, (n, n), &blocks)?)
}

fn eval_word(
    carrier: &Carrier,
    rep: &dyn Representation,
    word: &[Letter],
    cache: &mut HashMap<Morphism, SparseOperator>,
) -> Result<SparseOperator, FockError> {
    let n = rep.dim();
    let mut resolved = Vec::with_capacity(word.len());
    for l in word {
        resolved.push((resolve(carrier, &l.symbol)?, l.adjoint));
    }
    let mut out: Option<SparseOperator> = None;
    let mut start = 0;
    while start < resolved.len() {
        let star = resolved[start].1;
        let mut end = start;
        while end < resolved.len() && resolved[end].1 == star {
            end += 1;
        }
        let run = &resolved[start..end];
        let ordered: Vec<&Morphism> = if star {
            run.iter().rev().map(|(m, _)| m).collect()
        } else {
            run.iter().map(|(m, _)| m).collect()
        };
        let mut composite = Some(ordered[0].clone());
        for m in &ordered[1..] {
            composite = composite.and_then(|acc| carrier.compose(&acc, m).ok());
        }
        let Some(composite) = composite else {
            return Ok(SparseOperator::zeros(n, n));
        };
        let op = cache
            .entry(composite.clone())
            .or_insert_with(|| morphism_op(rep, &composite));
        let op = if star { op.adjoint() } else { op.clone() };
        out = Some(match out {
            None => op,
            Some(acc) => acc.mul(&op)?,
        });
        start = end;
    }
    Ok(out.expect("words are nonempty"))
}

/// Diagonal gauge unitary `U_t` on a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeUnitary {
    phase: Vec<Complex64>,
    diagonal: Vec<Complex64>,
}

impl GaugeUnitary {
    pub fn phase(&self) -> &[Complex64] {
        &self.phase
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn operator(&self) -> SparseOperator {
        SparseOperator::diagonal(&self.diagonal)
    }

    /// `U^* A U`.
    pub fn conjugate(&self, a: &SparseOperator) -> SparseOperator {
        let entries = a
            .entries()
            .map(|(r, c, v)| (r, c, self.diagonal[r].conj() * v * self.diagonal[c]));
        SparseOperator::from_triplets(a.rows(), a.cols(), entries).expect("same pattern")
    }
}

const UNIT_TOLERANCE: f64 = 1e-12;

fn phase_power(phase: &[Complex64], exponent: &[i64]) -> Complex64 {
    phase
        .iter()
        .zip(exponent)
        .map(|(t, &m)| t.powi(m as i32))
        .product()
}

pub fn gauge_unitary(rep: &dyn Representation, phase: &[Complex64]) -> Result<GaugeUnitary, FockError> {
    let k = rep.carrier().rank();
    if phase.len() != k {
        return Err(FockError::WrongRank {
            got: phase.len(),
            expected: k,
        });
    }
    if let Some(&t) = phase.iter().find(|t| (t.norm() - 1.0).abs() > UNIT_TOLERANCE) {
        return Err(FockError::NonUnimodular(t));
    }
    let diagonal = (0..rep.dim())
        .map(|j| phase_power(phase, &rep.phase_exponent(j)))
        .collect();
    Ok(GaugeUnitary {
        phase: phase.to_vec(),
        diagonal,
    })
}

/// The average of `U_t^* A U_t` over the grid of `order`-th roots of unity
/// in each coordinate, evaluated through its closed form: an entry survives
/// exactly when the phase exponents of its row and column agree modulo
/// `order` in every coordinate.
pub fn gauge_expectation(
    a: &SparseOperator,
    rep: &dyn Representation,
    order: usize,
) -> Result<SparseOperator, FockError> {
    let dim = rep.dim();
    let exponents: Vec<Vec<i64>> = (0..dim).map(|j| rep.phase_exponent(j)).collect();
    let widest = exponents
        .iter()
        .flatten()
        .map(|m| m.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    if order <= 2 * widest {
        return Err(FockError::OrderTooSmall {
            order,
            required: 2 * widest,
        });
    }
    let q = order as i64;
    let kept = a.entries().filter(|&(r, c, _)| {
        let (er, ec) = (&exponents[r % dim], &exponents[c % dim]);
        er.iter().zip(ec).all(|(x, y)| (x - y).rem_euclid(q) == 0)
    });
    Ok(SparseOperator::from_triplets(a.rows(), a.cols(), kept)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::path_space::{choose_tails, gamma_basis};
    use std::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn fock(g: impl Into<Carrier>, n: usize) -> FockBasis {
        FockBasis::new(Arc::new(g.into()), n)
    }

    #[test]
    fn loop_shift() {
        let b = fock(fixtures::loop1(), 3);
        let l = creation_op(&b, "e").unwrap();
        let ones: Vec<_> = l.entries().map(|(r, c, _)| (r, c)).collect();
        assert_eq!(ones, vec![(1, 0), (2, 1), (3, 2)]);
        assert!(creation_op(&b, "q").is_err());
    }

    #[test]
    fn flag_projection_has_rank_one() {
        let g = fixtures::flag();
        let x = g.vertex_by_name("x").unwrap();
        let b = fock(g, 2);
        let p = vertex_projection(&b, x);
        assert_eq!(p.nnz(), 1);
        assert_eq!(b.label(p.entries().next().unwrap().0).range(), x);
    }

    #[test]
    fn dotted_paths() {
        let b = fock(fixtures::flag(), 3);
        let fa = creation_op(&b, "f.a").unwrap();
        let prod = creation_op(&b, "f")
            .unwrap()
            .mul(&creation_op(&b, "a").unwrap())
            .unwrap();
        assert_eq!(fa, prod);
        assert!(creation_op(&b, "a.f").unwrap().is_zero());
    }

    #[test]
    fn torus_gamma_cancels() {
        let kg = fixtures::torus2();
        let tails = choose_tails(&kg, 1);
        let gb = gamma_basis(&kg, &tails, 1, 1).unwrap();
        let v = kg.skeleton().vertex_by_name("v").unwrap();
        let src = gb
            .index_of(&gb.reduce(kg.identity(v), v, 1).unwrap())
            .unwrap();
        let dst = gb
            .index_of(&gb.reduce(kg.identity(v), v, 0).unwrap())
            .unwrap();
        let sb = creation_op(&gb, "b").unwrap();
        assert_eq!(sb.get(dst, src), one());
        assert_eq!(gb.phase_exponent(src), vec![1, 0]);
    }

    #[test]
    fn bidiagonal_poly() {
        let b = fock(fixtures::loop1(), 4);
        let a = eval_poly(&NcPolynomial::sum_of(&["v", "e"]), &b).unwrap();
        assert_eq!(a.nnz(), 9);
        for i in 0..5 {
            assert_eq!(a.get(i, i), one());
        }
        for i in 0..4 {
            assert_eq!(a.get(i + 1, i), one());
        }
    }

    #[test]
    fn orthogonal_loops_give_zero() {
        let b = fock(fixtures::cuntz2(), 3);
        let p = NcPolynomial::scalar([(one(), vec![Letter::star("e1"), Letter::new("e2")])]).unwrap();
        assert!(eval_poly(&p, &b).unwrap().is_zero());
    }

    #[test]
    fn ampliated_blocks() {
        let b = fock(fixtures::loop1(), 2);
        let mut p = NcPolynomial::zero(2);
        p.add_term(0, 0, one(), vec![Letter::new("e")]).unwrap();
        p.add_term(0, 1, one(), vec![Letter::new("v")]).unwrap();
        p.add_term(1, 1, one(), vec![Letter::new("e")]).unwrap();
        let a = eval_poly(&p, &b).unwrap();
        assert_eq!(a.shape(), (6, 6));
        let l = creation_op(&b, "e").unwrap();
        let rows: Vec<usize> = (0..3).collect();
        let lower: Vec<usize> = (3..6).collect();
        assert_eq!(a.restrict(&rows, &rows), l);
        assert_eq!(a.restrict(&lower, &lower), l);
        assert_eq!(a.restrict(&rows, &lower), SparseOperator::identity(3));
        assert!(a.restrict(&lower, &rows).is_zero());
    }

    #[test]
    fn gauge_on_loop() {
        let b = fock(fixtures::loop1(), 2);
        let u = gauge_unitary(&b, &[Complex64::new(-1.0, 0.0)]).unwrap();
        assert_eq!(u.diagonal(), &[one(), -one(), one()]);
        assert!(matches!(
            gauge_unitary(&b, &[Complex64::new(2.0, 0.0)]),
            Err(FockError::NonUnimodular(_))
        ));
        assert!(matches!(
            gauge_unitary(&b, &[one(), one()]),
            Err(FockError::WrongRank { .. })
        ));
        let z = Complex64::from_polar(1.0, 0.7);
        let u = gauge_unitary(&b, &[z]).unwrap();
        let l = creation_op(&b, "e").unwrap();
        assert!(u.conjugate(&l).sub(&l.scale(z)).unwrap().max_abs() <= 1e-15);
    }

    #[test]
    fn expectation_keeps_degree_zero() {
        let b = fock(fixtures::loop1(), 4);
        let l = creation_op(&b, "e").unwrap();
        let q = 2 * 4 + 2;
        assert!(gauge_expectation(&l, &b, q).unwrap().is_zero());
        let llstar = l.mul(&l.adjoint()).unwrap();
        assert_eq!(gauge_expectation(&llstar, &b, q).unwrap(), llstar);
        assert!(matches!(
            gauge_expectation(&l, &b, 8),
            Err(FockError::OrderTooSmall { .. })
        ));
    }

    fn grid_average(a: &SparseOperator, rep: &dyn Representation, q: usize) -> SparseOperator {
        let k = rep.carrier().rank();
        let mut acc = SparseOperator::zeros(a.rows(), a.cols());
        let total = q.pow(k as u32);
        for idx in 0..total {
            let mut rest = idx;
            let phase: Vec<Complex64> = (0..k)
                .map(|_| {
                    let j = rest % q;
                    rest /= q;
                    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64)
                })
                .collect();
            let u = gauge_unitary(rep, &phase).unwrap();
            acc = acc.add(&u.conjugate(a)).unwrap();
        }
        acc.scale(Complex64::new(1.0 / total as f64, 0.0))
    }

    #[test]
    fn expectation_matches_literal_grid_average() {
        let kg = fixtures::torus2();
        let tails = choose_tails(&kg, 2);
        let gb = gamma_basis(&kg, &tails, 2, 2).unwrap();
        let sb = creation_op(&gb, "b").unwrap();
        let sr = creation_op(&gb, "r").unwrap();
        let a = sb
            .add(&sb.mul(&sb.adjoint()).unwrap())
            .unwrap()
            .add(&sr.adjoint().mul(&sb).unwrap())
            .unwrap();
        let q = 6;
        let exact = gauge_expectation(&a, &gb, q).unwrap();
        let literal = grid_average(&a, &gb, q);
        assert!(exact.sub(&literal).unwrap().max_abs() <= 1e-12);
        assert_eq!(exact, sb.mul(&sb.adjoint()).unwrap());
    }

    #[test]
    fn right_ops_commute_with_left() {
        let g = fixtures::cuntz2();
        let c = Arc::new(Carrier::from(g));
        let small = FockBasis::new(c.clone(), 3);
        let big = FockBasis::new(c.clone(), 5);
        let w = c.path(&["e1", "e2"]).unwrap();
        let r = right_op(&small, &big, &w);
        assert!(r
            .adjoint()
            .mul(&r)
            .unwrap()
            .sub(&SparseOperator::identity(small.dim()))
            .unwrap()
            .is_zero());
        let inner: Vec<usize> = small.interior(1);
        for e in ["e1", "e2"] {
            let ls = creation_op(&small, e).unwrap();
            let lb = creation_op(&big, e).unwrap();
            let lhs = lb.mul(&r).unwrap();
            let rhs = r.mul(&ls).unwrap();
            let all: Vec<usize> = (0..big.dim()).collect();
            assert!(lhs.restrict(&all, &inner).sub(&rhs.restrict(&all, &inner)).unwrap().is_zero());
        }
    }
}
