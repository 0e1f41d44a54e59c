//! Matrix-valued noncommutative polynomials in the generators of a graph or
//! k-graph.

use std::fmt;

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::carrier::Carrier;
use crate::kgraph::Morphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("empty word")]
    EmptyWord,
    #[error("entry ({row}, {col}) outside a {size}x{size} polynomial")]
    EntryOutOfRange { row: usize, col: usize, size: usize },
    #[error("shape mismatch: {left}x{left} against {right}x{right}")]
    ShapeMismatch { left: usize, right: usize },
}

/// A generator symbol, possibly adjoined.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: String,
    pub adjoint: bool,
}

impl Letter {
    pub fn new(symbol: impl Into<String>) -> Self {
        Letter {
            symbol: symbol.into(),
            adjoint: false,
        }
    }

    pub fn star(symbol: impl Into<String>) -> Self {
        Letter {
            symbol: symbol.into(),
            adjoint: true,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}{}", self.symbol, if self.adjoint { "*" } else { "" })
    }
}

/// `coeff · S_{w_1} S_{w_2} ⋯` with the word read as an operator product.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub word: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcPolynomial {
    size: usize,
    entries: Vec<Vec<Term>>,
}

impl NcPolynomial {
    /// The zero `size x size` polynomial.
    pub fn zero(size: usize) -> Self {
        assert!(size > 0, "polynomial matrices are at least 1x1");
        NcPolynomial {
            size,
            entries: vec![Vec::new(); size * size],
        }
    }

    /// A 1x1 polynomial from `(coefficient, word)` pairs.
    pub fn scalar<I>(terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Complex64, Vec<Letter>)>,
    {
        let mut p = Self::zero(1);
        for (c, w) in terms {
            p.add_term(0, 0, c, w)?;
        }
        Ok(p)
    }

    /// Sum of the given symbols with unit coefficients, e.g. `["v", "e"]`
    /// for `P_v + L_e`.
    pub fn sum_of(symbols: &[&str]) -> Self {
        Self::scalar(
            symbols
                .iter()
                .map(|s| (Complex64::new(1.0, 0.0), vec![Letter::new(*s)])),
        )
        .expect("single letters are nonempty words")
    }

    pub fn add_term(
        &mut self,
        row: usize,
        col: usize,
        coeff: Complex64,
        word: Vec<Letter>,
    ) -> Result<(), PolyError> {
        if word.is_empty() {
            return Err(PolyError::EmptyWord);
        }
        if row >= self.size || col >= self.size {
            return Err(PolyError::EntryOutOfRange {
                row,
                col,
                size: self.size,
            });
        }
        self.entries[row * self.size + col].push(Term { coeff, word });
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, row: usize, col: usize) -> &[Term] {
        &self.entries[row * self.size + col]
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Term)> {
        self.entries.iter().enumerate().flat_map(move |(k, ts)| {
            ts.iter().map(move |t| (k / self.size, k % self.size, t))
        })
    }

    pub fn add(&self, other: &NcPolynomial) -> Result<Self, PolyError> {
        if self.size != other.size {
            return Err(PolyError::ShapeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        let mut out = self.clone();
        for (k, ts) in other.entries.iter().enumerate() {
            out.entries[k].extend(ts.iter().cloned());
        }
        Ok(out)
    }

    pub fn is_adjoint_free(&self) -> bool {
        self.terms().all(|(_, _, t)| t.word.iter().all(|l| !l.adjoint))
    }

    /// Every symbol in the polynomial, sorted and deduplicated.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .terms()
            .flat_map(|(_, _, t)| t.word.iter().map(|l| l.symbol.as_str()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest total degree of a word, counting `δ` of each symbol.
    pub fn degree(&self, carrier: &Carrier) -> Result<usize, PolyError> {
        let mut best = 0;
        for (_, _, t) in self.terms() {
            let mut d = 0;
            for l in &t.word {
                d += resolve(carrier, &l.symbol)?.grading();
            }
            best = best.max(d);
        }
        Ok(best)
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |ts: &[Term]| -> String {
            if ts.is_empty() {
                return "0".to_string();
            }
            ts.iter()
                .map(|t| {
                    let w: Vec<String> = t.word.iter().map(|l| l.to_string()).collect();
                    format!("({}){}", t.coeff, w.join(""))
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        if self.size == 1 {
            return write!(f, "{}", show(&self.entries[0]));
        }
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|c| show(self.entry(r, c))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn resolve(carrier: &Carrier, symbol: &str) -> Result<Morphism, PolyError> {
    carrier
        .resolve(symbol)
        .ok_or_else(|| PolyError::UnknownSymbol(symbol.to_string()))
}

const COEFFICIENTS: [Complex64; 6] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(0.5, 0.0),
    Complex64::new(-0.5, 0.0),
];

/// Shape of the random adjoint-free polynomials used by the suites.
#[derive(Debug, Clone, Copy)]
pub struct RandomPolySpec {
    pub size: usize,
    pub max_degree: usize,
    pub max_terms: usize,
}

/// A seeded random adjoint-free polynomial. Each entry gets between 0 and
/// `max_terms` terms (at least one overall); words are composable paths of
/// a uniformly chosen degree, written edge by edge, and degree-0 words are
/// vertex projections.
pub fn random_polynomial(carrier: &Carrier, spec: RandomPolySpec, rng: &mut ChaCha8Rng) -> NcPolynomial {
    let g = carrier.skeleton();
    let mut by_level: Vec<Vec<Morphism>> = Vec::new();
    for level in 0..=spec.max_degree {
        let paths: Vec<Morphism> = g
            .vertices()
            .flat_map(|v| carrier.morphisms_at(level, v))
            .collect();
        if level > 0 && paths.is_empty() {
            break;
        }
        by_level.push(paths);
    }
    let word_of = |m: &Morphism| -> Vec<Letter> {
        if m.is_vertex() {
            vec![Letter::new(g.vertex_name(m.range()))]
        } else {
            m.word().iter().map(|&e| Letter::new(g.edge_name(e))).collect()
        }
    };
    let mut p = NcPolynomial::zero(spec.size);
    let cells = spec.size * spec.size;
    let forced = rng.random_range(0..cells);
    for cell in 0..cells {
        let low = usize::from(cell == forced);
        let count = rng.random_range(low..=spec.max_terms.max(1));
        for _ in 0..count {
            let level = rng.random_range(0..by_level.len());
            let m = by_level[level].choose(rng).expect("levels are nonempty");
            let coeff = *COEFFICIENTS.choose(rng).unwrap();
            p.add_term(cell / spec.size, cell % spec.size, coeff, word_of(m))
                .expect("paths give nonempty words");
        }
    }
    p
}

/// `count` seeded polynomials of degree at most `max_degree`, alternating
/// between scalar and 2x2 shapes.
pub fn random_family(carrier: &Carrier, count: usize, max_degree: usize, seed: u64) -> Vec<NcPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let spec = RandomPolySpec {
                size: if i % 2 == 0 { 1 } else { 2 },
                max_degree,
                max_terms: 3,
            };
            random_polynomial(carrier, spec, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn empty_words_are_rejected() {
        let mut p = NcPolynomial::zero(2);
        assert_eq!(
            p.add_term(0, 0, Complex64::new(1.0, 0.0), vec![]),
            Err(PolyError::EmptyWord)
        );
        assert!(matches!(
            p.add_term(2, 0, Complex64::new(1.0, 0.0), vec![Letter::new("e")]),
            Err(PolyError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn degree_counts_edges() {
        let c = Carrier::from(fixtures::loop1());
        let p = NcPolynomial::scalar([
            (Complex64::new(1.0, 0.0), vec![Letter::new("v")]),
            (
                Complex64::new(1.0, 0.0),
                vec![Letter::new("e"), Letter::star("e"), Letter::new("e")],
            ),
        ])
        .unwrap();
        assert_eq!(p.degree(&c), Ok(3));
        assert!(!p.is_adjoint_free());
        assert_eq!(p.symbols(), vec!["e", "v"]);
        let q = NcPolynomial::sum_of(&["x"]);
        assert_eq!(q.degree(&c), Err(PolyError::UnknownSymbol("x".into())));
    }

    #[test]
    fn random_family_is_seeded() {
        let c = Carrier::from(fixtures::cuntz2());
        let a = random_family(&c, 6, 3, 7);
        let b = random_family(&c, 6, 3, 7);
        assert_eq!(a, b);
        assert_ne!(a, random_family(&c, 6, 3, 8));
        for (i, p) in a.iter().enumerate() {
            assert_eq!(p.size(), if i % 2 == 0 { 1 } else { 2 });
            assert!(p.is_adjoint_free());
            assert!(p.degree(&c).unwrap() <= 3);
            assert!(p.terms().count() > 0);
        }
    }

    #[test]
    fn shapes_must_agree() {
        let a = NcPolynomial::zero(1);
        let b = NcPolynomial::zero(2);
        assert!(matches!(a.add(&b), Err(PolyError::ShapeMismatch { .. })));
    }
}
