//! Elements of the free operated Lie algebra in the NLSBW basis, normalized
//! through the associative envelope.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use thiserror::Error;

use crate::lyndon::{is_alsbw, nlsbw_of, standard_split};
use crate::order::{compare, OrderKind};
use crate::scalar::{Scalar, ScalarError};
use crate::word::{Alphabet, Prime, StarWord, Tree, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("not a Lie element: leading word {0} is not a Lyndon-Shirshov bracketed word")]
    NotLie(String),
    #[error("operation needs a nonzero polynomial")]
    Zero,
    #[error("{0} is not a Lyndon-Shirshov bracketed word")]
    NotBasis(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("syntax error in polynomial: {0}")]
    Syntax(String),
}

/// Finite linear combination of associative words; no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssocPoly {
    terms: HashMap<Word, Scalar>,
}

impl AssocPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(w: Word, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
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

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    /// Terms sorted descending under `kind`.
    pub fn sorted(&self, kind: OrderKind) -> Vec<(Word, Scalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(w, c)| (w.clone(), c.clone())).collect();
        v.sort_by(|a, b| compare(kind, &b.0, &a.0));
        v
    }

    pub fn leading(&self, kind: OrderKind) -> Option<(&Word, &Scalar)> {
        self.terms
            .iter()
            .max_by(|a, b| compare(kind, a.0, b.0))
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                let sum = e.get().add_ref(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &AssocPoly, c: &Scalar) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), d.mul_ref(c));
        }
    }

    pub fn mul(&self, other: &AssocPoly) -> AssocPoly {
        let mut out = AssocPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a.mul_ref(b));
            }
        }
        out
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &AssocPoly) -> AssocPoly {
        let mut out = self.mul(other);
        out.add_scaled(&other.mul(self), &Scalar::from_i64(-1));
        out
    }

    /// Applies the operator to every word (the operator is linear).
    pub fn op(&self) -> AssocPoly {
        AssocPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Word::op(w.clone()), c.clone()))
                .collect(),
        }
    }

    /// `q⟨self⟩`, extended linearly.
    pub fn placed(&self, q: &StarWord) -> AssocPoly {
        AssocPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (q.substitute(w), c.clone()))
                .collect(),
        }
    }
}

/// Expansion of a bracketed word into the associative envelope: pairs become
/// commutators and the operator acts linearly.
pub fn expand(t: &Tree) -> AssocPoly {
    match t {
        Tree::Leaf(l) => AssocPoly::monomial(Word::letter(*l), Scalar::one()),
        Tree::Op(inner) => expand(inner).op(),
        Tree::Pair(a, b) => expand(a).commutator(&expand(b)),
    }
}

type BasisCache = DashMap<(OrderKind, Word), Arc<AssocPoly>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// Drops memoized basis expansions of words above degree `max_deg`.
pub fn trim_basis_cache(max_deg: u32) {
    basis_cache().retain(|(_, w), _| w.deg() <= max_deg);
}

/// `expand(nlsbw_of(w))`, memoized. `w` must be ALSBW.
pub fn expand_basis(w: &Word, kind: OrderKind) -> Arc<AssocPoly> {
    if let Some(hit) = basis_cache().get(&(kind, w.clone())) {
        return hit.clone();
    }
    let value = match w.primes() {
        [Prime::Letter(_)] => AssocPoly::monomial(w.clone(), Scalar::one()),
        [Prime::Op(inner)] => expand_basis(inner, kind).op(),
        primes => {
            let k = standard_split(primes, kind);
            let left = Word::new(primes[..k].to_vec());
            let right = Word::new(primes[k..].to_vec());
            expand_basis(&left, kind).commutator(&expand_basis(&right, kind))
        }
    };
    let value = Arc::new(value);
    basis_cache().insert((kind, w.clone()), value.clone());
    value
}

/// Word keyed by a monomial order, for max-heaps.
struct Keyed {
    word: Word,
    kind: OrderKind,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for Keyed {}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self.kind, &self.word, &other.word)
    }
}

/// Element of the free operated Lie algebra: NLSBW basis terms, identified by
/// their underlying ALSBW words, sorted descending under `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiePoly {
    kind: OrderKind,
    terms: Vec<(Word, Scalar)>,
}

impl LiePoly {
    pub fn zero(kind: OrderKind) -> Self {
        LiePoly {
            kind,
            terms: Vec::new(),
        }
    }

    /// The basis element `[w]`.
    pub fn basis(w: &Word, kind: OrderKind) -> Result<Self, LieError> {
        if !is_alsbw(w, kind) {
            return Err(LieError::NotBasis(format!("{w:?}")));
        }
        Ok(LiePoly {
            kind,
            terms: vec![(w.clone(), Scalar::one())],
        })
    }

    /// Any bracketed word, normalized onto the basis.
    pub fn from_tree(t: &Tree, kind: OrderKind) -> Result<Self, LieError> {
        LiePoly::from_assoc(&expand(t), kind)
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
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

    /// Basis words with coefficients, greatest first.
    pub fn terms(&self) -> &[(Word, Scalar)] {
        &self.terms
    }

    /// Basis trees with coefficients, greatest first.
    pub fn tree_terms(&self) -> Vec<(Tree, Scalar)> {
        self.terms
            .iter()
            .map(|(w, c)| (nlsbw_of(w, self.kind).expect("basis word"), c.clone()))
            .collect()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms
            .iter()
            .find(|(u, _)| u == w)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Leading word and coefficient. By triangularity of the basis this is
    /// also the leading term of the envelope expansion.
    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.first().map(|(w, c)| (w, c))
    }

    pub fn try_leading(&self) -> Result<(&Word, &Scalar), LieError> {
        self.leading().ok_or(LieError::Zero)
    }

    pub fn leading_word(&self) -> Option<&Word> {
        self.terms.first().map(|(w, _)| w)
    }

    pub fn expand(&self) -> AssocPoly {
        let mut out = AssocPoly::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&expand_basis(w, self.kind), c);
        }
        out
    }

    /// Triangular change of basis from the envelope. Fails when `p` is not
    /// in the image of the Lie algebra.
    pub fn from_assoc(p: &AssocPoly, kind: OrderKind) -> Result<Self, LieError> {
        let mut rest: HashMap<Word, Scalar> = p.terms.clone();
        let mut heap: BinaryHeap<Keyed> = rest
            .keys()
            .map(|w| Keyed {
                word: w.clone(),
                kind,
            })
            .collect();
        let mut terms = Vec::new();
        while let Some(Keyed { word, .. }) = heap.pop() {
            let Some(c) = rest.remove(&word) else {
                continue;
            };
            if !is_alsbw(&word, kind) {
                return Err(LieError::NotLie(format!("{word:?}")));
            }
            let basis = expand_basis(&word, kind);
            for (u, d) in basis.iter() {
                if u == &word {
                    continue;
                }
                let delta = d.mul_ref(&c);
                match rest.entry(u.clone()) {
                    Entry::Occupied(mut e) => {
                        let v = e.get().sub_ref(&delta);
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                    Entry::Vacant(e) => {
                        e.insert(delta.neg_ref());
                        heap.push(Keyed {
                            word: u.clone(),
                            kind,
                        });
                    }
                }
            }
            terms.push((word, c));
        }
        Ok(LiePoly { kind, terms })
    }

    pub fn bracket(&self, other: &LiePoly) -> LiePoly {
        let p = self.expand().commutator(&other.expand());
        LiePoly::from_assoc(&p, self.kind).expect("the bracket of Lie elements is a Lie element")
    }

    /// Applies the operator: `⌊[w]⌋` is the basis element of the prime `⌊w⌋`,
    /// and the order on single operator primes follows their payloads.
    pub fn op_apply(&self) -> LiePoly {
        LiePoly {
            kind: self.kind,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Word::op(w.clone()), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> LiePoly {
        if c.is_zero() {
            return LiePoly::zero(self.kind);
        }
        LiePoly {
            kind: self.kind,
            terms: self
                .terms
                .iter()
                .map(|(w, d)| (w.clone(), d.mul_ref(c)))
                .collect(),
        }
    }

    /// `c·f + g`.
    pub fn axpy(c: &Scalar, f: &LiePoly, g: &LiePoly) -> LiePoly {
        let kind = g.kind;
        let mut terms = Vec::with_capacity(f.terms.len() + g.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < f.terms.len() || j < g.terms.len() {
            let ord = match (f.terms.get(i), g.terms.get(j)) {
                (Some(a), Some(b)) => compare(kind, &a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    let (w, d) = &f.terms[i];
                    let v = d.mul_ref(c);
                    if !v.is_zero() {
                        terms.push((w.clone(), v));
                    }
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(g.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let v = f.terms[i].1.mul_ref(c).add_ref(&g.terms[j].1);
                    if !v.is_zero() {
                        terms.push((g.terms[j].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        LiePoly { kind, terms }
    }

    pub fn add(&self, other: &LiePoly) -> LiePoly {
        LiePoly::axpy(&Scalar::one(), self, other)
    }

    pub fn sub(&self, other: &LiePoly) -> LiePoly {
        LiePoly::axpy(&Scalar::from_i64(-1), other, self)
    }

    pub fn neg(&self) -> LiePoly {
        self.scale(&Scalar::from_i64(-1))
    }

    /// Divides by the leading coefficient.
    pub fn make_monic(&self) -> Result<LiePoly, LieError> {
        let (_, c) = self.try_leading()?;
        if c.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&c.inv()?))
    }

    /// Substitutes a rational value for the parameter in every coefficient.
    pub fn specialize(&self, value: &num_rational::BigRational) -> Result<LiePoly, LieError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (w, c) in &self.terms {
            let v = c.specialize(value)?;
            if !v.is_zero() {
                terms.push((w.clone(), v));
            }
        }
        Ok(LiePoly {
            kind: self.kind,
            terms,
        })
    }

    /// `c1 * tree1 + c2 * tree2 + ...`, or `0`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.tree_terms()
            .iter()
            .map(|(t, c)| format!("{c} * {}", alphabet.fmt_tree(t)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `c1 * tree1 + c2 * tree2 ...`; a term without `*` has
    /// coefficient 1, or -1 when written `-tree`. Trees need not be basis
    /// elements; the result is normalized.
    pub fn parse(alphabet: &Alphabet, text: &str, kind: OrderKind) -> Result<LiePoly, LieError> {
        if text.trim() == "0" {
            return Ok(LiePoly::zero(kind));
        }
        let mut total = AssocPoly::zero();
        for term in split_top_level(text, '+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(LieError::Syntax(format!("empty term in {text:?}")));
            }
            let (coeff, tree) = match last_top_level(term, '*') {
                Some(i) => {
                    let c: Scalar = term[..i].trim().parse()?;
                    (c, &term[i + 1..])
                }
                None => match term.strip_prefix('-') {
                    Some(rest) => (Scalar::from_i64(-1), rest),
                    None => (Scalar::one(), term),
                },
            };
            let t = alphabet.parse_tree(tree.trim())?;
            total.add_scaled(&expand(&t), &coeff);
        }
        LiePoly::from_assoc(&total, kind)
    }
}

fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn last_top_level(text: &str, sep: char) -> Option<usize> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}
