//! Lyndon-Shirshov words over primes: recognition, standard bracketing, and
//! bounded enumeration of the bracketed variants.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{cmp_primes, compare, lex_cmp, OrderKind};
use crate::word::{Letter, Prime, Tree, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LyndonError {
    #[error("{0} is not a Lyndon-Shirshov word")]
    NotAlsw(String),
    #[error("{0} is not a Lyndon-Shirshov bracketed word")]
    NotAlsbw(String),
}

/// `true` iff `w` is lex-greater than each of its proper suffixes.
pub fn is_alsw_primes(primes: &[Prime], kind: OrderKind) -> bool {
    (1..primes.len()).all(|k| lex_cmp(kind, primes, &primes[k..]) == Ordering::Greater)
}

/// Top-level test: `w` is Lyndon-Shirshov over its primes. Operator payloads
/// are not inspected; see [`is_alsbw`].
pub fn is_alsw(w: &Word, kind: OrderKind) -> bool {
    is_alsw_primes(w.primes(), kind)
}

/// The defining test by rotations: `uv > vu` for every split `w = uv`.
pub fn is_alsw_by_rotation(primes: &[Prime], kind: OrderKind) -> bool {
    (1..primes.len()).all(|k| {
        let rotated: Vec<Prime> = primes[k..].iter().chain(&primes[..k]).cloned().collect();
        lex_cmp(kind, primes, &rotated) == Ordering::Greater
    })
}

/// `w` is ALSW over its primes and every operator payload is itself ALSBW.
pub fn is_alsbw(w: &Word, kind: OrderKind) -> bool {
    w.primes().iter().all(|p| match p {
        Prime::Letter(l) => !l.is_star(),
        Prime::Op(inner) => is_alsbw(inner, kind),
    }) && is_alsw(w, kind)
}

/// Start index of the longest proper ALSW suffix of an ALSW sequence of
/// length at least 2.
pub fn standard_split(primes: &[Prime], kind: OrderKind) -> usize {
    (1..primes.len())
        .find(|&k| is_alsw_primes(&primes[k..], kind))
        .expect("a single prime is always ALSW")
}

fn bracket_prime(p: &Prime, kind: OrderKind) -> Tree {
    match p {
        Prime::Letter(l) => Tree::Leaf(*l),
        Prime::Op(inner) => Tree::op(bracket_slice(inner.primes(), kind)),
    }
}

fn bracket_slice(primes: &[Prime], kind: OrderKind) -> Tree {
    if primes.len() == 1 {
        return bracket_prime(&primes[0], kind);
    }
    let k = standard_split(primes, kind);
    Tree::pair(
        bracket_slice(&primes[..k], kind),
        bracket_slice(&primes[k..], kind),
    )
}

/// Shirshov standard bracketing, applied at every operator level.
pub fn shirshov_bracketing(w: &Word, kind: OrderKind) -> Result<Tree, LyndonError> {
    if !is_alsw(w, kind) {
        return Err(LyndonError::NotAlsw(format!("{w:?}")));
    }
    Ok(bracket_slice(w.primes(), kind))
}

/// The NLSBW whose underlying word is `w`.
pub fn nlsbw_of(w: &Word, kind: OrderKind) -> Result<Tree, LyndonError> {
    if !is_alsbw(w, kind) {
        return Err(LyndonError::NotAlsbw(format!("{w:?}")));
    }
    Ok(bracket_slice(w.primes(), kind))
}

/// Top-level NLSW test, with operator nodes treated as atoms.
pub fn is_nlsw(t: &Tree, kind: OrderKind) -> bool {
    is_alsw(&t.forget(), kind) && nlsw_shape(t, kind)
}

fn nlsw_shape(t: &Tree, kind: OrderKind) -> bool {
    match t {
        Tree::Leaf(_) | Tree::Op(_) => true,
        Tree::Pair(u, v) => {
            if !(is_nlsw(u, kind) && is_nlsw(v, kind)) {
                return false;
            }
            if !is_alsw(&t.forget(), kind) {
                return false;
            }
            match &**u {
                Tree::Pair(_, u2) => {
                    lex_cmp(kind, v.forget().primes(), u2.forget().primes()) != Ordering::Less
                }
                _ => true,
            }
        }
    }
}

/// NLSW test at every operator level.
pub fn is_nlsbw(t: &Tree, kind: OrderKind) -> bool {
    fn payloads_ok(t: &Tree, kind: OrderKind) -> bool {
        match t {
            Tree::Leaf(l) => !l.is_star(),
            Tree::Op(inner) => is_nlsbw(inner, kind),
            Tree::Pair(a, b) => payloads_ok(a, kind) && payloads_ok(b, kind),
        }
    }
    payloads_ok(t, kind) && is_nlsw(t, kind)
}

/// Factorization into ALSW factors, taking the longest ALSW prefix each time.
/// Returns the factor boundaries as index ranges.
pub fn lyndon_factorization(primes: &[Prime], kind: OrderKind) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < primes.len() {
        let end = (i + 1..=primes.len())
            .rev()
            .find(|&e| is_alsw_primes(&primes[i..e], kind))
            .expect("single primes are ALSW");
        out.push(i..end);
        i = end;
    }
    out
}

/// Limits for [`enumerate_alsbw`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumBounds {
    pub max_deg: u32,
    pub max_odeg: u32,
    pub max_dep: u32,
}

/// All ALSBW on the first `letters` letters within `bounds`, sorted
/// descending by `kind`.
pub fn enumerate_alsbw(kind: OrderKind, letters: u16, bounds: EnumBounds) -> Vec<Word> {
    let mut level: Vec<Word> = Vec::new();
    for dep in 0..=bounds.max_dep {
        let mut primes: Vec<Prime> = (0..letters).map(|l| Prime::Letter(Letter(l))).collect();
        if dep > 0 {
            primes.extend(
                level
                    .iter()
                    .filter(|w| w.deg() < bounds.max_deg && w.odeg() < bounds.max_odeg)
                    .map(|w| Prime::Op(w.clone())),
            );
        }
        primes.sort_by(|a, b| cmp_primes(kind, b, a));
        let mut words = Vec::new();
        let mut stack = Vec::new();
        extend_alsw(&primes, kind, bounds, &mut stack, 0, 0, &mut words);
        level = words;
    }
    level.sort_by(|a, b| compare(kind, b, a));
    level
}

/// Depth-first generation of prime sequences whose first prime is maximal
/// (a necessary condition for ALSW), filtered by the suffix test.
fn extend_alsw(
    primes: &[Prime],
    kind: OrderKind,
    bounds: EnumBounds,
    stack: &mut Vec<Prime>,
    deg: u32,
    odeg: u32,
    out: &mut Vec<Word>,
) {
    if !stack.is_empty() && is_alsw_primes(stack, kind) {
        out.push(Word::new(stack.clone()));
    }
    for p in primes {
        if let Some(first) = stack.first() {
            if cmp_primes(kind, p, first) == Ordering::Greater {
                continue;
            }
        }
        let (d, o) = match p {
            Prime::Letter(_) => (1, 0),
            Prime::Op(w) => (1 + w.deg(), 1 + w.odeg()),
        };
        if deg + d > bounds.max_deg || odeg + o > bounds.max_odeg {
            continue;
        }
        stack.push(p.clone());
        extend_alsw(primes, kind, bounds, stack, deg + d, odeg + o, out);
        stack.pop();
    }
}
