//! Bracketed words on an alphabet with one unary operator `P(·)`.
//!
//! [`Word`] is an associative bracketed word: a nonempty sequence of
//! [`Prime`]s, each a letter or an operator applied to a word. [`Tree`] is a
//! non-associative bracketed word (binary pairs, operator nodes, leaves).
//! [`StarWord`] is a word with exactly one hole `*`.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(String),
    #[error("invalid letter name {0:?}")]
    InvalidLetter(String),
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("star-word must contain exactly one '*', found {0}")]
    StarCount(u32),
}

/// A letter, identified by its rank in the alphabet: rank 0 is the greatest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u16);

/// The hole symbol of star-words.
pub const STAR: Letter = Letter(u16::MAX);

impl Letter {
    pub fn is_star(self) -> bool {
        self == STAR
    }

    /// Compares by the alphabet order (lower rank is greater).
    pub fn order_cmp(self, other: Letter) -> Ordering {
        other.0.cmp(&self.0)
    }
}

/// Ordered list of distinct letters, greatest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, n) in names.iter().enumerate() {
            let valid = !n.is_empty()
                && n != "P"
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !n.starts_with(|c: char| c.is_ascii_digit());
            if !valid {
                return Err(WordError::InvalidLetter(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(WordError::DuplicateLetter(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Parses `"x>y>z"`.
    pub fn parse(spec: &str) -> Result<Self, WordError> {
        Alphabet::new(spec.split('>').map(|s| s.trim().to_string()))
    }

    /// `x > y > z`, the alphabet used throughout the checks.
    pub fn xyz() -> Self {
        Alphabet::parse("x>y>z").expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| Letter(i as u16))
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| Letter(i as u16))
    }

    pub fn name(&self, l: Letter) -> &str {
        if l.is_star() {
            "*"
        } else {
            &self.names[l.0 as usize]
        }
    }

    pub fn spec(&self) -> String {
        self.names.join(">")
    }

    pub fn fmt_word(&self, w: &Word) -> String {
        let mut out = String::new();
        self.write_word(&mut out, w);
        out
    }

    fn write_word(&self, out: &mut String, w: &Word) {
        for (i, p) in w.primes().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match p {
                Prime::Letter(l) => out.push_str(self.name(*l)),
                Prime::Op(inner) => {
                    out.push_str("P(");
                    self.write_word(out, inner);
                    out.push(')');
                }
            }
        }
    }

    pub fn fmt_star(&self, q: &StarWord) -> String {
        self.fmt_word(q.as_word())
    }

    pub fn fmt_tree(&self, t: &Tree) -> String {
        let mut out = String::new();
        self.write_tree(&mut out, t);
        out
    }

    fn write_tree(&self, out: &mut String, t: &Tree) {
        match t {
            Tree::Leaf(l) => out.push_str(self.name(*l)),
            Tree::Op(inner) => {
                out.push_str("P(");
                self.write_tree(out, inner);
                out.push(')');
            }
            Tree::Pair(a, b) => {
                out.push('(');
                self.write_tree(out, a);
                out.push(' ');
                self.write_tree(out, b);
                out.push(')');
            }
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut p = Parser::new(self, text, false);
        let w = p.word()?;
        p.finish()?;
        Ok(w)
    }

    pub fn parse_star_word(&self, text: &str) -> Result<StarWord, WordError> {
        let mut p = Parser::new(self, text, true);
        let w = p.word()?;
        p.finish()?;
        StarWord::new(w)
    }

    pub fn parse_tree(&self, text: &str) -> Result<Tree, WordError> {
        let mut p = Parser::new(self, text, false);
        let t = p.tree()?;
        p.finish()?;
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prime {
    Letter(Letter),
    Op(Word),
}

impl Prime {
    pub fn deg(&self) -> u32 {
        match self {
            Prime::Letter(_) => 1,
            Prime::Op(w) => 1 + w.deg(),
        }
    }

    pub fn as_op(&self) -> Option<&Word> {
        match self {
            Prime::Op(w) => Some(w),
            Prime::Letter(_) => None,
        }
    }
}

struct WordData {
    primes: Vec<Prime>,
    hash: u64,
    deg: u32,
    letters: u32,
    odeg: u32,
    dep: u32,
    stars: u32,
}

/// Associative bracketed word; cheap to clone, hashed once on construction.
#[derive(Clone)]
pub struct Word(Arc<WordData>);

/// `(breadth, dep, deg, odeg)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub breadth: usize,
    pub dep: u32,
    pub deg: u32,
    pub odeg: u32,
}

impl Word {
    /// Panics on an empty prime sequence; the empty word is not a `Word`.
    pub fn new(primes: Vec<Prime>) -> Word {
        assert!(!primes.is_empty(), "a word has at least one prime");
        let mut h = DefaultHasher::new();
        let (mut deg, mut letters, mut odeg, mut dep, mut stars) = (0, 0, 0, 0, 0);
        for p in &primes {
            match p {
                Prime::Letter(l) => {
                    0u8.hash(&mut h);
                    l.0.hash(&mut h);
                    if l.is_star() {
                        stars += 1;
                    } else {
                        deg += 1;
                        letters += 1;
                    }
                }
                Prime::Op(w) => {
                    1u8.hash(&mut h);
                    w.0.hash.hash(&mut h);
                    deg += 1 + w.deg();
                    letters += w.letter_count();
                    odeg += 1 + w.odeg();
                    dep = dep.max(1 + w.dep());
                    stars += w.star_count();
                }
            }
        }
        Word(Arc::new(WordData {
            primes,
            hash: h.finish(),
            deg,
            letters,
            odeg,
            dep,
            stars,
        }))
    }

    pub fn letter(l: Letter) -> Word {
        Word::new(vec![Prime::Letter(l)])
    }

    /// The single-prime word `P(inner)`.
    pub fn op(inner: Word) -> Word {
        Word::new(vec![Prime::Op(inner)])
    }

    pub fn from_prime(p: Prime) -> Word {
        Word::new(vec![p])
    }

    pub fn primes(&self) -> &[Prime] {
        &self.0.primes
    }

    pub fn breadth(&self) -> usize {
        self.0.primes.len()
    }

    pub fn deg(&self) -> u32 {
        self.0.deg
    }

    /// Number of letter occurrences (operators excluded).
    pub fn letter_count(&self) -> u32 {
        self.0.letters
    }

    pub fn odeg(&self) -> u32 {
        self.0.odeg
    }

    pub fn dep(&self) -> u32 {
        self.0.dep
    }

    pub fn star_count(&self) -> u32 {
        self.0.stars
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            breadth: self.breadth(),
            dep: self.dep(),
            deg: self.deg(),
            odeg: self.odeg(),
        }
    }

    /// Payload when the word is a single operator prime.
    pub fn single_op(&self) -> Option<&Word> {
        match self.primes() {
            [Prime::Op(w)] => Some(w),
            _ => None,
        }
    }

    pub fn single_letter(&self) -> Option<Letter> {
        match self.primes() {
            [Prime::Letter(l)] => Some(*l),
            _ => None,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.breadth() + other.breadth());
        v.extend_from_slice(self.primes());
        v.extend_from_slice(other.primes());
        Word::new(v)
    }

    /// Contiguous sub-slice of primes as a word; `None` when empty.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Option<Word> {
        if range.is_empty() {
            None
        } else {
            Some(Word::new(self.primes()[range].to_vec()))
        }
    }

    pub fn ptr_eq(&self, other: &Word) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.deg == other.0.deg
                && self.0.primes == other.0.primes)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

/// Structural order, only used for deterministic containers. The monomial
/// orders live in [`crate::order`].
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.primes().cmp(other.primes())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        debug_primes(f, self.primes())?;
        write!(f, ")")
    }
}

fn debug_primes(f: &mut fmt::Formatter<'_>, primes: &[Prime]) -> fmt::Result {
    for (i, p) in primes.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        match p {
            Prime::Letter(l) if l.is_star() => write!(f, "*")?,
            Prime::Letter(l) => write!(f, "#{}", l.0)?,
            Prime::Op(w) => {
                write!(f, "P(")?;
                debug_primes(f, w.primes())?;
                write!(f, ")")?;
            }
        }
    }
    Ok(())
}

/// Non-associative bracketed word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(Letter),
    Op(Arc<Tree>),
    Pair(Arc<Tree>, Arc<Tree>),
}

impl Tree {
    pub fn pair(a: Tree, b: Tree) -> Tree {
        Tree::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn op(t: Tree) -> Tree {
        Tree::Op(Arc::new(t))
    }

    /// The associative word obtained by dropping the pair brackets.
    pub fn forget(&self) -> Word {
        let mut primes = Vec::new();
        self.collect_primes(&mut primes);
        Word::new(primes)
    }

    fn collect_primes(&self, out: &mut Vec<Prime>) {
        match self {
            Tree::Leaf(l) => out.push(Prime::Letter(*l)),
            Tree::Op(t) => out.push(Prime::Op(t.forget())),
            Tree::Pair(a, b) => {
                a.collect_primes(out);
                b.collect_primes(out);
            }
        }
    }

    /// Replaces the leaf `*` by `t`.
    pub fn plug(&self, t: &Tree) -> Tree {
        match self {
            Tree::Leaf(l) if l.is_star() => t.clone(),
            Tree::Leaf(_) => self.clone(),
            Tree::Op(inner) => Tree::op(inner.plug(t)),
            Tree::Pair(a, b) => Tree::pair(a.plug(t), b.plug(t)),
        }
    }
}

/// A word over the alphabet plus `*`, with `*` occurring exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarWord(Word);

impl StarWord {
    pub fn new(w: Word) -> Result<StarWord, WordError> {
        match w.star_count() {
            1 => Ok(StarWord(w)),
            n => Err(WordError::StarCount(n)),
        }
    }

    /// The trivial placement `*`.
    pub fn hole() -> StarWord {
        StarWord(Word::letter(STAR))
    }

    pub fn is_hole(&self) -> bool {
        self.0.single_letter() == Some(STAR)
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }

    /// `q⟨u⟩`.
    pub fn substitute(&self, u: &Word) -> Word {
        substitute_primes(self.0.primes(), u)
    }

    /// `self⟨inner⟩` where `inner` is itself a star-word; the result is again
    /// a star-word.
    pub fn compose(&self, inner: &StarWord) -> StarWord {
        StarWord(self.substitute(&inner.0))
    }

    /// `u * v` as a star-word: the placement `u ⋆ v` with optional sides.
    pub fn around(left: Option<&Word>, right: Option<&Word>) -> StarWord {
        let mut v = Vec::new();
        if let Some(l) = left {
            v.extend_from_slice(l.primes());
        }
        v.push(Prime::Letter(STAR));
        if let Some(r) = right {
            v.extend_from_slice(r.primes());
        }
        StarWord(Word::new(v))
    }

    /// Wraps the star-word in an operator: `P(q)`.
    pub fn wrap_op(&self) -> StarWord {
        StarWord(Word::op(self.0.clone()))
    }
}

fn substitute_primes(primes: &[Prime], u: &Word) -> Word {
    let mut out = Vec::with_capacity(primes.len() + u.breadth());
    for p in primes {
        match p {
            Prime::Letter(l) if l.is_star() => out.extend_from_slice(u.primes()),
            Prime::Op(w) if w.star_count() > 0 => {
                out.push(Prime::Op(substitute_primes(w.primes(), u)))
            }
            _ => out.push(p.clone()),
        }
    }
    Word::new(out)
}

/// Every prime-aligned contiguous subword of `w`, at every nesting level,
/// together with its placement. Top-level subwords come first (by start,
/// then length), followed by the subwords inside each operator prime from
/// left to right.
pub fn subword_placements(w: &Word) -> Vec<(StarWord, Word)> {
    let mut out = Vec::new();
    collect_subwords(w, &mut out);
    out
}

fn collect_subwords(w: &Word, out: &mut Vec<(StarWord, Word)>) {
    let primes = w.primes();
    let n = primes.len();
    for start in 0..n {
        for end in start + 1..=n {
            let sub = if start == 0 && end == n {
                w.clone()
            } else {
                Word::new(primes[start..end].to_vec())
            };
            let q = StarWord::around(w.slice(0..start).as_ref(), w.slice(end..n).as_ref());
            out.push((q, sub));
        }
    }
    for (i, p) in primes.iter().enumerate() {
        if let Prime::Op(inner) = p {
            let mut nested = Vec::new();
            collect_subwords(inner, &mut nested);
            for (q, sub) in nested {
                out.push((wrap_at(w, i, &q), sub));
            }
        }
    }
}

/// Star-word obtained from `w` by replacing its `i`-th prime `P(..)` with
/// `P(inner)`.
fn wrap_at(w: &Word, i: usize, inner: &StarWord) -> StarWord {
    let mut v = w.primes().to_vec();
    v[i] = Prime::Op(inner.as_word().clone());
    StarWord(Word::new(v))
}

/// All `q` with `q⟨p⟩ = w`, in the order of [`subword_placements`].
pub fn placements(w: &Word, p: &Word) -> Vec<StarWord> {
    let mut out = Vec::new();
    collect_placements(w, p, &mut out);
    out
}

fn collect_placements(w: &Word, p: &Word, out: &mut Vec<StarWord>) {
    let (n, k) = (w.breadth(), p.breadth());
    if k <= n && w.deg() >= p.deg() {
        for start in 0..=n - k {
            if w.primes()[start..start + k] == *p.primes() {
                out.push(StarWord::around(
                    w.slice(0..start).as_ref(),
                    w.slice(start + k..n).as_ref(),
                ));
            }
        }
    }
    for (i, prime) in w.primes().iter().enumerate() {
        if let Prime::Op(inner) = prime {
            if inner.deg() >= p.deg() {
                let mut nested = Vec::new();
                collect_placements(inner, p, &mut nested);
                out.extend(nested.iter().map(|q| wrap_at(w, i, q)));
            }
        }
    }
}

struct Parser<'a> {
    alphabet: &'a Alphabet,
    text: &'a str,
    pos: usize,
    allow_star: bool,
}

impl<'a> Parser<'a> {
    fn new(alphabet: &'a Alphabet, text: &'a str, allow_star: bool) -> Self {
        Parser {
            alphabet,
            text,
            pos: 0,
            allow_star,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordError> {
        Err(WordError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), WordError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn finish(&mut self) -> Result<(), WordError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected '{c}'")),
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return None;
        }
        let id = &self.rest()[..len];
        Some(id)
    }

    /// Consumes `P(` if present.
    fn op_open(&mut self) -> bool {
        if self.ident() == Some("P") {
            let save = self.pos;
            self.pos += 1;
            if self.peek() == Some('(') {
                self.pos += 1;
                return true;
            }
            self.pos = save;
        }
        false
    }

    fn letter(&mut self) -> Result<Letter, WordError> {
        if self.allow_star && self.peek() == Some('*') {
            self.pos += 1;
            return Ok(STAR);
        }
        match self.ident() {
            Some(id) => match self.alphabet.letter(id) {
                Some(l) => {
                    self.pos += id.len();
                    Ok(l)
                }
                None => self.err(format!("unknown letter {id:?}")),
            },
            None => match self.peek() {
                Some(c) => self.err(format!("unexpected '{c}'")),
                None => self.err("unexpected end of input"),
            },
        }
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut primes = Vec::new();
        loop {
            match self.peek() {
                None | Some(')') => break,
                _ => {}
            }
            if self.op_open() {
                let inner = self.word()?;
                self.expect(')')?;
                primes.push(Prime::Op(inner));
            } else {
                primes.push(Prime::Letter(self.letter()?));
            }
        }
        if primes.is_empty() {
            return self.err("expected a word");
        }
        Ok(Word::new(primes))
    }

    fn tree(&mut self) -> Result<Tree, WordError> {
        if self.op_open() {
            let inner = self.tree()?;
            self.expect(')')?;
            return Ok(Tree::op(inner));
        }
        if self.peek() == Some('(') {
            self.pos += 1;
            let a = self.tree()?;
            let b = self.tree()?;
            self.expect(')')?;
            return Ok(Tree::pair(a, b));
        }
        if self.peek().is_none() {
            return self.err("expected a tree");
        }
        Ok(Tree::Leaf(self.letter()?))
    }
}
