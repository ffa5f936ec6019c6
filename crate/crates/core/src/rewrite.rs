//! Special normal s-words, compositions, head reduction and triviality
//! checking for monic rule sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lie::{expand, AssocPoly, LieError, LiePoly};
use crate::lyndon::{
    enumerate_alsbw, is_alsbw, lyndon_factorization, nlsbw_of, standard_split, EnumBounds,
};
use crate::order::{compare, OrderKind};
use crate::scalar::Scalar;
use crate::word::{subword_placements, Prime, StarWord, Tree, Word, STAR};

/// Leaf-count limit for the exhaustive rebracketing search.
const MAX_SEARCH_LEAVES: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("placement {q:?} of {sbar:?} is not a Lyndon-Shirshov bracketed word")]
    NotAlsbw { q: StarWord, sbar: Word },
    #[error("no bracketing of {q:?} around {sbar:?} has the required shape")]
    NoBracketing { q: StarWord, sbar: Word },
    #[error("special word invariant violated: {0}")]
    Invariant(String),
    #[error("reduction exceeded {0} steps")]
    StepLimit(usize),
    #[error("reduction step at {step:?} is not below the composition word {w:?}")]
    Bound { step: Word, w: Word },
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A monic rule `s` with its cached envelope expansion.
#[derive(Debug)]
pub struct Rule {
    /// Unique within a rule source; also the tie-break key for rule choice.
    pub label: String,
    pub poly: LiePoly,
    expansion: OnceLock<AssocPoly>,
}

impl Rule {
    /// Normalizes `poly` to be monic. Fails on zero.
    pub fn new(label: impl Into<String>, poly: &LiePoly) -> Result<Rule, LieError> {
        Ok(Rule {
            label: label.into(),
            poly: poly.make_monic()?,
            expansion: OnceLock::new(),
        })
    }

    pub fn leading(&self) -> &Word {
        self.poly.leading_word().expect("rules are nonzero")
    }

    /// Envelope expansion, computed on first use.
    pub fn expansion(&self) -> &AssocPoly {
        self.expansion.get_or_init(|| self.poly.expand())
    }
}

/// Supplies rule instances by leading word.
pub trait RuleSource: Sync {
    /// All rules whose leading word is exactly `w`, in a deterministic order.
    fn match_leading(&self, w: &Word) -> Vec<Arc<Rule>>;
}

/// A fixed finite rule set.
#[derive(Default)]
pub struct FiniteRules {
    rules: Vec<Arc<Rule>>,
    by_leading: HashMap<Word, Vec<Arc<Rule>>>,
}

impl FiniteRules {
    pub fn new(rules: impl IntoIterator<Item = Arc<Rule>>) -> Self {
        let mut out = FiniteRules::default();
        for r in rules {
            out.by_leading
                .entry(r.leading().clone())
                .or_default()
                .push(r.clone());
            out.rules.push(r);
        }
        for v in out.by_leading.values_mut() {
            v.sort_by(|a, b| a.label.cmp(&b.label));
        }
        out
    }

    pub fn rules(&self) -> &[Arc<Rule>] {
        &self.rules
    }
}

impl RuleSource for FiniteRules {
    fn match_leading(&self, w: &Word) -> Vec<Arc<Rule>> {
        self.by_leading.get(w).cloned().unwrap_or_default()
    }
}

/// The special normal s-word `[q⟨s⟩]` for a rule `s` and placement `q`.
#[derive(Clone, Debug)]
pub struct SWord {
    pub q: StarWord,
    pub rule: Arc<Rule>,
    /// `q⟨s̄⟩`, the leading word of `value`.
    pub word: Word,
    pub value: LiePoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionKind {
    Intersection,
    Including,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `w = f̄·u = v·ḡ`.
    Intersection { u: Word, v: Word },
    /// `w = f̄ = q⟨ḡ⟩`.
    Including { q: StarWord },
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub kind: CompositionKind,
    pub f: Arc<Rule>,
    pub g: Arc<Rule>,
    pub w: Word,
    pub witness: Witness,
    pub value: LiePoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub step: usize,
    pub rule: String,
    pub placement: StarWord,
    pub coefficient: Scalar,
    pub leading_before: Word,
    pub leading_after: Option<Word>,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub remainder: LiePoly,
    pub trace: Vec<TraceStep>,
}

/// A candidate reduction step at the current leading word.
#[derive(Clone, Debug)]
pub struct Match {
    pub rule: Arc<Rule>,
    pub q: StarWord,
    /// Index in [`subword_placements`] order.
    pub position: usize,
}

/// Reduction engine over a rule source, with memoized special words.
pub struct Engine<'a> {
    kind: OrderKind,
    rules: &'a dyn RuleSource,
    max_steps: usize,
    star_cache: DashMap<(StarWord, Word), Arc<AssocPoly>>,
    sword_cache: DashMap<(StarWord, String), Arc<SWord>>,
}

impl<'a> Engine<'a> {
    pub fn new(kind: OrderKind, rules: &'a dyn RuleSource) -> Self {
        Engine {
            kind,
            rules,
            max_steps: 10_000,
            star_cache: DashMap::new(),
            sword_cache: DashMap::new(),
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn rules(&self) -> &dyn RuleSource {
        self.rules
    }

    /// Builds `[q⟨s⟩]` and re-verifies its defining properties.
    pub fn special_sword(&self, q: &StarWord, rule: &Arc<Rule>) -> Result<Arc<SWord>, RewriteError> {
        let key = (q.clone(), rule.label.clone());
        if let Some(hit) = self.sword_cache.get(&key) {
            return Ok(hit.clone());
        }
        let sbar = rule.leading();
        let word = q.substitute(sbar);
        if !is_alsbw(&word, self.kind) {
            return Err(RewriteError::NotAlsbw {
                q: q.clone(),
                sbar: sbar.clone(),
            });
        }
        let value = if q.is_hole() {
            rule.poly.clone()
        } else {
            let shape = self.star_expansion(q, sbar)?;
            let mut p = AssocPoly::zero();
            for (r, c) in shape.iter() {
                let r = StarWord::new(r.clone()).expect("one star");
                p.add_scaled(&rule.expansion().placed(&r), c);
            }
            LiePoly::from_assoc(&p, self.kind)?
        };
        match value.leading() {
            Some((lw, lc)) if lw == &word && lc.is_one() => {}
            other => {
                return Err(RewriteError::Invariant(format!(
                    "leading of special word for {q:?} around {sbar:?} is {other:?}"
                )))
            }
        }
        let sword = Arc::new(SWord {
            q: q.clone(),
            rule: rule.clone(),
            word,
            value,
        });
        self.sword_cache.insert(key, sword.clone());
        Ok(sword)
    }

    /// The Lie element `T⟨★⟩` realizing placement `q` of `sbar`, expanded over
    /// star-words: `q` has coefficient 1 and every other star-word `r` has
    /// `r⟨sbar⟩` strictly below `q⟨sbar⟩`.
    pub fn star_expansion(&self, q: &StarWord, sbar: &Word) -> Result<Arc<AssocPoly>, RewriteError> {
        let key = (q.clone(), sbar.clone());
        if let Some(hit) = self.star_cache.get(&key) {
            return Ok(hit.clone());
        }
        let value = Arc::new(self.build_star_expansion(q, sbar)?);
        self.star_cache.insert(key, value.clone());
        Ok(value)
    }

    fn build_star_expansion(&self, q: &StarWord, sbar: &Word) -> Result<AssocPoly, RewriteError> {
        let hole = AssocPoly::monomial(Word::letter(STAR), Scalar::one());
        if q.is_hole() {
            return Ok(hole);
        }
        let w = q.substitute(sbar);
        let qp = q.as_word().primes();
        let i = qp
            .iter()
            .position(|p| match p {
                Prime::Letter(l) => l.is_star(),
                Prime::Op(inner) => inner.star_count() > 0,
            })
            .expect("star-word has a star");
        let (block, inner_shape) = match &qp[i] {
            Prime::Letter(_) => (i..i + sbar.breadth(), hole),
            Prime::Op(inner) => {
                let inner_q = StarWord::new(inner.clone()).expect("one star");
                (i..i + 1, self.star_expansion(&inner_q, sbar)?.op())
            }
        };
        let candidates = candidate_trees(&w, block.clone(), self.kind);
        for t in candidates {
            if let Some(shape) = self.check_shape(&t, &inner_shape, q, sbar, &w) {
                return Ok(shape);
            }
        }
        if let Some(shape) = exhaustive_trees(&w, block, self.kind)
            .into_iter()
            .find_map(|t| self.check_shape(&t, &inner_shape, q, sbar, &w))
        {
            return Ok(shape);
        }
        Err(RewriteError::NoBracketing {
            q: q.clone(),
            sbar: sbar.clone(),
        })
    }

    /// Expands `t` with its star leaf replaced by `inner` and tests the shape
    /// condition against `q` and `w = q⟨sbar⟩`.
    fn check_shape(
        &self,
        t: &Tree,
        inner: &AssocPoly,
        q: &StarWord,
        sbar: &Word,
        w: &Word,
    ) -> Option<AssocPoly> {
        let mut shape = AssocPoly::zero();
        for (m, c) in expand(t).iter() {
            let m = StarWord::new(m.clone()).ok()?;
            shape.add_scaled(&inner.placed(&m), c);
        }
        if !shape.coeff(q.as_word()).is_one() {
            return None;
        }
        let ok = shape.iter().all(|(r, _)| {
            r == q.as_word() || {
                let placed = StarWord::new(r.clone()).expect("one star").substitute(sbar);
                compare(self.kind, &placed, w) == Ordering::Less
            }
        });
        ok.then_some(shape)
    }

    /// All rule placements at `w`, in placement order, rules sorted by label.
    pub fn matches_at(&self, w: &Word) -> Vec<Match> {
        let mut out = Vec::new();
        for (position, (q, sub)) in subword_placements(w).into_iter().enumerate() {
            for rule in self.rules.match_leading(&sub) {
                out.push(Match {
                    rule,
                    q: q.clone(),
                    position,
                });
            }
        }
        out
    }

    pub fn is_reducible(&self, w: &Word) -> bool {
        subword_placements(w)
            .iter()
            .any(|(_, sub)| !self.rules.match_leading(sub).is_empty())
    }

    /// Head reduction; the deterministic choice takes the smallest
    /// `(rule label, placement position)`.
    pub fn reduce(&self, h: &LiePoly) -> Result<Reduction, RewriteError> {
        self.reduce_with(h, |ms| {
            (0..ms.len())
                .min_by(|&a, &b| {
                    ms[a]
                        .rule
                        .label
                        .cmp(&ms[b].rule.label)
                        .then(ms[a].position.cmp(&ms[b].position))
                })
                .expect("nonempty")
        })
    }

    /// Head reduction with a caller-supplied choice among the admissible
    /// matches at each step.
    pub fn reduce_with<F>(&self, h: &LiePoly, mut choose: F) -> Result<Reduction, RewriteError>
    where
        F: FnMut(&[Match]) -> usize,
    {
        let mut h = h.clone();
        let mut trace = Vec::new();
        while let Some((lw, lc)) = h.leading() {
            let (lw, lc) = (lw.clone(), lc.clone());
            let ms = self.matches_at(&lw);
            if ms.is_empty() {
                break;
            }
            if trace.len() >= self.max_steps {
                return Err(RewriteError::StepLimit(self.max_steps));
            }
            let m = &ms[choose(&ms)];
            let sw = self.special_sword(&m.q, &m.rule)?;
            h = LiePoly::axpy(&lc.neg_ref(), &sw.value, &h);
            let after = h.leading_word().cloned();
            if let Some(a) = &after {
                if compare(self.kind, a, &lw) != Ordering::Less {
                    return Err(RewriteError::Invariant(format!(
                        "reduction step did not decrease the leading word {lw:?}"
                    )));
                }
            }
            trace.push(TraceStep {
                step: trace.len() + 1,
                rule: m.rule.label.clone(),
                placement: m.q.clone(),
                coefficient: lc,
                leading_before: lw,
                leading_after: after,
            });
        }
        Ok(Reduction {
            remainder: h,
            trace,
        })
    }

    /// Full reduction: irreducible leading terms move to the result and
    /// reduction continues on the tail.
    pub fn normal_form_with<F>(&self, h: &LiePoly, mut choose: F) -> Result<LiePoly, RewriteError>
    where
        F: FnMut(&[Match]) -> usize,
    {
        let mut done = LiePoly::zero(self.kind);
        let mut rest = h.clone();
        let mut steps = 0;
        while let Some((lw, lc)) = rest.leading() {
            let (lw, lc) = (lw.clone(), lc.clone());
            let ms = self.matches_at(&lw);
            if ms.is_empty() {
                let term = LiePoly::basis(&lw, self.kind)?.scale(&lc);
                done = done.add(&term);
                rest = rest.sub(&term);
                continue;
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(RewriteError::StepLimit(self.max_steps));
            }
            let m = &ms[choose(&ms)];
            let sw = self.special_sword(&m.q, &m.rule)?;
            rest = LiePoly::axpy(&lc.neg_ref(), &sw.value, &rest);
        }
        Ok(done)
    }

    /// Compares the deterministic normal form of `h` with normal forms
    /// obtained from random admissible choices.
    pub fn confluence_sample(
        &self,
        h: &LiePoly,
        trials: usize,
        seed: u64,
    ) -> Result<bool, RewriteError> {
        let reference = self.normal_form_with(h, |_| 0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let nf = self.normal_form_with(h, |ms| rng.gen_range(0..ms.len()))?;
            if nf != reference {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All intersection and including compositions of `f` with `g`.
    pub fn compositions(
        &self,
        f: &Arc<Rule>,
        g: &Arc<Rule>,
    ) -> Result<Vec<Composition>, RewriteError> {
        let mut out = Vec::new();
        for spec in composition_specs(f, g, self.kind) {
            out.push(self.build_composition(f, g, spec)?);
        }
        Ok(out)
    }

    pub fn build_composition(
        &self,
        f: &Arc<Rule>,
        g: &Arc<Rule>,
        spec: CompositionSpec,
    ) -> Result<Composition, RewriteError> {
        let value = match &spec.witness {
            Witness::Intersection { u, v } => {
                let left = self.special_sword(&StarWord::around(None, Some(u)), f)?;
                let right = self.special_sword(&StarWord::around(Some(v), None), g)?;
                left.value.sub(&right.value)
            }
            Witness::Including { q } => {
                let inner = self.special_sword(q, g)?;
                f.poly.sub(&inner.value)
            }
        };
        if let Some(lw) = value.leading_word() {
            if compare(self.kind, lw, &spec.w) != Ordering::Less {
                return Err(RewriteError::Invariant(format!(
                    "composition value does not lead below {:?}",
                    spec.w
                )));
            }
        }
        Ok(Composition {
            kind: spec.kind,
            f: f.clone(),
            g: g.clone(),
            w: spec.w,
            witness: spec.witness,
            value,
        })
    }

    /// Reduces the composition value and checks that every step fires
    /// strictly below the composition word.
    pub fn is_trivial(&self, c: &Composition) -> Result<(bool, Reduction), RewriteError> {
        let red = self.reduce(&c.value)?;
        for step in &red.trace {
            if compare(self.kind, &step.leading_before, &c.w) != Ordering::Less {
                return Err(RewriteError::Bound {
                    step: step.leading_before.clone(),
                    w: c.w.clone(),
                });
            }
        }
        Ok((red.remainder.is_zero(), red))
    }

    /// Checks `dim(slice) = |Irr| + rank(span of special words)` on the NLSBW
    /// of degree at most `deg_bound` over `letters` letters.
    pub fn cd_dimension_check(&self, letters: u16, deg_bound: u32) -> Result<CdReport, RewriteError> {
        let bounds = EnumBounds {
            max_deg: deg_bound,
            max_odeg: deg_bound,
            max_dep: deg_bound,
        };
        let slice = enumerate_alsbw(self.kind, letters, bounds);
        let mut irreducible = Vec::new();
        let mut echelon = Echelon::default();
        let mut reducible = 0;
        let mut swords = 0;
        for w in &slice {
            let ms = self.matches_at(w);
            if ms.is_empty() {
                irreducible.push(w.clone());
                continue;
            }
            reducible += 1;
            for m in ms {
                let sw = self.special_sword(&m.q, &m.rule)?;
                swords += 1;
                echelon.insert(&sw.value)?;
            }
        }
        let rank = echelon.pivots.len();
        let mut unexpected: Vec<Word> = echelon
            .pivots
            .keys()
            .filter(|w| !self.is_reducible(w))
            .cloned()
            .collect();
        unexpected.sort_by(|a, b| compare(self.kind, b, a));
        Ok(CdReport {
            slice_dim: slice.len(),
            irreducible: irreducible.len(),
            reducible,
            special_words: swords,
            rank,
            balanced: slice.len() == irreducible.len() + rank,
            irreducible_words: irreducible,
            irreducible_pivots: unexpected,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CdReport {
    pub slice_dim: usize,
    pub irreducible: usize,
    pub reducible: usize,
    pub special_words: usize,
    pub rank: usize,
    pub balanced: bool,
    pub irreducible_words: Vec<Word>,
    /// Leading words of span elements that no rule reduces; nonempty exactly
    /// when the rank exceeds the number of reducible words.
    pub irreducible_pivots: Vec<Word>,
}

/// Row echelon form keyed by leading word.
#[derive(Default)]
struct Echelon {
    pivots: HashMap<Word, LiePoly>,
}

impl Echelon {
    fn insert(&mut self, v: &LiePoly) -> Result<(), LieError> {
        let mut v = v.clone();
        while let Some((lw, lc)) = v.leading() {
            match self.pivots.get(lw) {
                Some(p) => v = LiePoly::axpy(&lc.neg_ref(), p, &v),
                None => {
                    let monic = v.make_monic()?;
                    self.pivots.insert(lw.clone(), monic);
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// A composition before its value is computed.
#[derive(Clone, Debug)]
pub struct CompositionSpec {
    pub kind: CompositionKind,
    pub w: Word,
    pub witness: Witness,
}

/// Overlaps of `f̄` and `ḡ`: proper top-level intersections whose ambient
/// word is ALSBW, and every placement of `ḡ` inside `f̄`.
pub fn composition_specs(f: &Rule, g: &Rule, kind: OrderKind) -> Vec<CompositionSpec> {
    let (fl, gl) = (f.leading(), g.leading());
    let mut out = Vec::new();
    for k in 1..fl.breadth() {
        let overlap = fl.breadth() - k;
        if overlap >= gl.breadth() || fl.primes()[k..] != gl.primes()[..overlap] {
            continue;
        }
        if let Some(spec) = intersection_spec(fl, gl, k, kind) {
            out.push(spec);
        }
    }
    for q in crate::word::placements(fl, gl) {
        out.push(CompositionSpec {
            kind: CompositionKind::Including,
            w: fl.clone(),
            witness: Witness::Including { q },
        });
    }
    out
}

/// Intersection of `fl` and `gl` where `gl` starts at prime `k` of `fl`.
pub fn intersection_spec(fl: &Word, gl: &Word, k: usize, kind: OrderKind) -> Option<CompositionSpec> {
    let overlap = fl.breadth() - k;
    let u = gl.slice(overlap..gl.breadth())?;
    let v = fl.slice(0..k)?;
    let w = fl.concat(&u);
    is_alsbw(&w, kind).then_some(CompositionSpec {
        kind: CompositionKind::Intersection,
        w,
        witness: Witness::Intersection { u, v },
    })
}

fn prime_leaf(p: &Prime, kind: OrderKind) -> Tree {
    nlsbw_of(&Word::from_prime(p.clone()), kind).expect("primes of an ALSBW are ALSBW")
}

/// Standard bracketing of `primes[range]` with the block collapsed to a star
/// leaf when it is a subtree.
fn standard_with_block(primes: &[Prime], range: Range<usize>, block: &Range<usize>, kind: OrderKind) -> Tree {
    if range == *block {
        return Tree::Leaf(STAR);
    }
    if range.len() == 1 {
        return prime_leaf(&primes[range.start], kind);
    }
    let k = range.start + standard_split(&primes[range.clone()], kind);
    Tree::pair(
        standard_with_block(primes, range.start..k, block, kind),
        standard_with_block(primes, k..range.end, block, kind),
    )
}

fn contains_star(t: &Tree) -> bool {
    match t {
        Tree::Leaf(l) => l.is_star(),
        Tree::Op(inner) => contains_star(inner),
        Tree::Pair(a, b) => contains_star(a) || contains_star(b),
    }
}

/// Smallest standard-bracketing subtree range containing `block`.
fn enclosing_range(primes: &[Prime], range: Range<usize>, block: &Range<usize>, kind: OrderKind) -> Range<usize> {
    if range.len() == 1 {
        return range;
    }
    let k = range.start + standard_split(&primes[range.clone()], kind);
    if block.end <= k {
        enclosing_range(primes, range.start..k, block, kind)
    } else if block.start >= k {
        enclosing_range(primes, k..range.end, block, kind)
    } else {
        range
    }
}

/// Bracketings tried before the exhaustive search: the standard bracketing
/// when the block is one of its subtrees, and the classical relative
/// bracketing that left-normalizes the block against the ALSW factors of
/// the remainder of its enclosing subtree.
fn candidate_trees(w: &Word, block: Range<usize>, kind: OrderKind) -> Vec<Tree> {
    let primes = w.primes();
    let mut out = Vec::new();
    let direct = standard_with_block(primes, 0..primes.len(), &block, kind);
    if contains_star(&direct) {
        out.push(direct);
        return out;
    }
    let enclosing = enclosing_range(primes, 0..primes.len(), &block, kind);
    if enclosing.start == block.start && block.end < enclosing.end {
        let tail = &primes[block.end..enclosing.end];
        let mut relative = Tree::Leaf(STAR);
        for r in lyndon_factorization(tail, kind) {
            let factor = Word::new(tail[r].to_vec());
            let factor = nlsbw_of(&factor, kind).expect("ALSW factor over ALSBW primes");
            relative = Tree::pair(relative, factor);
        }
        if let Some(t) = replace_range(primes, 0..primes.len(), &enclosing, &relative, kind) {
            out.push(t);
        }
    }
    out
}

fn replace_range(
    primes: &[Prime],
    range: Range<usize>,
    target: &Range<usize>,
    with: &Tree,
    kind: OrderKind,
) -> Option<Tree> {
    if range == *target {
        return Some(with.clone());
    }
    if range.len() == 1 {
        return Some(prime_leaf(&primes[range.start], kind));
    }
    let k = range.start + standard_split(&primes[range.clone()], kind);
    Some(Tree::pair(
        replace_range(primes, range.start..k, target, with, kind)?,
        replace_range(primes, k..range.end, target, with, kind)?,
    ))
}

/// Every bracketing of the leaf sequence (primes outside the block, plus a
/// star leaf for the block), in a deterministic order.
fn exhaustive_trees(w: &Word, block: Range<usize>, kind: OrderKind) -> Vec<Tree> {
    let primes = w.primes();
    let mut leaves: Vec<Tree> = primes[..block.start].iter().map(|p| prime_leaf(p, kind)).collect();
    leaves.push(Tree::Leaf(STAR));
    leaves.extend(primes[block.end..].iter().map(|p| prime_leaf(p, kind)));
    if leaves.len() > MAX_SEARCH_LEAVES {
        return Vec::new();
    }
    all_bracketings(&leaves)
}

fn all_bracketings(leaves: &[Tree]) -> Vec<Tree> {
    if leaves.len() == 1 {
        return vec![leaves[0].clone()];
    }
    let mut out = Vec::new();
    for k in 1..leaves.len() {
        let left = all_bracketings(&leaves[..k]);
        let right = all_bracketings(&leaves[k..]);
        for a in &left {
            for b in &right {
                out.push(Tree::pair(a.clone(), b.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    const K: OrderKind = OrderKind::Dt;

    fn a() -> Alphabet {
        Alphabet::xyz()
    }

    fn w(s: &str) -> Word {
        a().parse_word(s).unwrap()
    }

    fn lie(s: &str) -> LiePoly {
        LiePoly::parse(&a(), s, K).unwrap()
    }

    fn rule(label: &str, s: &str) -> Arc<Rule> {
        Arc::new(Rule::new(label, &lie(s)).unwrap())
    }

    #[test]
    fn hole_placement_is_the_rule() {
        let r = rule("r", "P((x y)) + -1 * (x P(y))");
        let rules = FiniteRules::new([r.clone()]);
        let e = Engine::new(K, &rules);
        let sw = e.special_sword(&StarWord::hole(), &r).unwrap();
        assert_eq!(sw.value, r.poly);
    }

    #[test]
    fn nested_placement_has_expected_shape() {
        // ⌊[xy]⌋ − [x⌊y⌋] placed as ⌊★ z⌋ inside ⌊x y z⌋? The leading word
        // ⌊xy⌋ is a single prime, so place it in ⌊⌊xy⌋ z⌋ instead.
        let r = rule("r", "P((x y)) + -1 * (x P(y))");
        let rules = FiniteRules::new([r.clone()]);
        let e = Engine::new(K, &rules);
        let q = a().parse_star_word("P(* z)").unwrap();
        let sw = e.special_sword(&q, &r).unwrap();
        assert_eq!(sw.word, w("P(P(x y) z)"));
        assert_eq!(sw.value.leading().unwrap().0, &w("P(P(x y) z)"));
    }

    #[test]
    fn top_level_block_inside_word() {
        let r = rule("yz", "(y z)");
        let rules = FiniteRules::new([r.clone()]);
        let e = Engine::new(K, &rules);
        let q = a().parse_star_word("x *").unwrap();
        let sw = e.special_sword(&q, &r).unwrap();
        assert_eq!(sw.word, w("x y z"));
        let q = a().parse_star_word("x * z").unwrap();
        let r2 = rule("y", "y");
        let sw = e.special_sword(&q, &r2).unwrap();
        assert_eq!(sw.word, w("x y z"));
    }

    #[test]
    fn non_alsbw_placement_is_rejected() {
        let r = rule("y", "y");
        let rules = FiniteRules::new([r.clone()]);
        let e = Engine::new(K, &rules);
        let q = a().parse_star_word("* x").unwrap();
        assert!(matches!(e.special_sword(&q, &r), Err(RewriteError::NotAlsbw { .. })));
    }

    #[test]
    fn reduction_of_irreducible_is_identity() {
        let rules = FiniteRules::new([rule("r", "P((x y))")]);
        let e = Engine::new(K, &rules);
        let h = lie("x");
        let red = e.reduce(&h).unwrap();
        assert_eq!(red.remainder, h);
        assert!(red.trace.is_empty());
    }

    #[test]
    fn monomial_rule_kills_its_multiples() {
        let rules = FiniteRules::new([rule("y", "y")]);
        let e = Engine::new(K, &rules);
        let h = lie("(x (x y)) + 3 * (x y) + z");
        let red = e.reduce(&h).unwrap();
        // x x y and x y reduce; z does not contain y and stays.
        assert_eq!(red.remainder.display(&a()), "1 * z");
        for s in &red.trace {
            if let Some(after) = &s.leading_after {
                assert_eq!(compare(K, after, &s.leading_before), Ordering::Less);
            }
        }
    }

    #[test]
    fn self_inclusion_is_zero() {
        let r = rule("r", "P((x y)) + -1 * (x P(y))");
        let rules = FiniteRules::new([r.clone()]);
        let e = Engine::new(K, &rules);
        let cs = e.compositions(&r, &r).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].value.is_zero());
        assert!(e.is_trivial(&cs[0]).unwrap().0);
    }

    #[test]
    fn empty_rule_set_keeps_whole_slice() {
        let rules = FiniteRules::default();
        let e = Engine::new(K, &rules);
        let rep = e.cd_dimension_check(2, 3).unwrap();
        assert!(rep.balanced);
        assert_eq!(rep.irreducible, rep.slice_dim);
        assert_eq!(rep.rank, 0);
    }

    #[test]
    fn bracketings_are_catalan() {
        let leaves: Vec<Tree> = (0..4).map(|i| Tree::Leaf(crate::word::Letter(i))).collect();
        assert_eq!(all_bracketings(&leaves).len(), 5);
    }
}
