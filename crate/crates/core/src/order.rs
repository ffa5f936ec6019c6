//! The lex order on prime sequences and the two invariant monomial orders
//! `Dl` (degree first) and `dt` (letter count first, operators above letters).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::{Alphabet, Letter, Prime, StarWord, Word, STAR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("unknown order {0:?} (expected \"Dl\" or \"dt\")")]
    UnknownOrder(String),
    #[error("primes {0} and {1} are not comparable under the given prime order")]
    Incomparable(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderKind {
    Dl,
    #[serde(rename = "dt")]
    Dt,
}

impl FromStr for OrderKind {
    type Err = OrderError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Dl" | "dl" | "DL" => Ok(OrderKind::Dl),
            "dt" | "Dt" | "DT" => Ok(OrderKind::Dt),
            _ => Err(OrderError::UnknownOrder(s.to_string())),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Dl => "Dl",
            OrderKind::Dt => "dt",
        })
    }
}

/// A total order on words; implemented by [`OrderKind`] and by test doubles.
pub trait MonomialOrder: Sync {
    fn cmp_words(&self, u: &Word, v: &Word) -> Ordering;

    /// Restriction to primes.
    fn cmp_primes(&self, p: &Prime, q: &Prime) -> Ordering {
        self.cmp_words(&Word::from_prime(p.clone()), &Word::from_prime(q.clone()))
    }
}

impl MonomialOrder for OrderKind {
    fn cmp_words(&self, u: &Word, v: &Word) -> Ordering {
        compare(*self, u, v)
    }

    fn cmp_primes(&self, p: &Prime, q: &Prime) -> Ordering {
        cmp_primes(*self, p, q)
    }
}

/// Compares two words under the chosen order; `Equal` iff `u == v`.
pub fn compare(kind: OrderKind, u: &Word, v: &Word) -> Ordering {
    if u == v {
        return Ordering::Equal;
    }
    if let (Some(a), Some(b)) = (u.single_op(), v.single_op()) {
        return compare(kind, a, b);
    }
    let head = match kind {
        OrderKind::Dl => u
            .deg()
            .cmp(&v.deg())
            .then(u.breadth().cmp(&v.breadth())),
        OrderKind::Dt => {
            if u.single_op().is_some() && v.single_letter().is_some() {
                return Ordering::Greater;
            }
            if u.single_letter().is_some() && v.single_op().is_some() {
                return Ordering::Less;
            }
            u.letter_count().cmp(&v.letter_count())
        }
    };
    head.then_with(|| primewise(kind, u.primes(), v.primes()))
}

fn primewise(kind: OrderKind, a: &[Prime], b: &[Prime]) -> Ordering {
    for (p, q) in a.iter().zip(b) {
        match cmp_primes(kind, p, q) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// The order restricted to primes. Letters follow the alphabet; an operator
/// prime is above every letter in both orders (for `Dl` because its degree is
/// at least 2).
pub fn cmp_primes(kind: OrderKind, p: &Prime, q: &Prime) -> Ordering {
    match (p, q) {
        (Prime::Letter(a), Prime::Letter(b)) => a.order_cmp(*b),
        (Prime::Op(a), Prime::Op(b)) => compare(kind, a, b),
        (Prime::Op(_), Prime::Letter(_)) => Ordering::Greater,
        (Prime::Letter(_), Prime::Op(_)) => Ordering::Less,
    }
}

/// Lex order on prime sequences in which the empty sequence is the largest
/// element, so a proper prefix beats any extension of it.
pub fn lex_compare<F>(u: &[Prime], v: &[Prime], prime_cmp: F) -> Result<Ordering, OrderError>
where
    F: Fn(&Prime, &Prime) -> Option<Ordering>,
{
    for (p, q) in u.iter().zip(v) {
        match prime_cmp(p, q) {
            Some(Ordering::Equal) => continue,
            Some(o) => return Ok(o),
            None => return Err(OrderError::Incomparable(format!("{p:?}"), format!("{q:?}"))),
        }
    }
    Ok(v.len().cmp(&u.len()))
}

/// [`lex_compare`] with primes ordered by `kind`.
pub fn lex_cmp(kind: OrderKind, u: &[Prime], v: &[Prime]) -> Ordering {
    lex_compare(u, v, |p, q| Some(cmp_primes(kind, p, q))).expect("total prime order")
}

/// Size limits for random word generation.
#[derive(Clone, Copy, Debug)]
pub struct WordBounds {
    pub max_deg: u32,
    pub max_odeg: u32,
}

/// Random word over `letters` letters within `bounds`; never empty.
pub fn random_word<R: Rng>(rng: &mut R, letters: u16, bounds: WordBounds) -> Word {
    let deg = rng.gen_range(1..=bounds.max_deg);
    random_word_of(rng, letters, deg, bounds.max_odeg)
}

fn random_word_of<R: Rng>(rng: &mut R, letters: u16, mut deg: u32, mut odeg: u32) -> Word {
    let mut primes = Vec::new();
    while deg > 0 {
        if deg >= 2 && odeg > 0 && rng.gen_bool(0.35) {
            let inner_deg = rng.gen_range(1..deg);
            let inner_odeg = rng.gen_range(0..odeg);
            let inner = random_word_of(rng, letters, inner_deg, inner_odeg);
            deg -= 1 + inner.deg();
            odeg -= 1 + inner.odeg();
            primes.push(Prime::Op(inner));
        } else {
            primes.push(Prime::Letter(Letter(rng.gen_range(0..letters))));
            deg -= 1;
        }
    }
    Word::new(primes)
}

/// Random prime: a letter or an operator applied to a random word.
pub fn random_prime<R: Rng>(rng: &mut R, letters: u16, bounds: WordBounds) -> Prime {
    if bounds.max_odeg > 0 && bounds.max_deg >= 2 && rng.gen_bool(0.5) {
        let inner = random_word(
            rng,
            letters,
            WordBounds {
                max_deg: bounds.max_deg - 1,
                max_odeg: bounds.max_odeg - 1,
            },
        );
        Prime::Op(inner)
    } else {
        Prime::Letter(Letter(rng.gen_range(0..letters)))
    }
}

/// Random star-word: a random word with one letter occurrence replaced by `*`.
pub fn random_star_word<R: Rng>(rng: &mut R, letters: u16, bounds: WordBounds) -> StarWord {
    let w = random_word(rng, letters, bounds);
    let target = rng.gen_range(0..w.letter_count());
    let mut seen = 0;
    let q = replace_letter(&w, target, &mut seen);
    StarWord::new(q).expect("exactly one star")
}

fn replace_letter(w: &Word, target: u32, seen: &mut u32) -> Word {
    let primes = w
        .primes()
        .iter()
        .map(|p| match p {
            Prime::Letter(_) => {
                let hit = *seen == target;
                *seen += 1;
                if hit {
                    Prime::Letter(STAR)
                } else {
                    p.clone()
                }
            }
            Prime::Op(inner) => Prime::Op(replace_letter(inner, target, seen)),
        })
        .collect();
    Word::new(primes)
}

/// Result of a property-sampling run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub trials: usize,
    pub counterexamples: Vec<String>,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn fail(&mut self, msg: String) {
        // A handful of witnesses is enough to diagnose a broken order.
        if self.counterexamples.len() < 20 {
            self.counterexamples.push(msg);
        }
    }
}

fn sampler(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples `u > v` and placements `q`, checking `q⟨u⟩ > q⟨v⟩`.
pub fn is_monomial_sample(
    order: &dyn MonomialOrder,
    alphabet: &Alphabet,
    bounds: WordBounds,
    trials: usize,
    seed: u64,
) -> SampleReport {
    let mut rng = sampler(seed);
    let n = alphabet.len() as u16;
    let mut report = SampleReport {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let mut u = random_word(&mut rng, n, bounds);
        let mut v = random_word(&mut rng, n, bounds);
        match order.cmp_words(&u, &v) {
            Ordering::Equal => continue,
            Ordering::Less => std::mem::swap(&mut u, &mut v),
            Ordering::Greater => {}
        }
        let q = random_star_word(&mut rng, n, bounds);
        let (qu, qv) = (q.substitute(&u), q.substitute(&v));
        if order.cmp_words(&qu, &qv) != Ordering::Greater {
            report.fail(format!(
                "u = {} > v = {} but q⟨u⟩ = {} is not above q⟨v⟩ = {}",
                alphabet.fmt_word(&u),
                alphabet.fmt_word(&v),
                alphabet.fmt_word(&qu),
                alphabet.fmt_word(&qv)
            ));
        }
    }
    report
}

/// Samples prime tuples and permutations, checking that the full order agrees
/// with the lex extension of its restriction to primes.
pub fn is_invariant_sample(
    order: &dyn MonomialOrder,
    alphabet: &Alphabet,
    bounds: WordBounds,
    trials: usize,
    seed: u64,
) -> SampleReport {
    let mut rng = sampler(seed);
    let n = alphabet.len() as u16;
    let mut report = SampleReport {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let len = rng.gen_range(1..=4);
        let primes: Vec<Prime> = (0..len)
            .map(|_| random_prime(&mut rng, n, bounds))
            .collect();
        let mut shuffled = primes.clone();
        shuffled.shuffle(&mut rng);
        let (u, v) = (Word::new(primes), Word::new(shuffled));
        let full = order.cmp_words(&u, &v);
        let lex = lex_compare(u.primes(), v.primes(), |p, q| Some(order.cmp_primes(p, q)))
            .expect("total prime order");
        if full != lex {
            report.fail(format!(
                "{} vs {}: order gives {full:?}, lex on primes gives {lex:?}",
                alphabet.fmt_word(&u),
                alphabet.fmt_word(&v)
            ));
        }
    }
    report
}

/// Antisymmetry, totality (`Equal` iff identical) and transitivity on random
/// pairs and triples.
pub fn order_axioms_sample(
    order: &dyn MonomialOrder,
    alphabet: &Alphabet,
    bounds: WordBounds,
    trials: usize,
    seed: u64,
) -> SampleReport {
    let mut rng = sampler(seed);
    let n = alphabet.len() as u16;
    let mut report = SampleReport {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let [a, b, c] = [(); 3].map(|_| random_word(&mut rng, n, bounds));
        let fmt = |w: &Word| alphabet.fmt_word(w);
        let ab = order.cmp_words(&a, &b);
        if ab != order.cmp_words(&b, &a).reverse() {
            report.fail(format!("antisymmetry fails on {} / {}", fmt(&a), fmt(&b)));
        }
        if (ab == Ordering::Equal) != (a == b) {
            report.fail(format!("Equal disagrees with identity on {} / {}", fmt(&a), fmt(&b)));
        }
        let bc = order.cmp_words(&b, &c);
        if ab == bc && ab != Ordering::Equal && order.cmp_words(&a, &c) != ab {
            report.fail(format!(
                "transitivity fails on {} / {} / {}",
                fmt(&a),
                fmt(&b),
                fmt(&c)
            ));
        }
    }
    report
}
