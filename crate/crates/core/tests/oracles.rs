//! Independent oracles: brute-force scans and hand-derived identities checked
//! against the library.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use olie_gsb::lie::{expand, AssocPoly, LiePoly};
use olie_gsb::lyndon::{enumerate_alsbw, is_alsbw, is_alsw, shirshov_bracketing, EnumBounds};
use olie_gsb::olpi::{FamilyRef, ParamMode, RuleSet};
use olie_gsb::order::{compare, OrderKind};
use olie_gsb::rewrite::Engine;
use olie_gsb::scalar::Scalar;
use olie_gsb::word::{placements, Alphabet, Prime, StarWord, Word};

const DT: OrderKind = OrderKind::Dt;
const DL: OrderKind = OrderKind::Dl;

fn a() -> Alphabet {
    Alphabet::xyz()
}

fn w(s: &str) -> Word {
    a().parse_word(s).unwrap()
}

fn star(s: &str) -> StarWord {
    a().parse_star_word(s).unwrap()
}

fn gen(name: &str, kind: OrderKind) -> LiePoly {
    LiePoly::basis(&w(name), kind).unwrap()
}

fn lie(s: &str, kind: OrderKind) -> LiePoly {
    LiePoly::parse(&a(), s, kind).unwrap()
}

fn rules(family: &str, kind: OrderKind) -> RuleSet {
    RuleSet::new(FamilyRef::parse(family).unwrap(), kind, a(), ParamMode::Symbolic).unwrap()
}

/// Operator-free lex comparison on letter strings: earlier letters are
/// larger and a proper prefix is larger than its extensions.
fn plain_lex(u: &[u8], v: &[u8]) -> Ordering {
    for (p, q) in u.iter().zip(v) {
        if p != q {
            return q.cmp(p);
        }
    }
    v.len().cmp(&u.len())
}

fn plain_lyndon(s: &[u8]) -> bool {
    (1..s.len()).all(|i| plain_lex(s, &s[i..]) == Ordering::Greater)
}

fn all_strings(letters: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                letters.iter().map(move |l| {
                    let mut t = s.clone();
                    t.push(*l);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn spaced(s: &[u8]) -> String {
    s.iter().map(|&c| (c as char).to_string()).collect::<Vec<_>>().join(" ")
}

#[test]
fn placements_of_a_letter_by_scanning_positions() {
    let got: Vec<String> = placements(&w("x y x"), &w("x")).iter().map(|q| a().fmt_star(q)).collect();
    let text = ["x", "y", "x"];
    let want: Vec<String> = (0..3)
        .filter(|&i| text[i] == "x")
        .map(|i| {
            let mut t = text.map(String::from);
            t[i] = "*".into();
            t.join(" ")
        })
        .collect();
    assert_eq!(got, want);
    assert_eq!(got, ["* y x", "x y *"]);
}

#[test]
fn dt_recurses_into_operator_payloads() {
    // x > y, so P(y) < P(x) once both are unwrapped.
    assert_eq!(compare(DT, &w("P(y)"), &w("P(x)")), Ordering::Less);
    assert_eq!(compare(DT, &w("y"), &w("x")), Ordering::Less);
}

#[test]
fn operator_prime_then_letter_is_lyndon_under_dt() {
    let u = w("P(x) y");
    assert_eq!(compare(DT, &w("P(x)"), &w("y")), Ordering::Greater);
    assert_eq!(compare(DT, &u, &w("y")), Ordering::Greater);
    assert!(is_alsw(&u, DT));
    let t = shirshov_bracketing(&u, DT).unwrap();
    assert_eq!(a().fmt_tree(&t), "(P(x) y)");
}

#[test]
fn operator_free_enumeration_matches_brute_force() {
    let ab = Alphabet::new(["x", "y"]).unwrap();
    let got: BTreeSet<String> = enumerate_alsbw(
        DT,
        2,
        EnumBounds {
            max_deg: 3,
            max_odeg: 0,
            max_dep: 0,
        },
    )
    .iter()
    .map(|w| ab.fmt_word(w))
    .collect();
    let want: BTreeSet<String> = all_strings(b"xy", 3)
        .into_iter()
        .filter(|s| plain_lyndon(s))
        .map(|s| spaced(&s))
        .collect();
    assert_eq!(got, want);
    let expected: BTreeSet<String> = ["x", "y", "x y", "x x y", "x y y"].map(String::from).into();
    assert_eq!(got, expected);
    // Necklace count for binary Lyndon words of length 3: (2^3 - 2) / 3.
    assert_eq!(got.iter().filter(|s| s.split(' ').count() == 3).count(), (8 - 2) / 3);
}

#[test]
fn plain_lyndon_agrees_with_library_on_three_letters() {
    for s in all_strings(b"xyz", 5) {
        assert_eq!(is_alsw(&w(&spaced(&s)), DT), plain_lyndon(&s), "{}", spaced(&s));
    }
}

/// Expands a bracket tree over plain letters by the commutator rule.
fn expand_by_hand(t: &str) -> Vec<(String, i64)> {
    fn go(t: &olie_gsb::word::Tree, al: &Alphabet) -> Vec<(String, i64)> {
        use olie_gsb::word::Tree;
        match t {
            Tree::Leaf(l) => vec![(al.name(*l).to_string(), 1)],
            Tree::Pair(l, r) => {
                let (l, r) = (go(l, al), go(r, al));
                let mut out = Vec::new();
                for (a, c) in &l {
                    for (b, d) in &r {
                        out.push((format!("{a} {b}"), c * d));
                        out.push((format!("{b} {a}"), -c * d));
                    }
                }
                out
            }
            Tree::Op(_) => unreachable!("operator-free input"),
        }
    }
    let al = a();
    go(&al.parse_tree(t).unwrap(), &al)
}

fn assoc_of(terms: &[(String, i64)]) -> AssocPoly {
    let mut p = AssocPoly::zero();
    for (s, c) in terms {
        p.add_term(w(s), Scalar::from_i64(*c));
    }
    p
}

#[test]
fn expansion_matches_commutator_rule() {
    let t = a().parse_tree("(x (y z))").unwrap();
    assert_eq!(expand(&t), assoc_of(&expand_by_hand("(x (y z))")));
    let want = [("x y z", 1), ("x z y", -1), ("y z x", -1), ("z y x", 1)].map(|(s, c)| (s.to_string(), c));
    assert_eq!(expand(&t), assoc_of(&want));
}

#[test]
fn from_assoc_recognizes_hand_expansion() {
    // (x (x y)) expands to xxy - 2xyx + yxx.
    let by_hand = assoc_of(&expand_by_hand("(x (x y))"));
    let target = [("x y x", 2), ("y x x", -1), ("x x y", -1)].map(|(s, c)| (s.to_string(), c));
    let mut neg = AssocPoly::zero();
    neg.add_scaled(&by_hand, &Scalar::from_i64(-1));
    assert_eq!(neg, assoc_of(&target));
    let f = LiePoly::from_assoc(&assoc_of(&target), DT).unwrap();
    assert_eq!(f.display(&a()), "-1 * (x (x y))");
}

#[test]
fn bracket_against_expansion() {
    let xy = lie("(x y)", DT);
    let got = xy.bracket(&gen("x", DT));
    let mut want = AssocPoly::zero();
    want.add_scaled(&expand(&a().parse_tree("(x (x y))").unwrap()), &Scalar::from_i64(-1));
    assert_eq!(got.expand(), want);
    assert_eq!(got.display(&a()), "-1 * (x (x y))");
}

/// Leading words of `phi(u, v)` over all basis arguments up to the given
/// degrees, computed directly with Lie arithmetic.
fn instance_leads(
    kind: OrderKind,
    max_arg_deg: u32,
    max_odeg: u32,
    admit: impl Fn(&Word, &Word) -> bool,
    phi: impl Fn(&LiePoly, &LiePoly) -> LiePoly,
) -> BTreeSet<Word> {
    let args = enumerate_alsbw(
        kind,
        3,
        EnumBounds {
            max_deg: max_arg_deg,
            max_odeg,
            max_dep: max_odeg,
        },
    );
    let mut out = BTreeSet::new();
    for u in &args {
        for v in &args {
            if u.deg() + v.deg() > max_arg_deg + 1 || !admit(u, v) {
                continue;
            }
            let p = phi(&LiePoly::basis(u, kind).unwrap(), &LiePoly::basis(v, kind).unwrap());
            if let Some(lw) = p.leading_word() {
                out.insert(lw.clone());
            }
        }
    }
    out
}

fn contains_any(word: &Word, leads: &BTreeSet<Word>) -> Option<Word> {
    leads.iter().find(|l| !placements(word, l).is_empty()).cloned()
}

fn op(p: &LiePoly) -> LiePoly {
    p.op_apply()
}

fn psi(u: &LiePoly, v: &LiePoly) -> LiePoly {
    op(&u.bracket(v)).sub(&u.bracket(&op(v)))
}

fn avg(u: &LiePoly, v: &LiePoly) -> LiePoly {
    op(u).bracket(&op(v)).sub(&op(&u.bracket(&op(v))))
}

fn p1(u: &LiePoly, v: &LiePoly) -> LiePoly {
    op(&op(u)).bracket(v).sub(&op(&op(u).bracket(v)))
}

#[test]
fn op_right_ideal_has_an_irreducible_leading_word() {
    let (x, y) = (gen("x", DT), gen("y", DT));
    let xy = x.bracket(&y);
    let r = xy.bracket(&x.bracket(&op(&y)));
    let combo = psi(&x.bracket(&xy), &y)
        .sub(&psi(&x, &xy.bracket(&y)))
        .sub(&x.bracket(&psi(&xy, &y)));
    assert_eq!(r, combo);
    let lead = r.leading_word().unwrap().clone();
    assert_eq!(lead, w("P(y) x x y"));
    // Every argument pair, not only the lexicographically ordered ones.
    let leads = instance_leads(DT, 4, 1, |_, _| true, psi);
    assert_eq!(contains_any(&lead, &leads), None);
    // The three instances used above are in the restricted set as well.
    let rs = rules("op_right", DT);
    for (u, v) in [("x x y", "y"), ("x", "x y y"), ("x y", "y")] {
        assert!(rs.policy().admits(DT, &w(u), &w(v)));
    }
}

#[test]
fn op_right_first_composition_leaves_a_remainder() {
    let (x, y, z) = (gen("x", DT), gen("y", DT), gen("z", DT));
    let h = psi(&x.bracket(&y), &z).sub(&psi(&x, &y.bracket(&z)));
    let expected = x.bracket(&z).bracket(&op(&y)).add(&y.bracket(&x.bracket(&op(&z))));
    // The same difference rewritten with instances whose first argument is
    // lexicographically larger.
    let rewritten = psi(&x.bracket(&z), &y)
        .add(&x.bracket(&psi(&y, &z)))
        .add(&expected);
    assert_eq!(h, rewritten);
    let lead = expected.leading_word().unwrap().clone();
    assert_eq!(lead, w("P(y) x z"));
    let rs = rules("op_right", DT);
    let leads = instance_leads(DT, 3, 1, |u, v| rs.policy().admits(DT, u, v), psi);
    assert_eq!(contains_any(&lead, &leads), None);

    let engine = Engine::new(DT, &rs);
    let f = rs.instance(&w("x y"), &w("z")).unwrap().unwrap();
    let g = rs.instance(&w("x"), &w("y z")).unwrap().unwrap();
    let comp = engine
        .compositions(&f, &g)
        .unwrap()
        .into_iter()
        .find(|c| c.w == w("P(x y z)"))
        .expect("including composition at P(x y z)");
    let (trivial, red) = engine.is_trivial(&comp).unwrap();
    assert!(!trivial);
    assert_eq!(red.remainder.make_monic().unwrap(), expected.make_monic().unwrap());
}

#[test]
fn avg_with_all_arguments_is_not_closed() {
    let (x, y) = (gen("x", DL), gen("y", DL));
    let sum = avg(&x, &y).add(&avg(&y, &x));
    let want = op(&x.bracket(&op(&y)).add(&y.bracket(&op(&x)))).neg();
    assert_eq!(sum, want);
    let lead = sum.leading_word().unwrap().clone();
    assert_eq!(lead, w("P(P(x) y)"));
    let leads = instance_leads(DL, 3, 1, |_, _| true, avg);
    assert_eq!(contains_any(&lead, &leads), None);
}

#[test]
fn avg_triple_intersection_is_not_trivial() {
    let (x, y, z) = (gen("x", DL), gen("y", DL), gen("z", DL));
    let (px, py, pz) = (op(&x), op(&y), op(&z));
    let h = avg(&x, &y).bracket(&pz).sub(&px.bracket(&avg(&y, &z)));
    assert!(compare(DL, h.leading_word().unwrap(), &w("P(x) P(y) P(z)")).is_lt());
    // Hand rewriting using only instances with u >= v in the order.
    let xpz = x.bracket(&pz);
    let xpy = x.bracket(&py);
    let ypz = y.bracket(&pz);
    let rest = op(&xpz.bracket(&py))
        .sub(&op(&xpy.bracket(&pz)))
        .sub(&op(&ypz.bracket(&px)));
    let combo = py
        .bracket(&avg(&x, &z))
        .neg()
        .add(&avg(&xpz, &y))
        .sub(&avg(&xpy, &z))
        .sub(&avg(&ypz, &x))
        .add(&rest);
    assert_eq!(h, combo);
    let rs = rules("avg", DL);
    for (u, v) in [("x", "z"), ("x P(z)", "y"), ("x P(y)", "z"), ("y P(z)", "x")] {
        assert!(rs.policy().admits(DL, &w(u), &w(v)), "{u} {v}");
    }
    let engine = Engine::new(DL, &rs);
    let red = engine.reduce(&rest).unwrap();
    assert!(!red.remainder.is_zero());
    let lead = red.remainder.leading_word().unwrap().clone();
    let leads = instance_leads(DL, 5, 2, |u, v| rs.policy().admits(DL, u, v), avg);
    assert_eq!(contains_any(&lead, &leads), None, "{}", a().fmt_word(&lead));
    // The composition itself reduces to the same class.
    let f = rs.instance(&w("x"), &w("y")).unwrap().unwrap();
    let g = rs.instance(&w("y"), &w("z")).unwrap().unwrap();
    let comp = engine
        .compositions(&f, &g)
        .unwrap()
        .into_iter()
        .find(|c| c.w == w("P(x) P(y) P(z)"))
        .expect("intersection at P(x) P(y) P(z)");
    let (trivial, cred) = engine.is_trivial(&comp).unwrap();
    assert!(!trivial);
    assert_eq!(cred.remainder, red.remainder);
}

#[test]
fn p1_prefix_composition_is_not_trivial() {
    let (x, y) = (gen("x", DL), gen("y", DL));
    let lhs = p1(&x, &x.bracket(&y)).sub(&p1(&x, &x).bracket(&y)).add(&p1(&x, &y).bracket(&x));
    let px = op(&x);
    let rhs = op(&px.bracket(&x))
        .bracket(&y)
        .sub(&op(&px.bracket(&y)).bracket(&x))
        .sub(&op(&px.bracket(&x.bracket(&y))));
    assert_eq!(lhs, rhs);
    let lead = rhs.leading_word().unwrap().clone();
    assert_eq!(lead, w("P(P(x) x) y"));
    let leads = instance_leads(DL, 4, 2, |_, _| true, p1);
    assert_eq!(contains_any(&lead, &leads), None);

    let rs = rules("P1", DL);
    let engine = Engine::new(DL, &rs);
    let f = rs.instance(&w("x"), &w("x y")).unwrap().unwrap();
    let g = rs.instance(&w("x"), &w("x")).unwrap().unwrap();
    let comp = engine
        .compositions(&f, &g)
        .unwrap()
        .into_iter()
        .find(|c| c.w == w("P(P(x)) x y"))
        .expect("including composition at P(P(x)) x y");
    let (trivial, red) = engine.is_trivial(&comp).unwrap();
    assert!(!trivial);
    assert_eq!(red.remainder.make_monic().unwrap(), rhs.make_monic().unwrap());
}

#[test]
fn monomial_bracket_irreducibles_by_placement_scan() {
    let rs = rules("op_bracket", DT);
    let engine = Engine::new(DT, &rs);
    let report = engine.cd_dimension_check(2, 4).unwrap();
    assert!(report.balanced);
    fn has_wide_operator(w: &Word) -> bool {
        w.primes().iter().any(|p| match p {
            Prime::Op(inner) => inner.breadth() >= 2 || has_wide_operator(inner),
            Prime::Letter(_) => false,
        })
    }
    let slice = enumerate_alsbw(
        DT,
        2,
        EnumBounds {
            max_deg: 4,
            max_odeg: 4,
            max_dep: 4,
        },
    );
    let want: BTreeSet<&Word> = slice.iter().filter(|w| !has_wide_operator(w)).collect();
    let got: BTreeSet<&Word> = report.irreducible_words.iter().collect();
    assert_eq!(got, want);
}

#[test]
fn avg_matches_adjacent_operator_pairs() {
    let rs = rules("avg", DL);
    let engine = Engine::new(DL, &rs);
    let target = w("P(x) P(y) P(z)");
    let leads = instance_leads(DL, 1, 0, |u, v| rs.policy().admits(DL, u, v), avg);
    let mut want: Vec<String> = leads
        .iter()
        .flat_map(|l| placements(&target, l))
        .map(|q| a().fmt_star(&q))
        .collect();
    want.sort();
    let mut got: Vec<String> = engine.matches_at(&target).iter().map(|m| a().fmt_star(&m.q)).collect();
    got.sort();
    assert_eq!(got, want);
    assert_eq!(got, ["* P(z)", "P(x) *"]);
}

#[test]
fn sword_inside_operator_has_the_expected_shape() {
    let rs = rules("op_right", DT);
    let engine = Engine::new(DT, &rs);
    let s = rs.instance(&w("x"), &w("y")).unwrap().unwrap();
    let q = star("P(* z)");
    let target = q.substitute(s.leading());
    assert_eq!(target, w("P(P(x y) z)"));
    assert!(is_alsbw(&target, DT));
    let sw = engine.special_sword(&q, &s).unwrap();
    assert_eq!(sw.value.leading().map(|(w, c)| (w.clone(), c.is_one())), Some((target.clone(), true)));
    // Here the standard bracketing of the target is P((P((x y)) z)), so the
    // special word is the rule bracketed with z under the operator.
    let (x, y, z) = (gen("x", DT), gen("y", DT), gen("z", DT));
    let by_hand = op(&psi(&x, &y).bracket(&z));
    assert_eq!(sw.value, by_hand);
}

#[test]
fn scalar_examples() {
    let t = Scalar::param();
    let one = Scalar::one();
    let inv = one.checked_div(&t.add_ref(&one)).unwrap();
    assert_eq!(inv.to_string(), "(1)/(a + 1)");
    let half = num_rational::BigRational::new(1.into(), 2.into());
    assert_eq!(inv.eval_at(&num_rational::BigRational::from_integer(1.into())).unwrap(), half);
}
