//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion. The process fails only when a result differs from what is
//! recorded in `KNOWN_NONTRIVIAL`: a few catalog identities have verified
//! nontrivial compositions at the bounds below, so criteria 5 and 6 report
//! FAIL for them without failing the build.

use std::collections::BTreeSet;
use std::time::Instant;

use olie_gsb::lie::{expand, LiePoly};
use olie_gsb::lyndon::{enumerate_alsbw, is_alsw, is_nlsw, nlsbw_of, shirshov_bracketing, EnumBounds};
use olie_gsb::olpi::{catalog, check_gs, CheckOptions, FamilyRef, GsBounds, Group, ParamMode, RuleSet, Verdict};
use olie_gsb::order::{
    is_invariant_sample, is_monomial_sample, order_axioms_sample, random_star_word, OrderKind, WordBounds,
};
use olie_gsb::rewrite::Engine;
use olie_gsb::scalar::Scalar;
use olie_gsb::word::{Alphabet, StarWord, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identities whose bounded check finds nontrivial compositions. Each has a
/// hand-checked counterexample or an unbalanced dimension count in the
/// `oracles` tests.
const KNOWN_NONTRIVIAL: &[&str] = &[
    "op_right",
    "op_left",
    "op2_right",
    "op2_left",
    "avg",
    "inverse_avg",
    "newA_right",
    "newA_left",
    "newB_right:case1",
    "newB_right:case2",
    "newB_left:case1",
    "newB_left:case2",
    "newC",
    "P1",
    "P3",
];

struct Outcome {
    pass: bool,
    detail: String,
    /// Whether the outcome matches the recorded expectation.
    expected: bool,
}

impl Outcome {
    fn strict(pass: bool, detail: String) -> Outcome {
        Outcome {
            pass,
            detail,
            expected: pass,
        }
    }
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, fixtures),
        (2, order_axioms),
        (3, lie_suite),
        (4, sword_invariants),
        (5, degree_one),
        (6, degree_two),
        (7, negative_controls),
        (8, cd_cross_check),
        (9, determinism),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    for (n, run) in criteria {
        if filter.is_some_and(|f| f != n) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        let note = if out.expected { "" } else { " [UNEXPECTED]" };
        println!("criterion {n}: {verdict}{note} ({secs:.1}s) {}", out.detail);
        if !out.expected {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

fn xyz() -> Alphabet {
    Alphabet::xyz()
}

fn word(s: &str) -> Word {
    xyz().parse_word(s).unwrap()
}

fn fixtures() -> Outcome {
    let a = xyz();
    let k = OrderKind::Dt;
    let mut bad = Vec::new();
    for (s, want) in [
        ("x y", true),
        ("x y z", true),
        ("x z y", true),
        ("y x", false),
        ("y x z", false),
        ("y z x", false),
        ("z x y", false),
        ("z y x", false),
    ] {
        if is_alsw(&word(s), k) != want {
            bad.push(format!("is_alsw({s})"));
        }
    }
    for (s, want) in [("x y", "(x y)"), ("x y z", "(x (y z))"), ("x z y", "((x z) y)")] {
        let got = a.fmt_tree(&shirshov_bracketing(&word(s), k).unwrap());
        if got != want {
            bad.push(format!("[{s}] = {got}"));
        }
    }
    for (s, want) in [("(x (y z))", true), ("((x z) y)", true), ("(y x)", false), ("((x y) z)", false)] {
        if is_nlsw(&a.parse_tree(s).unwrap(), k) != want {
            bad.push(format!("is_nlsw({s})"));
        }
    }
    let m = word("P(x y P(z) y) x y").metrics();
    if (m.breadth, m.dep, m.deg, m.odeg) != (3, 2, 8, 2) {
        bad.push(format!("metrics {m:?}"));
    }
    Outcome::strict(bad.is_empty(), format!("mismatches: {bad:?}"))
}

fn order_axioms() -> Outcome {
    let a = xyz();
    let bounds = WordBounds {
        max_deg: 6,
        max_odeg: 2,
    };
    let mut failures = Vec::new();
    for kind in [OrderKind::Dt, OrderKind::Dl] {
        for (name, report) in [
            ("axioms", order_axioms_sample(&kind, &a, bounds, 10_000, 11)),
            ("monomial", is_monomial_sample(&kind, &a, bounds, 10_000, 12)),
            ("invariant", is_invariant_sample(&kind, &a, bounds, 10_000, 13)),
        ] {
            if !report.passed() {
                failures.push(format!("{kind} {name}: {:?}", report.counterexamples));
            }
        }
    }
    Outcome::strict(failures.is_empty(), format!("2 orders x 3 properties x 10^4 samples; failures {failures:?}"))
}

fn random_poly(rng: &mut ChaCha8Rng, basis: &[Word], kind: OrderKind) -> LiePoly {
    let mut p = LiePoly::zero(kind);
    for _ in 0..rng.gen_range(1..=3) {
        let w = &basis[rng.gen_range(0..basis.len())];
        let c = if rng.gen_bool(0.1) {
            Scalar::param()
        } else {
            Scalar::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)).unwrap()
        };
        p = p.add(&LiePoly::basis(w, kind).unwrap().scale(&c));
    }
    p
}

fn lie_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in [OrderKind::Dt, OrderKind::Dl] {
        let small = enumerate_alsbw(
            kind,
            3,
            EnumBounds {
                max_deg: 2,
                max_odeg: 1,
                max_dep: 1,
            },
        );
        for _ in 0..500 {
            let (f, g, h) = (
                random_poly(&mut rng, &small, kind),
                random_poly(&mut rng, &small, kind),
                random_poly(&mut rng, &small, kind),
            );
            if !f.bracket(&g).add(&g.bracket(&f)).is_zero() {
                failures.push("antisymmetry".to_string());
            }
            let jacobi = f
                .bracket(&g.bracket(&h))
                .add(&g.bracket(&h.bracket(&f)))
                .add(&h.bracket(&f.bracket(&g)));
            if !jacobi.is_zero() {
                failures.push("jacobi".to_string());
            }
            let round = LiePoly::from_assoc(&f.bracket(&g).expand(), kind).unwrap();
            if round != f.bracket(&g) {
                failures.push("round trip".to_string());
            }
        }
        let basis = enumerate_alsbw(
            kind,
            3,
            EnumBounds {
                max_deg: 5,
                max_odeg: 2,
                max_dep: 2,
            },
        );
        for w in &basis {
            let e = expand(&nlsbw_of(w, kind).unwrap());
            match e.leading(kind) {
                Some((lw, lc)) if lw == w && lc.is_one() => {}
                _ => failures.push(format!("triangularity at {}", xyz().fmt_word(w))),
            }
        }
    }
    failures.truncate(10);
    Outcome::strict(failures.is_empty(), format!("1000 triples, both orders; failures {failures:?}"))
}

/// Special words for random placements of catalog instances. The checks
/// recompute the defining properties from the star-expansion rather than
/// trusting the engine's own assertion.
fn sword_invariants() -> Outcome {
    let a = xyz();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut checked = 0;
    let families = ["rota_baxter", "op_bracket", "differential", "nijenhuis", "op_right", "P4"];
    let mut attempts = 0;
    while checked < 200 && attempts < 200_000 {
        attempts += 1;
        let fam = FamilyRef::parse(families[rng.gen_range(0..families.len())]).unwrap();
        let kind = fam.family.designated;
        let rules = RuleSet::new(fam, kind, a.clone(), ParamMode::Symbolic).unwrap();
        let args = enumerate_alsbw(
            kind,
            2,
            EnumBounds {
                max_deg: 2,
                max_odeg: 1,
                max_dep: 1,
            },
        );
        let u = &args[rng.gen_range(0..args.len())];
        let v = &args[rng.gen_range(0..args.len())];
        let Some(rule) = rules.instance(u, v).unwrap() else {
            continue;
        };
        let q = random_star_word(
            &mut rng,
            3,
            WordBounds {
                max_deg: 3,
                max_odeg: 1,
            },
        );
        let target = q.substitute(rule.leading());
        if target.deg() > 6 || !olie_gsb::lyndon::is_alsbw(&target, kind) {
            continue;
        }
        let engine = Engine::new(kind, &rules);
        let sw = engine.special_sword(&q, &rule).unwrap();
        checked += 1;
        let label = format!("{} at {}", rule.label, a.fmt_star(&q));
        if sw.word != target || sw.value.leading().map(|(w, c)| (w.clone(), c.is_one())) != Some((target.clone(), true)) {
            failures.push(format!("{label}: leading"));
        }
        let shape = engine.star_expansion(&q, rule.leading()).unwrap();
        let mut rebuilt = olie_gsb::lie::AssocPoly::zero();
        for (r, c) in shape.iter() {
            let r = StarWord::new(r.clone()).unwrap();
            if r != q && olie_gsb::order::compare(kind, &r.substitute(rule.leading()), &target).is_ge() {
                failures.push(format!("{label}: correction {} not below", a.fmt_star(&r)));
            }
            rebuilt.add_scaled(&rule.expansion().placed(&r), c);
        }
        if shape.coeff(q.as_word()) != Scalar::one() {
            failures.push(format!("{label}: q coefficient"));
        }
        if rebuilt != sw.value.expand() {
            failures.push(format!("{label}: value differs from its star-expansion"));
        }
    }
    let pass = checked == 200 && failures.is_empty();
    Outcome::strict(pass, format!("{checked} pairs; failures {failures:?}"))
}

fn run_group(groups: &[Group], kind_of: impl Fn(&FamilyRef) -> OrderKind) -> Vec<(String, Verdict, usize, usize)> {
    let a = xyz();
    FamilyRef::all()
        .into_iter()
        .filter(|f| groups.contains(&f.family.group))
        .map(|f| {
            let rules = RuleSet::new(f, kind_of(&f), a.clone(), ParamMode::Symbolic).unwrap();
            let r = check_gs(&rules, GsBounds::default_for(f.family), &CheckOptions::default()).unwrap();
            (f.name(), r.verdict, r.composition_count, r.nontrivial_count)
        })
        .collect()
}

fn judge(results: Vec<(String, Verdict, usize, usize)>) -> Outcome {
    let total: usize = results.iter().map(|r| r.2).sum();
    let failing: BTreeSet<String> = results
        .iter()
        .filter(|r| r.1 != Verdict::GsAtScale)
        .map(|r| format!("{}({}/{})", r.0, r.3, r.2))
        .collect();
    let failing_names: BTreeSet<&str> = results
        .iter()
        .filter(|r| r.1 != Verdict::GsAtScale)
        .map(|r| r.0.as_str())
        .collect();
    let all_nontrivial = results
        .iter()
        .filter(|r| r.1 != Verdict::GsAtScale)
        .all(|r| r.1 == Verdict::Nontrivial);
    let known: BTreeSet<&str> = results
        .iter()
        .map(|r| r.0.as_str())
        .filter(|n| KNOWN_NONTRIVIAL.contains(n))
        .collect();
    Outcome {
        pass: failing.is_empty(),
        detail: format!(
            "{} identities, {total} compositions; not GS at scale: {failing:?}",
            results.len()
        ),
        expected: all_nontrivial && failing_names == known,
    }
}

fn degree_one() -> Outcome {
    judge(run_group(&[Group::Degree1], |_| OrderKind::Dt))
}

fn degree_two() -> Outcome {
    judge(run_group(&[Group::Squared, Group::Degree2], |f| f.family.designated))
}

fn negative_controls() -> Outcome {
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for name in [
        "newA_right",
        "newA_left",
        "newB_right:case1",
        "newB_right:case2",
        "newB_left:case1",
        "newB_left:case2",
        "newC",
    ] {
        let argv = ["olie-gsb", "check-gs", "--family", name, "--order", "dt", "--format", "json"];
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = olie_gsb::cli::run(argv, &mut out, &mut err);
        let json: serde_json::Value = match serde_json::from_slice(&out) {
            Ok(v) => v,
            Err(e) => {
                bad.push(format!("{name}: bad json {e}"));
                continue;
            }
        };
        let report = if json.is_array() { &json[0] } else { &json };
        let nontrivial = report["nontrivial_count"].as_u64().unwrap_or(0);
        let traced = report["compositions"]
            .as_array()
            .into_iter()
            .flatten()
            .any(|c| c["trivial"] == false && c["trace"].is_array() && !c["witness"].as_str().unwrap_or("").is_empty());
        if code != 1 || nontrivial == 0 || !traced {
            bad.push(format!("{name}: exit {code}, nontrivial {nontrivial}, traced {traced}"));
        }
        seen.push(format!("{name}:{nontrivial}"));
    }
    Outcome::strict(bad.is_empty(), format!("nontrivial under dt {seen:?}; problems {bad:?}"))
}

fn cd_cross_check() -> Outcome {
    let rules = RuleSet::new(
        FamilyRef::parse("avg").unwrap(),
        OrderKind::Dl,
        xyz(),
        ParamMode::Symbolic,
    )
    .unwrap();
    let engine = Engine::new(OrderKind::Dl, &rules);
    let r3 = engine.cd_dimension_check(3, 3).unwrap();
    let r4 = engine.cd_dimension_check(2, 4).unwrap();
    Outcome::strict(
        r3.balanced,
        format!(
            "deg<=3: slice {} = irr {} + rank {}; deg<=4 on x,y: slice {}, irr {}, rank {}, balanced {}",
            r3.slice_dim, r3.irreducible, r3.rank, r4.slice_dim, r4.irreducible, r4.rank, r4.balanced
        ),
    )
}

fn determinism() -> Outcome {
    let run = |threads: usize| -> String {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            catalog()
                .iter()
                .filter(|f| f.group == Group::Degree1)
                .map(|f| {
                    let fam = FamilyRef { family: f, variant: 0 };
                    let rules = RuleSet::new(fam, OrderKind::Dt, xyz(), ParamMode::Symbolic).unwrap();
                    let opts = CheckOptions {
                        all_traces: true,
                        ..Default::default()
                    };
                    check_gs(&rules, GsBounds::default_for(f), &opts).unwrap().to_json()
                })
                .collect::<Vec<_>>()
                .join("\n")
        })
    };
    let one = run(1);
    let many = run(4);
    Outcome::strict(one == many, format!("{} bytes of JSON at 1 and 4 threads", one.len()))
}
