//! Catalog of operated Lie polynomial identities, instantiation at bracketed
//! Lyndon-Shirshov arguments, and bounded Gröbner-Shirshov checking.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use dashmap::DashMap;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lie::{expand_basis, trim_basis_cache, AssocPoly, LieError, LiePoly};
use crate::lyndon::{enumerate_alsbw, is_alsbw, is_nlsbw, EnumBounds};
use crate::order::{compare, lex_cmp, OrderKind};
use crate::rewrite::{
    intersection_spec, CompositionKind, CompositionSpec, Engine, Rule, RuleSource, TraceStep,
    Witness,
};
use crate::scalar::{Scalar, ScalarError};
use crate::word::{subword_placements, Alphabet, Letter, Prime, Tree, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OlpiError {
    #[error("unknown family {0:?}; run list-families for the catalog")]
    UnknownFamily(String),
    #[error("family {family} has no variant {variant:?}")]
    UnknownVariant { family: String, variant: String },
    #[error("parameter value {0} is excluded for this identity")]
    ExcludedParameter(String),
    #[error("argument {0} is not a Lyndon-Shirshov bracketed word")]
    BadArgument(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Placeholder letters standing for the two template arguments.
const ARG_X: Letter = Letter(u16::MAX - 1);
const ARG_Y: Letter = Letter(u16::MAX - 2);

/// Template over the placeholders `x`, `y`.
#[derive(Clone, Debug)]
pub enum Expr {
    X,
    Y,
    Bracket(Box<Expr>, Box<Expr>),
    Op(Box<Expr>),
    Lin(Vec<(Scalar, Expr)>),
}

impl Expr {
    fn br(a: Expr, b: Expr) -> Expr {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    fn op(a: Expr) -> Expr {
        Expr::Op(Box::new(a))
    }

    fn op2(a: Expr) -> Expr {
        Expr::op(Expr::op(a))
    }

    fn lin(terms: Vec<(Scalar, Expr)>) -> Expr {
        Expr::Lin(terms)
    }

    /// Envelope expansion with `x`, `y` replaced by the given polynomials.
    pub fn expand_with(&self, x: &AssocPoly, y: &AssocPoly) -> AssocPoly {
        match self {
            Expr::X => x.clone(),
            Expr::Y => y.clone(),
            Expr::Bracket(a, b) => a.expand_with(x, y).commutator(&b.expand_with(x, y)),
            Expr::Op(a) => a.expand_with(x, y).op(),
            Expr::Lin(terms) => {
                let mut out = AssocPoly::zero();
                for (c, e) in terms {
                    out.add_scaled(&e.expand_with(x, y), c);
                }
                out
            }
        }
    }

    fn specialize(&self, value: &BigRational) -> Result<Expr, ScalarError> {
        Ok(match self {
            Expr::X => Expr::X,
            Expr::Y => Expr::Y,
            Expr::Bracket(a, b) => Expr::br(a.specialize(value)?, b.specialize(value)?),
            Expr::Op(a) => Expr::op(a.specialize(value)?),
            Expr::Lin(terms) => Expr::Lin(
                terms
                    .iter()
                    .map(|(c, e)| Ok((c.specialize(value)?, e.specialize(value)?)))
                    .collect::<Result<_, ScalarError>>()?,
            ),
        })
    }

    fn uses_parameter(&self) -> bool {
        match self {
            Expr::X | Expr::Y => false,
            Expr::Bracket(a, b) => a.uses_parameter() || b.uses_parameter(),
            Expr::Op(a) => a.uses_parameter(),
            Expr::Lin(terms) => terms.iter().any(|(c, e)| !c.is_constant() || e.uses_parameter()),
        }
    }

    /// Human-readable form with `[..]` for brackets and `P(..)` for the operator.
    pub fn render(&self) -> String {
        match self {
            Expr::X => "x".into(),
            Expr::Y => "y".into(),
            Expr::Bracket(a, b) => format!("[{} {}]", a.render(), b.render()),
            Expr::Op(a) => format!("P({})", a.render()),
            Expr::Lin(terms) => terms
                .iter()
                .enumerate()
                .map(|(i, (c, e))| {
                    let body = e.render();
                    match (i, c.is_one(), c == &Scalar::from_i64(-1)) {
                        (0, true, _) => body,
                        (0, _, true) => format!("-{body}"),
                        (_, true, _) => format!(" + {body}"),
                        (_, _, true) => format!(" - {body}"),
                        (0, _, _) => format!("{c}*{body}"),
                        _ => format!(" + {c}*{body}"),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    /// Operated degree 1.
    Degree1,
    /// Operated degree 2 with the squared operator.
    Squared,
    /// Operated degree 2, mixed (Rota-Baxter type and the new identities).
    Degree2,
}

/// Which argument pairs `(u, v)` instantiate the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgumentPolicy {
    /// Every pair.
    All,
    /// `u ⪰ v` lexicographically on primes, so `uv` leads `[uv]`.
    Lex,
    /// `u ⪰ v` in the monomial order, so `⌊u⌋⌊v⌋` leads `[⌊u⌋⌊v⌋]`.
    Order,
}

impl ArgumentPolicy {
    pub fn admits(self, kind: OrderKind, u: &Word, v: &Word) -> bool {
        match self {
            ArgumentPolicy::All => true,
            ArgumentPolicy::Lex => lex_cmp(kind, u.primes(), v.primes()) != Ordering::Less,
            ArgumentPolicy::Order => compare(kind, u, v) != Ordering::Less,
        }
    }
}

impl FromStr for ArgumentPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(ArgumentPolicy::All),
            "lex" => Ok(ArgumentPolicy::Lex),
            "order" => Ok(ArgumentPolicy::Order),
            _ => Err(format!("unknown argument policy {s:?} (expected all|lex|order)")),
        }
    }
}

impl fmt::Display for ArgumentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgumentPolicy::All => "all",
            ArgumentPolicy::Lex => "lex",
            ArgumentPolicy::Order => "order",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Variant {
    pub name: &'static str,
    pub template: Expr,
    /// Parameter values that must not be used with this variant.
    pub excluded: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub id: &'static str,
    pub description: &'static str,
    pub group: Group,
    pub odeg: u32,
    /// The order under which the identity is expected to be GS.
    pub designated: OrderKind,
    /// An order under which the identity is expected not to be GS.
    pub negative: Option<OrderKind>,
    pub arguments: ArgumentPolicy,
    pub variants: Vec<Variant>,
}

impl Family {
    pub fn variant(&self, name: &str) -> Option<usize> {
        self.variants.iter().position(|v| v.name == name)
    }
}

fn s(n: i64) -> Scalar {
    Scalar::from_i64(n)
}

fn single(template: Expr) -> Vec<Variant> {
    vec![Variant {
        name: "default",
        template,
        excluded: Vec::new(),
    }]
}

#[allow(clippy::too_many_arguments)]
fn family(
    id: &'static str,
    description: &'static str,
    group: Group,
    designated: OrderKind,
    negative: Option<OrderKind>,
    arguments: ArgumentPolicy,
    variants: Vec<Variant>,
) -> Family {
    let odeg = if group == Group::Degree1 { 1 } else { 2 };
    Family {
        id,
        description,
        group,
        odeg,
        designated,
        negative,
        arguments,
        variants,
    }
}

/// One of the operator-bracket shapes, parameterized by the operator
/// (`P` for degree 1, `P∘P` for the squared group).
fn operator_group(group: Group, wrap: fn(Expr) -> Expr, suffix: &'static [&'static str; 6]) -> Vec<Family> {
    use ArgumentPolicy::*;
    use Expr::{X, Y};
    let dt = OrderKind::Dt;
    let opxy = || wrap(Expr::br(X, Y));
    let x_py = || Expr::br(X, wrap(Y));
    let px_y = || Expr::br(wrap(X), Y);
    vec![
        family(suffix[0], "operator of a bracket", group, dt, None, All, single(opxy())),
        family(
            suffix[1],
            "operator of a bracket equals bracket with operator on the right",
            group,
            dt,
            None,
            Lex,
            single(Expr::lin(vec![(s(1), opxy()), (s(-1), x_py())])),
        ),
        family(
            suffix[2],
            "operator of a bracket equals bracket with operator on the left",
            group,
            dt,
            None,
            Lex,
            single(Expr::lin(vec![(s(1), opxy()), (s(-1), px_y())])),
        ),
        family(
            suffix[3],
            "derivation (Leibniz) identity",
            group,
            dt,
            None,
            All,
            single(Expr::lin(vec![(s(1), opxy()), (s(-1), px_y()), (s(-1), x_py())])),
        ),
        family(suffix[4], "operator on the left argument", group, dt, None, All, single(px_y())),
        family(suffix[5], "operator on the right argument", group, dt, None, All, single(x_py())),
    ]
}

fn build_catalog() -> Vec<Family> {
    use ArgumentPolicy::*;
    use Expr::{X, Y};
    let dl = OrderKind::Dl;
    let dt = OrderKind::Dt;
    let px = || Expr::op(X);
    let py = || Expr::op(Y);
    let ppx = || Expr::op2(X);
    let ppy = || Expr::op2(Y);
    let px_py = || Expr::br(px(), py());
    let op_px_y = || Expr::op(Expr::br(px(), Y));
    let op_x_py = || Expr::op(Expr::br(X, py()));
    let ppxy = || Expr::op2(Expr::br(X, Y));
    let x_ppy = || Expr::br(X, ppy());
    let ppx_y = || Expr::br(ppx(), Y);
    let alpha = Scalar::param();

    let mut out = operator_group(
        Group::Degree1,
        Expr::op,
        &["op_bracket", "op_right", "op_left", "differential", "mono_left", "mono_right"],
    );
    out.extend(operator_group(
        Group::Squared,
        Expr::op2,
        &["op2_bracket", "op2_right", "op2_left", "differential2", "mono2_left", "mono2_right"],
    ));
    let d2 = Group::Degree2;
    let b_variants = |mixed: fn() -> Expr, square: fn() -> Expr| {
        let p = alpha.clone();
        vec![
            Variant {
                name: "case1",
                template: Expr::lin(vec![
                    (s(1), ppxy()),
                    (p.clone(), mixed()),
                    ((p.clone() + s(1)).neg_ref(), square()),
                ]),
                excluded: vec![0, -1],
            },
            Variant {
                name: "case2",
                template: Expr::lin(vec![(s(1), mixed()), (s(-1), ppxy())]),
                excluded: Vec::new(),
            },
        ]
    };
    fn op_x_py_f() -> Expr {
        Expr::op(Expr::br(Expr::X, Expr::op(Expr::Y)))
    }
    fn op_px_y_f() -> Expr {
        Expr::op(Expr::br(Expr::op(Expr::X), Expr::Y))
    }
    fn x_ppy_f() -> Expr {
        Expr::br(Expr::X, Expr::op2(Expr::Y))
    }
    fn ppx_y_f() -> Expr {
        Expr::br(Expr::op2(Expr::X), Expr::Y)
    }
    out.extend([
        family(
            "rota_baxter",
            "Rota-Baxter operator of weight zero",
            d2,
            dl,
            None,
            All,
            single(Expr::lin(vec![(s(1), px_py()), (s(-1), op_px_y()), (s(-1), op_x_py())])),
        ),
        family(
            "nijenhuis",
            "Nijenhuis operator",
            d2,
            dl,
            None,
            All,
            single(Expr::lin(vec![
                (s(1), px_py()),
                (s(-1), op_px_y()),
                (s(-1), op_x_py()),
                (s(1), ppxy()),
            ])),
        ),
        family(
            "avg",
            "averaging operator",
            d2,
            dl,
            None,
            Order,
            single(Expr::lin(vec![(s(1), px_py()), (s(-1), op_x_py())])),
        ),
        family(
            "inverse_avg",
            "inverse averaging operator",
            d2,
            dl,
            None,
            Order,
            single(Expr::lin(vec![(s(1), px_py()), (s(-1), op_px_y())])),
        ),
        family(
            "newA_right",
            "new identity A, right-handed",
            d2,
            dl,
            Some(dt),
            All,
            single(Expr::lin(vec![(s(1), x_ppy()), (s(1), ppxy()), (s(1), op_x_py())])),
        ),
        family(
            "newA_left",
            "new identity A, left-handed",
            d2,
            dl,
            Some(dt),
            All,
            single(Expr::lin(vec![(s(1), ppx_y()), (s(1), ppxy()), (s(1), op_px_y())])),
        ),
        family(
            "newB_right",
            "new identity B, right-handed, parameter a",
            d2,
            dl,
            Some(dt),
            All,
            b_variants(op_x_py_f, x_ppy_f),
        ),
        family(
            "newB_left",
            "new identity B, left-handed, parameter a",
            d2,
            dl,
            Some(dt),
            All,
            b_variants(op_px_y_f, ppx_y_f),
        ),
        family(
            "newC",
            "new identity C",
            d2,
            dl,
            Some(dt),
            All,
            single(Expr::lin(vec![
                (s(1), ppx_y()),
                (s(1), ppxy()),
                (s(1), x_ppy()),
                (s(2), px_py()),
                (s(-2), op_px_y()),
                (s(-2), op_x_py()),
            ])),
        ),
        family(
            "P1",
            "P1 identity",
            d2,
            dl,
            None,
            All,
            single(Expr::lin(vec![(s(1), ppx_y()), (s(-1), op_px_y())])),
        ),
        family("P2", "P2 identity (monomial)", d2, dl, None, All, single(op_px_y())),
        family(
            "P3",
            "P3 identity",
            d2,
            dl,
            None,
            All,
            single(Expr::lin(vec![(s(1), x_ppy()), (s(-1), op_x_py())])),
        ),
        family("P4", "P4 identity (monomial)", d2, dl, None, All, single(op_x_py())),
        family("P5", "P5 identity (monomial)", d2, dl, None, All, single(px_py())),
    ]);
    out
}

/// The 26 catalog entries: 6 of operated degree 1, 6 with the squared
/// operator, 14 mixed of operated degree 2.
pub fn catalog() -> &'static [Family] {
    static CATALOG: OnceLock<Vec<Family>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

/// A catalog entry together with a chosen variant.
#[derive(Clone, Copy, Debug)]
pub struct FamilyRef {
    pub family: &'static Family,
    pub variant: usize,
}

impl FamilyRef {
    /// Parses `id` or `id:variant`.
    pub fn parse(name: &str) -> Result<FamilyRef, OlpiError> {
        let (id, variant) = match name.split_once(':') {
            Some((id, v)) => (id, Some(v)),
            None => (name, None),
        };
        let family = catalog()
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| OlpiError::UnknownFamily(id.to_string()))?;
        let variant = match variant {
            None => 0,
            Some(v) => family.variant(v).ok_or_else(|| OlpiError::UnknownVariant {
                family: id.to_string(),
                variant: v.to_string(),
            })?,
        };
        Ok(FamilyRef { family, variant })
    }

    pub fn name(&self) -> String {
        if self.family.variants.len() == 1 {
            self.family.id.to_string()
        } else {
            format!("{}:{}", self.family.id, self.family.variants[self.variant].name)
        }
    }

    pub fn template(&self) -> &Expr {
        &self.family.variants[self.variant].template
    }

    /// Every catalog entry and variant.
    pub fn all() -> Vec<FamilyRef> {
        catalog()
            .iter()
            .flat_map(|family| (0..family.variants.len()).map(move |variant| FamilyRef { family, variant }))
            .collect()
    }
}

/// How the parameter of the B-type identities is treated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamMode {
    Symbolic,
    Sampled(BigRational),
}

impl fmt::Display for ParamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamMode::Symbolic => f.write_str("symbolic"),
            ParamMode::Sampled(r) => write!(f, "{r}"),
        }
    }
}

/// On-demand instances of one identity under one order.
pub struct RuleSet {
    family: FamilyRef,
    kind: OrderKind,
    alphabet: Alphabet,
    param: ParamMode,
    policy: ArgumentPolicy,
    template: Expr,
    patterns: Vec<Word>,
    cache: DashMap<(Word, Word), Option<Arc<Rule>>>,
}

impl RuleSet {
    pub fn new(
        family: FamilyRef,
        kind: OrderKind,
        alphabet: Alphabet,
        param: ParamMode,
    ) -> Result<RuleSet, OlpiError> {
        let variant = &family.family.variants[family.variant];
        let template = match &param {
            ParamMode::Symbolic => variant.template.clone(),
            ParamMode::Sampled(r) => {
                if variant.template.uses_parameter()
                    && variant.excluded.iter().any(|e| BigRational::from_integer((*e).into()) == *r)
                {
                    return Err(OlpiError::ExcludedParameter(r.to_string()));
                }
                variant.template.specialize(r)?
            }
        };
        let placeholder = |l| AssocPoly::monomial(Word::letter(l), Scalar::one());
        let pattern_poly = template.expand_with(&placeholder(ARG_X), &placeholder(ARG_Y));
        let mut patterns: Vec<Word> = pattern_poly.iter().map(|(w, _)| w.clone()).collect();
        patterns.sort();
        Ok(RuleSet {
            family,
            kind,
            alphabet,
            param,
            policy: family.family.arguments,
            template,
            patterns,
            cache: DashMap::new(),
        })
    }

    pub fn with_policy(mut self, policy: ArgumentPolicy) -> Self {
        self.policy = policy;
        self.cache.clear();
        self
    }

    pub fn family(&self) -> FamilyRef {
        self.family
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn param(&self) -> &ParamMode {
        &self.param
    }

    pub fn policy(&self) -> ArgumentPolicy {
        self.policy
    }

    fn admits(&self, u: &Word, v: &Word) -> bool {
        self.policy.admits(self.kind, u, v)
    }

    /// `φ(u, v)` before normalization to monic form; `u`, `v` must be ALSBW.
    pub fn instantiate_raw(&self, u: &Word, v: &Word) -> Result<LiePoly, OlpiError> {
        for a in [u, v] {
            if !is_alsbw(a, self.kind) {
                return Err(OlpiError::BadArgument(self.alphabet.fmt_word(a)));
            }
        }
        let p = self
            .template
            .expand_with(&expand_basis(u, self.kind), &expand_basis(v, self.kind));
        Ok(LiePoly::from_assoc(&p, self.kind)?)
    }

    /// The monic instance at `(u, v)`, or `None` when it vanishes. Ignores
    /// the argument policy.
    pub fn instance(&self, u: &Word, v: &Word) -> Result<Option<Arc<Rule>>, OlpiError> {
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let poly = self.instantiate_raw(u, v)?;
        let rule = if poly.is_zero() {
            None
        } else {
            let label = format!(
                "{}({}, {})",
                self.family.name(),
                self.alphabet.fmt_word(u),
                self.alphabet.fmt_word(v)
            );
            Some(Arc::new(Rule::new(label, &poly)?))
        };
        self.cache.insert(key, rule.clone());
        Ok(rule)
    }

    /// Instance at NLSBW trees.
    pub fn instantiate_trees(&self, u: &Tree, v: &Tree) -> Result<Option<Arc<Rule>>, OlpiError> {
        for t in [u, v] {
            if !is_nlsbw(t, self.kind) {
                return Err(OlpiError::BadArgument(self.alphabet.fmt_tree(t)));
            }
        }
        self.instance(&u.forget(), &v.forget())
    }

    /// Nonzero instances over all admissible argument pairs from `args`,
    /// with duplicates (equal monic polynomials) removed.
    pub fn bounded_instances(&self, args: &[Word]) -> Result<Vec<Arc<Rule>>, OlpiError> {
        let pairs: Vec<(&Word, &Word)> = args
            .iter()
            .flat_map(|u| args.iter().map(move |v| (u, v)))
            .filter(|(u, v)| self.admits(u, v))
            .collect();
        let built: Vec<Option<Arc<Rule>>> = pairs
            .par_iter()
            .map(|(u, v)| self.instance(u, v))
            .collect::<Result<_, _>>()?;
        let mut seen: HashMap<&LiePoly, ()> = HashMap::new();
        let mut out = Vec::new();
        for r in built.iter().flatten() {
            if seen.insert(&r.poly, ()).is_none() {
                out.push(r.clone());
            }
        }
        Ok(out)
    }
}

impl RuleSource for RuleSet {
    fn match_leading(&self, w: &Word) -> Vec<Arc<Rule>> {
        let mut out: Vec<Arc<Rule>> = Vec::new();
        for pat in &self.patterns {
            // Placeholders have degree 1 in the pattern and at least 1 once bound.
            if pat.deg() > w.deg() {
                continue;
            }
            let mut found = Vec::new();
            match_seq(pat.primes(), w.primes(), &mut [None, None], &mut found);
            for [u, v] in found {
                let (Some(u), Some(v)) = (u, v) else { continue };
                let (u, v) = (Word::new(u), Word::new(v));
                if !self.admits(&u, &v) || !is_alsbw(&u, self.kind) || !is_alsbw(&v, self.kind) {
                    continue;
                }
                if let Ok(Some(rule)) = self.instance(&u, &v) {
                    if rule.leading() == w && !out.iter().any(|r| r.label == rule.label) {
                        out.push(rule);
                    }
                }
            }
        }
        out.sort_by(|a, b| a.label.cmp(&b.label));
        out
    }
}

type Binding = [Option<Vec<Prime>>; 2];

fn placeholder_index(p: &Prime) -> Option<usize> {
    match p {
        Prime::Letter(l) if *l == ARG_X => Some(0),
        Prime::Letter(l) if *l == ARG_Y => Some(1),
        _ => None,
    }
}

/// All bindings of the placeholders (each to a nonempty run of primes at
/// its level) under which `pat` equals `w`.
fn match_seq(pat: &[Prime], w: &[Prime], bind: &mut Binding, out: &mut Vec<Binding>) {
    let Some((head, rest)) = pat.split_first() else {
        if w.is_empty() {
            out.push(bind.clone());
        }
        return;
    };
    if let Some(i) = placeholder_index(head) {
        if let Some(b) = bind[i].clone() {
            if w.starts_with(&b) {
                match_seq(rest, &w[b.len()..], bind, out);
            }
            return;
        }
        // Each remaining pattern prime consumes at least one prime.
        let max = w.len().saturating_sub(rest.len());
        for len in 1..=max {
            bind[i] = Some(w[..len].to_vec());
            match_seq(rest, &w[len..], bind, out);
        }
        bind[i] = None;
        return;
    }
    let Some((first, w_rest)) = w.split_first() else {
        return;
    };
    match (head, first) {
        (Prime::Letter(a), Prime::Letter(b)) if a == b => match_seq(rest, w_rest, bind, out),
        (Prime::Op(pi), Prime::Op(wi)) => {
            let mut inner = Vec::new();
            match_seq(pi.primes(), wi.primes(), bind, &mut inner);
            for mut b in inner {
                match_seq(rest, w_rest, &mut b, out);
            }
        }
        _ => {}
    }
}

/// Compositions evaluated between cache resets in [`check_gs`].
const CHUNK: usize = 256;
/// Basis expansions kept across chunks.
const BASIS_CACHE_DEG: u32 = 8;

/// Argument and resource bounds for [`check_gs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GsBounds {
    pub max_deg: u32,
    pub max_odeg: u32,
    pub max_dep: u32,
    /// Compositions whose ambient word has larger degree are skipped.
    pub max_ambient_deg: Option<u32>,
}

impl GsBounds {
    /// Argument degree 3 and the family's operated degree.
    pub fn default_for(family: &Family) -> GsBounds {
        GsBounds {
            max_deg: 3,
            max_odeg: family.odeg,
            max_dep: family.odeg,
            max_ambient_deg: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Caps {
    pub max_compositions: Option<usize>,
    pub timeout: Option<Duration>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub rule: String,
    pub placement: String,
    pub coefficient: String,
    pub leading_before: String,
    pub leading_after: Option<String>,
}

impl TraceRecord {
    pub fn new(step: &TraceStep, alphabet: &Alphabet) -> TraceRecord {
        TraceRecord {
            step: step.step,
            rule: step.rule.clone(),
            placement: alphabet.fmt_star(&step.placement),
            coefficient: step.coefficient.to_string(),
            leading_before: alphabet.fmt_word(&step.leading_before),
            leading_after: step.leading_after.as_ref().map(|w| alphabet.fmt_word(w)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionRecord {
    pub kind: CompositionKind,
    pub w: String,
    pub f: String,
    pub g: String,
    pub witness: String,
    pub trivial: bool,
    pub trace_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "GS-at-scale")]
    GsAtScale,
    #[serde(rename = "nontrivial-composition")]
    Nontrivial,
    #[serde(rename = "incomplete")]
    Incomplete,
    #[serde(rename = "error")]
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct GsReport {
    pub family: String,
    pub order: OrderKind,
    pub alphabet: String,
    pub parameter: String,
    pub arguments: ArgumentPolicy,
    pub bounds: GsBounds,
    pub argument_count: usize,
    pub instance_count: usize,
    pub composition_count: usize,
    pub nontrivial_count: usize,
    pub skipped_by_ambient_cap: usize,
    pub compositions: Vec<CompositionRecord>,
    pub verdict: Verdict,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl GsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Options for [`check_gs`].
#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub caps: Caps,
    /// Attach traces to trivial compositions too (they are always attached
    /// to nontrivial ones).
    pub all_traces: bool,
    pub timing: bool,
}

/// Enumerates instances at bounded arguments and all their compositions,
/// and reduces each composition.
pub fn check_gs(rules: &RuleSet, bounds: GsBounds, opts: &CheckOptions) -> Result<GsReport, OlpiError> {
    let start = Instant::now();
    let kind = rules.kind;
    let alphabet = &rules.alphabet;
    let args = enumerate_alsbw(
        kind,
        alphabet.len() as u16,
        EnumBounds {
            max_deg: bounds.max_deg,
            max_odeg: bounds.max_odeg,
            max_dep: bounds.max_dep,
        },
    );
    let instances = rules.bounded_instances(&args)?;

    let mut by_leading: HashMap<&Word, Vec<usize>> = HashMap::new();
    let mut by_prefix: HashMap<Word, Vec<usize>> = HashMap::new();
    for (i, r) in instances.iter().enumerate() {
        by_leading.entry(r.leading()).or_default().push(i);
        let l = r.leading();
        for len in 1..l.breadth() {
            by_prefix
                .entry(l.slice(0..len).expect("nonempty"))
                .or_default()
                .push(i);
        }
    }

    let mut specs: Vec<(usize, usize, CompositionSpec)> = Vec::new();
    let mut skipped = 0;
    for (fi, f) in instances.iter().enumerate() {
        let fl = f.leading();
        for k in 1..fl.breadth() {
            let suffix = fl.slice(k..fl.breadth()).expect("nonempty");
            for &gi in by_prefix.get(&suffix).map(Vec::as_slice).unwrap_or(&[]) {
                if let Some(spec) = intersection_spec(fl, instances[gi].leading(), k, kind) {
                    specs.push((fi, gi, spec));
                }
            }
        }
        for (q, sub) in subword_placements(fl) {
            for &gi in by_leading.get(&sub).map(Vec::as_slice).unwrap_or(&[]) {
                specs.push((
                    fi,
                    gi,
                    CompositionSpec {
                        kind: CompositionKind::Including,
                        w: fl.clone(),
                        witness: Witness::Including { q: q.clone() },
                    },
                ));
            }
        }
    }
    if let Some(cap) = bounds.max_ambient_deg {
        let before = specs.len();
        specs.retain(|(_, _, s)| s.w.deg() <= cap);
        skipped = before - specs.len();
    }
    let mut complete = true;
    if let Some(cap) = opts.caps.max_compositions {
        if specs.len() > cap {
            specs.truncate(cap);
            complete = false;
        }
    }

    let deadline = opts.caps.timeout.map(|t| start + t);
    let mut records: Vec<Option<CompositionRecord>> = Vec::with_capacity(specs.len());
    for chunk in specs.chunks(CHUNK) {
        // Caches only memoize pure functions, so resetting them between
        // chunks bounds memory without affecting results.
        let engine = Engine::new(kind, rules);
        records.par_extend(chunk.par_iter().map(|(fi, gi, spec)| {
            if deadline.is_some_and(|d| Instant::now() > d) {
                return None;
            }
            Some(evaluate(&engine, &instances[*fi], &instances[*gi], spec, alphabet, opts.all_traces))
        }));
        rules.cache.retain(|(u, v), _| u.deg() + v.deg() <= bounds.max_deg * 2);
        trim_basis_cache(BASIS_CACHE_DEG);
    }
    if records.iter().any(Option::is_none) {
        complete = false;
    }
    let compositions: Vec<CompositionRecord> = records.into_iter().flatten().collect();
    let nontrivial = compositions.iter().filter(|c| !c.trivial).count();
    let errors = compositions.iter().any(|c| c.error.is_some());
    let verdict = if errors {
        Verdict::Error
    } else if nontrivial > 0 {
        Verdict::Nontrivial
    } else if !complete {
        Verdict::Incomplete
    } else {
        Verdict::GsAtScale
    };
    Ok(GsReport {
        family: rules.family.name(),
        order: kind,
        alphabet: alphabet.spec(),
        parameter: rules.param.to_string(),
        arguments: rules.policy,
        bounds,
        argument_count: args.len(),
        instance_count: instances.len(),
        composition_count: compositions.len(),
        nontrivial_count: nontrivial,
        skipped_by_ambient_cap: skipped,
        compositions,
        verdict,
        complete,
        elapsed_ms: opts.timing.then(|| start.elapsed().as_millis()),
    })
}

fn evaluate(
    engine: &Engine<'_>,
    f: &Arc<Rule>,
    g: &Arc<Rule>,
    spec: &CompositionSpec,
    alphabet: &Alphabet,
    all_traces: bool,
) -> CompositionRecord {
    let witness = match &spec.witness {
        Witness::Intersection { u, v } => {
            format!("u = {}, v = {}", alphabet.fmt_word(u), alphabet.fmt_word(v))
        }
        Witness::Including { q } => format!("q = {}", alphabet.fmt_star(q)),
    };
    let mut rec = CompositionRecord {
        kind: spec.kind,
        w: alphabet.fmt_word(&spec.w),
        f: f.label.clone(),
        g: g.label.clone(),
        witness,
        trivial: false,
        trace_len: 0,
        remainder: None,
        trace: None,
        error: None,
    };
    let outcome = engine
        .build_composition(f, g, spec.clone())
        .and_then(|c| engine.is_trivial(&c));
    match outcome {
        Ok((trivial, red)) => {
            rec.trivial = trivial;
            rec.trace_len = red.trace.len();
            if !trivial || all_traces {
                rec.trace = Some(red.trace.iter().map(|s| TraceRecord::new(s, alphabet)).collect());
            }
            if !trivial {
                rec.remainder = Some(red.remainder.display(alphabet));
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(name: &str, kind: OrderKind) -> RuleSet {
        RuleSet::new(FamilyRef::parse(name).unwrap(), kind, Alphabet::xyz(), ParamMode::Symbolic).unwrap()
    }

    fn w(s: &str) -> Word {
        Alphabet::xyz().parse_word(s).unwrap()
    }

    #[test]
    fn catalog_counts() {
        let c = catalog();
        assert_eq!(c.len(), 26);
        assert_eq!(c.iter().filter(|f| f.group == Group::Degree1).count(), 6);
        assert_eq!(c.iter().filter(|f| f.group != Group::Degree1).count(), 20);
        assert_eq!(FamilyRef::all().len(), 28);
    }

    #[test]
    fn avg_template_renders() {
        let f = FamilyRef::parse("avg").unwrap();
        assert_eq!(f.template().render(), "[P(x) P(y)] - P([x P(y)])");
    }

    #[test]
    fn family_names() {
        assert_eq!(FamilyRef::parse("newB_right:case2").unwrap().name(), "newB_right:case2");
        assert_eq!(FamilyRef::parse("newB_right").unwrap().name(), "newB_right:case1");
        assert!(FamilyRef::parse("nope").is_err());
        assert!(FamilyRef::parse("avg:case2").is_err());
    }

    #[test]
    fn op_right_instances() {
        let r = rs("op_right", OrderKind::Dt);
        let i = r.instance(&w("x"), &w("y")).unwrap().unwrap();
        assert_eq!(i.leading(), &w("P(x y)"));
        let d = r.instance(&w("x"), &w("x")).unwrap().unwrap();
        // -[x P(x)] made monic: [P(x) x].
        assert_eq!(d.leading(), &w("P(x) x"));
        let p5 = rs("P5", OrderKind::Dl);
        let m = p5.instance(&w("x"), &w("y")).unwrap().unwrap();
        assert_eq!(m.poly.len(), 1);
        assert!(p5.instance(&w("x"), &w("x")).unwrap().is_none());
    }

    #[test]
    fn avg_leading_and_matches() {
        let r = rs("avg", OrderKind::Dl);
        let i = r.instance(&w("x"), &w("y")).unwrap().unwrap();
        assert_eq!(i.leading(), &w("P(x) P(y)"));
        let found = r.match_leading(&w("P(x) P(y)"));
        assert_eq!(found.len(), 1);
        assert!(r.match_leading(&w("x")).is_empty());
    }

    #[test]
    fn b_case1_is_rescaled() {
        let r = rs("newB_right", OrderKind::Dl);
        let i = r.instance(&w("x"), &w("y")).unwrap().unwrap();
        assert_eq!(i.leading(), &w("P(P(y)) x"));
        let coeffs: Vec<String> = i.poly.terms().iter().map(|(_, c)| c.to_string()).collect();
        assert!(coeffs.iter().any(|c| c.contains("(a + 1)")), "{coeffs:?}");
    }

    #[test]
    fn sampled_parameter_exclusions() {
        let f = FamilyRef::parse("newB_right").unwrap();
        let minus_one = BigRational::from_integer((-1).into());
        let err = RuleSet::new(f, OrderKind::Dl, Alphabet::xyz(), ParamMode::Sampled(minus_one));
        assert!(matches!(err, Err(OlpiError::ExcludedParameter(_))));
        let f2 = FamilyRef::parse("newB_right:case2").unwrap();
        assert!(RuleSet::new(f2, OrderKind::Dl, Alphabet::xyz(), ParamMode::Sampled(BigRational::from_integer(2.into()))).is_ok());
    }

    #[test]
    fn pattern_matching_binds_runs() {
        let pat = Word::new(vec![
            Prime::Op(Word::new(vec![Prime::Letter(ARG_X), Prime::Letter(ARG_Y)])),
        ]);
        let mut out = Vec::new();
        match_seq(pat.primes(), w("P(x y z)").primes(), &mut [None, None], &mut out);
        assert_eq!(out.len(), 2);
    }
}
