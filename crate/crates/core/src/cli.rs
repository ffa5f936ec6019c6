//! Command-line front end for the `olie-gsb` binary.
//!
//! Exit codes: 0 on success or a GS-at-scale verdict, 1 when a nontrivial
//! composition is found, 2 on usage, input, or I/O errors and on runs that
//! could not finish within their caps.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::lie::{LieError, LiePoly};
use crate::lyndon::{
    enumerate_alsbw, is_alsbw, is_alsw, lyndon_factorization, nlsbw_of, EnumBounds, LyndonError,
};
use crate::olpi::{
    catalog, check_gs, ArgumentPolicy, Caps, CheckOptions, FamilyRef, GsBounds, GsReport,
    OlpiError, ParamMode, RuleSet, TraceRecord, Verdict,
};
use crate::order::{compare, OrderKind};
use crate::rewrite::{Engine, RewriteError};
use crate::scalar::{parse_rational, ScalarError};
use crate::word::{Alphabet, WordError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Lyndon(#[from] LyndonError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Olpi(#[from] OlpiError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "olie-gsb",
    version,
    about = "Groebner-Shirshov checks for operated Lie polynomial identities"
)]
struct Cli {
    /// Worker threads for parallel checking (default: all cores).
    #[arg(long, global = true, env = "OLIE_GSB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog identities with their templates and designated orders.
    ListFamilies {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare two bracketed words; prints GT, LT or EQ.
    Compare {
        #[command(flatten)]
        common: Common,
        u: String,
        v: String,
    },
    /// Lyndon-Shirshov word utilities.
    Lsw {
        #[command(subcommand)]
        action: LswAction,
    },
    /// Rewrite a Lie polynomial in the Lyndon-Shirshov basis.
    Normalize {
        #[command(flatten)]
        common: Common,
        /// Terms like `2 * (x (y z)) + -1 * P((x y))`.
        poly: String,
    },
    /// Print the monic instance of an identity at two basis words.
    Instantiate {
        #[command(flatten)]
        family: FamilyArgs,
        u: String,
        v: String,
    },
    /// Head-reduce a Lie polynomial modulo an identity and print the trace.
    Reduce {
        #[command(flatten)]
        family: FamilyArgs,
        poly: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Enumerate and reduce all compositions at bounded arguments.
    CheckGs(CheckArgs),
    /// Compare basis-slice dimensions against irreducible words and the rank
    /// of the special-word span.
    CdCheck {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        max_deg: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum LswAction {
    /// Report whether a word is ALSW and ALSBW.
    Check {
        #[command(flatten)]
        common: Common,
        word: String,
    },
    /// Standard bracketing of an ALSBW.
    Bracket {
        #[command(flatten)]
        common: Common,
        word: String,
    },
    /// Factor a word into Lyndon-Shirshov factors over its primes.
    Factor {
        #[command(flatten)]
        common: Common,
        word: String,
    },
    /// List ALSBW within bounds, greatest first.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        max_deg: u32,
        #[arg(long, default_value_t = 0)]
        max_odeg: u32,
        #[arg(long)]
        max_dep: Option<u32>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value = "dt")]
    order: OrderKind,
    /// Letters, greatest first, e.g. `x>y>z`.
    #[arg(long, default_value = "x>y>z")]
    alphabet: String,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// Catalog id, optionally `id:variant`.
    #[arg(long)]
    family: String,
    /// Defaults to the identity's designated order.
    #[arg(long)]
    order: Option<OrderKind>,
    #[arg(long, default_value = "x>y>z")]
    alphabet: String,
    /// Rational value for the parameter `a`; symbolic when absent.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Override the argument policy (all, lex, order).
    #[arg(long)]
    arguments: Option<ArgumentPolicy>,
}

#[derive(Args, Debug, Clone)]
struct CheckArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    order: Option<OrderKind>,
    #[arg(long, default_value = "x>y>z")]
    alphabet: String,
    #[arg(long, default_value_t = 3)]
    max_deg: u32,
    /// Defaults to the identity's operated degree.
    #[arg(long)]
    max_odeg: Option<u32>,
    /// Defaults to the operated-degree bound.
    #[arg(long)]
    max_dep: Option<u32>,
    /// Skip compositions whose ambient word exceeds this degree.
    #[arg(long)]
    max_ambient_deg: Option<u32>,
    /// Parameter samples; each runs a separate check. Symbolic when absent.
    #[arg(long = "alpha", allow_hyphen_values = true)]
    alphas: Vec<String>,
    #[arg(long)]
    arguments: Option<ArgumentPolicy>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include reduction traces of trivial compositions too.
    #[arg(long)]
    all_traces: bool,
    /// Record wall-clock time in the report (breaks byte-identity).
    #[arg(long)]
    timing: bool,
    #[arg(long, env = "OLIE_GSB_MAX_COMPOSITIONS")]
    max_compositions: Option<usize>,
    #[arg(long, env = "OLIE_GSB_TIMEOUT_SECS")]
    timeout_secs: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Resolved settings for one `check-gs` invocation.
#[derive(Clone, Debug)]
pub struct Config {
    pub family: FamilyRef,
    pub order: OrderKind,
    pub alphabet: Alphabet,
    pub bounds: GsBounds,
    pub params: Vec<ParamMode>,
    pub arguments: Option<ArgumentPolicy>,
    pub options: CheckOptions,
}

impl Config {
    fn from_args(a: &CheckArgs) -> Result<Config, CliError> {
        let family = FamilyRef::parse(&a.family)?;
        let alphabet = Alphabet::parse(&a.alphabet)?;
        let odeg = a.max_odeg.unwrap_or(family.family.odeg);
        let bounds = GsBounds {
            max_deg: a.max_deg,
            max_odeg: odeg,
            max_dep: a.max_dep.unwrap_or(odeg),
            max_ambient_deg: a.max_ambient_deg,
        };
        if bounds.max_deg == 0 {
            return Err(CliError::Usage("--max-deg must be positive".into()));
        }
        let params = if a.alphas.is_empty() {
            vec![ParamMode::Symbolic]
        } else {
            a.alphas
                .iter()
                .map(|s| Ok(ParamMode::Sampled(parse_rational(s)?)))
                .collect::<Result<_, CliError>>()?
        };
        Ok(Config {
            family,
            order: a.order.unwrap_or(family.family.designated),
            alphabet,
            bounds,
            params,
            arguments: a.arguments,
            options: CheckOptions {
                caps: Caps {
                    max_compositions: a.max_compositions,
                    timeout: a.timeout_secs.map(Duration::from_secs),
                },
                all_traces: a.all_traces,
                timing: a.timing,
            },
        })
    }

    pub fn run(&self) -> Result<Vec<GsReport>, CliError> {
        self.params
            .iter()
            .map(|p| {
                let mut rules = RuleSet::new(self.family, self.order, self.alphabet.clone(), p.clone())?;
                if let Some(policy) = self.arguments {
                    rules = rules.with_policy(policy);
                }
                Ok(check_gs(&rules, self.bounds, &self.options)?)
            })
            .collect()
    }
}

impl FamilyArgs {
    fn rules(&self) -> Result<RuleSet, CliError> {
        let family = FamilyRef::parse(&self.family)?;
        let param = match &self.alpha {
            Some(s) => ParamMode::Sampled(parse_rational(s)?),
            None => ParamMode::Symbolic,
        };
        let order = self.order.unwrap_or(family.family.designated);
        let mut rules = RuleSet::new(family, order, Alphabet::parse(&self.alphabet)?, param)?;
        if let Some(policy) = self.arguments {
            rules = rules.with_policy(policy);
        }
        Ok(rules)
    }
}

/// Parses `argv` (including the program name), runs the command, and
/// returns the exit code.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli.command, out))),
        None => dispatch(&cli.command, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn dispatch(command: &Command, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match command {
        Command::ListFamilies { format } => list_families(*format, out),
        Command::Compare { common, u, v } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let (u, v) = (a.parse_word(u)?, a.parse_word(v)?);
            let label = match compare(common.order, &u, &v) {
                std::cmp::Ordering::Greater => "GT",
                std::cmp::Ordering::Less => "LT",
                std::cmp::Ordering::Equal => "EQ",
            };
            write_out(out, label)?;
            Ok(0)
        }
        Command::Lsw { action } => lsw(action, out),
        Command::Normalize { common, poly } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let p = LiePoly::parse(&a, poly, common.order)?;
            write_out(out, &p.display(&a))?;
            if let Some((w, c)) = p.leading() {
                write_out(out, &format!("leading: {} (coefficient {c})", a.fmt_word(w)))?;
            }
            Ok(0)
        }
        Command::Instantiate { family, u, v } => {
            let rules = family.rules()?;
            let a = rules.alphabet().clone();
            let (u, v) = (a.parse_word(u)?, a.parse_word(v)?);
            match rules.instance(&u, &v)? {
                Some(rule) => {
                    write_out(out, &rule.poly.display(&a))?;
                    write_out(out, &format!("leading: {}", a.fmt_word(rule.leading())))?;
                }
                None => write_out(out, "0")?,
            }
            Ok(0)
        }
        Command::Reduce {
            family,
            poly,
            max_steps,
        } => {
            let rules = family.rules()?;
            let a = rules.alphabet().clone();
            let p = LiePoly::parse(&a, poly, rules.kind())?;
            let engine = Engine::new(rules.kind(), &rules).with_max_steps(*max_steps);
            let red = engine.reduce(&p)?;
            for step in &red.trace {
                let r = TraceRecord::new(step, &a);
                write_out(
                    out,
                    &format!(
                        "{}: {} at {} by {} ({}) -> {}",
                        r.step,
                        r.leading_before,
                        r.placement,
                        r.rule,
                        r.coefficient,
                        r.leading_after.as_deref().unwrap_or("0")
                    ),
                )?;
            }
            write_out(out, &format!("remainder: {}", red.remainder.display(&a)))?;
            Ok(0)
        }
        Command::CheckGs(args) => check(args, out),
        Command::CdCheck {
            family,
            max_deg,
            format,
        } => cd_check(family, *max_deg, *format, out),
    }
}

#[derive(Serialize)]
struct FamilyRow {
    name: String,
    description: &'static str,
    group: crate::olpi::Group,
    designated_order: OrderKind,
    negative_order: Option<OrderKind>,
    arguments: ArgumentPolicy,
    template: String,
}

fn list_families(format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let rows: Vec<FamilyRow> = FamilyRef::all()
        .into_iter()
        .map(|f| FamilyRow {
            name: f.name(),
            description: f.family.description,
            group: f.family.group,
            designated_order: f.family.designated,
            negative_order: f.family.negative,
            arguments: f.family.arguments,
            template: f.template().render(),
        })
        .collect();
    match format {
        Format::Json => write_out(out, &serde_json::to_string_pretty(&rows).expect("serializes"))?,
        Format::Text => {
            for r in &rows {
                write_out(
                    out,
                    &format!("{:<18} {:<3} {}", r.name, r.designated_order.to_string(), r.template),
                )?;
            }
            write_out(out, &format!("{} identities", catalog().len()))?;
        }
    }
    Ok(0)
}

fn lsw(action: &LswAction, out: &mut dyn Write) -> Result<i32, CliError> {
    match action {
        LswAction::Check { common, word } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let w = a.parse_word(word)?;
            let m = w.metrics();
            write_out(
                out,
                &format!(
                    "alsw: {}\nalsbw: {}\ndeg: {} breadth: {} odeg: {} dep: {}",
                    is_alsw(&w, common.order),
                    is_alsbw(&w, common.order),
                    m.deg,
                    m.breadth,
                    m.odeg,
                    m.dep
                ),
            )?;
            Ok(0)
        }
        LswAction::Bracket { common, word } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let w = a.parse_word(word)?;
            write_out(out, &a.fmt_tree(&nlsbw_of(&w, common.order)?))?;
            Ok(0)
        }
        LswAction::Factor { common, word } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let w = a.parse_word(word)?;
            let parts: Vec<String> = lyndon_factorization(w.primes(), common.order)
                .into_iter()
                .map(|r| a.fmt_word(&w.slice(r).expect("nonempty factor")))
                .collect();
            write_out(out, &parts.join(" | "))?;
            Ok(0)
        }
        LswAction::Enumerate {
            common,
            max_deg,
            max_odeg,
            max_dep,
        } => {
            let a = Alphabet::parse(&common.alphabet)?;
            let bounds = EnumBounds {
                max_deg: *max_deg,
                max_odeg: *max_odeg,
                max_dep: max_dep.unwrap_or(*max_odeg),
            };
            for w in enumerate_alsbw(common.order, a.len() as u16, bounds) {
                write_out(out, &a.fmt_word(&w))?;
            }
            Ok(0)
        }
    }
}

fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = Config::from_args(args)?;
    let reports = config.run()?;
    let text = match args.format {
        Format::Json if reports.len() == 1 => reports[0].to_json(),
        Format::Json => serde_json::to_string_pretty(&reports).expect("serializes"),
        Format::Text => reports.iter().map(text_summary).collect::<Vec<_>>().join("\n"),
    };
    match &args.report {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => write_out(out, &text)?,
    }
    Ok(verdict_code(reports.iter().map(|r| r.verdict)))
}

/// The worst verdict decides: errors and incomplete runs (2) dominate
/// nontrivial compositions (1), which dominate success (0).
fn verdict_code(verdicts: impl Iterator<Item = Verdict>) -> i32 {
    verdicts
        .map(|v| match v {
            Verdict::GsAtScale => 0,
            Verdict::Nontrivial => 1,
            Verdict::Incomplete | Verdict::Error => 2,
        })
        .max()
        .unwrap_or(0)
}

fn text_summary(r: &GsReport) -> String {
    let mut s = format!(
        "{} under {} (parameter {}, arguments {}): {} compositions, {} nontrivial, verdict {}",
        r.family,
        r.order,
        r.parameter,
        r.arguments,
        r.composition_count,
        r.nontrivial_count,
        serde_json::to_string(&r.verdict).expect("serializes").trim_matches('"')
    );
    if let Some(c) = r.compositions.iter().find(|c| !c.trivial) {
        s.push_str(&format!(
            "\n  witness: {} composition of {} and {} at {} ({})",
            serde_json::to_string(&c.kind).expect("serializes").trim_matches('"'),
            c.f,
            c.g,
            c.w,
            c.witness
        ));
        if let Some(rem) = &c.remainder {
            s.push_str(&format!("\n  remainder: {rem}"));
        }
        if let Some(e) = &c.error {
            s.push_str(&format!("\n  error: {e}"));
        }
    }
    s
}

#[derive(Serialize)]
struct CdRow {
    family: String,
    order: OrderKind,
    max_deg: u32,
    slice_dim: usize,
    irreducible: usize,
    reducible: usize,
    special_words: usize,
    rank: usize,
    balanced: bool,
    irreducible_pivots: Vec<String>,
}

fn cd_check(family: &FamilyArgs, max_deg: u32, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let rules = family.rules()?;
    let a = rules.alphabet().clone();
    let engine = Engine::new(rules.kind(), &rules);
    let r = engine.cd_dimension_check(a.len() as u16, max_deg)?;
    let row = CdRow {
        family: rules.family().name(),
        order: rules.kind(),
        max_deg,
        slice_dim: r.slice_dim,
        irreducible: r.irreducible,
        reducible: r.reducible,
        special_words: r.special_words,
        rank: r.rank,
        balanced: r.balanced,
        irreducible_pivots: r.irreducible_pivots.iter().map(|w| a.fmt_word(w)).collect(),
    };
    match format {
        Format::Json => write_out(out, &serde_json::to_string_pretty(&row).expect("serializes"))?,
        Format::Text => write_out(
            out,
            &format!(
                "{} under {} at deg <= {}: slice {} = irreducible {} + rank {}: {}",
                row.family,
                row.order,
                max_deg,
                row.slice_dim,
                row.irreducible,
                row.rank,
                if row.balanced { "balanced" } else { "unbalanced" }
            ),
        )?,
    }
    Ok(if r.balanced { 0 } else { 1 })
}
