//! Single entry point exposing parsing, classification, evaluation,
//! generation, translation, and bounded search, with machine-readable
//! output.
//!
//! Exit codes: 0 for true/SAT/success, 1 for false, 2 for
//! unknown/bound-exhausted, 64 for usage errors, 65 for malformed input,
//! 70 for internal limits.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlogic::arith::{
    eval_bounded_arith, gen_kset, gen_phi_op, gen_phi_op_cl, gen_phi_set, gen_prefix_tree, gen_tf,
    gen_tsc, parse_arith_formula, print_arith_formula, translate_e3a, translate_hyperctl_to_soa,
    ArithBounds, E3aVariant, SoaVariant, StructureGenConfig, Truth,
};
use hyperlogic::error::Error;
use hyperlogic::fo::{
    encode_word, fo_to_hyperltl, gen_hierarchy_hard, gen_phi_b, gen_phi_omega,
    gen_split_combinator, parse_fo_formula, simplify, StretchFunction,
};
use hyperlogic::formula::{classify_prenex, temporal_depth, Formula};
use hyperlogic::kripke::{build_game, enumerate_lassos, eval_hyperctlstar, solve_game, Player};
use hyperlogic::search::{sat_search, SearchBounds, SearchOptions, SearchStatus};
use hyperlogic::syntax::files::{
    read_tile_set, read_trace_set, read_transition_system, read_word, write_trace_set,
    write_transition_system,
};
use hyperlogic::syntax::{parse_formula, parse_formula_any, print_formula, Dialect};
use hyperlogic::tiling::{gen_diagonal_formula, gen_quadrant_formula};
use hyperlogic::trace::{Alphabet, EvalOptions, Labels};
use sha2::{Digest, Sha256};
use std::time::{Duration, Instant};

const EXIT_TRUE: i32 = 0;
const EXIT_FALSE: i32 = 1;
const EXIT_UNKNOWN: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;
const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "hyperlogic", version, about = "Hyperproperty logic toolkit")]
struct Cli {
    /// Result rendering on standard output.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    Hyperltl,
    Hyperctlstar,
    Any,
}

#[derive(Args, Debug)]
struct FormulaInput {
    /// Formula text; use `@path` to read it from a file.
    formula: String,
}

impl FormulaInput {
    fn text(&self) -> Result<String, Error> {
        if let Some(path) = self.formula.strip_prefix('@') {
            std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
        } else {
            Ok(self.formula.clone())
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its canonical rendering.
    Parse {
        #[arg(long, value_enum, default_value = "any")]
        dialect: DialectArg,
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Minimal alternation class of a prenex sentence.
    Classify {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Temporal depth of a formula.
    Depth {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Evaluate a prenex sentence over a trace-set file.
    EvalLtl {
        #[arg(long)]
        model: String,
        #[command(flatten)]
        input: FormulaInput,
        /// Accept the empty trace set instead of rejecting it.
        #[arg(long)]
        allow_empty: bool,
        /// Cap on the folded joint-lasso length.
        #[arg(long, env = "HYPERLOGIC_FOLD_LIMIT", default_value_t = 65_536)]
        fold_limit: usize,
    },
    /// Evaluate a path-quantified sentence over a transition-system file,
    /// relative to the universe of lassos within the given bounds.
    EvalCtl {
        #[arg(long)]
        system: String,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 2)]
        max_stem: usize,
        #[arg(long, default_value_t = 2)]
        max_loop: usize,
        #[arg(long, env = "HYPERLOGIC_UNIVERSE_CAP", default_value_t = 1_000_000)]
        universe_cap: usize,
    },
    /// Build and solve the model-checking game.
    Game {
        #[arg(long)]
        system: String,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 2)]
        max_stem: usize,
        #[arg(long, default_value_t = 2)]
        max_loop: usize,
        #[arg(long, env = "HYPERLOGIC_UNIVERSE_CAP", default_value_t = 1_000_000)]
        universe_cap: usize,
        /// Also dump the game graph (one JSON line per vertex) to stdout.
        #[arg(long)]
        dump: bool,
    },
    /// Generate a tiling encoding from a tile-set file.
    GenTiling {
        #[arg(long, value_enum)]
        variant: TilingVariant,
        #[arg(long)]
        tiles: String,
    },
    /// Word-logic generators and translations.
    #[command(subcommand)]
    GenFo(GenFo),
    /// Encode a finite word as a trace set.
    EncodeWord {
        /// Word as space-separated letters, each `{a,b}` or `{}`;
        /// use `@path` for a word file.
        word: String,
        /// `affine:K` for `n -> K(n+1)`, or `table:1,3,5`.
        #[arg(long, default_value = "affine:1")]
        stretch: String,
        /// Base alphabet (comma-separated) when the word is inline.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Rewrite the body of a prenex sentence into the marker-class form.
    Simplify {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Arithmetic-family formula generators.
    #[command(subcommand)]
    GenArith(GenArith),
    /// Structure generators (transition-system files on stdout).
    #[command(subcommand)]
    GenStructure(GenStructure),
    /// Translations between arithmetic and temporal sentences.
    #[command(subcommand)]
    Translate(Translate),
    /// Bounded satisfiability search over trace-set models.
    SatSearch {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 2)]
        max_traces: usize,
        #[arg(long, default_value_t = 2)]
        max_stem: usize,
        #[arg(long, default_value_t = 2)]
        max_loop: usize,
        /// Comma-separated proposition universe.
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        timeout_secs: Option<u64>,
        #[arg(long, env = "HYPERLOGIC_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, env = "HYPERLOGIC_CANDIDATE_CAP", default_value_t = 50_000_000)]
        candidate_cap: u64,
    },
    /// Bounded three-valued evaluation of an arithmetic sentence.
    EvalArith {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 4)]
        domain: u64,
        #[arg(long, default_value_t = 4)]
        set_universe: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TilingVariant {
    Quadrant,
    Diagonal,
}

#[derive(Subcommand, Debug)]
enum GenFo {
    /// Translate a prenex word-logic sentence into trace quantification.
    Translate {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// The boundedness sentence over the given propositions.
    PhiB {
        #[arg(long)]
        ap: String,
    },
    /// The successor-ladder sentence.
    PhiOmega,
    /// Combine sentences about the two halves of a split trace set.
    Split {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// The alternation-hardness assembly.
    Hierarchy {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        witness: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum GenArith {
    PhiOp,
    PhiOpCl,
    PhiSet,
}

#[derive(Subcommand, Debug)]
enum GenStructure {
    Kset {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        subset_bound: usize,
        #[arg(long, default_value_t = 3)]
        chain_len: usize,
    },
    Tf,
    PrefixTree {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, env = "HYPERLOGIC_VERTEX_CAP", default_value_t = 1_000_000)]
        vertex_cap: usize,
    },
    Tsc {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, env = "HYPERLOGIC_VERTEX_CAP", default_value_t = 1_000_000)]
        vertex_cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Translate {
    /// Arithmetic sentence into a path-quantified temporal sentence.
    E3a {
        #[arg(long, value_enum, default_value = "third-order")]
        variant: E3aVariantArg,
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Temporal sentence into second-order arithmetic (countable models).
    SoaCount {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// As `soa-count` plus the finite-branching requirement.
    SoaFb {
        #[command(flatten)]
        input: FormulaInput,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum E3aVariantArg {
    ThirdOrder,
    SecondOrderFb,
}

struct Report {
    subcommand: String,
    digest: Sha256,
    outcome: String,
    started: Instant,
}

impl Report {
    fn new(subcommand: &str) -> Self {
        Report {
            subcommand: subcommand.to_string(),
            digest: Sha256::new(),
            outcome: "error".to_string(),
            started: Instant::now(),
        }
    }

    fn feed(&mut self, input: &str) {
        self.digest.update(input.as_bytes());
    }

    fn emit(self) {
        let digest = format!("{:x}", self.digest.finalize());
        let line = serde_json::json!({
            "digest": &digest[..16],
            "elapsed_ms": self.started.elapsed().as_millis() as u64,
            "outcome": self.outcome,
            "subcommand": self.subcommand,
            "version": env!("CARGO_PKG_VERSION"),
        });
        eprintln!("{line}");
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. }
        | Error::Dialect(_)
        | Error::NotPrenex(_)
        | Error::QuantifierUnderTemporal(_)
        | Error::UnboundVariable(_)
        | Error::EmptyModel
        | Error::EmptyWordQuantification
        | Error::UniverseMismatch
        | Error::AlphabetMismatch(_)
        | Error::SortError(_)
        | Error::UnsupportedShape(_)
        | Error::MissingWitness
        | Error::InvalidInput(_) => EXIT_DATA,
        Error::ResourceLimit(_) => EXIT_INTERNAL,
    }
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
}

fn parse_inline_word(alpha: &Alphabet, text: &str) -> Result<Vec<Labels>, Error> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let inner = token
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| {
                Error::InvalidInput(format!("letter {token:?} must look like {{a,b}}"))
            })?;
        let names: Vec<&str> = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        out.push(alpha.labels(&names)?);
    }
    Ok(out)
}

fn parse_stretch(text: &str) -> Result<StretchFunction, Error> {
    if let Some(k) = text.strip_prefix("affine:") {
        let k: usize = k.parse().map_err(|_| {
            Error::InvalidInput("affine stretch needs a positive factor".to_string())
        })?;
        StretchFunction::affine(k)
    } else if let Some(vals) = text.strip_prefix("table:") {
        let vals: Result<Vec<usize>, _> = vals.split(',').map(str::parse).collect();
        StretchFunction::table(
            vals.map_err(|_| Error::InvalidInput("stretch table needs numbers".to_string()))?,
        )
    } else {
        Err(Error::InvalidInput(
            "stretch must be affine:K or table:v1,v2,...".to_string(),
        ))
    }
}

enum Outcome {
    /// A boolean verdict (exit 0 for true, 1 for false).
    Verdict(bool, serde_json::Value),
    /// Plain success with a payload.
    Output(serde_json::Value),
    /// Three-valued / bound-exhausted style result (exit 2 on unknown).
    Open(Option<bool>, serde_json::Value),
}

fn formula_payload(f: &Formula) -> serde_json::Value {
    serde_json::json!({ "formula": print_formula(f) })
}

fn run(cli: &Cli, report: &mut Report) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Parse { dialect, input } => {
            let text = input.text()?;
            report.feed(&text);
            let f = match dialect {
                DialectArg::Hyperltl => parse_formula(&text, Dialect::HyperLtl)?,
                DialectArg::Hyperctlstar => parse_formula(&text, Dialect::HyperCtlStar)?,
                DialectArg::Any => parse_formula_any(&text)?,
            };
            Ok(Outcome::Output(formula_payload(&f)))
        }
        Command::Classify { input } => {
            let text = input.text()?;
            report.feed(&text);
            let f = parse_formula_any(&text)?;
            let class = classify_prenex(&f)?;
            Ok(Outcome::Output(serde_json::json!({
                "class": class.to_string(),
                "kind": class.kind.to_string(),
                "level": class.level,
            })))
        }
        Command::Depth { input } => {
            let text = input.text()?;
            report.feed(&text);
            let f = parse_formula_any(&text)?;
            Ok(Outcome::Output(
                serde_json::json!({ "depth": temporal_depth(&f) }),
            ))
        }
        Command::EvalLtl {
            model,
            input,
            allow_empty,
            fold_limit,
        } => {
            let text = input.text()?;
            let model_text = read_file(model)?;
            report.feed(&text);
            report.feed(&model_text);
            let f = parse_formula(&text, Dialect::HyperLtl)?;
            let t = read_trace_set(&model_text)?;
            let opts = EvalOptions {
                allow_empty: *allow_empty,
                fold_limit: *fold_limit,
            };
            let v = hyperlogic::trace::eval_hyperltl_opts(&t, &f, &opts)?;
            Ok(Outcome::Verdict(v, serde_json::json!({ "value": v })))
        }
        Command::EvalCtl {
            system,
            input,
            max_stem,
            max_loop,
            universe_cap,
        } => {
            let text = input.text()?;
            let sys_text = read_file(system)?;
            report.feed(&text);
            report.feed(&sys_text);
            let f = parse_formula(&text, Dialect::HyperCtlStar)?;
            let ts = read_transition_system(&sys_text)?;
            let u = enumerate_lassos(&ts, *max_stem, *max_loop, *universe_cap)?;
            eprintln!(
                "universe: {} lasso paths within stem <= {max_stem}, loop <= {max_loop}",
                u.len()
            );
            let v = eval_hyperctlstar(&ts, &u, &f)?;
            Ok(Outcome::Verdict(
                v,
                serde_json::json!({
                    "max_loop": max_loop,
                    "max_stem": max_stem,
                    "universe_paths": u.len(),
                    "value": v,
                }),
            ))
        }
        Command::Game {
            system,
            input,
            max_stem,
            max_loop,
            universe_cap,
            dump,
        } => {
            let text = input.text()?;
            let sys_text = read_file(system)?;
            report.feed(&text);
            report.feed(&sys_text);
            let f = parse_formula(&text, Dialect::HyperCtlStar)?;
            let ts = read_transition_system(&sys_text)?;
            let u = enumerate_lassos(&ts, *max_stem, *max_loop, *universe_cap)?;
            eprintln!(
                "universe: {} lasso paths within stem <= {max_stem}, loop <= {max_loop}",
                u.len()
            );
            let g = build_game(&ts, &u, &f)?;
            let solution = solve_game(&g);
            if *dump {
                print!("{}", g.dump());
            }
            let verifier_wins = solution.winner == Player::Verifier;
            Ok(Outcome::Verdict(
                verifier_wins,
                serde_json::json!({
                    "strategy_size": solution.strategy.len(),
                    "vertices": g.vertices().len(),
                    "winner": if verifier_wins { "verifier" } else { "falsifier" },
                }),
            ))
        }
        Command::GenTiling { variant, tiles } => {
            let tile_text = read_file(tiles)?;
            report.feed(&tile_text);
            let ts = read_tile_set(&tile_text)?;
            let f = match variant {
                TilingVariant::Quadrant => gen_quadrant_formula(&ts),
                TilingVariant::Diagonal => gen_diagonal_formula(&ts),
            };
            Ok(Outcome::Output(formula_payload(&f)))
        }
        Command::GenFo(sub) => match sub {
            GenFo::Translate { input } => {
                let text = input.text()?;
                report.feed(&text);
                let f = parse_fo_formula(&text)?;
                Ok(Outcome::Output(formula_payload(&fo_to_hyperltl(&f)?)))
            }
            GenFo::PhiB { ap } => {
                report.feed(ap);
                let props: Vec<String> = ap
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
                Ok(Outcome::Output(formula_payload(&gen_phi_b(&props))))
            }
            GenFo::PhiOmega => Ok(Outcome::Output(formula_payload(&gen_phi_omega()))),
            GenFo::Split { left, right } => {
                report.feed(left);
                report.feed(right);
                let l = parse_formula_any(left)?;
                let r = parse_formula_any(right)?;
                Ok(Outcome::Output(formula_payload(&gen_split_combinator(
                    &l, &r,
                )?)))
            }
            GenFo::Hierarchy {
                input,
                level,
                witness,
            } => {
                let text = input.text()?;
                report.feed(&text);
                let f = parse_formula_any(&text)?;
                let w = witness.as_ref().map(|t| parse_formula_any(t)).transpose()?;
                Ok(Outcome::Output(formula_payload(&gen_hierarchy_hard(
                    &f,
                    *level,
                    w.as_ref(),
                )?)))
            }
        },
        Command::EncodeWord {
            word,
            stretch,
            alphabet,
        } => {
            report.feed(word);
            report.feed(stretch);
            let (alpha, letters) = if let Some(path) = word.strip_prefix('@') {
                let text = read_file(path)?;
                report.feed(&text);
                read_word(&text)?
            } else {
                let alpha = Alphabet::new(
                    alphabet
                        .as_deref()
                        .ok_or_else(|| {
                            Error::InvalidInput("inline words need --alphabet".to_string())
                        })?
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect::<Vec<_>>(),
                )?;
                let letters = parse_inline_word(&alpha, word)?;
                (alpha, letters)
            };
            let f = parse_stretch(stretch)?;
            let t = encode_word(&alpha, &letters, &f)?;
            print!("{}", write_trace_set(&t));
            Ok(Outcome::Output(serde_json::json!({ "traces": t.len() })))
        }
        Command::Simplify { input } => {
            let text = input.text()?;
            report.feed(&text);
            let f = parse_formula_any(&text)?;
            Ok(Outcome::Output(formula_payload(&simplify(&f)?)))
        }
        Command::GenArith(sub) => {
            let f = match sub {
                GenArith::PhiOp => gen_phi_op(),
                GenArith::PhiOpCl => gen_phi_op_cl(),
                GenArith::PhiSet => gen_phi_set(),
            };
            Ok(Outcome::Output(formula_payload(&f)))
        }
        Command::GenStructure(sub) => {
            let ts = match sub {
                GenStructure::Kset {
                    depth,
                    subset_bound,
                    chain_len,
                } => gen_kset(&StructureGenConfig {
                    tree_depth: *depth,
                    subset_bound: *subset_bound,
                    chain_len: *chain_len,
                    ..Default::default()
                })?,
                GenStructure::Tf => gen_tf(),
                GenStructure::PrefixTree { depth, vertex_cap } => {
                    gen_prefix_tree(*depth, *vertex_cap)?
                }
                GenStructure::Tsc { depth, vertex_cap } => gen_tsc(*depth, *vertex_cap)?,
            };
            print!("{}", write_transition_system(&ts));
            Ok(Outcome::Output(
                serde_json::json!({ "vertices": ts.vertex_count() }),
            ))
        }
        Command::Translate(sub) => match sub {
            Translate::E3a { variant, input } => {
                let text = input.text()?;
                report.feed(&text);
                let f = parse_arith_formula(&text)?;
                let v = match variant {
                    E3aVariantArg::ThirdOrder => E3aVariant::ThirdOrder,
                    E3aVariantArg::SecondOrderFb => E3aVariant::SecondOrderFb,
                };
                Ok(Outcome::Output(formula_payload(&translate_e3a(&f, v)?)))
            }
            Translate::SoaCount { input } | Translate::SoaFb { input } => {
                let text = input.text()?;
                report.feed(&text);
                let f = parse_formula(&text, Dialect::HyperCtlStar)?;
                let variant = if matches!(sub, Translate::SoaCount { .. }) {
                    SoaVariant::Countable
                } else {
                    SoaVariant::FinitelyBranching
                };
                let out = translate_hyperctl_to_soa(&f, variant)?;
                Ok(Outcome::Output(serde_json::json!({
                    "formula": print_arith_formula(&out)
                })))
            }
        },
        Command::SatSearch {
            input,
            max_traces,
            max_stem,
            max_loop,
            alphabet,
            timeout_secs,
            jobs,
            candidate_cap,
        } => {
            let text = input.text()?;
            report.feed(&text);
            report.feed(alphabet);
            let f = parse_formula_any(&text)?;
            let alpha = Alphabet::new(
                alphabet
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect::<Vec<_>>(),
            )?;
            let bounds = SearchBounds::new(*max_traces, *max_stem, *max_loop, alpha)?;
            let opts = SearchOptions {
                candidate_cap: *candidate_cap,
                timeout: timeout_secs.map(Duration::from_secs),
                jobs: *jobs,
            };
            let out = sat_search(&f, &bounds, &opts)?;
            match out.status {
                SearchStatus::Sat(model) => {
                    print!("{}", write_trace_set(&model));
                    Ok(Outcome::Open(
                        Some(true),
                        serde_json::json!({
                            "elapsed_ms": out.elapsed.as_millis() as u64,
                            "status": "sat",
                            "traces": model.len(),
                        }),
                    ))
                }
                SearchStatus::BoundExhausted => Ok(Outcome::Open(
                    None,
                    serde_json::json!({
                        "elapsed_ms": out.elapsed.as_millis() as u64,
                        "status": "bound-exhausted",
                    }),
                )),
            }
        }
        Command::EvalArith {
            input,
            domain,
            set_universe,
        } => {
            let text = input.text()?;
            report.feed(&text);
            let f = parse_arith_formula(&text)?;
            let bounds = ArithBounds::new(*domain, *set_universe)?;
            match eval_bounded_arith(&f, &bounds)? {
                Truth::True => Ok(Outcome::Verdict(true, serde_json::json!({"value": "true"}))),
                Truth::False => Ok(Outcome::Verdict(
                    false,
                    serde_json::json!({"value": "false"}),
                )),
                Truth::Unknown => Ok(Outcome::Open(None, serde_json::json!({"value": "unknown"}))),
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_TRUE
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let name = match &cli.command {
        Command::Parse { .. } => "parse",
        Command::Classify { .. } => "classify",
        Command::Depth { .. } => "depth",
        Command::EvalLtl { .. } => "eval-ltl",
        Command::EvalCtl { .. } => "eval-ctl",
        Command::Game { .. } => "game",
        Command::GenTiling { .. } => "gen-tiling",
        Command::GenFo(_) => "gen-fo",
        Command::EncodeWord { .. } => "encode-word",
        Command::Simplify { .. } => "simplify",
        Command::GenArith(_) => "gen-arith",
        Command::GenStructure(_) => "gen-structure",
        Command::Translate(_) => "translate",
        Command::SatSearch { .. } => "sat-search",
        Command::EvalArith { .. } => "eval-arith",
    };
    let mut report = Report::new(name);
    match run(&cli, &mut report) {
        Ok(outcome) => {
            let (code, payload) = match &outcome {
                Outcome::Verdict(v, payload) => {
                    report.outcome = if *v {
                        "true".to_string()
                    } else {
                        "false".to_string()
                    };
                    (if *v { EXIT_TRUE } else { EXIT_FALSE }, payload.clone())
                }
                Outcome::Output(payload) => {
                    report.outcome = "ok".to_string();
                    (EXIT_TRUE, payload.clone())
                }
                Outcome::Open(v, payload) => {
                    let (code, outcome) = match v {
                        Some(true) => (EXIT_TRUE, "sat"),
                        Some(false) => (EXIT_FALSE, "false"),
                        None => (EXIT_UNKNOWN, "unknown"),
                    };
                    report.outcome = outcome.to_string();
                    (code, payload.clone())
                }
            };
            match cli.format {
                OutputFormat::Structured => println!("{payload}"),
                OutputFormat::Human => {
                    if let Some(f) = payload.get("formula").and_then(|v| v.as_str()) {
                        println!("{f}");
                    } else if let Some(v) = payload.get("value") {
                        match v {
                            serde_json::Value::Bool(b) => println!("{b}"),
                            other => println!("{}", other.as_str().unwrap_or(&other.to_string())),
                        }
                    } else if let Some(c) = payload.get("class").and_then(|v| v.as_str()) {
                        println!("{c}");
                    } else if let Some(d) = payload.get("depth") {
                        println!("{d}");
                    } else if let Some(w) = payload.get("winner").and_then(|v| v.as_str()) {
                        println!("{w}");
                    } else if let Some(s) = payload.get("status").and_then(|v| v.as_str()) {
                        println!("{s}");
                    }
                }
            }
            report.emit();
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            report.outcome = "error".to_string();
            report.emit();
            std::process::exit(exit_code_for(&e));
        }
    }
}
