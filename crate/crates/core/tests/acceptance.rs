//! End-to-end acceptance suite. Each test prints one pass/fail line and
//! enforces its wall-clock budget.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use hyperlogic::arith::{
    cl_top_member, op_alphabet, parse_arith_formula, phi_op_parts, smoke_universe, t_op_member,
    t_op_truncation, translate_e3a, E3aVariant,
};
use hyperlogic::fo::{
    encode_word, eval_fo, fo_to_hyperltl, parse_fo_formula, simplify, FoFormula, StretchFunction,
};
use hyperlogic::formula::{prenex, temporal_depth, Formula};
use hyperlogic::kripke::{
    build_game, enumerate_lassos, eval_hyperctlstar, solve_game, Player, TransitionSystem,
};
use hyperlogic::oracle::unrolled_eval;
use hyperlogic::search::{sat_search, SearchBounds, SearchOptions, SearchStatus};
use hyperlogic::syntax::{parse_formula_any, print_formula};
use hyperlogic::tiling::{
    brute_tiling, check_partial_diagonal, decode_diagonal_model, gen_diagonal_formula,
    quadrant_parts, truncated_quadrant_model, Region, TileSet,
};
use hyperlogic::trace::{
    eval_hyperltl, eval_hyperltl_opts, random_subsets, subset_check, Alphabet, EvalOptions, Labels,
    TraceAssignment, TraceSet, UpTrace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

struct Criterion {
    name: &'static str,
    budget: Duration,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str, budget_secs: u64) -> Self {
        Criterion {
            name,
            budget: Duration::from_secs(budget_secs),
            started: Instant::now(),
        }
    }

    fn pass(self, detail: &str) {
        let elapsed = self.started.elapsed();
        println!(
            "acceptance {:<28} PASS ({detail}, {:?} of {:?} budget)",
            self.name, elapsed, self.budget
        );
        assert!(
            elapsed <= self.budget,
            "{} exceeded its {:?} budget: {:?}",
            self.name,
            self.budget,
            elapsed
        );
    }
}

fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

/// The fixed pool of twelve prenex word-logic sentences.
fn fo_pool() -> Vec<FoFormula> {
    [
        "exists x. a(x)",
        "forall x. a(x)",
        "exists x. a(x) & b(x)",
        "forall x. a(x) | b(x)",
        "exists x. exists y. a(x) & b(y) & x <= y",
        "forall x. forall y. (a(x) & a(y)) -> (x <= y | y <= x)",
        "exists x. forall y. x <= y",
        "forall x. exists y. x <= y & b(y)",
        "exists x. forall y. y <= x & a(x)",
        "forall x. exists y. !(y <= x) | a(y)",
        "exists x. !(a(x) | b(x))",
        "forall x. forall y. x <= y -> (a(x) -> a(y))",
    ]
    .into_iter()
    .map(|s| parse_fo_formula(s).unwrap())
    .collect()
}

/// All words of length <= 3 over subsets of {a, b} (including the empty
/// word).
fn word_corpus() -> Vec<Vec<Labels>> {
    let letters: Vec<Labels> = (0..4).map(Labels).collect();
    let mut out = vec![Vec::new()];
    for len in 1..=3usize {
        let mut idx = vec![0usize; len];
        loop {
            out.push(idx.iter().map(|&i| letters[i]).collect());
            let mut k = 0;
            while k < len {
                idx[k] += 1;
                if idx[k] < letters.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    out
}

fn corpus_stretches() -> Vec<StretchFunction> {
    vec![
        StretchFunction::affine(1).unwrap(),
        StretchFunction::affine(2).unwrap(),
        StretchFunction::affine(3).unwrap(),
    ]
}

#[test]
fn acceptance_01_fo_hyperltl_equivalence() {
    let c = Criterion::start("1 fo-hyperltl-equivalence", 10);
    let alpha = ab();
    let opts = EvalOptions {
        allow_empty: true,
        ..Default::default()
    };
    let mut cases = 0usize;
    for w in word_corpus() {
        for fo in fo_pool() {
            let want = eval_fo(&alpha, &w, &fo, true).unwrap();
            let hyper = fo_to_hyperltl(&fo).unwrap();
            for f in corpus_stretches() {
                let enc = encode_word(&alpha, &w, &f).unwrap();
                let got = eval_hyperltl_opts(&enc, &hyper, &opts).unwrap();
                assert_eq!(got, want, "{} on {w:?}", print_formula(&hyper));
                cases += 1;
            }
        }
    }
    c.pass(&format!("{cases} cases"));
}

#[test]
fn acceptance_02_stretch_invariance() {
    let c = Criterion::start("2 stretch-invariance", 10);
    let alpha = ab();
    let opts = EvalOptions {
        allow_empty: true,
        ..Default::default()
    };
    let mut cases = 0usize;
    for w in word_corpus() {
        for fo in fo_pool() {
            let hyper = fo_to_hyperltl(&fo).unwrap();
            let values: Vec<bool> = corpus_stretches()
                .iter()
                .map(|f| {
                    let enc = encode_word(&alpha, &w, f).unwrap();
                    eval_hyperltl_opts(&enc, &hyper, &opts).unwrap()
                })
                .collect();
            assert!(
                values.windows(2).all(|v| v[0] == v[1]),
                "stretch-dependent value for {} on {w:?}",
                print_formula(&hyper)
            );
            cases += 1;
        }
    }
    c.pass(&format!("{cases} cases"));
}

#[test]
fn acceptance_03_simplification_equivalence() {
    let c = Criterion::start("3 simplification", 30);
    let alpha = ab();
    let opts = EvalOptions {
        allow_empty: true,
        ..Default::default()
    };
    let test_stretches = [
        StretchFunction::table(vec![1, 2, 4]).unwrap(),
        StretchFunction::table(vec![2, 5, 6]).unwrap(),
    ];
    let mut cases = 0usize;
    for fo in fo_pool() {
        let hyper = fo_to_hyperltl(&fo).unwrap();
        let n = temporal_depth(&hyper) + 1;
        let spaced_fn = StretchFunction::affine(n).unwrap();
        let simplified = simplify(&hyper).unwrap();
        // prefix preserved verbatim
        let (orig_prefix, _) = hyper.strip_prefix();
        let (simp_prefix, _) = simplified.strip_prefix();
        assert_eq!(
            orig_prefix,
            simp_prefix,
            "prefix changed for {}",
            print_formula(&hyper)
        );
        for w in word_corpus() {
            let spaced = encode_word(&alpha, &w, &spaced_fn).unwrap();
            let want = eval_hyperltl_opts(&spaced, &hyper, &opts).unwrap();
            for f in &test_stretches {
                let enc = encode_word(&alpha, &w, f).unwrap();
                let got = eval_hyperltl_opts(&enc, &simplified, &opts).unwrap();
                assert_eq!(got, want, "{} on {w:?}", print_formula(&hyper));
                cases += 1;
            }
        }
    }
    c.pass(&format!("{cases} cases"));
}

fn random_system(rng: &mut ChaCha8Rng) -> TransitionSystem {
    let alpha = ab();
    let n = rng.gen_range(1..=4);
    let vertices: Vec<(String, Labels)> = (0..n)
        .map(|i| (format!("v{i}"), Labels(rng.gen_range(0..4))))
        .collect();
    let mut edges = Vec::new();
    for v in 0..n {
        let out_degree = rng.gen_range(1..=2usize.min(n));
        let mut targets: Vec<usize> = (0..n).collect();
        for _ in 0..out_degree {
            let k = rng.gen_range(0..targets.len());
            edges.push((v, targets.swap_remove(k)));
        }
    }
    TransitionSystem::new(alpha, vertices, edges, 0).unwrap()
}

fn random_ctl_formula(rng: &mut ChaCha8Rng, quantifiers: usize) -> Formula {
    fn body(
        rng: &mut ChaCha8Rng,
        depth: usize,
        quant_budget: &mut usize,
        bound: &mut Vec<String>,
    ) -> Formula {
        let atom = |rng: &mut ChaCha8Rng, bound: &Vec<String>| {
            let prop = if rng.gen_bool(0.5) { "a" } else { "b" };
            let var = bound[rng.gen_range(0..bound.len())].clone();
            Formula::atom(prop, var)
        };
        if depth == 0 {
            return atom(rng, bound);
        }
        match rng.gen_range(0..10) {
            0 | 1 => atom(rng, bound),
            2 => Formula::not(body(rng, depth - 1, quant_budget, bound)),
            3 => Formula::or(
                body(rng, depth - 1, quant_budget, bound),
                body(rng, depth - 1, quant_budget, bound),
            ),
            4 => Formula::and(
                body(rng, depth - 1, quant_budget, bound),
                body(rng, depth - 1, quant_budget, bound),
            ),
            5 => Formula::next(body(rng, depth - 1, quant_budget, bound)),
            6 => Formula::eventually(body(rng, depth - 1, quant_budget, bound)),
            7 => Formula::globally(body(rng, depth - 1, quant_budget, bound)),
            8 => Formula::until(
                body(rng, depth - 1, quant_budget, bound),
                body(rng, depth - 1, quant_budget, bound),
            ),
            _ => {
                if *quant_budget == 0 {
                    atom(rng, bound)
                } else {
                    *quant_budget -= 1;
                    let var = format!("q{}", *quant_budget);
                    bound.push(var.clone());
                    let inner = body(rng, depth - 1, quant_budget, bound);
                    bound.pop();
                    if rng.gen_bool(0.5) {
                        Formula::exists(var, inner)
                    } else {
                        Formula::forall(var, inner)
                    }
                }
            }
        }
    }
    let mut quant_budget = quantifiers.saturating_sub(1);
    let var = "p".to_string();
    let mut bound = vec![var.clone()];
    let inner = body(rng, 3, &mut quant_budget, &mut bound);
    if rand::Rng::gen_bool(rng, 0.5) {
        Formula::exists(var, inner)
    } else {
        Formula::forall(var, inner)
    }
}

#[test]
fn acceptance_04_game_matches_denotational() {
    let c = Criterion::start("4 game-vs-denotational", 30);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a4e);
    let mut done = 0usize;
    while done < 200 {
        let ts = random_system(&mut rng);
        let quantifiers = rng.gen_range(1..=3);
        let f = random_ctl_formula(&mut rng, quantifiers);
        if !f.is_ctlstar_wellformed() || !f.is_sentence() {
            continue;
        }
        let universe = enumerate_lassos(&ts, 2, 2, 100_000).unwrap();
        let direct = eval_hyperctlstar(&ts, &universe, &f).unwrap();
        let game = build_game(&ts, &universe, &f).unwrap();
        let winner = solve_game(&game).winner;
        assert_eq!(
            direct,
            winner == Player::Verifier,
            "disagreement on {} over {} paths",
            print_formula(&f),
            universe.len()
        );
        done += 1;
    }
    c.pass("200 instances");
}

fn random_trace(rng: &mut ChaCha8Rng, max_stem: usize, max_loop: usize) -> UpTrace {
    let stem_len = rng.gen_range(0..=max_stem);
    let cycle_len = rng.gen_range(1..=max_loop);
    let stem = (0..stem_len).map(|_| Labels(rng.gen_range(0..4))).collect();
    let cycle = (0..cycle_len)
        .map(|_| Labels(rng.gen_range(0..4)))
        .collect();
    UpTrace::new(stem, cycle).unwrap()
}

fn random_qf_body(rng: &mut ChaCha8Rng, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        let prop = if rng.gen_bool(0.5) { "a" } else { "b" };
        return Formula::atom(prop, vars[rng.gen_range(0..vars.len())].clone());
    }
    match rng.gen_range(0..7) {
        0 => Formula::not(random_qf_body(rng, vars, depth - 1)),
        1 => Formula::or(
            random_qf_body(rng, vars, depth - 1),
            random_qf_body(rng, vars, depth - 1),
        ),
        2 => Formula::and(
            random_qf_body(rng, vars, depth - 1),
            random_qf_body(rng, vars, depth - 1),
        ),
        3 => Formula::next(random_qf_body(rng, vars, depth - 1)),
        4 => Formula::eventually(random_qf_body(rng, vars, depth - 1)),
        5 => Formula::globally(random_qf_body(rng, vars, depth - 1)),
        _ => Formula::until(
            random_qf_body(rng, vars, depth - 1),
            random_qf_body(rng, vars, depth - 1),
        ),
    }
}

#[test]
fn acceptance_05_expansion_oracle_equivalence() {
    let c = Criterion::start("5 expansion-oracle", 20);
    let alpha = ab();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    for case in 0..500 {
        let var_count = rng.gen_range(1..=3);
        let vars: Vec<String> = (0..var_count).map(|i| format!("p{i}")).collect();
        let body = random_qf_body(&mut rng, &vars, 4);
        let mut assignment = TraceAssignment::empty(alpha.clone());
        for v in &vars {
            assignment = assignment.bind(v.clone(), random_trace(&mut rng, 4, 3));
        }
        let table = hyperlogic::trace::expansion_table(&body, &assignment, &EvalOptions::default())
            .unwrap();
        let fast = table.root_value();
        assert!(
            table.check_consistency(),
            "table inconsistent in case {case}"
        );
        let slow = unrolled_eval(&body, &assignment);
        assert_eq!(fast, slow, "case {case}: {}", print_formula(&body));
    }
    c.pass("500 instances");
}

#[test]
fn acceptance_06_tiling_truncation_pattern() {
    let c = Criterion::start("6 tiling-truncation", 5);
    let ts = TileSet::constant("c");
    for n in 1..=3 {
        let witness = brute_tiling(&ts, Region::Quadrant, n, 1_000_000)
            .unwrap()
            .witness
            .unwrap();
        let model = truncated_quadrant_model(&ts, &witness).unwrap();
        let values: Vec<bool> = quadrant_parts(&ts)
            .iter()
            .map(|p| eval_hyperltl(&model, &prenex(p).unwrap()).unwrap())
            .collect();
        assert_eq!(
            values,
            vec![true, false, true, true, true, true, true],
            "conjunct pattern at n = {n}"
        );
    }
    c.pass("n in 1..=3");
}

#[test]
fn acceptance_07_diagonal_tiling_sat() {
    let c = Criterion::start("7 diagonal-tiling-sat", 60);
    let ts = TileSet::constant("c");
    let f = gen_diagonal_formula(&ts);
    let bounds = SearchBounds::new(4, 6, 1, ts.alphabet(true)).unwrap();
    let out = sat_search(&f, &bounds, &SearchOptions::default()).unwrap();
    match out.status {
        SearchStatus::Sat(model) => {
            let grid = decode_diagonal_model(&ts, &model).unwrap();
            assert!(
                check_partial_diagonal(&ts, &grid),
                "decoded witness fails the checker"
            );
            c.pass(&format!("witness with {} trace(s)", model.len()));
        }
        SearchStatus::BoundExhausted => panic!("diagonal encoding unexpectedly exhausted bounds"),
    }
}

#[test]
fn acceptance_08_arithmetic_oracles() {
    let c = Criterion::start("8 arithmetic-oracles", 10);
    let alpha = op_alphabet();
    let l = |names: &[&str]| alpha.labels(names).unwrap();
    // the two closure examples
    let add_forever = UpTrace::new(vec![], vec![l(&["add"])]).unwrap();
    assert!(cl_top_member(&alpha, &add_forever).unwrap());
    assert!(!t_op_member(&alpha, &add_forever).unwrap());
    let mult_limit =
        UpTrace::new(vec![l(&["mult"]), l(&["argr", "mult"])], vec![l(&["mult"])]).unwrap();
    assert!(cl_top_member(&alpha, &mult_limit).unwrap());
    assert!(!t_op_member(&alpha, &mult_limit).unwrap());
    // truncated-model conjunct pattern
    let model = TraceSet::new(alpha, t_op_truncation(2)).unwrap();
    let values: Vec<bool> = phi_op_parts()
        .iter()
        .map(|p| eval_hyperltl(&model, &prenex(p).unwrap()).unwrap())
        .collect();
    assert_eq!(
        values,
        vec![true, true, true, false, true, true, true, true]
    );
    c.pass("closure examples and truncation pattern");
}

fn random_universal_sentence(rng: &mut ChaCha8Rng) -> Formula {
    let var_count = rng.gen_range(1..=2);
    let vars: Vec<String> = (0..var_count).map(|i| format!("p{i}")).collect();
    let mut f = random_qf_body(rng, &vars, 3);
    for v in vars.into_iter().rev() {
        f = Formula::forall(v, f);
    }
    f
}

#[test]
fn acceptance_09_monotone_closure() {
    let c = Criterion::start("9 quantifier-monotonicity", 20);
    let alpha = ab();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc105);
    let mut done = 0usize;
    while done < 200 {
        let forall_sentence = random_universal_sentence(&mut rng);
        let trace_count = rng.gen_range(1..=4);
        let traces: Vec<UpTrace> = (0..trace_count)
            .map(|_| random_trace(&mut rng, 3, 2))
            .collect();
        let model = TraceSet::new(alpha.clone(), traces).unwrap();
        if model.is_empty() {
            continue;
        }
        // downward closure of universal-only sentences
        if eval_hyperltl(&model, &forall_sentence).unwrap() {
            for sub in random_subsets(&model, done as u64).take(5) {
                assert!(
                    eval_hyperltl(&sub, &forall_sentence).unwrap(),
                    "downward closure violated by {} on a subset",
                    print_formula(&forall_sentence)
                );
                assert!(subset_check(&sub, &model));
            }
        }
        // upward closure of the dual existential sentence
        let exists_sentence = forall_sentence.dual();
        if eval_hyperltl(&model, &exists_sentence).unwrap() {
            let mut extended = model.traces().to_vec();
            for _ in 0..3 {
                extended.push(random_trace(&mut rng, 3, 2));
            }
            let superset = TraceSet::new(alpha.clone(), extended).unwrap();
            assert!(
                eval_hyperltl(&superset, &exists_sentence).unwrap(),
                "upward closure violated by {}",
                print_formula(&exists_sentence)
            );
        }
        done += 1;
    }
    c.pass("200 instances, 0 violations");
}

#[test]
fn acceptance_10_translation_smoke() {
    let c = Criterion::start("10 translation-smoke", 30);
    let tsc = hyperlogic::arith::gen_tsc(6, 1_000_000).unwrap();
    let universe = smoke_universe(&tsc).unwrap();
    let positive = parse_arith_formula("exists x:N. x + x = x").unwrap();
    let translated = translate_e3a(&positive, E3aVariant::SecondOrderFb).unwrap();
    assert!(
        eval_hyperctlstar(&tsc, &universe, &translated).unwrap(),
        "positive case must hold"
    );
    let negative = parse_arith_formula("exists x:N. x + x = x & x < x").unwrap();
    let translated = translate_e3a(&negative, E3aVariant::SecondOrderFb).unwrap();
    assert!(
        !eval_hyperctlstar(&tsc, &universe, &translated).unwrap(),
        "negated case must fail"
    );
    c.pass(&format!(
        "glued system with {} vertices",
        tsc.vertex_count()
    ));
}

fn random_ast(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let props = ["a", "b0", "b1", "dollar", "o"];
    let vars = ["p", "q", "r"];
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..5) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(
                props[rng.gen_range(0..props.len())],
                vars[rng.gen_range(0..vars.len())],
            ),
        };
    }
    match rng.gen_range(0..12) {
        0 => Formula::not(random_ast(rng, depth - 1)),
        1 => Formula::or(random_ast(rng, depth - 1), random_ast(rng, depth - 1)),
        2 => Formula::and(random_ast(rng, depth - 1), random_ast(rng, depth - 1)),
        3 => Formula::implies(random_ast(rng, depth - 1), random_ast(rng, depth - 1)),
        4 => Formula::iff(random_ast(rng, depth - 1), random_ast(rng, depth - 1)),
        5 => Formula::next(random_ast(rng, depth - 1)),
        6 => Formula::eventually(random_ast(rng, depth - 1)),
        7 => Formula::globally(random_ast(rng, depth - 1)),
        8 => Formula::until(random_ast(rng, depth - 1), random_ast(rng, depth - 1)),
        9 => Formula::exists(
            vars[rng.gen_range(0..vars.len())],
            random_ast(rng, depth - 1),
        ),
        _ => Formula::forall(
            vars[rng.gen_range(0..vars.len())],
            random_ast(rng, depth - 1),
        ),
    }
}

#[test]
fn acceptance_11_roundtrips() {
    let c = Criterion::start("11 round-trips", 10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f11);
    for case in 0..1000 {
        let f = random_ast(&mut rng, 5);
        let printed = print_formula(&f);
        let back = parse_formula_any(&printed)
            .unwrap_or_else(|e| panic!("case {case}: reparse of {printed:?} failed: {e}"));
        assert_eq!(back, f, "case {case} via {printed:?}");
    }

    // every generator output re-parses to a structurally equal tree
    let tiles = TileSet::constant("c");
    let two_tiles = TileSet::new(
        vec!["r".to_string(), "g".to_string()],
        vec![
            hyperlogic::tiling::Tile {
                east: 0,
                west: 0,
                north: 1,
                south: 1,
            },
            hyperlogic::tiling::Tile {
                east: 1,
                west: 1,
                north: 0,
                south: 0,
            },
        ],
        1,
    )
    .unwrap();
    let mut generated: Vec<Formula> = vec![
        hyperlogic::tiling::gen_quadrant_formula(&tiles),
        hyperlogic::tiling::gen_quadrant_formula(&two_tiles),
        gen_diagonal_formula(&tiles),
        gen_diagonal_formula(&two_tiles),
        hyperlogic::arith::gen_phi_op(),
        hyperlogic::arith::gen_phi_op_cl(),
        hyperlogic::arith::gen_phi_set(),
        hyperlogic::fo::gen_phi_b(&["a".to_string(), "b".to_string()]),
        hyperlogic::fo::gen_phi_omega(),
        hyperlogic::fo::gen_split_combinator(
            &parse_formula_any("exists p. a[p]").unwrap(),
            &parse_formula_any("exists q. b0[q]").unwrap(),
        )
        .unwrap(),
        hyperlogic::fo::gen_hierarchy_hard(&parse_formula_any("exists p. a[p]").unwrap(), 1, None)
            .unwrap(),
        translate_e3a(
            &parse_arith_formula("exists X:set2. forall y:set. y in X | !(y in X)").unwrap(),
            E3aVariant::ThirdOrder,
        )
        .unwrap(),
        translate_e3a(
            &parse_arith_formula("exists x:N. x + x = x").unwrap(),
            E3aVariant::SecondOrderFb,
        )
        .unwrap(),
    ];
    for fo in fo_pool() {
        generated.push(fo_to_hyperltl(&fo).unwrap());
    }
    for f in &generated {
        let printed = print_formula(f);
        let back = parse_formula_any(&printed)
            .unwrap_or_else(|e| panic!("generator output failed to reparse: {e}\n{printed}"));
        assert_eq!(&back, f, "generator output changed through printing");
    }
    // arithmetic outputs re-parse through the arithmetic grammar
    for variant in [
        hyperlogic::arith::SoaVariant::Countable,
        hyperlogic::arith::SoaVariant::FinitelyBranching,
    ] {
        let f = hyperlogic::syntax::parse_formula(
            "exists p. X exists q. a[q] U b0[p]",
            hyperlogic::syntax::Dialect::HyperCtlStar,
        )
        .unwrap();
        let out = hyperlogic::arith::translate_hyperctl_to_soa(&f, variant).unwrap();
        let printed = hyperlogic::arith::print_arith_formula(&out);
        let back = parse_arith_formula(&printed).unwrap();
        assert_eq!(back, out);
    }
    c.pass("1000 random + generator outputs");
}
