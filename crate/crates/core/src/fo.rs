//! First-order logic over finite words, word encodings into trace sets,
//! the translation into trace-quantified temporal formulas, its
//! stretch-invariant simplification, and the boundedness / split-model /
//! alternation-hardness combinators built on top of it.
//!
//! A word `w` is encoded as one trace per position `n`: the letter of `w`
//! at `n` sits in the first label of the trace, and a fresh marker `o`
//! sits exactly at time `f(n)` for a strictly monotone stretch function
//! `f`. Position order then becomes the temporal order of the `o`
//! markers, so `x <= y` translates to `F (o[x] & F o[y])`.

use crate::error::{Error, Result, SourceSpan};
use crate::formula::{temporal_depth, Formula};
use crate::trace::{Alphabet, EvalOptions, Labels, TraceAssignment, TraceSet, UpTrace};
use std::collections::{BTreeSet, HashMap};

/// First-order formulas over finite words: letter tests and position
/// comparisons, with `&` and `->` as sugar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FoFormula {
    /// `a(x)`: the letter at position `x` contains `a`.
    Atom {
        prop: String,
        var: String,
    },
    /// `x <= y` on positions.
    Le(String, String),
    Not(Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

impl FoFormula {
    pub fn atom(prop: impl Into<String>, var: impl Into<String>) -> Self {
        FoFormula::Atom {
            prop: prop.into(),
            var: var.into(),
        }
    }

    pub fn le(x: impl Into<String>, y: impl Into<String>) -> Self {
        FoFormula::Le(x.into(), y.into())
    }

    pub fn not(f: FoFormula) -> Self {
        FoFormula::Not(Box::new(f))
    }

    pub fn or(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, f: FoFormula) -> Self {
        FoFormula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: FoFormula) -> Self {
        FoFormula::Forall(v.into(), Box::new(f))
    }

    fn children(&self) -> Vec<&FoFormula> {
        match self {
            FoFormula::Atom { .. } | FoFormula::Le(..) => vec![],
            FoFormula::Not(a) | FoFormula::Exists(_, a) | FoFormula::Forall(_, a) => vec![a],
            FoFormula::Or(a, b) | FoFormula::And(a, b) | FoFormula::Implies(a, b) => vec![a, b],
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            FoFormula::Exists(..) | FoFormula::Forall(..) => false,
            _ => self.children().iter().all(|c| c.is_quantifier_free()),
        }
    }

    pub fn is_prenex(&self) -> bool {
        let mut cur = self;
        while let FoFormula::Exists(_, b) | FoFormula::Forall(_, b) = cur {
            cur = b;
        }
        cur.is_quantifier_free()
    }

    pub fn strip_prefix(&self) -> (Vec<(bool, &str)>, &FoFormula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                FoFormula::Exists(v, b) => {
                    prefix.push((true, v.as_str()));
                    cur = b;
                }
                FoFormula::Forall(v, b) => {
                    prefix.push((false, v.as_str()));
                    cur = b;
                }
                _ => return (prefix, cur),
            }
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        fn walk(f: &FoFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                FoFormula::Atom { var, .. } => {
                    if !bound.iter().any(|b| b == var) {
                        out.insert(var.clone());
                    }
                }
                FoFormula::Le(x, y) => {
                    for v in [x, y] {
                        if !bound.iter().any(|b| b == v) {
                            out.insert(v.clone());
                        }
                    }
                }
                FoFormula::Exists(v, b) | FoFormula::Forall(v, b) => {
                    bound.push(v.clone());
                    walk(b, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in f.children() {
                        walk(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        fn walk(f: &FoFormula, out: &mut BTreeSet<String>) {
            if let FoFormula::Atom { prop, .. } = f {
                out.insert(prop.clone());
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }
}

/// Standard finite-word semantics. Quantifiers range over the positions of
/// `word`; quantifying over the empty word is an error unless
/// `allow_empty` (then `exists` is false and `forall` is true).
pub fn eval_fo(
    alphabet: &Alphabet,
    word: &[Labels],
    sentence: &FoFormula,
    allow_empty: bool,
) -> Result<bool> {
    if !sentence.is_sentence() {
        return Err(Error::UnboundVariable(
            sentence
                .free_variables()
                .into_iter()
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }
    fn rec(
        alphabet: &Alphabet,
        word: &[Labels],
        f: &FoFormula,
        nu: &mut HashMap<String, usize>,
        allow_empty: bool,
    ) -> Result<bool> {
        match f {
            FoFormula::Atom { prop, var } => {
                let pos = nu[var];
                Ok(alphabet
                    .index_of(prop)
                    .map(|b| word[pos].contains(b))
                    .unwrap_or(false))
            }
            FoFormula::Le(x, y) => Ok(nu[x] <= nu[y]),
            FoFormula::Not(a) => Ok(!rec(alphabet, word, a, nu, allow_empty)?),
            FoFormula::Or(a, b) => Ok(rec(alphabet, word, a, nu, allow_empty)?
                || rec(alphabet, word, b, nu, allow_empty)?),
            FoFormula::And(a, b) => Ok(rec(alphabet, word, a, nu, allow_empty)?
                && rec(alphabet, word, b, nu, allow_empty)?),
            FoFormula::Implies(a, b) => Ok(!rec(alphabet, word, a, nu, allow_empty)?
                || rec(alphabet, word, b, nu, allow_empty)?),
            FoFormula::Exists(v, b) | FoFormula::Forall(v, b) => {
                let existential = matches!(f, FoFormula::Exists(..));
                if word.is_empty() && !allow_empty {
                    return Err(Error::EmptyWordQuantification);
                }
                for pos in 0..word.len() {
                    let prev = nu.insert(v.clone(), pos);
                    let r = rec(alphabet, word, b, nu, allow_empty)?;
                    match prev {
                        Some(p) => {
                            nu.insert(v.clone(), p);
                        }
                        None => {
                            nu.remove(v);
                        }
                    }
                    if r == existential {
                        return Ok(existential);
                    }
                }
                Ok(!existential)
            }
        }
    }
    rec(alphabet, word, sentence, &mut HashMap::new(), allow_empty)
}

/// A strictly monotone reindexing of marker positions with `f(0) >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StretchFunction {
    /// `n -> factor * (n + 1)`.
    Affine { factor: usize },
    /// Explicit table for the indices that will be used.
    Table(Vec<usize>),
}

impl StretchFunction {
    pub fn affine(factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidInput(
                "stretch factor must be positive".to_string(),
            ));
        }
        Ok(StretchFunction::Affine { factor })
    }

    pub fn table(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() || values[0] == 0 {
            return Err(Error::InvalidInput(
                "stretch table must start above 0".to_string(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "stretch table must be strictly increasing".to_string(),
            ));
        }
        Ok(StretchFunction::Table(values))
    }

    pub fn apply(&self, n: usize) -> Result<usize> {
        match self {
            StretchFunction::Affine { factor } => Ok(factor * (n + 1)),
            StretchFunction::Table(values) => values.get(n).copied().ok_or_else(|| {
                Error::InvalidInput(format!("stretch table has no entry for index {n}"))
            }),
        }
    }
}

pub const MARKER: &str = "o";

/// Extends an alphabet with the `o` marker.
pub fn marked_alphabet(ap: &Alphabet) -> Alphabet {
    let mut props: Vec<String> = ap.props().to_vec();
    props.push(MARKER.to_string());
    Alphabet::new(props).expect("small alphabet")
}

/// Encodes a finite word as one trace per position: letters at time 0, the
/// marker at time `f(n)`, empty labels elsewhere, ending in an empty loop.
pub fn encode_word(ap: &Alphabet, word: &[Labels], f: &StretchFunction) -> Result<TraceSet> {
    let alpha = marked_alphabet(ap);
    let o_bit = alpha.index_of(MARKER).unwrap();
    // letter bits may move when the marker is inserted into sorted order
    let remap: Vec<usize> = ap
        .props()
        .iter()
        .map(|p| alpha.index_of(p).expect("subset alphabet"))
        .collect();
    let mut traces = Vec::with_capacity(word.len());
    for (n, letter) in word.iter().enumerate() {
        let at = f.apply(n)?;
        let mut first = Labels::empty();
        for (old, new) in remap.iter().enumerate() {
            if letter.contains(old) {
                first.insert(*new);
            }
        }
        let mut stem = vec![first];
        stem.resize(at, Labels::empty());
        stem.push(Labels::singleton(o_bit));
        traces.push(UpTrace::new(stem, vec![Labels::empty()])?);
    }
    TraceSet::new(alpha, traces)
}

/// Rewrites a prenex FO sentence into a trace-quantified temporal formula
/// with the same quantifier prefix: `a(x)` becomes `a[x]` and `x <= y`
/// becomes `F (o[x] & F o[y])`.
pub fn fo_to_hyperltl(f: &FoFormula) -> Result<Formula> {
    if !f.is_prenex() {
        return Err(Error::NotPrenex(
            "translation expects a prenex formula".to_string(),
        ));
    }
    fn body(f: &FoFormula) -> Formula {
        match f {
            FoFormula::Atom { prop, var } => Formula::atom(prop.clone(), var.clone()),
            FoFormula::Le(x, y) => Formula::eventually(Formula::and(
                Formula::atom(MARKER, x.clone()),
                Formula::eventually(Formula::atom(MARKER, y.clone())),
            )),
            FoFormula::Not(a) => Formula::not(body(a)),
            FoFormula::Or(a, b) => Formula::or(body(a), body(b)),
            FoFormula::And(a, b) => Formula::and(body(a), body(b)),
            FoFormula::Implies(a, b) => Formula::implies(body(a), body(b)),
            FoFormula::Exists(..) | FoFormula::Forall(..) => unreachable!("prenex checked"),
        }
    }
    let (prefix, qf) = f.strip_prefix();
    let mut out = body(qf);
    for (existential, var) in prefix.into_iter().rev() {
        out = if existential {
            Formula::exists(var, out)
        } else {
            Formula::forall(var, out)
        };
    }
    Ok(out)
}

/// Enumerates the total preorders over `0..k` as compact rank vectors:
/// `rank[i] <= rank[j]` means element `i` precedes-or-ties `j`, and the
/// used ranks form an initial segment.
fn total_preorders(k: usize) -> Vec<Vec<usize>> {
    fn rec(ranks: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        let k = ranks.len();
        if i == k {
            let used: BTreeSet<usize> = ranks.iter().copied().collect();
            if (0..used.len()).all(|r| used.contains(&r)) {
                out.push(ranks.clone());
            }
            return;
        }
        for r in 0..k {
            ranks[i] = r;
            rec(ranks, i + 1, out);
        }
    }
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    rec(&mut vec![0usize; k], 0, &mut out);
    out
}

/// The class formula for an initial-label choice (flags over `atoms`) and
/// a total preorder (ranks over `vars`): the chosen atoms positively, the
/// others negated, and one `F (o[vi] & F o[vj])` conjunct per ordered pair
/// with `vi` before-or-tied `vj`, negated for the pairs outside the
/// preorder.
///
/// The negated conjuncts make the class formulas mutually exclusive. With
/// positive conjuncts alone, an assignment binding two variables to the
/// same trace satisfies the strict-order classes as well as its own tie
/// class, and the disjunction built below would overshoot on exactly those
/// assignments.
fn class_formula(
    atoms: &[(String, String)],
    in_a: &[bool],
    vars: &[String],
    ranks: &[usize],
) -> Formula {
    let mut parts = Vec::new();
    for ((prop, var), &positive) in atoms.iter().zip(in_a) {
        let atom = Formula::atom(prop.clone(), var.clone());
        parts.push(if positive { atom } else { Formula::not(atom) });
    }
    for (i, vi) in vars.iter().enumerate() {
        for (j, vj) in vars.iter().enumerate() {
            let pair = Formula::eventually(Formula::and(
                Formula::atom(MARKER, vi.clone()),
                Formula::eventually(Formula::atom(MARKER, vj.clone())),
            ));
            parts.push(if ranks[i] <= ranks[j] {
                pair
            } else {
                Formula::not(pair)
            });
        }
    }
    Formula::conj(parts)
}

/// One marker class: an initial-label choice over the `(prop, var)` atoms
/// and a total preorder of the free variables' marker positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDescriptor {
    atoms: Vec<(String, String)>,
    in_a: Vec<bool>,
    vars: Vec<String>,
    ranks: Vec<usize>,
}

impl ClassDescriptor {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Is the initial-position atom `prop[var]` part of this class?
    pub fn initial_atom(&self, prop: &str, var: &str) -> bool {
        self.atoms
            .iter()
            .zip(&self.in_a)
            .any(|((p, v), &on)| on && p == prop && v == var)
    }

    /// Does variable `i` precede or tie variable `j` in marker order?
    pub fn precedes_or_ties(&self, i: usize, j: usize) -> bool {
        self.ranks[i] <= self.ranks[j]
    }

    /// The formula distinguishing exactly this class.
    pub fn formula(&self) -> Formula {
        class_formula(&self.atoms, &self.in_a, &self.vars, &self.ranks)
    }

    /// The canonical representative assignment: the chosen initial labels
    /// at time 0, the markers of the rank-`r` block at time
    /// `(r + 1) * spacing`.
    pub fn representative(&self, alpha: &Alphabet, spacing: usize) -> Result<TraceAssignment> {
        let o_bit = alpha
            .index_of(MARKER)
            .ok_or_else(|| Error::AlphabetMismatch("alphabet lacks the marker".to_string()))?;
        let mut assignment = TraceAssignment::empty(alpha.clone());
        for (vi, var) in self.vars.iter().enumerate() {
            let mut first = Labels::empty();
            for ((prop, avar), &on) in self.atoms.iter().zip(&self.in_a) {
                if on && avar == var {
                    first.insert(alpha.index_of(prop).ok_or_else(|| {
                        Error::AlphabetMismatch(format!("alphabet lacks {prop:?}"))
                    })?);
                }
            }
            let at = (self.ranks[vi] + 1) * spacing;
            let mut stem = vec![first];
            stem.resize(at, Labels::empty());
            stem.push(Labels::singleton(o_bit));
            assignment = assignment.bind(var.clone(), UpTrace::new(stem, vec![Labels::empty()])?);
        }
        Ok(assignment)
    }
}

/// All classes over the given letter propositions and free variables, in
/// lexicographic order (initial-label choice, then preorder ranks).
pub fn enumerate_classes(props: &[String], vars: &[String]) -> Result<Vec<ClassDescriptor>> {
    let atoms: Vec<(String, String)> = props
        .iter()
        .flat_map(|p| vars.iter().map(move |v| (p.clone(), v.clone())))
        .collect();
    if atoms.len() > 20 {
        return Err(Error::ResourceLimit(format!(
            "class enumeration over {} initial atoms",
            atoms.len()
        )));
    }
    let preorders = total_preorders(vars.len());
    let mut out = Vec::new();
    for mask in 0..(1u64 << atoms.len()) {
        let in_a: Vec<bool> = (0..atoms.len()).map(|i| mask & (1 << i) != 0).collect();
        for ranks in &preorders {
            out.push(ClassDescriptor {
                atoms: atoms.clone(),
                in_a: in_a.clone(),
                vars: vars.to_vec(),
                ranks: ranks.clone(),
            });
        }
    }
    Ok(out)
}

/// Replaces a quantifier-free temporal body over `a[pi]` / `o[pi]` atoms by
/// an equivalent (over word encodings with marker spacing `N = depth + 1`)
/// disjunction of class formulas, in lexicographic class order.
///
/// Membership of a class is decided by evaluating the body on its
/// canonical representative.
pub fn simplify_qf(body: &Formula, free_vars: &[String]) -> Result<Formula> {
    if !body.is_quantifier_free() {
        return Err(Error::NotPrenex(
            "simplification expects a quantifier-free body".to_string(),
        ));
    }
    let n = temporal_depth(body) + 1;
    let mut props: Vec<String> = body.propositions().into_iter().collect();
    props.retain(|p| p != MARKER);
    let base = Alphabet::new(props.clone())?;
    let alpha = marked_alphabet(&base);

    let mut disjuncts = Vec::new();
    for class in enumerate_classes(&props, free_vars)? {
        let assignment = class.representative(&alpha, n)?;
        let table = crate::trace::expansion_table(body, &assignment, &EvalOptions::default())?;
        if table.root_value() {
            disjuncts.push(class.formula());
        }
    }
    Ok(Formula::disj(disjuncts))
}

/// Applies [`simplify_qf`] under an unchanged quantifier prefix.
pub fn simplify(sentence: &Formula) -> Result<Formula> {
    if !sentence.is_prenex() {
        return Err(Error::NotPrenex(
            "simplification expects a prenex sentence".to_string(),
        ));
    }
    let (prefix, body) = sentence.strip_prefix();
    let vars: Vec<String> = prefix.iter().map(|(_, v)| v.to_string()).collect();
    let prefix: Vec<(bool, String)> = prefix.iter().map(|(e, v)| (*e, v.to_string())).collect();
    let mut out = simplify_qf(body, &vars)?;
    for (existential, var) in prefix.into_iter().rev() {
        out = if existential {
            Formula::exists(var, out)
        } else {
            Formula::forall(var, out)
        };
    }
    Ok(out)
}

pub const ENDMARK: &str = "dollar";

/// Sentence satisfied exactly by the trace sets whose members switch to an
/// all-`dollar` suffix at one common positive time point.
pub fn gen_phi_b(ap: &[String]) -> Formula {
    let d = |v: &str| Formula::atom(ENDMARK, v);
    let per_trace = Formula::and(
        Formula::until(Formula::not(d("p")), Formula::globally(d("p"))),
        Formula::conj(ap.iter().map(|a| {
            Formula::globally(Formula::not(Formula::and(
                Formula::atom(a.clone(), "p"),
                d("p"),
            )))
        })),
    );
    let aligned = Formula::eventually(Formula::conj([
        Formula::not(d("p")),
        Formula::not(d("q")),
        Formula::next(d("p")),
        Formula::next(d("q")),
    ]));
    Formula::forall("p", Formula::forall("q", Formula::and(per_trace, aligned)))
}

/// A trace set partitioned at a uniform time point: the left part carries
/// letter labels for `split` steps and then the `dollar` marker forever,
/// the right part starts with `split` pure-marker steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitView {
    pub left: TraceSet,
    pub right: TraceSet,
    pub split: usize,
}

impl SplitView {
    /// Partitions a trace set into its two halves, checking the uniform
    /// split-point discipline. Both halves must be nonempty (otherwise the
    /// split point is not determined).
    pub fn decompose(t: &TraceSet) -> Result<SplitView> {
        let alpha = t.alphabet();
        let d_bit = alpha.index_of(ENDMARK).ok_or_else(|| {
            Error::AlphabetMismatch("split sets need the dollar proposition".to_string())
        })?;
        let marker_only = Labels::singleton(d_bit);
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut split: Option<usize> = None;
        let mut record = |b: usize| -> Result<()> {
            match split {
                None => {
                    split = Some(b);
                    Ok(())
                }
                Some(prev) if prev == b => Ok(()),
                Some(prev) => Err(Error::InvalidInput(format!(
                    "split points disagree: {prev} vs {b}"
                ))),
            }
        };
        for trace in t.traces() {
            let dollar_free =
                |l: &Labels| !l.contains(d_bit);
            if trace.cycle() == [marker_only] && trace.stem().iter().all(dollar_free) {
                record(trace.stem_len())?;
                left.push(trace.clone());
            } else {
                let b = trace.stem().iter().take_while(|l| **l == marker_only).count();
                let tail_free = trace.stem()[b..].iter().all(dollar_free)
                    && trace.cycle().iter().all(dollar_free);
                if b == 0 || !tail_free {
                    return Err(Error::InvalidInput(
                        "trace fits neither half of a split set".to_string(),
                    ));
                }
                record(b)?;
                right.push(trace.clone());
            }
        }
        let split = split.ok_or_else(|| Error::InvalidInput("empty trace set".to_string()))?;
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidInput(
                "a split set needs traces on both sides".to_string(),
            ));
        }
        Ok(SplitView {
            left: TraceSet::new(alpha.clone(), left)?,
            right: TraceSet::new(alpha.clone(), right)?,
            split,
        })
    }

    /// The right half with its marker prefix stripped.
    pub fn decoded_right(&self) -> Result<TraceSet> {
        TraceSet::new(
            self.right.alphabet().clone(),
            self.right.traces().iter().map(|t| t.suffix(self.split)),
        )
    }
}

fn relativize_prenex(sentence: &Formula, guard: &dyn Fn(&str) -> Formula) -> Result<Formula> {
    if !sentence.is_prenex() {
        return Err(Error::NotPrenex(
            "relativization expects prenex input".to_string(),
        ));
    }
    let (prefix, body) = sentence.strip_prefix();
    let prefix: Vec<(bool, String)> = prefix.iter().map(|(e, v)| (*e, v.to_string())).collect();
    let mut out = body.clone();
    for (existential, var) in prefix.into_iter().rev() {
        out = if existential {
            Formula::exists(var.clone(), Formula::and(guard(&var), out))
        } else {
            Formula::forall(var.clone(), Formula::implies(guard(&var), out))
        };
    }
    Ok(out)
}

/// Combines sentences about the two halves of a split trace set into one
/// prenex sentence over the joint set.
///
/// Left-part quantifiers are guarded by `F G dollar[pi]`, right-part
/// quantifiers by `F G !dollar[pi]`, and the right body is re-anchored at
/// the first non-`dollar` position via its outermost quantified variable.
pub fn gen_split_combinator(left: &Formula, right: &Formula) -> Result<Formula> {
    for (f, side) in [(left, "left"), (right, "right")] {
        if !f.is_prenex() || !f.is_sentence() {
            return Err(Error::InvalidInput(format!(
                "{side} operand must be a prenex sentence"
            )));
        }
    }
    let d = |v: &str| Formula::atom(ENDMARK, v);
    let left_rel = relativize_prenex(left, &|v| Formula::eventually(Formula::globally(d(v))))?;

    let (r_prefix, r_body) = right.strip_prefix();
    let r_prefix: Vec<(bool, String)> = r_prefix.iter().map(|(e, v)| (*e, v.to_string())).collect();
    let anchor = r_prefix.first().map(|(_, v)| v.clone()).ok_or_else(|| {
        Error::InvalidInput("right operand needs a quantifier to anchor".to_string())
    })?;
    let mut right_rel = Formula::until(
        d(&anchor),
        Formula::and(Formula::not(d(&anchor)), r_body.clone()),
    );
    for (existential, var) in r_prefix.into_iter().rev() {
        let guard = Formula::eventually(Formula::globally(Formula::not(d(&var))));
        right_rel = if existential {
            Formula::exists(var, Formula::and(guard, right_rel))
        } else {
            Formula::forall(var, Formula::implies(guard, right_rel))
        };
    }
    crate::formula::prenex(&Formula::and(left_rel, right_rel))
}

/// The three conjuncts of the successor-ladder sentence: over `{x}`, its
/// models are the sets containing exactly one trace per marker position
/// (the trace `∅^n {x} ∅^ω` for every `n`).
pub fn phi_omega_parts() -> Vec<Formula> {
    let x = |v: &str| Formula::atom("x", v);
    let once = Formula::forall(
        "p",
        Formula::until(
            Formula::not(x("p")),
            Formula::and(
                x("p"),
                Formula::next(Formula::globally(Formula::not(x("p")))),
            ),
        ),
    );
    let origin = Formula::exists("p", x("p"));
    let successor = Formula::forall(
        "p1",
        Formula::exists(
            "p2",
            Formula::eventually(Formula::and(x("p1"), Formula::next(x("p2")))),
        ),
    );
    vec![once, origin, successor]
}

pub fn gen_phi_omega() -> Formula {
    Formula::conj(phi_omega_parts())
}

/// Builds the alternation-hardness sentence from an unsatisfiability
/// candidate.
///
/// At level 1 the candidate is combined with the successor-ladder sentence
/// by relativizing ladder quantifiers to traces carrying the marker `x`
/// (which must carry no other proposition) and candidate quantifiers to
/// traces without it. Above level 1 a caller-supplied witness sentence
/// with bounded models is combined with the candidate through the
/// split-model combinator.
pub fn gen_hierarchy_hard(
    candidate: &Formula,
    level: usize,
    witness: Option<&Formula>,
) -> Result<Formula> {
    if level == 0 {
        return Err(Error::InvalidInput(
            "hierarchy level must be at least 1".to_string(),
        ));
    }
    if !candidate.is_prenex() || !candidate.is_sentence() {
        return Err(Error::InvalidInput(
            "candidate must be a prenex sentence".to_string(),
        ));
    }
    if level == 1 {
        let x = |v: &str| Formula::atom("x", v);
        let marked = |v: &str| Formula::eventually(x(v));
        let unmarked = |v: &str| Formula::globally(Formula::not(x(v)));
        let ladder = phi_omega_parts()
            .into_iter()
            .map(|part| relativize_prenex(&part, &marked))
            .collect::<Result<Vec<_>>>()?;
        let purity = Formula::forall(
            "p",
            Formula::implies(
                marked("p"),
                Formula::globally(Formula::conj(
                    candidate
                        .propositions()
                        .into_iter()
                        .filter(|a| a != "x")
                        .map(|a| Formula::not(Formula::atom(a, "p"))),
                )),
            ),
        );
        let restricted = relativize_prenex(candidate, &unmarked)?;
        crate::formula::prenex(&Formula::conj(
            ladder.into_iter().chain([purity, restricted]),
        ))
    } else {
        let witness = witness.ok_or(Error::MissingWitness)?;
        gen_split_combinator(witness, candidate)
    }
}

// --- concrete text grammar -------------------------------------------------
//
//   formula ::= quant | impl
//   quant   ::= ("exists" | "forall") ident "." formula
//   impl    ::= or ("->" impl)?
//   or      ::= and ("|" or)?
//   and     ::= unary ("&" and)?
//   unary   ::= "!" unary | primary
//   primary ::= ident "(" ident ")" | ident "<=" ident | "(" formula ")"

struct FoParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> FoParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            span: SourceSpan::new(self.pos, (self.pos + 1).min(self.src.len())),
            message: message.into(),
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an identifier"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn peek_ident(&mut self) -> Option<String> {
        let save = self.pos;
        let r = self.ident().ok();
        self.pos = save;
        r
    }

    fn formula(&mut self) -> Result<FoFormula> {
        if let Some(w) = self.peek_ident() {
            if w == "exists" || w == "forall" {
                let _ = self.ident();
                let var = self.ident()?;
                if !self.eat(".") {
                    return Err(self.error("expected '.' after quantified variable"));
                }
                let body = self.formula()?;
                return Ok(if w == "exists" {
                    FoFormula::exists(var, body)
                } else {
                    FoFormula::forall(var, body)
                });
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<FoFormula> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            Ok(FoFormula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<FoFormula> {
        let lhs = self.conjunction()?;
        if self.eat("|") {
            Ok(FoFormula::or(lhs, self.disjunction()?))
        } else {
            Ok(lhs)
        }
    }

    fn conjunction(&mut self) -> Result<FoFormula> {
        let lhs = self.unary()?;
        if self.eat("&") {
            Ok(FoFormula::and(lhs, self.conjunction()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<FoFormula> {
        if self.eat("!") {
            return Ok(FoFormula::not(self.unary()?));
        }
        if self.eat("(") {
            let inner = self.formula()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        self.skip_ws();
        if let Some(w) = self.peek_ident() {
            if w == "exists" || w == "forall" {
                return self.formula();
            }
        }
        let name = self.ident()?;
        if self.eat("(") {
            let var = self.ident()?;
            if !self.eat(")") {
                return Err(self.error("expected ')' after atom variable"));
            }
            Ok(FoFormula::atom(name, var))
        } else if self.eat("<=") {
            let rhs = self.ident()?;
            Ok(FoFormula::le(name, rhs))
        } else {
            Err(self.error("expected '(' or '<=' after identifier"))
        }
    }
}

pub fn parse_fo_formula(text: &str) -> Result<FoFormula> {
    let mut p = FoParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

fn fo_precedence(f: &FoFormula) -> u8 {
    match f {
        FoFormula::Exists(..) | FoFormula::Forall(..) => 0,
        FoFormula::Implies(..) => 1,
        FoFormula::Or(..) => 2,
        FoFormula::And(..) => 3,
        FoFormula::Not(_) => 4,
        FoFormula::Atom { .. } | FoFormula::Le(..) => 5,
    }
}

fn fo_print_into(f: &FoFormula, min_prec: u8, out: &mut String) {
    let prec = fo_precedence(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        FoFormula::Atom { prop, var } => {
            out.push_str(prop);
            out.push('(');
            out.push_str(var);
            out.push(')');
        }
        FoFormula::Le(x, y) => {
            out.push_str(x);
            out.push_str(" <= ");
            out.push_str(y);
        }
        FoFormula::Not(a) => {
            out.push('!');
            fo_print_into(a, 4, out);
        }
        FoFormula::And(a, b) => {
            fo_print_into(a, 4, out);
            out.push_str(" & ");
            fo_print_into(b, 3, out);
        }
        FoFormula::Or(a, b) => {
            fo_print_into(a, 3, out);
            out.push_str(" | ");
            fo_print_into(b, 2, out);
        }
        FoFormula::Implies(a, b) => {
            fo_print_into(a, 2, out);
            out.push_str(" -> ");
            fo_print_into(b, 1, out);
        }
        FoFormula::Exists(v, b) => {
            out.push_str("exists ");
            out.push_str(v);
            out.push_str(". ");
            fo_print_into(b, 0, out);
        }
        FoFormula::Forall(v, b) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push_str(". ");
            fo_print_into(b, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_fo_formula(f: &FoFormula) -> String {
    let mut out = String::new();
    fo_print_into(f, 0, &mut out);
    out
}
