//! Ultimately periodic traces, finite trace-set models, trace assignments,
//! and exact HyperLTL evaluation via the expansion-table characterisation
//! of the quantifier-free fragment.

use crate::error::{Error, Result};
use crate::formula::Formula;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

pub const MAX_PROPS: usize = 32;

/// Finite, sorted proposition universe; label sets are bitmasks over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    props: Vec<String>,
}

impl Alphabet {
    pub fn new(props: impl IntoIterator<Item = impl Into<String>>) -> Result<Self> {
        let mut props: Vec<String> = props.into_iter().map(Into::into).collect();
        props.sort();
        props.dedup();
        if props.len() > MAX_PROPS {
            return Err(Error::ResourceLimit(format!(
                "alphabet of {} propositions exceeds the supported {MAX_PROPS}",
                props.len()
            )));
        }
        Ok(Alphabet { props })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn index_of(&self, prop: &str) -> Option<usize> {
        self.props.binary_search_by(|p| p.as_str().cmp(prop)).ok()
    }

    pub fn labels(&self, names: &[&str]) -> Result<Labels> {
        let mut l = Labels::empty();
        for n in names {
            let idx = self
                .index_of(n)
                .ok_or_else(|| Error::AlphabetMismatch(format!("unknown proposition {n:?}")))?;
            l.insert(idx);
        }
        Ok(l)
    }

    pub fn names(&self, labels: Labels) -> Vec<&str> {
        (0..self.len())
            .filter(|i| labels.contains(*i))
            .map(|i| self.props[i].as_str())
            .collect()
    }

    /// Number of distinct label sets (2^|AP|).
    pub fn letter_count(&self) -> u64 {
        1u64 << self.len()
    }
}

/// A set of atomic propositions at one position, as a bitmask relative to
/// some [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Labels(pub u32);

impl Labels {
    pub fn empty() -> Self {
        Labels(0)
    }

    pub fn singleton(idx: usize) -> Self {
        Labels(1 << idx)
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0 & (1 << idx) != 0
    }

    pub fn insert(&mut self, idx: usize) {
        self.0 |= 1 << idx;
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Labels) -> Labels {
        Labels(self.0 | other.0)
    }
}

/// An ultimately periodic trace `stem · cycle^ω`.
///
/// Values are not forced into canonical form on construction; evaluation
/// must be (and is tested to be) invariant under pumping or rotating the
/// representation. [`UpTrace::canonical`] yields the unique minimal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpTrace {
    stem: Vec<Labels>,
    cycle: Vec<Labels>,
}

impl UpTrace {
    pub fn new(stem: Vec<Labels>, cycle: Vec<Labels>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidInput(
                "trace loop must be nonempty".to_string(),
            ));
        }
        Ok(UpTrace { stem, cycle })
    }

    pub fn stem(&self) -> &[Labels] {
        &self.stem
    }

    pub fn cycle(&self) -> &[Labels] {
        &self.cycle
    }

    pub fn stem_len(&self) -> usize {
        self.stem.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Total representation size |stem| + |cycle|.
    pub fn size(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// Position access `t(n)`.
    pub fn at(&self, n: usize) -> Labels {
        if n < self.stem.len() {
            self.stem[n]
        } else {
            self.cycle[(n - self.stem.len()) % self.cycle.len()]
        }
    }

    /// The suffix `t(j) t(j+1) ...`, keeping the representation shape.
    pub fn suffix(&self, j: usize) -> UpTrace {
        if j < self.stem.len() {
            UpTrace {
                stem: self.stem[j..].to_vec(),
                cycle: self.cycle.clone(),
            }
        } else {
            let k = (j - self.stem.len()) % self.cycle.len();
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(k);
            UpTrace {
                stem: Vec::new(),
                cycle,
            }
        }
    }

    /// Minimal stem, primitive loop: the unique canonical representation.
    pub fn canonical(&self) -> UpTrace {
        let (stem, cycle) = canonical_lasso(&self.stem, &self.cycle);
        UpTrace { stem, cycle }
    }

    pub fn equivalent(&self, other: &UpTrace) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Reduces a lasso representation to minimal stem and primitive loop; the
/// result is the unique minimal representation of the same ω-sequence.
pub(crate) fn canonical_lasso<T: Clone + PartialEq>(stem: &[T], cycle: &[T]) -> (Vec<T>, Vec<T>) {
    let p = cycle.len();
    let mut root = p;
    for d in 1..p {
        if p % d == 0 && cycle.chunks(d).all(|c| c == &cycle[..d]) {
            root = d;
            break;
        }
    }
    let mut cycle = cycle[..root].to_vec();
    let mut stem = stem.to_vec();
    // absorb the stem's tail into the loop by rotating
    while let Some(last) = stem.last() {
        if *last == *cycle.last().unwrap() {
            cycle.rotate_right(1);
            stem.pop();
        } else {
            break;
        }
    }
    (stem, cycle)
}

/// A finite set of (canonical) ultimately periodic traces over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    alphabet: Alphabet,
    traces: Vec<UpTrace>,
}

impl TraceSet {
    /// Canonicalizes, deduplicates, and sorts the given traces.
    pub fn new(alphabet: Alphabet, traces: impl IntoIterator<Item = UpTrace>) -> Result<Self> {
        let max = alphabet.len();
        let mut canon: Vec<UpTrace> = Vec::new();
        for t in traces {
            for l in t.stem.iter().chain(t.cycle.iter()) {
                if max < MAX_PROPS && l.0 >> max != 0 {
                    return Err(Error::AlphabetMismatch(
                        "trace uses propositions outside the declared alphabet".to_string(),
                    ));
                }
            }
            canon.push(t.canonical());
        }
        canon.sort();
        canon.dedup();
        Ok(TraceSet {
            alphabet,
            traces: canon,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn traces(&self) -> &[UpTrace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, t: &UpTrace) -> bool {
        self.traces.binary_search(&t.canonical()).is_ok()
    }
}

/// `T' ⊆ T` on canonical forms.
pub fn subset_check(smaller: &TraceSet, larger: &TraceSet) -> bool {
    smaller.traces.iter().all(|t| larger.contains(t))
}

/// Deterministic stream of nonempty subsets of `t`, driven by `seed`.
pub fn random_subsets(t: &TraceSet, seed: u64) -> impl Iterator<Item = TraceSet> + '_ {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.len();
    std::iter::from_fn(move || {
        if n == 0 {
            return None;
        }
        let mask: u64 = rng.gen_range(1..(1u64 << n));
        let traces = t
            .traces
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect::<Vec<_>>();
        Some(TraceSet::new(t.alphabet.clone(), traces).expect("subset of a valid set"))
    })
}

/// Partial map from trace variables to traces, with a uniform suffix shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceAssignment {
    alphabet: Alphabet,
    bindings: BTreeMap<String, UpTrace>,
    shift: usize,
}

impl TraceAssignment {
    pub fn empty(alphabet: Alphabet) -> Self {
        TraceAssignment {
            alphabet,
            bindings: BTreeMap::new(),
            shift: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn bind(&self, var: impl Into<String>, trace: UpTrace) -> Self {
        let mut next = self.clone();
        next.bindings.insert(var.into(), trace);
        next
    }

    pub fn shifted(&self, j: usize) -> Self {
        let mut next = self.clone();
        next.shift += j;
        next
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(|k| k.as_str())
    }

    /// The bound trace with the assignment's shift applied (representation
    /// shape preserved, not canonicalized).
    pub fn trace(&self, var: &str) -> Option<UpTrace> {
        self.bindings.get(var).map(|t| t.suffix(self.shift))
    }
}

/// Evaluation knobs. The fold limit caps `S + P` of the joint lasso,
/// i.e. max stem length plus the lcm of the loop lengths.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub allow_empty: bool,
    pub fold_limit: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            allow_empty: false,
            fold_limit: 1 << 16,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Truth values of every quantifier-free subformula at every position of
/// the folded joint lasso `{0..S+P-1}` with successor `S+P-1 -> S`.
#[derive(Debug, Clone)]
pub struct ExpansionTable {
    subformulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    root: usize,
    stem_len: usize,
    period: usize,
    values: Vec<Vec<bool>>,
    traces: BTreeMap<String, UpTrace>,
    alphabet: Alphabet,
}

impl ExpansionTable {
    /// Folded position count `S + P`.
    pub fn positions(&self) -> usize {
        self.stem_len + self.period
    }

    pub fn stem_len(&self) -> usize {
        self.stem_len
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Successor in the folded index set.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem_len
        }
    }

    pub fn subformulas(&self) -> &[Formula] {
        &self.subformulas
    }

    /// Value of a (desugared) subformula at a folded position.
    pub fn value(&self, f: &Formula, pos: usize) -> Option<bool> {
        self.index.get(f).map(|&i| self.values[i][pos])
    }

    /// Entry `(body, 0)`: the evaluation of the whole quantifier-free body.
    pub fn root_value(&self) -> bool {
        self.values[self.root][0]
    }

    /// Verifies the five local consistency conditions pointwise.
    pub fn check_consistency(&self) -> bool {
        let n = self.positions();
        for (si, f) in self.subformulas.iter().enumerate() {
            for pos in 0..n {
                let got = self.values[si][pos];
                let want = match f {
                    Formula::True => true,
                    Formula::False => false,
                    Formula::Atom { prop, var } => {
                        let idx = match self.alphabet.index_of(prop) {
                            Some(i) => i,
                            None => return false,
                        };
                        self.traces[var].at(pos).contains(idx)
                    }
                    Formula::Not(a) => !self.values[self.index[a.as_ref()]][pos],
                    Formula::Or(a, b) => {
                        self.values[self.index[a.as_ref()]][pos]
                            || self.values[self.index[b.as_ref()]][pos]
                    }
                    Formula::Next(a) => self.values[self.index[a.as_ref()]][self.succ(pos)],
                    Formula::Until(a, b) => {
                        let (va, vb) = (
                            &self.values[self.index[a.as_ref()]],
                            &self.values[self.index[b.as_ref()]],
                        );
                        let mut j = pos;
                        let mut found = false;
                        for _ in 0..n {
                            if vb[j] {
                                found = true;
                                break;
                            }
                            if !va[j] {
                                break;
                            }
                            j = self.succ(j);
                        }
                        found
                    }
                    _ => return false, // non-core operator leaked through
                };
                if got != want {
                    return false;
                }
            }
        }
        true
    }
}

fn collect_core(
    f: &Formula,
    order: &mut Vec<Formula>,
    index: &mut HashMap<Formula, usize>,
) -> usize {
    if let Some(&i) = index.get(f) {
        return i;
    }
    for c in f.children() {
        collect_core(c, order, index);
    }
    let i = order.len();
    order.push(f.clone());
    index.insert(f.clone(), i);
    i
}

/// A quantifier-free body lowered to an indexed core-operator form, so
/// repeated evaluation does no formula hashing or cloning.
#[derive(Debug, Clone)]
enum CompiledNode {
    True,
    False,
    /// (alphabet bit, variable slot)
    Atom(usize, usize),
    Not(usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
}

#[derive(Debug, Clone)]
pub struct CompiledBody {
    vars: Vec<String>,
    nodes: Vec<CompiledNode>,
    subformulas: Vec<Formula>,
    root: usize,
}

impl CompiledBody {
    /// Lower a (sugared) quantifier-free body over the given alphabet.
    pub fn compile(body: &Formula, alphabet: &Alphabet) -> Result<Self> {
        if !body.is_quantifier_free() {
            return Err(Error::NotPrenex(
                "compiled bodies must be quantifier-free".to_string(),
            ));
        }
        let core = body.desugar();
        let mut order = Vec::new();
        let mut index = HashMap::new();
        let root = collect_core(&core, &mut order, &mut index);
        let vars: Vec<String> = core.free_variables().into_iter().collect();
        let slot = |v: &str| vars.iter().position(|w| w == v).unwrap();
        let mut nodes = Vec::with_capacity(order.len());
        for f in &order {
            nodes.push(match f {
                Formula::True => CompiledNode::True,
                Formula::False => CompiledNode::False,
                Formula::Atom { prop, var } => {
                    let bit = alphabet.index_of(prop).ok_or_else(|| {
                        Error::AlphabetMismatch(format!(
                            "formula proposition {prop:?} is not in the model alphabet"
                        ))
                    })?;
                    CompiledNode::Atom(bit, slot(var))
                }
                Formula::Not(a) => CompiledNode::Not(index[a.as_ref()]),
                Formula::Or(a, b) => CompiledNode::Or(index[a.as_ref()], index[b.as_ref()]),
                Formula::Next(a) => CompiledNode::Next(index[a.as_ref()]),
                Formula::Until(a, b) => CompiledNode::Until(index[a.as_ref()], index[b.as_ref()]),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "non-core operator {other:?} after desugaring"
                    )))
                }
            });
        }
        Ok(CompiledBody {
            vars,
            nodes,
            subformulas: order,
            root,
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Evaluates the body at position 0 of the folded joint lasso of the
    /// traces bound to the variable slots.
    pub fn eval(&self, traces: &[UpTrace], opts: &EvalOptions) -> Result<bool> {
        Ok(self.rows(traces, opts)?.1[self.root][0])
    }

    /// Folded evaluation: returns ((stem, period), per-node value rows).
    fn rows(
        &self,
        traces: &[UpTrace],
        opts: &EvalOptions,
    ) -> Result<((usize, usize), Vec<Vec<bool>>)> {
        assert_eq!(traces.len(), self.vars.len(), "one trace per variable slot");
        let stem_len = traces.iter().map(|t| t.stem_len()).max().unwrap_or(0);
        let mut period = 1usize;
        for t in traces {
            period = lcm(period, t.cycle_len());
            if stem_len + period > opts.fold_limit {
                return Err(Error::ResourceLimit(format!(
                    "folded lasso needs {} positions (limit {})",
                    stem_len + period,
                    opts.fold_limit
                )));
            }
        }
        let n = stem_len + period;
        let mut values: Vec<Vec<bool>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let row = match *node {
                CompiledNode::True => vec![true; n],
                CompiledNode::False => vec![false; n],
                CompiledNode::Atom(bit, slot) => {
                    let t = &traces[slot];
                    (0..n).map(|pos| t.at(pos).contains(bit)).collect()
                }
                CompiledNode::Not(a) => {
                    let va = &values[a];
                    (0..n).map(|pos| !va[pos]).collect()
                }
                CompiledNode::Or(a, b) => {
                    let (va, vb) = (&values[a], &values[b]);
                    (0..n).map(|pos| va[pos] || vb[pos]).collect()
                }
                CompiledNode::Next(a) => {
                    let va = &values[a];
                    (0..n)
                        .map(|pos| va[if pos + 1 < n { pos + 1 } else { stem_len }])
                        .collect()
                }
                CompiledNode::Until(a, b) => {
                    let (va, vb) = (&values[a], &values[b]);
                    let mut row = vec![false; n];
                    // least fixpoint: two descending passes around the
                    // loop, then once back through the stem
                    for _ in 0..2 {
                        for pos in (stem_len..n).rev() {
                            let nxt = if pos + 1 < n { pos + 1 } else { stem_len };
                            row[pos] = vb[pos] || (va[pos] && row[nxt]);
                        }
                    }
                    for pos in (0..stem_len).rev() {
                        row[pos] = vb[pos] || (va[pos] && row[pos + 1]);
                    }
                    row
                }
            };
            values.push(row);
        }
        Ok(((stem_len, period), values))
    }
}

/// Builds the expansion table of a quantifier-free body on an assignment.
///
/// The body is desugared to the core operators first. All free variables
/// must be bound in `assignment`. The table folds positions onto
/// `{0..S+P-1}` with `S` the maximal stem length and `P` the lcm of the
/// loop lengths over the bound traces; positions `>= S` are identified mod
/// `P`, which is exact because every bound trace is (stem, loop)-periodic
/// with stem `<= S` and loop dividing `P`.
pub fn expansion_table(
    body: &Formula,
    assignment: &TraceAssignment,
    opts: &EvalOptions,
) -> Result<ExpansionTable> {
    let compiled = CompiledBody::compile(body, assignment.alphabet())?;
    let mut traces_by_slot = Vec::with_capacity(compiled.vars.len());
    let mut traces = BTreeMap::new();
    for v in &compiled.vars {
        let t = assignment
            .trace(v)
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
        traces.insert(v.clone(), t.clone());
        traces_by_slot.push(t);
    }
    let ((stem_len, period), values) = compiled.rows(&traces_by_slot, opts)?;
    let index = compiled
        .subformulas
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect::<HashMap<_, _>>();
    Ok(ExpansionTable {
        subformulas: compiled.subformulas,
        index,
        root: compiled.root,
        stem_len,
        period,
        values,
        traces,
        alphabet: assignment.alphabet().clone(),
    })
}

/// A prenex sentence lowered for repeated evaluation over trace sets
/// sharing one alphabet.
#[derive(Debug, Clone)]
pub struct CompiledSentence {
    prefix: Vec<bool>,
    slot_binder: Vec<usize>,
    body: CompiledBody,
}

impl CompiledSentence {
    pub fn compile(sentence: &Formula, alphabet: &Alphabet) -> Result<Self> {
        if !sentence.is_prenex() {
            return Err(Error::NotPrenex(
                "compilation needs a prenex sentence".to_string(),
            ));
        }
        if !sentence.is_sentence() {
            return Err(Error::UnboundVariable(
                sentence
                    .free_variables()
                    .into_iter()
                    .collect::<Vec<_>>()
                    .join(", "),
            ));
        }
        let (prefix, body) = sentence.strip_prefix();
        let body = CompiledBody::compile(body, alphabet)?;
        let slot_binder = body
            .vars()
            .iter()
            .map(|v| {
                prefix
                    .iter()
                    .rposition(|(_, w)| w == v)
                    .expect("sentence check guarantees a binder")
            })
            .collect();
        Ok(CompiledSentence {
            prefix: prefix.into_iter().map(|(e, _)| e).collect(),
            slot_binder,
            body,
        })
    }

    /// Evaluates over the given traces as the quantification domain.
    pub fn eval_on(&self, traces: &[UpTrace], opts: &EvalOptions) -> Result<bool> {
        fn go(
            cs: &CompiledSentence,
            traces: &[UpTrace],
            depth: usize,
            slots: &mut Vec<Option<UpTrace>>,
            opts: &EvalOptions,
        ) -> Result<bool> {
            match cs.prefix.get(depth) {
                None => {
                    let bound: Vec<UpTrace> = slots
                        .iter()
                        .map(|t| t.clone().expect("all slots bound"))
                        .collect();
                    cs.body.eval(&bound, opts)
                }
                Some(&existential) => {
                    for t in traces {
                        for (s, &b) in cs.slot_binder.iter().enumerate() {
                            if b == depth {
                                slots[s] = Some(t.clone());
                            }
                        }
                        let v = go(cs, traces, depth + 1, slots, opts)?;
                        if v == existential {
                            return Ok(existential);
                        }
                    }
                    Ok(!existential)
                }
            }
        }
        let mut slots = vec![None; self.body.vars().len()];
        go(self, traces, 0, &mut slots, opts)
    }

    pub fn quantifier_count(&self) -> usize {
        self.prefix.len()
    }
}

/// Exact HyperLTL satisfaction of a prenex sentence on a finite trace set.
///
/// Quantifiers enumerate the traces of `model`; the quantifier-free body
/// is evaluated on the folded joint lasso of each full assignment.
pub fn eval_hyperltl_opts(
    model: &TraceSet,
    sentence: &Formula,
    opts: &EvalOptions,
) -> Result<bool> {
    if model.is_empty() && !opts.allow_empty {
        return Err(Error::EmptyModel);
    }
    if !sentence.is_prenex() {
        return Err(Error::NotPrenex(
            "HyperLTL evaluation needs a prenex sentence".to_string(),
        ));
    }
    if !sentence.is_sentence() {
        return Err(Error::UnboundVariable(
            sentence
                .free_variables()
                .into_iter()
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }
    for p in sentence.propositions() {
        if model.alphabet().index_of(&p).is_none() {
            return Err(Error::AlphabetMismatch(format!(
                "formula proposition {p:?} is not in the model alphabet"
            )));
        }
    }
    CompiledSentence::compile(sentence, model.alphabet())?.eval_on(model.traces(), opts)
}

/// [`eval_hyperltl_opts`] with default options.
pub fn eval_hyperltl(model: &TraceSet, sentence: &Formula) -> Result<bool> {
    eval_hyperltl_opts(model, sentence, &EvalOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Dialect};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn tr(alpha: &Alphabet, stem: &[&[&str]], cycle: &[&[&str]]) -> UpTrace {
        let stem = stem.iter().map(|ls| alpha.labels(ls).unwrap()).collect();
        let cycle = cycle.iter().map(|ls| alpha.labels(ls).unwrap()).collect();
        UpTrace::new(stem, cycle).unwrap()
    }

    fn set(traces: Vec<UpTrace>) -> TraceSet {
        TraceSet::new(ab(), traces).unwrap()
    }

    fn ltl(s: &str) -> Formula {
        parse_formula(s, Dialect::HyperLtl).unwrap()
    }

    #[test]
    fn canonical_minimizes() {
        let a = ab();
        // a (b a)^w == (a b)^w
        let t = tr(&a, &[&["a"]], &[&["b"], &["a"]]);
        let c = t.canonical();
        assert_eq!(c, tr(&a, &[], &[&["a"], &["b"]]));
        // pumped loop reduces
        let t = tr(&a, &[], &[&["a"], &["b"], &["a"], &["b"]]);
        assert_eq!(t.canonical(), tr(&a, &[], &[&["a"], &["b"]]));
        // rotation-equal lassos compare equal after canonicalization
        let u = tr(&a, &[&["a"], &["b"]], &[&["a"], &["b"]]);
        assert!(u.equivalent(&tr(&a, &[], &[&["a"], &["b"]])));
    }

    #[test]
    fn position_access_and_suffix() {
        let a = ab();
        let t = tr(&a, &[&["a"], &[]], &[&["b"], &[]]);
        let names: Vec<Vec<&str>> = (0..6).map(|n| a.names(t.at(n))).collect();
        assert_eq!(
            names,
            vec![vec!["a"], vec![], vec!["b"], vec![], vec!["b"], vec![]]
        );
        let s = t.suffix(3);
        assert_eq!(a.names(s.at(0)), Vec::<&str>::new());
        assert_eq!(a.names(s.at(1)), vec!["b"]);
    }

    #[test]
    fn eval_trivial_models() {
        let a = ab();
        let always_a = set(vec![tr(&a, &[], &[&["a"]])]);
        assert!(eval_hyperltl(&always_a, &ltl("forall p. G a[p]")).unwrap());

        let never = set(vec![tr(&a, &[], &[&[]])]);
        assert!(!eval_hyperltl(&never, &ltl("forall p. F a[p]")).unwrap());
    }

    #[test]
    fn eval_two_trace_example() {
        let a = ab();
        // t1 = {a} {}^w, t2 = {} {a} {}^w
        let t1 = tr(&a, &[&["a"]], &[&[]]);
        let t2 = tr(&a, &[&[], &["a"]], &[&[]]);
        let m = set(vec![t1, t2]);
        let f = ltl("exists p. exists q. F (a[p] & X a[q])");
        assert!(eval_hyperltl(&m, &f).unwrap());
        let g = ltl("exists p. exists q. F (a[q] & X a[p] & X X a[q])");
        assert!(!eval_hyperltl(&m, &g).unwrap());
    }

    #[test]
    fn empty_model_rejected_by_default() {
        let m = TraceSet::new(ab(), Vec::new()).unwrap();
        let f = ltl("exists p. a[p]");
        assert!(matches!(eval_hyperltl(&m, &f), Err(Error::EmptyModel)));
        let opts = EvalOptions {
            allow_empty: true,
            ..Default::default()
        };
        assert!(!eval_hyperltl_opts(&m, &f, &opts).unwrap());
        assert!(eval_hyperltl_opts(&m, &ltl("forall p. a[p]"), &opts).unwrap());
    }

    #[test]
    fn expansion_rows() {
        let a = ab();
        let opts = EvalOptions::default();

        // body a[p] on {a} {}^w: true at 0, false later
        let pi = TraceAssignment::empty(a.clone()).bind("p", tr(&a, &[&["a"]], &[&[]]));
        let t = expansion_table(&ltl("a[p]"), &pi, &opts).unwrap();
        assert!(t.root_value());
        assert_eq!(t.positions(), 2);
        assert_eq!(t.value(&Formula::atom("a", "p"), 1), Some(false));

        // body G a[p] on {a}^w: all positions true
        let pi = TraceAssignment::empty(a.clone()).bind("p", tr(&a, &[], &[&["a"]]));
        let t = expansion_table(&ltl("G a[p]"), &pi, &opts).unwrap();
        let g = ltl("G a[p]").desugar();
        for pos in 0..t.positions() {
            assert_eq!(t.value(&g, pos), Some(true));
        }

        // body a[p] U b[p] on {a}{a}{b}{}^w: true at 0,1,2, false after
        let pi =
            TraceAssignment::empty(a.clone()).bind("p", tr(&a, &[&["a"], &["a"], &["b"]], &[&[]]));
        let t = expansion_table(&ltl("a[p] U b[p]"), &pi, &opts).unwrap();
        let u = ltl("a[p] U b[p]").desugar();
        let vals: Vec<bool> = (0..t.positions())
            .map(|i| t.value(&u, i).unwrap())
            .collect();
        assert_eq!(vals, vec![true, true, true, false]);
        assert!(t.check_consistency());
    }

    #[test]
    fn expansion_suffix_law() {
        let a = ab();
        let pi = TraceAssignment::empty(a.clone())
            .bind("p", tr(&a, &[&["a"], &[]], &[&["b"], &["a"]]))
            .bind("q", tr(&a, &[], &[&["a"], &[], &[]]));
        let body = ltl("X (a[p] U b[q])");
        let t = expansion_table(&body, &pi, &EvalOptions::default()).unwrap();
        let inner = ltl("a[p] U b[q]").desugar();
        let whole = body.desugar();
        for i in 0..t.positions() {
            assert_eq!(t.value(&whole, i), t.value(&inner, t.succ(i)));
        }
        assert!(t.check_consistency());
    }

    #[test]
    fn unbound_variable_reported() {
        let a = ab();
        let pi = TraceAssignment::empty(a);
        assert!(matches!(
            expansion_table(&ltl("a[p]"), &pi, &EvalOptions::default()),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn folding_invariant_under_representation() {
        let a = ab();
        let canon = tr(&a, &[&["a"]], &[&["b"], &[]]);
        // pumped loop and rotated-with-longer-stem variants of the same trace
        let pumped = tr(&a, &[&["a"]], &[&["b"], &[], &["b"], &[]]);
        let rotated = tr(&a, &[&["a"], &["b"]], &[&[], &["b"]]);
        assert!(canon.equivalent(&pumped));
        assert!(canon.equivalent(&rotated));
        for f in [
            "G (a[p] | b[p] | !a[p])",
            "F b[p]",
            "a[p] U b[p]",
            "X X b[p]",
            "G F b[p]",
        ] {
            let body = parse_formula_body(f);
            let base = eval_body(&a, &canon, &body);
            assert_eq!(base, eval_body(&a, &pumped, &body), "{f}");
            assert_eq!(base, eval_body(&a, &rotated, &body), "{f}");
        }
    }

    fn parse_formula_body(s: &str) -> Formula {
        crate::syntax::parse_formula_any(s).unwrap()
    }

    fn eval_body(a: &Alphabet, t: &UpTrace, body: &Formula) -> bool {
        let pi = TraceAssignment::empty(a.clone()).bind("p", t.clone());
        expansion_table(body, &pi, &EvalOptions::default())
            .unwrap()
            .root_value()
    }

    #[test]
    fn subset_and_random_subsets() {
        let a = ab();
        let t1 = tr(&a, &[], &[&["a"]]);
        let t2 = tr(&a, &[], &[&["b"]]);
        let all = set(vec![t1.clone(), t2.clone()]);
        let just1 = set(vec![t1.clone()]);
        assert!(subset_check(&all, &all));
        assert!(subset_check(&just1, &all));
        assert!(!subset_check(&all, &just1));

        let subs: Vec<TraceSet> = random_subsets(&all, 7).take(20).collect();
        assert!(subs.iter().all(|s| !s.is_empty() && subset_check(s, &all)));
        let again: Vec<TraceSet> = random_subsets(&all, 7).take(20).collect();
        assert_eq!(subs, again);
    }

    #[test]
    fn downward_closure_smoke() {
        let a = ab();
        let m = set(vec![
            tr(&a, &[], &[&["a"]]),
            tr(&a, &[&["a"], &["a"]], &[&["a"], &["b"]]),
            tr(&a, &[&["a"]], &[&["a"]]),
        ]);
        let f = ltl("forall p. forall q. F a[p] & F a[q]");
        assert!(eval_hyperltl(&m, &f).unwrap());
        for sub in random_subsets(&m, 3).take(25) {
            assert!(eval_hyperltl(&sub, &f).unwrap());
        }
    }
}
