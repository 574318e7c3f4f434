//! Shared abstract syntax for HyperLTL (prenex) and HyperCTL* (free
//! quantification), with well-formedness checks, derived-operator
//! desugaring, temporal depth, quantifier-prefix classification, and
//! polarity analysis.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// Formula over atomic propositions indexed by trace/path variables.
///
/// `And`, `Implies`, `Iff`, `Eventually`, and `Globally` are first-class
/// nodes with a canonical desugaring pass; `True`/`False` exist so that
/// empty disjunctions and conjunctions have a printable normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// `a_pi`: proposition `a` holds at the current position of variable `pi`.
    Atom {
        prop: String,
        var: String,
    },
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

/// Which block a prenex prefix starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefixKind {
    Sigma,
    Pi,
}

impl fmt::Display for PrefixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrefixKind::Sigma => write!(f, "Sigma"),
            PrefixKind::Pi => write!(f, "Pi"),
        }
    }
}

/// Minimal alternation class of a prenex sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrenexClass {
    pub kind: PrefixKind,
    pub level: usize,
}

impl fmt::Display for PrenexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.level)
    }
}

/// One quantifier occurrence, in syntactic (pre-order) position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifierOccurrence {
    pub var: String,
    pub existential: bool,
    /// Number of enclosing negations mod 2 (after `->`/`<->` elimination).
    pub polarity: u8,
}

impl QuantifierOccurrence {
    /// An existential quantifier with polarity 0 or a universal one with
    /// polarity 1 occurs existentially; the other two cases occur
    /// universally.
    pub fn occurs_existentially(&self) -> bool {
        self.existential == (self.polarity == 0)
    }
}

/// Result of [`polarity_analysis`]: the Skolem signature (k, l) plus the
/// per-quantifier polarity bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityReport {
    pub occurrences: Vec<QuantifierOccurrence>,
}

impl PolarityReport {
    /// Count of existentially occurring quantifiers.
    pub fn existential_count(&self) -> usize {
        self.occurrences
            .iter()
            .filter(|o| o.occurs_existentially())
            .count()
    }

    /// Count of universally occurring quantifiers.
    pub fn universal_count(&self) -> usize {
        self.occurrences.len() - self.existential_count()
    }
}

impl Formula {
    pub fn atom(prop: impl Into<String>, var: impl Into<String>) -> Self {
        Formula::Atom {
            prop: prop.into(),
            var: var.into(),
        }
    }

    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(inner: Formula) -> Self {
        Formula::Next(Box::new(inner))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(inner: Formula) -> Self {
        Formula::Eventually(Box::new(inner))
    }

    pub fn globally(inner: Formula) -> Self {
        Formula::Globally(Box::new(inner))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    /// Conjunction of a list; empty list is `true`, singleton is the element.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => {
                let mut out = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    out = Formula::and(p, out);
                }
                out
            }
        }
    }

    /// Disjunction of a list; empty list is `false`, singleton is the element.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => {
                let mut out = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    out = Formula::or(p, out);
                }
                out
            }
        }
    }

    /// Splits a right-associated conjunction chain into its top-level parts.
    pub fn top_conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Formula::And(a, b) = cur {
            out.push(a.as_ref());
            cur = b.as_ref();
        }
        out.push(cur);
        out
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => vec![],
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(a)
            | Formula::Globally(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a) => vec![a],
            Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b) => vec![a, b],
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            _ => self.children().iter().all(|c| c.is_quantifier_free()),
        }
    }

    fn free_variables_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { var, .. } => {
                if !bound.iter().any(|b| b == var) {
                    out.insert(var.clone());
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.free_variables_into(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.free_variables_into(bound, out);
                }
            }
        }
    }

    /// Free trace/path variables, in sorted order.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_variables_into(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// All proposition names mentioned, sorted.
    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            if let Formula::Atom { prop, .. } = f {
                out.insert(prop.clone());
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// True when all quantifiers form an outermost prefix over a
    /// quantifier-free body (the HyperLTL discipline).
    pub fn is_prenex(&self) -> bool {
        let mut cur = self;
        while let Formula::Exists(_, body) | Formula::Forall(_, body) = cur {
            cur = body;
        }
        cur.is_quantifier_free()
    }

    /// True when every temporal operator sits under some quantifier
    /// (the HyperCTL* discipline).
    pub fn is_ctlstar_wellformed(&self) -> bool {
        fn walk(f: &Formula, under_quant: bool) -> bool {
            match f {
                Formula::Next(_)
                | Formula::Until(..)
                | Formula::Eventually(_)
                | Formula::Globally(_) => {
                    under_quant && f.children().iter().all(|c| walk(c, under_quant))
                }
                Formula::Exists(_, body) | Formula::Forall(_, body) => walk(body, true),
                _ => f.children().iter().all(|c| walk(c, under_quant)),
            }
        }
        walk(self, false)
    }

    /// Splits a prenex formula into its quantifier prefix and body.
    pub fn strip_prefix(&self) -> (Vec<(bool, &str)>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Exists(v, body) => {
                    prefix.push((true, v.as_str()));
                    cur = body;
                }
                Formula::Forall(v, body) => {
                    prefix.push((false, v.as_str()));
                    cur = body;
                }
                _ => return (prefix, cur),
            }
        }
    }

    /// Rewrites derived operators to the core grammar
    /// (atoms, `!`, `|`, `X`, `U`, plus the `true`/`false` constants):
    /// `a & b = !(!a | !b)`, `a -> b = !a | b`,
    /// `a <-> b = (a -> b) & (b -> a)`, `F a = !a U a`, `G a = !F!a`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::And(a, b) => Formula::not(Formula::or(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Formula::Iff(a, b) => Formula::and(
                Formula::implies(*a.clone(), *b.clone()),
                Formula::implies(*b.clone(), *a.clone()),
            )
            .desugar(),
            Formula::Next(a) => Formula::next(a.desugar()),
            Formula::Until(a, b) => Formula::until(a.desugar(), b.desugar()),
            Formula::Eventually(a) => {
                let a = a.desugar();
                Formula::until(Formula::not(a.clone()), a)
            }
            Formula::Globally(a) => {
                // G a = !F!a = !(!!a U !a)
                let na = Formula::not(a.desugar());
                Formula::not(Formula::until(Formula::not(na.clone()), na))
            }
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.desugar()),
            Formula::Forall(v, body) => Formula::forall(v.clone(), body.desugar()),
        }
    }

    /// Swaps quantifiers and negates the body of a prenex formula.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Exists(v, body) => Formula::forall(v.clone(), body.dual()),
            Formula::Forall(v, body) => Formula::exists(v.clone(), body.dual()),
            other => Formula::not(other.clone()),
        }
    }

    /// Nesting depth over quantifiers, connectives, and temporal
    /// operators; bounds the plays of the model-checking game.
    pub fn nesting_depth(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.nesting_depth())
            .max()
            .unwrap_or(0)
    }
}

/// Temporal depth: `X` and `U` add one level, Boolean connectives take the
/// max of their operands, quantifiers are transparent. Sugar is accounted
/// for by its expansion, so `F` and `G` also add one level.
pub fn temporal_depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } => 0,
        Formula::Not(a) => temporal_depth(a),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
            temporal_depth(a).max(temporal_depth(b))
        }
        Formula::Iff(a, b) => temporal_depth(a).max(temporal_depth(b)),
        Formula::Next(a) | Formula::Eventually(a) | Formula::Globally(a) => 1 + temporal_depth(a),
        Formula::Until(a, b) => 1 + temporal_depth(a).max(temporal_depth(b)),
        Formula::Exists(_, body) | Formula::Forall(_, body) => temporal_depth(body),
    }
}

/// Classifies a prenex sentence into its minimal alternation class.
///
/// The leading block fixes the kind, the number of maximal blocks the
/// level; empty blocks are allowed, so a quantifier-free sentence sits at
/// level 1 (reported as Sigma by convention).
pub fn classify_prenex(f: &Formula) -> Result<PrenexClass> {
    if !f.is_prenex() {
        return Err(Error::NotPrenex(
            "a quantifier occurs below a temporal or Boolean operator".to_string(),
        ));
    }
    let (prefix, _) = f.strip_prefix();
    let mut blocks: Vec<bool> = Vec::new();
    for (existential, _) in prefix {
        if blocks.last() != Some(&existential) {
            blocks.push(existential);
        }
    }
    if blocks.is_empty() {
        return Ok(PrenexClass {
            kind: PrefixKind::Sigma,
            level: 1,
        });
    }
    let kind = if blocks[0] {
        PrefixKind::Sigma
    } else {
        PrefixKind::Pi
    };
    Ok(PrenexClass {
        kind,
        level: blocks.len(),
    })
}

/// Polarity analysis over either dialect. `->` and `<->` are eliminated in
/// favour of `!`/`|`/`&` first; temporal operators and `&`/`|` are
/// positive contexts, only `!` flips.
pub fn polarity_analysis(f: &Formula) -> PolarityReport {
    fn eliminate(f: &Formula) -> Formula {
        match f {
            Formula::Implies(a, b) => Formula::or(Formula::not(eliminate(a)), eliminate(b)),
            Formula::Iff(a, b) => {
                let (a, b) = (eliminate(a), eliminate(b));
                Formula::and(
                    Formula::or(Formula::not(a.clone()), b.clone()),
                    Formula::or(Formula::not(b), a),
                )
            }
            Formula::True | Formula::False | Formula::Atom { .. } => f.clone(),
            Formula::Not(a) => Formula::not(eliminate(a)),
            Formula::Or(a, b) => Formula::or(eliminate(a), eliminate(b)),
            Formula::And(a, b) => Formula::and(eliminate(a), eliminate(b)),
            Formula::Next(a) => Formula::next(eliminate(a)),
            Formula::Until(a, b) => Formula::until(eliminate(a), eliminate(b)),
            Formula::Eventually(a) => Formula::eventually(eliminate(a)),
            Formula::Globally(a) => Formula::globally(eliminate(a)),
            Formula::Exists(v, body) => Formula::exists(v.clone(), eliminate(body)),
            Formula::Forall(v, body) => Formula::forall(v.clone(), eliminate(body)),
        }
    }

    fn walk(f: &Formula, negations: u8, out: &mut Vec<QuantifierOccurrence>) {
        match f {
            Formula::Not(a) => walk(a, negations ^ 1, out),
            Formula::Exists(v, body) => {
                out.push(QuantifierOccurrence {
                    var: v.clone(),
                    existential: true,
                    polarity: negations,
                });
                walk(body, negations, out);
            }
            Formula::Forall(v, body) => {
                out.push(QuantifierOccurrence {
                    var: v.clone(),
                    existential: false,
                    polarity: negations,
                });
                walk(body, negations, out);
            }
            _ => {
                for c in f.children() {
                    walk(c, negations, out);
                }
            }
        }
    }

    let mut occurrences = Vec::new();
    walk(&eliminate(f), 0, &mut occurrences);
    PolarityReport { occurrences }
}

/// A quantifier prefix under construction: (existential?, variable) pairs.
type Prefix = Vec<(bool, String)>;

/// Merges two prefixes, preserving the relative order within each, while
/// minimising the number of alternation blocks of the result. Ties are
/// broken by drawing from the left prefix first.
fn merge_prefixes(left: &[(bool, String)], right: &[(bool, String)]) -> Prefix {
    // DP over (i, j, kind of last drawn quantifier).
    let (n, m) = (left.len(), right.len());
    let idx = |i: usize, j: usize, last: usize| (i * (m + 1) + j) * 3 + last;
    // last: 0 = none yet, 1 = existential, 2 = universal
    let mut cost = vec![usize::MAX; (n + 1) * (m + 1) * 3];
    // choice: 0 = take left, 1 = take right, usize::MAX = done
    let mut choice = vec![usize::MAX; (n + 1) * (m + 1) * 3];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            for last in 0..3 {
                if i == n && j == m {
                    cost[idx(i, j, last)] = 0;
                    continue;
                }
                let mut best = usize::MAX;
                let mut best_choice = usize::MAX;
                let consider = |which: usize,
                                existential: bool,
                                ni: usize,
                                nj: usize,
                                cost: &[usize],
                                best: &mut usize,
                                best_choice: &mut usize| {
                    let newlast = if existential { 1 } else { 2 };
                    let step = if last == newlast { 0 } else { 1 };
                    let c = cost[idx(ni, nj, newlast)];
                    if c != usize::MAX && step + c < *best {
                        *best = step + c;
                        *best_choice = which;
                    }
                };
                if i < n {
                    consider(0, left[i].0, i + 1, j, &cost, &mut best, &mut best_choice);
                }
                if j < m {
                    consider(1, right[j].0, i, j + 1, &cost, &mut best, &mut best_choice);
                }
                cost[idx(i, j, last)] = best;
                choice[idx(i, j, last)] = best_choice;
            }
        }
    }
    let mut out = Vec::with_capacity(n + m);
    let (mut i, mut j, mut last) = (0, 0, 0);
    while i < n || j < m {
        match choice[idx(i, j, last)] {
            0 => {
                last = if left[i].0 { 1 } else { 2 };
                out.push(left[i].clone());
                i += 1;
            }
            1 => {
                last = if right[j].0 { 1 } else { 2 };
                out.push(right[j].clone());
                j += 1;
            }
            _ => unreachable!(),
        }
    }
    out
}

struct Renamer {
    counter: usize,
    used: BTreeSet<String>,
}

impl Renamer {
    fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{}_{}", base, self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn substitute_var(f: &Formula, from: &str, to: &str) -> Formula {
    match f {
        Formula::Atom { prop, var } if var == from => Formula::atom(prop.clone(), to),
        Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => f.clone(),
        Formula::Exists(v, body) => Formula::exists(v.clone(), substitute_var(body, from, to)),
        Formula::Forall(v, body) => Formula::forall(v.clone(), substitute_var(body, from, to)),
        Formula::True | Formula::False | Formula::Atom { .. } => f.clone(),
        Formula::Not(a) => Formula::not(substitute_var(a, from, to)),
        Formula::Or(a, b) => Formula::or(substitute_var(a, from, to), substitute_var(b, from, to)),
        Formula::And(a, b) => {
            Formula::and(substitute_var(a, from, to), substitute_var(b, from, to))
        }
        Formula::Implies(a, b) => {
            Formula::implies(substitute_var(a, from, to), substitute_var(b, from, to))
        }
        Formula::Iff(a, b) => {
            Formula::iff(substitute_var(a, from, to), substitute_var(b, from, to))
        }
        Formula::Next(a) => Formula::next(substitute_var(a, from, to)),
        Formula::Until(a, b) => {
            Formula::until(substitute_var(a, from, to), substitute_var(b, from, to))
        }
        Formula::Eventually(a) => Formula::eventually(substitute_var(a, from, to)),
        Formula::Globally(a) => Formula::globally(substitute_var(a, from, to)),
    }
}

fn all_variables(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { var, .. } => {
            out.insert(var.clone());
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            out.insert(v.clone());
            all_variables(body, out);
        }
        _ => {
            for c in f.children() {
                all_variables(c, out);
            }
        }
    }
}

fn prenex_rec(f: &Formula, negate: bool, ren: &mut Renamer) -> Result<(Prefix, Formula)> {
    // once no quantifiers remain below, keep the subtree verbatim (wrapped
    // in a single negation if one is pending) instead of pushing negations
    // inward
    if f.is_quantifier_free() {
        let body = if negate {
            Formula::not(f.clone())
        } else {
            f.clone()
        };
        return Ok((Vec::new(), body));
    }
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } => {
            let body = if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            };
            Ok((Vec::new(), body))
        }
        Formula::Not(a) => prenex_rec(a, !negate, ren),
        Formula::Or(a, b) | Formula::And(a, b) => {
            let (pa, ba) = prenex_rec(a, negate, ren)?;
            let (pb, bb) = prenex_rec(b, negate, ren)?;
            // De Morgan under negation: !(a | b) = !a & !b and dually.
            let conjunctive = matches!(f, Formula::And(..)) != negate;
            let body = if conjunctive {
                Formula::and(ba, bb)
            } else {
                Formula::or(ba, bb)
            };
            Ok((merge_prefixes(&pa, &pb), body))
        }
        Formula::Implies(a, b) => {
            let (pa, ba) = prenex_rec(a, !negate, ren)?;
            let (pb, bb) = prenex_rec(b, negate, ren)?;
            // !(a -> b) = a & !b; a -> b = !a | b. Either way the
            // sub-results already carry the right negations.
            let body = if negate {
                Formula::and(ba, bb)
            } else {
                Formula::or(ba, bb)
            };
            Ok((merge_prefixes(&pa, &pb), body))
        }
        Formula::Iff(a, b) => {
            // Only split the equivalence when extraction requires it.
            if a.is_quantifier_free() && b.is_quantifier_free() {
                let body = Formula::iff(*a.clone(), *b.clone());
                let body = if negate { Formula::not(body) } else { body };
                Ok((Vec::new(), body))
            } else {
                let expanded = Formula::and(
                    Formula::implies(*a.clone(), *b.clone()),
                    Formula::implies(*b.clone(), *a.clone()),
                );
                prenex_rec(&expanded, negate, ren)
            }
        }
        Formula::Next(a) | Formula::Eventually(a) | Formula::Globally(a) => {
            if !a.is_quantifier_free() {
                return Err(Error::QuantifierUnderTemporal(
                    "cannot extract a quantifier through X/F/G".to_string(),
                ));
            }
            let body = if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            };
            Ok((Vec::new(), body))
        }
        Formula::Until(a, b) => {
            if !a.is_quantifier_free() || !b.is_quantifier_free() {
                return Err(Error::QuantifierUnderTemporal(
                    "cannot extract a quantifier through U".to_string(),
                ));
            }
            let body = if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            };
            Ok((Vec::new(), body))
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let existential = matches!(f, Formula::Exists(..)) != negate;
            let fresh = ren.fresh(v);
            let renamed = substitute_var(body, v, &fresh);
            let (mut prefix, inner) = prenex_rec(&renamed, negate, ren)?;
            prefix.insert(0, (existential, fresh));
            Ok((prefix, inner))
        }
    }
}

/// Transforms a formula with quantifiers under Boolean connectives into an
/// equivalent prenex formula.
///
/// Bound variables are renamed apart with suffix counters, every quantifier
/// is extracted, and prefixes of sibling subformulas are interleaved so the
/// resulting alternation count is minimal over interleavings (preferring
/// the left operand on ties). Quantifiers below temporal operators cannot
/// be extracted soundly and raise [`Error::QuantifierUnderTemporal`].
pub fn prenex(f: &Formula) -> Result<Formula> {
    let mut used = BTreeSet::new();
    all_variables(f, &mut used);
    let mut ren = Renamer { counter: 0, used };
    let (prefix, body) = prenex_rec(f, false, &mut ren)?;
    let mut out = body;
    for (existential, var) in prefix.into_iter().rev() {
        out = if existential {
            Formula::exists(var, out)
        } else {
            Formula::forall(var, out)
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input_determinism() -> Formula {
        // forall p. forall q. (G (i[p] <-> i[q])) -> (G (o[p] <-> o[q]))
        Formula::forall(
            "p",
            Formula::forall(
                "q",
                Formula::implies(
                    Formula::globally(Formula::iff(
                        Formula::atom("i", "p"),
                        Formula::atom("i", "q"),
                    )),
                    Formula::globally(Formula::iff(
                        Formula::atom("o", "p"),
                        Formula::atom("o", "q"),
                    )),
                ),
            ),
        )
    }

    #[test]
    fn classify_examples() {
        let c = classify_prenex(&input_determinism()).unwrap();
        assert_eq!(
            c,
            PrenexClass {
                kind: PrefixKind::Pi,
                level: 1
            }
        );

        let c = classify_prenex(&Formula::exists("p", Formula::atom("a", "p"))).unwrap();
        assert_eq!(
            c,
            PrenexClass {
                kind: PrefixKind::Sigma,
                level: 1
            }
        );

        // forall p1. exists p2. F (x[p1] & X x[p2])
        let f = Formula::forall(
            "p1",
            Formula::exists(
                "p2",
                Formula::eventually(Formula::and(
                    Formula::atom("x", "p1"),
                    Formula::next(Formula::atom("x", "p2")),
                )),
            ),
        );
        assert_eq!(
            classify_prenex(&f).unwrap(),
            PrenexClass {
                kind: PrefixKind::Pi,
                level: 2
            }
        );
    }

    #[test]
    fn classify_rejects_non_prenex() {
        let f = Formula::globally(Formula::exists("p", Formula::atom("a", "p")));
        assert!(matches!(classify_prenex(&f), Err(Error::NotPrenex(_))));
    }

    #[test]
    fn classify_empty_blocks() {
        // exists p. exists q. forall r: two blocks regardless of block sizes
        let f = Formula::exists(
            "p",
            Formula::exists("q", Formula::forall("r", Formula::atom("a", "r"))),
        );
        assert_eq!(
            classify_prenex(&f).unwrap(),
            PrenexClass {
                kind: PrefixKind::Sigma,
                level: 2
            }
        );
        // quantifier-free sentences match Sigma_1 with an empty block
        assert_eq!(
            classify_prenex(&Formula::True).unwrap(),
            PrenexClass {
                kind: PrefixKind::Sigma,
                level: 1
            }
        );
    }

    #[test]
    fn depth_examples() {
        assert_eq!(temporal_depth(&Formula::atom("a", "p")), 0);
        assert_eq!(
            temporal_depth(&Formula::next(Formula::next(Formula::atom("a", "p")))),
            2
        );
        // F(o[x] & F o[y]) has depth 2
        let f = Formula::eventually(Formula::and(
            Formula::atom("o", "x"),
            Formula::eventually(Formula::atom("o", "y")),
        ));
        assert_eq!(temporal_depth(&f), 2);
    }

    #[test]
    fn depth_commutes_with_desugar() {
        let f = Formula::globally(Formula::implies(
            Formula::atom("a", "p"),
            Formula::eventually(Formula::atom("b", "p")),
        ));
        assert_eq!(temporal_depth(&f), temporal_depth(&f.desugar()));
    }

    #[test]
    fn polarity_examples() {
        let r = polarity_analysis(&Formula::exists("p", Formula::atom("a", "p")));
        assert_eq!((r.existential_count(), r.universal_count()), (1, 0));

        let r = polarity_analysis(&Formula::not(Formula::exists("p", Formula::atom("a", "p"))));
        assert_eq!((r.existential_count(), r.universal_count()), (0, 1));

        // forall p1. G exists p2. psi  =>  k = 1, l = 1
        let f = Formula::forall(
            "p1",
            Formula::globally(Formula::exists(
                "p2",
                Formula::and(Formula::atom("a", "p1"), Formula::atom("a", "p2")),
            )),
        );
        let r = polarity_analysis(&f);
        assert_eq!((r.existential_count(), r.universal_count()), (1, 1));
        assert_eq!(r.occurrences.len(), 2);
    }

    #[test]
    fn polarity_outer_negation_swaps_counts() {
        let f = Formula::forall(
            "p",
            Formula::implies(
                Formula::atom("a", "p"),
                Formula::exists("q", Formula::atom("b", "q")),
            ),
        );
        let r = polarity_analysis(&f);
        let rn = polarity_analysis(&Formula::not(f));
        assert_eq!(r.existential_count(), rn.universal_count());
        assert_eq!(r.universal_count(), rn.existential_count());
    }

    #[test]
    fn prenex_independent_conjuncts() {
        // (exists p. a[p]) & (forall q. b[q])  =>  exists p. forall q. (a[p] & b[q])
        let f = Formula::and(
            Formula::exists("p", Formula::atom("a", "p")),
            Formula::forall("q", Formula::atom("b", "q")),
        );
        let p = prenex(&f).unwrap();
        let (prefix, body) = p.strip_prefix();
        assert_eq!(
            prefix.iter().map(|(e, _)| *e).collect::<Vec<_>>(),
            vec![true, false]
        );
        assert!(matches!(body, Formula::And(..)));
        assert!(p.is_prenex());
    }

    #[test]
    fn prenex_negation_duality() {
        // forall p. !exists q. psi  =>  forall p. forall q. !psi
        let f = Formula::forall(
            "p",
            Formula::not(Formula::exists(
                "q",
                Formula::and(Formula::atom("a", "p"), Formula::atom("b", "q")),
            )),
        );
        let p = prenex(&f).unwrap();
        let (prefix, body) = p.strip_prefix();
        assert_eq!(
            prefix.iter().map(|(e, _)| *e).collect::<Vec<_>>(),
            vec![false, false]
        );
        assert!(matches!(body, Formula::Not(..)));
    }

    #[test]
    fn prenex_rejects_quantifier_under_temporal() {
        let f = Formula::next(Formula::exists("p", Formula::atom("a", "p")));
        assert!(matches!(prenex(&f), Err(Error::QuantifierUnderTemporal(_))));
    }

    #[test]
    fn prenex_preserves_free_variables() {
        let f = Formula::or(
            Formula::atom("a", "free"),
            Formula::exists("p", Formula::atom("b", "p")),
        );
        let p = prenex(&f).unwrap();
        assert_eq!(f.free_variables(), p.free_variables());
    }

    #[test]
    fn dual_swaps_classification() {
        let f = Formula::exists(
            "p",
            Formula::forall(
                "q",
                Formula::and(Formula::atom("a", "p"), Formula::atom("b", "q")),
            ),
        );
        let c = classify_prenex(&f).unwrap();
        let cd = classify_prenex(&f.dual()).unwrap();
        assert_eq!(c.level, cd.level);
        assert_ne!(c.kind, cd.kind);
    }
}
