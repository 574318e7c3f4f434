//! Arithmetic-flavoured constructions: the addition/multiplication trace
//! family and its topological closure (with generators and membership
//! oracles), the subset-explosion and finite-branching structures, and the
//! translations between higher-order arithmetic fragments and
//! path-quantified temporal formulas.

use crate::error::{Error, Result, SourceSpan};
use crate::formula::Formula;
use crate::kripke::{enumerate_lassos, LassoPath, PathUniverse, TransitionSystem};
use crate::trace::{Alphabet, Labels, UpTrace};
use std::collections::{BTreeSet, HashMap};

// ---------------------------------------------------------------------------
// sorted arithmetic formulas
// ---------------------------------------------------------------------------

/// Sorts of arithmetic variables. `Number` is order 0; `Set`, `Func`, and
/// `PairSet` are order 1; `SetSet` is order 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Number,
    Set,
    Func,
    PairSet,
    SetSet,
}

impl Sort {
    pub fn order(self) -> u8 {
        match self {
            Sort::Number => 0,
            Sort::Set | Sort::Func | Sort::PairSet => 1,
            Sort::SetSet => 2,
        }
    }

    pub fn annotation(self) -> &'static str {
        match self {
            Sort::Number => "N",
            Sort::Set => "set",
            Sort::Func => "fn",
            Sort::PairSet => "pairset",
            Sort::SetSet => "set2",
        }
    }

    fn from_annotation(s: &str) -> Option<Sort> {
        match s {
            "N" => Some(Sort::Number),
            "set" => Some(Sort::Set),
            "fn" => Some(Sort::Func),
            "pairset" => Some(Sort::PairSet),
            "set2" => Some(Sort::SetSet),
            _ => None,
        }
    }
}

/// Number-sorted terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u64),
    /// `t + k` for a literal `k`.
    Plus(Box<Term>, u64),
    /// `f(t)` for a function-sorted variable `f`.
    Apply(String, Box<Term>),
}

impl Term {
    pub fn var(v: impl Into<String>) -> Term {
        Term::Var(v.into())
    }

    pub fn plus(t: Term, k: u64) -> Term {
        Term::Plus(Box::new(t), k)
    }

    pub fn apply(f: impl Into<String>, t: Term) -> Term {
        Term::Apply(f.into(), Box::new(t))
    }
}

/// Sorted arithmetic formulas over `(0, 1, +, *, <, in)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ArithFormula {
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    /// `t1 + t2 = t3`.
    AddEq(Term, Term, Term),
    /// `t1 * t2 = t3`.
    MulEq(Term, Term, Term),
    /// `t in A` for a set variable `A`.
    InSet(Term, String),
    /// `A in X` for a set variable `A` and an order-2 variable `X`.
    SetInSetSet(String, String),
    /// `(t1, t2) in E` for a pair-set variable `E`.
    EdgeIn(Term, Term, String),
    Not(Box<ArithFormula>),
    Or(Box<ArithFormula>, Box<ArithFormula>),
    And(Box<ArithFormula>, Box<ArithFormula>),
    Implies(Box<ArithFormula>, Box<ArithFormula>),
    Exists(String, Sort, Box<ArithFormula>),
    Forall(String, Sort, Box<ArithFormula>),
}

impl ArithFormula {
    pub fn not(f: ArithFormula) -> Self {
        ArithFormula::Not(Box::new(f))
    }

    pub fn or(a: ArithFormula, b: ArithFormula) -> Self {
        ArithFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: ArithFormula, b: ArithFormula) -> Self {
        ArithFormula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: ArithFormula, b: ArithFormula) -> Self {
        ArithFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, sort: Sort, f: ArithFormula) -> Self {
        ArithFormula::Exists(v.into(), sort, Box::new(f))
    }

    pub fn forall(v: impl Into<String>, sort: Sort, f: ArithFormula) -> Self {
        ArithFormula::Forall(v.into(), sort, Box::new(f))
    }

    pub fn conj(parts: impl IntoIterator<Item = ArithFormula>) -> ArithFormula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => ArithFormula::Eq(Term::Const(0), Term::Const(0)),
            1 => parts.pop().unwrap(),
            _ => {
                let mut out = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    out = ArithFormula::and(p, out);
                }
                out
            }
        }
    }

    pub fn disj(parts: impl IntoIterator<Item = ArithFormula>) -> ArithFormula {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.len() {
            0 => ArithFormula::not(ArithFormula::Eq(Term::Const(0), Term::Const(0))),
            1 => parts.pop().unwrap(),
            _ => {
                let mut out = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    out = ArithFormula::or(p, out);
                }
                out
            }
        }
    }

    fn children(&self) -> Vec<&ArithFormula> {
        match self {
            ArithFormula::Not(a)
            | ArithFormula::Exists(_, _, a)
            | ArithFormula::Forall(_, _, a) => vec![a],
            ArithFormula::Or(a, b) | ArithFormula::And(a, b) | ArithFormula::Implies(a, b) => {
                vec![a, b]
            }
            _ => vec![],
        }
    }

    /// The conjuncts of a right-associated `&` chain.
    pub fn top_conjuncts(&self) -> Vec<&ArithFormula> {
        let mut out = Vec::new();
        let mut cur = self;
        while let ArithFormula::And(a, b) = cur {
            out.push(a.as_ref());
            cur = b.as_ref();
        }
        out.push(cur);
        out
    }

    /// Verifies the sort discipline of a sentence; every variable must be
    /// bound before use and used at its declared sort.
    pub fn check_sorts(&self) -> Result<()> {
        fn term(t: &Term, env: &HashMap<String, Sort>) -> Result<()> {
            match t {
                Term::Var(v) => match env.get(v) {
                    Some(Sort::Number) => Ok(()),
                    Some(s) => Err(Error::SortError(format!(
                        "variable {v} has sort {} in a number position",
                        s.annotation()
                    ))),
                    None => Err(Error::SortError(format!("unbound variable {v}"))),
                },
                Term::Const(_) => Ok(()),
                Term::Plus(t, _) => term(t, env),
                Term::Apply(f, t) => {
                    match env.get(f) {
                        Some(Sort::Func) => {}
                        Some(s) => {
                            return Err(Error::SortError(format!(
                                "variable {f} has sort {} in a function position",
                                s.annotation()
                            )))
                        }
                        None => return Err(Error::SortError(format!("unbound variable {f}"))),
                    }
                    term(t, env)
                }
            }
        }
        fn var_of(env: &HashMap<String, Sort>, v: &str, want: Sort) -> Result<()> {
            match env.get(v) {
                Some(s) if *s == want => Ok(()),
                Some(s) => Err(Error::SortError(format!(
                    "variable {v} has sort {}, expected {}",
                    s.annotation(),
                    want.annotation()
                ))),
                None => Err(Error::SortError(format!("unbound variable {v}"))),
            }
        }
        fn rec(f: &ArithFormula, env: &mut HashMap<String, Sort>) -> Result<()> {
            match f {
                ArithFormula::Eq(a, b) | ArithFormula::Lt(a, b) | ArithFormula::Le(a, b) => {
                    term(a, env)?;
                    term(b, env)
                }
                ArithFormula::AddEq(a, b, c) | ArithFormula::MulEq(a, b, c) => {
                    term(a, env)?;
                    term(b, env)?;
                    term(c, env)
                }
                ArithFormula::InSet(t, set) => {
                    term(t, env)?;
                    var_of(env, set, Sort::Set)
                }
                ArithFormula::SetInSetSet(set, big) => {
                    var_of(env, set, Sort::Set)?;
                    var_of(env, big, Sort::SetSet)
                }
                ArithFormula::EdgeIn(a, b, e) => {
                    term(a, env)?;
                    term(b, env)?;
                    var_of(env, e, Sort::PairSet)
                }
                ArithFormula::Exists(v, sort, body) | ArithFormula::Forall(v, sort, body) => {
                    let prev = env.insert(v.clone(), *sort);
                    let r = rec(body, env);
                    match prev {
                        Some(p) => {
                            env.insert(v.clone(), p);
                        }
                        None => {
                            env.remove(v);
                        }
                    }
                    r
                }
                _ => {
                    for c in f.children() {
                        rec(c, env)?;
                    }
                    Ok(())
                }
            }
        }
        rec(self, &mut HashMap::new())
    }
}

// ---------------------------------------------------------------------------
// text grammar for arithmetic formulas
// ---------------------------------------------------------------------------
//
//   formula ::= quant | impl
//   quant   ::= ("exists" | "forall") ident ":" sort "." formula
//   sort    ::= "N" | "set" | "fn" | "pairset" | "set2"
//   impl    ::= or ("->" impl)?
//   or      ::= and ("|" or)?
//   and     ::= unary ("&" and)?
//   unary   ::= "!" unary | atom | "(" formula ")"
//   atom    ::= "(" term "," term ")" "in" ident
//             | term "+" term "=" term | term "*" term "=" term
//             | term "<=" term | term "<" term | term "=" term
//             | term "in" ident
//   term    ::= factor ("+" nat)*        -- unless '=' follows the literal
//   factor  ::= nat | ident ("(" term ")")?
//
// An `in` atom whose left side is a set-sorted variable is order-2
// membership; the sort environment of the enclosing quantifiers decides.

struct ArithParser<'a> {
    src: &'a [u8],
    pos: usize,
    sorts: HashMap<String, Sort>,
}

impl<'a> ArithParser<'a> {
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
            if tok == "<" && self.src.get(self.pos + 1) == Some(&b'=') {
                return false;
            }
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
        if start == self.pos || self.src[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.error("expected an identifier"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn peek_word(&mut self) -> Option<String> {
        let save = self.pos;
        let r = self.ident().ok();
        self.pos = save;
        r
    }

    fn formula(&mut self) -> Result<ArithFormula> {
        if let Some(w) = self.peek_word() {
            if w == "exists" || w == "forall" {
                let _ = self.ident();
                let var = self.ident()?;
                if !self.eat(":") {
                    return Err(self.error("expected ':' and a sort annotation"));
                }
                let ann = self.ident()?;
                let sort = Sort::from_annotation(&ann)
                    .ok_or_else(|| self.error(format!("unknown sort {ann:?}")))?;
                if !self.eat(".") {
                    return Err(self.error("expected '.' after the sort"));
                }
                let prev = self.sorts.insert(var.clone(), sort);
                let body = self.formula()?;
                match prev {
                    Some(p) => {
                        self.sorts.insert(var.clone(), p);
                    }
                    None => {
                        self.sorts.remove(&var);
                    }
                }
                return Ok(if w == "exists" {
                    ArithFormula::exists(var, sort, body)
                } else {
                    ArithFormula::forall(var, sort, body)
                });
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<ArithFormula> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            Ok(ArithFormula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<ArithFormula> {
        let lhs = self.conjunction()?;
        if self.eat("|") {
            Ok(ArithFormula::or(lhs, self.disjunction()?))
        } else {
            Ok(lhs)
        }
    }

    fn conjunction(&mut self) -> Result<ArithFormula> {
        let lhs = self.unary()?;
        if self.eat("&") {
            Ok(ArithFormula::and(lhs, self.conjunction()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<ArithFormula> {
        if self.eat("!") {
            return Ok(ArithFormula::not(self.unary()?));
        }
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'(') {
            // either "(t1, t2) in E" or a parenthesized formula
            let save = self.pos;
            self.pos += 1;
            if let Ok(t1) = self.term() {
                if self.eat(",") {
                    let t2 = self.term()?;
                    if !self.eat(")") {
                        return Err(self.error("expected ')' after the pair"));
                    }
                    if !self.eat("in") {
                        return Err(self.error("expected 'in' after the pair"));
                    }
                    let e = self.ident()?;
                    return Ok(ArithFormula::EdgeIn(t1, t2, e));
                }
            }
            self.pos = save + 1;
            let inner = self.formula()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(inner);
        }
        if let Some(w) = self.peek_word() {
            if w == "exists" || w == "forall" {
                return self.formula();
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ArithFormula> {
        let t1 = self.term()?;
        if self.eat("+") {
            let t2 = self.term()?;
            if !self.eat("=") {
                return Err(self.error("expected '=' in the addition atom"));
            }
            return Ok(ArithFormula::AddEq(t1, t2, self.term()?));
        }
        if self.eat("*") {
            let t2 = self.term()?;
            if !self.eat("=") {
                return Err(self.error("expected '=' in the multiplication atom"));
            }
            return Ok(ArithFormula::MulEq(t1, t2, self.term()?));
        }
        if self.eat("<=") {
            return Ok(ArithFormula::Le(t1, self.term()?));
        }
        if self.eat("<") {
            return Ok(ArithFormula::Lt(t1, self.term()?));
        }
        if self.eat("=") {
            return Ok(ArithFormula::Eq(t1, self.term()?));
        }
        if self.eat("in") {
            let target = self.ident()?;
            if let Term::Var(v) = &t1 {
                if self.sorts.get(v) == Some(&Sort::Set) {
                    return Ok(ArithFormula::SetInSetSet(v.clone(), target));
                }
            }
            return Ok(ArithFormula::InSet(t1, target));
        }
        Err(self.error("expected a relation symbol"))
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.factor()?;
        loop {
            let save = self.pos;
            if !self.eat("+") {
                break;
            }
            self.skip_ws();
            let is_digit = self
                .src
                .get(self.pos)
                .map(|c| c.is_ascii_digit())
                .unwrap_or(false);
            if !is_digit {
                self.pos = save;
                break;
            }
            let k = self.nat()?;
            // "t + k = u" is the ternary addition atom, not a term
            let after = self.pos;
            self.skip_ws();
            let eq_next = self.src.get(self.pos) == Some(&b'=');
            self.pos = after;
            if eq_next {
                self.pos = save;
                break;
            }
            t = Term::plus(t, k);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term> {
        self.skip_ws();
        if self
            .src
            .get(self.pos)
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            return Ok(Term::Const(self.nat()?));
        }
        let name = self.ident()?;
        let save = self.pos;
        if self.eat("(") {
            if let Ok(arg) = self.term() {
                if self.eat(")") {
                    return Ok(Term::apply(name, arg));
                }
            }
            self.pos = save;
        }
        Ok(Term::var(name))
    }
}

pub fn parse_arith_formula(text: &str) -> Result<ArithFormula> {
    let mut p = ArithParser {
        src: text.as_bytes(),
        pos: 0,
        sorts: HashMap::new(),
    };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

fn arith_precedence(f: &ArithFormula) -> u8 {
    match f {
        ArithFormula::Exists(..) | ArithFormula::Forall(..) => 0,
        ArithFormula::Implies(..) => 1,
        ArithFormula::Or(..) => 2,
        ArithFormula::And(..) => 3,
        ArithFormula::Not(_) => 4,
        _ => 5,
    }
}

fn print_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const(k) => out.push_str(&k.to_string()),
        Term::Plus(t, k) => {
            print_term(t, out);
            out.push_str(" + ");
            out.push_str(&k.to_string());
        }
        Term::Apply(f, t) => {
            out.push_str(f);
            out.push('(');
            print_term(t, out);
            out.push(')');
        }
    }
}

fn arith_print_into(f: &ArithFormula, min_prec: u8, out: &mut String) {
    let prec = arith_precedence(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        ArithFormula::Eq(a, b) => {
            print_term(a, out);
            out.push_str(" = ");
            print_term(b, out);
        }
        ArithFormula::Lt(a, b) => {
            print_term(a, out);
            out.push_str(" < ");
            print_term(b, out);
        }
        ArithFormula::Le(a, b) => {
            print_term(a, out);
            out.push_str(" <= ");
            print_term(b, out);
        }
        ArithFormula::AddEq(a, b, c) => {
            print_term(a, out);
            out.push_str(" + ");
            print_term(b, out);
            out.push_str(" = ");
            print_term(c, out);
        }
        ArithFormula::MulEq(a, b, c) => {
            print_term(a, out);
            out.push_str(" * ");
            print_term(b, out);
            out.push_str(" = ");
            print_term(c, out);
        }
        ArithFormula::InSet(t, set) => {
            print_term(t, out);
            out.push_str(" in ");
            out.push_str(set);
        }
        ArithFormula::SetInSetSet(set, big) => {
            out.push_str(set);
            out.push_str(" in ");
            out.push_str(big);
        }
        ArithFormula::EdgeIn(a, b, e) => {
            out.push('(');
            print_term(a, out);
            out.push_str(", ");
            print_term(b, out);
            out.push_str(") in ");
            out.push_str(e);
        }
        ArithFormula::Not(a) => {
            out.push('!');
            arith_print_into(a, 4, out);
        }
        ArithFormula::And(a, b) => {
            arith_print_into(a, 4, out);
            out.push_str(" & ");
            arith_print_into(b, 3, out);
        }
        ArithFormula::Or(a, b) => {
            arith_print_into(a, 3, out);
            out.push_str(" | ");
            arith_print_into(b, 2, out);
        }
        ArithFormula::Implies(a, b) => {
            arith_print_into(a, 2, out);
            out.push_str(" -> ");
            arith_print_into(b, 1, out);
        }
        ArithFormula::Exists(v, sort, b) => {
            out.push_str("exists ");
            out.push_str(v);
            out.push(':');
            out.push_str(sort.annotation());
            out.push_str(". ");
            arith_print_into(b, 0, out);
        }
        ArithFormula::Forall(v, sort, b) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push(':');
            out.push_str(sort.annotation());
            out.push_str(". ");
            arith_print_into(b, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_arith_formula(f: &ArithFormula) -> String {
    let mut out = String::new();
    arith_print_into(f, 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// bounded three-valued evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

#[derive(Debug, Clone)]
enum Value {
    Num(u64),
    Set(BTreeSet<u64>),
    Func(Vec<u64>),
    PairSet(BTreeSet<(u64, u64)>),
    SetSet(BTreeSet<BTreeSet<u64>>),
}

#[derive(Debug, Clone)]
pub struct ArithBounds {
    pub domain: u64,
    pub set_universe: u64,
    /// Cap on the size of any single quantifier domain.
    pub enumeration_cap: u64,
}

impl ArithBounds {
    pub fn new(domain: u64, set_universe: u64) -> Result<Self> {
        if domain == 0 || set_universe == 0 {
            return Err(Error::InvalidInput("bounds must be at least 1".to_string()));
        }
        Ok(ArithBounds {
            domain,
            set_universe,
            enumeration_cap: 1 << 20,
        })
    }
}

struct BoundedEval<'a> {
    bounds: &'a ArithBounds,
    /// Existentially occurring quantifiers get the doubled domain in the
    /// optimistic run, universally occurring ones in the pessimistic run.
    optimistic: bool,
}

impl<'a> BoundedEval<'a> {
    fn term(&self, t: &Term, env: &HashMap<String, Value>) -> Result<u64> {
        match t {
            Term::Var(v) => match env.get(v) {
                Some(Value::Num(n)) => Ok(*n),
                _ => Err(Error::SortError(format!("{v} is not a bounded number"))),
            },
            Term::Const(k) => Ok(*k),
            Term::Plus(t, k) => Ok(self.term(t, env)? + k),
            Term::Apply(f, t) => {
                let arg = self.term(t, env)? as usize;
                match env.get(f) {
                    Some(Value::Func(table)) => table.get(arg).copied().ok_or_else(|| {
                        Error::ResourceLimit(format!(
                            "function application at {arg} outside the bounded table"
                        ))
                    }),
                    _ => Err(Error::SortError(format!("{f} is not a bounded function"))),
                }
            }
        }
    }

    fn doubled(&self, existential_occurrence: bool, base: u64) -> u64 {
        if existential_occurrence == self.optimistic {
            2 * base
        } else {
            base
        }
    }

    fn quantifier_domain(&self, sort: Sort, existential_occurrence: bool) -> Result<Vec<Value>> {
        let cap = self.bounds.enumeration_cap;
        match sort {
            Sort::Number => {
                let b = self.doubled(existential_occurrence, self.bounds.domain);
                Ok((0..=b).map(Value::Num).collect())
            }
            Sort::Set => {
                let b = self.doubled(existential_occurrence, self.bounds.set_universe);
                if b >= 20 || (1u64 << (b + 1)) > cap {
                    return Err(Error::ResourceLimit(format!("2^{} subsets", b + 1)));
                }
                let mut out = Vec::new();
                for mask in 0..(1u64 << (b + 1)) {
                    out.push(Value::Set(
                        (0..=b).filter(|i| mask & (1 << i) != 0).collect(),
                    ));
                }
                Ok(out)
            }
            Sort::Func => {
                // tables cover 0..=2*domain+2 so that applications at the
                // doubled indices plus one successor stay defined
                let d = (2 * self.bounds.domain + 2) as usize;
                let b = self.doubled(existential_occurrence, self.bounds.domain);
                let count = (b + 1).checked_pow((d + 1) as u32).unwrap_or(u64::MAX);
                if count > cap {
                    return Err(Error::ResourceLimit(format!(
                        "{}^{} bounded functions",
                        b + 1,
                        d + 1
                    )));
                }
                let mut out = Vec::new();
                let mut table = vec![0u64; d + 1];
                loop {
                    out.push(Value::Func(table.clone()));
                    let mut i = 0;
                    while i <= d {
                        table[i] += 1;
                        if table[i] <= b {
                            break;
                        }
                        table[i] = 0;
                        i += 1;
                    }
                    if i > d {
                        break;
                    }
                }
                Ok(out)
            }
            Sort::PairSet => {
                let b = self.doubled(existential_occurrence, self.bounds.domain);
                let pairs: Vec<(u64, u64)> =
                    (0..=b).flat_map(|x| (0..=b).map(move |y| (x, y))).collect();
                if pairs.len() >= 24 || (1u64 << pairs.len()) > cap {
                    return Err(Error::ResourceLimit(format!("2^{} pair sets", pairs.len())));
                }
                let mut out = Vec::new();
                for mask in 0..(1u64 << pairs.len()) {
                    out.push(Value::PairSet(
                        pairs
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, p)| *p)
                            .collect(),
                    ));
                }
                Ok(out)
            }
            Sort::SetSet => {
                let b = self.doubled(existential_occurrence, self.bounds.set_universe);
                if b >= 4 {
                    return Err(Error::ResourceLimit("order-2 enumeration".to_string()));
                }
                let mut subsets: Vec<BTreeSet<u64>> = Vec::new();
                for mask in 0..(1u64 << (b + 1)) {
                    subsets.push((0..=b).filter(|i| mask & (1 << i) != 0).collect());
                }
                if subsets.len() >= 20 || (1u64 << subsets.len()) > cap {
                    return Err(Error::ResourceLimit(format!(
                        "2^{} families of subsets",
                        subsets.len()
                    )));
                }
                let mut out = Vec::new();
                for mask in 0..(1u64 << subsets.len()) {
                    out.push(Value::SetSet(
                        subsets
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, s)| s.clone())
                            .collect(),
                    ));
                }
                Ok(out)
            }
        }
    }

    fn eval(
        &self,
        f: &ArithFormula,
        env: &mut HashMap<String, Value>,
        negated: bool,
    ) -> Result<bool> {
        match f {
            ArithFormula::Eq(a, b) => Ok(self.term(a, env)? == self.term(b, env)?),
            ArithFormula::Lt(a, b) => Ok(self.term(a, env)? < self.term(b, env)?),
            ArithFormula::Le(a, b) => Ok(self.term(a, env)? <= self.term(b, env)?),
            ArithFormula::AddEq(a, b, c) => {
                Ok(self.term(a, env)? + self.term(b, env)? == self.term(c, env)?)
            }
            ArithFormula::MulEq(a, b, c) => {
                Ok(self.term(a, env)? * self.term(b, env)? == self.term(c, env)?)
            }
            ArithFormula::InSet(t, set) => {
                let n = self.term(t, env)?;
                match env.get(set) {
                    Some(Value::Set(s)) => Ok(s.contains(&n)),
                    _ => Err(Error::SortError(format!("{set} is not a bounded set"))),
                }
            }
            ArithFormula::SetInSetSet(set, big) => {
                let s = match env.get(set) {
                    Some(Value::Set(s)) => s.clone(),
                    _ => return Err(Error::SortError(format!("{set} is not a bounded set"))),
                };
                match env.get(big) {
                    Some(Value::SetSet(ss)) => Ok(ss.contains(&s)),
                    _ => Err(Error::SortError(format!("{big} is not a bounded family"))),
                }
            }
            ArithFormula::EdgeIn(a, b, e) => {
                let pair = (self.term(a, env)?, self.term(b, env)?);
                match env.get(e) {
                    Some(Value::PairSet(s)) => Ok(s.contains(&pair)),
                    _ => Err(Error::SortError(format!("{e} is not a bounded pair set"))),
                }
            }
            ArithFormula::Not(a) => Ok(!self.eval(a, env, !negated)?),
            ArithFormula::Or(a, b) => {
                Ok(self.eval(a, env, negated)? || self.eval(b, env, negated)?)
            }
            ArithFormula::And(a, b) => {
                Ok(self.eval(a, env, negated)? && self.eval(b, env, negated)?)
            }
            ArithFormula::Implies(a, b) => {
                Ok(!self.eval(a, env, !negated)? || self.eval(b, env, negated)?)
            }
            ArithFormula::Exists(v, sort, body) | ArithFormula::Forall(v, sort, body) => {
                let syntactic_existential = matches!(f, ArithFormula::Exists(..));
                let occurrence_existential = syntactic_existential != negated;
                for value in self.quantifier_domain(*sort, occurrence_existential)? {
                    let prev = env.insert(v.clone(), value);
                    let r = self.eval(body, env, negated)?;
                    match prev {
                        Some(p) => {
                            env.insert(v.clone(), p);
                        }
                        None => {
                            env.remove(v);
                        }
                    }
                    if r == syntactic_existential {
                        return Ok(syntactic_existential);
                    }
                }
                Ok(!syntactic_existential)
            }
        }
    }
}

/// Bounded three-valued evaluation.
///
/// Quantifiers are restricted to the bounded domains. The sentence is
/// evaluated twice: once with the domains of existentially occurring
/// quantifiers doubled (optimistic) and once with those of universally
/// occurring quantifiers doubled (pessimistic). Agreement yields a
/// definite verdict; disagreement means the value is boundary-sensitive
/// and is reported as [`Truth::Unknown`].
pub fn eval_bounded_arith(f: &ArithFormula, bounds: &ArithBounds) -> Result<Truth> {
    f.check_sorts()?;
    let optimistic = BoundedEval {
        bounds,
        optimistic: true,
    }
    .eval(f, &mut HashMap::new(), false)?;
    let pessimistic = BoundedEval {
        bounds,
        optimistic: false,
    }
    .eval(f, &mut HashMap::new(), false)?;
    Ok(if optimistic == pessimistic {
        if optimistic {
            Truth::True
        } else {
            Truth::False
        }
    } else {
        Truth::Unknown
    })
}

// ---------------------------------------------------------------------------
// the addition/multiplication trace family and its closure
// ---------------------------------------------------------------------------

pub const OP_PROPS: [&str; 5] = ["add", "argl", "argr", "mult", "res"];

/// `{add, argl, argr, mult, res}`.
pub fn op_alphabet() -> Alphabet {
    Alphabet::new(OP_PROPS).expect("small alphabet")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpMode {
    Add,
    Mult,
}

/// Marker positions decoded from a trace over the operation alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpTraceView {
    pub mode: OpMode,
    pub argl: Option<usize>,
    pub argr: Option<usize>,
    pub res: Option<usize>,
}

/// Decodes mode and marker positions; `None` when the trace violates the
/// basic discipline (mixed or missing mode, or a marker repeated).
pub fn decode_op_trace(alphabet: &Alphabet, t: &UpTrace) -> Result<Option<OpTraceView>> {
    if alphabet != &op_alphabet() {
        return Err(Error::AlphabetMismatch(
            "operation traces use the alphabet {add, argl, argr, mult, res}".to_string(),
        ));
    }
    let bit = |p: &str| alphabet.index_of(p).unwrap();
    let (add, mult) = (bit("add"), bit("mult"));
    let everywhere = |b: usize| {
        t.stem().iter().all(|l| l.contains(b)) && t.cycle().iter().all(|l| l.contains(b))
    };
    let nowhere = |b: usize| {
        t.stem().iter().all(|l| !l.contains(b)) && t.cycle().iter().all(|l| !l.contains(b))
    };
    let mode = if everywhere(add) && nowhere(mult) {
        OpMode::Add
    } else if everywhere(mult) && nowhere(add) {
        OpMode::Mult
    } else {
        return Ok(None);
    };
    let unique_position = |b: usize| -> Option<Option<usize>> {
        // a marker in the loop repeats forever
        if t.cycle().iter().any(|l| l.contains(b)) {
            return None;
        }
        let hits: Vec<usize> = t
            .stem()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.contains(b))
            .map(|(i, _)| i)
            .collect();
        match hits.len() {
            0 => Some(None),
            1 => Some(Some(hits[0])),
            _ => None,
        }
    };
    let argl = match unique_position(bit("argl")) {
        Some(p) => p,
        None => return Ok(None),
    };
    let argr = match unique_position(bit("argr")) {
        Some(p) => p,
        None => return Ok(None),
    };
    let res = match unique_position(bit("res")) {
        Some(p) => p,
        None => return Ok(None),
    };
    Ok(Some(OpTraceView {
        mode,
        argl,
        argr,
        res,
    }))
}

/// Membership in the exact operation family: both arguments and the result
/// present, with the arithmetic holding.
pub fn t_op_member(alphabet: &Alphabet, t: &UpTrace) -> Result<bool> {
    let view = match decode_op_trace(alphabet, t)? {
        Some(v) => v,
        None => return Ok(false),
    };
    let (n1, n2, n3) = match (view.argl, view.argr, view.res) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Ok(false),
    };
    Ok(match view.mode {
        OpMode::Add => n1 + n2 == n3,
        OpMode::Mult => n1 * n2 == n3,
    })
}

/// Membership in the limit family: a marker missing, and a result only in
/// the zero-times-unbounded limit shape.
pub fn d_member(alphabet: &Alphabet, t: &UpTrace) -> Result<bool> {
    let view = match decode_op_trace(alphabet, t)? {
        Some(v) => v,
        None => return Ok(false),
    };
    if view.argl.is_some() && view.argr.is_some() {
        return Ok(false);
    }
    if let Some(n) = view.res {
        if view.mode != OpMode::Mult || n != 0 {
            return Ok(false);
        }
        if view.argl != Some(0) && view.argr != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in the closed family: exact members plus the limits.
pub fn cl_top_member(alphabet: &Alphabet, t: &UpTrace) -> Result<bool> {
    Ok(t_op_member(alphabet, t)? || d_member(alphabet, t)?)
}

/// Builds the member trace for the given mode and marker positions:
/// the mode proposition everywhere, markers at their positions, loop on
/// the bare mode letter.
pub fn op_trace(
    mode: OpMode,
    argl: Option<usize>,
    argr: Option<usize>,
    res: Option<usize>,
) -> UpTrace {
    let alpha = op_alphabet();
    let mode_bit = alpha
        .index_of(match mode {
            OpMode::Add => "add",
            OpMode::Mult => "mult",
        })
        .unwrap();
    let horizon = [argl, argr, res]
        .iter()
        .flatten()
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    let mut stem = vec![Labels::singleton(mode_bit); horizon];
    for (marker, pos) in [("argl", argl), ("argr", argr), ("res", res)] {
        if let Some(p) = pos {
            stem[p].insert(alpha.index_of(marker).unwrap());
        }
    }
    UpTrace::new(stem, vec![Labels::singleton(mode_bit)]).expect("nonempty loop")
}

/// All exact members with both arguments at most `m`.
pub fn t_op_truncation(m: usize) -> Vec<UpTrace> {
    let mut out = Vec::new();
    for mode in [OpMode::Add, OpMode::Mult] {
        for n1 in 0..=m {
            for n2 in 0..=m {
                let n3 = match mode {
                    OpMode::Add => n1 + n2,
                    OpMode::Mult => n1 * n2,
                };
                out.push(op_trace(mode, Some(n1), Some(n2), Some(n3)));
            }
        }
    }
    out
}

fn a(prop: &str, var: &str) -> Formula {
    Formula::atom(prop, var)
}

fn once(prop: &str, var: &str) -> Formula {
    // !a U (a & X G !a)
    Formula::until(
        Formula::not(a(prop, var)),
        Formula::and(
            a(prop, var),
            Formula::next(Formula::globally(Formula::not(a(prop, var)))),
        ),
    )
}

fn at_most_once(prop: &str, var: &str) -> Formula {
    Formula::or(
        Formula::globally(Formula::not(a(prop, var))),
        once(prop, var),
    )
}

fn mode_exclusive(var: &str) -> Formula {
    Formula::or(
        Formula::globally(Formula::and(a("add", var), Formula::not(a("mult", var)))),
        Formula::globally(Formula::and(a("mult", var), Formula::not(a("add", var)))),
    )
}

/// The eight conjuncts describing the exact operation family, in order:
/// marker uniqueness, mode exclusivity, the zero-zero base traces, closure
/// under argument successors, and the four result-correctness clauses.
pub fn phi_op_parts() -> Vec<Formula> {
    let p1 = Formula::forall(
        "p",
        Formula::conj(["argl", "argr", "res"].into_iter().map(|m| once(m, "p"))),
    );
    let p2 = Formula::forall("p", mode_exclusive("p"));
    let p3 = Formula::conj(["add", "mult"].into_iter().map(|m| {
        Formula::exists(
            "p",
            Formula::conj([a(m, "p"), a("argl", "p"), a("argr", "p")]),
        )
    }));
    let p4 = Formula::forall(
        "p",
        Formula::exists(
            "p1",
            Formula::exists(
                "p2",
                Formula::conj([
                    Formula::iff(a("add", "p"), a("add", "p1")),
                    Formula::iff(a("add", "p"), a("add", "p2")),
                    Formula::eventually(Formula::and(
                        a("argl", "p"),
                        Formula::next(a("argl", "p1")),
                    )),
                    Formula::eventually(Formula::and(a("argr", "p"), a("argr", "p1"))),
                    Formula::eventually(Formula::and(a("argl", "p"), a("argl", "p2"))),
                    Formula::eventually(Formula::and(
                        a("argr", "p"),
                        Formula::next(a("argr", "p2")),
                    )),
                ]),
            ),
        ),
    );
    let p5 = Formula::forall(
        "p",
        Formula::implies(
            Formula::and(a("add", "p"), a("argl", "p")),
            Formula::eventually(Formula::and(a("argr", "p"), a("res", "p"))),
        ),
    );
    let p6 = Formula::forall(
        "p",
        Formula::exists(
            "q",
            Formula::implies(
                Formula::and(a("add", "p"), Formula::not(a("argl", "p"))),
                Formula::conj([
                    a("add", "q"),
                    Formula::eventually(Formula::and(
                        Formula::next(a("argl", "p")),
                        a("argl", "q"),
                    )),
                    Formula::eventually(Formula::and(a("argr", "p"), a("argr", "q"))),
                    Formula::eventually(Formula::and(Formula::next(a("res", "p")), a("res", "q"))),
                ]),
            ),
        ),
    );
    let p7 = Formula::forall(
        "p",
        Formula::implies(Formula::and(a("mult", "p"), a("argl", "p")), a("res", "p")),
    );
    let p8 = Formula::forall(
        "p",
        Formula::exists(
            "q",
            Formula::exists(
                "r",
                Formula::implies(
                    Formula::and(a("mult", "p"), Formula::not(a("argl", "p"))),
                    Formula::conj([
                        a("mult", "q"),
                        a("add", "r"),
                        Formula::eventually(Formula::and(
                            Formula::next(a("argl", "p")),
                            a("argl", "q"),
                        )),
                        Formula::eventually(Formula::conj([
                            a("argr", "p"),
                            a("argr", "q"),
                            a("argr", "r"),
                        ])),
                        Formula::eventually(Formula::and(a("res", "q"), a("argl", "r"))),
                        Formula::eventually(Formula::and(a("res", "p"), a("res", "r"))),
                    ]),
                ),
            ),
        ),
    );
    vec![p1, p2, p3, p4, p5, p6, p7, p8]
}

pub fn gen_phi_op() -> Formula {
    Formula::conj(phi_op_parts())
}

fn guard_two_args(var: &str) -> Formula {
    Formula::and(
        Formula::eventually(a("argl", var)),
        Formula::eventually(a("argr", var)),
    )
}

/// The ten conjuncts describing the closed operation family, in order:
/// at-most-once markers, result forced by both arguments, mode
/// exclusivity, the limit-result clause, then the guarded versions of the
/// base, successor, and correctness clauses.
pub fn phi_op_cl_parts() -> Vec<Formula> {
    let c1 = Formula::forall(
        "p",
        Formula::conj(
            ["argl", "argr", "res"]
                .into_iter()
                .map(|m| at_most_once(m, "p")),
        ),
    );
    let c2 = Formula::forall(
        "p",
        Formula::implies(guard_two_args("p"), Formula::eventually(a("res", "p"))),
    );
    let c3 = Formula::forall("p", mode_exclusive("p"));
    let c4 = Formula::forall(
        "p",
        Formula::implies(
            Formula::and(
                Formula::eventually(a("res", "p")),
                Formula::or(
                    Formula::globally(Formula::not(a("argl", "p"))),
                    Formula::globally(Formula::not(a("argr", "p"))),
                ),
            ),
            Formula::conj([
                a("mult", "p"),
                a("res", "p"),
                Formula::or(a("argl", "p"), a("argr", "p")),
            ]),
        ),
    );
    let c5 = Formula::conj(["add", "mult"].into_iter().map(|m| {
        Formula::exists(
            "p",
            Formula::conj([a(m, "p"), a("argl", "p"), a("argr", "p")]),
        )
    }));
    let c6 = Formula::forall(
        "p",
        Formula::implies(
            guard_two_args("p"),
            Formula::exists(
                "p1",
                Formula::exists(
                    "p2",
                    Formula::conj([
                        Formula::iff(a("add", "p"), a("add", "p1")),
                        Formula::iff(a("add", "p"), a("add", "p2")),
                        Formula::eventually(Formula::and(
                            a("argl", "p"),
                            Formula::next(a("argl", "p1")),
                        )),
                        Formula::eventually(Formula::and(a("argr", "p"), a("argr", "p1"))),
                        Formula::eventually(Formula::and(a("argl", "p"), a("argl", "p2"))),
                        Formula::eventually(Formula::and(
                            a("argr", "p"),
                            Formula::next(a("argr", "p2")),
                        )),
                    ]),
                ),
            ),
        ),
    );
    let c7 = Formula::forall(
        "p",
        Formula::implies(
            Formula::conj([guard_two_args("p"), a("add", "p"), a("argl", "p")]),
            Formula::eventually(Formula::and(a("argr", "p"), a("res", "p"))),
        ),
    );
    let c8 = Formula::forall(
        "p",
        Formula::exists(
            "q",
            Formula::implies(
                Formula::conj([
                    guard_two_args("p"),
                    a("add", "p"),
                    Formula::not(a("argl", "p")),
                ]),
                Formula::conj([
                    a("add", "q"),
                    Formula::eventually(Formula::and(
                        Formula::next(a("argl", "p")),
                        a("argl", "q"),
                    )),
                    Formula::eventually(Formula::and(a("argr", "p"), a("argr", "q"))),
                    Formula::eventually(Formula::and(Formula::next(a("res", "p")), a("res", "q"))),
                ]),
            ),
        ),
    );
    let c9 = Formula::forall(
        "p",
        Formula::implies(Formula::and(a("mult", "p"), a("argl", "p")), a("res", "p")),
    );
    let c10 = Formula::forall(
        "p",
        Formula::exists(
            "q",
            Formula::exists(
                "r",
                Formula::implies(
                    Formula::conj([
                        guard_two_args("p"),
                        a("mult", "p"),
                        Formula::not(a("argl", "p")),
                    ]),
                    Formula::conj([
                        a("mult", "q"),
                        a("add", "r"),
                        Formula::eventually(Formula::and(
                            Formula::next(a("argl", "p")),
                            a("argl", "q"),
                        )),
                        Formula::eventually(Formula::conj([
                            a("argr", "p"),
                            a("argr", "q"),
                            a("argr", "r"),
                        ])),
                        Formula::eventually(Formula::and(a("res", "q"), a("argl", "r"))),
                        Formula::eventually(Formula::and(a("res", "p"), a("res", "r"))),
                    ]),
                ),
            ),
        ),
    );
    vec![c1, c2, c3, c4, c5, c6, c7, c8, c9, c10]
}

pub fn gen_phi_op_cl() -> Formula {
    Formula::conj(phi_op_cl_parts())
}

// ---------------------------------------------------------------------------
// subset-explosion and finite-branching structures
// ---------------------------------------------------------------------------

/// The five conjuncts forcing one initial successor per subset of the
/// naturals: label discipline, branching of the tree part, persistence of
/// the chain part, copies of every tree path as a chain, and determinism
/// of chains.
pub fn phi_set_parts() -> Vec<Formula> {
    let s1 = Formula::forall(
        "p",
        Formula::and(
            Formula::conj([
                a("fbt", "p"),
                Formula::not(a("b0", "p")),
                Formula::not(a("b1", "p")),
                Formula::not(a("pset", "p")),
            ]),
            Formula::next(Formula::globally(Formula::and(
                Formula::iff(a("pset", "p"), Formula::not(a("fbt", "p"))),
                Formula::iff(a("b0", "p"), Formula::not(a("b1", "p"))),
            ))),
        ),
    );
    let s2 = Formula::forall(
        "p",
        Formula::globally(Formula::implies(
            a("fbt", "p"),
            Formula::conj([
                Formula::exists(
                    "p0",
                    Formula::next(Formula::and(a("fbt", "p0"), a("b0", "p0"))),
                ),
                Formula::exists(
                    "p1",
                    Formula::next(Formula::and(a("fbt", "p1"), a("b1", "p1"))),
                ),
                Formula::implies(
                    Formula::or(a("b0", "p"), a("b1", "p")),
                    Formula::forall("q", Formula::next(a("fbt", "q"))),
                ),
            ]),
        )),
    );
    let s3 = Formula::forall(
        "p",
        Formula::globally(Formula::implies(
            a("pset", "p"),
            Formula::globally(a("pset", "p")),
        )),
    );
    let s4 = Formula::forall(
        "p",
        Formula::implies(
            Formula::next(a("fbt", "p")),
            Formula::exists(
                "q",
                Formula::next(Formula::and(
                    a("pset", "q"),
                    Formula::globally(Formula::iff(a("b0", "p"), a("b0", "q"))),
                )),
            ),
        ),
    );
    let s5 = Formula::forall(
        "p",
        Formula::globally(Formula::implies(
            a("pset", "p"),
            Formula::forall(
                "q",
                Formula::globally(Formula::iff(a("b0", "p"), a("b0", "q"))),
            ),
        )),
    );
    vec![s1, s2, s3, s4, s5]
}

pub fn gen_phi_set() -> Formula {
    Formula::conj(phi_set_parts())
}

/// Bounds for the generated stand-in structures.
#[derive(Debug, Clone, Copy)]
pub struct StructureGenConfig {
    /// Binary-tree depth.
    pub tree_depth: usize,
    /// Chains cover the subsets of `{0..=subset_bound}`.
    pub subset_bound: usize,
    /// Chain length before the tail loop.
    pub chain_len: usize,
    pub vertex_cap: usize,
}

impl Default for StructureGenConfig {
    fn default() -> Self {
        StructureGenConfig {
            tree_depth: 2,
            subset_bound: 1,
            chain_len: 3,
            vertex_cap: 100_000,
        }
    }
}

/// Truncated subset-explosion structure: a depth-bounded binary tree of
/// `fbt` vertices (leaves looping back to the depth-1 vertices) plus one
/// labelled chain per subset of `{0..=subset_bound}`, each chain ending in
/// a self-loop.
pub fn gen_kset(cfg: &StructureGenConfig) -> Result<TransitionSystem> {
    if cfg.tree_depth == 0 {
        return Err(Error::InvalidInput(
            "tree depth must be at least 1".to_string(),
        ));
    }
    let alpha = Alphabet::new(["b0", "b1", "fbt", "pset"]).unwrap();
    let l = |names: &[&str]| alpha.labels(names).unwrap();
    let mut vertices: Vec<(String, Labels)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let add_vertex = |id: String,
                      label: Labels,
                      vertices: &mut Vec<(String, Labels)>,
                      index: &mut HashMap<String, usize>|
     -> Result<usize> {
        if vertices.len() >= cfg.vertex_cap {
            return Err(Error::ResourceLimit(format!("{} vertices", cfg.vertex_cap)));
        }
        let i = vertices.len();
        vertices.push((id.clone(), label));
        index.insert(id, i);
        Ok(i)
    };

    // binary tree over words u, id "t" + u
    let mut words: Vec<String> = vec![String::new()];
    for len in 1..=cfg.tree_depth {
        let mut next = Vec::new();
        for w in words.iter().filter(|w| w.len() == len - 1) {
            next.push(format!("{w}0"));
            next.push(format!("{w}1"));
        }
        words.extend(next);
    }
    for w in &words {
        let label = if w.is_empty() {
            l(&["fbt"])
        } else if w.ends_with('0') {
            l(&["fbt", "b0"])
        } else {
            l(&["fbt", "b1"])
        };
        add_vertex(format!("t{w}"), label, &mut vertices, &mut index)?;
    }
    for w in &words {
        if w.len() < cfg.tree_depth {
            edges.push((index[&format!("t{w}")], index[&format!("t{w}0")]));
            edges.push((index[&format!("t{w}")], index[&format!("t{w}1")]));
        } else {
            // leaves continue branching through the depth-1 vertices
            edges.push((index[&format!("t{w}")], index["t0"]));
            edges.push((index[&format!("t{w}")], index["t1"]));
        }
    }

    // one chain per subset, id "s" + membership bits + "_" + position
    for mask in 0..(1u64 << (cfg.subset_bound + 1)) {
        let bits: String = (0..=cfg.subset_bound)
            .map(|i| if mask & (1 << i) != 0 { '1' } else { '0' })
            .collect();
        for i in 0..=cfg.chain_len {
            // positions beyond the subset bound read as not-members
            let member = i <= cfg.subset_bound && mask & (1 << i) != 0;
            let label = if member {
                l(&["pset", "b1"])
            } else {
                l(&["pset", "b0"])
            };
            add_vertex(format!("s{bits}_{i}"), label, &mut vertices, &mut index)?;
        }
        let chain = |i: usize| index[&format!("s{bits}_{i}")];
        edges.push((index["t"], chain(0)));
        for i in 0..cfg.chain_len {
            edges.push((chain(i), chain(i + 1)));
        }
        edges.push((chain(cfg.chain_len), chain(cfg.chain_len)));
    }

    TransitionSystem::new(alpha, vertices, edges, 0)
}

/// The three-vertex finite-branching structure: an initial vertex fanning
/// out to two mutually connected looping vertices labelled
/// `{fbt, b0}` and `{fbt, b1}`.
pub fn gen_tf() -> TransitionSystem {
    let alpha = Alphabet::new(["b0", "b1", "fbt"]).unwrap();
    let l = |names: &[&str]| alpha.labels(names).unwrap();
    TransitionSystem::new(
        alpha.clone(),
        vec![
            ("init".to_string(), Labels::empty()),
            ("v0".to_string(), l(&["fbt", "b0"])),
            ("v1".to_string(), l(&["fbt", "b1"])),
        ],
        vec![(0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)],
        0,
    )
    .expect("static structure")
}

// --- prefix feasibility for the closed operation family --------------------

#[derive(Debug, Clone, Copy, Default)]
struct PrefixMarkers {
    argl: Option<usize>,
    argr: Option<usize>,
    res: Option<usize>,
}

/// Decodes a finite word over the operation alphabet into its mode and
/// marker positions; `None` when mode or uniqueness is already violated.
fn decode_prefix(alpha: &Alphabet, word: &[Labels]) -> Option<(Option<OpMode>, PrefixMarkers)> {
    let bit = |p: &str| alpha.index_of(p).unwrap();
    let (add, mult) = (bit("add"), bit("mult"));
    let mut mode = None;
    if !word.is_empty() {
        let all_add = word.iter().all(|l| l.contains(add) && !l.contains(mult));
        let all_mult = word.iter().all(|l| l.contains(mult) && !l.contains(add));
        mode = match (all_add, all_mult) {
            (true, false) => Some(OpMode::Add),
            (false, true) => Some(OpMode::Mult),
            _ => return None,
        };
    }
    let mut markers = PrefixMarkers::default();
    for (marker, slot) in [("argl", 0), ("argr", 1), ("res", 2)] {
        let b = bit(marker);
        let hits: Vec<usize> = word
            .iter()
            .enumerate()
            .filter(|(_, l)| l.contains(b))
            .map(|(i, _)| i)
            .collect();
        if hits.len() > 1 {
            return None;
        }
        let value = hits.first().copied();
        match slot {
            0 => markers.argl = value,
            1 => markers.argr = value,
            _ => markers.res = value,
        }
    }
    Some((mode, markers))
}

fn t_op_prefix_feasible(mode: OpMode, m: PrefixMarkers, len: usize) -> bool {
    let l = len;
    match mode {
        OpMode::Add => match (m.argl, m.argr, m.res) {
            (Some(n1), Some(n2), Some(n3)) => n1 + n2 == n3,
            (Some(n1), Some(n2), None) => n1 + n2 >= l,
            (Some(n1), None, Some(n3)) => n3 >= n1 && n3 - n1 >= l,
            (None, Some(n2), Some(n3)) => n3 >= n2 && n3 - n2 >= l,
            (None, None, Some(_)) => false, // arguments would precede the result
            _ => true,
        },
        OpMode::Mult => match (m.argl, m.argr, m.res) {
            (Some(n1), Some(n2), Some(n3)) => n1 * n2 == n3,
            (Some(n1), Some(n2), None) => n1 * n2 >= l,
            (Some(n1), None, Some(n3)) => n1 == 0 && n3 == 0,
            (None, Some(n2), Some(n3)) => n2 == 0 && n3 == 0,
            (Some(n1), None, None) => n1 >= 1, // argl at 0 forces res at 0
            (None, Some(n2), None) => n2 >= 1,
            (None, None, Some(_)) => false,
            (None, None, None) => true,
        },
    }
}

fn d_prefix_feasible(mode: OpMode, m: PrefixMarkers) -> bool {
    if m.argl.is_some() && m.argr.is_some() {
        return false;
    }
    if let Some(n3) = m.res {
        if mode != OpMode::Mult || n3 != 0 {
            return false;
        }
        if m.argl != Some(0) && m.argr != Some(0) {
            return false;
        }
    }
    true
}

/// Is `word` a prefix of some member of the closed operation family?
pub fn cl_top_prefix(alpha: &Alphabet, word: &[Labels]) -> Result<bool> {
    if alpha != &op_alphabet() {
        return Err(Error::AlphabetMismatch(
            "prefixes are over the alphabet {add, argl, argr, mult, res}".to_string(),
        ));
    }
    if word.is_empty() {
        return Ok(true);
    }
    let (mode, markers) = match decode_prefix(alpha, word) {
        Some(d) => d,
        None => return Ok(false),
    };
    let mode = mode.expect("nonempty word fixes the mode");
    Ok(t_op_prefix_feasible(mode, markers, word.len()) || d_prefix_feasible(mode, markers))
}

/// The prefix tree of the closed operation family, truncated at `depth`;
/// the root is labelled empty, every other vertex by its last letter, and
/// frontier vertices repeat their letter through a self-loop.
pub fn gen_prefix_tree(depth: usize, vertex_cap: usize) -> Result<TransitionSystem> {
    if depth == 0 {
        return Err(Error::InvalidInput(
            "prefix tree depth must be at least 1".to_string(),
        ));
    }
    let alpha = op_alphabet();
    let letters: Vec<Labels> = (0..(1u32 << alpha.len())).map(Labels).collect();
    let mut vertices: Vec<(String, Labels)> = vec![("e".to_string(), Labels::empty())];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // frontier of (vertex index, word)
    let mut frontier: Vec<(usize, Vec<Labels>)> = vec![(0, Vec::new())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (v, word) in frontier {
            let id_prefix = vertices[v].0.clone();
            for letter in &letters {
                let mut extended = word.clone();
                extended.push(*letter);
                if !cl_top_prefix(&alpha, &extended)? {
                    continue;
                }
                if vertices.len() >= vertex_cap {
                    return Err(Error::ResourceLimit(format!("{vertex_cap} vertices")));
                }
                let id = format!("{id_prefix}-{}", letter.0);
                let child = vertices.len();
                vertices.push((id, *letter));
                edges.push((v, child));
                next.push((child, extended));
            }
        }
        frontier = next;
    }
    for (v, _) in &frontier {
        edges.push((*v, *v));
    }
    TransitionSystem::new(alpha, vertices, edges, 0)
}

/// Glues the finite-branching structure and the prefix tree at their
/// initial vertices, over the combined alphabet.
pub fn gen_tsc(depth: usize, vertex_cap: usize) -> Result<TransitionSystem> {
    let tf = gen_tf();
    let tree = gen_prefix_tree(depth, vertex_cap)?;
    let mut props: Vec<String> = tf.alphabet().props().to_vec();
    props.extend(tree.alphabet().props().iter().cloned());
    let alpha = Alphabet::new(props)?;
    let relabel = |old: &Alphabet, l: Labels| -> Labels {
        let mut out = Labels::empty();
        for (i, p) in old.props().iter().enumerate() {
            if l.contains(i) {
                out.insert(alpha.index_of(p).unwrap());
            }
        }
        out
    };
    let mut vertices: Vec<(String, Labels)> = vec![("init".to_string(), Labels::empty())];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // finite-branching part, skipping its initial vertex
    let mut tf_map = vec![0usize; tf.vertex_count()];
    for v in 0..tf.vertex_count() {
        if v == tf.initial() {
            tf_map[v] = 0;
            continue;
        }
        tf_map[v] = vertices.len();
        vertices.push((
            format!("f_{}", tf.id(v)),
            relabel(tf.alphabet(), tf.label(v)),
        ));
    }
    for &(x, y) in tf.edges() {
        edges.push((tf_map[x], tf_map[y]));
    }
    // prefix-tree part, skipping its root
    let mut tree_map = vec![0usize; tree.vertex_count()];
    for v in 0..tree.vertex_count() {
        if v == tree.initial() {
            tree_map[v] = 0;
            continue;
        }
        tree_map[v] = vertices.len();
        vertices.push((
            format!("c_{}", tree.id(v)),
            relabel(tree.alphabet(), tree.label(v)),
        ));
    }
    for &(x, y) in tree.edges() {
        edges.push((tree_map[x], tree_map[y]));
    }
    TransitionSystem::new(alpha, vertices, edges, 0)
}

/// The documented path universe for bounded satisfaction checks over
/// [`gen_tsc`]: all short lassos (stem and loop at most 2) plus, for each
/// mode, the path spelling the zero-times-zero member trace down the
/// prefix tree.
pub fn smoke_universe(tsc: &TransitionSystem) -> Result<PathUniverse> {
    let base = enumerate_lassos(tsc, 2, 2, 1_000_000)?;
    let mut paths: Vec<LassoPath> = base.paths().to_vec();
    let alpha = tsc.alphabet();
    for mode in ["add", "mult"] {
        let mode_bit = alpha
            .index_of(mode)
            .ok_or_else(|| Error::AlphabetMismatch(format!("missing proposition {mode}")))?;
        let all_markers: Labels = {
            let mut l = Labels::singleton(mode_bit);
            for m in ["argl", "argr", "res"] {
                l.insert(alpha.index_of(m).unwrap());
            }
            l
        };
        let bare = Labels::singleton(mode_bit);
        // walk init -> {mode, argl, argr, res} -> {mode} ... -> self-loop
        let first = tsc
            .successors(tsc.initial())
            .iter()
            .copied()
            .find(|&v| tsc.label(v) == all_markers)
            .ok_or_else(|| Error::InvalidInput("zero-times-zero path missing".to_string()))?;
        let mut stem = vec![tsc.initial(), first];
        let mut cur = first;
        while !tsc.has_edge(cur, cur) {
            let next = tsc
                .successors(cur)
                .iter()
                .copied()
                .find(|&v| tsc.label(v) == bare)
                .ok_or_else(|| Error::InvalidInput("mode spine interrupted".to_string()))?;
            stem.push(next);
            cur = next;
        }
        // the self-looping frontier vertex is the cycle, not stem tail
        stem.pop();
        paths.push(LassoPath::new(tsc, stem, vec![cur])?);
    }
    PathUniverse::new(tsc.clone(), paths)
}

// ---------------------------------------------------------------------------
// existential third-order arithmetic -> path-quantified temporal formulas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E3aVariant {
    /// Order-2 prefix allowed; sets live on `pset` chains.
    ThirdOrder,
    /// Second-order input only; sets live on `fbt` paths.
    SecondOrderFb,
}

fn pi(var: &str) -> String {
    format!("v_{var}")
}

struct E3aCx {
    variant: E3aVariant,
    /// order-2 prefix variables, in order; their index names the `a_i`.
    order2: Vec<String>,
    fresh: usize,
}

impl E3aCx {
    fn world_prop(&self) -> &'static str {
        match self.variant {
            E3aVariant::ThirdOrder => "pset",
            E3aVariant::SecondOrderFb => "fbt",
        }
    }

    fn fresh_op_var(&mut self) -> String {
        let v = format!("w{}", self.fresh);
        self.fresh += 1;
        v
    }

    fn set_guard(&self, path: &str) -> Formula {
        Formula::next(Formula::atom(self.world_prop(), path))
    }

    fn singleton_guard(&self, path: &str) -> Formula {
        // the path carries exactly one b1, i.e. it encodes one number
        Formula::and(
            self.set_guard(path),
            Formula::next(Formula::until(
                Formula::atom("b0", path),
                Formula::and(
                    Formula::atom("b1", path),
                    Formula::next(Formula::globally(Formula::atom("b0", path))),
                ),
            )),
        )
    }

    fn number_var(t: &Term) -> Result<&str> {
        match t {
            Term::Var(v) => Ok(v),
            other => Err(Error::UnsupportedShape(format!(
                "arithmetic atoms must use plain variables, found {other:?}"
            ))),
        }
    }

    fn op_atom(&mut self, mode: &str, x: &Term, y: &Term, z: &Term) -> Result<Formula> {
        let (x, y, z) = (
            Self::number_var(x)?,
            Self::number_var(y)?,
            Self::number_var(z)?,
        );
        let p = self.fresh_op_var();
        let marker = |m: &str, arg: &str| {
            Formula::eventually(Formula::and(
                Formula::atom(m, p.clone()),
                Formula::atom("b1", pi(arg)),
            ))
        };
        Ok(Formula::exists(
            p.clone(),
            Formula::conj([
                Formula::next(Formula::atom(mode, p.clone())),
                marker("argl", x),
                marker("argr", y),
                marker("res", z),
            ]),
        ))
    }

    fn tr(&mut self, f: &ArithFormula, sorts: &HashMap<String, Sort>) -> Result<Formula> {
        match f {
            ArithFormula::Or(a, b) => Ok(Formula::or(self.tr(a, sorts)?, self.tr(b, sorts)?)),
            ArithFormula::And(a, b) => Ok(Formula::and(self.tr(a, sorts)?, self.tr(b, sorts)?)),
            ArithFormula::Implies(a, b) => {
                Ok(Formula::implies(self.tr(a, sorts)?, self.tr(b, sorts)?))
            }
            ArithFormula::Not(a) => Ok(Formula::not(self.tr(a, sorts)?)),
            ArithFormula::Exists(v, sort, body) | ArithFormula::Forall(v, sort, body) => {
                let existential = matches!(f, ArithFormula::Exists(..));
                let guard = match sort {
                    Sort::Number => self.singleton_guard(&pi(v)),
                    Sort::Set => self.set_guard(&pi(v)),
                    other => {
                        return Err(Error::UnsupportedShape(format!(
                            "cannot quantify a {} variable under the translation",
                            other.annotation()
                        )))
                    }
                };
                let mut inner_sorts = sorts.clone();
                inner_sorts.insert(v.clone(), *sort);
                let inner = self.tr(body, &inner_sorts)?;
                Ok(if existential {
                    Formula::exists(pi(v), Formula::and(guard, inner))
                } else {
                    Formula::forall(pi(v), Formula::implies(guard, inner))
                })
            }
            ArithFormula::InSet(t, set) => {
                let x = Self::number_var(t)?;
                Ok(Formula::eventually(Formula::and(
                    Formula::atom("b1", pi(x)),
                    Formula::atom("b1", pi(set)),
                )))
            }
            ArithFormula::SetInSetSet(set, big) => {
                if self.variant != E3aVariant::ThirdOrder {
                    return Err(Error::UnsupportedShape(
                        "order-2 membership needs the third-order variant".to_string(),
                    ));
                }
                let i =
                    self.order2.iter().position(|v| v == big).ok_or_else(|| {
                        Error::SortError(format!("unbound order-2 variable {big}"))
                    })?;
                Ok(Formula::next(Formula::atom(format!("a{}", i + 1), pi(set))))
            }
            ArithFormula::Lt(a, b) => {
                let (x, y) = (Self::number_var(a)?, Self::number_var(b)?);
                Ok(Formula::eventually(Formula::and(
                    Formula::atom("b1", pi(x)),
                    Formula::next(Formula::eventually(Formula::atom("b1", pi(y)))),
                )))
            }
            ArithFormula::AddEq(a, b, c) => self.op_atom("add", a, b, c),
            ArithFormula::MulEq(a, b, c) => self.op_atom("mult", a, b, c),
            other => Err(Error::UnsupportedShape(format!(
                "atom {other:?} has no counterpart under the translation"
            ))),
        }
    }
}

/// Relativizes one conjunct of an operation-family sentence to the paths
/// that step into the operation world: quantifiers stay anchored at the
/// initial vertex, guarded by `X (add | mult)`, and the quantifier-free
/// matrix is shifted one step so it reads labels from the second vertex
/// on. The shift distributes through Boolean structure, so quantifiers
/// below connectives keep their initial-vertex anchoring; quantifiers
/// below temporal operators are not supported (and do not occur in the
/// operation-family conjuncts).
fn relativize_op(f: &Formula) -> Formula {
    if f.is_quantifier_free() {
        return Formula::next(f.clone());
    }
    let guard = |v: &str| {
        Formula::next(Formula::or(Formula::atom("add", v), Formula::atom("mult", v)))
    };
    match f {
        Formula::Exists(v, body) => {
            Formula::exists(v.clone(), Formula::and(guard(v), relativize_op(body)))
        }
        Formula::Forall(v, body) => {
            Formula::forall(v.clone(), Formula::implies(guard(v), relativize_op(body)))
        }
        Formula::And(a, b) => Formula::and(relativize_op(a), relativize_op(b)),
        Formula::Or(a, b) => Formula::or(relativize_op(a), relativize_op(b)),
        Formula::Implies(a, b) => Formula::implies(relativize_op(a), relativize_op(b)),
        Formula::Iff(a, b) => Formula::iff(relativize_op(a), relativize_op(b)),
        Formula::Not(a) => Formula::not(relativize_op(a)),
        matrix => Formula::next(matrix.clone()),
    }
}

fn no_op_props(var: &str) -> Formula {
    Formula::conj(
        OP_PROPS
            .iter()
            .map(|p| Formula::not(Formula::atom(*p, var))),
    )
}

/// Frame conjuncts for the third-order variant: initial-vertex label,
/// world discipline, order-2 labelling placement and consistency, the
/// subset-explosion conjuncts, and the relativized exact operation family.
fn e3a_frame_third_order(n_order2: usize) -> Vec<Formula> {
    let ai = |i: usize, v: &str| Formula::atom(format!("a{}", i + 1), v);
    let no_ai = |v: &str| Formula::conj((0..n_order2).map(|i| Formula::not(ai(i, v))));
    let f1 = Formula::forall(
        "p",
        Formula::conj([
            Formula::atom("fbt", "p"),
            Formula::not(Formula::atom("b0", "p")),
            Formula::not(Formula::atom("b1", "p")),
            Formula::not(Formula::atom("pset", "p")),
            no_op_props("p"),
            no_ai("p"),
        ]),
    );
    let world = Formula::disj([
        Formula::conj([
            Formula::atom("pset", "p"),
            Formula::not(Formula::atom("fbt", "p")),
            no_op_props("p"),
            Formula::iff(
                Formula::atom("b0", "p"),
                Formula::not(Formula::atom("b1", "p")),
            ),
        ]),
        Formula::conj([
            Formula::atom("fbt", "p"),
            Formula::not(Formula::atom("pset", "p")),
            no_op_props("p"),
            Formula::iff(
                Formula::atom("b0", "p"),
                Formula::not(Formula::atom("b1", "p")),
            ),
        ]),
        Formula::conj([
            Formula::or(Formula::atom("add", "p"), Formula::atom("mult", "p")),
            Formula::not(Formula::atom("pset", "p")),
            Formula::not(Formula::atom("fbt", "p")),
            Formula::not(Formula::atom("b0", "p")),
            Formula::not(Formula::atom("b1", "p")),
        ]),
    ]);
    let f2 = Formula::forall("p", Formula::next(Formula::globally(world)));
    let f3 = Formula::forall(
        "p",
        Formula::and(
            Formula::next(Formula::implies(
                Formula::not(Formula::atom("pset", "p")),
                no_ai("p"),
            )),
            Formula::next(Formula::next(Formula::globally(no_ai("p")))),
        ),
    );
    let mut parts = vec![f1, f2, f3];
    // the subset-explosion conjuncts 2-5 (conjunct 1 is replaced by the
    // adapted label discipline above)
    parts.extend(phi_set_parts().into_iter().skip(1));
    // order-2 labelling is a function of the encoded set
    if n_order2 > 0 {
        parts.push(Formula::forall(
            "p",
            Formula::forall(
                "q",
                Formula::next(Formula::implies(
                    Formula::globally(Formula::conj([
                        Formula::atom("pset", "p"),
                        Formula::atom("pset", "q"),
                        Formula::iff(Formula::atom("b1", "p"), Formula::atom("b1", "q")),
                    ])),
                    Formula::conj((0..n_order2).map(|i| Formula::iff(ai(i, "p"), ai(i, "q")))),
                )),
            ),
        ));
    }
    parts.extend(phi_op_parts().iter().map(relativize_op));
    parts
}

/// Frame conjuncts for the finitely-branching variant: initial label,
/// world discipline, persistence and branching of the set world, and the
/// relativized closed operation family. The argument-successor conjunct
/// of the closed family is left out here: it has no finite path universe
/// satisfying it, so the bounded assembly defers it to the standalone
/// generator.
fn e3a_frame_fb() -> Vec<Formula> {
    let f1 = Formula::forall(
        "p",
        Formula::conj([
            Formula::not(Formula::atom("fbt", "p")),
            Formula::not(Formula::atom("b0", "p")),
            Formula::not(Formula::atom("b1", "p")),
            no_op_props("p"),
        ]),
    );
    let world = Formula::disj([
        Formula::conj([
            Formula::atom("fbt", "p"),
            no_op_props("p"),
            Formula::iff(
                Formula::atom("b0", "p"),
                Formula::not(Formula::atom("b1", "p")),
            ),
        ]),
        Formula::conj([
            Formula::or(Formula::atom("add", "p"), Formula::atom("mult", "p")),
            Formula::not(Formula::atom("fbt", "p")),
            Formula::not(Formula::atom("b0", "p")),
            Formula::not(Formula::atom("b1", "p")),
        ]),
    ]);
    let f2 = Formula::forall("p", Formula::next(Formula::globally(world)));
    let f3 = Formula::forall(
        "p",
        Formula::next(Formula::globally(Formula::implies(
            Formula::atom("fbt", "p"),
            Formula::next(Formula::atom("fbt", "p")),
        ))),
    );
    let f4 = Formula::forall(
        "p",
        Formula::globally(Formula::implies(
            Formula::atom("fbt", "p"),
            Formula::and(
                Formula::exists(
                    "p0",
                    Formula::next(Formula::and(
                        Formula::atom("fbt", "p0"),
                        Formula::atom("b0", "p0"),
                    )),
                ),
                Formula::exists(
                    "p1",
                    Formula::next(Formula::and(
                        Formula::atom("fbt", "p1"),
                        Formula::atom("b1", "p1"),
                    )),
                ),
            ),
        )),
    );
    let mut parts = vec![f1, f2, f3, f4];
    let cl = phi_op_cl_parts();
    for (i, part) in cl.iter().enumerate() {
        if i == 5 {
            continue; // argument-successor completeness, see above
        }
        parts.push(relativize_op(part));
    }
    parts
}

/// Translates a sentence of (existential third-order or second-order)
/// arithmetic into a path-quantified temporal sentence: the frame pins the
/// intended structure shape, and the body clauses map quantifiers to
/// guarded path quantifiers and atoms to marker patterns.
pub fn translate_e3a(f: &ArithFormula, variant: E3aVariant) -> Result<Formula> {
    f.check_sorts()?;
    let mut order2 = Vec::new();
    let mut body = f;
    if variant == E3aVariant::ThirdOrder {
        while let ArithFormula::Exists(v, Sort::SetSet, inner) = body {
            order2.push(v.clone());
            body = inner;
        }
    }
    // no order-2 quantification may remain in the matrix
    fn no_order2(f: &ArithFormula) -> bool {
        match f {
            ArithFormula::Exists(_, Sort::SetSet, _) | ArithFormula::Forall(_, Sort::SetSet, _) => {
                false
            }
            _ => f.children().iter().all(|c| no_order2(c)),
        }
    }
    if !no_order2(body) {
        return Err(Error::UnsupportedShape(
            "order-2 quantifiers are only allowed as an existential prefix of the third-order variant"
                .to_string(),
        ));
    }
    let mut cx = E3aCx {
        variant,
        order2,
        fresh: 0,
    };
    let mut sorts = HashMap::new();
    for v in &cx.order2 {
        sorts.insert(v.clone(), Sort::SetSet);
    }
    let translated = {
        let order2 = cx.order2.clone();
        let mut sorts = sorts;
        for v in order2 {
            sorts.insert(v, Sort::SetSet);
        }
        cx.tr(body, &sorts)?
    };
    let frame = match variant {
        E3aVariant::ThirdOrder => e3a_frame_third_order(cx.order2.len()),
        E3aVariant::SecondOrderFb => e3a_frame_fb(),
    };
    Ok(Formula::and(Formula::conj(frame), translated))
}

// ---------------------------------------------------------------------------
// path-quantified temporal sentences -> second-order arithmetic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoaVariant {
    Countable,
    FinitelyBranching,
}

struct SoaCx {
    props: Vec<String>,
    fresh: usize,
}

impl SoaCx {
    fn fresh_num(&mut self, base: &str) -> String {
        let v = format!("{base}{}", self.fresh);
        self.fresh += 1;
        v
    }

    /// Encoding of a valuation as a natural number: bit `i` is the `i`-th
    /// proposition in sorted order.
    fn valuation_code(&self, subset: &BTreeSet<usize>) -> u64 {
        subset.iter().map(|i| 1u64 << i).sum()
    }

    fn path_of(var: &str) -> String {
        format!("f_{var}")
    }

    fn path_formula(f: &str) -> ArithFormula {
        // every consecutive pair of values is an edge
        ArithFormula::forall(
            "n",
            Sort::Number,
            ArithFormula::EdgeIn(
                Term::apply(f, Term::var("n")),
                Term::apply(f, Term::plus(Term::var("n"), 1)),
                "E".to_string(),
            ),
        )
    }

    fn branch_formula(f: &str, anchor: &str, i: &Term) -> ArithFormula {
        // the two paths agree up to and including position i
        ArithFormula::conj([
            Self::path_formula(f),
            Self::path_formula(anchor),
            ArithFormula::forall(
                "j",
                Sort::Number,
                ArithFormula::implies(
                    ArithFormula::Le(Term::var("j"), i.clone()),
                    ArithFormula::Eq(
                        Term::apply(f, Term::var("j")),
                        Term::apply(anchor, Term::var("j")),
                    ),
                ),
            ),
        ])
    }

    fn tr(&mut self, f: &Formula, vars: &[String], i: &Term) -> Result<ArithFormula> {
        match f {
            Formula::True => Ok(ArithFormula::Eq(Term::Const(0), Term::Const(0))),
            Formula::False => Ok(ArithFormula::not(ArithFormula::Eq(
                Term::Const(0),
                Term::Const(0),
            ))),
            Formula::Atom { prop, var } => {
                let bit = self.props.iter().position(|p| p == prop).ok_or_else(|| {
                    Error::AlphabetMismatch(format!("unknown proposition {prop}"))
                })?;
                if !vars.iter().any(|v| v == var) {
                    return Err(Error::UnboundVariable(var.clone()));
                }
                let mut cases = Vec::new();
                for mask in 0..(1u64 << self.props.len()) {
                    if mask & (1 << bit) != 0 {
                        let subset: BTreeSet<usize> = (0..self.props.len())
                            .filter(|j| mask & (1 << j) != 0)
                            .collect();
                        cases.push(ArithFormula::Eq(
                            Term::apply("lambda", Term::apply(Self::path_of(var), i.clone())),
                            Term::Const(self.valuation_code(&subset)),
                        ));
                    }
                }
                Ok(ArithFormula::disj(cases))
            }
            Formula::Not(a) => Ok(ArithFormula::not(self.tr(a, vars, i)?)),
            Formula::Or(a, b) => Ok(ArithFormula::or(self.tr(a, vars, i)?, self.tr(b, vars, i)?)),
            Formula::Next(a) => self.tr(a, vars, &Term::plus(i.clone(), 1)),
            Formula::Until(a, b) => {
                let j = self.fresh_num("j");
                let jp = self.fresh_num("j");
                let right = self.tr(b, vars, &Term::var(j.clone()))?;
                let left = self.tr(a, vars, &Term::var(jp.clone()))?;
                Ok(ArithFormula::exists(
                    j.clone(),
                    Sort::Number,
                    ArithFormula::conj([
                        ArithFormula::Le(i.clone(), Term::var(j.clone())),
                        right,
                        ArithFormula::forall(
                            jp.clone(),
                            Sort::Number,
                            ArithFormula::implies(
                                ArithFormula::and(
                                    ArithFormula::Le(i.clone(), Term::var(jp.clone())),
                                    ArithFormula::Lt(Term::var(jp), Term::var(j)),
                                ),
                                left,
                            ),
                        ),
                    ]),
                ))
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let existential = matches!(f, Formula::Exists(..));
                let fv = Self::path_of(v);
                let mut inner_vars = vars.to_vec();
                inner_vars.push(v.clone());
                let constraint = if let Some(last) = vars.last() {
                    Self::branch_formula(&fv, &Self::path_of(last), i)
                } else {
                    // sentence level: anchored at the initial vertex 0
                    ArithFormula::and(
                        Self::path_formula(&fv),
                        ArithFormula::Eq(Term::apply(&fv, Term::Const(0)), Term::Const(0)),
                    )
                };
                let inner = self.tr(body, &inner_vars, i)?;
                Ok(if existential {
                    ArithFormula::exists(fv, Sort::Func, ArithFormula::and(constraint, inner))
                } else {
                    ArithFormula::forall(fv, Sort::Func, ArithFormula::implies(constraint, inner))
                })
            }
            other => Err(Error::InvalidInput(format!(
                "non-core operator {other:?} after desugaring"
            ))),
        }
    }
}

/// Translates a path-quantified temporal sentence into second-order
/// arithmetic: a model with vertex set N is described by an existential
/// edge relation and labelling function, paths become functions, and
/// nested quantification branches off the most recently quantified path at
/// the current time point.
pub fn translate_hyperctl_to_soa(f: &Formula, variant: SoaVariant) -> Result<ArithFormula> {
    if !f.is_ctlstar_wellformed() || !f.is_sentence() {
        return Err(Error::Dialect(
            "translation needs a well-formed path-quantified sentence".to_string(),
        ));
    }
    let core = f.desugar();
    let props: Vec<String> = core.propositions().into_iter().collect();
    let mut cx = SoaCx {
        props: props.clone(),
        fresh: 0,
    };
    let body = cx.tr(&core, &[], &Term::Const(0))?;
    let serial = ArithFormula::forall(
        "x",
        Sort::Number,
        ArithFormula::exists(
            "y",
            Sort::Number,
            ArithFormula::EdgeIn(Term::var("x"), Term::var("y"), "E".to_string()),
        ),
    );
    let finite_branching = ArithFormula::forall(
        "x",
        Sort::Number,
        ArithFormula::exists(
            "y",
            Sort::Number,
            ArithFormula::forall(
                "z",
                Sort::Number,
                ArithFormula::implies(
                    ArithFormula::EdgeIn(Term::var("x"), Term::var("z"), "E".to_string()),
                    ArithFormula::Lt(Term::var("z"), Term::var("y")),
                ),
            ),
        ),
    );
    let label_range = ArithFormula::forall(
        "x",
        Sort::Number,
        ArithFormula::Lt(
            Term::apply("lambda", Term::var("x")),
            Term::Const(1u64 << props.len()),
        ),
    );
    let mut conjuncts = vec![serial];
    if variant == SoaVariant::FinitelyBranching {
        conjuncts.push(finite_branching);
    }
    conjuncts.push(label_range);
    conjuncts.push(body);
    Ok(ArithFormula::exists(
        "E",
        Sort::PairSet,
        ArithFormula::exists("lambda", Sort::Func, ArithFormula::conj(conjuncts)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::prenex;
    use crate::syntax::print_formula;
    use crate::trace::{eval_hyperltl, TraceSet};

    fn parse(s: &str) -> ArithFormula {
        parse_arith_formula(s).unwrap()
    }

    #[test]
    fn arith_grammar_roundtrip() {
        for s in [
            "exists x:N. x + x = x",
            "forall x:N. x < x",
            "exists x:N. forall y:N. y < x",
            "exists E:pairset. forall x:N. exists y:N. (x, y) in E",
            "exists f:fn. forall n:N. f(n) < f(n + 1)",
            "exists A:set. exists X:set2. A in X & 0 in A",
            "forall x:N. x <= x + 1",
        ] {
            let f = parse(s);
            f.check_sorts().unwrap();
            let printed = print_arith_formula(&f);
            assert_eq!(parse(&printed), f, "via {printed:?}");
        }
    }

    #[test]
    fn sort_errors_detected() {
        let bad = parse("exists A:set. A < A");
        assert!(matches!(bad.check_sorts(), Err(Error::SortError(_))));
        let bad = parse("exists x:N. x in x");
        assert!(matches!(bad.check_sorts(), Err(Error::SortError(_))));
    }

    #[test]
    fn bounded_eval_examples() {
        let bounds = ArithBounds::new(4, 4).unwrap();
        assert_eq!(
            eval_bounded_arith(&parse("exists x:N. x + x = x"), &bounds).unwrap(),
            Truth::True
        );
        assert_eq!(
            eval_bounded_arith(&parse("forall x:N. x < x"), &bounds).unwrap(),
            Truth::False
        );
        assert_eq!(
            eval_bounded_arith(&parse("exists x:N. forall y:N. y < x"), &bounds).unwrap(),
            Truth::Unknown
        );
    }

    #[test]
    fn bounded_eval_with_sets() {
        let bounds = ArithBounds::new(3, 3).unwrap();
        assert_eq!(
            eval_bounded_arith(&parse("exists A:set. 0 in A & !(1 in A)"), &bounds).unwrap(),
            Truth::True
        );
        assert_eq!(
            eval_bounded_arith(&parse("forall A:set. 0 in A"), &bounds).unwrap(),
            Truth::False
        );
    }

    #[test]
    fn op_membership_examples() {
        let alpha = op_alphabet();
        // {add, argl, argr, res} then add forever: 0 + 0 = 0
        let t = op_trace(OpMode::Add, Some(0), Some(0), Some(0));
        assert!(t_op_member(&alpha, &t).unwrap());
        assert!(!d_member(&alpha, &t).unwrap());

        // add with argl@1, argr@2, res@3
        let t = op_trace(OpMode::Add, Some(1), Some(2), Some(3));
        assert!(t_op_member(&alpha, &t).unwrap());

        // mult with argl@2, argr@3, res@5 is wrong
        let t = op_trace(OpMode::Mult, Some(2), Some(3), Some(5));
        assert!(!t_op_member(&alpha, &t).unwrap());
        assert!(!cl_top_member(&alpha, &t).unwrap());
    }

    #[test]
    fn closure_examples() {
        let alpha = op_alphabet();
        let l = |names: &[&str]| alpha.labels(names).unwrap();
        // add forever
        let t = UpTrace::new(vec![], vec![l(&["add"])]).unwrap();
        assert!(cl_top_member(&alpha, &t).unwrap());
        assert!(!t_op_member(&alpha, &t).unwrap());
        // mult, argr once, mult forever
        let t = UpTrace::new(vec![l(&["mult"]), l(&["argr", "mult"])], vec![l(&["mult"])]).unwrap();
        assert!(cl_top_member(&alpha, &t).unwrap());
        assert!(!t_op_member(&alpha, &t).unwrap());
        // the zero-times-unbounded limit: res and argl at 0, no argr
        let t = op_trace(OpMode::Mult, Some(0), None, Some(0));
        assert!(d_member(&alpha, &t).unwrap());
        assert!(cl_top_member(&alpha, &t).unwrap());
        // an addition trace missing a result is a limit too
        let t = op_trace(OpMode::Add, Some(2), None, None);
        assert!(d_member(&alpha, &t).unwrap());
    }

    #[test]
    fn d_membership_disjoint_from_exact() {
        let alpha = op_alphabet();
        // structured enumeration: all mode/marker layouts within 8 positions
        let mut options = vec![None];
        options.extend((0..8).map(Some));
        for mode in [OpMode::Add, OpMode::Mult] {
            for &argl in &options {
                for &argr in &options {
                    for &res in &options {
                        let t = op_trace(mode, argl, argr, res);
                        let ex = t_op_member(&alpha, &t).unwrap();
                        let lim = d_member(&alpha, &t).unwrap();
                        assert!(!(ex && lim), "{mode:?} {argl:?} {argr:?} {res:?}");
                        assert_eq!(
                            cl_top_member(&alpha, &t).unwrap(),
                            ex || lim,
                            "{mode:?} {argl:?} {argr:?} {res:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn phi_op_conjunct_counts() {
        assert_eq!(phi_op_parts().len(), 8);
        assert_eq!(phi_op_cl_parts().len(), 10);
        assert_eq!(phi_set_parts().len(), 5);
        assert_eq!(gen_phi_set().top_conjuncts().len(), 5);
    }

    #[test]
    fn per_trace_conjuncts_hold_on_members() {
        let alpha = op_alphabet();
        // per-trace universal conjuncts of the exact family: 1, 2, 5, 7
        let parts = phi_op_parts();
        for t in t_op_truncation(2) {
            let model = TraceSet::new(alpha.clone(), vec![t.clone()]).unwrap();
            for idx in [0usize, 1, 4, 6] {
                assert!(
                    eval_hyperltl(&model, &prenex(&parts[idx]).unwrap()).unwrap(),
                    "conjunct {} on {t:?}",
                    idx + 1
                );
            }
        }
        // per-trace conjuncts of the closed family: 1-4
        let cl = phi_op_cl_parts();
        let l = |names: &[&str]| alpha.labels(names).unwrap();
        let limits = vec![
            UpTrace::new(vec![], vec![l(&["add"])]).unwrap(),
            UpTrace::new(vec![l(&["mult"]), l(&["argr", "mult"])], vec![l(&["mult"])]).unwrap(),
            op_trace(OpMode::Mult, Some(0), None, Some(0)),
        ];
        for t in t_op_truncation(2).into_iter().chain(limits) {
            let model = TraceSet::new(alpha.clone(), vec![t.clone()]).unwrap();
            for idx in [0usize, 1, 2, 3] {
                assert!(
                    eval_hyperltl(&model, &prenex(&cl[idx]).unwrap()).unwrap(),
                    "closed conjunct {} on {t:?}",
                    idx + 1
                );
            }
        }
    }

    #[test]
    fn truncation_conjunct_pattern() {
        let alpha = op_alphabet();
        let model = TraceSet::new(alpha, t_op_truncation(2)).unwrap();
        let parts = phi_op_parts();
        let values: Vec<bool> = parts
            .iter()
            .map(|p| eval_hyperltl(&model, &prenex(p).unwrap()).unwrap())
            .collect();
        assert_eq!(
            values,
            vec![true, true, true, false, true, true, true, true]
        );
    }

    #[test]
    fn kset_structure() {
        let cfg = StructureGenConfig {
            tree_depth: 2,
            subset_bound: 1,
            chain_len: 3,
            ..Default::default()
        };
        let k = gen_kset(&cfg).unwrap();
        // 7 tree vertices + 4 chains of 4
        assert_eq!(k.vertex_count(), 7 + 4 * 4);
        for v in 0..k.vertex_count() {
            assert!(!k.successors(v).is_empty());
        }
        let alpha = k.alphabet().clone();
        let pset = alpha.index_of("pset").unwrap();
        let b1 = alpha.index_of("b1").unwrap();
        // the {0}-chain reads b1 then b0s
        let s10_0 = k.vertex_by_id("s10_0").unwrap();
        assert!(k.label(s10_0).contains(pset) && k.label(s10_0).contains(b1));
        let s10_1 = k.vertex_by_id("s10_1").unwrap();
        assert!(!k.label(s10_1).contains(b1));
    }

    #[test]
    fn tf_structure() {
        let tf = gen_tf();
        assert_eq!(tf.vertex_count(), 3);
        let (v0, v1) = (
            tf.vertex_by_id("v0").unwrap(),
            tf.vertex_by_id("v1").unwrap(),
        );
        for (x, y) in [(v0, v0), (v0, v1), (v1, v0), (v1, v1)] {
            assert!(tf.has_edge(x, y));
        }
        assert!(tf.has_edge(tf.initial(), v0) && tf.has_edge(tf.initial(), v1));
        assert!(tf.label(tf.initial()).is_empty());
    }

    #[test]
    fn prefix_predicate_matches_enumeration() {
        let alpha = op_alphabet();
        // ground truth: prefixes of members with markers below 10
        let mut family = Vec::new();
        let mut options = vec![None];
        options.extend((0..10).map(Some));
        for mode in [OpMode::Add, OpMode::Mult] {
            for &argl in &options {
                for &argr in &options {
                    for &res in &options {
                        let t = op_trace(mode, argl, argr, res);
                        if cl_top_member(&alpha, &t).unwrap() {
                            family.push(t);
                        }
                    }
                }
            }
        }
        let letters: Vec<Labels> = (0..32u32).map(Labels).collect();
        for len in 1..=3usize {
            let mut idx = vec![0usize; len];
            loop {
                let word: Vec<Labels> = idx.iter().map(|&i| letters[i]).collect();
                let predicted = cl_top_prefix(&alpha, &word).unwrap();
                let actual = family.iter().any(|t| (0..len).all(|p| t.at(p) == word[p]));
                assert_eq!(predicted, actual, "word {idx:?}");
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
    }

    #[test]
    fn prefix_tree_level_one() {
        let tree = gen_prefix_tree(1, 10_000).unwrap();
        let alpha = tree.alphabet();
        assert!(tree.label(tree.initial()).is_empty());
        let children: Vec<Labels> = tree
            .successors(tree.initial())
            .iter()
            .map(|&v| tree.label(v))
            .collect();
        // singleton letters among the children: exactly {add} and {mult}
        let singles: Vec<&Labels> = children.iter().filter(|l| l.0.count_ones() == 1).collect();
        let add = Labels::singleton(alpha.index_of("add").unwrap());
        let mult = Labels::singleton(alpha.index_of("mult").unwrap());
        assert!(singles.contains(&&add) && singles.contains(&&mult));
        assert_eq!(singles.len(), 2);
    }

    #[test]
    fn e3a_translation_clause_shapes() {
        // y in X for a set y and an order-2 X
        let f = parse("exists X:set2. forall y:set. y in X | !(y in X)");
        let t = translate_e3a(&f, E3aVariant::ThirdOrder).unwrap();
        assert!(t.is_ctlstar_wellformed());
        let printed = print_formula(&t);
        assert!(
            printed.contains("X a1[v_y]"),
            "order-2 membership clause: {printed}"
        );
        assert!(
            printed.contains("X pset[v_y]"),
            "set relativization: {printed}"
        );

        // x < y
        let f = parse("exists x:N. exists y:N. x < y");
        let t = translate_e3a(&f, E3aVariant::SecondOrderFb).unwrap();
        let printed = print_formula(&t);
        assert!(printed.contains("F (b1[v_x] & X F b1[v_y])"), "{printed}");
        assert!(printed.contains("X fbt[v_x]"), "{printed}");

        // addition anchors an operation path
        let f = parse("exists x:N. x + x = x");
        let t = translate_e3a(&f, E3aVariant::SecondOrderFb).unwrap();
        let printed = print_formula(&t);
        assert!(printed.contains("X add[w0]"), "{printed}");
        assert!(printed.contains("F (argl[w0] & b1[v_x])"), "{printed}");
    }

    #[test]
    fn e3a_rejects_inner_order2() {
        let f = parse("forall X:set2. exists A:set. A in X");
        assert!(matches!(
            translate_e3a(&f, E3aVariant::ThirdOrder),
            Err(Error::UnsupportedShape(_))
        ));
    }

    #[test]
    fn soa_translation_shapes() {
        let f = crate::syntax::parse_formula("exists p. a[p]", Dialect::HyperCtlStar);
        use crate::syntax::Dialect;
        let f = f.unwrap();
        let t = translate_hyperctl_to_soa(&f, SoaVariant::Countable).unwrap();
        t.check_sorts().unwrap();
        let printed = print_arith_formula(&t);
        assert!(
            printed.contains("(f_p(n), f_p(n + 1)) in E"),
            "path clause: {printed}"
        );
        assert!(printed.contains("f_p(0) = 0"), "anchoring: {printed}");
        // atom clause: disjunction over valuations containing a
        assert!(printed.contains("lambda(f_p(0)) = 1"), "{printed}");
        let back = parse_arith_formula(&printed).unwrap();
        assert_eq!(back, t, "round-trip through {printed:?}");

        let fb = translate_hyperctl_to_soa(&f, SoaVariant::FinitelyBranching).unwrap();
        let count_parts = {
            let ArithFormula::Exists(_, _, inner) = &t else {
                panic!()
            };
            let ArithFormula::Exists(_, _, inner) = inner.as_ref() else {
                panic!()
            };
            inner.top_conjuncts().len()
        };
        let fb_parts = {
            let ArithFormula::Exists(_, _, inner) = &fb else {
                panic!()
            };
            let ArithFormula::Exists(_, _, inner) = inner.as_ref() else {
                panic!()
            };
            inner.top_conjuncts().len()
        };
        assert_eq!(fb_parts, count_parts + 1);
    }

    #[test]
    fn soa_nested_quantifier_branches_off_recent_path() {
        use crate::syntax::Dialect;
        let f = crate::syntax::parse_formula("exists p. X exists q. a[q]", Dialect::HyperCtlStar)
            .unwrap();
        let t = translate_hyperctl_to_soa(&f, SoaVariant::Countable).unwrap();
        t.check_sorts().unwrap();
        let printed = print_arith_formula(&t);
        // the nested path agrees with the anchor up to the current time
        assert!(printed.contains("f_q(j) = f_p(j)"), "{printed}");
    }
}
