//! Concrete text grammar for formulas plus the line-delimited interchange
//! formats for trace sets, transition systems, and tile sets.
//!
//! Formula grammar (EBNF):
//!
//! ```text
//! formula  ::= quant | iff
//! quant    ::= ("exists" | "forall") ident "." formula
//! iff      ::= impl ("<->" iff)?
//! impl     ::= or ("->" impl)?
//! or       ::= and ("|" or)?
//! and      ::= until ("&" and)?
//! until    ::= unary ("U" until)?
//! unary    ::= ("!" | "X" | "F" | "G") unary | primary
//! primary  ::= "true" | "false" | ident "[" ident "]" | "(" formula ")"
//! ident    ::= [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Unary operators bind tightest, then `U` (right-associative), then `&`,
//! `|`, `->` (right-associative), and `<->`; quantifiers extend maximally
//! to the right. Proposition and variable names are plain identifiers, so
//! the conventional `$`, `0`, and `1` marker propositions are spelled
//! `dollar`, `b0`, and `b1`.

use crate::error::{Error, Result, SourceSpan};
use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// Prenex quantification over a quantifier-free temporal body.
    HyperLtl,
    /// Quantifiers anywhere, every temporal operator under one.
    HyperCtlStar,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(mut self) -> Result<Vec<(Tok, SourceSpan)>> {
        let mut out = Vec::new();
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let start = self.pos;
            let c = bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                    continue;
                }
                b'(' => out.push((Tok::LParen, self.bump(start, 1))),
                b')' => out.push((Tok::RParen, self.bump(start, 1))),
                b'[' => out.push((Tok::LBracket, self.bump(start, 1))),
                b']' => out.push((Tok::RBracket, self.bump(start, 1))),
                b'.' => out.push((Tok::Dot, self.bump(start, 1))),
                b'!' => out.push((Tok::Bang, self.bump(start, 1))),
                b'&' => out.push((Tok::Amp, self.bump(start, 1))),
                b'|' => out.push((Tok::Pipe, self.bump(start, 1))),
                b'-' => {
                    if bytes.get(self.pos + 1) == Some(&b'>') {
                        out.push((Tok::Arrow, self.bump(start, 2)));
                    } else {
                        return Err(self.unexpected(start));
                    }
                }
                b'<' => {
                    if bytes.get(self.pos + 1) == Some(&b'-')
                        && bytes.get(self.pos + 2) == Some(&b'>')
                    {
                        out.push((Tok::DArrow, self.bump(start, 3)));
                    } else {
                        return Err(self.unexpected(start));
                    }
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut end = self.pos + 1;
                    while end < bytes.len()
                        && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                    {
                        end += 1;
                    }
                    let word = self.src[self.pos..end].to_string();
                    self.pos = end;
                    out.push((Tok::Ident(word), SourceSpan::new(start, end)));
                }
                _ => return Err(self.unexpected(start)),
            }
        }
        Ok(out)
    }

    fn bump(&mut self, start: usize, len: usize) -> SourceSpan {
        self.pos += len;
        SourceSpan::new(start, start + len)
    }

    fn unexpected(&self, at: usize) -> Error {
        Error::Syntax {
            span: SourceSpan::new(at, at + 1),
            message: format!("unexpected character {:?}", &self.src[at..at + 1]),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan::new(self.end, self.end))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                span: self.span(),
                message: format!("expected {what}"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == "exists" || w == "forall" {
                let existential = w == "exists";
                self.pos += 1;
                let var = self.ident("variable name")?;
                self.expect(Tok::Dot, "'.' after quantified variable")?;
                let body = self.formula()?;
                return Ok(if existential {
                    Formula::exists(var, body)
                } else {
                    Formula::forall(var, body)
                });
            }
        }
        self.iff()
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(w)) => Ok(w),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(Error::Syntax {
                    span: self.span(),
                    message: format!("expected {what}"),
                })
            }
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::DArrow) {
            self.pos += 1;
            let rhs = self.iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let lhs = self.and()?;
        if self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula> {
        let lhs = self.until()?;
        if self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn until(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == "U" {
                self.pos += 1;
                let rhs = self.until()?;
                return Ok(Formula::until(lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(w)) if w == "X" => {
                self.pos += 1;
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Ident(w)) if w == "F" => {
                self.pos += 1;
                Ok(Formula::eventually(self.unary()?))
            }
            Some(Tok::Ident(w)) if w == "G" => {
                self.pos += 1;
                Ok(Formula::globally(self.unary()?))
            }
            // a quantifier may start here (e.g. "G exists q. ...") and
            // extends maximally to the right
            Some(Tok::Ident(w)) if w == "exists" || w == "forall" => self.formula(),
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.formula()?;
                self.expect(Tok::RParen, "closing ')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(w)) if w == "true" => Ok(Formula::True),
            Some(Tok::Ident(w)) if w == "false" => Ok(Formula::False),
            Some(Tok::Ident(prop)) => {
                self.expect(Tok::LBracket, "'[' after proposition name")?;
                let var = self.ident("variable name inside [..]")?;
                self.expect(Tok::RBracket, "closing ']'")?;
                Ok(Formula::atom(prop, var))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(Error::Syntax {
                    span: self.span(),
                    message: "expected a formula".to_string(),
                })
            }
        }
    }
}

/// Parses `text` and enforces the dialect's well-formedness discipline.
pub fn parse_formula(text: &str, dialect: Dialect) -> Result<Formula> {
    let f = parse_formula_any(text)?;
    match dialect {
        Dialect::HyperLtl => {
            if !f.is_prenex() {
                return Err(Error::Dialect(
                    "HyperLTL requires all quantifiers in an outermost prefix".to_string(),
                ));
            }
        }
        Dialect::HyperCtlStar => {
            if !f.is_ctlstar_wellformed() {
                return Err(Error::Dialect(
                    "HyperCTL* requires every temporal operator under a quantifier".to_string(),
                ));
            }
        }
    }
    Ok(f)
}

/// Parses without any dialect check.
pub fn parse_formula_any(text: &str) -> Result<Formula> {
    let toks = Lexer { src: text, pos: 0 }.tokens()?;
    let end = text.len();
    let mut p = Parser { toks, pos: 0, end };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(Error::Syntax {
            span: p.span(),
            message: "trailing input".to_string(),
        });
    }
    Ok(f)
}

// Binding strength, loosest first. Quantifiers print with their whole body
// to the right and parenthesize when used as operands.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Until(..) => 5,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) | Formula::Globally(_) => 6,
        Formula::True | Formula::False | Formula::Atom { .. } => 7,
    }
}

fn print_into(f: &Formula, min_prec: u8, out: &mut String) {
    let prec = precedence(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom { prop, var } => {
            out.push_str(prop);
            out.push('[');
            out.push_str(var);
            out.push(']');
        }
        Formula::Not(a) => {
            out.push('!');
            print_into(a, 6, out);
        }
        Formula::Next(a) => {
            out.push_str("X ");
            print_into(a, 6, out);
        }
        Formula::Eventually(a) => {
            out.push_str("F ");
            print_into(a, 6, out);
        }
        Formula::Globally(a) => {
            out.push_str("G ");
            print_into(a, 6, out);
        }
        Formula::Until(a, b) => {
            print_into(a, 6, out);
            out.push_str(" U ");
            print_into(b, 5, out);
        }
        Formula::And(a, b) => {
            print_into(a, 5, out);
            out.push_str(" & ");
            print_into(b, 4, out);
        }
        Formula::Or(a, b) => {
            print_into(a, 4, out);
            out.push_str(" | ");
            print_into(b, 3, out);
        }
        Formula::Implies(a, b) => {
            print_into(a, 3, out);
            out.push_str(" -> ");
            print_into(b, 2, out);
        }
        Formula::Iff(a, b) => {
            print_into(a, 2, out);
            out.push_str(" <-> ");
            print_into(b, 1, out);
        }
        Formula::Exists(v, body) => {
            out.push_str("exists ");
            out.push_str(v);
            out.push_str(". ");
            print_into(body, 0, out);
        }
        Formula::Forall(v, body) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push_str(". ");
            print_into(body, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Deterministic printer; `parse_formula_any(print_formula(f)) == f`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_into(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(f: &Formula) {
        let s = print_formula(f);
        let g = parse_formula_any(&s).unwrap_or_else(|e| panic!("reparse of {s:?} failed: {e}"));
        assert_eq!(&g, f, "round-trip through {s:?}");
    }

    #[test]
    fn parse_simple_atom() {
        let f = parse_formula("exists p. a[p]", Dialect::HyperLtl).unwrap();
        assert_eq!(f, Formula::exists("p", Formula::atom("a", "p")));
    }

    #[test]
    fn parse_input_determinism() {
        let f = parse_formula(
            "forall p. forall q. (G (i[p] <-> i[q])) -> (G (o[p] <-> o[q]))",
            Dialect::HyperLtl,
        )
        .unwrap();
        let expected = Formula::forall(
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
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn until_binds_looser_than_next() {
        let f = parse_formula("exists p. X a[p] U b[p]", Dialect::HyperLtl).unwrap();
        let expected = Formula::exists(
            "p",
            Formula::until(
                Formula::next(Formula::atom("a", "p")),
                Formula::atom("b", "p"),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn until_right_associative() {
        let f = parse_formula_any("a[p] U b[p] U c[p]").unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::atom("a", "p"),
                Formula::until(Formula::atom("b", "p"), Formula::atom("c", "p"))
            )
        );
        roundtrip(&f);
        // the other association needs parentheses, and keeps them
        let g = parse_formula_any("(a[p] U b[p]) U c[p]").unwrap();
        assert_ne!(f, g);
        roundtrip(&g);
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            print_formula(&Formula::exists("p", Formula::atom("a", "p"))),
            "exists p. a[p]"
        );
        assert_eq!(print_formula(&Formula::False), "false");
    }

    #[test]
    fn dialect_enforcement() {
        assert!(matches!(
            parse_formula("G exists p. a[p]", Dialect::HyperLtl),
            Err(Error::Dialect(_))
        ));
        assert!(matches!(
            parse_formula("X a[p]", Dialect::HyperCtlStar),
            Err(Error::Dialect(_))
        ));
        // fine in the other dialect
        parse_formula("exists p. G exists q. a[q]", Dialect::HyperCtlStar).unwrap();
    }

    #[test]
    fn syntax_error_has_span() {
        match parse_formula_any("exists p a[p]") {
            Err(Error::Syntax { span, .. }) => assert!(span.start >= 9),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_mixed_operators() {
        let f = parse_formula_any(
            "forall p. exists q. ((a[p] & b[q]) U (c[p] | !d[q])) -> (F (a[p] <-> G b[q]))",
        )
        .unwrap();
        roundtrip(&f);
    }
}

pub mod files;
