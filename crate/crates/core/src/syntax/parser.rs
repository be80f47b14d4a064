//! Recursive-descent reader for the functional KB syntax.
//!
//! ```text
//! statement := [ prob "::" ] axiom "."
//! axiom     := subClassOf(CE,CE) | equivalentClasses([CE{,CE}+]) | subPropertyOf(RE,RE)
//!            | transitiveProperty(RE) | classAssertion(CE,name) | propertyAssertion(RE,name,name)
//! CE        := name | top | bottom | complementOf(CE) | intersectionOf([CE{,CE}*])
//!            | unionOf([CE{,CE}*]) | someValuesFrom(RE,CE) | allValuesFrom(RE,CE)
//! RE        := name | inverseOf(name)
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

use super::ast::{Axiom, Concept, KnowledgeBase, Query, RoleExpr};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64, String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    ColonColon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(_, s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c == ':' {
            if chars.get(i + 1) == Some(&':') {
                out.push(Spanned {
                    tok: Tok::ColonColon,
                    line: tl,
                    column: tc,
                });
                i += 2;
                col += 2;
                continue;
            }
            return Err(err(tl, tc, "expected `::`"));
        }
        if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' {
            let start = i;
            i += 1;
            let mut seen_dot = c == '.';
            while i < chars.len() {
                let d = chars[i];
                if d.is_ascii_digit() {
                    i += 1;
                } else if d == '.'
                    && !seen_dot
                    && chars.get(i + 1).is_some_and(|e| e.is_ascii_digit())
                {
                    seen_dot = true;
                    i += 1;
                } else if (d == 'e' || d == 'E')
                    && chars
                        .get(i + 1)
                        .is_some_and(|e| e.is_ascii_digit() || *e == '-' || *e == '+')
                {
                    i += 2;
                } else {
                    break;
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            col += i - start;
            let value: f64 = lexeme
                .parse()
                .map_err(|_| err(tl, tc, format!("malformed number `{lexeme}`")))?;
            out.push(Spanned {
                tok: Tok::Number(value, lexeme),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned {
                tok: Tok::Ident(word),
                line: tl,
                column: tc,
            });
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

const RESERVED_PREFIX: &str = "__anon";

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.peek();
        err(
            t.line,
            t.column,
            format!("expected {wanted}, found {}", t.tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<Spanned, ParseError> {
        match &self.peek().tok {
            Tok::Ident(_) => Ok(self.next()),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let t = self.ident()?;
        let Tok::Ident(s) = t.tok else { unreachable!() };
        if s.starts_with(RESERVED_PREFIX) {
            return Err(err(
                t.line,
                t.column,
                format!("name `{s}` uses the reserved prefix `{RESERVED_PREFIX}`"),
            ));
        }
        if !is_name(&s) {
            return Err(err(
                t.line,
                t.column,
                format!("`{s}` is not a valid name (must match [a-z][A-Za-z0-9_]*)"),
            ));
        }
        if s == "top" || s == "bottom" {
            return Err(err(t.line, t.column, format!("`{s}` is reserved")));
        }
        Ok(s)
    }

    fn role(&mut self) -> Result<RoleExpr, ParseError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "inverseOf")
            && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LParen)
        {
            self.next();
            self.expect(Tok::LParen)?;
            let inner = self.role()?;
            self.expect(Tok::RParen)?;
            return Ok(inner.inverse());
        }
        Ok(RoleExpr::Named(self.name()?))
    }

    fn concept_list(&mut self) -> Result<Vec<Concept>, ParseError> {
        self.expect(Tok::LBracket)?;
        let mut items = vec![self.concept()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            items.push(self.concept()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(items)
    }

    fn concept(&mut self) -> Result<Concept, ParseError> {
        let head = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a class expression")),
        };
        let is_call = self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LParen);
        match head.as_str() {
            "top" if !is_call => {
                self.next();
                Ok(Concept::Top)
            }
            "bottom" if !is_call => {
                self.next();
                Ok(Concept::Bottom)
            }
            "complementOf" if is_call => {
                self.next();
                self.expect(Tok::LParen)?;
                let c = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(Concept::not(c))
            }
            "intersectionOf" | "unionOf" if is_call => {
                self.next();
                self.expect(Tok::LParen)?;
                let items = self.concept_list()?;
                self.expect(Tok::RParen)?;
                Ok(if head == "intersectionOf" {
                    Concept::and_all(items)
                } else {
                    Concept::or_all(items)
                })
            }
            "someValuesFrom" | "allValuesFrom" if is_call => {
                self.next();
                self.expect(Tok::LParen)?;
                let r = self.role()?;
                self.expect(Tok::Comma)?;
                let c = self.concept()?;
                self.expect(Tok::RParen)?;
                Ok(if head == "someValuesFrom" {
                    Concept::exists(r, c)
                } else {
                    Concept::forall(r, c)
                })
            }
            _ if is_call => {
                let t = self.peek();
                Err(err(
                    t.line,
                    t.column,
                    format!("unknown class constructor `{head}`"),
                ))
            }
            _ => Ok(Concept::Atomic(self.name()?)),
        }
    }

    fn axiom(&mut self) -> Result<Axiom, ParseError> {
        let head = self.ident()?;
        let Tok::Ident(kw) = head.tok else {
            unreachable!()
        };
        self.expect(Tok::LParen)?;
        let ax = match kw.as_str() {
            "subClassOf" => {
                let a = self.concept()?;
                self.expect(Tok::Comma)?;
                let b = self.concept()?;
                Axiom::SubClassOf(a, b)
            }
            "equivalentClasses" => {
                let items = self.concept_list()?;
                if items.len() < 2 {
                    return Err(err(
                        head.line,
                        head.column,
                        "equivalentClasses needs at least two classes",
                    ));
                }
                Axiom::EquivalentClasses(items)
            }
            "subPropertyOf" => {
                let r = self.role()?;
                self.expect(Tok::Comma)?;
                let s = self.role()?;
                Axiom::SubPropertyOf(r, s)
            }
            "transitiveProperty" => Axiom::TransitiveProperty(self.role()?),
            "classAssertion" => {
                let c = self.concept()?;
                self.expect(Tok::Comma)?;
                let a = self.name()?;
                Axiom::ClassAssertion(c, a)
            }
            "propertyAssertion" => {
                let r = self.role()?;
                self.expect(Tok::Comma)?;
                let a = self.name()?;
                self.expect(Tok::Comma)?;
                let b = self.name()?;
                Axiom::property_assertion(r, a, b)
            }
            _ => return Err(err(head.line, head.column, format!("unknown axiom `{kw}`"))),
        };
        self.expect(Tok::RParen)?;
        Ok(ax)
    }

    fn statement(&mut self) -> Result<(Axiom, Option<f64>), ParseError> {
        let mut prob = None;
        if let Tok::Number(p, lexeme) = self.peek().tok.clone() {
            let t = self.next();
            if !(p > 0.0 && p <= 1.0) {
                return Err(err(
                    t.line,
                    t.column,
                    format!("probability {lexeme} outside (0,1]"),
                ));
            }
            self.expect(Tok::ColonColon)?;
            prob = Some(p);
        }
        let ax = self.axiom()?;
        self.expect(Tok::Dot)?;
        Ok((ax, prob))
    }
}

/// Parses a whole KB. Axiom ids follow source order.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let mut p = Parser::new(text)?;
    let mut kb = KnowledgeBase::new();
    while !p.at_eof() {
        let (ax, prob) = p.statement()?;
        kb.push(ax, prob);
    }
    Ok(kb)
}

/// Parses a query: `classAssertion(CE,name)` or `subClassOf(CE,CE)`, with
/// an optional trailing `.`.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.peek().clone();
    if let Tok::Number(..) = start.tok {
        return Err(err(
            start.line,
            start.column,
            "queries cannot carry a probability",
        ));
    }
    let ax = p.axiom()?;
    if p.peek().tok == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.unexpected("end of query"));
    }
    match ax {
        Axiom::ClassAssertion(c, a) => Ok(Query::InstanceOf(a, c)),
        Axiom::SubClassOf(c, d) => Ok(Query::Subsumption(c, d)),
        _ => Err(err(start.line, start.column, "unsupported query form")),
    }
}
