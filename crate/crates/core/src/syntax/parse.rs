//! Parser for the line-oriented ontology format.
//!
//! ```text
//! concept := top | bot | NAME | { NAME } | not concept
//!          | ( concept and concept ) | ( concept or concept ) | ( concept -> concept )
//!          | exists role concept | forall role concept
//! role    := NAME | NAME - | u
//! axiom   := concept sub concept | [role] role sub role
//! ```
//!
//! Binary connectives are also accepted without parentheses, with `and`
//! binding tighter than `or`, and `or` tighter than the right-associative
//! `->`. A bare `X sub Y` between two names is a role inclusion when either
//! name is used as a role elsewhere in the document (or carries `-`), and a
//! concept inclusion otherwise; the `role` prefix forces the former.
//!
//! An optional `dialect NAME [universal]` line restricts the document to the
//! constructs that dialect licenses.

use std::collections::BTreeSet;

use super::concept::{Concept, ConceptInclusion, Ontology, Role, RoleInclusion};
use super::dialect::{validate_ontology, Dialect};
use super::signature::Signature;
use crate::error::Error;

const KEYWORDS: &[&str] = &[
    "top", "bot", "not", "and", "or", "exists", "forall", "sub", "u", "role", "dialect",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Minus,
    Arrow,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex_line(text: &str, line: usize) -> Result<Vec<Spanned>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '-' => Tok::Minus,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i + 1 < chars.len()
                    && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_')
                {
                    i += 1;
                }
                Tok::Name(chars[start..=i].iter().collect())
            }
            other => {
                return Err(Error::parse(
                    line,
                    col,
                    format!("unexpected character {other:?}"),
                ));
            }
        };
        out.push(Spanned { tok, line, col });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Spanned], line: usize, end_col: usize) -> Self {
        Parser {
            toks,
            pos: 0,
            line,
            end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == kw)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.line, self.end_col),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, msg))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Error> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), Error> {
        if self.peek_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn plain_name(&mut self, what: &str) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Name(n)) if !KEYWORDS.contains(&n.as_str()) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Name(n)) => self.err(format!("keyword `{n}` cannot be used as {what}")),
            _ => self.err(format!("expected {what}")),
        }
    }

    fn role(&mut self) -> Result<Role, Error> {
        if self.peek_keyword("u") {
            self.pos += 1;
            if self.peek() == Some(&Tok::Minus) {
                return self.err("the universal role cannot be inverted");
            }
            return Ok(Role::universal());
        }
        let name = self.plain_name("a role name")?;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            Ok(Role::inverse_of(name))
        } else {
            Ok(Role::name(name))
        }
    }

    fn concept(&mut self) -> Result<Concept, Error> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.concept()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Concept, Error> {
        let mut acc = self.conjunction()?;
        while self.peek_keyword("or") {
            self.pos += 1;
            let rhs = self.conjunction()?;
            acc = acc.or(rhs);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Concept, Error> {
        let mut acc = self.unary()?;
        while self.peek_keyword("and") {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.and(rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Concept, Error> {
        match self.peek().cloned() {
            Some(Tok::Name(kw)) if kw == "not" => {
                self.pos += 1;
                Ok(self.unary()?.negate())
            }
            Some(Tok::Name(kw)) if kw == "exists" || kw == "forall" => {
                self.pos += 1;
                let r = self.role()?;
                let filler = self.unary()?;
                Ok(if kw == "exists" {
                    Concept::exists(r, filler)
                } else {
                    Concept::forall(r, filler)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Concept, Error> {
        match self.peek().cloned() {
            Some(Tok::Name(n)) if n == "top" => {
                self.pos += 1;
                Ok(Concept::Top)
            }
            Some(Tok::Name(n)) if n == "bot" => {
                self.pos += 1;
                Ok(Concept::bottom())
            }
            Some(Tok::Name(_)) => Ok(Concept::Name(self.plain_name("a concept name")?)),
            Some(Tok::LBrace) => {
                self.pos += 1;
                let a = self.plain_name("an individual name")?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Concept::Nominal(a))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let c = self.concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            Some(_) => self.err("expected a concept"),
            None => self.err("unexpected end of input, expected a concept"),
        }
    }
}

/// True when the tokens have the shape `NAME [-] sub NAME [-]`.
fn bare_role_pair(toks: &[Spanned]) -> Option<(String, bool, String, bool)> {
    let mut p = Parser::new(toks, 0, 0);
    let l = p.plain_name("").ok()?;
    let linv = p.peek() == Some(&Tok::Minus);
    if linv {
        p.bump();
    }
    p.expect_keyword("sub").ok()?;
    let r = p.plain_name("").ok()?;
    let rinv = p.peek() == Some(&Tok::Minus);
    if rinv {
        p.bump();
    }
    p.at_end().then_some((l, linv, r, rinv))
}

fn role_names_in(toks: &[Spanned], out: &mut BTreeSet<String>) {
    for w in toks.windows(2) {
        if let (Tok::Name(kw), Tok::Name(r)) = (&w[0].tok, &w[1].tok) {
            if kw == "exists" || kw == "forall" {
                out.insert(r.clone());
            }
        }
    }
}

/// Parses a document and returns the ontology together with the declared
/// dialect, if any.
pub fn parse_document(text: &str) -> Result<(Ontology, Option<Dialect>), Error> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let toks = lex_line(raw, i + 1)?;
        if !toks.is_empty() {
            lines.push((i + 1, raw.chars().count() + 1, toks));
        }
    }
    let mut role_names = BTreeSet::new();
    for (_, _, toks) in &lines {
        role_names_in(toks, &mut role_names);
        if matches!(&toks[0].tok, Tok::Name(k) if k == "role") {
            if let Some((l, _, r, _)) = bare_role_pair(&toks[1..]) {
                role_names.insert(l);
                role_names.insert(r);
            }
        }
    }

    let mut onto = Ontology::new();
    let mut dialect = None;
    for (line, end_col, toks) in &lines {
        let mut p = Parser::new(toks, *line, *end_col);
        if p.peek_keyword("dialect") {
            p.bump();
            let (l, c) = p.here();
            let name = match p.bump() {
                Some(Tok::Name(n)) => n,
                _ => return Err(Error::parse(l, c, "expected a dialect name")),
            };
            let mut d: Dialect = name
                .parse()
                .map_err(|e: Error| Error::parse(l, c, e.to_string()))?;
            if p.peek_keyword("universal") || matches!(p.peek(), Some(Tok::Name(n)) if n == "u") {
                p.bump();
                d.universal = true;
            }
            if !p.at_end() {
                return p.err("unexpected tokens after dialect declaration");
            }
            if dialect.replace(d).is_some() {
                return Err(Error::parse(*line, 1, "dialect declared twice"));
            }
            continue;
        }
        let forced = p.peek_keyword("role");
        let body = if forced { &toks[1..] } else { &toks[..] };
        if let Some((l, linv, r, rinv)) = bare_role_pair(body) {
            if forced || linv || rinv || role_names.contains(&l) || role_names.contains(&r) {
                let mk = |n: String, inv: bool| {
                    if inv {
                        Role::inverse_of(n)
                    } else {
                        Role::name(n)
                    }
                };
                onto.ris.push(RoleInclusion {
                    lhs: mk(l, linv),
                    rhs: mk(r, rinv),
                });
                continue;
            }
        }
        if forced {
            return p.err("expected a role inclusion after `role`");
        }
        let lhs = p.concept()?;
        p.expect_keyword("sub")?;
        let rhs = p.concept()?;
        if !p.at_end() {
            return p.err("unexpected tokens after axiom");
        }
        onto.cis.push(ConceptInclusion { lhs, rhs });
    }

    if let Some(d) = dialect {
        let violations = validate_ontology(&onto, d);
        if let Some(v) = violations.first() {
            return Err(Error::parse(
                1,
                1,
                format!("construct not licensed by dialect {d}: {v}"),
            ));
        }
    }
    Ok((onto, dialect))
}

/// Parses an ontology document, discarding any dialect declaration.
pub fn parse_ontology(text: &str) -> Result<Ontology, Error> {
    parse_document(text).map(|(o, _)| o)
}

/// Parses a single concept spanning the whole input.
pub fn parse_concept(text: &str) -> Result<Concept, Error> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, text.chars().count() + 1);
    let c = p.concept()?;
    if !p.at_end() {
        return p.err("unexpected tokens after concept");
    }
    Ok(c)
}

/// Parses a single role.
pub fn parse_role(text: &str) -> Result<Role, Error> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, text.chars().count() + 1);
    let r = p.role()?;
    if !p.at_end() {
        return p.err("unexpected tokens after role");
    }
    Ok(r)
}

/// Parses whitespace-separated, kind-prefixed names: `C:A R:r I:a`.
pub fn parse_signature(text: &str) -> Result<Signature, Error> {
    let mut sig = Signature::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut col = 1;
        for word in line.split_whitespace() {
            col = line[col - 1..].find(word).map_or(col, |off| col + off);
            let (kind, name) = word.split_once(':').ok_or_else(|| {
                Error::parse(lineno + 1, col, format!("missing kind prefix in {word:?}"))
            })?;
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::parse(
                    lineno + 1,
                    col,
                    format!("invalid name {name:?}"),
                ));
            }
            match kind {
                "C" => sig.concepts.insert(name.to_string()),
                "R" => sig.roles.insert(name.to_string()),
                "I" => sig.individuals.insert(name.to_string()),
                _ => {
                    return Err(Error::parse(
                        lineno + 1,
                        col,
                        format!("unknown kind prefix {kind:?}"),
                    ))
                }
            };
            col += word.len();
        }
    }
    Ok(sig)
}
