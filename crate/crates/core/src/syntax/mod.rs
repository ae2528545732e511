//! Readers and writers for the two textual languages: a Turtle subset for
//! ontologies and annotations, and a SPARQL subset for queries and rules.

mod lexer;
mod sparql;
mod turtle;

use std::collections::BTreeMap;

pub use sparql::{parse_sparql, PatternTerm, Projection, QueryForm, SparqlQuery, TriplePattern, Variable};
pub use turtle::{parse_turtle, serialize_turtle};

use crate::rdf::{Iri, Literal, Term};
use lexer::{Pos, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: unsupported feature: {feature}")]
    Unsupported { line: usize, col: usize, feature: String },
    #[error("line {line}, column {col}: undeclared prefix {prefix:?}")]
    UndeclaredPrefix { line: usize, col: usize, prefix: String },
    #[error("line {line}, column {col}: relative IRI <{iri}> with no base")]
    RelativeIri { line: usize, col: usize, iri: String },
}

impl SyntaxError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            SyntaxError::Syntax { line, col, .. }
            | SyntaxError::Unsupported { line, col, .. }
            | SyntaxError::UndeclaredPrefix { line, col, .. }
            | SyntaxError::RelativeIri { line, col, .. } => (*line, *col),
        }
    }

    /// The unsupported feature name, if this is an unsupported-feature error.
    pub fn unsupported_feature(&self) -> Option<&str> {
        match self {
            SyntaxError::Unsupported { feature, .. } => Some(feature),
            _ => None,
        }
    }
}

/// Token cursor with the prefix table and base IRI of the document.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    idx: usize,
    end: Pos,
    pub prefixes: BTreeMap<String, String>,
    pub base: Option<Iri>,
}

impl Cursor {
    pub fn new(text: &str, base: Option<Iri>) -> Result<Self, SyntaxError> {
        let tokens = lexer::tokenize(text)?;
        let end = end_position(text);
        Ok(Cursor { tokens, idx: 0, end, prefixes: BTreeMap::new(), base })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    pub fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.tokens.len()
    }

    /// Position of the next token, or of the end of input.
    pub fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    pub fn error(&self, pos: Pos, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Syntax { line: pos.line, col: pos.col, message: message.into() }
    }

    pub fn unsupported(&self, pos: Pos, feature: impl Into<String>) -> SyntaxError {
        SyntaxError::Unsupported { line: pos.line, col: pos.col, feature: feature.into() }
    }

    /// Error for an unexpected next token (or end of input).
    pub fn unexpected(&self, expected: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(t.pos, format!("expected {expected}, found {}", describe(&t.tok))),
            None => self.error(self.end, format!("expected {expected}, found end of input")),
        }
    }

    pub fn eat_punct(&mut self, c: char) -> bool {
        if self.peek_tok() == Some(&Tok::Punct(c)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    /// Consumes a case-insensitive keyword.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek_tok(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn resolve_iri_ref(&self, raw: &str, pos: Pos) -> Result<Iri, SyntaxError> {
        if let Ok(iri) = Iri::new(raw) {
            return Ok(iri);
        }
        let Some(base) = &self.base else {
            return Err(SyntaxError::RelativeIri { line: pos.line, col: pos.col, iri: raw.to_string() });
        };
        let joined = url::Url::parse(base.as_str())
            .and_then(|b| b.join(raw))
            .map_err(|e| self.error(pos, format!("cannot resolve <{raw}> against base: {e}")))?;
        Iri::new(joined.to_string()).map_err(|e| self.error(pos, e.to_string()))
    }

    pub fn expand_pname(&self, prefix: &str, local: &str, pos: Pos) -> Result<Iri, SyntaxError> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| SyntaxError::UndeclaredPrefix {
            line: pos.line,
            col: pos.col,
            prefix: prefix.to_string(),
        })?;
        Iri::new(format!("{ns}{local}")).map_err(|e| self.error(pos, e.to_string()))
    }

    /// Reads `pfx: <namespace>` after a prefix keyword.
    pub fn prefix_declaration(&mut self) -> Result<(), SyntaxError> {
        let label = match self.next() {
            Some(Token { tok: Tok::PName { prefix, local }, .. }) if local.is_empty() => prefix,
            Some(t) => return Err(self.error(t.pos, format!("expected a prefix label, found {}", describe(&t.tok)))),
            None => return Err(self.error(self.end, "expected a prefix label, found end of input")),
        };
        let ns = match self.next() {
            Some(Token { tok: Tok::IriRef(raw), pos }) => self.resolve_iri_ref(&raw, pos)?,
            Some(t) => return Err(self.error(t.pos, format!("expected a namespace IRI, found {}", describe(&t.tok)))),
            None => return Err(self.error(self.end, "expected a namespace IRI, found end of input")),
        };
        self.prefixes.insert(label, ns.as_str().to_string());
        Ok(())
    }

    /// IRI from an `<...>` or prefixed-name token.
    pub fn iri_from(&self, token: &Token) -> Result<Option<Iri>, SyntaxError> {
        match &token.tok {
            Tok::IriRef(raw) => self.resolve_iri_ref(raw, token.pos).map(Some),
            Tok::PName { prefix, local } => self.expand_pname(prefix, local, token.pos).map(Some),
            _ => Ok(None),
        }
    }

    /// Reads the remainder of a literal whose lexical form was just consumed.
    pub fn literal_tail(&mut self, value: String) -> Result<Literal, SyntaxError> {
        match self.peek_tok() {
            Some(Tok::At(lang)) => {
                let lang = lang.clone();
                self.next();
                Ok(Literal::lang(value, lang))
            }
            Some(Tok::DoubleCaret) => {
                self.next();
                let pos = self.pos();
                let tok = self.next().ok_or_else(|| self.error(pos, "expected a datatype IRI"))?;
                match self.iri_from(&tok)? {
                    Some(dt) => Ok(Literal::typed(value, dt)),
                    None => Err(self.error(tok.pos, "expected a datatype IRI")),
                }
            }
            _ => Ok(Literal::plain(value)),
        }
    }

    /// Reads a ground term (IRI, prefixed name, blank label, literal, `a`
    /// is handled by callers).
    pub fn ground_term(&mut self, what: &str) -> Result<Term, SyntaxError> {
        let Some(token) = self.next() else {
            return Err(self.error(self.end, format!("expected {what}, found end of input")));
        };
        if let Some(iri) = self.iri_from(&token)? {
            return Ok(Term::Iri(iri));
        }
        match token.tok {
            Tok::Blank(label) => Ok(Term::blank(label)),
            Tok::Str(value) => Ok(Term::Literal(self.literal_tail(value)?)),
            Tok::Number(_) => Err(self.unsupported(token.pos, "numeric literal")),
            Tok::Word(w) if w == "true" || w == "false" => Err(self.unsupported(token.pos, "boolean literal")),
            Tok::Punct('[') => Err(self.unsupported(token.pos, "anonymous blank node")),
            Tok::Punct('(') => Err(self.unsupported(token.pos, "collection")),
            other => Err(self.error(token.pos, format!("expected {what}, found {}", describe(&other)))),
        }
    }
}

fn end_position(text: &str) -> Pos {
    let mut pos = Pos { line: 1, col: 1 };
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    }
    pos
}

pub(crate) fn describe(tok: &Tok) -> String {
    match tok {
        Tok::IriRef(i) => format!("<{i}>"),
        Tok::PName { prefix, local } => format!("{prefix}:{local}"),
        Tok::Blank(b) => format!("_:{b}"),
        Tok::Var(v) => format!("?{v}"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::At(w) => format!("@{w}"),
        Tok::DoubleCaret => "'^^'".into(),
        Tok::Number(n) => n.clone(),
        Tok::Word(w) => format!("'{w}'"),
        Tok::Punct(c) => format!("'{c}'"),
    }
}

/// Expands `pfx:local` against a prefix table. `<iri>` and absolute IRIs
/// whose scheme is not a declared prefix are taken as written.
pub fn expand_curie(text: &str, prefixes: &BTreeMap<String, String>) -> Result<Iri, String> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Iri::new(inner).map_err(|e| e.to_string());
    }
    if let Some((prefix, local)) = text.split_once(':') {
        if let Some(ns) = prefixes.get(prefix) {
            return Iri::new(format!("{ns}{local}")).map_err(|e| e.to_string());
        }
        if local.starts_with("//") || prefix == "urn" {
            return Iri::new(text).map_err(|e| e.to_string());
        }
        return Err(format!("undeclared prefix {prefix:?} in {text:?}"));
    }
    Err(format!("{text:?} is neither a prefixed name nor an absolute IRI"))
}

/// Compacts an IRI against a prefix table, choosing the longest matching
/// namespace. Returns `None` when no prefix gives a well-formed name.
pub fn compact_iri(iri: &Iri, prefixes: &BTreeMap<String, String>) -> Option<String> {
    prefixes
        .iter()
        .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
        .filter(|(_, ns)| is_plain_local(&iri.as_str()[ns.len()..]))
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
        .map(|(label, ns)| format!("{label}:{}", &iri.as_str()[ns.len()..]))
}

/// Shortens an IRI for display. Unlike `compact_iri` the local part may
/// hold any character, so the result is not always valid Turtle.
pub fn abbreviate_iri(iri: &Iri, prefixes: &BTreeMap<String, String>) -> String {
    compact_iri(iri, prefixes)
        .or_else(|| {
            prefixes
                .iter()
                .filter(|(_, ns)| iri.as_str().len() > ns.len() && iri.as_str().starts_with(ns.as_str()))
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(a.0)))
                .map(|(label, ns)| format!("{label}:{}", &iri.as_str()[ns.len()..]))
        })
        .unwrap_or_else(|| iri.to_string())
}

/// Local names the lexer reads back unchanged.
fn is_plain_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_alphanumeric() || c == '_' => {
            local.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.') && !local.ends_with('.')
        }
        Some(_) => false,
    }
}

/// Renders a term in Turtle/SPARQL surface syntax.
pub fn render_term(term: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri, prefixes).unwrap_or_else(|| iri.to_string()),
        Term::Blank(b) => b.to_string(),
        Term::Literal(l) => {
            let mut s = format!("\"{}\"", crate::rdf::escape_literal(l.value()));
            if let Some(lang) = l.language() {
                s.push('@');
                s.push_str(lang);
            } else if let Some(dt) = l.datatype() {
                s.push_str("^^");
                s.push_str(&compact_iri(dt, prefixes).unwrap_or_else(|| dt.to_string()));
            }
            s
        }
    }
}
