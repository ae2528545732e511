use std::fmt;

use super::RdfError;

/// An absolute IRI. The only check performed is the presence of a scheme
/// separator; anything stricter is the job of whoever produced the text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        match value.find(':') {
            Some(idx) if idx > 0 && !value.chars().any(|c| c.is_whitespace() || c == '<' || c == '>') => {
                Ok(Iri(value))
            }
            _ => Err(RdfError::InvalidIri(value)),
        }
    }

    /// Builds an IRI from a compile-time constant. Panics on invalid input.
    pub fn constant(value: &str) -> Self {
        Self::new(value).unwrap_or_else(|e| panic!("bad IRI constant: {e}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#` or `/`, used for file names and short labels.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        let cut = s.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
        let local = &s[cut..];
        if local.is_empty() {
            s
        } else {
            local
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Self {
        BlankNode(label.into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    value: String,
    datatype: Option<Iri>,
    lang: Option<String>,
}

impl Literal {
    pub fn plain(value: impl Into<String>) -> Self {
        Literal { value: value.into(), datatype: None, lang: None }
    }

    pub fn typed(value: impl Into<String>, datatype: Iri) -> Self {
        Literal { value: value.into(), datatype: Some(datatype), lang: None }
    }

    pub fn lang(value: impl Into<String>, lang: impl Into<String>) -> Self {
        Literal { value: value.into(), datatype: None, lang: Some(lang.into().to_ascii_lowercase()) }
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn language(&self) -> Option<&str> {
        self.lang.as_deref()
    }
}

/// Escapes a literal lexical form using the supported escape set.
pub(crate) fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_literal(&self.value))?;
        if let Some(lang) = &self.lang {
            write!(f, "@{lang}")
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^{dt}")
        } else {
            Ok(())
        }
    }
}

/// An RDF term. The derived ordering (IRIs, then blank nodes, then literals,
/// each by lexical value) is the canonical order used for iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self, RdfError> {
        Iri::new(value).map(Term::Iri)
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(BlankNode::new(label))
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(value))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&BlankNode> {
        match self {
            Term::Blank(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Smallest possible term under the canonical order.
    pub(crate) fn min_value() -> Term {
        Term::Iri(Iri(String::new()))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<&Iri> for Term {
    fn from(iri: &Iri) -> Self {
        Term::Iri(iri.clone())
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Blank(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: impl Into<Term>, object: impl Into<Term>) -> Result<Self, RdfError> {
        let (subject, predicate, object) = (subject.into(), predicate.into(), object.into());
        if subject.is_literal() {
            return Err(RdfError::LiteralSubject(subject.to_string()));
        }
        if !predicate.is_iri() {
            return Err(RdfError::NonIriPredicate(predicate.to_string()));
        }
        Ok(Triple { subject, predicate, object })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    /// Smallest triple with the given subject, for index range scans.
    pub(crate) fn lower_bound(subject: &Term) -> Triple {
        Triple { subject: subject.clone(), predicate: Term::min_value(), object: Term::min_value() }
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
