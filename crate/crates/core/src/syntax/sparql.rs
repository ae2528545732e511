use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::lexer::{Pos, Tok};
use super::{describe, render_term, Cursor, SyntaxError};
use crate::rdf::{vocab, Term};

/// A query variable, stored without its `?` sigil.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(Variable),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(Variable::new(name))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl From<Variable> for PatternTerm {
    fn from(v: Variable) -> Self {
        PatternTerm::Var(v)
    }
}

impl From<&crate::rdf::Iri> for PatternTerm {
    fn from(i: &crate::rdf::Iri) -> Self {
        PatternTerm::Term(Term::Iri(i.clone()))
    }
}

/// A triple pattern. The predicate is always an IRI or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    /// Panics when the predicate is a literal or blank node.
    pub fn new(subject: impl Into<PatternTerm>, predicate: impl Into<PatternTerm>, object: impl Into<PatternTerm>) -> Self {
        let predicate = predicate.into();
        if let PatternTerm::Term(t) = &predicate {
            assert!(t.is_iri(), "triple pattern predicate must be an IRI or variable, got {t}");
        }
        TriplePattern { subject: subject.into(), predicate, object: object.into() }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> + '_ {
        self.positions().into_iter().filter_map(PatternTerm::as_var)
    }

    pub fn render(&self, prefixes: &BTreeMap<String, String>) -> String {
        let r = |p: &PatternTerm| match p {
            PatternTerm::Var(v) => v.to_string(),
            PatternTerm::Term(t) if *t == vocab::rdf_type() => "a".to_string(),
            PatternTerm::Term(t) => render_term(t, prefixes),
        };
        let s = match &self.subject {
            PatternTerm::Var(v) => v.to_string(),
            PatternTerm::Term(t) => render_term(t, prefixes),
        };
        let o = match &self.object {
            PatternTerm::Var(v) => v.to_string(),
            PatternTerm::Term(t) => render_term(t, prefixes),
        };
        format!("{s} {} {o}", r(&self.predicate))
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&BTreeMap::new()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryForm {
    Select,
    Construct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<Variable>),
}

/// A parsed query in the supported subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparqlQuery {
    pub form: QueryForm,
    pub prefixes: BTreeMap<String, String>,
    /// Meaningful for SELECT only.
    pub projection: Projection,
    /// Meaningful for CONSTRUCT only.
    pub template: Vec<TriplePattern>,
    pub where_patterns: Vec<TriplePattern>,
}

impl SparqlQuery {
    pub fn select(prefixes: BTreeMap<String, String>, projection: Projection, where_patterns: Vec<TriplePattern>) -> Self {
        SparqlQuery { form: QueryForm::Select, prefixes, projection, template: Vec::new(), where_patterns }
    }

    pub fn construct(
        prefixes: BTreeMap<String, String>,
        template: Vec<TriplePattern>,
        where_patterns: Vec<TriplePattern>,
    ) -> Self {
        SparqlQuery { form: QueryForm::Construct, prefixes, projection: Projection::All, template, where_patterns }
    }

    /// Variables bound by the WHERE clause.
    pub fn where_variables(&self) -> BTreeSet<Variable> {
        self.where_patterns.iter().flat_map(|p| p.variables().cloned()).collect()
    }

    /// Every variable occurring anywhere in the query.
    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut vars = self.where_variables();
        vars.extend(self.template.iter().flat_map(|p| p.variables().cloned()));
        if let Projection::Vars(vs) = &self.projection {
            vars.extend(vs.iter().cloned());
        }
        vars
    }

    /// Template or projection variables that the WHERE clause never binds.
    /// Template triples using them are skipped at construction time; for
    /// SELECT they are an evaluation error.
    pub fn unbound_capable(&self) -> BTreeSet<Variable> {
        let bound = self.where_variables();
        let mut out: BTreeSet<Variable> = self
            .template
            .iter()
            .flat_map(|p| p.variables().cloned())
            .filter(|v| !bound.contains(v))
            .collect();
        if let Projection::Vars(vs) = &self.projection {
            out.extend(vs.iter().filter(|v| !bound.contains(v)).cloned());
        }
        out
    }
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, ns) in &self.prefixes {
            writeln!(f, "PREFIX {label}: <{ns}>")?;
        }
        match self.form {
            QueryForm::Select => {
                match &self.projection {
                    Projection::All => writeln!(f, "SELECT *")?,
                    Projection::Vars(vs) => {
                        let names: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                        writeln!(f, "SELECT {}", names.join(" "))?
                    }
                };
            }
            QueryForm::Construct => {
                writeln!(f, "CONSTRUCT {{")?;
                for p in &self.template {
                    writeln!(f, "  {} .", p.render(&self.prefixes))?;
                }
                writeln!(f, "}}")?;
            }
        }
        writeln!(f, "WHERE {{")?;
        for p in &self.where_patterns {
            writeln!(f, "  {} .", p.render(&self.prefixes))?;
        }
        write!(f, "}}")
    }
}

const UNSUPPORTED_FORMS: &[&str] = &[
    "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE", "ADD", "MOVE", "COPY", "WITH",
];
const UNSUPPORTED_MODIFIERS: &[&str] = &["DISTINCT", "REDUCED"];
const UNSUPPORTED_IN_GROUP: &[&str] =
    &["OPTIONAL", "UNION", "FILTER", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE", "EXISTS", "NOT"];
const UNSUPPORTED_AFTER: &[&str] = &["ORDER", "LIMIT", "OFFSET", "GROUP", "HAVING", "VALUES"];

/// Parses a query in the supported subset: `PREFIX` declarations, then
/// `SELECT ?v ... | SELECT *` or `CONSTRUCT { template }`, then a `WHERE`
/// block holding a basic graph pattern. Anything from the rest of SPARQL is
/// rejected with an unsupported-feature error that names it.
pub fn parse_sparql(text: &str) -> Result<SparqlQuery, SyntaxError> {
    let mut cur = Cursor::new(text, None)?;
    loop {
        if cur.eat_keyword("PREFIX") {
            cur.prefix_declaration()?;
        } else if matches!(cur.peek_tok(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case("BASE")) {
            return Err(cur.unsupported(cur.pos(), "BASE"));
        } else {
            break;
        }
    }

    let form_pos = cur.pos();
    let query = if cur.eat_keyword("SELECT") {
        if let Some(m) = keyword_in(&cur, UNSUPPORTED_MODIFIERS) {
            return Err(cur.unsupported(cur.pos(), m));
        }
        let projection = if cur.eat_punct('*') {
            Projection::All
        } else {
            let mut vars = Vec::new();
            while let Some(Tok::Var(v)) = cur.peek_tok() {
                vars.push(Variable::new(v.clone()));
                cur.next();
            }
            if vars.is_empty() {
                if cur.peek_tok() == Some(&Tok::Punct('(')) {
                    return Err(cur.unsupported(cur.pos(), "projection expression"));
                }
                return Err(cur.unexpected("'*' or a variable"));
            }
            Projection::Vars(vars)
        };
        cur.eat_keyword("WHERE");
        let where_patterns = group(&mut cur, false)?;
        SparqlQuery::select(BTreeMap::new(), projection, where_patterns)
    } else if cur.eat_keyword("CONSTRUCT") {
        if cur.peek_tok() != Some(&Tok::Punct('{')) {
            if matches!(cur.peek_tok(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case("WHERE")) {
                return Err(cur.unsupported(cur.pos(), "CONSTRUCT WHERE short form"));
            }
            return Err(cur.unexpected("'{'"));
        }
        let template = group(&mut cur, true)?;
        cur.eat_keyword("WHERE");
        let where_patterns = group(&mut cur, false)?;
        SparqlQuery::construct(BTreeMap::new(), template, where_patterns)
    } else if let Some(form) = keyword_in(&cur, UNSUPPORTED_FORMS) {
        return Err(cur.unsupported(form_pos, form));
    } else {
        return Err(cur.unexpected("SELECT or CONSTRUCT"));
    };

    if let Some(kw) = keyword_in(&cur, UNSUPPORTED_AFTER) {
        return Err(cur.unsupported(cur.pos(), kw));
    }
    if !cur.at_end() {
        return Err(cur.unexpected("end of query"));
    }
    Ok(SparqlQuery { prefixes: cur.prefixes.clone(), ..query })
}

fn keyword_in(cur: &Cursor, list: &[&'static str]) -> Option<&'static str> {
    match cur.peek_tok() {
        Some(Tok::Word(w)) => list.iter().copied().find(|k| w.eq_ignore_ascii_case(k)),
        _ => None,
    }
}

/// `{ triples ('.' triples)* '.'? }`
fn group(cur: &mut Cursor, template: bool) -> Result<Vec<TriplePattern>, SyntaxError> {
    cur.expect_punct('{')?;
    let mut out = Vec::new();
    loop {
        if cur.eat_punct('}') {
            return Ok(out);
        }
        if let Some(kw) = keyword_in(cur, UNSUPPORTED_IN_GROUP) {
            return Err(cur.unsupported(cur.pos(), kw));
        }
        if cur.peek_tok() == Some(&Tok::Punct('{')) {
            return Err(cur.unsupported(cur.pos(), "nested group pattern"));
        }
        same_subject(cur, template, &mut out)?;
        if cur.eat_punct('.') {
            continue;
        }
        if let Some(kw) = keyword_in(cur, UNSUPPORTED_IN_GROUP) {
            return Err(cur.unsupported(cur.pos(), kw));
        }
        cur.expect_punct('}')?;
        return Ok(out);
    }
}

fn same_subject(cur: &mut Cursor, template: bool, out: &mut Vec<TriplePattern>) -> Result<(), SyntaxError> {
    let subject = node(cur, template, "a subject")?;
    if matches!(&subject, PatternTerm::Term(t) if t.is_literal()) {
        return Err(cur.error(cur.pos(), "a literal cannot be a subject"));
    }
    loop {
        let predicate = verb(cur)?;
        loop {
            let object = node(cur, template, "an object")?;
            out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
            if !cur.eat_punct(',') {
                break;
            }
        }
        if cur.eat_punct(';') {
            while cur.eat_punct(';') {}
            if matches!(cur.peek_tok(), Some(Tok::Punct('.')) | Some(Tok::Punct('}'))) {
                return Ok(());
            }
            continue;
        }
        return Ok(());
    }
}

fn verb(cur: &mut Cursor) -> Result<PatternTerm, SyntaxError> {
    let pos = cur.pos();
    let p = match cur.peek_tok() {
        Some(Tok::Word(w)) if w == "a" => {
            cur.next();
            PatternTerm::Term(vocab::rdf_type())
        }
        Some(Tok::Var(v)) => {
            let v = Variable::new(v.clone());
            cur.next();
            PatternTerm::Var(v)
        }
        Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
            let t = cur.next().expect("peeked");
            PatternTerm::Term(Term::Iri(cur.iri_from(&t)?.expect("IRI token")))
        }
        Some(Tok::Punct('^')) | Some(Tok::Punct('!')) | Some(Tok::Punct('(')) => {
            return Err(cur.unsupported(pos, "property path"));
        }
        Some(other) => {
            let found = describe(other);
            return Err(cur.error(pos, format!("expected a predicate, found {found}")));
        }
        None => return Err(cur.unexpected("a predicate")),
    };
    if let Some(Tok::Punct(c @ ('/' | '|' | '*' | '+' | '?'))) = cur.peek_tok() {
        let _ = c;
        return Err(cur.unsupported(cur.pos(), "property path"));
    }
    Ok(p)
}

fn node(cur: &mut Cursor, template: bool, what: &str) -> Result<PatternTerm, SyntaxError> {
    let pos: Pos = cur.pos();
    match cur.peek_tok() {
        Some(Tok::Var(v)) => {
            let v = Variable::new(v.clone());
            cur.next();
            Ok(PatternTerm::Var(v))
        }
        Some(Tok::Blank(_)) if !template => Err(cur.unsupported(pos, "blank node in WHERE")),
        Some(Tok::Punct('[')) => Err(cur.unsupported(pos, "anonymous blank node")),
        _ => Ok(PatternTerm::Term(cur.ground_term(what)?)),
    }
}
