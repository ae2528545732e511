use std::collections::BTreeMap;
use std::fmt::Write;

use super::lexer::Tok;
use super::{describe, render_term, Cursor, SyntaxError};
use crate::rdf::{vocab, Graph, Iri, Term, Triple};

/// Parses a Turtle document.
///
/// Supported: `@prefix` directives, absolute, relative (with `base`) and
/// prefixed IRIs, the `a` keyword, plain, typed and language-tagged string
/// literals, `;` and `,` lists, and `_:label` blank nodes. Anything else is
/// reported as an error.
pub fn parse_turtle(text: &str, base: Option<&Iri>) -> Result<Graph, SyntaxError> {
    let mut cur = Cursor::new(text, base.cloned())?;
    let mut graph = Graph::new();
    while let Some(token) = cur.peek().cloned() {
        match &token.tok {
            Tok::At(word) if word == "prefix" => {
                cur.next();
                cur.prefix_declaration()?;
                cur.expect_punct('.')?;
            }
            Tok::At(word) => return Err(cur.unsupported(token.pos, format!("@{word} directive"))),
            Tok::Word(w) if ["prefix", "base"].iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                return Err(cur.unsupported(token.pos, format!("{} directive", w.to_ascii_uppercase())));
            }
            _ => statement(&mut cur, &mut graph)?,
        }
    }
    for (label, ns) in &cur.prefixes {
        graph.set_prefix(label.clone(), ns.clone());
    }
    Ok(graph)
}

fn statement(cur: &mut Cursor, graph: &mut Graph) -> Result<(), SyntaxError> {
    let subject_pos = cur.pos();
    let subject = cur.ground_term("a subject")?;
    if subject.is_literal() {
        return Err(cur.error(subject_pos, "a literal cannot be a subject"));
    }
    loop {
        let predicate = predicate(cur)?;
        loop {
            let object = cur.ground_term("an object")?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object)
                .map_err(|e| cur.error(subject_pos, e.to_string()))?;
            graph.insert(triple);
            if !cur.eat_punct(',') {
                break;
            }
        }
        if cur.eat_punct(';') {
            // A trailing ';' before the '.' is allowed.
            while cur.eat_punct(';') {}
            if cur.peek_tok() == Some(&Tok::Punct('.')) {
                break;
            }
            continue;
        }
        break;
    }
    cur.expect_punct('.')
}

fn predicate(cur: &mut Cursor) -> Result<Term, SyntaxError> {
    let pos = cur.pos();
    match cur.peek_tok() {
        Some(Tok::Word(w)) if w == "a" => {
            cur.next();
            Ok(vocab::rdf_type())
        }
        Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
            let t = cur.next().expect("peeked");
            Ok(Term::Iri(cur.iri_from(&t)?.expect("IRI token")))
        }
        Some(other) => {
            let found = describe(other);
            Err(cur.error(pos, format!("expected a predicate, found {found}")))
        }
        None => Err(cur.unexpected("a predicate")),
    }
}

/// Writes a graph as Turtle. Output is deterministic: prefixes sorted by
/// label, then one block per subject in canonical order.
pub fn serialize_turtle(graph: &Graph) -> String {
    let prefixes = graph.prefixes();
    let mut out = String::new();
    for (label, ns) in prefixes {
        let _ = writeln!(out, "@prefix {label}: <{ns}> .");
    }
    let mut by_subject: BTreeMap<&Term, BTreeMap<&Term, Vec<&Term>>> = BTreeMap::new();
    for t in graph.iter() {
        by_subject.entry(t.subject()).or_default().entry(t.predicate()).or_default().push(t.object());
    }
    if !prefixes.is_empty() && !by_subject.is_empty() {
        out.push('\n');
    }
    let rdf_type = vocab::rdf_type();
    for (subject, preds) in by_subject {
        let _ = write!(out, "{}", render_term(subject, prefixes));
        let n = preds.len();
        // rdf:type first, the rest in canonical order.
        let mut preds: Vec<_> = preds.into_iter().collect();
        preds.sort_by_key(|(p, _)| **p != rdf_type);
        for (i, (pred, objects)) in preds.into_iter().enumerate() {
            let p = if *pred == rdf_type { "a".to_string() } else { render_term(pred, prefixes) };
            let objs: Vec<String> = objects.iter().map(|o| render_term(o, prefixes)).collect();
            let sep = if i + 1 == n { " ." } else { " ;" };
            if i == 0 {
                let _ = writeln!(out, " {p} {}{sep}", objs.join(", "));
            } else {
                let _ = writeln!(out, "    {p} {}{sep}", objs.join(", "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::is_isomorphic;

    #[test]
    fn single_statement() {
        let g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .", None).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.prefixes()["ex"], "http://e/");
    }

    #[test]
    fn a_expands_to_rdf_type() {
        let g = parse_turtle("@prefix ex: <http://e/> . @prefix dom: <http://d/> . ex:a a dom:Image .", None).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.predicate(), &vocab::rdf_type());
    }

    #[test]
    fn missing_object_fails_at_the_dot() {
        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a ex:p .", None).unwrap_err();
        assert!(matches!(err, SyntaxError::Syntax { .. }), "{err:?}");
        assert_eq!(err.position(), (2, 11));
    }

    #[test]
    fn undeclared_prefix() {
        let err = parse_turtle("ex:a ex:p ex:b .", None).unwrap_err();
        assert!(matches!(err, SyntaxError::UndeclaredPrefix { ref prefix, .. } if prefix == "ex"));
    }

    #[test]
    fn relative_iri_needs_base() {
        let err = parse_turtle("<a> <http://e/p> <b> .", None).unwrap_err();
        assert!(matches!(err, SyntaxError::RelativeIri { .. }));
        let base = Iri::constant("http://base.example/dir/");
        let g = parse_turtle("<a> <http://e/p> <b> .", Some(&base)).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject(), &Term::iri("http://base.example/dir/a").unwrap());
    }

    #[test]
    fn lists_and_literals() {
        let doc = r#"@prefix ex: <http://e/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:a ex:p ex:b , ex:c ;
     ex:q "hi"@en , "1"^^xsd:int , "tab\tquote\"" ;
     .
_:x ex:p ex:a .
"#;
        let g = parse_turtle(doc, None).unwrap();
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn unsupported_constructs_are_rejected() {
        for (doc, feature) in [
            ("@prefix ex: <http://e/> . ex:a ex:p 12 .", "numeric literal"),
            ("@prefix ex: <http://e/> . ex:a ex:p [ ex:q ex:r ] .", "anonymous blank node"),
            ("@prefix ex: <http://e/> . ex:a ex:p ( ex:q ) .", "collection"),
            ("@base <http://e/> .", "@base directive"),
            ("@prefix ex: <http://e/> . ex:a ex:p true .", "boolean literal"),
        ] {
            let err = parse_turtle(doc, None).unwrap_err();
            assert_eq!(err.unsupported_feature(), Some(feature), "{doc}");
        }
    }

    #[test]
    fn literal_subject_rejected() {
        assert!(parse_turtle("@prefix ex: <http://e/> . \"x\" ex:p ex:b .", None).is_err());
    }

    #[test]
    fn empty_graph_serializes_to_prefixes_only() {
        let mut g = Graph::new();
        assert_eq!(serialize_turtle(&g), "");
        g.set_prefix("ex", "http://e/");
        assert_eq!(serialize_turtle(&g), "@prefix ex: <http://e/> .\n");
    }

    #[test]
    fn blank_subject_roundtrips() {
        let g = parse_turtle("@prefix ex: <http://e/> . _:b1 ex:p \"v\" .", None).unwrap();
        let text = serialize_turtle(&g);
        assert!(text.contains("_:b1"));
        assert!(is_isomorphic(&parse_turtle(&text, None).unwrap(), &g));
    }

    #[test]
    fn serializer_uses_prefixes_and_a() {
        let g = parse_turtle("@prefix ex: <http://e/> . ex:a a ex:C ; ex:p <http://other/x> .", None).unwrap();
        let text = serialize_turtle(&g);
        assert_eq!(text, "@prefix ex: <http://e/> .\n\nex:a a ex:C ;\n    ex:p <http://other/x> .\n");
    }
}
