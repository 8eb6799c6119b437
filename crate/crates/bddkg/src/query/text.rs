//! Text form for queries (`.bgp` files): one triple pattern per line with
//! whitespace-separated terms, variables prefixed `?`, CURIEs expanded with
//! the active context. An optional `CONSTRUCT` section may precede the
//! `WHERE` section, each keyword on its own line.

use super::{PatternTerm, QueryError, TriplePattern};
use crate::kg::{PrefixContext, Term};

/// A parsed query: plain BGP when `construct` is `None`.
#[derive(Debug, Clone)]
pub struct Query {
    pub construct: Option<Vec<TriplePattern>>,
    pub where_patterns: Vec<TriplePattern>,
}

pub fn parse_query(text: &str, ctx: &PrefixContext) -> Result<Query, QueryError> {
    let mut construct: Option<Vec<TriplePattern>> = None;
    let mut where_patterns: Vec<TriplePattern> = Vec::new();
    // Lines before any keyword belong to WHERE, so a bare list of patterns
    // is a valid query.
    let mut in_construct = false;
    let mut seen_where = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) if raw[..i].trim_start().is_empty() => "",
            _ => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "CONSTRUCT" => {
                if construct.is_some() || seen_where || !where_patterns.is_empty() {
                    return Err(QueryError::Parse {
                        line: line_no,
                        msg: "CONSTRUCT must appear once, before WHERE".into(),
                    });
                }
                construct = Some(Vec::new());
                in_construct = true;
            }
            "WHERE" => {
                if seen_where {
                    return Err(QueryError::Parse { line: line_no, msg: "duplicate WHERE".into() });
                }
                seen_where = true;
                in_construct = false;
            }
            _ => {
                let pattern = parse_pattern_line(line, line_no, ctx)?;
                if in_construct {
                    construct.as_mut().expect("in_construct implies section").push(pattern);
                } else {
                    where_patterns.push(pattern);
                }
            }
        }
    }
    if construct.is_some() && !seen_where {
        return Err(QueryError::Parse { line: 0, msg: "CONSTRUCT requires a WHERE section".into() });
    }
    Ok(Query { construct, where_patterns })
}

fn parse_pattern_line(line: &str, line_no: usize, ctx: &PrefixContext) -> Result<TriplePattern, QueryError> {
    let tokens = split_terms(line, line_no)?;
    if tokens.len() != 3 {
        return Err(QueryError::Parse {
            line: line_no,
            msg: format!("expected 3 terms, found {}", tokens.len()),
        });
    }
    let mut terms = tokens.into_iter().map(|t| parse_term(&t, line_no, ctx));
    let s = terms.next().expect("three tokens")?;
    let p = terms.next().expect("three tokens")?;
    let o = terms.next().expect("three tokens")?;
    TriplePattern::new(s, p, o)
}

/// Splits on whitespace but keeps quoted strings intact.
fn split_terms(line: &str, line_no: usize) -> Result<Vec<String>, QueryError> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::from("\"");
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => s.push(ch),
                    None => {
                        return Err(QueryError::Parse {
                            line: line_no,
                            msg: "unterminated string".into(),
                        })
                    }
                }
            }
            s.push('"');
            out.push(s);
        } else {
            let mut s = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                s.push(ch);
                chars.next();
            }
            out.push(s);
        }
    }
    Ok(out)
}

fn parse_term(token: &str, line_no: usize, ctx: &PrefixContext) -> Result<PatternTerm, QueryError> {
    if let Some(name) = token.strip_prefix('?') {
        if name.is_empty() {
            return Err(QueryError::Parse { line: line_no, msg: "empty variable name".into() });
        }
        return Ok(PatternTerm::Variable(name.to_string()));
    }
    if let Some(body) = token.strip_prefix('"') {
        let body = body.strip_suffix('"').unwrap_or(body);
        return Ok(PatternTerm::Constant(Term::Text(body.to_string())));
    }
    if token == "true" || token == "false" {
        return Ok(PatternTerm::Constant(Term::Boolean(token == "true")));
    }
    if let Ok(n) = token.parse::<f64>() {
        return Ok(PatternTerm::Constant(Term::Number(n)));
    }
    let iri = ctx.expand(token)?;
    Ok(PatternTerm::Constant(Term::Iri(iri)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::default_context;

    #[test]
    fn parses_bare_where_patterns() {
        let q = parse_query("?c rdf:type bdd:FluentClause\n?c bdd:holds-at ?t\n", &default_context()).unwrap();
        assert!(q.construct.is_none());
        assert_eq!(q.where_patterns.len(), 2);
    }

    #[test]
    fn parses_construct_where_sections() {
        let text = "CONSTRUCT\n?tmpl bdd:has-clause ?c\nWHERE\n?tmpl bdd:has-clause ?c\n";
        let q = parse_query(text, &default_context()).unwrap();
        assert_eq!(q.construct.as_ref().unwrap().len(), 1);
        assert_eq!(q.where_patterns.len(), 1);
    }

    #[test]
    fn literals_and_comments_are_handled() {
        let text = "# locate by label\n?s bdd:constraint-kind \"after-event\"\n?s bdd:order 2\n";
        let q = parse_query(text, &default_context()).unwrap();
        assert_eq!(q.where_patterns.len(), 2);
        assert_eq!(
            q.where_patterns[0].object,
            PatternTerm::Constant(Term::Text("after-event".into()))
        );
        assert_eq!(q.where_patterns[1].object, PatternTerm::Constant(Term::Number(2.0)));
    }

    #[test]
    fn wrong_arity_is_a_parse_error() {
        let err = parse_query("?a ?b\n", &default_context()).unwrap_err();
        assert!(matches!(err, QueryError::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_prefix_is_reported() {
        let err = parse_query("?a nope:p ?b\n", &default_context()).unwrap_err();
        assert!(matches!(err, QueryError::Kg(_)));
    }
}
