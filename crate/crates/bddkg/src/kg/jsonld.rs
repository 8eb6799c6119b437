//! Reader and writer for the JSON-LD subset used by all model files.
//!
//! Supported keywords: `@context`, `@id`, `@type`, `@graph`, plus term
//! definitions of the form `{"@id": <iri-or-curie>, "@type": "@id"}`.
//! Every node object must carry an `@id`; there are no blank nodes, lists,
//! reverse properties, or remote contexts.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use super::{fmt_number, Graph, Iri, KgError, PrefixContext, Term, Triple, RDF_TYPE};

/// Parses a document into its context and expanded graph.
pub fn parse_jsonld(text: &str) -> Result<(PrefixContext, Graph), KgError> {
    let value: Value = serde_json::from_str(text).map_err(|e| KgError::Syntax {
        line: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })?;
    let top = value
        .as_object()
        .ok_or_else(|| malformed("$", "top level must be an object"))?;

    for key in top.keys() {
        if key != "@context" && key != "@graph" {
            return Err(malformed("$", &format!("unsupported top-level key {key:?}")));
        }
    }

    let mut ctx = PrefixContext::new();
    if let Some(ctx_value) = top.get("@context") {
        parse_context(ctx_value, &mut ctx)?;
    }

    let mut graph = Graph::new();
    if let Some(graph_value) = top.get("@graph") {
        let nodes = graph_value
            .as_array()
            .ok_or_else(|| malformed("@graph", "must be an array of node objects"))?;
        for (i, node) in nodes.iter().enumerate() {
            parse_node(node, &format!("@graph[{i}]"), &ctx, &mut graph)?;
        }
    }
    Ok((ctx, graph))
}

/// Convenience wrapper returning only the graph.
pub fn parse_graph(text: &str) -> Result<Graph, KgError> {
    parse_jsonld(text).map(|(_, g)| g)
}

fn parse_context(value: &Value, ctx: &mut PrefixContext) -> Result<(), KgError> {
    let entries = value
        .as_object()
        .ok_or_else(|| malformed("@context", "must be an object"))?;

    // Absolute string values declare prefixes (and double as plain terms).
    let mut declared_as_prefix: Vec<&str> = Vec::new();
    for (name, v) in entries {
        if let Value::String(s) = v {
            if !name.contains(':') && Iri::new(s.as_str()).is_ok() && is_namespace_like(s) {
                ctx.add_prefix(name, s)?;
                ctx.add_term(name, Iri::new(s.as_str())?, false);
                declared_as_prefix.push(name);
            }
        }
    }
    // Remaining strings must be CURIEs over the prefixes above; objects are
    // term definitions with optional `@type: @id` coercion.
    for (name, v) in entries {
        match v {
            Value::String(s) => {
                if declared_as_prefix.contains(&name.as_str()) {
                    continue;
                }
                let iri = ctx.expand(s)?;
                ctx.add_term(name, iri, false);
            }
            Value::Object(def) => {
                let id = def
                    .get("@id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| malformed(&format!("@context.{name}"), "term definition needs a string @id"))?;
                let coerced = match def.get("@type") {
                    None => false,
                    Some(Value::String(t)) if t == "@id" => true,
                    Some(_) => {
                        return Err(malformed(
                            &format!("@context.{name}"),
                            "only @type: \"@id\" coercion is supported",
                        ))
                    }
                };
                for key in def.keys() {
                    if key != "@id" && key != "@type" {
                        return Err(malformed(
                            &format!("@context.{name}"),
                            &format!("unsupported term definition key {key:?}"),
                        ));
                    }
                }
                let iri = ctx.expand(id)?;
                ctx.add_term(name, iri, coerced);
            }
            _ => return Err(malformed(&format!("@context.{name}"), "must be a string or term definition")),
        }
    }
    Ok(())
}

fn is_namespace_like(s: &str) -> bool {
    // A namespace is an IRI usable as a CURIE base; any absolute IRI works,
    // this only filters out values that are clearly CURIEs themselves.
    s.contains("://") || s.starts_with("urn:") || s.ends_with('#') || s.ends_with('/')
}

fn parse_node(node: &Value, path: &str, ctx: &PrefixContext, graph: &mut Graph) -> Result<(), KgError> {
    let obj = node
        .as_object()
        .ok_or_else(|| malformed(path, "node must be an object"))?;
    let id = match obj.get("@id") {
        Some(Value::String(s)) => ctx.expand(s)?,
        Some(_) => return Err(malformed(path, "@id must be a string")),
        None => return Err(KgError::MissingId { path: path.into() }),
    };
    let rdf_type = Iri::new(RDF_TYPE).expect("constant");

    for (key, value) in obj {
        match key.as_str() {
            "@id" => {}
            "@type" => {
                let entries: Vec<&Value> = match value {
                    Value::Array(items) => items.iter().collect(),
                    single => vec![single],
                };
                for entry in entries {
                    let s = entry
                        .as_str()
                        .ok_or_else(|| malformed(&format!("{path}.@type"), "entries must be strings"))?;
                    let class = ctx.expand(s)?;
                    graph.insert(Triple::new(id.clone(), rdf_type.clone(), Term::Iri(class)));
                }
            }
            k if k.starts_with('@') => {
                return Err(malformed(path, &format!("unsupported keyword {k:?}")));
            }
            k => {
                let predicate = ctx.expand(k)?;
                let coerced = ctx.is_id_coerced(k);
                let values: Vec<&Value> = match value {
                    Value::Array(items) => items.iter().collect(),
                    single => vec![single],
                };
                for v in values {
                    let object = parse_object_value(v, coerced, &format!("{path}.{k}"), ctx)?;
                    graph.insert(Triple::new(id.clone(), predicate.clone(), object));
                }
            }
        }
    }
    Ok(())
}

fn parse_object_value(v: &Value, coerced: bool, path: &str, ctx: &PrefixContext) -> Result<Term, KgError> {
    match v {
        Value::String(s) if coerced => Ok(Term::Iri(ctx.expand(s)?)),
        Value::String(s) => Ok(Term::Text(s.clone())),
        Value::Number(n) if !coerced => n
            .as_f64()
            .map(Term::Number)
            .ok_or_else(|| malformed(path, "number out of f64 range")),
        Value::Bool(b) if !coerced => Ok(Term::Boolean(*b)),
        _ => Err(malformed(path, "values must be strings, numbers, or booleans")),
    }
}

fn malformed(path: &str, what: &str) -> KgError {
    KgError::Malformed { path: path.into(), what: what.into() }
}

/// How a predicate is written out, decided once per document.
struct KeyPlan {
    iri_key: Option<String>,
    literal_key: Option<String>,
}

/// Serializes a graph deterministically: nodes sorted by subject IRI, keys
/// sorted lexicographically, `@type` entries sorted. The emitted `@context`
/// carries every mapping of `ctx` plus auto-generated prefixes and coerced
/// term definitions for predicates that need them, so parsing the output
/// reproduces the same triple set.
pub fn serialize_jsonld(graph: &Graph, ctx: &PrefixContext) -> String {
    let rdf_type = Iri::new(RDF_TYPE).expect("constant");

    // Work on an extended copy so auto-prefixes participate in compaction.
    let mut full = ctx.clone();
    let mut auto_ns: Vec<String> = Vec::new();
    for triple in graph.iter() {
        if triple.predicate == rdf_type {
            continue;
        }
        if matches!(triple.object, Term::Iri(_)) && needs_auto_prefix(&full, &triple.predicate) {
            let ns = namespace_of(&triple.predicate);
            if !auto_ns.contains(&ns) {
                auto_ns.push(ns);
            }
        }
    }
    auto_ns.sort();
    let mut counter = 1usize;
    for ns in &auto_ns {
        let name = loop {
            let candidate = format!("ns{counter}");
            counter += 1;
            if full.expand(&format!("{candidate}:x")).is_err() {
                break candidate;
            }
        };
        full.add_prefix(&name, ns).expect("namespace split of a valid IRI");
    }

    // Choose document-global keys per predicate and object kind.
    let mut plans: BTreeMap<Iri, KeyPlan> = BTreeMap::new();
    let mut auto_terms: BTreeMap<String, Iri> = BTreeMap::new();
    for triple in graph.iter() {
        if triple.predicate == rdf_type && matches!(triple.object, Term::Iri(_)) {
            continue;
        }
        let plan = plans
            .entry(triple.predicate.clone())
            .or_insert(KeyPlan { iri_key: None, literal_key: None });
        match &triple.object {
            Term::Iri(_) => {
                if plan.iri_key.is_none() {
                    let key = match full.term_for(&triple.predicate, true) {
                        Some(name) => name.to_string(),
                        None => {
                            let curie = full.compact(&triple.predicate);
                            auto_terms.insert(curie.clone(), triple.predicate.clone());
                            curie
                        }
                    };
                    plan.iri_key = Some(key);
                }
            }
            _ => {
                if plan.literal_key.is_none() {
                    let key = match full.term_for(&triple.predicate, false) {
                        Some(name) => name.to_string(),
                        None => full.compact(&triple.predicate),
                    };
                    plan.literal_key = Some(key);
                }
            }
        }
    }
    // A predicate with both IRI and literal objects needs two distinct keys.
    for (predicate, plan) in plans.iter_mut() {
        if let (Some(ik), Some(lk)) = (&plan.iri_key, &plan.literal_key) {
            if ik == lk {
                plan.literal_key = Some(predicate.as_str().to_string());
            }
        }
    }

    let mut nodes: BTreeMap<&Iri, Map<String, Value>> = BTreeMap::new();
    for triple in graph.iter() {
        let node = nodes.entry(&triple.subject).or_insert_with(|| {
            let mut m = Map::new();
            m.insert("@id".into(), Value::String(full.compact(&triple.subject)));
            m
        });
        if triple.predicate == rdf_type {
            if let Term::Iri(class) = &triple.object {
                push_type(node, full.compact(class));
                continue;
            }
        }
        let plan = &plans[&triple.predicate];
        let (key, value) = match &triple.object {
            Term::Iri(iri) => (
                plan.iri_key.clone().expect("planned"),
                Value::String(full.compact(iri)),
            ),
            Term::Text(s) => (plan.literal_key.clone().expect("planned"), Value::String(s.clone())),
            Term::Number(n) => (plan.literal_key.clone().expect("planned"), number_value(*n)),
            Term::Boolean(b) => (plan.literal_key.clone().expect("planned"), Value::Bool(*b)),
        };
        push_value(node, &key, value);
    }

    // `@type` singletons stay scalar, larger sets become sorted arrays.
    for node in nodes.values_mut() {
        if let Some(Value::Array(items)) = node.get_mut("@type") {
            items.sort_by(|a, b| a.as_str().cmp(&b.as_str()));
            if items.len() == 1 {
                let single = items.remove(0);
                node.insert("@type".into(), single);
            }
        }
    }

    let mut context = Map::new();
    for (prefix, ns) in full.prefixes() {
        context.insert(prefix.to_string(), Value::String(ns.to_string()));
    }
    for (name, iri, coerced) in ctx.terms() {
        if full.prefixes().any(|(p, _)| p == name) {
            continue; // already emitted as a prefix string
        }
        context.insert(name.to_string(), term_def_value(&full, iri, coerced));
    }
    for (curie, iri) in &auto_terms {
        context.insert(curie.clone(), term_def_value(&full, iri, true));
    }

    let mut top = Map::new();
    top.insert("@context".into(), Value::Object(context));
    top.insert(
        "@graph".into(),
        Value::Array(nodes.into_values().map(Value::Object).collect()),
    );
    let mut out = serde_json::to_string_pretty(&Value::Object(top)).expect("valid JSON tree");
    out.push('\n');
    out
}

fn term_def_value(ctx: &PrefixContext, iri: &Iri, coerced: bool) -> Value {
    let compact = ctx.compact(iri);
    if coerced {
        let mut def = Map::new();
        def.insert("@id".into(), Value::String(compact));
        def.insert("@type".into(), Value::String("@id".into()));
        Value::Object(def)
    } else {
        Value::String(iri.as_str().to_string())
    }
}

fn number_value(n: f64) -> Value {
    if n.fract() == 0.0 && n.abs() <= 9.007_199_254_740_992e15 {
        Value::Number((n as i64).into())
    } else {
        serde_json::Number::from_f64(n)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(fmt_number(n)))
    }
}

fn push_type(node: &mut Map<String, Value>, class: String) {
    match node.get_mut("@type") {
        Some(Value::Array(items)) => items.push(Value::String(class)),
        Some(existing) => {
            let first = existing.take();
            node.insert("@type".into(), Value::Array(vec![first, Value::String(class)]));
        }
        None => {
            node.insert("@type".into(), Value::Array(vec![Value::String(class)]));
        }
    }
}

fn push_value(node: &mut Map<String, Value>, key: &str, value: Value) {
    match node.get_mut(key) {
        Some(Value::Array(items)) => items.push(value),
        Some(existing) => {
            let first = existing.take();
            node.insert(key.into(), Value::Array(vec![first, value]));
        }
        None => {
            node.insert(key.into(), value);
        }
    }
}

fn needs_auto_prefix(ctx: &PrefixContext, predicate: &Iri) -> bool {
    ctx.term_for(predicate, true).is_none() && ctx.compact(predicate) == predicate.as_str()
}

fn namespace_of(iri: &Iri) -> String {
    let s = iri.as_str();
    let scheme_end = s.find(':').expect("validated IRI") + 1;
    match s[scheme_end..].rfind(['#', '/']) {
        Some(i) => s[..scheme_end + i + 1].to_string(),
        None => s[..scheme_end].to_string(),
    }
}
