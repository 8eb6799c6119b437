//! Property tests for the graph core and query engine invariants.

mod common;

use proptest::prelude::*;

use bddkg::kg::{parse_graph, serialize_jsonld, Graph, Iri, PrefixContext, Term, Triple, RDF_TYPE};
use bddkg::query::{match_bgp, PatternTerm, TriplePattern};

fn small_iri() -> impl Strategy<Value = Iri> {
    (0u8..6, 0u8..6).prop_map(|(ns, local)| {
        Iri::new(format!("https://e{ns}.org/ns#t{local}")).unwrap()
    })
}

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        small_iri().prop_map(Term::Iri),
        "[a-z]{0,6}".prop_map(Term::Text),
        (-1000i32..1000).prop_map(|n| Term::Number(n as f64 / 8.0)),
        any::<bool>().prop_map(Term::Boolean),
    ]
}

fn triple() -> impl Strategy<Value = Triple> {
    (small_iri(), small_iri(), term()).prop_map(|(s, p, o)| Triple::new(s, p, o))
}

fn graph(max: usize) -> impl Strategy<Value = Graph> {
    prop::collection::vec(triple(), 0..max).prop_map(|ts| ts.into_iter().collect())
}

fn pattern_term() -> impl Strategy<Value = PatternTerm> {
    prop_oneof![
        3 => "[a-c]".prop_map(PatternTerm::Variable),
        2 => small_iri().prop_map(PatternTerm::iri),
    ]
}

fn pattern() -> impl Strategy<Value = TriplePattern> {
    (pattern_term(), pattern_term(), prop_oneof![pattern_term(), term().prop_map(PatternTerm::Constant)])
        .prop_map(|(s, p, o)| TriplePattern::new(s, p, o).expect("s/p are IRIs or variables"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn insertion_is_idempotent(triples in prop::collection::vec(triple(), 0..40)) {
        let mut graph = Graph::new();
        for t in &triples {
            graph.insert(t.clone());
        }
        let len = graph.len();
        for t in &triples {
            graph.insert(t.clone());
        }
        prop_assert_eq!(graph.len(), len);
    }

    #[test]
    fn jsonld_roundtrip_is_a_graph_identity(g in graph(30)) {
        let ctx = PrefixContext::new();
        let text = serialize_jsonld(&g, &ctx);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        // And a second pass through an emitted context stays stable.
        let text2 = serialize_jsonld(&back, &ctx);
        prop_assert_eq!(text, text2);
    }

    #[test]
    fn type_array_of_k_entries_yields_k_type_triples(locals in prop::collection::btree_set(0u8..20, 1..8)) {
        let types: Vec<String> = locals.iter().map(|l| format!("\"ex:T{l}\"")).collect();
        let doc = format!(
            r#"{{ "@context": {{ "ex": "https://example.org/" }},
                 "@graph": [ {{ "@id": "ex:n", "@type": [{}] }} ] }}"#,
            types.join(", ")
        );
        let g = parse_graph(&doc).unwrap();
        prop_assert_eq!(g.len(), locals.len());
        let node = Iri::new("https://example.org/n").unwrap();
        let rdf_type = Iri::new(RDF_TYPE).unwrap();
        prop_assert_eq!(g.objects_of(&node, &rdf_type).len(), locals.len());
    }

    #[test]
    fn expand_compact_identity_for_curies(prefix in "[a-z]{1,4}", suffix in "[A-Za-z0-9-]{0,8}") {
        let mut ctx = PrefixContext::new();
        ctx.add_prefix(&prefix, "https://example.org/vocab#").unwrap();
        let token = format!("{prefix}:{suffix}");
        let iri = ctx.expand(&token).unwrap();
        prop_assert_eq!(ctx.compact(&iri), token);
    }

    #[test]
    fn expand_is_injective_over_distinct_suffixes(a in "[A-Za-z0-9]{1,8}", b in "[A-Za-z0-9]{1,8}") {
        prop_assume!(a != b);
        let mut ctx = PrefixContext::new();
        ctx.add_prefix("p", "https://example.org/vocab#").unwrap();
        let ia = ctx.expand(&format!("p:{a}")).unwrap();
        let ib = ctx.expand(&format!("p:{b}")).unwrap();
        prop_assert_ne!(ia, ib);
    }

    #[test]
    fn bgp_matches_the_brute_force_oracle(g in graph(16), patterns in prop::collection::vec(pattern(), 0..3)) {
        common::assert_matches_oracle(&g, &patterns);
    }

    #[test]
    fn bgp_result_is_pattern_order_independent(g in graph(16), mut patterns in prop::collection::vec(pattern(), 2..4)) {
        let forward = match_bgp(&g, &patterns);
        patterns.reverse();
        let backward = match_bgp(&g, &patterns);
        prop_assert_eq!(forward, backward);
    }
}
