//! End-to-end pipeline checks over the committed fixture project: loading,
//! validation, generation against golden files, and JSON-LD round trips.

mod common;

use bddkg::codegen::{emit_gherkin, emit_manifest};
use bddkg::harness::{run_suite, RunConfig};
use bddkg::kg::{parse_graph, parse_jsonld, serialize_jsonld, Term};
use bddkg::query::{match_bgp, PatternTerm, TriplePattern};
use bddkg::shapes::{builtin_bdd_shapes, validate};
use bddkg::vocab;
use common::{assert_golden, fixture_path, iri, pickplace_project, read_fixture, validation_project};

#[test]
fn fixture_project_conforms_to_builtin_shapes() {
    let project = pickplace_project();
    let report = validate(&project.graph, &builtin_bdd_shapes());
    assert!(report.conforms(), "unexpected violations:\n{report}");
}

#[test]
fn validation_fixture_conforms_too() {
    let project = validation_project();
    let report = validate(&project.graph, &builtin_bdd_shapes());
    assert!(report.conforms(), "unexpected violations:\n{report}");
}

#[test]
fn scene_has_expected_element_counts() {
    let project = pickplace_project();
    let graph = &project.graph;
    assert_eq!(graph.nodes_of_type(&vocab::scene_object()).len(), 7);
    assert_eq!(graph.nodes_of_type(&vocab::agent()).len(), 2);
    let bins = graph
        .nodes_of_type(&vocab::workspace())
        .into_iter()
        .filter(|w| {
            graph.object_of(w, &vocab::workspace_kind()) == Some(Term::Text("bin".into()))
        })
        .count();
    assert_eq!(bins, 2);
}

#[test]
fn gherkin_emission_matches_the_golden_file() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let doc = emit_gherkin(&project.graph, &project.context, &story).unwrap();
    assert_eq!(doc.scenarios.len(), 14);
    assert_golden("golden/pickplace.feature", &doc.render());
}

#[test]
fn manifest_emission_matches_the_golden_file() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    assert_eq!(manifest.instances.len(), 14);
    for instance in &manifest.instances {
        assert_eq!(instance.clauses.iter().filter(|c| c.section == "given").count(), 1);
        assert_eq!(instance.clauses.iter().filter(|c| c.section == "then").count(), 3);
    }
    assert_golden("golden/manifest.json", &manifest.to_json_string());
}

#[test]
fn gherkin_and_manifest_agree_on_instances() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let doc = emit_gherkin(&project.graph, &project.context, &story).unwrap();
    let manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    let titles: Vec<&str> = doc.scenarios.iter().map(|(t, _)| t.as_str()).collect();
    let ids: Vec<&str> = manifest.instances.iter().map(|i| i.id.as_str()).collect();
    assert_eq!(titles, ids);
    for (instance, (_, steps)) in manifest.instances.iter().zip(&doc.scenarios) {
        // Steps: one line per clause plus the When line.
        assert_eq!(steps.len(), instance.clauses.len() + 1);
    }
}

#[test]
fn listing_style_fixture_parses_to_the_expected_edges() {
    let text = read_fixture("fixtures/jsonld/fluent_clause.jsonld");
    let graph = parse_graph(&text).unwrap();
    let clause = iri("https://example.org/pickup-fixture/flc-held-pck");
    assert!(graph.has_type(&clause, &vocab::fluent_clause()));
    let objects = graph.objects_of(&clause, &vocab::clause_of());
    assert_eq!(
        objects,
        vec![Term::Iri(iri("https://example.org/pickup-fixture/pickup-then"))]
    );
}

#[test]
fn jsonld_fixtures_roundtrip_as_graph_sets() {
    for fixture in ["fixtures/jsonld/fluent_clause.jsonld", "fixtures/jsonld/clause_graph.jsonld"] {
        let text = read_fixture(fixture);
        let (ctx, graph) = parse_jsonld(&text).unwrap();
        let serialized = serialize_jsonld(&graph, &ctx);
        let reparsed = parse_graph(&serialized).unwrap();
        assert_eq!(graph, reparsed, "round trip of {fixture}");
    }
}

#[test]
fn serialized_fixture_matches_the_golden_bytes() {
    let text = read_fixture("fixtures/jsonld/fluent_clause.jsonld");
    let (ctx, graph) = parse_jsonld(&text).unwrap();
    let serialized = serialize_jsonld(&graph, &ctx);
    assert_eq!(serialized, serialize_jsonld(&graph, &ctx));
    assert_golden("golden/fluent_clause.serialized.jsonld", &serialized);
}

#[test]
fn project_graph_survives_jsonld_roundtrip() {
    let project = pickplace_project();
    let serialized = serialize_jsonld(&project.graph, &project.context);
    let reparsed = parse_graph(&serialized).unwrap();
    assert_eq!(project.graph, reparsed);
}

#[test]
fn clause_time_query_pairs_every_clause_with_its_constraint() {
    let project = pickplace_project();
    let patterns = vec![
        TriplePattern::new(
            PatternTerm::var("c"),
            PatternTerm::iri(iri(bddkg::kg::RDF_TYPE)),
            PatternTerm::Constant(Term::Iri(vocab::fluent_clause())),
        )
        .unwrap(),
        TriplePattern::new(
            PatternTerm::var("c"),
            PatternTerm::iri(vocab::holds_at()),
            PatternTerm::var("t"),
        )
        .unwrap(),
    ];
    let bindings = match_bgp(&project.graph, &patterns);
    assert_eq!(bindings.len(), 4, "one binding per clause of the template");
    common::assert_matches_oracle(&project.graph, &patterns);
}

#[test]
fn gripper_with_no_faults_passes_everything_at_low_scale() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    let config_text = r#"{
        "sweep": {
            "agents": ["pickplace:agent/panda"],
            "ranges": {"normal": [[0.25, -0.4], [0.6, 0.4]]},
            "bin_height_scales": [0.8]
        },
        "repetitions": 1,
        "master_seed": 4242,
        "slip_probability": 0.0
    }"#;
    let config = RunConfig::from_json_str(config_text).unwrap();
    let result = run_suite(&manifest, &config).unwrap();
    assert_eq!(result.records.len(), 14);
    assert!(result.records.iter().all(|r| r.outcome == "passed"), "faultless gripper run");
    // No collision anywhere means displacement stayed exactly zero, which
    // shows up as a complete absence of DoesNotCollide failures.
    assert_eq!(result.report.combinations.len(), 1);
    assert_eq!(result.report.combinations[0].outcomes.get("passed"), Some(&14));
}

#[test]
fn suction_speeds_center_on_nominal_and_slip_spikes_exceed_it() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    let config = RunConfig::from_json_str(&read_fixture("fixtures/pickplace/run.json")).unwrap();
    let result = run_suite(&manifest, &config).unwrap();

    // Passing suction executions move at the suction nominal speed; the
    // median differs from 1.0 only by dt quantization noise.
    let suction = &result.report.per_agent_max_ee_speed["https://example.org/pickplace/agent/ur10"];
    assert!((suction.median - 1.0).abs() < 1e-6, "median {}", suction.median);

    // Slipped gripper executions spike to 1.5x..3x of the 0.5 m/s nominal.
    let spikes: Vec<f64> = result
        .records
        .iter()
        .filter(|r| r.failing_clause == "IsHeldBy")
        .map(|r| r.max_ee_speed)
        .collect();
    assert!(!spikes.is_empty());
    for speed in &spikes {
        assert!((0.75..=1.5).contains(speed), "spike speed {speed} outside the fault model");
        assert!(*speed > 0.5, "spikes sit well above the gripper nominal");
    }
}

#[test]
fn collision_failures_never_decrease_with_bin_scale() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    let config = RunConfig::from_json_str(&read_fixture("fixtures/pickplace/run.json")).unwrap();
    let result = run_suite(&manifest, &config).unwrap();

    let suction_agent = "https://example.org/pickplace/agent/ur10";
    for range in ["dense", "normal"] {
        let failures_at = |scale: f64| {
            result
                .records
                .iter()
                .filter(|r| {
                    r.agent == suction_agent
                        && r.range == range
                        && r.bin_height_scale == scale
                        && r.failing_clause == "DoesNotCollide"
                })
                .count()
        };
        let counts = [failures_at(0.8), failures_at(0.9), failures_at(1.0)];
        assert!(counts[0] <= counts[1] && counts[1] <= counts[2], "{range}: {counts:?}");
    }
}

#[test]
fn run_config_rejects_zero_repetitions() {
    let text = read_fixture("fixtures/pickplace/run.json").replace("\"repetitions\": 10", "\"repetitions\": 0");
    assert!(RunConfig::from_json_str(&text).is_err());
}

#[test]
fn missing_event_surfaces_as_a_suite_error() {
    let project = pickplace_project();
    let story = iri("https://example.org/pickplace/story/pickplace");
    let mut manifest = emit_manifest(&project.graph, &project.context, &story).unwrap();
    // Point one clause at an event the behaviour never emits.
    manifest.instances[0].clauses[1].timing.event = Some("pickplace:event/ghost".into());
    let config = RunConfig::from_json_str(&read_fixture("fixtures/pickplace/run.json")).unwrap();
    let err = run_suite(&manifest, &config).unwrap_err();
    assert!(matches!(err, bddkg::harness::HarnessError::MissingEvent { .. }));
}

#[test]
fn loading_is_stable_across_runs() {
    let a = pickplace_project();
    let b = pickplace_project();
    assert_eq!(a.graph, b.graph);
    assert_eq!(
        serialize_jsonld(&a.graph, &a.context),
        serialize_jsonld(&b.graph, &b.context)
    );
    let _ = fixture_path("fixtures/pickplace/pickplace.bdd");
}
