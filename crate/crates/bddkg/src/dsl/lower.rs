//! Lowering of parsed models into metamodel-conformant graphs.
//!
//! Every DSL name maps to exactly one IRI of the form
//! `<namespace>/<kind>/<name>`; variables and clauses are namespaced per
//! template. The reverse mapping (IRI to source position) is kept for
//! diagnostics.

use std::collections::BTreeMap;

use super::*;
use crate::kg::{Graph, Iri, Term, Triple, RDF_TYPE};
use crate::vocab;

/// Where an IRI was declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePos {
    pub file: String,
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for SourcePos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

struct Lowering<'a> {
    ns: String,
    graph: Graph,
    source_map: BTreeMap<Iri, SourcePos>,
    rdf_type: Iri,
    events: BTreeMap<String, Iri>,
    elements: BTreeMap<String, (Iri, ElementKind)>,
    scenes: BTreeMap<String, Iri>,
    templates: BTreeMap<String, &'a TemplateDecl>,
    behaviours: BTreeMap<String, Vec<String>>,
    variants_seen: BTreeMap<String, Pos>,
    stories_seen: BTreeMap<String, Pos>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ElementKind {
    Object,
    Agent,
    Workspace,
}

/// Lowers merged models and scenes into one graph under `namespace`.
/// All cross-references (events, templates, scenes, elements) must resolve
/// across the whole input set.
pub fn lower_to_graph(
    models: &[SourceModel],
    scenes: &[SceneModel],
    namespace: &Iri,
) -> Result<(Graph, BTreeMap<Iri, SourcePos>), DslError> {
    let ns = namespace.as_str().trim_end_matches('/').to_string();
    let mut low = Lowering {
        ns,
        graph: Graph::new(),
        source_map: BTreeMap::new(),
        rdf_type: Iri::new(RDF_TYPE).expect("constant"),
        events: BTreeMap::new(),
        elements: BTreeMap::new(),
        scenes: BTreeMap::new(),
        templates: BTreeMap::new(),
        behaviours: BTreeMap::new(),
        variants_seen: BTreeMap::new(),
        stories_seen: BTreeMap::new(),
    };

    for scene in scenes {
        low.lower_scene(scene)?;
    }
    for model in models {
        low.declare_events(model)?;
    }
    for model in models {
        for template in &model.templates {
            low.lower_template(template, &model.source)?;
        }
    }
    for model in models {
        for story in &model.stories {
            low.lower_story(story, &model.source)?;
        }
    }
    Ok((low.graph, low.source_map))
}

impl<'a> Lowering<'a> {
    fn iri(&self, kind: &str, name: &str) -> Iri {
        Iri::new(format!("{}/{kind}/{name}", self.ns)).expect("namespace is a valid IRI")
    }

    fn record(&mut self, iri: &Iri, file: &str, pos: Pos) {
        self.source_map.insert(
            iri.clone(),
            SourcePos { file: file.to_string(), line: pos.line, col: pos.col },
        );
    }

    fn typed(&mut self, node: &Iri, class: Iri) {
        self.graph
            .insert(Triple::new(node.clone(), self.rdf_type.clone(), Term::Iri(class)));
    }

    fn edge(&mut self, s: &Iri, p: Iri, o: &Iri) {
        self.graph.insert(Triple::new(s.clone(), p, Term::Iri(o.clone())));
    }

    fn lit(&mut self, s: &Iri, p: Iri, o: Term) {
        self.graph.insert(Triple::new(s.clone(), p, o));
    }

    fn lower_scene(&mut self, scene: &SceneModel) -> Result<(), DslError> {
        if self.scenes.contains_key(&scene.name) {
            return Err(DslError::DuplicateName {
                kind: "scene",
                name: scene.name.clone(),
                pos: Pos::default(),
            });
        }
        let scene_iri = self.iri("scene", &scene.name);
        self.typed(&scene_iri, vocab::scene());
        self.record(&scene_iri.clone(), &scene.source, Pos { line: 1, col: 1 });
        self.scenes.insert(scene.name.clone(), scene_iri.clone());

        for obj in &scene.objects {
            let iri = self.iri("object", &obj.name);
            self.declare_element(&obj.name, &iri, ElementKind::Object, &scene.source, obj.pos)?;
            self.typed(&iri, vocab::scene_object());
            self.lit(&iri, vocab::mass_kg(), Term::Number(obj.mass_kg));
            self.lit(&iri, vocab::half_extent_x(), Term::Number(obj.half_extents_m[0]));
            self.lit(&iri, vocab::half_extent_y(), Term::Number(obj.half_extents_m[1]));
            self.lit(&iri, vocab::half_extent_z(), Term::Number(obj.half_extents_m[2]));
            if let Some([x_min, y_min, x_max, y_max]) = obj.position_range_m {
                self.lit(&iri, vocab::pos_min_x(), Term::Number(x_min));
                self.lit(&iri, vocab::pos_min_y(), Term::Number(y_min));
                self.lit(&iri, vocab::pos_max_x(), Term::Number(x_max));
                self.lit(&iri, vocab::pos_max_y(), Term::Number(y_max));
            }
            self.reify_relation(&scene_iri, &scene.name, "object", &obj.name, &iri, vocab::scene_has_object(), &scene.source, obj.pos);
        }
        for agent in &scene.agents {
            let iri = self.iri("agent", &agent.name);
            self.declare_element(&agent.name, &iri, ElementKind::Agent, &scene.source, agent.pos)?;
            self.typed(&iri, vocab::agent());
            self.lit(&iri, vocab::ee_kind(), Term::Text(agent.ee.name().into()));
            self.reify_relation(&scene_iri, &scene.name, "agent", &agent.name, &iri, vocab::scene_has_agent(), &scene.source, agent.pos);
        }
        for ws in &scene.workspaces {
            let iri = self.iri("workspace", &ws.name);
            self.declare_element(&ws.name, &iri, ElementKind::Workspace, &scene.source, ws.pos)?;
            self.typed(&iri, vocab::workspace());
            self.lit(&iri, vocab::workspace_kind(), Term::Text(ws.kind.name().into()));
            let [min_x, min_y, min_z, max_x, max_y, max_z] = ws.aabb_m;
            self.lit(&iri, vocab::aabb_min_x(), Term::Number(min_x));
            self.lit(&iri, vocab::aabb_min_y(), Term::Number(min_y));
            self.lit(&iri, vocab::aabb_min_z(), Term::Number(min_z));
            self.lit(&iri, vocab::aabb_max_x(), Term::Number(max_x));
            self.lit(&iri, vocab::aabb_max_y(), Term::Number(max_y));
            self.lit(&iri, vocab::aabb_max_z(), Term::Number(max_z));
            if let Some(h) = ws.bin_base_height_m {
                self.lit(&iri, vocab::bin_base_height_m(), Term::Number(h));
            }
            self.reify_relation(&scene_iri, &scene.name, "workspace", &ws.name, &iri, vocab::scene_has_workspace(), &scene.source, ws.pos);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn reify_relation(
        &mut self,
        scene_iri: &Iri,
        scene_name: &str,
        kind: &str,
        element_name: &str,
        element_iri: &Iri,
        relation_class: Iri,
        file: &str,
        pos: Pos,
    ) {
        let rel = self.iri("scene-relation", &format!("{scene_name}/{kind}/{element_name}"));
        self.typed(&rel, relation_class);
        self.edge(&rel, vocab::of_scene(), scene_iri);
        self.edge(&rel, vocab::ref_element(), element_iri);
        self.record(&rel, file, pos);
    }

    fn declare_element(
        &mut self,
        name: &str,
        iri: &Iri,
        kind: ElementKind,
        file: &str,
        pos: Pos,
    ) -> Result<(), DslError> {
        if self.elements.contains_key(name) {
            return Err(DslError::DuplicateName { kind: "scene element", name: name.into(), pos });
        }
        self.elements.insert(name.to_string(), (iri.clone(), kind));
        self.record(iri, file, pos);
        Ok(())
    }

    fn declare_events(&mut self, model: &SourceModel) -> Result<(), DslError> {
        for (name, pos) in &model.events {
            if self.events.contains_key(name) {
                return Err(DslError::DuplicateName { kind: "event", name: name.clone(), pos: *pos });
            }
            let iri = self.iri("event", name);
            self.typed(&iri, vocab::event());
            self.record(&iri, &model.source, *pos);
            self.events.insert(name.clone(), iri);
        }
        Ok(())
    }

    fn resolve_event(&self, name: &str, pos: Pos) -> Result<Iri, DslError> {
        self.events
            .get(name)
            .cloned()
            .ok_or_else(|| DslError::UnknownReference { kind: "event", name: name.into(), pos })
    }

    fn lower_template(&mut self, template: &'a TemplateDecl, file: &str) -> Result<(), DslError> {
        if self.templates.contains_key(&template.name) {
            return Err(DslError::DuplicateName {
                kind: "template",
                name: template.name.clone(),
                pos: template.pos,
            });
        }
        self.templates.insert(template.name.clone(), template);

        let t = &template.name;
        let template_iri = self.iri("template", t);
        let scenario_iri = self.iri("scenario", t);
        let given_iri = self.iri("given", t);
        let when_iri = self.iri("when", t);
        let then_iri = self.iri("then", t);
        let task_iri = self.iri("task", t);

        for (iri, class) in [
            (&template_iri, vocab::scenario_template()),
            (&scenario_iri, vocab::scenario()),
            (&given_iri, vocab::given()),
            (&when_iri, vocab::when()),
            (&then_iri, vocab::then()),
            (&task_iri, vocab::task()),
        ] {
            let iri = iri.clone();
            self.typed(&iri, class);
            self.record(&iri, file, template.pos);
        }

        self.edge(&template_iri, vocab::of_scenario(), &scenario_iri);
        self.edge(&scenario_iri, vocab::has_given(), &given_iri);
        self.edge(&scenario_iri, vocab::has_when(), &when_iri);
        self.edge(&scenario_iri, vocab::has_then(), &then_iri);

        let behaviour_iri = self.lower_behaviour(template, file)?;
        self.edge(&scenario_iri, vocab::of_behaviour(), &behaviour_iri);

        for (var, var_pos) in &template.variables {
            let var_iri = self.iri("variable", &format!("{t}/{var}"));
            self.typed(&var_iri, vocab::scenario_variable());
            self.edge(&template_iri, vocab::has_variable(), &var_iri);
            self.record(&var_iri, file, *var_pos);
        }

        let clauses = template.given.iter().map(|c| (c, &given_iri)).chain(
            template.then.iter().map(|c| (c, &then_iri)),
        );
        for (index, (clause, section_iri)) in clauses.enumerate() {
            let clause_iri = self.iri("clause", &format!("{t}/{index}"));
            let time_iri = self.iri("time", &format!("{t}/{index}"));
            self.typed(&clause_iri, vocab::fluent_clause());
            self.record(&clause_iri, file, clause.pos);
            self.edge(&template_iri, vocab::has_clause(), &clause_iri);
            self.edge(&clause_iri, vocab::clause_of(), section_iri);
            self.lit(&clause_iri, vocab::order(), Term::Number(index as f64));
            let predicate_iri = match clause.predicate {
                Predicate::IsLocatedAt => vocab::is_located_at(),
                Predicate::IsHeldBy => vocab::is_held_by(),
                Predicate::DoesNotCollide => vocab::does_not_collide(),
            };
            self.edge(&clause_iri, vocab::predicate(), &predicate_iri);
            for (role, var, _) in &clause.roles {
                let var_iri = self.iri("variable", &format!("{t}/{var}"));
                let role_predicate = match role {
                    Role::Object => vocab::ref_object(),
                    Role::Agent => vocab::ref_agent(),
                    Role::Workspace => vocab::ref_workspace(),
                };
                self.edge(&clause_iri, role_predicate, &var_iri);
            }

            self.typed(&time_iri, vocab::time_constraint());
            self.edge(&clause_iri, vocab::holds_at(), &time_iri);
            match &clause.timing {
                TimingDecl::After { event, pos } => {
                    let event_iri = self.resolve_event(event, *pos)?;
                    self.lit(&time_iri, vocab::constraint_kind(), Term::Text(vocab::KIND_AFTER_EVENT.into()));
                    self.edge(&time_iri, vocab::ref_event(), &event_iri);
                    self.record(&time_iri, file, *pos);
                }
                TimingDecl::Before { event, pos } => {
                    let event_iri = self.resolve_event(event, *pos)?;
                    self.lit(&time_iri, vocab::constraint_kind(), Term::Text(vocab::KIND_BEFORE_EVENT.into()));
                    self.edge(&time_iri, vocab::ref_event(), &event_iri);
                    self.record(&time_iri, file, *pos);
                }
                TimingDecl::During { start, end, pos } => {
                    let start_iri = self.resolve_event(start, *pos)?;
                    let end_iri = self.resolve_event(end, *pos)?;
                    self.lit(&time_iri, vocab::constraint_kind(), Term::Text(vocab::KIND_DURING.into()));
                    self.edge(&time_iri, vocab::ref_event_start(), &start_iri);
                    self.edge(&time_iri, vocab::ref_event_end(), &end_iri);
                    self.record(&time_iri, file, *pos);
                }
            }
        }
        Ok(())
    }

    fn lower_behaviour(&mut self, template: &TemplateDecl, file: &str) -> Result<Iri, DslError> {
        let name = &template.behaviour;
        let emits: Vec<String> = template.emits.iter().map(|(e, _)| e.clone()).collect();
        let behaviour_iri = self.iri("behaviour", name);
        if let Some(existing) = self.behaviours.get(name) {
            if existing != &emits {
                return Err(DslError::Lowering(format!(
                    "behaviour {name:?} declared twice with different event lists"
                )));
            }
            return Ok(behaviour_iri);
        }
        self.typed(&behaviour_iri, vocab::behaviour());
        self.record(&behaviour_iri, file, template.behaviour_pos);
        for (index, (event, pos)) in template.emits.iter().enumerate() {
            let event_iri = self.resolve_event(event, *pos)?;
            let emission_iri = self.iri("emission", &format!("{name}/{index}"));
            self.typed(&emission_iri, vocab::behaviour_emission());
            self.edge(&emission_iri, vocab::of_behaviour(), &behaviour_iri);
            self.edge(&emission_iri, vocab::ref_event(), &event_iri);
            self.lit(&emission_iri, vocab::order(), Term::Number(index as f64));
            self.record(&emission_iri, file, *pos);
        }
        self.behaviours.insert(name.clone(), emits);
        Ok(behaviour_iri)
    }

    fn lower_story(&mut self, story: &StoryDecl, file: &str) -> Result<(), DslError> {
        if let Some(first) = self.stories_seen.get(&story.name) {
            return Err(DslError::DuplicateName { kind: "story", name: story.name.clone(), pos: *first });
        }
        self.stories_seen.insert(story.name.clone(), story.pos);

        let story_iri = self.iri("story", &story.name);
        self.typed(&story_iri, vocab::user_story());
        self.record(&story_iri, file, story.pos);

        for variant in &story.variants {
            if let Some(first) = self.variants_seen.get(&variant.name) {
                return Err(DslError::DuplicateName {
                    kind: "variant",
                    name: variant.name.clone(),
                    pos: *first,
                });
            }
            self.variants_seen.insert(variant.name.clone(), variant.pos);

            let (template_name, template_pos) = &variant.template;
            let template = *self.templates.get(template_name).ok_or_else(|| {
                DslError::UnknownReference {
                    kind: "template",
                    name: template_name.clone(),
                    pos: *template_pos,
                }
            })?;
            let template_iri = self.iri("template", template_name);

            let (scene_name, scene_pos) = &variant.scene;
            let scene_iri = self.scenes.get(scene_name).cloned().ok_or_else(|| {
                DslError::UnknownReference { kind: "scene", name: scene_name.clone(), pos: *scene_pos }
            })?;
            // The template owns the scene link; identical references from
            // several variants collapse by set semantics, conflicting ones
            // surface as a cardinality violation during validation.
            self.edge(&template_iri, vocab::has_scene(), &scene_iri);

            let variant_iri = self.iri("variant", &variant.name);
            self.typed(&variant_iri, vocab::scenario_variant());
            self.record(&variant_iri, file, variant.pos);
            self.edge(&story_iri, vocab::has_variant(), &variant_iri);
            self.edge(&variant_iri, vocab::of_template(), &template_iri);

            for foreach in &variant.variations {
                if !template.variables.iter().any(|(v, _)| v == &foreach.variable) {
                    return Err(DslError::UnknownReference {
                        kind: "template variable",
                        name: foreach.variable.clone(),
                        pos: foreach.pos,
                    });
                }
                let variation_iri =
                    self.iri("variation", &format!("{}/{}", variant.name, foreach.variable));
                self.typed(&variation_iri, vocab::task_variation());
                self.record(&variation_iri, file, foreach.pos);
                self.edge(&variant_iri, vocab::has_variation(), &variation_iri);
                let task_iri = self.iri("task", template_name);
                self.edge(&variation_iri, vocab::of_task(), &task_iri);
                let var_iri = self.iri("variable", &format!("{template_name}/{}", foreach.variable));
                self.edge(&variation_iri, vocab::of_variable(), &var_iri);
                for (value, value_pos) in &foreach.values {
                    let (element_iri, _) = self.elements.get(value).cloned().ok_or_else(|| {
                        DslError::UnknownReference {
                            kind: "scene element",
                            name: value.clone(),
                            pos: *value_pos,
                        }
                    })?;
                    self.edge(&variation_iri, vocab::can_be(), &element_iri);
                }
            }
        }
        Ok(())
    }
}
