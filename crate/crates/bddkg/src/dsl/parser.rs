//! Recursive-descent parsers for the `.bdd` and `.scene` grammars.

use super::lexer::{lex, Spanned, Tok};
use super::*;

struct Tokens {
    toks: Vec<Spanned>,
    at: usize,
}

impl Tokens {
    fn peek(&self) -> &Spanned {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Spanned {
        let s = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        s
    }

    fn error(&self, expected: impl Into<String>) -> DslError {
        let s = self.peek();
        DslError::Syntax {
            line: s.pos.line,
            col: s.pos.col,
            expected: expected.into(),
            found: s.tok.describe(),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                let pos = self.peek().pos;
                self.next();
                Ok((name, pos))
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Pos, DslError> {
        match &self.peek().tok {
            Tok::Ident(name) if name == kw => {
                let pos = self.peek().pos;
                self.next();
                Ok(pos)
            }
            _ => Err(self.error(format!("keyword {kw:?}"))),
        }
    }

    fn expect_tok(&mut self, tok: Tok) -> Result<Pos, DslError> {
        if self.peek().tok == tok {
            let pos = self.peek().pos;
            self.next();
            Ok(pos)
        } else {
            Err(self.error(tok.describe()))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(name) if name == kw)
    }

    fn expect_number(&mut self, what: &str) -> Result<(f64, Pos), DslError> {
        match self.peek().tok {
            Tok::Num(n) => {
                let pos = self.peek().pos;
                self.next();
                Ok((n, pos))
            }
            _ => Err(self.error(what)),
        }
    }
}

/// Parses a `.bdd` model. Checks in-file invariants: unique names per kind,
/// unique variables per template, clause roles matching the predicate arity
/// and referencing declared variables.
pub fn parse_bdd_dsl(text: &str) -> Result<SourceModel, DslError> {
    let mut toks = Tokens { toks: lex(text)?, at: 0 };
    let mut model = SourceModel::default();

    loop {
        match &toks.peek().tok {
            Tok::Eof => break,
            Tok::Ident(kw) => match kw.as_str() {
                "import" => {
                    let pos = toks.next().pos;
                    match toks.peek().tok.clone() {
                        Tok::Str(path) => {
                            toks.next();
                            model.imports.push((path, pos));
                        }
                        _ => return Err(toks.error("a quoted import path")),
                    }
                }
                "Event" => {
                    toks.next();
                    let (name, pos) = toks.expect_ident("an event name")?;
                    check_unique("event", &model.events, &name, pos)?;
                    model.events.push((name, pos));
                }
                "Template" => {
                    let template = parse_template(&mut toks)?;
                    if model.templates.iter().any(|t| t.name == template.name) {
                        return Err(DslError::DuplicateName {
                            kind: "template",
                            name: template.name,
                            pos: template.pos,
                        });
                    }
                    model.templates.push(template);
                }
                "Story" => {
                    let story = parse_story(&mut toks)?;
                    if model.stories.iter().any(|s| s.name == story.name) {
                        return Err(DslError::DuplicateName {
                            kind: "story",
                            name: story.name,
                            pos: story.pos,
                        });
                    }
                    model.stories.push(story);
                }
                _ => return Err(toks.error("import, Event, Template, or Story")),
            },
            _ => return Err(toks.error("import, Event, Template, or Story")),
        }
    }
    Ok(model)
}

fn check_unique(kind: &'static str, seen: &[(String, Pos)], name: &str, pos: Pos) -> Result<(), DslError> {
    if seen.iter().any(|(n, _)| n == name) {
        return Err(DslError::DuplicateName { kind, name: name.to_string(), pos });
    }
    Ok(())
}

fn parse_template(toks: &mut Tokens) -> Result<TemplateDecl, DslError> {
    toks.expect_keyword("Template")?;
    let (name, pos) = toks.expect_ident("a template name")?;
    toks.expect_tok(Tok::LBrace)?;

    let mut variables: Vec<(String, Pos)> = Vec::new();
    while toks.at_keyword("var") {
        toks.next();
        let (var, var_pos) = toks.expect_ident("a variable name")?;
        check_unique("variable", &variables, &var, var_pos)?;
        variables.push((var, var_pos));
    }
    if variables.is_empty() {
        return Err(toks.error("at least one 'var' declaration"));
    }

    toks.expect_keyword("Given")?;
    toks.expect_tok(Tok::Colon)?;
    let given = parse_clauses(toks, &variables)?;
    if given.is_empty() {
        return Err(toks.error("at least one Given clause"));
    }

    toks.expect_keyword("When")?;
    toks.expect_tok(Tok::Colon)?;
    toks.expect_keyword("behaviour")?;
    let (behaviour, behaviour_pos) = toks.expect_ident("a behaviour name")?;
    toks.expect_keyword("emits")?;
    let mut emits: Vec<(String, Pos)> = Vec::new();
    while matches!(&toks.peek().tok, Tok::Ident(n) if n != "Then") {
        let (event, event_pos) = toks.expect_ident("an event name")?;
        check_unique("emitted event", &emits, &event, event_pos)?;
        emits.push((event, event_pos));
    }
    if emits.is_empty() {
        return Err(toks.error("at least one emitted event"));
    }

    toks.expect_keyword("Then")?;
    toks.expect_tok(Tok::Colon)?;
    let then = parse_clauses(toks, &variables)?;
    if then.is_empty() {
        return Err(toks.error("at least one Then clause"));
    }

    toks.expect_tok(Tok::RBrace)?;
    Ok(TemplateDecl { name, pos, variables, given, behaviour, behaviour_pos, emits, then })
}

fn parse_clauses(toks: &mut Tokens, variables: &[(String, Pos)]) -> Result<Vec<ClauseDecl>, DslError> {
    let mut clauses = Vec::new();
    while toks.peek().tok == Tok::Lt {
        clauses.push(parse_clause(toks, variables)?);
    }
    Ok(clauses)
}

fn parse_clause(toks: &mut Tokens, variables: &[(String, Pos)]) -> Result<ClauseDecl, DslError> {
    let pos = toks.expect_tok(Tok::Lt)?;
    let (predicate_name, predicate_pos) = toks.expect_ident("a predicate name")?;
    let predicate = match predicate_name.as_str() {
        "IsLocatedAt" => Predicate::IsLocatedAt,
        "IsHeldBy" => Predicate::IsHeldBy,
        "DoesNotCollide" => Predicate::DoesNotCollide,
        other => {
            return Err(DslError::Syntax {
                line: predicate_pos.line,
                col: predicate_pos.col,
                expected: "IsLocatedAt, IsHeldBy, or DoesNotCollide".into(),
                found: format!("{other:?}"),
            })
        }
    };
    toks.expect_tok(Tok::Gt)?;
    toks.expect_tok(Tok::LParen)?;

    let mut roles: Vec<(Role, String, Pos)> = Vec::new();
    loop {
        let (role_name, role_pos) = toks.expect_ident("a role (object, agent, workspace)")?;
        let role = match role_name.as_str() {
            "object" => Role::Object,
            "agent" => Role::Agent,
            "workspace" => Role::Workspace,
            other => {
                return Err(DslError::Syntax {
                    line: role_pos.line,
                    col: role_pos.col,
                    expected: "object, agent, or workspace".into(),
                    found: format!("{other:?}"),
                })
            }
        };
        toks.expect_tok(Tok::Eq)?;
        let (var, var_pos) = toks.expect_ident("a variable name")?;
        if !variables.iter().any(|(v, _)| v == &var) {
            return Err(DslError::UnknownReference { kind: "variable", name: var, pos: var_pos });
        }
        if roles.iter().any(|(r, _, _)| *r == role) {
            return Err(DslError::InvalidClause {
                pos: role_pos,
                msg: format!("role {} given twice", role.name()),
            });
        }
        roles.push((role, var, var_pos));
        match toks.peek().tok {
            Tok::Comma => {
                toks.next();
            }
            Tok::RParen => break,
            _ => return Err(toks.error("',' or ')'")),
        }
    }
    toks.expect_tok(Tok::RParen)?;

    let mut have: Vec<Role> = roles.iter().map(|(r, _, _)| *r).collect();
    have.sort();
    let mut want: Vec<Role> = predicate.arity().to_vec();
    want.sort();
    if have != want {
        return Err(DslError::InvalidClause {
            pos,
            msg: format!(
                "{} takes roles {}, found {}",
                predicate.name(),
                want.iter().map(|r| r.name()).collect::<Vec<_>>().join("+"),
                have.iter().map(|r| r.name()).collect::<Vec<_>>().join("+"),
            ),
        });
    }

    let timing = parse_timing(toks)?;
    Ok(ClauseDecl { predicate, pos, roles, timing })
}

fn parse_timing(toks: &mut Tokens) -> Result<TimingDecl, DslError> {
    if toks.at_keyword("after") || toks.at_keyword("before") {
        let (kw, pos) = toks.expect_ident("timing keyword")?;
        toks.expect_keyword("event")?;
        let (event, _) = toks.expect_ident("an event name")?;
        return Ok(if kw == "after" {
            TimingDecl::After { event, pos }
        } else {
            TimingDecl::Before { event, pos }
        });
    }
    if toks.at_keyword("during") {
        let pos = toks.next().pos;
        let (start, _) = toks.expect_ident("a start event name")?;
        toks.expect_tok(Tok::DotDot)?;
        let (end, _) = toks.expect_ident("an end event name")?;
        return Ok(TimingDecl::During { start, end, pos });
    }
    Err(toks.error("'after event', 'before event', or 'during'"))
}

fn parse_story(toks: &mut Tokens) -> Result<StoryDecl, DslError> {
    toks.expect_keyword("Story")?;
    let (name, pos) = toks.expect_ident("a story name")?;
    toks.expect_tok(Tok::LBrace)?;
    let mut variants: Vec<VariantDecl> = Vec::new();
    while toks.at_keyword("Variant") {
        let variant = parse_variant(toks)?;
        if variants.iter().any(|v| v.name == variant.name) {
            return Err(DslError::DuplicateName { kind: "variant", name: variant.name, pos: variant.pos });
        }
        variants.push(variant);
    }
    if variants.is_empty() {
        return Err(toks.error("at least one Variant"));
    }
    toks.expect_tok(Tok::RBrace)?;
    Ok(StoryDecl { name, pos, variants })
}

fn parse_variant(toks: &mut Tokens) -> Result<VariantDecl, DslError> {
    toks.expect_keyword("Variant")?;
    let (name, pos) = toks.expect_ident("a variant name")?;
    toks.expect_tok(Tok::LBrace)?;
    toks.expect_keyword("template")?;
    toks.expect_tok(Tok::Colon)?;
    let template = toks.expect_ident("a template name")?;
    toks.expect_keyword("scene")?;
    toks.expect_tok(Tok::Colon)?;
    let scene = toks.expect_ident("a scene name")?;

    let mut variations: Vec<ForeachDecl> = Vec::new();
    while toks.at_keyword("foreach") {
        let pos = toks.next().pos;
        let (variable, _) = toks.expect_ident("a variable name")?;
        if variations.iter().any(|f| f.variable == variable) {
            return Err(DslError::DuplicateName { kind: "foreach variable", name: variable, pos });
        }
        toks.expect_keyword("in")?;
        toks.expect_tok(Tok::LBracket)?;
        let mut values: Vec<(String, Pos)> = Vec::new();
        loop {
            let (value, value_pos) = toks.expect_ident("an element name")?;
            check_unique("foreach value", &values, &value, value_pos)?;
            values.push((value, value_pos));
            match toks.peek().tok {
                Tok::Comma => {
                    toks.next();
                }
                Tok::RBracket => break,
                _ => return Err(toks.error("',' or ']'")),
            }
        }
        toks.expect_tok(Tok::RBracket)?;
        variations.push(ForeachDecl { variable, pos, values });
    }
    toks.expect_tok(Tok::RBrace)?;
    Ok(VariantDecl { name, pos, template, scene, variations })
}

/// Parses a `.scene` model and validates its numeric attributes.
pub fn parse_scene_dsl(text: &str) -> Result<SceneModel, DslError> {
    let mut toks = Tokens { toks: lex(text)?, at: 0 };
    let mut scene = SceneModel { name: "scene".into(), ..Default::default() };

    loop {
        match &toks.peek().tok {
            Tok::Eof => break,
            Tok::Ident(kw) => match kw.as_str() {
                "Object" => {
                    let decl = parse_object(&mut toks)?;
                    if scene.objects.iter().any(|o| o.name == decl.name) {
                        return Err(DslError::DuplicateName { kind: "object", name: decl.name, pos: decl.pos });
                    }
                    scene.objects.push(decl);
                }
                "Agent" => {
                    let decl = parse_agent(&mut toks)?;
                    if scene.agents.iter().any(|a| a.name == decl.name) {
                        return Err(DslError::DuplicateName { kind: "agent", name: decl.name, pos: decl.pos });
                    }
                    scene.agents.push(decl);
                }
                "Workspace" => {
                    let decl = parse_workspace(&mut toks)?;
                    if scene.workspaces.iter().any(|w| w.name == decl.name) {
                        return Err(DslError::DuplicateName { kind: "workspace", name: decl.name, pos: decl.pos });
                    }
                    scene.workspaces.push(decl);
                }
                _ => return Err(toks.error("Object, Agent, or Workspace")),
            },
            _ => return Err(toks.error("Object, Agent, or Workspace")),
        }
    }
    Ok(scene)
}

fn parse_object(toks: &mut Tokens) -> Result<ObjectDecl, DslError> {
    toks.expect_keyword("Object")?;
    let (name, pos) = toks.expect_ident("an object name")?;
    toks.expect_tok(Tok::LBrace)?;
    toks.expect_keyword("mass_kg")?;
    toks.expect_tok(Tok::Colon)?;
    let (mass_kg, mass_pos) = toks.expect_number("mass in kg")?;
    if mass_kg < 0.0 {
        return Err(DslError::InvalidScene { pos: mass_pos, msg: "mass must be non-negative".into() });
    }
    toks.expect_keyword("half_extents_m")?;
    toks.expect_tok(Tok::Colon)?;
    let mut half_extents_m = [0.0; 3];
    for slot in &mut half_extents_m {
        let (v, v_pos) = toks.expect_number("a half extent in m")?;
        if v <= 0.0 {
            return Err(DslError::InvalidScene { pos: v_pos, msg: "half extents must be positive".into() });
        }
        *slot = v;
    }
    let mut position_range_m = None;
    if toks.at_keyword("position_range_m") {
        let kw_pos = toks.next().pos;
        toks.expect_tok(Tok::Colon)?;
        let mut bounds = [0.0; 4];
        for slot in &mut bounds {
            let (v, _) = toks.expect_number("a range bound in m")?;
            *slot = v;
        }
        if bounds[0] >= bounds[2] || bounds[1] >= bounds[3] {
            return Err(DslError::InvalidScene {
                pos: kw_pos,
                msg: "position range must satisfy min < max per axis".into(),
            });
        }
        position_range_m = Some(bounds);
    }
    toks.expect_tok(Tok::RBrace)?;
    Ok(ObjectDecl { name, pos, mass_kg, half_extents_m, position_range_m })
}

fn parse_agent(toks: &mut Tokens) -> Result<AgentDecl, DslError> {
    toks.expect_keyword("Agent")?;
    let (name, pos) = toks.expect_ident("an agent name")?;
    toks.expect_tok(Tok::LBrace)?;
    toks.expect_keyword("ee")?;
    toks.expect_tok(Tok::Colon)?;
    let (ee_name, ee_pos) = toks.expect_ident("gripper or suction")?;
    let ee = match ee_name.as_str() {
        "gripper" => EeKind::Gripper,
        "suction" => EeKind::Suction,
        other => {
            return Err(DslError::Syntax {
                line: ee_pos.line,
                col: ee_pos.col,
                expected: "gripper or suction".into(),
                found: format!("{other:?}"),
            })
        }
    };
    toks.expect_tok(Tok::RBrace)?;
    Ok(AgentDecl { name, pos, ee })
}

fn parse_workspace(toks: &mut Tokens) -> Result<WorkspaceDecl, DslError> {
    toks.expect_keyword("Workspace")?;
    let (name, pos) = toks.expect_ident("a workspace name")?;
    toks.expect_tok(Tok::LBrace)?;
    toks.expect_keyword("aabb_m")?;
    toks.expect_tok(Tok::Colon)?;
    let mut aabb_m = [0.0; 6];
    for slot in &mut aabb_m {
        let (v, _) = toks.expect_number("an AABB bound in m")?;
        *slot = v;
    }
    for axis in 0..3 {
        if aabb_m[axis] >= aabb_m[axis + 3] {
            return Err(DslError::InvalidScene {
                pos,
                msg: "AABB must satisfy min < max per axis".into(),
            });
        }
    }
    toks.expect_keyword("kind")?;
    toks.expect_tok(Tok::Colon)?;
    let (kind_name, kind_pos) = toks.expect_ident("table or bin")?;
    let kind = match kind_name.as_str() {
        "table" => WorkspaceKind::Table,
        "bin" => WorkspaceKind::Bin,
        other => {
            return Err(DslError::Syntax {
                line: kind_pos.line,
                col: kind_pos.col,
                expected: "table or bin".into(),
                found: format!("{other:?}"),
            })
        }
    };
    let mut bin_base_height_m = None;
    if toks.at_keyword("bin_base_height_m") {
        let kw_pos = toks.next().pos;
        toks.expect_tok(Tok::Colon)?;
        let (v, _) = toks.expect_number("a height in m")?;
        if v <= 0.0 {
            return Err(DslError::InvalidScene { pos: kw_pos, msg: "bin base height must be positive".into() });
        }
        bin_base_height_m = Some(v);
    }
    if kind == WorkspaceKind::Bin && bin_base_height_m.is_none() {
        return Err(DslError::InvalidScene { pos, msg: "bin workspaces need bin_base_height_m".into() });
    }
    toks.expect_tok(Tok::RBrace)?;
    Ok(WorkspaceDecl { name, pos, aabb_m, kind, bin_base_height_m })
}
