//! Project loading: parse a root `.bdd` file, resolve its transitive
//! imports (other `.bdd` files and `.scene` files), and lower everything
//! into one graph.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::lower::{lower_to_graph, SourcePos};
use super::parser::{parse_bdd_dsl, parse_scene_dsl};
use super::{DslError, SceneModel, SourceModel};
use crate::kg::{Graph, Iri, PrefixContext};
use crate::vocab;

/// A loaded and lowered project.
#[derive(Debug, Clone)]
pub struct Project {
    pub graph: Graph,
    pub namespace: Iri,
    /// Default context plus a prefix for the project namespace.
    pub context: PrefixContext,
    pub source_map: BTreeMap<Iri, SourcePos>,
}

/// Loads the project rooted at a `.bdd` file. The project namespace
/// defaults to `https://example.org/<root-stem>`; pass `namespace` to
/// override it.
pub fn load_project(root: &Path, namespace: Option<Iri>) -> Result<Project, DslError> {
    let mut loader = Loader {
        models: Vec::new(),
        scenes: Vec::new(),
        loaded: Vec::new(),
        stack: Vec::new(),
    };
    loader.load_bdd(root)?;

    let stem = root
        .file_stem()
        .map(|s| sanitize(&s.to_string_lossy()))
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "project".to_string());
    let namespace = match namespace {
        Some(ns) => ns,
        None => Iri::new(format!("https://example.org/{stem}"))
            .map_err(|e| DslError::Lowering(e.to_string()))?,
    };

    let (graph, source_map) = lower_to_graph(&loader.models, &loader.scenes, &namespace)?;

    let mut context = vocab::default_context();
    let prefix = if stem == "rdf" || stem == "bdd" { format!("{stem}-model") } else { stem };
    context
        .add_prefix(&prefix, &format!("{}/", namespace.as_str().trim_end_matches('/')))
        .map_err(|e| DslError::Lowering(e.to_string()))?;

    Ok(Project { graph, namespace, context, source_map })
}

fn sanitize(stem: &str) -> String {
    stem.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

struct Loader {
    models: Vec<SourceModel>,
    scenes: Vec<SceneModel>,
    loaded: Vec<PathBuf>,
    stack: Vec<PathBuf>,
}

impl Loader {
    fn chain(&self, next: &Path) -> Vec<String> {
        self.stack
            .iter()
            .map(|p| p.display().to_string())
            .chain([next.display().to_string()])
            .collect()
    }

    fn canonical(&self, path: &Path) -> Result<PathBuf, DslError> {
        path.canonicalize().map_err(|_| DslError::FileNotFound {
            path: path.display().to_string(),
            chain: self.chain(path),
        })
    }

    fn load_bdd(&mut self, path: &Path) -> Result<(), DslError> {
        let canonical = self.canonical(path)?;
        if self.stack.contains(&canonical) {
            let mut chain: Vec<String> = self.stack.iter().map(|p| p.display().to_string()).collect();
            chain.push(canonical.display().to_string());
            return Err(DslError::CyclicImport { chain });
        }
        if self.loaded.contains(&canonical) {
            return Ok(());
        }
        self.stack.push(canonical.clone());

        let text = fs::read_to_string(&canonical).map_err(|source| DslError::Io {
            path: canonical.display().to_string(),
            source,
        })?;
        let mut model = parse_bdd_dsl(&text)?;
        model.source = display_name(path);

        let base = canonical.parent().map(Path::to_path_buf).unwrap_or_default();
        for (import, pos) in model.imports.clone() {
            let target = base.join(&import);
            match target.extension().and_then(|e| e.to_str()) {
                Some("bdd") => self.load_bdd(&target)?,
                Some("scene") => self.load_scene(&target)?,
                _ => {
                    return Err(DslError::Lowering(format!(
                        "unresolved import {import:?} at {pos}: only .bdd and .scene files can be imported"
                    )))
                }
            }
        }

        self.stack.pop();
        self.loaded.push(canonical);
        self.models.push(model);
        Ok(())
    }

    fn load_scene(&mut self, path: &Path) -> Result<(), DslError> {
        let canonical = self.canonical(path)?;
        if self.loaded.contains(&canonical) {
            return Ok(());
        }
        let text = fs::read_to_string(&canonical).map_err(|source| DslError::Io {
            path: canonical.display().to_string(),
            source,
        })?;
        let mut scene = parse_scene_dsl(&text)?;
        scene.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "scene".into());
        scene.source = display_name(path);
        self.loaded.push(canonical);
        self.scenes.push(scene);
        Ok(())
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| path.display().to_string())
}
