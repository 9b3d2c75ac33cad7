use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{NodeKind, SourceFile, ViewDecl};
use super::diff::{diff_texts, Patch, PatchError, DEFAULT_CONTEXT};
use super::parser::{parse_source, SyntaxError};
use super::printer::{print_decl, print_source};

/// A set of parsed source files whose view references all resolve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Project {
    /// Sorted by path.
    files: Vec<SourceFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjectError {
    #[error("{file}: {error}")]
    Syntax { file: String, error: SyntaxError },
    #[error("view `{name}` is declared in both {first} and {second}")]
    DuplicateView { name: String, first: String, second: String },
    #[error("{file}:{line}: reference to unknown view `{name}`")]
    UnknownView { name: String, file: String, line: usize },
    #[error("duplicate source path {0}")]
    DuplicateFile(String),
    #[error("no source file {0} in project")]
    UnknownFile(String),
    #[error(transparent)]
    Patch(#[from] PatchError),
}

/// Why a modified declaration could not be turned into a patch.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnippetError {
    #[error("modified snippet does not parse: {0}")]
    SnippetParse(SyntaxError),
    #[error("modified snippet must contain exactly one view declaration, found {0}")]
    NotSingleDecl(usize),
    #[error("modified snippet declares `{found}` but `{expected}` was expected")]
    NameMismatch { expected: String, found: String },
    #[error("view `{0}` is not declared in the original file")]
    UnknownDecl(String),
}

impl Project {
    /// Parses and validates `(path, text)` pairs.
    pub fn from_sources<P, T>(sources: impl IntoIterator<Item = (P, T)>) -> Result<Project, ProjectError>
    where
        P: AsRef<str>,
        T: AsRef<str>,
    {
        let files = sources
            .into_iter()
            .map(|(path, text)| {
                parse_source(text.as_ref(), path.as_ref())
                    .map_err(|error| ProjectError::Syntax { file: path.as_ref().to_string(), error })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Project::new(files)
    }

    pub fn new(mut files: Vec<SourceFile>) -> Result<Project, ProjectError> {
        files.sort_by(|a, b| a.path.cmp(&b.path));
        if let Some(w) = files.windows(2).find(|w| w[0].path == w[1].path) {
            return Err(ProjectError::DuplicateFile(w[0].path.clone()));
        }
        let project = Project { files };
        project.validate()?;
        Ok(project)
    }

    fn validate(&self) -> Result<(), ProjectError> {
        let mut seen: alloc::collections::BTreeMap<&str, &str> = alloc::collections::BTreeMap::new();
        for f in &self.files {
            for d in &f.decls {
                if let Some(first) = seen.insert(&d.name, &f.path) {
                    return Err(ProjectError::DuplicateView {
                        name: d.name.clone(),
                        first: first.to_string(),
                        second: f.path.clone(),
                    });
                }
            }
        }
        for f in &self.files {
            for d in &f.decls {
                for node in d.body.walk() {
                    if let NodeKind::ViewRef { name } = &node.kind {
                        if !seen.contains_key(name.as_str()) {
                            return Err(ProjectError::UnknownView {
                                name: name.clone(),
                                file: f.path.clone(),
                                line: node.span.start_line,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    pub fn file(&self, path: &str) -> Option<&SourceFile> {
        self.files.iter().find(|f| f.path == path)
    }

    pub fn decls(&self) -> impl Iterator<Item = (&SourceFile, &ViewDecl)> {
        self.files.iter().flat_map(|f| f.decls.iter().map(move |d| (f, d)))
    }

    pub fn find_decl(&self, name: &str) -> Option<(&SourceFile, &ViewDecl)> {
        self.decls().find(|(_, d)| d.name == name)
    }

    /// Current text of every file, in path order.
    pub fn texts(&self) -> Vec<(String, String)> {
        self.files.iter().map(|f| (f.path.clone(), print_source(f))).collect()
    }

    /// Returns a patched copy; `self` is left untouched.
    pub fn apply_patch(&self, patch: &Patch) -> Result<Project, ProjectError> {
        if patch.is_empty() {
            return Ok(self.clone());
        }
        let idx = self
            .files
            .iter()
            .position(|f| f.path == patch.file)
            .ok_or_else(|| ProjectError::UnknownFile(patch.file.clone()))?;
        let patched = patch.apply_to(&print_source(&self.files[idx]))?;
        let file = parse_source(&patched, &patch.file)
            .map_err(|error| ProjectError::Syntax { file: patch.file.clone(), error })?;
        let mut files = self.files.clone();
        files[idx] = file;
        Project::new(files)
    }
}

/// Builds the patch that replaces `target_decl` in `original` with the single
/// declaration in `modified_snippet`.
pub fn compute_patch(original: &SourceFile, modified_snippet: &str, target_decl: &str) -> Result<Patch, SnippetError> {
    let decl = original.decl(target_decl).ok_or_else(|| SnippetError::UnknownDecl(target_decl.to_string()))?;
    let snippet = parse_source(modified_snippet, &original.path).map_err(SnippetError::SnippetParse)?;
    let [replacement] = snippet.decls.as_slice() else {
        return Err(SnippetError::NotSingleDecl(snippet.decls.len()));
    };
    if replacement.name != target_decl {
        return Err(SnippetError::NameMismatch { expected: target_decl.to_string(), found: replacement.name.clone() });
    }
    let text = print_source(original);
    let mut patched = String::with_capacity(text.len() + modified_snippet.len());
    patched.push_str(&text[..decl.span.start_byte]);
    patched.push_str(&print_decl(replacement));
    patched.push_str(&text[decl.span.end_byte..]);
    Ok(diff_texts(&original.path, &text, &patched, DEFAULT_CONTEXT))
}
