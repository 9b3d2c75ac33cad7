//! `minui.json` and loading a project directory.

use std::fs;
use std::path::{Path, PathBuf};

use globset::Glob;
use minui_a11y_core::lang::{Project, ProjectError};
use minui_a11y_core::render::DeviceConfig;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

pub const MANIFEST_FILE: &str = "minui.json";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScreenSpec {
    pub name: String,
    pub root_view: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectManifest {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub name: String,
    pub screens: Vec<ScreenSpec>,
    #[serde(default = "default_devices")]
    pub devices: Vec<DeviceConfig>,
    #[serde(default = "default_glob")]
    pub source_glob: String,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_devices() -> Vec<DeviceConfig> {
    vec![DeviceConfig::default()]
}

fn default_glob() -> String {
    "**/*.minui".into()
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid manifest {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("unsupported manifest schemaVersion {0}")]
    UnsupportedSchema(u32),
    #[error("manifest declares no screens")]
    NoScreens,
    #[error("manifest declares no devices")]
    NoDevices,
    #[error("device {0} has a non-positive screen size")]
    BadDevice(usize),
    #[error("invalid sourceGlob `{glob}`: {message}")]
    BadGlob { glob: String, message: String },
    #[error("screen `{screen}` names unknown root view `{view}`")]
    UnknownRootView { screen: String, view: String },
    #[error("no source files match `{0}`")]
    NoSources(String),
    #[error(transparent)]
    Project(#[from] ProjectError),
}

impl ProjectManifest {
    pub fn read(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io { path: path.into(), source })?;
        let manifest: ProjectManifest =
            serde_json::from_str(&text).map_err(|source| ManifestError::Json { path: path.into(), source })?;
        manifest.validate_shape()?;
        Ok(manifest)
    }

    fn validate_shape(&self) -> Result<(), ManifestError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::UnsupportedSchema(self.schema_version));
        }
        if self.screens.is_empty() {
            return Err(ManifestError::NoScreens);
        }
        if self.devices.is_empty() {
            return Err(ManifestError::NoDevices);
        }
        if let Some(i) = self.devices.iter().position(|d| !d.is_valid()) {
            return Err(ManifestError::BadDevice(i));
        }
        Ok(())
    }

    pub fn screen(&self, name: &str) -> Option<&ScreenSpec> {
        self.screens.iter().find(|s| s.name == name || s.root_view == name)
    }
}

/// A project directory: manifest plus parsed sources.
#[derive(Debug, Clone)]
pub struct LoadedProject {
    pub root: PathBuf,
    pub manifest: ProjectManifest,
    pub project: Project,
}

/// Reads `minui.json` in `dir` and parses every source matching its glob.
/// File paths inside the project are relative with `/` separators.
pub fn load_project(dir: &Path) -> Result<LoadedProject, ManifestError> {
    let manifest = ProjectManifest::read(&dir.join(MANIFEST_FILE))?;
    load_sources(manifest, dir)
}

/// Parses the sources under `dir` selected by `manifest`.
pub fn load_sources(manifest: ProjectManifest, dir: &Path) -> Result<LoadedProject, ManifestError> {
    let matcher = Glob::new(&manifest.source_glob)
        .map_err(|e| ManifestError::BadGlob { glob: manifest.source_glob.clone(), message: e.to_string() })?
        .compile_matcher();

    let mut sources = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| ManifestError::Io {
            path: e.path().map(Path::to_path_buf).unwrap_or_else(|| dir.into()),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(dir).unwrap_or(entry.path());
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        if !matcher.is_match(&rel) {
            continue;
        }
        let text = fs::read_to_string(entry.path())
            .map_err(|source| ManifestError::Io { path: entry.path().into(), source })?;
        sources.push((rel, text));
    }
    if sources.is_empty() {
        return Err(ManifestError::NoSources(manifest.source_glob.clone()));
    }
    let project = Project::from_sources(sources)?;
    for screen in &manifest.screens {
        if project.find_decl(&screen.root_view).is_none() {
            return Err(ManifestError::UnknownRootView { screen: screen.name.clone(), view: screen.root_view.clone() });
        }
    }
    Ok(LoadedProject { root: dir.into(), manifest, project })
}
