//! On-disk layout of a run directory.
//!
//! ```text
//! <run>/minui.json                         manifest copy
//! <run>/source/...                         pristine sources as scanned
//! <run>/issues.json                        scan reports
//! <run>/scenes/<screen>.json               rendered scene per screen
//! <run>/suggestions/<issue>/<plan>.json    suggestion record
//! <run>/suggestions/<issue>/<plan>.diff    unified diff (may be empty)
//! <run>/log.jsonl                          agent exchanges with timing
//! ```
//!
//! Everything except `log.jsonl` is a pure function of the inputs.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use minui_a11y_core::lang::Project;
use minui_a11y_core::render::RenderedScene;
use minui_a11y_core::scanner::{Issue, ScanReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::agents::Transcript;
use crate::manifest::{self, LoadedProject, ManifestError, ProjectManifest, MANIFEST_FILE, SCHEMA_VERSION};
use crate::pipeline::{patch_path, FixSuggestion, IssueOutcome};

pub const ISSUES_FILE: &str = "issues.json";
pub const SOURCE_DIR: &str = "source";
pub const SCENES_DIR: &str = "scenes";
pub const SUGGESTIONS_DIR: &str = "suggestions";
pub const LOG_FILE: &str = "log.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("run directory {0} does not exist or holds no {ISSUES_FILE}")]
    NotARun(PathBuf),
    #[error("{path}: unsupported schemaVersion {version}")]
    Schema { path: PathBuf, version: u32 },
    #[error(transparent)]
    Manifest(#[from] ManifestError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IssuesFile {
    pub schema_version: u32,
    pub project: String,
    pub reports: Vec<ScanReport>,
}

impl IssuesFile {
    pub fn new(project: impl Into<String>, reports: Vec<ScanReport>) -> Self {
        IssuesFile { schema_version: SCHEMA_VERSION, project: project.into(), reports }
    }

    pub fn issues(&self) -> impl Iterator<Item = &Issue> {
        self.reports.iter().flat_map(|r| r.issues.iter())
    }

    pub fn find(&self, id: &str) -> Option<&Issue> {
        self.issues().find(|i| i.id == id)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct Versioned<T> {
    schema_version: u32,
    #[serde(flatten)]
    inner: T,
}

/// One line of `log.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogEvent {
    pub timestamp_ms: u128,
    pub issue_id: String,
    /// Zero for exchanges made while planning.
    pub plan_index: usize,
    pub role: String,
    pub latency_ms: u128,
    pub tokens_in: u64,
    pub tokens_out: u64,
    pub user_text: String,
    pub response_text: String,
}

fn events<'a>(issue_id: &str, plan_index: usize, t: &'a Transcript) -> impl Iterator<Item = LogEvent> + 'a {
    let issue_id = issue_id.to_string();
    t.exchanges.iter().map(move |e| LogEvent {
        timestamp_ms: e.at.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0),
        issue_id: issue_id.clone(),
        plan_index,
        role: e.role.to_string(),
        latency_ms: e.latency.as_millis(),
        tokens_in: e.exchange.tokens_in,
        tokens_out: e.exchange.tokens_out,
        user_text: e.exchange.user_text.clone(),
        response_text: e.exchange.response_text.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct RunStore {
    dir: PathBuf,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.into(), source }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), StoreError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io(parent))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|source| StoreError::Json { path: path.into(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|source| StoreError::Json { path: path.into(), source })
}

fn remove_dir_if_present(path: &Path) -> Result<(), StoreError> {
    match fs::remove_dir_all(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(io(path)(e)),
        _ => Ok(()),
    }
}

impl RunStore {
    /// Creates `dir` if needed. Existing scan output is replaced by
    /// [`RunStore::write_scan`].
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        Ok(RunStore { dir })
    }

    /// Opens an existing run. Fails unless `issues.json` is present.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        if !dir.join(ISSUES_FILE).is_file() {
            return Err(StoreError::NotARun(dir));
        }
        Ok(RunStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes the manifest copy, a snapshot of the pristine sources, the
    /// scenes and `issues.json`. Stale suggestions and logs are removed.
    pub fn write_scan(
        &self,
        manifest: &ProjectManifest,
        pristine: &Project,
        scenes: &[RenderedScene],
        issues: &IssuesFile,
    ) -> Result<(), StoreError> {
        for stale in [SOURCE_DIR, SCENES_DIR, SUGGESTIONS_DIR] {
            remove_dir_if_present(&self.dir.join(stale))?;
        }
        let log = self.dir.join(LOG_FILE);
        if log.exists() {
            fs::remove_file(&log).map_err(io(&log))?;
        }
        write_json(&self.dir.join(MANIFEST_FILE), manifest)?;
        for file in pristine.files() {
            let path = self.dir.join(SOURCE_DIR).join(&file.path);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(io(parent))?;
            }
            fs::write(&path, &file.text).map_err(io(&path))?;
        }
        for scene in scenes {
            write_json(&self.dir.join(SCENES_DIR).join(format!("{}.json", scene.root_view)), scene)?;
        }
        write_json(&self.dir.join(ISSUES_FILE), issues)
    }

    pub fn load_issues(&self) -> Result<IssuesFile, StoreError> {
        let path = self.dir.join(ISSUES_FILE);
        let file: IssuesFile = read_json(&path)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(StoreError::Schema { path, version: file.schema_version });
        }
        Ok(file)
    }

    /// Rebuilds the scanned project from the run directory alone.
    pub fn load_project(&self) -> Result<LoadedProject, StoreError> {
        let manifest = ProjectManifest::read(&self.dir.join(MANIFEST_FILE))?;
        Ok(manifest::load_sources(manifest, &self.dir.join(SOURCE_DIR))?)
    }

    /// Replaces every record of the outcome's issue and appends its
    /// exchanges to the log.
    pub fn write_outcome(&self, outcome: &IssueOutcome) -> Result<(), StoreError> {
        let dir = self.dir.join(SUGGESTIONS_DIR).join(&outcome.issue_id);
        remove_dir_if_present(&dir)?;
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        for s in &outcome.suggestions {
            let record = Versioned { schema_version: SCHEMA_VERSION, inner: s };
            write_json(&dir.join(format!("{}.json", s.plan_index)), &record)?;
            let diff = s.patch.as_ref().map(|p| p.to_unified()).unwrap_or_default();
            let path = self.dir.join(patch_path(&outcome.issue_id, s.plan_index));
            fs::write(&path, diff).map_err(io(&path))?;
        }

        let mut lines = String::new();
        let planning = events(&outcome.issue_id, 0, &outcome.planning);
        let plans = outcome.suggestions.iter().flat_map(|s| events(&outcome.issue_id, s.plan_index, &s.transcript));
        for event in planning.chain(plans) {
            let line = serde_json::to_string(&event).map_err(|source| StoreError::Json { path: LOG_FILE.into(), source })?;
            lines.push_str(&line);
            lines.push('\n');
        }
        let log = self.dir.join(LOG_FILE);
        let mut f = OpenOptions::new().create(true).append(true).open(&log).map_err(io(&log))?;
        f.write_all(lines.as_bytes()).map_err(io(&log))
    }

    /// Suggestion records for `issue_id`, ordered by plan index.
    pub fn load_suggestions(&self, issue_id: &str) -> Result<Vec<FixSuggestion>, StoreError> {
        let dir = self.dir.join(SUGGESTIONS_DIR).join(issue_id);
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io(&dir))? {
            let path = entry.map_err(io(&dir))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let record: Versioned<FixSuggestion> = read_json(&path)?;
                if record.schema_version != SCHEMA_VERSION {
                    return Err(StoreError::Schema { path, version: record.schema_version });
                }
                out.push(record.inner);
            }
        }
        out.sort_by_key(|s| s.plan_index);
        Ok(out)
    }

    /// The stored diff for a suggestion, empty when none was produced.
    pub fn load_diff(&self, s: &FixSuggestion) -> Result<String, StoreError> {
        let path = self.dir.join(s.patch_path.clone().unwrap_or_else(|| patch_path(&s.issue_id, s.plan_index)));
        match fs::read_to_string(&path) {
            Ok(t) => Ok(t),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
            Err(e) => Err(io(&path)(e)),
        }
    }

    pub fn read_log(&self) -> Result<Vec<LogEvent>, StoreError> {
        let path = self.dir.join(LOG_FILE);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(io(&path)(e)),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|source| StoreError::Json { path: path.clone(), source }))
            .collect()
    }
}
