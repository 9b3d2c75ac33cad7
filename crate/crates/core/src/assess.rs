//! Suggestion assessment: apply, rebuild, re-scan, compare.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{Patch, Project};
use crate::render::{resolve_screen, DeviceConfig, RenderedScene};
use crate::scanner::{scan_scene, Issue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum AssessmentVerdict {
    Plausible,
    BuildError { message: String },
    NotResolved,
    NewIssuesIntroduced { issue_ids: Vec<String> },
    FunctionalityRemoved { details: Vec<String> },
}

impl AssessmentVerdict {
    pub fn is_plausible(&self) -> bool {
        matches!(self, AssessmentVerdict::Plausible)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AssessmentVerdict::Plausible => "Plausible",
            AssessmentVerdict::BuildError { .. } => "BuildError",
            AssessmentVerdict::NotResolved => "NotResolved",
            AssessmentVerdict::NewIssuesIntroduced { .. } => "NewIssuesIntroduced",
            AssessmentVerdict::FunctionalityRemoved { .. } => "FunctionalityRemoved",
        }
    }
}

impl fmt::Display for AssessmentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssessmentVerdict::Plausible => f.write_str("plausible"),
            AssessmentVerdict::BuildError { message } => write!(f, "build error: {message}"),
            AssessmentVerdict::NotResolved => f.write_str("issue not resolved"),
            AssessmentVerdict::NewIssuesIntroduced { issue_ids } => {
                write!(f, "new issues introduced: {}", issue_ids.join(", "))
            }
            AssessmentVerdict::FunctionalityRemoved { details } => {
                write!(f, "functionality removed: {}", details.join("; "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonReport {
    pub target_resolved: bool,
    pub new_issues: Vec<Issue>,
    pub disappeared_others: Vec<Issue>,
    /// The target as reported after patching, when still present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remaining_target: Option<Issue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub verdict: AssessmentVerdict,
    pub comparison: ComparisonReport,
}

impl Assessment {
    /// Failure text handed back to the fixer on the next attempt.
    pub fn feedback(&self) -> String {
        match (&self.verdict, &self.comparison.remaining_target) {
            (AssessmentVerdict::NotResolved, Some(issue)) => {
                format!("issue not resolved: {}", issue.description)
            }
            (AssessmentVerdict::NewIssuesIntroduced { .. }, _) => {
                let list: Vec<String> = self
                    .comparison
                    .new_issues
                    .iter()
                    .map(|i| format!("{} on {} ({})", i.kind.title(), i.element, i.description))
                    .collect();
                format!("new issues introduced: {}", list.join("; "))
            }
            (v, _) => v.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionalityCheck {
    pub preserved: bool,
    pub details: Vec<String>,
}

fn counts<'a>(items: impl Iterator<Item = &'a str>) -> BTreeMap<&'a str, usize> {
    let mut m = BTreeMap::new();
    for s in items {
        *m.entry(s).or_insert(0) += 1;
    }
    m
}

fn char_counts<'a>(items: impl Iterator<Item = &'a str>) -> BTreeMap<char, usize> {
    let mut m = BTreeMap::new();
    for c in items.flat_map(str::chars).filter(|c| !c.is_whitespace()) {
        *m.entry(c).or_insert(0) += 1;
    }
    m
}

fn contained<K: Ord>(small: &BTreeMap<K, usize>, big: &BTreeMap<K, usize>) -> bool {
    small.iter().all(|(k, n)| big.get(k).copied().unwrap_or(0) >= *n)
}

fn actions(scene: &RenderedScene) -> impl Iterator<Item = &str> {
    scene.elements.iter().filter(|e| e.interactive).filter_map(|e| e.action.as_deref())
}

fn exposed_texts(scene: &RenderedScene) -> impl Iterator<Item = &str> {
    scene.elements.iter().filter(|e| e.exposed).filter_map(|e| e.text.as_deref()).filter(|t| !t.is_empty())
}

/// Every action and every exposed text of `before` must survive in `after`.
/// Texts may be regrouped, e.g. two siblings merged into one label.
pub fn functionality_preserved(before: &RenderedScene, after: &RenderedScene) -> FunctionalityCheck {
    let mut details = Vec::new();

    let (ab, aa) = (counts(actions(before)), counts(actions(after)));
    for (action, n) in &ab {
        let have = aa.get(action).copied().unwrap_or(0);
        if have < *n {
            details.push(format!("action {action} missing"));
        }
    }

    let (tb, ta) = (counts(exposed_texts(before)), counts(exposed_texts(after)));
    if !contained(&tb, &ta) && !contained(&char_counts(exposed_texts(before)), &char_counts(exposed_texts(after))) {
        for (text, n) in &tb {
            let have = ta.get(text).copied().unwrap_or(0);
            if have < *n && !ta.keys().any(|t| t.contains(text)) {
                details.push(format!("text \"{text}\" missing"));
            }
        }
        if details.is_empty() {
            details.push("exposed text content changed".into());
        }
    }

    FunctionalityCheck { preserved: details.is_empty(), details }
}

/// Compares issue sets by id.
pub fn compare(before: &[Issue], after: &[Issue], target_id: &str) -> ComparisonReport {
    let has = |list: &[Issue], id: &str| list.iter().any(|i| i.id == id);
    ComparisonReport {
        target_resolved: !has(after, target_id),
        new_issues: after.iter().filter(|i| !has(before, &i.id)).cloned().collect(),
        disappeared_others: before.iter().filter(|i| i.id != target_id && !has(after, &i.id)).cloned().collect(),
        remaining_target: after.iter().find(|i| i.id == target_id).cloned(),
    }
}

/// Applies `patch` to `project` and judges the result against `issue`.
///
/// `project` must be the instrumented project `issue` was scanned from.
pub fn assess_patch(project: &Project, patch: &Patch, issue: &Issue, device: DeviceConfig) -> Assessment {
    let build_error = |message: String| Assessment {
        verdict: AssessmentVerdict::BuildError { message },
        comparison: ComparisonReport::default(),
    };
    let before_scene = match resolve_screen(project, &issue.screen, device) {
        Ok(s) => s,
        Err(e) => return build_error(format!("original project does not build: {e}")),
    };
    let patched = match project.apply_patch(patch) {
        Ok(p) => p,
        Err(e) => return build_error(e.to_string()),
    };
    let after_scene = match resolve_screen(&patched, &issue.screen, device) {
        Ok(s) => s,
        Err(e) => return build_error(e.to_string()),
    };
    let before = scan_scene(&before_scene);
    let after = scan_scene(&after_scene);
    let comparison = compare(&before, &after, &issue.id);

    let functionality = functionality_preserved(&before_scene, &after_scene);
    let verdict = if !functionality.preserved {
        AssessmentVerdict::FunctionalityRemoved { details: functionality.details }
    } else if !comparison.target_resolved {
        AssessmentVerdict::NotResolved
    } else if !comparison.new_issues.is_empty() {
        AssessmentVerdict::NewIssuesIntroduced { issue_ids: comparison.new_issues.iter().map(|i| i.id.clone()).collect() }
    } else {
        AssessmentVerdict::Plausible
    };
    Assessment { verdict, comparison }
}
