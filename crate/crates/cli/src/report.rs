//! Summaries of a run directory, as a table or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use minui_a11y_core::scanner::IssueKind;
use serde::{Deserialize, Serialize};

use crate::manifest::SCHEMA_VERSION;
use crate::store::{RunStore, StoreError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counts {
    /// Issues found.
    pub n: usize,
    pub suggestions: usize,
    /// Plausible suggestions.
    pub plausible: usize,
    /// Issues with at least one plausible suggestion.
    pub fixed: usize,
}

impl Counts {
    fn add(&mut self, issue: &IssueRow) {
        self.n += 1;
        self.suggestions += issue.suggestions.len();
        self.plausible += issue.suggestions.iter().filter(|s| s.status == "Plausible").count();
        self.fixed += usize::from(issue.fixed);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScreenRow {
    pub screen: String,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KindRow {
    pub kind: IssueKind,
    pub title: String,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuggestionRow {
    pub plan_index: usize,
    pub summary: String,
    pub status: String,
    pub attempts: usize,
    pub localized_view: Option<String>,
    pub error: Option<String>,
    pub patch_path: Option<String>,
    #[serde(skip)]
    pub diff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IssueRow {
    pub id: String,
    pub kind: IssueKind,
    pub screen: String,
    pub element: String,
    pub description: String,
    pub suggestions: Vec<SuggestionRow>,
    pub fixed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema_version: u32,
    pub project: String,
    pub totals: Counts,
    pub screens: Vec<ScreenRow>,
    pub kinds: Vec<KindRow>,
    pub issues: Vec<IssueRow>,
}

impl RunReport {
    /// Recounts everything from the records on disk.
    pub fn build(store: &RunStore) -> Result<Self, StoreError> {
        let issues_file = store.load_issues()?;
        let mut issues = Vec::new();
        for issue in issues_file.issues() {
            let mut suggestions = Vec::new();
            for s in store.load_suggestions(&issue.id)? {
                suggestions.push(SuggestionRow {
                    plan_index: s.plan_index,
                    summary: s.plan.as_ref().map(|p| p.summary.clone()).unwrap_or_default(),
                    status: s.status().to_string(),
                    attempts: s.attempts,
                    localized_view: s.localized_view.clone(),
                    error: s.error.clone(),
                    patch_path: s.patch_path.clone(),
                    diff: store.load_diff(&s)?,
                });
            }
            issues.push(IssueRow {
                id: issue.id.clone(),
                kind: issue.kind,
                screen: issue.screen.clone(),
                element: issue.element.to_string(),
                description: issue.description.clone(),
                fixed: suggestions.iter().any(|s| s.status == "Plausible"),
                suggestions,
            });
        }

        let mut totals = Counts::default();
        let mut screens: Vec<ScreenRow> =
            issues_file.reports.iter().map(|r| ScreenRow { screen: r.screen.clone(), counts: Counts::default() }).collect();
        let mut kinds: BTreeMap<IssueKind, Counts> = BTreeMap::new();
        for row in &issues {
            totals.add(row);
            if let Some(s) = screens.iter_mut().find(|s| s.screen == row.screen) {
                s.counts.add(row);
            }
            kinds.entry(row.kind).or_default().add(row);
        }
        let kinds = kinds
            .into_iter()
            .map(|(kind, counts)| KindRow { kind, title: kind.title().to_string(), counts })
            .collect();

        Ok(RunReport { schema_version: SCHEMA_VERSION, project: issues_file.project, totals, screens, kinds, issues })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Project: {}\n", self.project);

        let table = |rows: &[(String, Counts)], head: &str| {
            let width = rows.iter().map(|r| r.0.len()).chain([head.len(), 5]).max().unwrap_or(5);
            let mut t = String::new();
            let _ = writeln!(t, "{head:<width$}  {:>4}  {:>11}  {:>4}  {:>5}", "n", "suggestions", "PF", "fixed");
            for (name, c) in rows {
                let _ = writeln!(t, "{name:<width$}  {:>4}  {:>11}  {:>4}  {:>5}", c.n, c.suggestions, c.plausible, c.fixed);
            }
            t
        };
        let mut screens: Vec<_> = self.screens.iter().map(|s| (s.screen.clone(), s.counts)).collect();
        screens.push(("Total".into(), self.totals));
        out.push_str(&table(&screens, "Screen"));
        out.push('\n');
        let kinds: Vec<_> = self.kinds.iter().map(|k| (k.title.clone(), k.counts)).collect();
        out.push_str(&table(&kinds, "Issue kind"));

        for issue in &self.issues {
            let _ = writeln!(out, "\n== {} [{}] ==", issue.id, issue.kind.title());
            let _ = writeln!(out, "Screen: {}", issue.screen);
            let _ = writeln!(out, "Element: {}", issue.element);
            let _ = writeln!(out, "Description: {}", issue.description);
            if issue.suggestions.is_empty() {
                let _ = writeln!(out, "No suggestions yet.");
            }
            for s in &issue.suggestions {
                let _ = writeln!(out, "\nPlan {}: {}", s.plan_index, s.summary);
                let mut status = format!("  Verdict: {} after {} attempt(s)", s.status, s.attempts);
                if let Some(view) = &s.localized_view {
                    let _ = write!(status, ", edited {view}");
                }
                let _ = writeln!(out, "{status}");
                if let Some(e) = &s.error {
                    let _ = writeln!(out, "  Error: {e}");
                }
                for line in s.diff.lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
        }
        out
    }
}
