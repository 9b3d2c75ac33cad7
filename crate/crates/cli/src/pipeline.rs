//! Plan, localize once per plan, then fix and assess up to N times.

use std::collections::BTreeSet;

use minui_a11y_core::assess::{assess_patch, Assessment, AssessmentVerdict};
use minui_a11y_core::hierarchy::{build_hierarchy, candidate_snippets, instrument, ElementId, Instrumented};
use minui_a11y_core::lang::{compute_patch, diff_texts, parse_source, print_source, ModifierKind, Patch, Project};
use minui_a11y_core::render::resolve_screen;
use minui_a11y_core::scanner::{Issue, IssueKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentError, Agents, FixPlan, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuggestConfig {
    pub plans: usize,
    pub iterations: usize,
    pub top_k: usize,
}

impl Default for SuggestConfig {
    fn default() -> Self {
        SuggestConfig { plans: 3, iterations: 3, top_k: 3 }
    }
}

/// Pristine sources plus their instrumented twin. Agents and assessment
/// only ever see the instrumented project.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub pristine: Project,
    pub instrumented: Instrumented,
}

impl Workspace {
    pub fn new(pristine: Project) -> Self {
        let instrumented = instrument(&pristine);
        Workspace { pristine, instrumented }
    }

    pub fn project(&self) -> &Project {
        &self.instrumented.project
    }

    /// Removes the identifiers instrumentation added from `file` of
    /// `patched` and diffs the result against the pristine file.
    pub fn user_patch(&self, patched: &Project, path: &str) -> Option<Patch> {
        let original = self.pristine.file(path)?;
        let file = patched.file(path)?;
        let mut file = parse_source(&print_source(file), path).ok()?;
        let added: BTreeSet<&str> = self.instrumented.added.iter().map(ElementId::as_str).collect();
        for decl in &mut file.decls {
            decl.body.walk_mut(&mut |n| {
                n.modifiers.retain(|m| !matches!(&m.kind, ModifierKind::AxIdentifier(id) if added.contains(id.as_str())));
            });
        }
        Some(diff_texts(path, &original.text, &print_source(&file), minui_a11y_core::lang::DEFAULT_CONTEXT))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExchangeTally {
    pub calls: usize,
    pub tokens_in: u64,
    pub tokens_out: u64,
}

impl From<&Transcript> for ExchangeTally {
    fn from(t: &Transcript) -> Self {
        let (tokens_in, tokens_out) = t.tokens();
        ExchangeTally { calls: t.exchanges.len(), tokens_in, tokens_out }
    }
}

/// One plan's outcome. Serialized as the suggestion record.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixSuggestion {
    pub issue_id: String,
    pub kind: Option<IssueKind>,
    pub screen: String,
    pub element: String,
    pub plan_index: usize,
    pub plan: Option<FixPlan>,
    pub localized_view: Option<String>,
    pub verdict: Option<AssessmentVerdict>,
    /// Set when a backend or agent failure aborted the plan.
    pub error: Option<String>,
    pub attempts: usize,
    pub feedback: Vec<String>,
    pub explanation: String,
    pub patch_path: Option<String>,
    pub exchanges: ExchangeTally,
    /// Patch against the instrumented project, as assessed.
    #[serde(skip)]
    pub assessed_patch: Option<Patch>,
    /// Patch against the pristine sources, as shown to the user.
    #[serde(skip)]
    pub patch: Option<Patch>,
    #[serde(skip)]
    pub transcript: Transcript,
}

impl FixSuggestion {
    fn new(issue: &Issue, plan_index: usize) -> Self {
        FixSuggestion {
            issue_id: issue.id.clone(),
            kind: Some(issue.kind),
            screen: issue.screen.clone(),
            element: issue.element.to_string(),
            plan_index,
            ..FixSuggestion::default()
        }
    }

    pub fn is_plausible(&self) -> bool {
        self.verdict.as_ref().is_some_and(AssessmentVerdict::is_plausible)
    }

    /// `Plausible`, a failing verdict name, or `BackendError`.
    pub fn status(&self) -> &'static str {
        match (&self.verdict, &self.error) {
            (_, Some(_)) => "BackendError",
            (Some(v), None) => v.name(),
            (None, None) => "Pending",
        }
    }
}

/// Relative location of a suggestion's diff inside a run directory.
pub fn patch_path(issue_id: &str, plan_index: usize) -> String {
    format!("suggestions/{issue_id}/{plan_index}.diff")
}

#[derive(Debug, Clone, Default)]
pub struct IssueOutcome {
    pub issue_id: String,
    pub planning: Transcript,
    pub suggestions: Vec<FixSuggestion>,
}

fn failed_all(issue: &Issue, count: usize, error: &str, planning: Transcript) -> IssueOutcome {
    let suggestions = (1..=count.max(1))
        .map(|i| FixSuggestion { error: Some(error.to_string()), ..FixSuggestion::new(issue, i) })
        .collect();
    IssueOutcome { issue_id: issue.id.clone(), planning, suggestions }
}

/// Full pipeline for one issue: P plans, each localized once and given up
/// to N fix attempts with cumulative feedback.
pub fn suggest_fixes(ws: &Workspace, issue: &Issue, config: &SuggestConfig, agents: Agents<'_>) -> IssueOutcome {
    let project = ws.project();
    let device = issue.device;
    let mut planning = Transcript::default();
    let setup = resolve_screen(project, &issue.screen, device)
        .and_then(|scene| Ok((scene, build_hierarchy(project, &issue.screen)?)))
        .and_then(|(scene, h)| Ok((candidate_snippets(project, &h, &issue.element)?, scene)));
    let (candidates, scene) = match setup {
        Ok(v) => v,
        Err(e) => return failed_all(issue, config.plans, &e.to_string(), planning),
    };
    let plans = match agents.generate_plans(issue, &scene, config.plans, &mut planning) {
        Ok(p) => p,
        Err(e) => return failed_all(issue, config.plans, &e.to_string(), planning),
    };

    let mut suggestions = Vec::with_capacity(plans.len());
    for plan in plans {
        let mut s = FixSuggestion::new(issue, plan.index);
        let mut t = Transcript::default();
        if let Err(e) = run_plan(ws, issue, &plan, &candidates, &scene, config, agents, &mut s, &mut t) {
            s.error = Some(e.to_string());
        }
        s.plan = Some(plan);
        s.exchanges = ExchangeTally::from(&t);
        s.transcript = t;
        suggestions.push(s);
    }
    IssueOutcome { issue_id: issue.id.clone(), planning, suggestions }
}

#[allow(clippy::too_many_arguments)]
fn run_plan(
    ws: &Workspace,
    issue: &Issue,
    plan: &FixPlan,
    candidates: &[minui_a11y_core::hierarchy::CandidateSnippet],
    scene: &minui_a11y_core::render::RenderedScene,
    config: &SuggestConfig,
    agents: Agents<'_>,
    s: &mut FixSuggestion,
    t: &mut Transcript,
) -> Result<(), AgentError> {
    let project = ws.project();
    let mut ratings = Vec::with_capacity(candidates.len());
    for c in candidates {
        ratings.push(agents.rate_snippet(issue, plan, c, scene, t)?);
    }
    let snippet = agents.select_snippet(&ratings, config.top_k, issue, plan, t)?;
    s.localized_view = Some(snippet.view_name.clone());
    let file = project.file(&snippet.span.file).expect("candidate spans name project files");

    let max = config.iterations.max(1);
    for attempt in 1..=max {
        let draft = agents.draft_fix(issue, plan, &snippet, scene, &s.feedback, attempt, max, t)?;
        s.attempts = attempt;
        s.explanation = draft.explanation;
        let assessment = match compute_patch(file, &draft.modified_snippet, &snippet.view_name) {
            Ok(patch) => {
                let a = assess_patch(project, &patch, issue, issue.device);
                s.assessed_patch = Some(patch);
                a
            }
            Err(e) => {
                s.assessed_patch = None;
                Assessment {
                    verdict: AssessmentVerdict::BuildError { message: e.to_string() },
                    comparison: Default::default(),
                }
            }
        };
        let plausible = assessment.verdict.is_plausible();
        s.verdict = Some(assessment.verdict.clone());
        if plausible {
            break;
        }
        if attempt < max {
            s.feedback.push(assessment.feedback());
        }
    }

    s.patch = s
        .assessed_patch
        .as_ref()
        .and_then(|p| project.apply_patch(p).ok())
        .and_then(|patched| ws.user_patch(&patched, &file.path));
    s.patch_path = Some(patch_path(&issue.id, s.plan_index));
    Ok(())
}

/// Runs every issue through [`suggest_fixes`] on a pool of `jobs` threads.
/// Results keep the order of `issues`.
pub fn suggest_all(
    ws: &Workspace,
    issues: &[Issue],
    config: &SuggestConfig,
    agents: Agents<'_>,
    jobs: Option<usize>,
) -> Result<Vec<IssueOutcome>, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build()?;
    Ok(pool.install(|| issues.par_iter().map(|i| suggest_fixes(ws, i, config, agents)).collect()))
}
