//! Planner, localizer and fixer agents.

use std::time::{Duration, Instant, SystemTime};

use minui_a11y_core::hierarchy::CandidateSnippet;
use minui_a11y_core::render::RenderedScene;
use minui_a11y_core::scanner::Issue;
use serde::{Deserialize, Serialize};

use crate::backend::{AgentBackend, BackendError, ChatExchange, ChatRequest};
use crate::prompts::{render, Prompts};

/// Regeneration rounds allowed after off-source plans are filtered.
pub const PLAN_REGENERATION_ROUNDS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixPlan {
    pub index: usize,
    pub summary: String,
    pub rationale: String,
    pub guideline_ref: String,
}

impl FixPlan {
    pub fn prompt_text(&self) -> String {
        format!("{}\nRationale: {}\nGuideline: {}", self.summary, self.rationale, self.guideline_ref)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SnippetRating {
    pub snippet: CandidateSnippet,
    pub score: u8,
    pub reasoning: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixDraft {
    pub modified_snippet: String,
    pub explanation: String,
    pub attempt: usize,
}

/// Structured twin of a prompt.
#[derive(Debug, Clone)]
pub enum AgentTask {
    Plan { issue: Issue, scene: RenderedScene, count: usize, rejected: Vec<String> },
    Rate { issue: Issue, plan: FixPlan, snippet: CandidateSnippet },
    Compare { issue: Issue, plan: FixPlan, ratings: Vec<SnippetRating> },
    Fix {
        issue: Issue,
        plan: FixPlan,
        snippet: CandidateSnippet,
        scene: RenderedScene,
        feedback: Vec<String>,
        attempt: usize,
        max_attempts: usize,
    },
}

impl AgentTask {
    pub fn role(&self) -> &'static str {
        match self {
            AgentTask::Plan { .. } => "planner",
            AgentTask::Rate { .. } => "rater",
            AgentTask::Compare { .. } => "selector",
            AgentTask::Fix { .. } => "fixer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("plan response is not a numbered list: {0}")]
    PlanParse(String),
    #[error("only {got} of {wanted} plans apply to the source code after regeneration")]
    PlansExhausted { wanted: usize, got: usize },
    #[error("rating response has no integer score in 0..=100: {0}")]
    RatingParse(String),
    #[error("no snippets to choose from")]
    NoCandidates,
}

#[derive(Debug, Clone)]
pub struct TimedExchange {
    pub role: &'static str,
    pub at: SystemTime,
    pub exchange: ChatExchange,
    pub latency: Duration,
}

/// Every exchange made on behalf of one unit of work.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    pub exchanges: Vec<TimedExchange>,
}

impl Transcript {
    pub fn tokens(&self) -> (u64, u64) {
        self.exchanges.iter().fold((0, 0), |(i, o), e| (i + e.exchange.tokens_in, o + e.exchange.tokens_out))
    }
}

pub fn issue_text(issue: &Issue) -> String {
    format!(
        "Kind: {} ({})\nElement: {}\nScreen: {}\nDescription: {}",
        issue.kind.title(),
        issue.kind.code(),
        issue.element,
        issue.screen,
        issue.description
    )
}

/// The text stand-in for an annotated screenshot.
pub fn scene_text(scene: &RenderedScene, issue: &Issue) -> String {
    let scene = scene.clone().with_highlight(Some(issue.element.clone()));
    serde_json::to_string_pretty(&scene).unwrap_or_default()
}

const OFF_SOURCE_MARKERS: [&str; 12] = [
    "third-party",
    "third party",
    "user testing",
    "usability test",
    "manual test",
    "accessibility inspector",
    "audit",
    "hire",
    "consult",
    "survey",
    "voiceover testing",
    "outside the code",
];

/// False for plans that ask for something other than a code change.
pub fn is_source_applicable(plan: &FixPlan) -> bool {
    let text = format!("{} {}", plan.summary, plan.rationale).to_lowercase();
    !OFF_SOURCE_MARKERS.iter().any(|m| text.contains(m))
}

fn strip_list_marker(line: &str) -> Option<&str> {
    let digits = line.find(|c: char| !c.is_ascii_digit())?;
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    let rest = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))?;
    rest.starts_with(char::is_whitespace).then(|| rest.trim())
}

fn field<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let line = line.trim_start_matches(['-', '*', ' ']);
    let (head, rest) = line.split_once(':')?;
    head.trim().trim_matches('*').eq_ignore_ascii_case(name).then(|| rest.trim_start_matches(['*', ' ']).trim())
}

pub fn parse_plans(text: &str) -> Result<Vec<FixPlan>, AgentError> {
    let mut plans: Vec<FixPlan> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(summary) = strip_list_marker(line) {
            plans.push(FixPlan {
                index: plans.len() + 1,
                summary: summary.trim_matches('*').trim().into(),
                rationale: String::new(),
                guideline_ref: String::new(),
            });
        } else if let Some(plan) = plans.last_mut() {
            if let Some(r) = field(line, "rationale") {
                plan.rationale = r.into();
            } else if let Some(g) = field(line, "guideline") {
                plan.guideline_ref = g.into();
            }
        }
    }
    if plans.is_empty() {
        return Err(AgentError::PlanParse(text.chars().take(80).collect()));
    }
    Ok(plans)
}

pub fn parse_rating(text: &str) -> Result<(u8, String), AgentError> {
    let bad = || AgentError::RatingParse(text.chars().take(80).collect());
    let score = text.lines().find_map(|l| field(l, "score")).ok_or_else(bad)?;
    let digits: String = score.chars().take_while(char::is_ascii_digit).collect();
    let score: u8 = digits.parse().map_err(|_| bad())?;
    if score > 100 {
        return Err(bad());
    }
    let reasoning = text.lines().find_map(|l| field(l, "reasoning")).unwrap_or("").to_string();
    Ok((score, reasoning))
}

pub fn parse_choice(text: &str) -> Option<String> {
    let choice = text.lines().find_map(|l| field(l, "choice"))?;
    let name = choice.trim_matches(|c: char| c == '`' || c == '"' || c == '\'' || c == '*').trim();
    let name = name.strip_suffix("()").unwrap_or(name);
    (!name.is_empty()).then(|| name.to_string())
}

/// Splits a fixer response into the fenced declaration and the explanation.
pub fn parse_fix(text: &str) -> (String, String) {
    let explanation = text
        .lines()
        .position(|l| field(l, "explanation").is_some())
        .map(|i| {
            let lines: Vec<&str> = text.lines().skip(i).collect();
            let first = field(lines[0], "explanation").unwrap_or("");
            std::iter::once(first).chain(lines[1..].iter().copied()).collect::<Vec<_>>().join("\n").trim().to_string()
        })
        .unwrap_or_default();
    let Some(open) = text.find("```") else {
        return (text.trim().to_string(), explanation);
    };
    let after = &text[open + 3..];
    let body_start = after.find('\n').map(|i| i + 1).unwrap_or(after.len());
    let body = &after[body_start..];
    let code = match body.find("```") {
        Some(close) => &body[..close],
        None => body,
    };
    (code.trim_end().to_string(), explanation)
}

/// Agents bound to one backend and template set.
#[derive(Clone, Copy)]
pub struct Agents<'a> {
    pub backend: &'a AgentBackend,
    pub prompts: &'a Prompts,
}

impl<'a> Agents<'a> {
    pub fn new(backend: &'a AgentBackend, prompts: &'a Prompts) -> Self {
        Agents { backend, prompts }
    }

    fn ask(&self, user: String, task: AgentTask, transcript: &mut Transcript) -> Result<String, BackendError> {
        let role = task.role();
        let request = ChatRequest { system: self.prompts.system.clone(), user, task };
        let at = SystemTime::now();
        let started = Instant::now();
        let exchange = self.backend.complete(&request)?;
        let text = exchange.response_text.clone();
        transcript.exchanges.push(TimedExchange { role, at, exchange, latency: started.elapsed() });
        Ok(text)
    }

    /// Exactly `count` plans, regenerating when off-source plans are dropped.
    pub fn generate_plans(
        &self,
        issue: &Issue,
        scene: &RenderedScene,
        count: usize,
        transcript: &mut Transcript,
    ) -> Result<Vec<FixPlan>, AgentError> {
        let count = count.max(1);
        let mut accepted: Vec<FixPlan> = Vec::new();
        let mut rejected: Vec<String> = Vec::new();
        for _ in 0..=PLAN_REGENERATION_ROUNDS {
            let wanted = count - accepted.len();
            let rejected_text = if rejected.is_empty() {
                String::new()
            } else {
                let list: Vec<String> = rejected.iter().map(|r| format!("- {r}")).collect();
                format!("Previously rejected plans (not applicable to the source code):\n{}\n", list.join("\n"))
            };
            let user = render(
                &self.prompts.plan,
                &[
                    ("issue", &issue_text(issue)),
                    ("scene", &scene_text(scene, issue)),
                    ("count", &wanted.to_string()),
                    ("rejected", &rejected_text),
                ],
            );
            let task = AgentTask::Plan { issue: issue.clone(), scene: scene.clone(), count: wanted, rejected: rejected.clone() };
            let response = self.ask(user, task, transcript)?;
            for plan in parse_plans(&response)? {
                if !is_source_applicable(&plan) {
                    rejected.push(plan.summary);
                } else if accepted.len() < count {
                    accepted.push(plan);
                }
            }
            if accepted.len() == count {
                break;
            }
        }
        if accepted.len() < count {
            return Err(AgentError::PlansExhausted { wanted: count, got: accepted.len() });
        }
        for (i, plan) in accepted.iter_mut().enumerate() {
            plan.index = i + 1;
        }
        Ok(accepted)
    }

    pub fn rate_snippet(
        &self,
        issue: &Issue,
        plan: &FixPlan,
        snippet: &CandidateSnippet,
        scene: &RenderedScene,
        transcript: &mut Transcript,
    ) -> Result<SnippetRating, AgentError> {
        let user = render(
            &self.prompts.rate,
            &[
                ("issue", &issue_text(issue)),
                ("plan", &plan.prompt_text()),
                ("scene", &scene_text(scene, issue)),
                ("relation", snippet.relation.name()),
                ("snippet", &snippet.text),
            ],
        );
        let task = AgentTask::Rate { issue: issue.clone(), plan: plan.clone(), snippet: snippet.clone() };
        let response = self.ask(user, task, transcript)?;
        let (score, reasoning) = parse_rating(&response)?;
        Ok(SnippetRating { snippet: snippet.clone(), score, reasoning })
    }

    /// Keeps the `top_k` best ratings (ties by candidate order) and, when
    /// more than one survives, asks the backend to compare them. An answer
    /// outside the set is retried once, then the best rating wins.
    pub fn select_snippet(
        &self,
        ratings: &[SnippetRating],
        top_k: usize,
        issue: &Issue,
        plan: &FixPlan,
        transcript: &mut Transcript,
    ) -> Result<CandidateSnippet, AgentError> {
        let mut ranked: Vec<&SnippetRating> = ratings.iter().collect();
        ranked.sort_by_key(|r| core::cmp::Reverse(r.score));
        ranked.truncate(top_k.max(1));
        let best = ranked.first().ok_or(AgentError::NoCandidates)?;
        if ranked.len() == 1 {
            return Ok(best.snippet.clone());
        }
        let candidates: Vec<String> = ranked
            .iter()
            .map(|r| {
                format!(
                    "View {} ({}, rated {}):\n```minui\n{}\n```",
                    r.snippet.view_name,
                    r.snippet.relation.name(),
                    r.score,
                    r.snippet.text
                )
            })
            .collect();
        let candidates = candidates.join("\n\n");
        let mut retry = String::new();
        for _ in 0..2 {
            let user = render(
                &self.prompts.compare,
                &[("issue", &issue_text(issue)), ("plan", &plan.prompt_text()), ("candidates", &candidates), ("retry", &retry)],
            );
            let task = AgentTask::Compare {
                issue: issue.clone(),
                plan: plan.clone(),
                ratings: ranked.iter().map(|r| (*r).clone()).collect(),
            };
            let response = self.ask(user, task, transcript)?;
            let choice = parse_choice(&response);
            if let Some(hit) = ranked.iter().find(|r| Some(&r.snippet.view_name) == choice.as_ref()) {
                return Ok(hit.snippet.clone());
            }
            let names: Vec<&str> = ranked.iter().map(|r| r.snippet.view_name.as_str()).collect();
            retry = format!(
                "Your previous answer ({}) is not one of the candidates. Choose one of: {}.\n",
                choice.as_deref().unwrap_or("no choice"),
                names.join(", ")
            );
        }
        Ok(best.snippet.clone())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn draft_fix(
        &self,
        issue: &Issue,
        plan: &FixPlan,
        snippet: &CandidateSnippet,
        scene: &RenderedScene,
        feedback: &[String],
        attempt: usize,
        max_attempts: usize,
        transcript: &mut Transcript,
    ) -> Result<FixDraft, AgentError> {
        let feedback_text = if feedback.is_empty() {
            String::new()
        } else {
            let lines: Vec<String> =
                feedback.iter().enumerate().map(|(i, f)| format!("Attempt {} failed: {f}", i + 1)).collect();
            format!("\nEarlier attempts were rejected by the checker:\n{}\n", lines.join("\n"))
        };
        let user = render(
            &self.prompts.fix,
            &[
                ("attempt", &attempt.to_string()),
                ("max_attempts", &max_attempts.to_string()),
                ("issue", &issue_text(issue)),
                ("plan", &plan.prompt_text()),
                ("snippet", &snippet.text),
                ("feedback", &feedback_text),
            ],
        );
        let task = AgentTask::Fix {
            issue: issue.clone(),
            plan: plan.clone(),
            snippet: snippet.clone(),
            scene: scene.clone(),
            feedback: feedback.to_vec(),
            attempt,
            max_attempts,
        };
        let response = self.ask(user, task, transcript)?;
        let (modified_snippet, explanation) = parse_fix(&response);
        Ok(FixDraft { modified_snippet, explanation, attempt })
    }
}
