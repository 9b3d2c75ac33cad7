//! Argument parsing and the `scan`, `suggest` and `report` commands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use minui_a11y_core::render::resolve_screen;
use minui_a11y_core::scanner::{scan_scene, Issue, ScanReport};

use crate::agents::Agents;
use crate::backend::{AgentBackend, HttpBackend, HttpConfig, ScriptedBackend, DEFAULT_API_KEY_ENV, DEFAULT_TEMPERATURE};
use crate::manifest::load_project;
use crate::pipeline::{suggest_all, SuggestConfig, Workspace};
use crate::prompts::Prompts;
use crate::report::RunReport;
use crate::store::{IssuesFile, RunStore};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ISSUES: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNREACHABLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "minui-a11y", version, about = "Find and repair accessibility issues in MiniUI projects")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Http,
    Scripted,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render every selected screen and record its accessibility issues.
    Scan {
        /// Project directory containing minui.json.
        project: PathBuf,
        /// Screen name or root view, or `all`.
        #[arg(long, default_value = "all")]
        screen: String,
        /// Index into the manifest's device list.
        #[arg(long, default_value_t = 0)]
        device: usize,
        /// Run directory to write.
        #[arg(long)]
        out: PathBuf,
        /// Exit with status 1 when any issue is found.
        #[arg(long)]
        fail_on_issues: bool,
    },
    /// Generate, apply and assess fix suggestions for scanned issues.
    Suggest {
        run: PathBuf,
        /// Issue id, or `all`.
        #[arg(long, default_value = "all")]
        issue: String,
        #[arg(long, default_value_t = 3)]
        plans: usize,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        #[arg(long = "topk", default_value_t = 3)]
        top_k: usize,
        #[arg(long, value_enum, default_value = "heuristic")]
        backend: BackendKind,
        /// Response script for the scripted backend.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Chat-completions URL for the http backend.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long, default_value = "gpt-4o")]
        model: String,
        /// Environment variable holding the API key.
        #[arg(long, default_value = DEFAULT_API_KEY_ENV)]
        api_key_env: String,
        #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
        temperature: f64,
        #[arg(long, default_value_t = 4)]
        max_in_flight: usize,
        /// Request timeout in seconds.
        #[arg(long, default_value_t = 120)]
        timeout: u64,
        /// Directory of prompt overrides (system.txt, plan.txt, ...).
        #[arg(long)]
        prompts: Option<PathBuf>,
        /// Worker threads; defaults to the number of logical cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Summarize a run directory.
    Report {
        run: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// A failure carrying its exit status.
struct Failure(i32, String);

fn fail(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_ERROR, e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Scan { project, screen, device, out: run, fail_on_issues } => {
            scan(&project, &screen, device, &run, fail_on_issues, out)
        }
        Command::Report { run, format } => report(&run, format, out),
        Command::Suggest {
            run,
            issue,
            plans,
            iterations,
            top_k,
            backend,
            fixture,
            endpoint,
            model,
            api_key_env,
            temperature,
            max_in_flight,
            timeout,
            prompts,
            jobs,
        } => {
            let backend = match backend {
                BackendKind::Heuristic => Ok(AgentBackend::Heuristic),
                BackendKind::Scripted => match fixture {
                    Some(path) => ScriptedBackend::load(&path).map(AgentBackend::Scripted).map_err(fail),
                    None => Err(fail("--backend scripted requires --fixture")),
                },
                BackendKind::Http => match endpoint {
                    Some(endpoint) => {
                        let config = HttpConfig {
                            api_key_env,
                            temperature,
                            max_in_flight,
                            timeout: Duration::from_secs(timeout),
                            ..HttpConfig::new(endpoint, model)
                        };
                        HttpBackend::new(config).map(AgentBackend::Http).map_err(fail)
                    }
                    None => Err(fail("--backend http requires --endpoint")),
                },
            };
            let config = SuggestConfig { plans: plans.max(1), iterations: iterations.max(1), top_k: top_k.max(1) };
            backend.and_then(|b| suggest(&run, &issue, config, &b, prompts, jobs, out))
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn scan(
    project_dir: &std::path::Path,
    screen: &str,
    device: usize,
    run: &std::path::Path,
    fail_on_issues: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let loaded = load_project(project_dir).map_err(fail)?;
    let manifest = &loaded.manifest;
    let screens: Vec<_> = if screen == "all" {
        manifest.screens.iter().collect()
    } else {
        vec![manifest.screen(screen).ok_or_else(|| fail(format!("unknown screen `{screen}`")))?]
    };
    let device_config = *manifest
        .devices
        .get(device)
        .ok_or_else(|| fail(format!("device index {device} out of range (0..{})", manifest.devices.len())))?;

    let ws = Workspace::new(loaded.project.clone());
    let mut scenes = Vec::new();
    let mut reports = Vec::new();
    for s in &screens {
        let scene = resolve_screen(ws.project(), &s.root_view, device_config).map_err(fail)?;
        let issues = scan_scene(&scene);
        reports.push(ScanReport { screen: s.root_view.clone(), device: device_config, issues });
        scenes.push(scene);
    }
    let issues = IssuesFile::new(manifest.name.clone(), reports);
    let store = RunStore::create(run).map_err(fail)?;
    store.write_scan(manifest, &loaded.project, &scenes, &issues).map_err(fail)?;

    let total = issues.issues().count();
    for (screen, report) in screens.iter().zip(&issues.reports) {
        let _ = writeln!(out, "{} ({}): {} issue(s)", screen.name, screen.root_view, report.issues.len());
        for i in &report.issues {
            let _ = writeln!(out, "  {}  {:<49} {}  {}", i.id, i.kind.title(), i.element, i.description);
        }
    }
    let _ = writeln!(out, "{total} issue(s) written to {}", run.display());
    Ok(if fail_on_issues && total > 0 { EXIT_ISSUES } else { EXIT_OK })
}

fn suggest(
    run: &std::path::Path,
    issue: &str,
    config: SuggestConfig,
    backend: &AgentBackend,
    prompts_dir: Option<PathBuf>,
    jobs: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let store = RunStore::open(run).map_err(fail)?;
    let issues_file = store.load_issues().map_err(fail)?;
    let selected: Vec<Issue> = if issue == "all" {
        issues_file.issues().cloned().collect()
    } else {
        vec![issues_file.find(issue).cloned().ok_or_else(|| fail(format!("unknown issue `{issue}`")))?]
    };
    let loaded = store.load_project().map_err(fail)?;
    let prompts = match prompts_dir {
        Some(dir) => Prompts::load(&dir).map_err(fail)?,
        None => Prompts::default(),
    };
    backend.preflight().map_err(|e| Failure(EXIT_UNREACHABLE, e.to_string()))?;

    let ws = Workspace::new(loaded.project);
    let agents = Agents { backend, prompts: &prompts };
    let outcomes = suggest_all(&ws, &selected, &config, agents, jobs).map_err(fail)?;
    let mut plausible = 0;
    let mut records = 0;
    for outcome in &outcomes {
        store.write_outcome(outcome).map_err(fail)?;
        for s in &outcome.suggestions {
            records += 1;
            plausible += usize::from(s.is_plausible());
            let _ = writeln!(out, "{} plan {}: {} (attempts {})", s.issue_id, s.plan_index, s.status(), s.attempts);
        }
    }
    let _ = writeln!(out, "{records} suggestion(s), {plausible} plausible, backend {}", backend.name());
    Ok(EXIT_OK)
}

fn report(run: &std::path::Path, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let store = RunStore::open(run).map_err(fail)?;
    let report = RunReport::build(&store).map_err(fail)?;
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    out.write_all(text.as_bytes()).map_err(fail)?;
    Ok(EXIT_OK)
}
