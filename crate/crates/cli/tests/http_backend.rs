use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;

use minui_a11y::agents::{Agents, Transcript};
use minui_a11y::backend::{AgentBackend, BackendError, HttpBackend, HttpConfig};
use minui_a11y::manifest::load_project;
use minui_a11y::pipeline::Workspace;
use minui_a11y::prompts::Prompts;
use minui_a11y_core::render::resolve_screen;
use minui_a11y_core::scanner::scan_screen;

struct Captured {
    headers: Vec<String>,
    body: serde_json::Value,
}

/// Serves `responses` in order, one connection each, and reports what it received.
fn mock_server(responses: Vec<(u16, String)>) -> (String, mpsc::Receiver<Captured>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut responses = responses.into_iter();
        for stream in listener.incoming() {
            let stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
                // A bare connect, as made by the reachability check.
                continue;
            }
            let Some((status, body)) = responses.next() else { break };
            let mut headers = Vec::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line.trim().is_empty() {
                    break;
                }
                headers.push(line.trim().to_string());
            }
            let len = headers
                .iter()
                .find_map(|h| h.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse().unwrap()))
                .unwrap_or(0);
            let mut raw = vec![0; len];
            reader.read_exact(&mut raw).unwrap();
            let _ = tx.send(Captured { headers, body: serde_json::from_slice(&raw).unwrap() });
            let mut stream = stream;
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    (url, rx)
}

fn completion(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}],
        "usage": {"prompt_tokens": 321, "completion_tokens": 54}
    })
    .to_string()
}

fn backend(url: String, key_env: &str) -> AgentBackend {
    std::env::set_var(key_env, "sk-test-123");
    AgentBackend::Http(HttpBackend::new(HttpConfig { api_key_env: key_env.into(), ..HttpConfig::new(url, "test-model") }).unwrap())
}

#[test]
fn planner_request_reaches_the_endpoint_in_chat_format() {
    let plans = "1. Darken the label color.\nRationale: contrast.\nGuideline: WCAG 1.4.3\n\
                 2. Add a dark background.\nRationale: contrast.\nGuideline: WCAG 1.4.3";
    let (url, rx) = mock_server(vec![(200, completion(plans))]);
    let backend = backend(url, "MINUI_A11Y_TEST_KEY_PLAN");
    backend.preflight().unwrap();

    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/theme_picker");
    let ws = Workspace::new(load_project(&dir).unwrap().project);
    let issue = scan_screen(ws.project(), "ThemePicker", Default::default()).unwrap().issues.remove(0);
    let scene = resolve_screen(ws.project(), "ThemePicker", Default::default()).unwrap();
    let prompts = Prompts::default();
    let mut t = Transcript::default();
    let got = Agents::new(&backend, &prompts).generate_plans(&issue, &scene, 2, &mut t).unwrap();

    assert_eq!(got.len(), 2);
    assert_eq!(got[1].summary, "Add a dark background.");
    assert_eq!(t.tokens(), (321, 54));

    let req = rx.recv().unwrap();
    assert!(req.headers.iter().any(|h| h.eq_ignore_ascii_case("authorization: Bearer sk-test-123")), "{:?}", req.headers);
    assert_eq!(req.body["model"], "test-model");
    assert_eq!(req.body["temperature"], 0.2);
    let messages = req.body["messages"].as_array().unwrap();
    assert_eq!(messages.len(), 2);
    assert_eq!(messages[0]["role"], "system");
    assert_eq!(messages[0]["content"], prompts.system);
    assert_eq!(messages[1]["role"], "user");
    assert!(messages[1]["content"].as_str().unwrap().contains(&issue.description));
}

#[test]
fn error_status_is_reported() {
    let (url, _rx) = mock_server(vec![(500, "{\"error\":\"boom\"}".into())]);
    let backend = backend(url, "MINUI_A11Y_TEST_KEY_STATUS");
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/theme_picker");
    let ws = Workspace::new(load_project(&dir).unwrap().project);
    let issue = scan_screen(ws.project(), "ThemePicker", Default::default()).unwrap().issues.remove(0);
    let scene = resolve_screen(ws.project(), "ThemePicker", Default::default()).unwrap();
    let prompts = Prompts::default();
    let err = Agents::new(&backend, &prompts).generate_plans(&issue, &scene, 3, &mut Transcript::default()).unwrap_err();
    assert!(err.to_string().contains("HTTP 500"), "{err}");
}

#[test]
fn closed_port_fails_preflight() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let backend = backend(format!("http://127.0.0.1:{port}/v1"), "MINUI_A11Y_TEST_KEY_CLOSED");
    assert!(matches!(backend.preflight(), Err(BackendError::Unreachable(_))));
}

#[test]
fn missing_key_is_rejected() {
    let config = HttpConfig { api_key_env: "MINUI_A11Y_TEST_KEY_UNSET".into(), ..HttpConfig::new("http://127.0.0.1:9", "m") };
    assert!(matches!(HttpBackend::new(config), Err(BackendError::MissingKey(_))));
}
