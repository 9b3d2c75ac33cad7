//! Prompt templates with `{name}` placeholders.

use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompts {
    pub system: String,
    pub plan: String,
    pub rate: String,
    pub compare: String,
    pub fix: String,
}

impl Default for Prompts {
    fn default() -> Self {
        Prompts {
            system: include_str!("../prompts/system.txt").into(),
            plan: include_str!("../prompts/plan.txt").into(),
            rate: include_str!("../prompts/rate.txt").into(),
            compare: include_str!("../prompts/compare.txt").into(),
            fix: include_str!("../prompts/fix.txt").into(),
        }
    }
}

impl Prompts {
    /// Bundled templates, with any `<name>.txt` found in `dir` taking over.
    pub fn load(dir: &Path) -> io::Result<Self> {
        let mut p = Prompts::default();
        for (name, slot) in [
            ("system", &mut p.system),
            ("plan", &mut p.plan),
            ("rate", &mut p.rate),
            ("compare", &mut p.compare),
            ("fix", &mut p.fix),
        ] {
            let path = dir.join(format!("{name}.txt"));
            if path.is_file() {
                *slot = fs::read_to_string(path)?;
            }
        }
        Ok(p)
    }
}

/// Substitutes `{key}` placeholders in one pass, so values containing braces
/// are never re-expanded. Unknown placeholders are left as written.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}');
        let key = close.map(|c| &after[..c]);
        match key.and_then(|k| vars.iter().find(|(name, _)| *name == k)) {
            Some((k, v)) => {
                out.push_str(v);
                rest = &after[k.len() + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}
