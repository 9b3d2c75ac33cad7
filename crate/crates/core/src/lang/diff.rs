//! Line diffs in unified format.
//!
//! Lines keep their terminators so applying a patch reproduces the target
//! bytes exactly, including a missing final newline or `\r\n` endings.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const DEFAULT_CONTEXT: usize = 3;

const NO_NEWLINE: &str = "\\ No newline at end of file";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "op", content = "text")]
pub enum HunkLine {
    Context(String),
    Removed(String),
    Added(String),
}

impl HunkLine {
    pub fn text(&self) -> &str {
        match self {
            HunkLine::Context(s) | HunkLine::Removed(s) | HunkLine::Added(s) => s,
        }
    }
}

/// One hunk. Starts are 0-based line indices into the old and new text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hunk {
    pub old_start: usize,
    pub old_len: usize,
    pub new_start: usize,
    pub new_len: usize,
    pub lines: Vec<HunkLine>,
}

/// A set of hunks against exactly one file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Patch {
    pub file: String,
    pub hunks: Vec<Hunk>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatchError {
    #[error("patch does not apply to {file}: context mismatch at line {line}")]
    ContextMismatch { file: String, line: usize },
    #[error("malformed unified diff: {0}")]
    Malformed(String),
}

fn split_lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Equal,
    Delete,
    Insert,
}

/// Longest-common-subsequence edit script over lines.
fn edit_script(old: &[&str], new: &[&str]) -> Vec<Op> {
    let prefix = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let suffix = old[prefix..]
        .iter()
        .rev()
        .zip(new[prefix..].iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    let a = &old[prefix..old.len() - suffix];
    let b = &new[prefix..new.len() - suffix];
    let (n, m) = (a.len(), b.len());
    // lcs[i][j] = LCS length of a[i..] and b[j..]
    let width = m + 1;
    let mut lcs = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * width + j] = if a[i] == b[j] {
                lcs[(i + 1) * width + j + 1] + 1
            } else {
                lcs[(i + 1) * width + j].max(lcs[i * width + j + 1])
            };
        }
    }
    let mut ops = vec![Op::Equal; prefix];
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && a[i] == b[j] {
            ops.push(Op::Equal);
            i += 1;
            j += 1;
        } else if j == m || (i < n && lcs[(i + 1) * width + j] >= lcs[i * width + j + 1]) {
            ops.push(Op::Delete);
            i += 1;
        } else {
            ops.push(Op::Insert);
            j += 1;
        }
    }
    ops.extend(core::iter::repeat_n(Op::Equal, suffix));
    ops
}

/// Diffs two texts into a patch with `context` lines around each change.
pub fn diff_texts(file: &str, old: &str, new: &str, context: usize) -> Patch {
    let old_lines = split_lines(old);
    let new_lines = split_lines(new);
    let ops = edit_script(&old_lines, &new_lines);

    // Old/new line index before each op.
    let mut positions = Vec::with_capacity(ops.len() + 1);
    let (mut oi, mut ni) = (0usize, 0usize);
    for op in &ops {
        positions.push((oi, ni));
        match op {
            Op::Equal => {
                oi += 1;
                ni += 1;
            }
            Op::Delete => oi += 1,
            Op::Insert => ni += 1,
        }
    }
    positions.push((oi, ni));

    let changes: Vec<usize> = ops.iter().enumerate().filter(|(_, op)| **op != Op::Equal).map(|(k, _)| k).collect();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &k in &changes {
        match groups.last_mut() {
            Some((_, last)) if k - *last - 1 <= 2 * context => *last = k,
            _ => groups.push((k, k)),
        }
    }

    let hunks = groups
        .into_iter()
        .map(|(first, last)| {
            let from = first.saturating_sub(context);
            let to = (last + context + 1).min(ops.len());
            let (old_start, new_start) = positions[from];
            let (old_end, new_end) = positions[to];
            let lines = (from..to)
                .map(|k| {
                    let (o, n) = positions[k];
                    match ops[k] {
                        Op::Equal => HunkLine::Context(old_lines[o].to_string()),
                        Op::Delete => HunkLine::Removed(old_lines[o].to_string()),
                        Op::Insert => HunkLine::Added(new_lines[n].to_string()),
                    }
                })
                .collect();
            Hunk { old_start, old_len: old_end - old_start, new_start, new_len: new_end - new_start, lines }
        })
        .collect();

    Patch { file: file.to_string(), hunks, provenance: String::new() }
}

impl Patch {
    pub fn is_empty(&self) -> bool {
        self.hunks.is_empty()
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn removed_count(&self) -> usize {
        self.lines().filter(|l| matches!(l, HunkLine::Removed(_))).count()
    }

    pub fn added_count(&self) -> usize {
        self.lines().filter(|l| matches!(l, HunkLine::Added(_))).count()
    }

    fn lines(&self) -> impl Iterator<Item = &HunkLine> {
        self.hunks.iter().flat_map(|h| h.lines.iter())
    }

    /// The patch that undoes this one.
    pub fn inverse(&self) -> Patch {
        let hunks = self
            .hunks
            .iter()
            .map(|h| {
                let mut lines = Vec::with_capacity(h.lines.len());
                let mut removed = Vec::new();
                let mut added = Vec::new();
                let flush = |lines: &mut Vec<HunkLine>, removed: &mut Vec<HunkLine>, added: &mut Vec<HunkLine>| {
                    lines.append(removed);
                    lines.append(added);
                };
                for line in &h.lines {
                    match line {
                        HunkLine::Context(s) => {
                            flush(&mut lines, &mut removed, &mut added);
                            lines.push(HunkLine::Context(s.clone()));
                        }
                        HunkLine::Added(s) => removed.push(HunkLine::Removed(s.clone())),
                        HunkLine::Removed(s) => added.push(HunkLine::Added(s.clone())),
                    }
                }
                flush(&mut lines, &mut removed, &mut added);
                Hunk {
                    old_start: h.new_start,
                    old_len: h.new_len,
                    new_start: h.old_start,
                    new_len: h.old_len,
                    lines,
                }
            })
            .collect();
        Patch { file: self.file.clone(), hunks, provenance: format!("inverse of {}", self.provenance) }
    }

    /// Applies the patch strictly: every context and removed line must match.
    pub fn apply_to(&self, text: &str) -> Result<String, PatchError> {
        let lines = split_lines(text);
        let mismatch = |line: usize| PatchError::ContextMismatch { file: self.file.clone(), line: line + 1 };
        let mut out = String::with_capacity(text.len());
        let mut cursor = 0usize;
        for h in &self.hunks {
            if h.old_start < cursor || h.old_start > lines.len() {
                return Err(mismatch(h.old_start));
            }
            for l in &lines[cursor..h.old_start] {
                out.push_str(l);
            }
            let mut at = h.old_start;
            for line in &h.lines {
                match line {
                    HunkLine::Context(s) | HunkLine::Removed(s) => {
                        if lines.get(at) != Some(&s.as_str()) {
                            return Err(mismatch(at));
                        }
                        if matches!(line, HunkLine::Context(_)) {
                            out.push_str(s);
                        }
                        at += 1;
                    }
                    HunkLine::Added(s) => out.push_str(s),
                }
            }
            if at - h.old_start != h.old_len {
                return Err(PatchError::Malformed(format!(
                    "hunk at line {} declares {} old lines but carries {}",
                    h.old_start + 1,
                    h.old_len,
                    at - h.old_start
                )));
            }
            cursor = at;
        }
        for l in &lines[cursor..] {
            out.push_str(l);
        }
        Ok(out)
    }

    /// Renders the patch as a unified diff. An empty patch renders as "".
    pub fn to_unified(&self) -> String {
        let mut out = String::new();
        if self.hunks.is_empty() {
            return out;
        }
        let _ = writeln!(out, "--- {}", self.file);
        let _ = writeln!(out, "+++ {}", self.file);
        for h in &self.hunks {
            let start = |s: usize, len: usize| if len == 0 { s } else { s + 1 };
            let _ = writeln!(
                out,
                "@@ -{},{} +{},{} @@",
                start(h.old_start, h.old_len),
                h.old_len,
                start(h.new_start, h.new_len),
                h.new_len
            );
            for line in &h.lines {
                let (prefix, text) = match line {
                    HunkLine::Context(s) => (' ', s),
                    HunkLine::Removed(s) => ('-', s),
                    HunkLine::Added(s) => ('+', s),
                };
                out.push(prefix);
                match text.strip_suffix('\n') {
                    Some(body) => {
                        out.push_str(body);
                        out.push('\n');
                    }
                    None => {
                        out.push_str(text);
                        out.push('\n');
                        out.push_str(NO_NEWLINE);
                        out.push('\n');
                    }
                }
            }
        }
        out
    }

    /// Parses the output of [`Patch::to_unified`] (or any single-file unified diff).
    pub fn parse_unified(text: &str) -> Result<Patch, PatchError> {
        let malformed = |m: &str| PatchError::Malformed(m.to_string());
        let mut patch = Patch::default();
        let mut lines = text.split_inclusive('\n').peekable();
        while let Some(raw) = lines.next() {
            let line = raw.strip_suffix('\n').unwrap_or(raw);
            if let Some(path) = line.strip_prefix("--- ") {
                patch.file = path.to_string();
            } else if line.starts_with("+++ ") {
                continue;
            } else if let Some(header) = line.strip_prefix("@@ ") {
                let header = header.split(" @@").next().ok_or_else(|| malformed("bad hunk header"))?;
                let mut parts = header.split(' ');
                let old = parts.next().and_then(|p| p.strip_prefix('-')).ok_or_else(|| malformed("bad old range"))?;
                let new = parts.next().and_then(|p| p.strip_prefix('+')).ok_or_else(|| malformed("bad new range"))?;
                let range = |r: &str| -> Result<(usize, usize), PatchError> {
                    let (s, l) = r.split_once(',').unwrap_or((r, "1"));
                    let s: usize = s.parse().map_err(|_| malformed("bad range start"))?;
                    let l: usize = l.parse().map_err(|_| malformed("bad range length"))?;
                    Ok((if l == 0 { s } else { s.checked_sub(1).ok_or_else(|| malformed("zero start"))? }, l))
                };
                let (old_start, old_len) = range(old)?;
                let (new_start, new_len) = range(new)?;
                let mut hunk = Hunk { old_start, old_len, new_start, new_len, lines: Vec::new() };
                let (mut seen_old, mut seen_new) = (0, 0);
                while seen_old < old_len || seen_new < new_len {
                    let raw = lines.next().ok_or_else(|| malformed("truncated hunk"))?;
                    let (prefix, body) = raw.split_at(raw.chars().next().map_or(0, char::len_utf8));
                    let mut body = body.to_string();
                    if let Some(next) = lines.peek() {
                        if next.strip_suffix('\n').unwrap_or(next) == NO_NEWLINE {
                            lines.next();
                            body.pop();
                        }
                    }
                    let entry = match prefix {
                        " " => {
                            seen_old += 1;
                            seen_new += 1;
                            HunkLine::Context(body)
                        }
                        "-" => {
                            seen_old += 1;
                            HunkLine::Removed(body)
                        }
                        "+" => {
                            seen_new += 1;
                            HunkLine::Added(body)
                        }
                        _ => return Err(malformed("unexpected line inside hunk")),
                    };
                    hunk.lines.push(entry);
                }
                if seen_old != old_len || seen_new != new_len {
                    return Err(malformed("hunk length mismatch"));
                }
                patch.hunks.push(hunk);
            } else if !line.is_empty() {
                return Err(malformed("unexpected line outside hunk"));
            }
        }
        Ok(patch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts_give_empty_patch() {
        let p = diff_texts("a", "x\ny\n", "x\ny\n", 3);
        assert!(p.is_empty());
        assert_eq!(p.to_unified(), "");
    }

    #[test]
    fn single_line_change_with_context() {
        let old = "1\n2\n3\n4\n5\n6\n7\n8\n9\n";
        let new = "1\n2\n3\n4\nfive\n6\n7\n8\n9\n";
        let p = diff_texts("f.minui", old, new, 3);
        assert_eq!(p.hunks.len(), 1);
        assert_eq!(p.removed_count(), 1);
        assert_eq!(p.added_count(), 1);
        assert_eq!(
            p.to_unified(),
            "--- f.minui\n+++ f.minui\n@@ -2,7 +2,7 @@\n 2\n 3\n 4\n-5\n+five\n 6\n 7\n 8\n"
        );
        assert_eq!(p.apply_to(old).unwrap(), new);
        assert_eq!(p.inverse().apply_to(new).unwrap(), old);
    }

    #[test]
    fn distant_changes_split_into_hunks() {
        let old: String = (0..30).map(|i| format!("{i}\n")).collect();
        let new: String = (0..30)
            .map(|i| match i {
                2 => "two\n".to_string(),
                25 => "twenty-five\n".to_string(),
                _ => format!("{i}\n"),
            })
            .collect();
        let p = diff_texts("f", &old, &new, 3);
        assert_eq!(p.hunks.len(), 2);
        assert_eq!(p.apply_to(&old).unwrap(), new);
    }

    #[test]
    fn missing_final_newline_round_trips() {
        let old = "a\nb";
        let new = "a\nb\nc";
        let p = diff_texts("f", old, new, 3);
        let text = p.to_unified();
        assert!(text.contains(NO_NEWLINE));
        let parsed = Patch::parse_unified(&text).unwrap();
        assert_eq!(parsed.hunks, p.hunks);
        assert_eq!(parsed.apply_to(old).unwrap(), new);
        assert_eq!(parsed.inverse().apply_to(new).unwrap(), old);
    }

    #[test]
    fn insertion_into_empty_text() {
        let p = diff_texts("f", "", "x\n", 3);
        let text = p.to_unified();
        assert!(text.contains("@@ -0,0 +1,1 @@"));
        assert_eq!(Patch::parse_unified(&text).unwrap().apply_to("").unwrap(), "x\n");
    }

    #[test]
    fn stale_context_is_rejected() {
        let old = "a\nb\nc\nd\n";
        let p = diff_texts("f", old, "a\nb\nC\nd\n", 3);
        let err = p.apply_to("a\nB\nc\nd\n").unwrap_err();
        assert!(matches!(err, PatchError::ContextMismatch { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(Patch::parse_unified("hello\n").is_err());
        assert!(Patch::parse_unified("--- f\n+++ f\n@@ -1,2 +1,2 @@\n a\n").is_err());
    }
}
