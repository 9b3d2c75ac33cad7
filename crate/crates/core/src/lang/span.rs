use alloc::string::String;
use serde::{Deserialize, Serialize};

/// Byte and line range of a syntax element inside one source file.
///
/// Byte offsets are half-open (`start_byte..end_byte`); lines are 1-based and
/// inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceSpan {
    pub file: String,
    pub start_byte: usize,
    pub end_byte: usize,
    pub start_line: usize,
    pub end_line: usize,
}

impl SourceSpan {
    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.file == other.file
            && self.start_byte <= other.start_byte
            && other.end_byte <= self.end_byte
    }

    pub fn overlaps(&self, other: &SourceSpan) -> bool {
        self.file == other.file
            && self.start_byte < other.end_byte
            && other.start_byte < self.end_byte
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start_byte..self.end_byte]
    }
}

/// Maps byte offsets to 1-based line numbers.
#[derive(Debug, Clone)]
pub(crate) struct LineIndex {
    starts: alloc::vec::Vec<usize>,
}

impl LineIndex {
    pub(crate) fn new(text: &str) -> Self {
        let mut starts = alloc::vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub(crate) fn line_of(&self, byte: usize) -> usize {
        match self.starts.binary_search(&byte) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }
}
