use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::Color;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Hex(Color),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("`{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Num(_) => "number".to_string(),
            Tok::Hex(_) => "color literal".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Dot => "`.`".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

/// Byte offset and message of a lexical error.
#[derive(Debug)]
pub(crate) struct LexError {
    pub at: usize,
    pub message: String,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |tok| Some(tok);
        let punct = match c {
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b'{' => single(Tok::LBrace),
            b'}' => single(Tok::RBrace),
            b',' => single(Tok::Comma),
            b':' => single(Tok::Colon),
            b'.' => single(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = punct {
            toks.push(Token { tok, start, end: i + 1 });
            i += 1;
            continue;
        }
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'"' => {
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(ch) = text[i..].chars().next() else {
                        return Err(LexError { at: start, message: "unterminated string literal".into() });
                    };
                    match ch {
                        '"' => {
                            i += 1;
                            break;
                        }
                        '\n' => {
                            return Err(LexError { at: start, message: "unterminated string literal".into() })
                        }
                        '\\' => {
                            let esc = text[i + 1..].chars().next();
                            let decoded = match esc {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    return Err(LexError { at: i, message: "unknown escape sequence".into() })
                                }
                            };
                            value.push(decoded);
                            i += 2;
                        }
                        other => {
                            value.push(other);
                            i += other.len_utf8();
                        }
                    }
                }
                toks.push(Token { tok: Tok::Str(value), start, end: i });
            }
            b'#' => {
                let end = i + 7;
                let lit = text.get(i..end).unwrap_or("");
                let color = lit.parse::<Color>().map_err(|e| LexError { at: start, message: e.to_string() })?;
                if bytes.get(end).is_some_and(|b| b.is_ascii_alphanumeric()) {
                    return Err(LexError { at: start, message: "color literal must have exactly six hex digits".into() });
                }
                toks.push(Token { tok: Tok::Hex(color), start, end });
                i = end;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let value: f64 = text[start..i]
                    .parse()
                    .map_err(|_| LexError { at: start, message: "malformed number".into() })?;
                toks.push(Token { tok: Tok::Num(value), start, end: i });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Token { tok: Tok::Ident(text[start..i].to_string()), start, end: i });
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(LexError { at: start, message: alloc::format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(toks)
}
