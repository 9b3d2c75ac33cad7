use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{
    ChildBehavior, Color, DeclTrivia, FontSpec, FontStyle, Modifier, ModifierKind, ModifierTrivia, NodeKind,
    NodeTrivia, SourceFile, UiNode, ViewDecl,
};
use super::lexer::{lex, Tok, Token};
use super::span::{LineIndex, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

const BUILTIN_KINDS: [&str; 8] = ["VStack", "HStack", "ZStack", "Text", "Image", "Button", "Toggle", "Spacer"];

pub fn is_builtin_kind(name: &str) -> bool {
    BUILTIN_KINDS.contains(&name)
}

/// Parses a MiniUI source file. On error no partial AST is returned.
pub fn parse_source(text: &str, path: &str) -> Result<SourceFile, SyntaxError> {
    let lines = LineIndex::new(text);
    let toks = lex(text).map_err(|e| SyntaxError { line: lines.line_of(e.at), message: e.message })?;
    let mut p = Parser { text, toks, pos: 0, lines, path };
    p.file()
}

/// Parses a head fragment such as `Text("hi")` or `VStack(spacing: 4)`.
pub(crate) fn parse_head_fragment(raw: &str) -> Option<NodeKind> {
    fragment(raw, |p| {
        let first = p.next_token("element")?;
        p.head(&first)
    })
}

/// Parses a modifier fragment such as `.font(size: 12)`.
pub(crate) fn parse_modifier_fragment(raw: &str) -> Option<ModifierKind> {
    fragment(raw, |p| {
        p.expect(Tok::Dot)?;
        p.modifier_body().map(|(kind, _)| kind)
    })
}

/// Parses a declaration header `view Name {` and returns the name.
pub(crate) fn parse_header_fragment(raw: &str) -> Option<String> {
    fragment(raw, |p| {
        p.keyword("view")?;
        let name = p.view_name()?;
        p.expect(Tok::LBrace)?;
        Ok(name)
    })
}

fn fragment<T>(raw: &str, f: impl FnOnce(&mut Parser<'_>) -> Result<T, SyntaxError>) -> Option<T> {
    let toks = lex(raw).ok()?;
    let mut p = Parser { text: raw, toks, pos: 0, lines: LineIndex::new(raw), path: "" };
    let value = f(&mut p).ok()?;
    p.at_end().then_some(value)
}

#[derive(Debug, Clone)]
enum Value {
    Str(String),
    Num(f64),
    Hex(Color),
    Ident(String),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Num(_) => "number",
            Value::Hex(_) => "color",
            Value::Ident(_) => "identifier",
        }
    }
}

#[derive(Debug, Clone)]
struct Arg {
    name: Option<String>,
    value: Value,
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    lines: LineIndex,
    path: &'a str,
}

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn cur_start(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |t| t.start)
    }

    fn error_at(&self, byte: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError { line: self.lines.line_of(byte), message: message.into() }
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        self.error_at(self.cur_start(), message)
    }

    fn next_token(&mut self, expected: &str) -> Result<Token, SyntaxError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(self.error_here(format!("unexpected end of input, expected {expected}"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        let expected = tok.describe();
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(t.clone())
            }
            Some(t) => Err(self.error_at(t.start, format!("expected {expected}, found {}", t.tok.describe()))),
            None => Err(self.error_here(format!("unexpected end of input, expected {expected}"))),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Token, SyntaxError> {
        let t = self.next_token(&format!("`{kw}`"))?;
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => Err(self.error_at(t.start, format!("expected `{kw}`, found {}", other.describe()))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), SyntaxError> {
        let t = self.next_token(what)?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t)),
            other => Err(self.error_at(t.start, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn view_name(&mut self) -> Result<String, SyntaxError> {
        let (name, t) = self.ident("view name")?;
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return Err(self.error_at(t.start, format!("view name `{name}` must start with an uppercase letter")));
        }
        if is_builtin_kind(&name) || name == "view" {
            return Err(self.error_at(t.start, format!("`{name}` is a reserved element kind")));
        }
        Ok(name)
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        SourceSpan {
            file: self.path.to_string(),
            start_byte: start,
            end_byte: end,
            start_line: self.lines.line_of(start),
            end_line: self.lines.line_of(end.saturating_sub(1).max(start)),
        }
    }

    fn raw(&self, start: usize, end: usize) -> String {
        self.text[start..end].to_string()
    }

    fn file(&mut self) -> Result<SourceFile, SyntaxError> {
        let mut decls = Vec::new();
        while !self.at_end() {
            decls.push(self.decl()?);
        }
        Ok(SourceFile {
            path: self.path.to_string(),
            text: self.text.to_string(),
            decls,
            trailing: self.raw(self.prev_end(), self.text.len()),
        })
    }

    fn decl(&mut self) -> Result<ViewDecl, SyntaxError> {
        let leading_from = self.prev_end();
        let kw = self.keyword("view")?;
        let name = self.view_name()?;
        let open = self.expect(Tok::LBrace)?;
        if self.peek() == Some(&Tok::RBrace) {
            return Err(self.error_here(format!("view `{name}` has an empty body")));
        }
        let body = self.node()?;
        let close = match self.peek() {
            Some(Tok::RBrace) => self.next_token("`}`")?,
            Some(_) => return Err(self.error_here(format!("view `{name}` must have a single root node"))),
            None => return Err(self.error_here(format!("unexpected end of input, expected `}}` closing `{name}`"))),
        };
        Ok(ViewDecl {
            name,
            span: self.span(kw.start, close.end),
            trivia: DeclTrivia {
                leading: Some(self.raw(leading_from, kw.start)),
                header: Some(self.raw(kw.start, open.end)),
                close: Some(self.raw(body.span.end_byte, close.end)),
            },
            body: Box::new(body),
        })
    }

    fn node(&mut self) -> Result<UiNode, SyntaxError> {
        let leading_from = self.prev_end();
        let first = self.next_token("element")?;
        let kind = self.head(&first)?;
        let head_end = self.prev_end();
        let mut trivia = NodeTrivia {
            leading: Some(self.raw(leading_from, first.start)),
            head: Some(self.raw(first.start, head_end)),
            open: None,
            close: None,
        };
        let mut children = Vec::new();
        let is_container = kind.tag().is_container();
        if is_container {
            let open = self.expect(Tok::LBrace).map_err(|_| {
                self.error_here(format!("{} requires a `{{ ... }}` body", kind.tag()))
            })?;
            trivia.open = Some(self.raw(head_end, open.end));
            while self.peek() != Some(&Tok::RBrace) {
                if self.at_end() {
                    return Err(self.error_here(format!("unexpected end of input inside {}", kind.tag())));
                }
                children.push(self.node()?);
            }
            let before_close = self.prev_end();
            let close = self.next_token("`}`")?;
            trivia.close = Some(self.raw(before_close, close.end));
        } else if self.peek() == Some(&Tok::LBrace) {
            return Err(self.error_here(format!("{} cannot have children", kind.tag())));
        }
        let mut modifiers = Vec::new();
        while self.peek() == Some(&Tok::Dot) {
            let leading_from = self.prev_end();
            let dot = self.next_token("`.`")?;
            let (mkind, _) = self.modifier_body()?;
            let end = self.prev_end();
            modifiers.push(Modifier {
                kind: mkind,
                span: self.span(dot.start, end),
                trivia: ModifierTrivia {
                    leading: Some(self.raw(leading_from, dot.start)),
                    raw: Some(self.raw(dot.start, end)),
                },
            });
        }
        Ok(UiNode {
            kind,
            modifiers,
            children,
            span: self.span(first.start, self.prev_end()),
            trivia,
        })
    }

    /// Kind name and literal arguments; `first` is the already consumed kind token.
    fn head(&mut self, first: &Token) -> Result<NodeKind, SyntaxError> {
        let name = match &first.tok {
            Tok::Ident(s) => s.clone(),
            other => return Err(self.error_at(first.start, format!("expected element, found {}", other.describe()))),
        };
        let at = first.start;
        match name.as_str() {
            "VStack" | "HStack" | "ZStack" => {
                let mut spacing = None;
                if self.peek() == Some(&Tok::LParen) {
                    let args = self.args()?;
                    for arg in args {
                        match (arg.name.as_deref(), arg.value) {
                            (Some("spacing"), Value::Num(n)) if spacing.is_none() => spacing = Some(n),
                            _ => return Err(self.error_at(at, format!("{name} accepts only `spacing: <number>`"))),
                        }
                    }
                }
                Ok(match name.as_str() {
                    "VStack" => NodeKind::VStack { spacing },
                    "HStack" => NodeKind::HStack { spacing },
                    _ => NodeKind::ZStack { spacing },
                })
            }
            "Text" | "Image" => {
                let args = self.args()?;
                match args.as_slice() {
                    [Arg { name: None, value: Value::Str(s) }] => Ok(if name == "Text" {
                        NodeKind::Text { content: s.clone() }
                    } else {
                        NodeKind::Image { name: s.clone() }
                    }),
                    _ => Err(self.error_at(at, format!("{name} takes exactly one string argument"))),
                }
            }
            "Button" | "Toggle" => {
                let args = self.args()?;
                match args.as_slice() {
                    [Arg { name: None, value: Value::Str(label) }, Arg { name: Some(key), value: Value::Ident(action) }]
                        if key == "action" =>
                    {
                        let (label, action) = (label.clone(), action.clone());
                        Ok(if name == "Button" {
                            NodeKind::Button { label, action }
                        } else {
                            NodeKind::Toggle { label, action }
                        })
                    }
                    _ => Err(self.error_at(at, format!("{name} expects (\"label\", action: name)"))),
                }
            }
            "Spacer" => {
                if self.peek() == Some(&Tok::LParen) {
                    self.expect(Tok::LParen)?;
                    self.expect(Tok::RParen).map_err(|_| self.error_at(at, "Spacer takes no arguments"))?;
                }
                Ok(NodeKind::Spacer)
            }
            _ if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
                if self.peek() != Some(&Tok::LParen) {
                    return Err(self.error_at(at, format!("unknown element kind `{name}`")));
                }
                self.expect(Tok::LParen)?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error_at(at, format!("unknown element kind `{name}`")));
                }
                self.expect(Tok::RParen)?;
                Ok(NodeKind::ViewRef { name })
            }
            _ => Err(self.error_at(at, format!("unknown element kind `{name}`"))),
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>, SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            let name = match (self.peek(), self.peek_at(1)) {
                (Some(Tok::Ident(n)), Some(Tok::Colon)) => {
                    let n = n.clone();
                    self.pos += 2;
                    Some(n)
                }
                _ => None,
            };
            let t = self.next_token("argument")?;
            let value = match t.tok {
                Tok::Str(s) => Value::Str(s),
                Tok::Num(n) => Value::Num(n),
                Tok::Hex(c) => Value::Hex(c),
                Tok::Ident(s) => Value::Ident(s),
                other => return Err(self.error_at(t.start, format!("expected argument, found {}", other.describe()))),
            };
            args.push(Arg { name, value });
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::RParen)?;
                return Ok(args);
            }
        }
    }

    /// `name(args)` after the dot.
    fn modifier_body(&mut self) -> Result<(ModifierKind, usize), SyntaxError> {
        let (name, t) = self.ident("modifier name")?;
        if !ModifierKind::NAMES.contains(&name.as_str()) {
            return Err(self.error_at(t.start, format!("unknown modifier `{name}`")));
        }
        let args = self.args()?;
        let kind = validate_modifier(&name, &args).map_err(|msg| self.error_at(t.start, msg))?;
        Ok((kind, t.start))
    }
}

/// Grammar table for modifier arguments.
fn validate_modifier(name: &str, args: &[Arg]) -> Result<ModifierKind, String> {
    let positional = |what: &str| -> Result<&Value, String> {
        match args {
            [Arg { name: None, value }] => Ok(value),
            _ => Err(format!("`{name}` takes exactly one {what} argument")),
        }
    };
    let named = |key: &str| args.iter().find(|a| a.name.as_deref() == Some(key)).map(|a| &a.value);
    let only_keys = |allowed: &[&str]| -> Result<(), String> {
        let mut seen: Vec<&str> = Vec::new();
        for a in args {
            let Some(k) = a.name.as_deref() else {
                return Err(format!("`{name}` arguments must be named"));
            };
            if !allowed.contains(&k) {
                return Err(format!("`{name}` has no argument `{k}`"));
            }
            if seen.contains(&k) {
                return Err(format!("duplicate argument `{k}` in `{name}`"));
            }
            seen.push(k);
        }
        Ok(())
    };
    let positive = |v: &Value, what: &str| -> Result<f64, String> {
        match v {
            Value::Num(n) if *n > 0.0 => Ok(*n),
            Value::Num(_) => Err(format!("`{what}` must be positive")),
            other => Err(format!("`{what}` expects a number, found {}", other.describe())),
        }
    };
    let style = |v: &Value| -> Result<FontStyle, String> {
        match v {
            Value::Ident(s) => FontStyle::from_name(s).ok_or_else(|| format!("unknown font style `{s}`")),
            other => Err(format!("font style expects a style name, found {}", other.describe())),
        }
    };
    let color = |v: &Value| -> Result<Color, String> {
        match v {
            Value::Hex(c) => Ok(*c),
            other => Err(format!("`{name}` expects a #RRGGBB color, found {}", other.describe())),
        }
    };
    let string = |v: &Value| -> Result<String, String> {
        match v {
            Value::Str(s) => Ok(s.clone()),
            other => Err(format!("`{name}` expects a string, found {}", other.describe())),
        }
    };

    match name {
        "font" => {
            only_keys(&["size", "style", "max"])?;
            match (named("size"), named("style"), named("max")) {
                (Some(size), None, None) => Ok(ModifierKind::Font(FontSpec::Fixed { size: positive(size, "size")? })),
                (None, Some(s), None) => Ok(ModifierKind::Font(FontSpec::Dynamic { style: style(s)? })),
                (None, Some(s), Some(max)) => Ok(ModifierKind::Font(FontSpec::Capped {
                    style: style(s)?,
                    max: positive(max, "max")?,
                })),
                (Some(_), Some(_), _) => Err("`font` arguments `size` and `style` are mutually exclusive".into()),
                _ => Err("`font` expects (size: N), (style: S) or (style: S, max: N)".into()),
            }
        }
        "color" => Ok(ModifierKind::Color(color(positional("color")?)?)),
        "background" => Ok(ModifierKind::Background(color(positional("color")?)?)),
        "frame" => {
            only_keys(&["width", "height"])?;
            let width = named("width").map(|v| positive(v, "width")).transpose()?;
            let height = named("height").map(|v| positive(v, "height")).transpose()?;
            if width.is_none() && height.is_none() {
                return Err("`frame` needs a width or a height".into());
            }
            Ok(ModifierKind::Frame { width, height })
        }
        "padding" => match positional("number")? {
            Value::Num(n) => Ok(ModifierKind::Padding(*n)),
            other => Err(format!("`padding` expects a number, found {}", other.describe())),
        },
        "lineLimit" => match positional("number")? {
            Value::Num(n) if *n >= 1.0 && libm::trunc(*n) == *n && *n <= u32::MAX as f64 => {
                Ok(ModifierKind::LineLimit(*n as u32))
            }
            _ => Err("`lineLimit` expects a positive integer".into()),
        },
        "minScaleFactor" => match positional("number")? {
            Value::Num(n) if *n > 0.0 && *n <= 1.0 => Ok(ModifierKind::MinScaleFactor(*n)),
            _ => Err("`minScaleFactor` expects a number in (0, 1]".into()),
        },
        "axLabel" => Ok(ModifierKind::AxLabel(string(positional("string")?)?)),
        "axIdentifier" => Ok(ModifierKind::AxIdentifier(string(positional("string")?)?)),
        "axElement" => {
            only_keys(&["children"])?;
            match named("children") {
                Some(Value::Ident(s)) => ChildBehavior::from_name(s)
                    .map(ModifierKind::AxElement)
                    .ok_or_else(|| format!("unknown child behavior `{s}`")),
                _ => Err("`axElement` expects (children: contain|combine|ignore)".into()),
            }
        }
        "axHidden" => match positional("boolean")? {
            Value::Ident(s) if s == "true" => Ok(ModifierKind::AxHidden(true)),
            Value::Ident(s) if s == "false" => Ok(ModifierKind::AxHidden(false)),
            _ => Err("`axHidden` expects true or false".into()),
        },
        _ => Err(format!("unknown modifier `{name}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::ElementKind;

    fn parse(text: &str) -> Result<SourceFile, SyntaxError> {
        parse_source(text, "t.minui")
    }

    #[test]
    fn minimal_program() {
        let f = parse("view A { Text(\"hi\") }").unwrap();
        assert_eq!(f.decls.len(), 1);
        assert_eq!(f.decls[0].name, "A");
        assert_eq!(f.decls[0].body.kind, NodeKind::Text { content: "hi".into() });
    }

    #[test]
    fn view_reference_child() {
        let f = parse("view P { VStack { ThemeView() } }").unwrap();
        let body = &f.decls[0].body;
        assert_eq!(body.tag(), ElementKind::VStack);
        assert_eq!(body.children.len(), 1);
        assert_eq!(body.children[0].kind, NodeKind::ViewRef { name: "ThemeView".into() });
    }

    #[test]
    fn font_arguments_are_exclusive() {
        let err = parse("view B { Text(\"x\").font(size: 12, style: body) }").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("mutually exclusive"), "{}", err.message);
    }

    /// Hand-written grammar table: every row is (source, accepted?).
    #[test]
    fn grammar_table() {
        let rows: &[(&str, bool)] = &[
            ("view A { Text(\"x\").font(size: 12) }", true),
            ("view A { Text(\"x\").font(style: body) }", true),
            ("view A { Text(\"x\").font(style: body, max: 19) }", true),
            ("view A { Text(\"x\").font(max: 19) }", false),
            ("view A { Text(\"x\").font(size: 12, max: 19) }", false),
            ("view A { Text(\"x\").font(style: huge) }", false),
            ("view A { Text(\"x\").font(size: 0) }", false),
            ("view A { Text(\"x\").color(#112233) }", true),
            ("view A { Text(\"x\").color(\"red\") }", false),
            ("view A { Text(\"x\").background(#FFFFFF) }", true),
            ("view A { Image(\"p\").frame(width: 44, height: 44) }", true),
            ("view A { Image(\"p\").frame(height: 44) }", true),
            ("view A { Image(\"p\").frame() }", false),
            ("view A { Image(\"p\").frame(depth: 3) }", false),
            ("view A { Text(\"x\").padding(8) }", true),
            ("view A { Text(\"x\").lineLimit(2) }", true),
            ("view A { Text(\"x\").lineLimit(0) }", false),
            ("view A { Text(\"x\").lineLimit(1.5) }", false),
            ("view A { Text(\"x\").minScaleFactor(0.5) }", true),
            ("view A { Text(\"x\").minScaleFactor(2) }", false),
            ("view A { Image(\"p\").axLabel(\"Pin\") }", true),
            ("view A { Image(\"p\").axIdentifier(\"hero\") }", true),
            ("view A { VStack { }.axElement(children: contain) }", true),
            ("view A { VStack { }.axElement(children: merge) }", false),
            ("view A { Text(\"x\").axHidden(true) }", true),
            ("view A { Text(\"x\").axHidden(1) }", false),
            ("view A { Text(\"x\").blur(3) }", false),
            ("view A { Button(\"Go\", action: go) }", true),
            ("view A { Toggle(\"Wifi\", action: wifi) }", true),
            ("view A { Button(\"Go\") }", false),
            ("view A { Spacer }", true),
            ("view A { Spacer() }", true),
            ("view A { HStack(spacing: 4) { Spacer() } }", true),
            ("view A { HStack(gap: 4) { } }", false),
            ("view A { VStack }", false),
            ("view A { Text(\"x\") { } }", false),
            ("view A { Slider(\"x\") }", false),
            ("view A { text(\"x\") }", false),
            ("view A { Text(\"x\") Text(\"y\") }", false),
            ("view A { }", false),
            ("view a { Text(\"x\") }", false),
            ("view Text { Text(\"x\") }", false),
            ("view A { Text(\"x\")", false),
        ];
        for (src, ok) in rows {
            assert_eq!(parse(src).is_ok(), *ok, "{src}: {:?}", parse(src).err());
        }
    }

    #[test]
    fn spans_nest_and_lines_are_one_based() {
        let text = "view A {\n  VStack {\n    Text(\"a\")\n      .padding(2)\n    Image(\"b\")\n  }\n}\n";
        let f = parse(text).unwrap();
        let decl = &f.decls[0];
        assert_eq!((decl.span.start_line, decl.span.end_line), (1, 7));
        let stack = &decl.body;
        assert_eq!((stack.span.start_line, stack.span.end_line), (2, 6));
        let t = &stack.children[0];
        assert_eq!(t.span.slice(text), "Text(\"a\")\n      .padding(2)");
        assert_eq!((t.span.start_line, t.span.end_line), (3, 4));
        assert!(stack.span.contains(&t.span));
        assert!(!t.span.overlaps(&stack.children[1].span));
    }

    #[test]
    fn error_reports_line() {
        let err = parse("view A {\n  VStack {\n    Text(\"a\").glow(1)\n  }\n}").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("unknown modifier"));
    }

    #[test]
    fn fragments() {
        assert_eq!(parse_head_fragment("Text( \"a\" )"), Some(NodeKind::Text { content: "a".into() }));
        assert_eq!(parse_head_fragment("Text(\"a\") x"), None);
        assert_eq!(parse_modifier_fragment(".padding( 3 )"), Some(ModifierKind::Padding(3.0)));
        assert_eq!(parse_header_fragment("view  Foo\n{"), Some("Foo".into()));
    }
}
