use alloc::string::String;

use super::ast::{format_number, FontSpec, ModifierKind, NodeKind, SourceFile, UiNode, ViewDecl};
use super::parser::{parse_head_fragment, parse_header_fragment, parse_modifier_fragment};

const INDENT: &str = "    ";

/// Prints a file. Pieces that still carry their original text are emitted
/// verbatim; edited or synthetic pieces are printed canonically.
pub fn print_source(file: &SourceFile) -> String {
    let mut out = String::with_capacity(file.text.len());
    for (i, decl) in file.decls.iter().enumerate() {
        match &decl.trivia.leading {
            Some(lead) => out.push_str(lead),
            None if i > 0 => out.push_str("\n\n"),
            None => {}
        }
        write_decl(&mut out, decl);
    }
    out.push_str(&file.trailing);
    out
}

/// Prints one declaration, from `view` through the closing brace.
pub fn print_decl(decl: &ViewDecl) -> String {
    let mut out = String::new();
    write_decl(&mut out, decl);
    out
}

/// Prints a node without its leading trivia.
pub fn print_node(node: &UiNode, depth: usize) -> String {
    let mut out = String::new();
    write_node(&mut out, node, depth);
    out
}

fn write_decl(out: &mut String, decl: &ViewDecl) {
    match &decl.trivia.header {
        Some(raw) if parse_header_fragment(raw).as_deref() == Some(decl.name.as_str()) => out.push_str(raw),
        _ => {
            out.push_str("view ");
            out.push_str(&decl.name);
            out.push_str(" {");
        }
    }
    write_leading(out, &decl.body, 1);
    write_node(out, &decl.body, 1);
    match &decl.trivia.close {
        Some(raw) => out.push_str(raw),
        None => out.push_str("\n}"),
    }
}

fn write_leading(out: &mut String, node: &UiNode, depth: usize) {
    match &node.trivia.leading {
        Some(lead) => out.push_str(lead),
        None => {
            out.push('\n');
            for _ in 0..depth {
                out.push_str(INDENT);
            }
        }
    }
}

fn write_node(out: &mut String, node: &UiNode, depth: usize) {
    match &node.trivia.head {
        Some(raw) if parse_head_fragment(raw).as_ref() == Some(&node.kind) => out.push_str(raw),
        _ => write_head(out, &node.kind),
    }
    if node.tag().is_container() {
        match &node.trivia.open {
            Some(raw) => out.push_str(raw),
            None => out.push_str(" {"),
        }
        for child in &node.children {
            write_leading(out, child, depth + 1);
            write_node(out, child, depth + 1);
        }
        match &node.trivia.close {
            Some(raw) => out.push_str(raw),
            None if node.children.is_empty() => out.push('}'),
            None => {
                out.push('\n');
                for _ in 0..depth {
                    out.push_str(INDENT);
                }
                out.push('}');
            }
        }
    }
    for m in &node.modifiers {
        if let Some(lead) = &m.trivia.leading {
            out.push_str(lead);
        }
        match &m.trivia.raw {
            Some(raw) if parse_modifier_fragment(raw).as_ref() == Some(&m.kind) => out.push_str(raw),
            _ => write_modifier(out, &m.kind),
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_head(out: &mut String, kind: &NodeKind) {
    match kind {
        NodeKind::VStack { spacing } | NodeKind::HStack { spacing } | NodeKind::ZStack { spacing } => {
            out.push_str(kind.tag().name());
            if let Some(s) = spacing {
                out.push_str("(spacing: ");
                out.push_str(&format_number(*s));
                out.push(')');
            }
        }
        NodeKind::Text { content } => {
            out.push_str("Text(");
            out.push_str(&quote(content));
            out.push(')');
        }
        NodeKind::Image { name } => {
            out.push_str("Image(");
            out.push_str(&quote(name));
            out.push(')');
        }
        NodeKind::Button { label, action } | NodeKind::Toggle { label, action } => {
            out.push_str(kind.tag().name());
            out.push('(');
            out.push_str(&quote(label));
            out.push_str(", action: ");
            out.push_str(action);
            out.push(')');
        }
        NodeKind::Spacer => out.push_str("Spacer()"),
        NodeKind::ViewRef { name } => {
            out.push_str(name);
            out.push_str("()");
        }
    }
}

/// Canonical text for a modifier, including the leading dot.
pub fn modifier_text(kind: &ModifierKind) -> String {
    let mut out = String::new();
    write_modifier(&mut out, kind);
    out
}

fn write_modifier(out: &mut String, kind: &ModifierKind) {
    out.push('.');
    out.push_str(kind.name());
    out.push('(');
    match kind {
        ModifierKind::Font(FontSpec::Fixed { size }) => {
            out.push_str("size: ");
            out.push_str(&format_number(*size));
        }
        ModifierKind::Font(FontSpec::Dynamic { style }) => {
            out.push_str("style: ");
            out.push_str(style.name());
        }
        ModifierKind::Font(FontSpec::Capped { style, max }) => {
            out.push_str("style: ");
            out.push_str(style.name());
            out.push_str(", max: ");
            out.push_str(&format_number(*max));
        }
        ModifierKind::Color(c) | ModifierKind::Background(c) => out.push_str(&alloc::format!("{c}")),
        ModifierKind::Frame { width, height } => {
            let mut parts = alloc::vec::Vec::new();
            if let Some(w) = width {
                parts.push(alloc::format!("width: {}", format_number(*w)));
            }
            if let Some(h) = height {
                parts.push(alloc::format!("height: {}", format_number(*h)));
            }
            out.push_str(&parts.join(", "));
        }
        ModifierKind::Padding(n) | ModifierKind::MinScaleFactor(n) => out.push_str(&format_number(*n)),
        ModifierKind::LineLimit(n) => out.push_str(&alloc::format!("{n}")),
        ModifierKind::AxLabel(s) | ModifierKind::AxIdentifier(s) => out.push_str(&quote(s)),
        ModifierKind::AxElement(b) => {
            out.push_str("children: ");
            out.push_str(b.name());
        }
        ModifierKind::AxHidden(b) => out.push_str(if *b { "true" } else { "false" }),
    }
    out.push(')');
}
