//! The MiniUI language: lossless parsing, printing and line patches.

mod ast;
mod diff;
mod lexer;
mod parser;
mod printer;
mod project;
mod span;

pub use ast::{
    BadColor, ChildBehavior, Color, DeclTrivia, ElementKind, FontSpec, FontStyle, Modifier, ModifierKind,
    ModifierTrivia, NodeKind, NodeTrivia, SourceFile, UiNode, ViewDecl, Walk,
};
pub use diff::{diff_texts, Hunk, HunkLine, Patch, PatchError, DEFAULT_CONTEXT};
pub use parser::{is_builtin_kind, parse_source, SyntaxError};
pub use printer::{modifier_text, print_decl, print_node, print_source};
pub use project::{compute_patch, Project, ProjectError, SnippetError};
pub use span::SourceSpan;

