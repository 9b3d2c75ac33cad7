use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::span::SourceSpan;

/// An opaque sRGB color written as `#RRGGBB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const BLACK: Color = Color::rgb(0, 0, 0);
    pub const WHITE: Color = Color::rgb(255, 255, 255);

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Color { r, g, b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad color literal `{0}`: expected #RRGGBB")]
pub struct BadColor(pub String);

impl FromStr for Color {
    type Err = BadColor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadColor(String::from(s));
        let hex = s.strip_prefix('#').ok_or_else(bad)?;
        if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(bad());
        }
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(Color::rgb(channel(0)?, channel(2)?, channel(4)?))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Named text styles whose size follows the content size category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FontStyle {
    Caption,
    Body,
    Headline,
}

impl FontStyle {
    pub const ALL: [FontStyle; 3] = [FontStyle::Caption, FontStyle::Body, FontStyle::Headline];

    /// Point size at the default (`L`) category.
    pub fn base_size(self) -> f64 {
        match self {
            FontStyle::Caption => 12.0,
            FontStyle::Body => 17.0,
            FontStyle::Headline => 20.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FontStyle::Caption => "caption",
            FontStyle::Body => "body",
            FontStyle::Headline => "headline",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        FontStyle::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Style whose base size is closest to `pt`; ties go to the smaller style.
    pub fn nearest(pt: f64) -> Self {
        let mut best = FontStyle::Caption;
        for style in FontStyle::ALL {
            if (style.base_size() - pt).abs() < (best.base_size() - pt).abs() {
                best = style;
            }
        }
        best
    }
}

/// The three shapes a `font` modifier can take.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "type")]
pub enum FontSpec {
    /// `font(size: N)`, never scales.
    Fixed { size: f64 },
    /// `font(style: S)`, scales with every category.
    Dynamic { style: FontStyle },
    /// `font(style: S, max: M)`, scales until it reaches the cap.
    Capped { style: FontStyle, max: f64 },
}

impl Default for FontSpec {
    fn default() -> Self {
        FontSpec::Dynamic {
            style: FontStyle::Body,
        }
    }
}

/// How an accessibility container exposes its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ChildBehavior {
    Contain,
    Combine,
    Ignore,
}

impl ChildBehavior {
    pub fn name(self) -> &'static str {
        match self {
            ChildBehavior::Contain => "contain",
            ChildBehavior::Combine => "combine",
            ChildBehavior::Ignore => "ignore",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "contain" => Some(ChildBehavior::Contain),
            "combine" => Some(ChildBehavior::Combine),
            "ignore" => Some(ChildBehavior::Ignore),
            _ => None,
        }
    }
}

/// A modifier together with its validated arguments.
#[derive(Debug, Clone, PartialEq)]
pub enum ModifierKind {
    Font(FontSpec),
    Color(Color),
    Background(Color),
    Frame {
        width: Option<f64>,
        height: Option<f64>,
    },
    Padding(f64),
    LineLimit(u32),
    MinScaleFactor(f64),
    AxLabel(String),
    AxIdentifier(String),
    AxElement(ChildBehavior),
    AxHidden(bool),
}

impl ModifierKind {
    pub const NAMES: [&'static str; 11] = [
        "font",
        "color",
        "background",
        "frame",
        "padding",
        "lineLimit",
        "minScaleFactor",
        "axLabel",
        "axIdentifier",
        "axElement",
        "axHidden",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModifierKind::Font(_) => "font",
            ModifierKind::Color(_) => "color",
            ModifierKind::Background(_) => "background",
            ModifierKind::Frame { .. } => "frame",
            ModifierKind::Padding(_) => "padding",
            ModifierKind::LineLimit(_) => "lineLimit",
            ModifierKind::MinScaleFactor(_) => "minScaleFactor",
            ModifierKind::AxLabel(_) => "axLabel",
            ModifierKind::AxIdentifier(_) => "axIdentifier",
            ModifierKind::AxElement(_) => "axElement",
            ModifierKind::AxHidden(_) => "axHidden",
        }
    }
}

/// Raw source pieces captured by the parser so printing is lossless.
///
/// `None` marks a synthetic piece; the printer then emits canonical text.
#[derive(Debug, Clone, Default)]
pub struct ModifierTrivia {
    pub leading: Option<String>,
    pub raw: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Modifier {
    pub kind: ModifierKind,
    pub span: SourceSpan,
    pub trivia: ModifierTrivia,
}

impl Modifier {
    pub fn new(kind: ModifierKind) -> Self {
        Modifier {
            kind,
            span: SourceSpan::default(),
            trivia: ModifierTrivia::default(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

/// Modifiers compare by meaning only; spans and trivia are ignored.
impl PartialEq for Modifier {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

/// Argument-free element kind tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    VStack,
    HStack,
    ZStack,
    Text,
    Image,
    Button,
    Toggle,
    Spacer,
    ViewRef,
}

impl ElementKind {
    pub fn is_container(self) -> bool {
        matches!(self, ElementKind::VStack | ElementKind::HStack | ElementKind::ZStack)
    }

    pub fn is_interactive(self) -> bool {
        matches!(self, ElementKind::Button | ElementKind::Toggle)
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::VStack => "VStack",
            ElementKind::HStack => "HStack",
            ElementKind::ZStack => "ZStack",
            ElementKind::Text => "Text",
            ElementKind::Image => "Image",
            ElementKind::Button => "Button",
            ElementKind::Toggle => "Toggle",
            ElementKind::Spacer => "Spacer",
            ElementKind::ViewRef => "ViewRef",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Element kind with its literal arguments.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    VStack { spacing: Option<f64> },
    HStack { spacing: Option<f64> },
    ZStack { spacing: Option<f64> },
    Text { content: String },
    Image { name: String },
    Button { label: String, action: String },
    Toggle { label: String, action: String },
    Spacer,
    ViewRef { name: String },
}

impl NodeKind {
    pub fn tag(&self) -> ElementKind {
        match self {
            NodeKind::VStack { .. } => ElementKind::VStack,
            NodeKind::HStack { .. } => ElementKind::HStack,
            NodeKind::ZStack { .. } => ElementKind::ZStack,
            NodeKind::Text { .. } => ElementKind::Text,
            NodeKind::Image { .. } => ElementKind::Image,
            NodeKind::Button { .. } => ElementKind::Button,
            NodeKind::Toggle { .. } => ElementKind::Toggle,
            NodeKind::Spacer => ElementKind::Spacer,
            NodeKind::ViewRef { .. } => ElementKind::ViewRef,
        }
    }

    pub fn spacing(&self) -> Option<f64> {
        match self {
            NodeKind::VStack { spacing } | NodeKind::HStack { spacing } | NodeKind::ZStack { spacing } => {
                *spacing
            }
            _ => None,
        }
    }

    /// Visible text carried by the element itself.
    pub fn text(&self) -> Option<&str> {
        match self {
            NodeKind::Text { content } => Some(content),
            NodeKind::Button { label, .. } | NodeKind::Toggle { label, .. } => Some(label),
            _ => None,
        }
    }

    pub fn action(&self) -> Option<&str> {
        match self {
            NodeKind::Button { action, .. } | NodeKind::Toggle { action, .. } => Some(action),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct NodeTrivia {
    /// Whitespace and comments before the node.
    pub leading: Option<String>,
    /// Kind and arguments as written, e.g. `Text( "hi" )`.
    pub head: Option<String>,
    /// Text between the head and the first child, including `{`.
    pub open: Option<String>,
    /// Text after the last child, including `}`.
    pub close: Option<String>,
}

#[derive(Debug, Clone)]
pub struct UiNode {
    pub kind: NodeKind,
    pub modifiers: Vec<Modifier>,
    pub children: Vec<UiNode>,
    pub span: SourceSpan,
    pub trivia: NodeTrivia,
}

/// Structural equality: kinds, arguments, modifiers and children.
impl PartialEq for UiNode {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.modifiers == other.modifiers && self.children == other.children
    }
}

impl UiNode {
    pub fn new(kind: NodeKind) -> Self {
        UiNode {
            kind,
            modifiers: Vec::new(),
            children: Vec::new(),
            span: SourceSpan::default(),
            trivia: NodeTrivia::default(),
        }
    }

    pub fn with_children(mut self, children: Vec<UiNode>) -> Self {
        self.children = children;
        self
    }

    pub fn with_modifier(mut self, kind: ModifierKind) -> Self {
        self.modifiers.push(Modifier::new(kind));
        self
    }

    pub fn tag(&self) -> ElementKind {
        self.kind.tag()
    }

    /// First modifier with the given name. When a modifier is repeated the
    /// one closest to the element wins.
    pub fn modifier(&self, name: &str) -> Option<&ModifierKind> {
        self.modifiers.iter().map(|m| &m.kind).find(|k| k.name() == name)
    }

    pub fn has_modifier(&self, name: &str) -> bool {
        self.modifier(name).is_some()
    }

    pub fn remove_modifiers(&mut self, name: &str) -> usize {
        let before = self.modifiers.len();
        self.modifiers.retain(|m| m.name() != name);
        before - self.modifiers.len()
    }

    /// Replaces the first modifier with the same name, or appends.
    pub fn set_modifier(&mut self, kind: ModifierKind) {
        match self.modifiers.iter_mut().find(|m| m.name() == kind.name()) {
            Some(existing) => existing.kind = kind,
            None => self.modifiers.push(Modifier::new(kind)),
        }
    }

    pub fn identifier(&self) -> Option<&str> {
        match self.modifier("axIdentifier") {
            Some(ModifierKind::AxIdentifier(id)) => Some(id),
            _ => None,
        }
    }

    pub fn ax_label(&self) -> Option<&str> {
        match self.modifier("axLabel") {
            Some(ModifierKind::AxLabel(label)) => Some(label),
            _ => None,
        }
    }

    /// Pre-order traversal of this node and its lexical descendants.
    pub fn walk(&self) -> Walk<'_> {
        Walk { stack: alloc::vec![self] }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut UiNode)) {
        f(self);
        for child in &mut self.children {
            child.walk_mut(f);
        }
    }

    pub fn find_by_identifier(&self, id: &str) -> Option<&UiNode> {
        self.walk().find(|n| n.identifier() == Some(id))
    }

    pub fn find_by_identifier_mut(&mut self, id: &str) -> Option<&mut UiNode> {
        if self.identifier() == Some(id) {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_by_identifier_mut(id))
    }

    /// Parent of the node carrying `id`, together with the child's index.
    pub fn parent_of_identifier_mut(&mut self, id: &str) -> Option<(&mut UiNode, usize)> {
        let idx = self.children.iter().position(|c| c.identifier() == Some(id));
        match idx {
            Some(i) => Some((self, i)),
            None => self.children.iter_mut().find_map(|c| c.parent_of_identifier_mut(id)),
        }
    }
}

pub struct Walk<'a> {
    stack: Vec<&'a UiNode>,
}

impl<'a> Iterator for Walk<'a> {
    type Item = &'a UiNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

#[derive(Debug, Clone, Default)]
pub struct DeclTrivia {
    pub leading: Option<String>,
    /// `view Name {` as written.
    pub header: Option<String>,
    /// Text after the body, including the closing `}`.
    pub close: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ViewDecl {
    pub name: String,
    pub body: Box<UiNode>,
    pub span: SourceSpan,
    pub trivia: DeclTrivia,
}

impl PartialEq for ViewDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.body == other.body
    }
}

impl ViewDecl {
    pub fn new(name: impl Into<String>, body: UiNode) -> Self {
        ViewDecl {
            name: name.into(),
            body: Box::new(body),
            span: SourceSpan::default(),
            trivia: DeclTrivia::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SourceFile {
    pub path: String,
    /// The text this file was parsed from.
    pub text: String,
    pub decls: Vec<ViewDecl>,
    /// Whitespace and comments after the last declaration.
    pub trailing: String,
}

impl PartialEq for SourceFile {
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path && self.decls == other.decls
    }
}

impl SourceFile {
    pub fn decl(&self, name: &str) -> Option<&ViewDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn decl_mut(&mut self, name: &str) -> Option<&mut ViewDecl> {
        self.decls.iter_mut().find(|d| d.name == name)
    }
}

pub(crate) fn format_number(value: f64) -> String {
    if libm::trunc(value) == value && libm::fabs(value) < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{}", value)
    }
}
