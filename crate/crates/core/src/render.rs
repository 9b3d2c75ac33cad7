//! Deterministic layout: the machine-readable stand-in for a screenshot.
//!
//! Text uses character-cell metrics: every character is `0.6 × size` wide
//! and a line is `1.2 × size` tall.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::hierarchy::{ensure_instrumented, expand, ElementId, Expanded, HierarchyError};
use crate::lang::{ChildBehavior, Color, ElementKind, FontSpec, ModifierKind, NodeKind, Project};

pub const CHAR_WIDTH_FACTOR: f64 = 0.6;
pub const LINE_HEIGHT_FACTOR: f64 = 1.2;
pub const DEFAULT_STACK_SPACING: f64 = 8.0;
pub const CONTROL_PADDING_H: f64 = 12.0;
pub const CONTROL_PADDING_V: f64 = 4.0;
pub const IMAGE_SIZE: f64 = 24.0;

const EPS: f64 = 1e-9;

/// User text-size preference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContentSizeCategory {
    XS,
    S,
    M,
    #[default]
    L,
    XL,
    XXL,
    XXXL,
}

impl ContentSizeCategory {
    pub const ALL: [ContentSizeCategory; 7] = [
        ContentSizeCategory::XS,
        ContentSizeCategory::S,
        ContentSizeCategory::M,
        ContentSizeCategory::L,
        ContentSizeCategory::XL,
        ContentSizeCategory::XXL,
        ContentSizeCategory::XXXL,
    ];

    pub fn multiplier(self) -> f64 {
        match self {
            ContentSizeCategory::XS => 0.82,
            ContentSizeCategory::S => 0.88,
            ContentSizeCategory::M => 0.94,
            ContentSizeCategory::L => 1.00,
            ContentSizeCategory::XL => 1.12,
            ContentSizeCategory::XXL => 1.24,
            ContentSizeCategory::XXXL => 1.35,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeviceConfig {
    pub screen_width: f64,
    pub screen_height: f64,
    #[serde(default)]
    pub category: ContentSizeCategory,
}

impl DeviceConfig {
    /// 390 × 844 pt at the default category.
    pub const IPHONE_12: DeviceConfig =
        DeviceConfig { screen_width: 390.0, screen_height: 844.0, category: ContentSizeCategory::L };

    pub fn is_valid(&self) -> bool {
        self.screen_width > 0.0 && self.screen_height > 0.0
    }
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig::IPHONE_12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextSize {
    pub w: f64,
    pub h: f64,
}

/// Single-line size of `content` at `font_pt`.
pub fn text_metrics(content: &str, font_pt: f64) -> TextSize {
    let chars = content.chars().count() as f64;
    TextSize { w: CHAR_WIDTH_FACTOR * font_pt * chars, h: LINE_HEIGHT_FACTOR * font_pt }
}

/// Size when wrapped at `available_width`; `None` if not even one character
/// fits on a line.
pub fn wrapped_text_metrics(content: &str, font_pt: f64, available_width: f64) -> Option<(TextSize, usize)> {
    let single = text_metrics(content, font_pt);
    if single.w <= available_width + EPS {
        return Some((single, 1));
    }
    let cell = CHAR_WIDTH_FACTOR * font_pt;
    let per_line = libm::floor((available_width + EPS) / cell) as usize;
    if per_line == 0 {
        return None;
    }
    let chars = content.chars().count();
    let lines = chars.div_ceil(per_line);
    Some((TextSize { w: per_line as f64 * cell, h: LINE_HEIGHT_FACTOR * font_pt * lines as f64 }, lines))
}

/// Nominal point size of a font under a content size category.
pub fn effective_font_size(font: &FontSpec, category: ContentSizeCategory) -> f64 {
    match *font {
        FontSpec::Fixed { size } => size,
        FontSpec::Dynamic { style } => style.base_size() * category.multiplier(),
        FontSpec::Capped { style, max } => (style.base_size() * category.multiplier()).min(max),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderedElement {
    pub id: ElementId,
    pub kind: ElementKind,
    pub frame: Rect,
    pub text: Option<String>,
    /// Point size actually used, after any `minScaleFactor` shrinking.
    pub effective_font_pt: Option<f64>,
    /// Resolved (possibly inherited) font of text-bearing elements.
    pub font: Option<FontSpec>,
    pub fg_color: Color,
    pub bg_color: Color,
    pub interactive: bool,
    pub action: Option<String>,
    pub ax_label: Option<String>,
    pub exposed: bool,
    pub clipped: bool,
    pub parent: Option<ElementId>,
    pub depth: usize,
}

impl RenderedElement {
    pub fn is_text_bearing(&self) -> bool {
        self.text.as_deref().is_some_and(|t| !t.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderedScene {
    pub device: DeviceConfig,
    pub root_view: String,
    pub elements: Vec<RenderedElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlight: Option<ElementId>,
}

impl RenderedScene {
    pub fn element(&self, id: &ElementId) -> Option<&RenderedElement> {
        self.elements.iter().find(|e| &e.id == id)
    }

    pub fn position(&self, id: &ElementId) -> Option<usize> {
        self.elements.iter().position(|e| &e.id == id)
    }

    pub fn with_highlight(mut self, id: Option<ElementId>) -> Self {
        self.highlight = id;
        self
    }

    pub fn children_of(&self, id: &ElementId) -> impl Iterator<Item = &RenderedElement> {
        let id = id.clone();
        self.elements.iter().filter(move |e| e.parent.as_ref() == Some(&id))
    }
}

/// Lays out the screen rooted at `root_view` for `device`.
pub fn resolve_screen(project: &Project, root_view: &str, device: DeviceConfig) -> Result<RenderedScene, HierarchyError> {
    let project = ensure_instrumented(project);
    let tree = expand(&project, root_view)?;
    let env = Env { font: FontSpec::default(), fg: Color::BLACK, bg: Color::WHITE, hidden: false };
    let ctx = Layout { category: device.category };
    let placed = ctx.layout(&tree, &env, device.screen_width, None, 0);
    Ok(RenderedScene { device, root_view: root_view.into(), elements: placed.elements, highlight: None })
}

/// Inherited rendering state.
#[derive(Debug, Clone)]
struct Env {
    font: FontSpec,
    fg: Color,
    bg: Color,
    hidden: bool,
}

struct Placed {
    w: f64,
    h: f64,
    /// Frames relative to this node's top-left corner.
    elements: Vec<RenderedElement>,
}

impl Placed {
    fn translated(mut self, dx: f64, dy: f64) -> Self {
        for e in &mut self.elements {
            e.frame.x += dx;
            e.frame.y += dy;
        }
        self
    }
}

struct TextFit {
    w: f64,
    h: f64,
    font_pt: f64,
    clipped: bool,
}

struct Layout {
    category: ContentSizeCategory,
}

impl Layout {
    fn fit_text(
        &self,
        content: &str,
        font: &FontSpec,
        avail_w: f64,
        avail_h: Option<f64>,
        line_limit: u32,
        min_scale: f64,
    ) -> TextFit {
        let nominal = effective_font_size(font, self.category);
        let fits = |pt: f64| -> Option<TextSize> {
            let (size, lines) = wrapped_text_metrics(content, pt, avail_w)?;
            if lines > line_limit as usize {
                return None;
            }
            match avail_h {
                Some(h) if size.h > h + EPS => None,
                _ => Some(size),
            }
        };
        if let Some(size) = fits(nominal) {
            return TextFit { w: size.w, h: size.h, font_pt: nominal, clipped: false };
        }
        let smallest = nominal * min_scale;
        if min_scale < 1.0 {
            if let Some(size) = fits(smallest) {
                // Largest size that still fits.
                let (mut lo, mut hi, mut best) = (smallest, nominal, (smallest, size));
                for _ in 0..48 {
                    let mid = (lo + hi) / 2.0;
                    match fits(mid) {
                        Some(s) => {
                            best = (mid, s);
                            lo = mid;
                        }
                        None => hi = mid,
                    }
                }
                return TextFit { w: best.1.w, h: best.1.h, font_pt: best.0, clipped: false };
            }
        }
        let single = text_metrics(content, smallest);
        let lines = line_limit.max(1) as f64;
        TextFit {
            w: single.w.min(avail_w.max(0.0)),
            h: avail_h.unwrap_or(LINE_HEIGHT_FACTOR * smallest * lines),
            font_pt: smallest,
            clipped: true,
        }
    }

    fn layout(
        &self,
        e: &Expanded<'_>,
        inherited: &Env,
        proposed_w: f64,
        parent: Option<&ElementId>,
        depth: usize,
    ) -> Placed {
        let node = e.node;
        let mut env = inherited.clone();
        let mut padding = 0.0;
        let (mut fixed_w, mut fixed_h) = (None, None);
        let mut line_limit = 1u32;
        let mut min_scale = 1.0;
        let mut children_hidden = false;
        let mut seen: Vec<&str> = Vec::new();
        for m in &node.modifiers {
            // The modifier closest to the element wins.
            if seen.contains(&m.name()) {
                continue;
            }
            seen.push(m.name());
            match &m.kind {
                ModifierKind::Font(font) => env.font = *font,
                ModifierKind::Color(c) => env.fg = *c,
                ModifierKind::Background(c) => env.bg = *c,
                ModifierKind::Frame { width, height } => {
                    fixed_w = *width;
                    fixed_h = *height;
                }
                ModifierKind::Padding(p) => padding = *p,
                ModifierKind::LineLimit(n) => line_limit = *n,
                ModifierKind::MinScaleFactor(f) => min_scale = *f,
                ModifierKind::AxHidden(true) => env.hidden = true,
                ModifierKind::AxElement(ChildBehavior::Ignore) => children_hidden = true,
                _ => {}
            }
        }
        let inner_w = fixed_w.unwrap_or((proposed_w - 2.0 * padding).max(0.0));
        let child_env = Env { hidden: env.hidden || children_hidden, ..env.clone() };
        let (own_parent, own_depth) = match &e.id {
            Some(id) => (Some(id), depth + 1),
            None => (parent, depth),
        };

        let mut text_fit = None;
        let mut children: Vec<Placed> = Vec::new();
        let (content_w, content_h) = match &node.kind {
            NodeKind::Text { content } => {
                let fit = self.fit_text(content, &env.font, inner_w, fixed_h, line_limit, min_scale);
                let size = (fit.w, fit.h);
                text_fit = Some(fit);
                size
            }
            NodeKind::Button { label, .. } | NodeKind::Toggle { label, .. } => {
                let label_w = fixed_w.unwrap_or((inner_w - 2.0 * CONTROL_PADDING_H).max(0.0));
                let fit = self.fit_text(label, &env.font, label_w, fixed_h, line_limit, min_scale);
                let size = (fit.w + 2.0 * CONTROL_PADDING_H, fit.h + 2.0 * CONTROL_PADDING_V);
                text_fit = Some(fit);
                size
            }
            NodeKind::Image { .. } => (IMAGE_SIZE, IMAGE_SIZE),
            NodeKind::Spacer => (0.0, 0.0),
            NodeKind::ViewRef { .. } => {
                let mut w: f64 = 0.0;
                let mut h: f64 = 0.0;
                for child in &e.children {
                    let placed = self.layout(child, &child_env, inner_w, own_parent, own_depth);
                    w = w.max(placed.w);
                    h = h.max(placed.h);
                    children.push(placed);
                }
                (w, h)
            }
            NodeKind::VStack { spacing } => {
                let gap = spacing.unwrap_or(DEFAULT_STACK_SPACING);
                let (mut y, mut w) = (0.0, 0.0f64);
                for (i, child) in e.children.iter().enumerate() {
                    if i > 0 {
                        y += gap;
                    }
                    let placed = self.layout(child, &child_env, inner_w, own_parent, own_depth).translated(0.0, y);
                    y += placed.h;
                    w = w.max(placed.w);
                    children.push(placed);
                }
                (w, y)
            }
            NodeKind::HStack { spacing } => {
                let gap = spacing.unwrap_or(DEFAULT_STACK_SPACING);
                let (mut x, mut h) = (0.0, 0.0f64);
                for (i, child) in e.children.iter().enumerate() {
                    if i > 0 {
                        x += gap;
                    }
                    let remaining = (inner_w - x).max(0.0);
                    let placed = self.layout(child, &child_env, remaining, own_parent, own_depth).translated(x, 0.0);
                    x += placed.w;
                    h = h.max(placed.h);
                    children.push(placed);
                }
                (x, h)
            }
            NodeKind::ZStack { .. } => {
                let (mut w, mut h) = (0.0f64, 0.0f64);
                for child in &e.children {
                    let placed = self.layout(child, &child_env, inner_w, own_parent, own_depth);
                    w = w.max(placed.w);
                    h = h.max(placed.h);
                    children.push(placed);
                }
                (w, h)
            }
        };
        let box_w = fixed_w.unwrap_or(content_w);
        let box_h = fixed_h.unwrap_or(content_h);
        if matches!(node.kind, NodeKind::ZStack { .. }) {
            children = children
                .into_iter()
                .map(|c| {
                    let (dx, dy) = ((box_w - c.w) / 2.0, (box_h - c.h) / 2.0);
                    c.translated(dx, dy)
                })
                .collect();
        }
        let outer_w = box_w + 2.0 * padding;
        let outer_h = box_h + 2.0 * padding;

        let mut elements = Vec::new();
        if let Some(id) = &e.id {
            let tag = node.tag();
            let text = node.kind.text().map(String::from);
            let text_bearing = text.is_some();
            elements.push(RenderedElement {
                id: id.clone(),
                kind: tag,
                frame: Rect { x: 0.0, y: 0.0, w: outer_w, h: outer_h },
                text,
                effective_font_pt: text_fit.as_ref().map(|f| f.font_pt),
                font: text_bearing.then_some(env.font),
                fg_color: env.fg,
                bg_color: env.bg,
                interactive: tag.is_interactive(),
                action: node.kind.action().map(String::from),
                ax_label: node.ax_label().map(String::from),
                exposed: !env.hidden,
                clipped: text_fit.as_ref().is_some_and(|f| f.clipped),
                parent: parent.cloned(),
                depth,
            });
        }
        for child in children {
            elements.extend(child.translated(padding, padding).elements);
        }
        Placed { w: outer_w, h: outer_h, elements }
    }
}
