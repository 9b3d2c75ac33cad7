//! Deterministic stand-in for a language model.
//!
//! Reads the structured task, answers in the same text formats a model is
//! asked for, so responses go through the ordinary parsers.

use minui_a11y_core::lang::{
    parse_source, print_decl, ChildBehavior, Color, ElementKind, FontSpec, FontStyle, ModifierKind, NodeKind,
    UiNode, ViewDecl,
};
use minui_a11y_core::render::{effective_font_size, ContentSizeCategory, RenderedElement, RenderedScene, CHAR_WIDTH_FACTOR};
use minui_a11y_core::scanner::{contrast_ratio, relative_luminance, Issue, IssueKind, MIN_HIT_AREA};

use crate::agents::{AgentTask, FixPlan, SnippetRating};
use crate::heuristic::Strategy::*;

pub const SCORE_CONTAINS_TARGET: u8 = 60;
pub const SCORE_PLAN_MODIFIER: u8 = 25;
pub const SCORE_SELF: u8 = 15;
/// Foreground colors move this fraction further per attempt.
pub const COLOR_STEP: f64 = 0.2;

pub fn respond(task: &AgentTask) -> String {
    match task {
        AgentTask::Plan { issue, scene, count, .. } => plan_response(issue, scene, *count),
        AgentTask::Rate { issue, plan, snippet } => {
            let score = score_snippet(issue, plan, &snippet.text, snippet.relation.name() == "self");
            format!("Score: {score}\nReasoning: lexical match against the impacted element and the plan.\n")
        }
        AgentTask::Compare { ratings, .. } => {
            let best = best_rating(ratings).map(|r| r.snippet.view_name.as_str()).unwrap_or("");
            format!("Choice: {best}\nReasoning: highest rated candidate.\n")
        }
        AgentTask::Fix { issue, plan, snippet, scene, attempt, .. } => fix_response(issue, plan, &snippet.text, scene, *attempt),
    }
}

fn best_rating(ratings: &[SnippetRating]) -> Option<&SnippetRating> {
    ratings.iter().fold(None, |best: Option<&SnippetRating>, r| match best {
        Some(b) if b.score >= r.score => Some(b),
        _ => Some(r),
    })
}

/// +60 when the snippet holds the impacted element, +25 when it uses a
/// modifier the plan names, +15 for the element's own declaration.
pub fn score_snippet(issue: &Issue, plan: &FixPlan, snippet: &str, is_self: bool) -> u8 {
    let mut score = 0;
    if snippet.contains(&format!("axIdentifier(\"{}\")", issue.element)) {
        score += SCORE_CONTAINS_TARGET;
    }
    let plan_text = format!("{} {}", plan.summary, plan.rationale).to_lowercase();
    let named = ModifierKind::NAMES
        .iter()
        .any(|m| plan_text.contains(&m.to_lowercase()) && snippet.contains(&format!(".{m}(")));
    if named {
        score += SCORE_PLAN_MODIFIER;
    }
    if is_self {
        score += SCORE_SELF;
    }
    score
}

type PlanRow = (&'static str, &'static str, &'static str);

const CONTRAST: &str = "WCAG 2.1 SC 1.4.3 Contrast (Minimum)";
const RESIZE: &str = "WCAG 2.1 SC 1.4.4 Resize Text";
const NON_TEXT: &str = "WCAG 2.1 SC 1.1.1 Non-text Content";
const LABELS: &str = "WCAG 2.1 SC 2.4.6 Headings and Labels";
const INFO: &str = "WCAG 2.1 SC 1.3.1 Info and Relationships";
const TARGET: &str = "WCAG 2.1 SC 2.5.5 Target Size";

const GROUP_PLAN: PlanRow = (
    "Group the element with its neighbours using axElement(children: contain) on the parent.",
    "A containing parent gives assistive technologies a predictable focus order.",
    INFO,
);
const MERGE_PLAN: PlanRow = (
    "Merge the label and the control into one interactive container.",
    "One larger control carries the visible text and the action, so the whole row is tappable.",
    TARGET,
);
const FRAME_PLAN: PlanRow = (
    "Enlarge the frame of the control to at least 44 x 44 points.",
    "A 44 point square meets the minimum touch target size.",
    TARGET,
);
const PADDING_PLAN: PlanRow = (
    "Add padding around the control to enlarge its hit area.",
    "Padding grows the tappable region without changing the content.",
    TARGET,
);

fn plan_rows(issue: &Issue, scene: &RenderedScene) -> Vec<PlanRow> {
    let element = scene.element(&issue.element);
    match issue.kind {
        IssueKind::ContrastFailed | IssueKind::ContrastNearlyPassed => {
            let dark_bg = element.is_some_and(|e| relative_luminance(e.bg_color) < 0.5);
            let first = if dark_bg {
                ("Lighten the text color so it meets the contrast minimum.", "A lighter foreground raises the ratio against the dark background.", CONTRAST)
            } else {
                ("Darken the text color so it meets the contrast minimum.", "A darker foreground raises the ratio against the light background.", CONTRAST)
            };
            vec![
                first,
                ("Adjust background color for better contrast.", "A background at the far end of the luminance range maximizes the ratio.", CONTRAST),
                ("Switch the font to a larger text style so the large-text threshold applies.", "Text of 18 points and above needs a ratio of 3 instead of 4.5.", CONTRAST),
            ]
        }
        IssueKind::TextClipped => vec![
            ("Remove the fixed frame width so the text takes its natural width.", "The text no longer has to fit a box narrower than its content.", RESIZE),
            ("Let the text wrap onto more lines by raising its lineLimit.", "Wrapping keeps every character visible inside the narrow frame.", RESIZE),
            ("Let the text shrink to fit with a minScaleFactor.", "Scaling the font down keeps the text inside its frame.", RESIZE),
        ],
        IssueKind::DynamicTypeUnsupported => vec![
            ("Replace the fixed font size with the nearest dynamic text style.", "Text styles follow the user's preferred text size.", RESIZE),
            ("Use the body text style instead of a fixed font size.", "The body style scales with every text size category.", RESIZE),
            ("Remove the font modifier so the text inherits the default dynamic style.", "The default style is dynamic.", RESIZE),
        ],
        IssueKind::DynamicTypePartiallyUnsupported => vec![
            ("Remove the maximum size cap from the font so it scales at every text size.", "A capped font stops growing at the largest sizes.", RESIZE),
            ("Remove the font modifier so the text inherits the default dynamic style.", "The default style scales without a cap.", RESIZE),
            ("Replace the capped font with the uncapped dynamic style of the same name.", "Keeps the visual hierarchy while scaling fully.", RESIZE),
        ],
        IssueKind::ElementHasNoDescription => {
            let second = if element.is_some_and(|e| e.kind == ElementKind::Image) {
                ("Hide the image with axHidden if it is purely decorative.", "Decorative images should not be announced.", NON_TEXT)
            } else {
                ("Add an axLabel derived from the control's action name.", "The action name says what the control does.", NON_TEXT)
            };
            vec![("Add an axLabel that describes the element.", "Screen readers announce the label instead of nothing.", NON_TEXT), second, GROUP_PLAN]
        }
        IssueKind::LabelNotHumanReadable => vec![
            ("Rewrite the axLabel as plain words.", "Identifiers and file names are read out character by character.", LABELS),
            ("Replace the code-like label with a short human-readable description.", "Labels should describe purpose in natural language.", LABELS),
            GROUP_PLAN,
        ],
        IssueKind::PotentiallyInaccessibleText => vec![
            ("Remove axHidden so the text is exposed to assistive technologies.", "Visible text should be reachable by screen readers.", INFO),
            ("Set axHidden(false) on the text.", "An explicit false keeps the text exposed.", INFO),
            ("Change the parent axElement behaviour to contain so its children stay exposed.", "An ignoring parent hides every child.", INFO),
        ],
        IssueKind::HitAreaTooSmall => {
            if element.is_some_and(|e| mergeable_in_scene(scene, e)) {
                vec![MERGE_PLAN, FRAME_PLAN, PADDING_PLAN]
            } else {
                vec![FRAME_PLAN, PADDING_PLAN, MERGE_PLAN]
            }
        }
    }
}

/// The control sits in a stack whose other children are plain texts.
fn mergeable_in_scene(scene: &RenderedScene, e: &RenderedElement) -> bool {
    let Some(parent) = e.parent.as_ref().and_then(|p| scene.element(p)) else { return false };
    if !matches!(parent.kind, ElementKind::HStack | ElementKind::VStack) {
        return false;
    }
    let siblings: Vec<_> = scene.children_of(&parent.id).filter(|s| s.id != e.id).collect();
    !siblings.is_empty() && siblings.iter().all(|s| s.kind == ElementKind::Text)
}

fn plan_response(issue: &Issue, scene: &RenderedScene, count: usize) -> String {
    let rows = plan_rows(issue, scene);
    let mut out = String::new();
    for i in 0..count {
        let (summary, rationale, guideline) = rows[i % rows.len()];
        out.push_str(&format!("{}. {summary}\nRationale: {rationale}\nGuideline: {guideline}\n", i + 1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strategy {
    Foreground,
    Background,
    LargerText,
    RemoveWidth,
    LineLimit,
    Shrink,
    NearestStyle,
    BodyStyle,
    RemoveFont,
    Uncap,
    Label,
    HideDecorative,
    Group,
    Humanize,
    Unhide,
    ExposeExplicitly,
    ParentContain,
    Merge,
    Frame,
    Padding,
}

fn strategy(kind: IssueKind, plan: &FixPlan) -> Strategy {
    let s = plan.summary.to_lowercase();
    let has = |w: &str| s.contains(w);
    match kind {
        IssueKind::ContrastFailed | IssueKind::ContrastNearlyPassed => {
            if has("background") {
                Background
            } else if has("larger") || has("large text") {
                LargerText
            } else {
                Foreground
            }
        }
        IssueKind::TextClipped => {
            if has("linelimit") || has("wrap") {
                LineLimit
            } else if has("minscalefactor") || has("shrink") {
                Shrink
            } else {
                RemoveWidth
            }
        }
        IssueKind::DynamicTypeUnsupported => {
            if has("remove the font") {
                RemoveFont
            } else if has("body") {
                BodyStyle
            } else {
                NearestStyle
            }
        }
        IssueKind::DynamicTypePartiallyUnsupported => {
            if has("remove the font") {
                RemoveFont
            } else {
                Uncap
            }
        }
        IssueKind::ElementHasNoDescription => {
            if has("axhidden") || has("decorative") {
                HideDecorative
            } else if has("axelement") || has("group") {
                Group
            } else {
                Label
            }
        }
        IssueKind::LabelNotHumanReadable => {
            if has("axelement") || has("group") {
                Group
            } else {
                Humanize
            }
        }
        IssueKind::PotentiallyInaccessibleText => {
            if has("parent") {
                ParentContain
            } else if has("false") {
                ExposeExplicitly
            } else {
                Unhide
            }
        }
        IssueKind::HitAreaTooSmall => {
            if has("merge") || has("container") {
                Merge
            } else if has("padding") {
                Padding
            } else {
                Frame
            }
        }
    }
}

fn fix_response(issue: &Issue, plan: &FixPlan, snippet: &str, scene: &RenderedScene, attempt: usize) -> String {
    let unchanged = |why: &str| format!("```minui\n{snippet}\n```\nExplanation: left unchanged; {why}.\n");
    let Ok(file) = parse_source(snippet, "snippet.minui") else {
        return unchanged("the snippet does not parse");
    };
    let Some(mut decl) = file.decls.into_iter().next() else {
        return unchanged("the snippet holds no declaration");
    };
    let Some(element) = scene.element(&issue.element) else {
        return unchanged("the impacted element is not on screen");
    };
    let id = issue.element.as_str();
    if decl.body.find_by_identifier(id).is_none() {
        return unchanged("the impacted element is not declared in this view");
    }
    let t = Target { id, element, category: scene.device.category };
    match rewrite(&mut decl, &t, strategy(issue.kind, plan), attempt.max(1)) {
        Ok(explanation) => format!("```minui\n{}\n```\nExplanation: {explanation}\n", print_decl(&decl)),
        Err(why) => unchanged(&why),
    }
}

fn scale_channel(c: u8, toward_white: bool, step: f64) -> u8 {
    let c = c as f64;
    let v = if toward_white { c + (255.0 - c) * step } else { c * (1.0 - step) };
    v.round().clamp(0.0, 255.0) as u8
}

/// Moves `fg` away from `bg` by `COLOR_STEP × attempt`.
pub fn adjust_foreground(fg: Color, bg: Color, attempt: usize) -> Color {
    let step = (COLOR_STEP * attempt as f64).min(1.0);
    let lighten = relative_luminance(bg) < 0.5;
    Color::rgb(scale_channel(fg.r, lighten, step), scale_channel(fg.g, lighten, step), scale_channel(fg.b, lighten, step))
}

fn words(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in s.split(|c: char| !c.is_alphanumeric()).filter(|c| !c.is_empty()) {
        let mut cur = String::new();
        let mut prev: Option<char> = None;
        for c in chunk.chars() {
            let boundary = match prev {
                Some(p) => (p.is_lowercase() && c.is_uppercase()) || (p.is_alphabetic() != c.is_alphabetic()),
                None => false,
            };
            if boundary && !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            cur.push(c);
            prev = Some(c);
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    out
}

const NOISE_PREFIXES: [&str; 9] = ["icon", "ic", "btn", "button", "img", "image", "lbl", "label", "txt"];

/// `icon_share.png` → `Share`, `btnSubmit` → `Submit`.
pub fn humanize(label: &str) -> String {
    let mut base = label;
    if let Some((stem, ext)) = label.rsplit_once('.') {
        if !stem.is_empty() && (2..=4).contains(&ext.len()) && ext.chars().all(|c| c.is_ascii_alphabetic()) {
            base = stem;
        }
    }
    let all = words(base);
    let kept: Vec<&String> = all.iter().filter(|w| !NOISE_PREFIXES.contains(&w.to_lowercase().as_str())).collect();
    let kept: Vec<&String> = if kept.is_empty() { all.iter().collect() } else { kept };
    let sentence = kept.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>().join(" ");
    let mut chars = sentence.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// `toggleFavorite` → `Toggle Favorite`.
pub fn title_case(name: &str) -> String {
    words(name)
        .iter()
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c.flat_map(char::to_lowercase)).collect::<String>(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn target<'d>(decl: &'d mut ViewDecl, id: &str) -> &'d mut UiNode {
    decl.body.find_by_identifier_mut(id).expect("target checked by caller")
}

struct Target<'a> {
    id: &'a str,
    element: &'a RenderedElement,
    category: ContentSizeCategory,
}

fn rewrite(decl: &mut ViewDecl, t: &Target<'_>, strategy: Strategy, attempt: usize) -> Result<String, String> {
    let (id, e) = (t.id, t.element);
    let font_pt = e.effective_font_pt.unwrap_or(17.0);
    match strategy {
        Foreground => {
            let fg = adjust_foreground(e.fg_color, e.bg_color, attempt);
            target(decl, id).set_modifier(ModifierKind::Color(fg));
            Ok(format!("Changed the text color from {} to {fg} against {}.", e.fg_color, e.bg_color))
        }
        Background => {
            let bg = if contrast_ratio(e.fg_color, Color::BLACK, font_pt).ratio
                > contrast_ratio(e.fg_color, Color::WHITE, font_pt).ratio
            {
                Color::BLACK
            } else {
                Color::WHITE
            };
            target(decl, id).set_modifier(ModifierKind::Background(bg));
            Ok(format!("Set the background to {bg}, the strongest contrast for {}.", e.fg_color))
        }
        LargerText => {
            target(decl, id).set_modifier(ModifierKind::Font(FontSpec::Dynamic { style: FontStyle::Headline }));
            Ok("Switched to the headline text style so the large-text contrast threshold applies.".into())
        }
        RemoveWidth => {
            let node = target(decl, id);
            match node.modifier("frame").cloned() {
                Some(ModifierKind::Frame { width: Some(_), height: Some(h) }) => {
                    node.set_modifier(ModifierKind::Frame { width: None, height: Some(h) });
                    Ok("Removed the fixed width from the frame.".into())
                }
                Some(ModifierKind::Frame { .. }) => {
                    node.remove_modifiers("frame");
                    Ok("Removed the fixed frame.".into())
                }
                _ => rewrite(decl, t, LineLimit, attempt),
            }
        }
        LineLimit => {
            let per_line = (e.frame.w / (CHAR_WIDTH_FACTOR * font_pt)).floor() as usize;
            if per_line == 0 {
                return Err("the frame is narrower than one character".into());
            }
            let chars = e.text.as_deref().unwrap_or("").chars().count();
            let lines = chars.div_ceil(per_line).max(1) + attempt - 1;
            target(decl, id).set_modifier(ModifierKind::LineLimit(lines as u32));
            Ok(format!("Allowed the text to wrap onto {lines} lines."))
        }
        Shrink => {
            let nominal = effective_font_size(&e.font.unwrap_or_default(), t.category);
            let natural = CHAR_WIDTH_FACTOR * nominal * e.text.as_deref().unwrap_or("").chars().count() as f64;
            if natural <= 0.0 {
                return Err("the text is empty".into());
            }
            let factor = ((e.frame.w / natural * 100.0).floor() / 100.0 - 0.01 * (attempt - 1) as f64).clamp(0.01, 1.0);
            target(decl, id).set_modifier(ModifierKind::MinScaleFactor(factor));
            Ok(format!("Let the font scale down to {factor} of its size to fit."))
        }
        NearestStyle | BodyStyle | Uncap => {
            let node = target(decl, id);
            let style = match (strategy, node.modifier("font")) {
                (BodyStyle, _) => FontStyle::Body,
                (_, Some(ModifierKind::Font(FontSpec::Fixed { size }))) => FontStyle::nearest(*size),
                (_, Some(ModifierKind::Font(FontSpec::Capped { style, .. }))) => *style,
                _ => FontStyle::nearest(font_pt),
            };
            node.set_modifier(ModifierKind::Font(FontSpec::Dynamic { style }));
            Ok(format!("Used the dynamic {} text style.", style.name()))
        }
        RemoveFont => {
            if target(decl, id).remove_modifiers("font") == 0 {
                return rewrite(decl, t, NearestStyle, attempt);
            }
            Ok("Removed the font modifier; the default body style scales.".into())
        }
        Label => {
            let node = target(decl, id);
            let name = match &node.kind {
                NodeKind::Image { name } => name.clone(),
                other => other.action().unwrap_or("element").to_string(),
            };
            let label = title_case(&humanize(&name));
            node.set_modifier(ModifierKind::AxLabel(label.clone()));
            Ok(format!("Added the accessibility label \"{label}\"."))
        }
        HideDecorative => {
            if e.kind != ElementKind::Image {
                return rewrite(decl, t, Label, attempt);
            }
            target(decl, id).set_modifier(ModifierKind::AxHidden(true));
            Ok("Hid the decorative image from assistive technologies.".into())
        }
        Group => {
            let (parent, _) = decl.body.parent_of_identifier_mut(id).ok_or("the element has no parent in this view")?;
            parent.set_modifier(ModifierKind::AxElement(ChildBehavior::Contain));
            Ok("Added axElement(children: contain) to the parent container.".into())
        }
        Humanize => {
            let node = target(decl, id);
            let current = node.ax_label().map(str::to_string).or_else(|| e.text.clone()).unwrap_or_default();
            let label = humanize(&current);
            if label.is_empty() {
                return Err("no label to rewrite".into());
            }
            node.set_modifier(ModifierKind::AxLabel(label.clone()));
            Ok(format!("Replaced the label \"{current}\" with \"{label}\"."))
        }
        Unhide => {
            if target(decl, id).remove_modifiers("axHidden") == 0 {
                return rewrite(decl, t, ParentContain, attempt);
            }
            Ok("Removed axHidden so the text is announced.".into())
        }
        ExposeExplicitly => {
            target(decl, id).set_modifier(ModifierKind::AxHidden(false));
            Ok("Set axHidden(false) on the text.".into())
        }
        ParentContain => {
            let mut changed = 0;
            decl.body.walk_mut(&mut |n| {
                if n.find_by_identifier(id).is_some()
                    && n.identifier() != Some(id)
                    && matches!(n.modifier("axElement"), Some(ModifierKind::AxElement(ChildBehavior::Ignore)))
                {
                    n.set_modifier(ModifierKind::AxElement(ChildBehavior::Contain));
                    changed += 1;
                }
            });
            if changed == 0 {
                let removed = target(decl, id).remove_modifiers("axHidden");
                if removed == 0 {
                    return Err("nothing hides the text in this view".into());
                }
                return Ok("No ignoring parent found; removed axHidden from the text instead.".into());
            }
            Ok("Changed the parent axElement behaviour from ignore to contain.".into())
        }
        Merge => match merge_into_button(decl, id, font_pt) {
            Some(label) => Ok(format!(
                "Merged the text and the control into one Button labelled \"{label}\" with a 44 point tall hit area."
            )),
            None => rewrite(decl, t, Frame, attempt),
        },
        Frame => {
            let node = target(decl, id);
            let (w, h) = match node.modifier("frame") {
                Some(ModifierKind::Frame { width, height }) => {
                    (width.unwrap_or(e.frame.w), height.unwrap_or(e.frame.h))
                }
                _ => (e.frame.w, e.frame.h),
            };
            let (w, h) = (w.max(MIN_HIT_AREA), h.max(MIN_HIT_AREA));
            node.set_modifier(ModifierKind::Frame { width: Some(w), height: Some(h) });
            Ok(format!("Set the frame to {w} x {h} points."))
        }
        Padding => {
            let node = target(decl, id);
            let existing = match node.modifier("padding") {
                Some(ModifierKind::Padding(p)) => *p,
                _ => 0.0,
            };
            let short = MIN_HIT_AREA - e.frame.w.min(e.frame.h);
            let extra = (short / 2.0).ceil().max(1.0) + 2.0 * (attempt - 1) as f64;
            node.set_modifier(ModifierKind::Padding(existing + extra));
            Ok(format!("Added {extra} points of padding around the control."))
        }
    }
}

/// Replaces the stack holding the control and its text siblings with one
/// labelled Button. The stack's identifier moves to the Button.
fn merge_into_button(decl: &mut ViewDecl, id: &str, font_pt: f64) -> Option<String> {
    let (parent, idx) = decl.body.parent_of_identifier_mut(id)?;
    if !matches!(parent.kind, NodeKind::HStack { .. } | NodeKind::VStack { .. }) {
        return None;
    }
    let control = &parent.children[idx];
    let action = control.kind.action()?.to_string();
    let mut texts = Vec::new();
    for (i, child) in parent.children.iter().enumerate() {
        match &child.kind {
            _ if i == idx => {}
            NodeKind::Text { content } => texts.push(content.clone()),
            _ => return None,
        }
    }
    if texts.is_empty() {
        return None;
    }
    let mut label = texts.join(" ");
    if let Some(own) = control.kind.text().filter(|t| !t.is_empty()) {
        label = format!("{label} {own}");
    }
    let mut button = UiNode::new(NodeKind::Button { label: label.clone(), action });
    button.trivia.leading = parent.trivia.leading.clone();
    if let Some(pid) = parent.identifier() {
        button.set_modifier(ModifierKind::AxIdentifier(pid.to_string()));
    }
    for name in ["font", "color", "background", "axLabel"] {
        if let Some(m) = control.modifier(name) {
            button.set_modifier(m.clone());
        }
    }
    let natural_w = CHAR_WIDTH_FACTOR * font_pt * label.chars().count() as f64 + 24.0;
    let width = (natural_w < MIN_HIT_AREA).then_some(MIN_HIT_AREA);
    button.set_modifier(ModifierKind::Frame { width, height: Some(MIN_HIT_AREA) });
    *parent = button;
    Some(label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn humanize_table() {
        assert_eq!(humanize("icon_share"), "Share");
        assert_eq!(humanize("icon_pin.png"), "Pin");
        assert_eq!(humanize("btnSubmit"), "Submit");
        assert_eq!(humanize("addLandmark"), "Add landmark");
        assert_eq!(humanize("icon"), "Icon");
        assert_eq!(title_case("toggleFavorite"), "Toggle Favorite");
        assert_eq!(title_case("pin"), "Pin");
    }

    #[test]
    fn foreground_moves_further_each_attempt() {
        let grey = Color::rgb(0x77, 0x77, 0x77);
        let a1 = adjust_foreground(grey, Color::WHITE, 1);
        let a2 = adjust_foreground(grey, Color::WHITE, 2);
        assert!(relative_luminance(a2) < relative_luminance(a1));
        assert!(relative_luminance(a1) < relative_luminance(grey));
        let on_dark = adjust_foreground(grey, Color::BLACK, 1);
        assert!(relative_luminance(on_dark) > relative_luminance(grey));
    }
}
