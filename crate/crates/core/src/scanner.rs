//! Rule-based accessibility audit of a rendered scene.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::hierarchy::{ElementId, HierarchyError};
use crate::lang::{Color, ElementKind, FontSpec, Project};
use crate::render::{effective_font_size, resolve_screen, ContentSizeCategory, DeviceConfig, RenderedElement, RenderedScene};

pub const MIN_HIT_AREA: f64 = 44.0;
pub const LARGE_TEXT_PT: f64 = 18.0;
pub const NORMAL_TEXT_CONTRAST: f64 = 4.5;
pub const LARGE_TEXT_CONTRAST: f64 = 3.0;
pub const NEARLY_PASSED_BAND: f64 = 1.0;

/// The nine issue types. Declaration order is the tie-break when sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IssueKind {
    TextClipped,
    ContrastFailed,
    ContrastNearlyPassed,
    DynamicTypePartiallyUnsupported,
    DynamicTypeUnsupported,
    ElementHasNoDescription,
    LabelNotHumanReadable,
    PotentiallyInaccessibleText,
    HitAreaTooSmall,
}

impl IssueKind {
    pub const ALL: [IssueKind; 9] = [
        IssueKind::TextClipped,
        IssueKind::ContrastFailed,
        IssueKind::ContrastNearlyPassed,
        IssueKind::DynamicTypePartiallyUnsupported,
        IssueKind::DynamicTypeUnsupported,
        IssueKind::ElementHasNoDescription,
        IssueKind::LabelNotHumanReadable,
        IssueKind::PotentiallyInaccessibleText,
        IssueKind::HitAreaTooSmall,
    ];

    /// Identifier used in JSON and on the command line.
    pub fn code(self) -> &'static str {
        match self {
            IssueKind::TextClipped => "TextClipped",
            IssueKind::ContrastFailed => "ContrastFailed",
            IssueKind::ContrastNearlyPassed => "ContrastNearlyPassed",
            IssueKind::DynamicTypePartiallyUnsupported => "DynamicTypePartiallyUnsupported",
            IssueKind::DynamicTypeUnsupported => "DynamicTypeUnsupported",
            IssueKind::ElementHasNoDescription => "ElementHasNoDescription",
            IssueKind::LabelNotHumanReadable => "LabelNotHumanReadable",
            IssueKind::PotentiallyInaccessibleText => "PotentiallyInaccessibleText",
            IssueKind::HitAreaTooSmall => "HitAreaTooSmall",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        IssueKind::ALL.into_iter().find(|k| k.code() == code)
    }

    /// Inspector-style title.
    pub fn title(self) -> &'static str {
        match self {
            IssueKind::TextClipped => "Text clipped",
            IssueKind::ContrastFailed => "Contrast failed",
            IssueKind::ContrastNearlyPassed => "Contrast nearly passed",
            IssueKind::DynamicTypePartiallyUnsupported => "Dynamic Type font sizes are partially unsupported",
            IssueKind::DynamicTypeUnsupported => "Dynamic Type font sizes are unsupported",
            IssueKind::ElementHasNoDescription => "Element has no description",
            IssueKind::LabelNotHumanReadable => "Label not human-readable",
            IssueKind::PotentiallyInaccessibleText => "Potentially inaccessible text",
            IssueKind::HitAreaTooSmall => "Hit area is too small",
        }
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Issue {
    pub id: String,
    pub kind: IssueKind,
    pub element: ElementId,
    pub description: String,
    pub screen: String,
    pub device: DeviceConfig,
}

impl Issue {
    pub fn new(kind: IssueKind, element: ElementId, description: String, screen: &str, device: DeviceConfig) -> Self {
        Issue { id: issue_id(kind, &element, screen), kind, element, description, screen: screen.into(), device }
    }
}

/// 64-bit FNV-1a over `kind`, element id and root view, as 16 hex digits.
pub fn issue_id(kind: IssueKind, element: &ElementId, screen: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in [kind.code(), element.as_str(), screen] {
        for b in part.bytes().chain(core::iter::once(0u8)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// The byte format written to `issues.json` and compared by assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub screen: String,
    pub device: DeviceConfig,
    pub issues: Vec<Issue>,
}

impl ScanReport {
    pub fn find(&self, id: &str) -> Option<&Issue> {
        self.issues.iter().find(|i| i.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContrastVerdict {
    Pass,
    NearlyPassed,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastResult {
    pub ratio: f64,
    pub verdict: ContrastVerdict,
    pub threshold: f64,
}

fn channel(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.03928 {
        c / 12.92
    } else {
        libm::pow((c + 0.055) / 1.055, 2.4)
    }
}

/// WCAG 2.1 relative luminance.
pub fn relative_luminance(color: Color) -> f64 {
    0.2126 * channel(color.r) + 0.7152 * channel(color.g) + 0.0722 * channel(color.b)
}

pub fn required_contrast(font_pt: f64) -> f64 {
    if font_pt >= LARGE_TEXT_PT {
        LARGE_TEXT_CONTRAST
    } else {
        NORMAL_TEXT_CONTRAST
    }
}

pub fn contrast_ratio(fg: Color, bg: Color, font_pt: f64) -> ContrastResult {
    let (a, b) = (relative_luminance(fg), relative_luminance(bg));
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let ratio = (hi + 0.05) / (lo + 0.05);
    let threshold = required_contrast(font_pt);
    let verdict = if ratio >= threshold {
        ContrastVerdict::Pass
    } else if ratio >= threshold - NEARLY_PASSED_BAND {
        ContrastVerdict::NearlyPassed
    } else {
        ContrastVerdict::Failed
    };
    ContrastResult { ratio, verdict, threshold }
}

/// False for labels that read like code: `_` or `.`, lowerCamelCase, or
/// a run of more than three digits.
pub fn is_human_readable(label: &str) -> bool {
    if label.contains('_') || label.contains('.') {
        return false;
    }
    let camel = !label.contains(char::is_whitespace)
        && label.chars().next().is_some_and(|c| c.is_lowercase())
        && label.chars().skip(1).any(|c| c.is_uppercase());
    if camel {
        return false;
    }
    !label.split_whitespace().any(|t| t.len() > 3 && t.chars().all(|c| c.is_ascii_digit()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicTypeSupport {
    Full,
    Partial,
    None,
}

/// Sweeps the seven categories: no change at all is `None`, some flat step is
/// `Partial`.
pub fn dynamic_type_support(font: &FontSpec) -> DynamicTypeSupport {
    let sizes: Vec<f64> = ContentSizeCategory::ALL.iter().map(|c| effective_font_size(font, *c)).collect();
    let growing = sizes.windows(2).filter(|w| w[1] > w[0]).count();
    match growing {
        0 => DynamicTypeSupport::None,
        n if n == sizes.len() - 1 => DynamicTypeSupport::Full,
        _ => DynamicTypeSupport::Partial,
    }
}

/// The label a screen reader would announce.
pub fn spoken_label(e: &RenderedElement) -> Option<&str> {
    match e.ax_label.as_deref() {
        Some(l) => Some(l),
        None if e.interactive => e.text.as_deref(),
        None => None,
    }
}

fn element_issues(e: &RenderedElement, out: &mut Vec<(IssueKind, String)>) {
    if e.clipped {
        let text = e.text.as_deref().unwrap_or("");
        out.push((
            IssueKind::TextClipped,
            format!("Text \"{text}\" does not fit its {:.1} x {:.1} pt frame.", e.frame.w, e.frame.h),
        ));
    }
    if e.is_text_bearing() {
        let pt = e.effective_font_pt.unwrap_or(0.0);
        let c = contrast_ratio(e.fg_color, e.bg_color, pt);
        let detail = format!(
            "contrast {:.2} < {:.1} required for {:.1} pt text ({} on {})",
            c.ratio, c.threshold, pt, e.fg_color, e.bg_color
        );
        match c.verdict {
            ContrastVerdict::Pass => {}
            ContrastVerdict::NearlyPassed => out.push((IssueKind::ContrastNearlyPassed, format!("Nearly passed: {detail}."))),
            ContrastVerdict::Failed => out.push((IssueKind::ContrastFailed, format!("Failed: {detail}."))),
        }
        if let Some(font) = &e.font {
            match dynamic_type_support(font) {
                DynamicTypeSupport::Full => {}
                DynamicTypeSupport::Partial => out.push((
                    IssueKind::DynamicTypePartiallyUnsupported,
                    String::from("Font stops scaling at larger text sizes."),
                )),
                DynamicTypeSupport::None => out.push((
                    IssueKind::DynamicTypeUnsupported,
                    format!("Font is fixed at {:.1} pt and ignores the text size setting.", pt),
                )),
            }
        }
    }
    let unlabeled = e.kind == ElementKind::Image || (e.interactive && e.text.as_deref().unwrap_or("").is_empty());
    if e.exposed && unlabeled && e.ax_label.is_none() {
        out.push((IssueKind::ElementHasNoDescription, format!("{} has no accessibility label.", e.kind)));
    }
    if e.exposed {
        if let Some(label) = spoken_label(e).filter(|l| !l.is_empty()) {
            if !is_human_readable(label) {
                out.push((IssueKind::LabelNotHumanReadable, format!("Label \"{label}\" is not human-readable.")));
            }
        }
    }
    if e.kind == ElementKind::Text && !e.exposed {
        out.push((IssueKind::PotentiallyInaccessibleText, String::from("Text is hidden from assistive technologies.")));
    }
    if e.interactive && (e.frame.w < MIN_HIT_AREA || e.frame.h < MIN_HIT_AREA) {
        out.push((
            IssueKind::HitAreaTooSmall,
            format!("Hit area {:.1} x {:.1} pt is below {MIN_HIT_AREA} x {MIN_HIT_AREA} pt.", e.frame.w, e.frame.h),
        ));
    }
}

/// Audits every element; issues come out in element pre-order, then kind.
pub fn scan_scene(scene: &RenderedScene) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut found = Vec::new();
    for e in &scene.elements {
        found.clear();
        element_issues(e, &mut found);
        found.sort_by_key(|(k, _)| *k);
        for (kind, description) in found.drain(..) {
            issues.push(Issue::new(kind, e.id.clone(), description, &scene.root_view, scene.device));
        }
    }
    issues
}

/// Renders and scans one screen.
pub fn scan_screen(project: &Project, screen: &str, device: DeviceConfig) -> Result<ScanReport, HierarchyError> {
    let scene = resolve_screen(project, screen, device)?;
    Ok(ScanReport { screen: screen.into(), device, issues: scan_scene(&scene) })
}
