//! Cross-file UI hierarchy restoration, identifier instrumentation and
//! extraction of localization candidates.
//!
//! The hierarchy is the *expansion tree*: every view reference is inlined
//! into its declaration's body, so the parent of an element can live in a
//! different file from the element itself.

use alloc::borrow::Cow;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{
    parse_source, print_decl, print_source, ElementKind, Modifier, ModifierKind, NodeKind, Project, SourceSpan,
    UiNode,
};

/// Accessibility identifier of one element, `ax_<n>` when generated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn generated(n: usize) -> Self {
        ElementId(format!("ax_{n}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `n` for ids of the form `ax_<n>`.
    pub fn generated_index(&self) -> Option<usize> {
        let digits = self.0.strip_prefix("ax_")?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0'))
        {
            return None;
        }
        digits.parse().ok()
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HierarchyError {
    #[error("unknown view `{name}`")]
    UnknownView { name: String },
    #[error("recursive view reference: {}", cycle.join(" -> "))]
    Recursion { cycle: Vec<String> },
    #[error("view `{view}` is expanded more than once under one screen")]
    DuplicateExpansion { view: String },
    #[error("accessibility identifier `{id}` is used by more than one element")]
    DuplicateIdentifier { id: String },
    #[error("no element `{0}` in the hierarchy")]
    UnknownElement(ElementId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementRef {
    pub id: ElementId,
    pub kind: ElementKind,
    /// View declaration whose body lexically contains the node.
    pub declared_in: String,
    pub span: SourceSpan,
    pub parent: Option<ElementId>,
    pub children: Vec<ElementId>,
}

/// Element tree of one screen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UiHierarchy {
    pub root_view: String,
    /// `None` when the screen exposes no elements (e.g. a lone `Spacer`).
    pub root: Option<ElementId>,
    pub elements: BTreeMap<ElementId, ElementRef>,
    /// Element ids in pre-order.
    pub order: Vec<ElementId>,
}

/// JSON export shape: `{elements: [...]}` in pre-order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyExport {
    pub elements: Vec<ElementRef>,
}

impl UiHierarchy {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, id: &ElementId) -> Option<&ElementRef> {
        self.elements.get(id)
    }

    pub fn pre_order(&self) -> impl Iterator<Item = &ElementRef> {
        self.order.iter().map(|id| &self.elements[id])
    }

    pub fn view_of(&self, id: &ElementId) -> Option<&str> {
        self.get(id).map(|e| e.declared_in.as_str())
    }

    /// `id` and all its descendants, in pre-order.
    pub fn subtree(&self, id: &ElementId) -> Vec<&ElementRef> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        if let Some(e) = self.get(id) {
            stack.push(e);
        }
        while let Some(e) = stack.pop() {
            out.push(e);
            stack.extend(e.children.iter().rev().filter_map(|c| self.get(c)));
        }
        out
    }

    pub fn export(&self) -> HierarchyExport {
        HierarchyExport { elements: self.pre_order().cloned().collect() }
    }
}

/// Result of [`instrument`].
#[derive(Debug, Clone)]
pub struct Instrumented {
    pub project: Project,
    /// Span of every identified element in the instrumented sources.
    pub spans: BTreeMap<ElementId, SourceSpan>,
    /// Identifiers added by this call.
    pub added: BTreeSet<ElementId>,
}

fn needs_identifier(node: &UiNode) -> bool {
    node.tag() != ElementKind::Spacer && node.identifier().is_none()
}

/// Gives every non-`Spacer` node an `axIdentifier("ax_<n>")` modifier.
///
/// Numbering is pre-order per file, files in path order, skipping numbers
/// already taken by existing identifiers. Instrumenting an instrumented
/// project is the identity.
pub fn instrument(project: &Project) -> Instrumented {
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for (_, decl) in project.decls() {
        for node in decl.body.walk() {
            if let Some(n) = node.identifier().and_then(|id| ElementId::from(id).generated_index()) {
                used.insert(n);
            }
        }
    }

    let mut next = 0usize;
    let mut added = BTreeSet::new();
    let mut files = Vec::with_capacity(project.files().len());
    for file in project.files() {
        if !file.decls.iter().any(|d| d.body.walk().any(needs_identifier)) {
            files.push(file.clone());
            continue;
        }
        let mut edited = file.clone();
        for decl in &mut edited.decls {
            decl.body.walk_mut(&mut |node: &mut UiNode| {
                if needs_identifier(node) {
                    while used.contains(&next) {
                        next += 1;
                    }
                    used.insert(next);
                    let id = ElementId::generated(next);
                    node.modifiers.push(Modifier::new(ModifierKind::AxIdentifier(id.0.clone())));
                    added.insert(id);
                }
            });
        }
        let text = print_source(&edited);
        let reparsed = parse_source(&text, &file.path).expect("instrumented source re-parses");
        files.push(reparsed);
    }
    let project = if added.is_empty() { project.clone() } else { Project::new(files).expect("instrumentation keeps views valid") };

    let mut spans = BTreeMap::new();
    for (_, decl) in project.decls() {
        for node in decl.body.walk() {
            if node.tag() == ElementKind::Spacer {
                continue;
            }
            if let Some(id) = node.identifier() {
                spans.entry(ElementId::from(id)).or_insert_with(|| node.span.clone());
            }
        }
    }
    Instrumented { project, spans, added }
}

/// The project itself when every element already has an identifier.
pub(crate) fn ensure_instrumented(project: &Project) -> Cow<'_, Project> {
    let complete = project.decls().all(|(_, d)| !d.body.walk().any(needs_identifier));
    if complete {
        Cow::Borrowed(project)
    } else {
        Cow::Owned(instrument(project).project)
    }
}

/// Expansion-tree node. `Spacer`s are kept (they take part in layout) but
/// carry no id.
#[derive(Debug)]
pub(crate) struct Expanded<'a> {
    pub node: &'a UiNode,
    pub id: Option<ElementId>,
    pub declared_in: &'a str,
    pub children: Vec<Expanded<'a>>,
}

pub(crate) fn expand<'a>(project: &'a Project, root_view: &str) -> Result<Expanded<'a>, HierarchyError> {
    let (_, decl) =
        project.find_decl(root_view).ok_or_else(|| HierarchyError::UnknownView { name: root_view.to_string() })?;
    let mut stack = alloc::vec![decl.name.as_str()];
    let mut expanded_views = BTreeSet::new();
    let mut ids = BTreeSet::new();
    expand_node(project, &decl.body, &decl.name, &mut stack, &mut expanded_views, &mut ids)
}

fn expand_node<'a>(
    project: &'a Project,
    node: &'a UiNode,
    declared_in: &'a str,
    stack: &mut Vec<&'a str>,
    expanded_views: &mut BTreeSet<&'a str>,
    ids: &mut BTreeSet<ElementId>,
) -> Result<Expanded<'a>, HierarchyError> {
    let id = match node.tag() {
        ElementKind::Spacer => None,
        _ => node.identifier().map(ElementId::from),
    };
    if let Some(id) = &id {
        if !ids.insert(id.clone()) {
            return Err(HierarchyError::DuplicateIdentifier { id: id.0.clone() });
        }
    }
    let mut children = Vec::new();
    if let NodeKind::ViewRef { name } = &node.kind {
        let (_, target) =
            project.find_decl(name).ok_or_else(|| HierarchyError::UnknownView { name: name.clone() })?;
        if let Some(pos) = stack.iter().position(|v| *v == name) {
            let mut cycle: Vec<String> = stack[pos..].iter().map(|s| s.to_string()).collect();
            cycle.push(name.clone());
            return Err(HierarchyError::Recursion { cycle });
        }
        if !expanded_views.insert(target.name.as_str()) {
            return Err(HierarchyError::DuplicateExpansion { view: name.clone() });
        }
        stack.push(&target.name);
        children.push(expand_node(project, &target.body, &target.name, stack, expanded_views, ids)?);
        stack.pop();
    } else {
        for child in &node.children {
            children.push(expand_node(project, child, declared_in, stack, expanded_views, ids)?);
        }
    }
    Ok(Expanded { node, id, declared_in, children })
}

impl<'a> Expanded<'a> {
    /// Nearest identified descendants, looking through `Spacer`s.
    pub(crate) fn element_children(&self) -> Vec<&Expanded<'a>> {
        self.children.iter().filter(|c| c.id.is_some()).collect()
    }
}

/// Restores the element tree of the screen rooted at `root_view`.
///
/// Uninstrumented input is instrumented first, so ids and spans refer to the
/// instrumented sources.
pub fn build_hierarchy(project: &Project, root_view: &str) -> Result<UiHierarchy, HierarchyError> {
    let project = ensure_instrumented(project);
    let tree = expand(&project, root_view)?;
    let mut h = UiHierarchy {
        root_view: root_view.to_string(),
        root: tree.id.clone(),
        elements: BTreeMap::new(),
        order: Vec::new(),
    };
    collect(&tree, None, &mut h);
    Ok(h)
}

fn collect(node: &Expanded<'_>, parent: Option<&ElementId>, h: &mut UiHierarchy) {
    let Some(id) = &node.id else { return };
    h.order.push(id.clone());
    h.elements.insert(
        id.clone(),
        ElementRef {
            id: id.clone(),
            kind: node.node.tag(),
            declared_in: node.declared_in.to_string(),
            span: node.node.span.clone(),
            parent: parent.cloned(),
            children: node.element_children().iter().filter_map(|c| c.id.clone()).collect(),
        },
    );
    for child in &node.children {
        collect(child, Some(id), h);
    }
}

/// How a candidate declaration relates to the impacted element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// The declaration containing the element itself.
    #[serde(rename = "self")]
    Target,
    #[serde(rename = "parent")]
    Parent,
    #[serde(rename = "descendant")]
    Descendant,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Target => "self",
            Relation::Parent => "parent",
            Relation::Descendant => "descendant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateSnippet {
    pub view_name: String,
    pub text: String,
    pub span: SourceSpan,
    pub relation: Relation,
}

/// Declarations that may hold the fix for an issue on `target`: its own
/// declaration, its parent element's declaration, and every declaration
/// expanded beneath it. Ordered self, parent, descendants (pre-order).
pub fn candidate_snippets(
    project: &Project,
    hierarchy: &UiHierarchy,
    target: &ElementId,
) -> Result<Vec<CandidateSnippet>, HierarchyError> {
    let element = hierarchy.get(target).ok_or_else(|| HierarchyError::UnknownElement(target.clone()))?;
    let mut views: Vec<(&str, Relation)> = alloc::vec![(element.declared_in.as_str(), Relation::Target)];
    if let Some(parent) = element.parent.as_ref().and_then(|p| hierarchy.get(p)) {
        if parent.declared_in != element.declared_in {
            views.push((&parent.declared_in, Relation::Parent));
        }
    }
    for e in hierarchy.subtree(target) {
        if !views.iter().any(|(v, _)| *v == e.declared_in) {
            views.push((&e.declared_in, Relation::Descendant));
        }
    }
    views
        .into_iter()
        .map(|(view, relation)| {
            let (_, decl) =
                project.find_decl(view).ok_or_else(|| HierarchyError::UnknownView { name: view.to_string() })?;
            Ok(CandidateSnippet {
                view_name: decl.name.clone(),
                text: print_decl(decl),
                span: decl.span.clone(),
                relation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn project(sources: &[(&str, &str)]) -> Project {
        Project::from_sources(sources.iter().copied()).unwrap()
    }

    #[test]
    fn single_element_hierarchy() {
        let p = project(&[("r.minui", "view R { Text(\"a\") }")]);
        let h = build_hierarchy(&p, "R").unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.root, Some(ElementId::generated(0)));
    }

    #[test]
    fn cross_file_chain() {
        let p = project(&[
            ("picker.minui", "view ThemePicker { VStack { ThemeView() } }"),
            ("theme.minui", "view ThemeView { Text(\"Dark\") }"),
        ]);
        let h = build_hierarchy(&p, "ThemePicker").unwrap();
        let chain: Vec<_> = h.pre_order().map(|e| (e.kind, e.declared_in.as_str())).collect();
        assert_eq!(
            chain,
            [
                (ElementKind::VStack, "ThemePicker"),
                (ElementKind::ViewRef, "ThemePicker"),
                (ElementKind::Text, "ThemeView")
            ]
        );
        let text = &h.order[2];
        let parent = h.get(text).unwrap().parent.clone().unwrap();
        assert_eq!(h.view_of(&parent), Some("ThemePicker"));
    }

    #[test]
    fn recursion_and_unknown_root() {
        let p = project(&[("a.minui", "view A { VStack { A() } }")]);
        assert!(matches!(build_hierarchy(&p, "A"), Err(HierarchyError::Recursion { .. })));
        let p = project(&[("a.minui", "view A { B() }\nview B { VStack { A() } }")]);
        let err = build_hierarchy(&p, "A").unwrap_err();
        assert_eq!(err, HierarchyError::Recursion { cycle: ["A", "B", "A"].map(String::from).to_vec() });
        assert!(matches!(build_hierarchy(&p, "Z"), Err(HierarchyError::UnknownView { .. })));
    }

    #[test]
    fn repeated_expansion_is_rejected() {
        let p = project(&[("a.minui", "view A { VStack { Row() Row() } }\nview Row { Text(\"r\") }")]);
        assert_eq!(build_hierarchy(&p, "A").unwrap_err(), HierarchyError::DuplicateExpansion { view: "Row".into() });
    }

    #[test]
    fn instrument_numbers_preorder_and_is_idempotent() {
        let src = "view A {\n    VStack {\n        Text(\"a\")\n        HStack {\n            Image(\"i\")\n            Spacer()\n            Button(\"b\", action: go)\n        }\n    }\n}\n";
        let p = project(&[("a.minui", src)]);
        let inst = instrument(&p);
        let ids: Vec<_> = inst.added.iter().map(|i| i.0.clone()).collect();
        assert_eq!(ids, ["ax_0", "ax_1", "ax_2", "ax_3", "ax_4"]);
        let body = &inst.project.files()[0].decls[0].body;
        let by_walk: Vec<_> = body.walk().filter_map(|n| n.identifier()).collect();
        assert_eq!(by_walk, ["ax_0", "ax_1", "ax_2", "ax_3", "ax_4"]);
        let again = instrument(&inst.project);
        assert!(again.added.is_empty());
        assert_eq!(again.project.texts(), inst.project.texts());
        assert_eq!(again.spans, inst.spans);
    }

    #[test]
    fn user_identifiers_are_kept_and_skipped() {
        let p = project(&[(
            "a.minui",
            "view A { VStack { Text(\"a\").axIdentifier(\"hero\") Text(\"b\") Text(\"c\").axIdentifier(\"ax_1\") } }",
        )]);
        let inst = instrument(&p);
        let body = &inst.project.files()[0].decls[0].body;
        let ids: Vec<_> = body.walk().filter_map(|n| n.identifier()).collect();
        assert_eq!(ids, ["ax_0", "hero", "ax_2", "ax_1"]);
        assert!(inst.project.files()[0].text.contains("Text(\"a\").axIdentifier(\"hero\")"));
    }

    #[test]
    fn files_are_numbered_in_path_order() {
        let p = project(&[("b.minui", "view B { Text(\"b\") }"), ("a.minui", "view A { Text(\"a\") }")]);
        let inst = instrument(&p);
        assert_eq!(inst.project.file("a.minui").unwrap().decls[0].body.identifier(), Some("ax_0"));
        assert_eq!(inst.project.file("b.minui").unwrap().decls[0].body.identifier(), Some("ax_1"));
    }

    #[test]
    fn candidates_for_cross_file_target() {
        let p = instrument(&project(&[
            ("picker.minui", "view ThemePicker { VStack { Text(\"Pick\") ThemeView() } }"),
            ("theme.minui", "view ThemeView { Text(\"Dark\") }"),
        ]))
        .project;
        let h = build_hierarchy(&p, "ThemePicker").unwrap();
        let dark = h.pre_order().find(|e| e.declared_in == "ThemeView").unwrap().id.clone();
        let c = candidate_snippets(&p, &h, &dark).unwrap();
        let got: Vec<_> = c.iter().map(|s| (s.view_name.as_str(), s.relation)).collect();
        assert_eq!(got, [("ThemeView", Relation::Target), ("ThemePicker", Relation::Parent)]);
        assert!(c[0].text.starts_with("view ThemeView {"));

        let root = h.root.clone().unwrap();
        let c = candidate_snippets(&p, &h, &root).unwrap();
        let got: Vec<_> = c.iter().map(|s| (s.view_name.as_str(), s.relation)).collect();
        assert_eq!(got, [("ThemePicker", Relation::Target), ("ThemeView", Relation::Descendant)]);

        assert!(matches!(
            candidate_snippets(&p, &h, &ElementId::from("ax_99")),
            Err(HierarchyError::UnknownElement(_))
        ));
    }

    #[test]
    fn spacer_only_screen_is_empty() {
        let p = project(&[("a.minui", "view A { Spacer() }")]);
        let h = build_hierarchy(&p, "A").unwrap();
        assert!(h.is_empty());
        assert_eq!(h.root, None);
    }
}
