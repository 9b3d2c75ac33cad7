mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::{blueprint, check_localization, RandomProject};
use minui_a11y_core::hierarchy::{instrument, ElementId};
use minui_a11y_core::lang::{
    diff_texts, parse_source, print_decl, print_source, ElementKind, ModifierKind, Patch, Project, UiNode,
};
use proptest::prelude::*;

fn minui_files(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for e in entries {
        let p = e.unwrap().path();
        if p.is_dir() {
            minui_files(&p, out);
        } else if p.extension().is_some_and(|x| x == "minui") {
            out.push(p);
        }
    }
}

fn corpus() -> Vec<(String, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let mut paths = Vec::new();
    minui_files(&root.join("fixtures"), &mut paths);
    minui_files(&root.join("examples"), &mut paths);
    paths.sort();
    assert!(paths.len() >= 7, "{paths:?}");
    paths.into_iter().map(|p| (p.display().to_string(), fs::read_to_string(&p).unwrap())).collect()
}

fn check_spans(node: &UiNode, text: &str) {
    let slice = node.span.slice(text);
    let head = match node.tag() {
        ElementKind::ViewRef => slice.split('(').next().unwrap(),
        k => k.name(),
    };
    assert!(slice.starts_with(head), "{slice:?} does not start with {head}");
    for c in &node.children {
        assert!(node.span.contains(&c.span), "child span escapes parent");
        assert!(node.span.start_line <= c.span.start_line && c.span.end_line <= node.span.end_line);
        check_spans(c, text);
    }
}

#[test]
fn corpus_round_trips_with_sound_spans() {
    for (path, text) in corpus() {
        let file = parse_source(&text, &path).unwrap_or_else(|e| panic!("{path}: {e}"));
        assert_eq!(print_source(&file), text, "{path}");
        for decl in &file.decls {
            let slice = decl.span.slice(&text);
            assert!(slice.trim_start().starts_with("view "), "{path}: {slice:?}");
            assert!(slice.trim_end().ends_with('}'));
            assert!(decl.span.contains(&decl.body.span));
            check_spans(&decl.body, &text);
            // A declaration printed alone parses back to the same tree.
            let again = parse_source(&print_decl(decl), "x.minui").unwrap();
            assert_eq!(again.decls[0], *decl);
        }
    }
}

fn identifiers(p: &Project) -> Vec<(ElementKind, Option<String>)> {
    p.decls().flat_map(|(_, d)| d.body.walk().map(|n| (n.tag(), n.identifier().map(str::to_string)))).collect()
}

fn strip(p: &Project, added: &BTreeSet<ElementId>) -> Vec<(String, String)> {
    let added: BTreeSet<&str> = added.iter().map(ElementId::as_str).collect();
    p.files()
        .iter()
        .map(|f| {
            let mut f = f.clone();
            for d in &mut f.decls {
                d.body.walk_mut(&mut |n| {
                    n.modifiers.retain(|m| !matches!(&m.kind, ModifierKind::AxIdentifier(id) if added.contains(id.as_str())))
                });
            }
            (f.path.clone(), print_source(&f))
        })
        .collect()
}

/// Adds a modifier to the `k`-th Text of the first file and returns the new text.
fn mutate(text: &str, k: usize) -> String {
    let count = text.matches("Text(\"").count();
    if count == 0 {
        return format!("// touched\n{text}");
    }
    let target = k % count;
    let (i, _) = text.match_indices("Text(\"").nth(target).unwrap();
    let close = i + text[i..].find(')').unwrap() + 1;
    format!("{}.color(#333333){}", &text[..close], &text[close..])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_sources_round_trip(s in blueprint()) {
        let rp = RandomProject::build(&s);
        for (path, text) in &rp.sources {
            let file = parse_source(text, path).unwrap();
            prop_assert_eq!(&print_source(&file), text);
            for decl in &file.decls {
                check_spans(&decl.body, text);
            }
        }
    }

    #[test]
    fn instrumentation_is_total_unique_idempotent_and_removable(s in blueprint()) {
        let rp = RandomProject::build(&s);
        let p = Project::from_sources(rp.sources.clone()).unwrap();
        let once = instrument(&p);
        let ids = identifiers(&once.project);
        for (kind, id) in &ids {
            prop_assert_eq!(id.is_some(), *kind != ElementKind::Spacer);
        }
        let unique: BTreeSet<&String> = ids.iter().filter_map(|(_, id)| id.as_ref()).collect();
        prop_assert_eq!(unique.len(), ids.iter().filter(|(_, id)| id.is_some()).count());
        prop_assert_eq!(once.added.len(), unique.len());
        prop_assert_eq!(once.spans.len(), unique.len());

        let twice = instrument(&once.project);
        prop_assert!(twice.added.is_empty());
        prop_assert_eq!(twice.project.texts(), once.project.texts());

        prop_assert_eq!(strip(&once.project, &once.added), p.texts());
    }

    #[test]
    fn apply_then_revert_is_identity(s in blueprint(), k in any::<usize>(), context in 0usize..4) {
        let rp = RandomProject::build(&s);
        let (path, old) = &rp.sources[k % rp.sources.len()];
        let new = mutate(old, k);
        let patch = diff_texts(path, old, &new, context);
        prop_assert!(!patch.is_empty());
        prop_assert_eq!(patch.apply_to(old).unwrap(), new.clone());
        prop_assert_eq!(patch.inverse().apply_to(&new).unwrap(), old.clone());
        let twice = patch.inverse().inverse();
        prop_assert_eq!((&twice.file, &twice.hunks), (&patch.file, &patch.hunks));
        let parsed = Patch::parse_unified(&patch.to_unified()).unwrap();
        prop_assert_eq!((&parsed.file, &parsed.hunks), (&patch.file, &patch.hunks));
        prop_assert!(diff_texts(path, old, old, context).is_empty());

        let project = Project::from_sources(rp.sources.clone()).unwrap();
        let patched = project.apply_patch(&patch).unwrap();
        let restored = patched.apply_patch(&patch.inverse()).unwrap();
        prop_assert_eq!(restored.texts(), project.texts());
    }

    #[test]
    fn line_level_patches_invert(
        old in proptest::collection::vec("[a-c]{0,3}", 0..25),
        new in proptest::collection::vec("[a-c]{0,3}", 0..25),
        trailing in any::<bool>(),
    ) {
        let join = |lines: &[String]| {
            let mut t = lines.join("\n");
            if trailing && !lines.is_empty() {
                t.push('\n');
            }
            t
        };
        let (a, b) = (join(&old), join(&new));
        let patch = diff_texts("f.minui", &a, &b, 3);
        prop_assert_eq!(patch.apply_to(&a).unwrap(), b.clone());
        prop_assert_eq!(patch.inverse().apply_to(&b).unwrap(), a);
    }
}

#[test]
fn localization_matches_expansion_model() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;

    let start = Instant::now();
    let mut runner = TestRunner::deterministic();
    let (mut projects, mut elements, mut deepest, mut widest) = (0, 0, 0, 0);
    for _ in 0..150 {
        let rp = RandomProject::build(&blueprint().new_tree(&mut runner).unwrap().current());
        deepest = deepest.max(*rp.view_depth.iter().max().unwrap());
        widest = widest.max(rp.bodies.len());
        elements += check_localization(&rp);
        projects += 1;
    }
    assert!(projects >= 100);
    assert!(deepest <= common::MAX_VIEW_DEPTH && widest <= common::MAX_VIEWS);
    assert!(deepest >= 4, "generator never nests deeply");
    assert!(start.elapsed().as_secs_f64() < 10.0);
    println!("{projects} projects, {elements} elements, view depth up to {deepest}, {widest} views max");
}
