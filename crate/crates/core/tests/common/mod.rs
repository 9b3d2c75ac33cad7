//! Random MiniUI projects for property tests, with an expansion model that
//! answers localization queries without touching the library's hierarchy.

#![allow(dead_code)]

use std::fmt::Write as _;

use minui_a11y_core::hierarchy::{build_hierarchy, candidate_snippets, instrument, Relation};
use minui_a11y_core::lang::Project;
use proptest::collection::vec;
use proptest::prelude::*;

pub const MAX_VIEWS: usize = 30;
/// Longest chain of nested view references, root included.
pub const MAX_VIEW_DEPTH: usize = 6;

/// Body shape before view references are placed.
#[derive(Debug, Clone)]
pub enum Shape {
    Leaf(u8),
    Stack(u8, Vec<Shape>),
}

fn shape() -> impl Strategy<Value = Shape> {
    (0u8..4).prop_map(Shape::Leaf).prop_recursive(3, 12, 3, |inner| (0u8..3, vec(inner, 1..4)).prop_map(|(k, c)| Shape::Stack(k, c)))
}

#[derive(Debug, Clone)]
pub struct Blueprint {
    pub bodies: Vec<Shape>,
    pub parent_seeds: Vec<usize>,
    pub slot_seeds: Vec<usize>,
    pub files: usize,
    pub decorate: bool,
}

pub fn blueprint() -> impl Strategy<Value = Blueprint> {
    (1..=MAX_VIEWS).prop_flat_map(|n| {
        (vec(shape(), n), vec(any::<usize>(), n), vec(any::<usize>(), n), 1usize..=4, any::<bool>()).prop_map(
            |(bodies, parent_seeds, slot_seeds, files, decorate)| Blueprint { bodies, parent_seeds, slot_seeds, files, decorate },
        )
    })
}

/// Source-level node of one view body.
#[derive(Debug, Clone)]
pub enum Local {
    Leaf(u8),
    Stack(u8, Vec<Local>),
    Ref(usize),
}

impl Local {
    fn from_shape(s: &Shape) -> Local {
        match s {
            Shape::Leaf(k) => Local::Leaf(*k),
            Shape::Stack(k, c) => Local::Stack(*k, c.iter().map(Local::from_shape).collect()),
        }
    }

    fn stack_count(&self) -> usize {
        match self {
            Local::Stack(_, c) => 1 + c.iter().map(Local::stack_count).sum::<usize>(),
            _ => 0,
        }
    }

    /// Inserts `r` into the `target`-th stack (pre-order).
    fn insert(&mut self, target: &mut usize, r: Local, pos_seed: usize) -> Option<Local> {
        if let Local::Stack(_, children) = self {
            if *target == 0 {
                let pos = pos_seed % (children.len() + 1);
                children.insert(pos, r);
                return None;
            }
            *target -= 1;
            let mut r = Some(r);
            for c in children.iter_mut() {
                r = c.insert(target, r.take()?, pos_seed);
                r.as_ref()?;
            }
            return r;
        }
        Some(r)
    }
}

pub fn kind_name(l: &Local) -> &'static str {
    match l {
        Local::Leaf(0) => "Text",
        Local::Leaf(1) => "Image",
        Local::Leaf(2) => "Button",
        Local::Leaf(_) => "Toggle",
        Local::Stack(0, _) => "VStack",
        Local::Stack(1, _) => "HStack",
        Local::Stack(_, _) => "ZStack",
        Local::Ref(_) => "ViewRef",
    }
}

#[derive(Debug, Clone)]
pub struct RandomProject {
    pub bodies: Vec<Local>,
    pub view_depth: Vec<usize>,
    pub sources: Vec<(String, String)>,
}

pub fn view_name(i: usize) -> String {
    format!("View{i}")
}

impl RandomProject {
    pub fn build(blueprint: &Blueprint) -> Self {
        let n = blueprint.bodies.len();
        let mut bodies: Vec<Local> = blueprint.bodies.iter().map(Local::from_shape).collect();
        let mut view_depth = vec![1usize; n];
        for j in 1..n {
            let eligible: Vec<usize> = (0..j).filter(|&i| view_depth[i] < MAX_VIEW_DEPTH).collect();
            let p = eligible[blueprint.parent_seeds[j] % eligible.len()];
            view_depth[j] = view_depth[p] + 1;
            if bodies[p].stack_count() == 0 {
                let old = std::mem::replace(&mut bodies[p], Local::Leaf(0));
                bodies[p] = Local::Stack(0, vec![old]);
            }
            let seed = blueprint.slot_seeds[j];
            let mut target = seed % bodies[p].stack_count();
            let left = bodies[p].insert(&mut target, Local::Ref(j), seed / 7);
            assert!(left.is_none());
        }

        let mut files: Vec<String> = vec![String::new(); blueprint.files];
        for (i, body) in bodies.iter().enumerate() {
            let f = &mut files[i % blueprint.files];
            if blueprint.decorate {
                let _ = writeln!(f, "// {} declaration", view_name(i));
            }
            let _ = writeln!(f, "view {} {{", view_name(i));
            print_local(body, 1, blueprint.decorate, i, f);
            f.push_str("}\n");
            if blueprint.decorate {
                f.push('\n');
            }
        }
        let sources = files
            .into_iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty())
            .map(|(i, t)| (format!("dir{}/file{i}.minui", i % 2), t))
            .collect();
        RandomProject { bodies, view_depth, sources }
    }

    /// Pre-order expansion from the root view: (kind, declaring view, parent index).
    pub fn expand(&self) -> Vec<(&'static str, usize, Option<usize>)> {
        let mut out = Vec::new();
        self.expand_into(&self.bodies[0], 0, None, &mut out);
        out
    }

    fn expand_into(&self, node: &Local, view: usize, parent: Option<usize>, out: &mut Vec<(&'static str, usize, Option<usize>)>) {
        let me = out.len();
        out.push((kind_name(node), view, parent));
        match node {
            Local::Stack(_, children) => {
                for c in children {
                    self.expand_into(c, view, Some(me), out);
                }
            }
            Local::Ref(j) => self.expand_into(&self.bodies[*j], *j, Some(me), out),
            Local::Leaf(_) => {}
        }
    }

    /// Candidate views for the element at pre-order index `e`, derived by
    /// walking the whole expansion.
    pub fn expected_candidates(&self, e: usize) -> Vec<(String, Relation)> {
        let nodes = self.expand();
        let (_, own, parent) = nodes[e];
        let mut out = vec![(view_name(own), Relation::Target)];
        if let Some(p) = parent {
            if nodes[p].1 != own {
                out.push((view_name(nodes[p].1), Relation::Parent));
            }
        }
        for (i, node) in nodes.iter().enumerate() {
            let mut a = Some(i);
            let mut under = false;
            while let Some(x) = a {
                if x == e {
                    under = true;
                    break;
                }
                a = nodes[x].2;
            }
            let name = view_name(node.1);
            if under && !out.iter().any(|(v, _)| *v == name) {
                out.push((name, Relation::Descendant));
            }
        }
        out
    }
}

fn print_local(node: &Local, depth: usize, decorate: bool, ordinal: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    match node {
        Local::Leaf(0) => {
            let _ = writeln!(out, "{pad}Text(\"Label {ordinal}\")");
        }
        Local::Leaf(1) => {
            let _ = writeln!(out, "{pad}Image(\"icon{ordinal}\").axLabel(\"Icon\")");
        }
        Local::Leaf(2) => {
            let _ = writeln!(out, "{pad}Button(\"Go\", action: go{ordinal}).frame(height: 44)");
        }
        Local::Leaf(_) => {
            let sep = if decorate { " " } else { "" };
            let _ = writeln!(out, "{pad}Toggle(\"On\",{sep}action: flip{ordinal})");
        }
        Local::Stack(_, children) => {
            let spacing = if decorate { "(spacing: 4)" } else { "" };
            let _ = writeln!(out, "{pad}{}{spacing} {{", kind_name(node));
            for c in children {
                print_local(c, depth + 1, decorate, ordinal, out);
            }
            let _ = writeln!(out, "{pad}}}");
        }
        Local::Ref(j) => {
            let _ = writeln!(out, "{pad}{}()", view_name(*j));
        }
    }
}

/// Checks every element of one project against the expansion model.
/// Returns the number of elements compared.
pub fn check_localization(rp: &RandomProject) -> usize {
    let project = instrument(&Project::from_sources(rp.sources.clone()).unwrap()).project;
    let h = build_hierarchy(&project, "View0").unwrap();
    let model = rp.expand();
    let elements: Vec<_> = h.pre_order().collect();
    assert_eq!(elements.len(), model.len());
    for (i, (e, m)) in elements.iter().zip(&model).enumerate() {
        assert_eq!(e.kind.name(), m.0);
        let got: Vec<(String, _)> =
            candidate_snippets(&project, &h, &e.id).unwrap().into_iter().map(|c| (c.view_name, c.relation)).collect();
        assert_eq!(got, rp.expected_candidates(i), "element {i} ({})", e.id);
    }
    elements.len()
}
