//! Helpers shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uvl2ivml::diagnostic::Location;
use uvl2ivml::uvl::{BinaryOp, Constraint, ConstraintExpr, FeatureNode, GroupKind, UvlModel};
use uvl2ivml::{Mode, Naming, TransformOptions};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

/// Options that reproduce the reference Onlineshop project (`onlineshop.ivml`).
pub fn reference_options() -> TransformOptions {
    TransformOptions {
        mode: Mode::Faithful,
        naming: Naming::Pretty,
        project_name: Some("OnlineShop".into()),
        enum_names: [("Platform".to_string(), "PlatformType".to_string())].into_iter().collect(),
    }
}

/// Whitespace-insensitive token stream.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric() || c == '_' || c == '.' {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        if c.is_whitespace() {
            continue;
        }
        let mut tok = c.to_string();
        if let Some(&next) = chars.peek() {
            if matches!((c, next), ('<', '>') | ('<', '=') | ('>', '=') | ('=', '=')) {
                tok.push(next);
                chars.next();
            }
        }
        out.push(tok);
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

pub fn all_option_sets() -> Vec<TransformOptions> {
    let mut out = Vec::new();
    for mode in [Mode::Faithful, Mode::Strict] {
        for naming in [Naming::Suffix, Naming::Pretty] {
            out.push(TransformOptions {
                mode,
                naming,
                ..TransformOptions::default()
            });
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Model with one group of `k` children `C1..Ck` under the root.
pub fn single_group_model(kind: GroupKind, k: usize) -> UvlModel {
    let children = (1..=k).map(|i| FeatureNode::new(format!("C{i}"))).collect();
    model(FeatureNode::new("Root").with_group(kind, children), Vec::new())
}

pub fn model(root: FeatureNode, constraints: Vec<ConstraintExpr>) -> UvlModel {
    UvlModel {
        namespace: None,
        root,
        constraints: constraints
            .into_iter()
            .map(|expr| Constraint {
                expr,
                location: Location::default(),
            })
            .collect(),
        source_name: "generated.uvl".into(),
    }
}

/// Deterministic random Boolean-level model: at most `max_features`
/// features, groups of all five kinds, up to three cross-tree constraints
/// built from implies, or and not.
pub fn random_model(seed: u64, max_features: usize) -> UvlModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = rng.gen_range(1..=max_features);
    let mut next = 1;
    let root = grow(&mut rng, "F0".into(), &mut next, budget, 0);

    // the root is always selected, so constraints on it are trivial
    let names: Vec<String> = root.walk().iter().skip(1).map(|f| f.name.clone()).collect();
    let count = if names.is_empty() { 0 } else { rng.gen_range(0..=3) };
    let constraints = (0..count).map(|_| random_constraint(&mut rng, &names, 2)).collect();
    model(root, constraints)
}

fn grow(rng: &mut ChaCha8Rng, name: String, next: &mut usize, budget: usize, depth: usize) -> FeatureNode {
    let mut node = FeatureNode::new(name);
    if depth > 0 && rng.gen_bool(0.3) {
        node.is_abstract = true;
        node.attributes.push(uvl2ivml::uvl::Attribute {
            key: "abstract".into(),
            value: None,
        });
    }
    let groups = if depth >= 3 { 0 } else { rng.gen_range(0..=2) };
    for _ in 0..groups {
        let remaining = budget - *next;
        if remaining == 0 {
            break;
        }
        let kind_pick = rng.gen_range(0..5);
        let min_children = if kind_pick >= 2 { 2 } else { 1 };
        if remaining < min_children {
            continue;
        }
        let n = rng.gen_range(min_children..=remaining.min(4));
        let kind = match kind_pick {
            0 => GroupKind::Mandatory,
            1 => GroupKind::Optional,
            2 => GroupKind::Alternative,
            3 => GroupKind::Or,
            _ => {
                let lo = rng.gen_range(0..=n as u32);
                let hi = rng.gen_range(lo.max(1)..=n as u32);
                GroupKind::Cardinality { lo, hi }
            }
        };
        let names: Vec<String> = (0..n)
            .map(|_| {
                let s = format!("F{next}");
                *next += 1;
                s
            })
            .collect();
        let children = names
            .into_iter()
            .map(|child| grow(rng, child, next, budget, depth + 1))
            .collect();
        node.groups.push(uvl2ivml::uvl::GroupNode {
            kind,
            children,
            location: Location::default(),
        });
    }
    node
}

fn random_constraint(rng: &mut ChaCha8Rng, names: &[String], depth: usize) -> ConstraintExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return ConstraintExpr::feature(names.choose(rng).unwrap().clone());
    }
    match rng.gen_range(0..3) {
        0 => ConstraintExpr::binary(
            BinaryOp::Implies,
            random_constraint(rng, names, depth - 1),
            random_constraint(rng, names, depth - 1),
        ),
        1 => ConstraintExpr::binary(
            BinaryOp::Or,
            random_constraint(rng, names, depth - 1),
            random_constraint(rng, names, depth - 1),
        ),
        _ => ConstraintExpr::not(random_constraint(rng, names, depth - 1)),
    }
}

/// Independent count of valid configurations: tries every subset of the
/// features and keeps those satisfying the tree and cross-tree rules.
pub fn brute_force_count(model: &UvlModel) -> u64 {
    let features: Vec<&FeatureNode> = model.root.walk();
    let n = features.len();
    assert!(n <= 20, "brute force is limited to 20 features");
    let index = |name: &str| features.iter().position(|f| f.name == name).unwrap();
    let mut count = 0;
    for mask in 0u32..(1 << n) {
        let sel = |name: &str| mask & (1 << index(name)) != 0;
        if !sel(&model.root.name) {
            continue;
        }
        let tree_ok = features.iter().all(|f| {
            f.groups.iter().all(|g| {
                let chosen = g.children.iter().filter(|c| sel(&c.name)).count();
                let parent = sel(&f.name);
                if !parent {
                    return chosen == 0;
                }
                let n = g.children.len();
                match g.kind {
                    GroupKind::Mandatory => chosen == n,
                    GroupKind::Optional => true,
                    GroupKind::Alternative => chosen == 1,
                    GroupKind::Or => chosen >= 1,
                    GroupKind::Cardinality { lo, hi } => (lo as usize..=hi as usize).contains(&chosen),
                }
            })
        });
        if tree_ok && model.constraints.iter().all(|c| holds(&c.expr, &sel)) {
            count += 1;
        }
    }
    count
}

fn holds(expr: &ConstraintExpr, sel: &dyn Fn(&str) -> bool) -> bool {
    match expr {
        ConstraintExpr::Feature(name) => sel(name),
        ConstraintExpr::Bool(b) => *b,
        ConstraintExpr::Not(inner) => !holds(inner, sel),
        ConstraintExpr::Binary(op, l, r) => {
            let (a, b) = (holds(l, sel), holds(r, sel));
            match op {
                BinaryOp::And => a && b,
                BinaryOp::Or => a || b,
                BinaryOp::Implies => !a || b,
                BinaryOp::Iff => a == b,
                _ => panic!("non-Boolean operator in a Boolean-level model"),
            }
        }
        _ => panic!("non-Boolean constraint in a Boolean-level model"),
    }
}

/// Operator rows of the constraint mapping table: (row, UVL constraint, IVML constraint).
pub const MAPPING_ROWS: &[(&str, &str, &str)] = &[
    ("and", "A & B", "A and B"),
    ("or", "A | B", "A or B"),
    ("not", "!A", "not (A)"),
    ("iff", "A <=> B", "A iff B"),
    ("implies", "A => B", "A implies B"),
    ("len", "len(Name) > 3", "size(Name) > 3"),
    ("floor", "floor(Price) == 2", "floor(Price) == 2"),
    ("gt", "Count > 1", "Count > 1"),
    ("ge", "Count >= 1", "Count >= 1"),
    ("lt", "Count < 1", "Count < 1"),
    ("le", "Count <= 1", "Count <= 1"),
    ("eq", "Count == 1", "Count == 1"),
    ("ne", "Count != 1", "Count <> 1"),
    ("add", "Count + 1 > 2", "Count + 1 > 2"),
    ("sub", "Count - 1 > 2", "Count - 1 > 2"),
    ("mul", "Count * 2 > 2", "Count * 2 > 2"),
    ("div", "Price / 2 > 2.5", "Price / 2 > 2.5"),
];

/// Model with Boolean and typed features and one cross-tree constraint.
pub fn mapping_model(constraint: &str) -> String {
    format!(
        "features\n    R\n        optional\n            A\n            B\n            String Name\n            Integer Count\n            Real Price\nconstraints\n    {constraint}\n"
    )
}

/// The single emitted cross-tree constraint for `constraint`, without `;`.
pub fn mapped_constraint(constraint: &str) -> String {
    let model = uvl2ivml::parse_uvl(&mapping_model(constraint)).unwrap();
    let (project, _) = uvl2ivml::transform(&model, &TransformOptions::default()).unwrap();
    let text = uvl2ivml::emit_ivml(&project).unwrap();
    let line = text.lines().rev().nth(1).unwrap().trim();
    line.strip_suffix(';').unwrap().to_string()
}
