//! One-way UVL → IVML transformation.
//!
//! Features are flattened into IVML variables: optional features become
//! `Boolean` variables, alternative groups become an enum plus an enum
//! instance, and or/cardinality groups become an enum plus a `setOf` variable
//! with a size constraint. Features that are always selected produce nothing.
//! Cross-tree constraints are rewritten operator by operator.

mod naming;
mod simplify;

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::diagnostic::{Diagnostic, Location};
use crate::ivml::{EnumDef, IvmlDecl, IvmlExpr, IvmlOp, IvmlProject, IvmlType, VarDecl};
use crate::uvl::{
    validate_uvl, BinaryOp, ConstraintExpr, FeatureNode, FeatureType, GroupKind, GroupNode, UvlModel,
};

pub use naming::{suffix_name, GroupNames, NamePool, SuffixKind};
pub use simplify::simplify;

/// Which group constraints to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Only the forward constraints `<parent> implies ...`.
    #[default]
    Faithful,
    /// Forward constraints plus the reverse implications needed for a
    /// one-to-one correspondence of configurations.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Naming {
    /// `<Parent>__ENUM__<n>`, `<Parent>__SET__<n>__INSTANCE`, ...
    #[default]
    Suffix,
    /// `<Parent>Types` / `<Parent>Options` enums with variables named `<Parent>`.
    Pretty,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformOptions {
    pub mode: Mode,
    pub naming: Naming,
    /// Defaults to the UVL namespace, else the root feature name.
    pub project_name: Option<String>,
    /// Pretty naming only: enum name for the first variability group of a parent.
    pub enum_names: BTreeMap<String, String>,
}

/// How a UVL feature is represented in the IVML project.
#[derive(Debug, Clone, PartialEq)]
pub enum BindingKind {
    /// Root, or mandatory with every ancestor always included. No variable.
    AlwaysIncluded,
    /// Mandatory child of a feature that is not always included. No variable;
    /// selected exactly when its parent is.
    FollowsParent,
    BooleanVar(String),
    AltMember {
        instance: String,
        enum_name: String,
        literal: String,
    },
    OrMember {
        set: String,
        enum_name: String,
        literal: String,
    },
    TypedVar {
        var: String,
        ty: IvmlType,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBinding {
    pub feature: String,
    pub parent: Option<String>,
    pub kind: BindingKind,
    /// Condition under which the feature is selected; `true` when always included.
    pub inclusion: IvmlExpr,
}

impl FeatureBinding {
    /// Whether the feature has no IVML variable of its own and is always selected.
    pub fn is_elided(&self) -> bool {
        self.kind == BindingKind::AlwaysIncluded
    }
}

/// Bindings keyed by feature name, in pre-order.
pub type Bindings = IndexMap<String, FeatureBinding>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("model has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error("{location}: generated name `{name}` collides with an existing name")]
    NameCollision { name: String, location: Location },
    #[error("constraint references unbound feature `{0}`")]
    UnboundFeature(String),
}

impl TransformError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            TransformError::Invalid(diags) => diags.clone(),
            TransformError::NameCollision { name, location } => vec![Diagnostic::error(
                *location,
                format!("generated name `{name}` collides with an existing name; rename the feature"),
            )],
            TransformError::UnboundFeature(name) => vec![Diagnostic::error(
                Location::default(),
                format!("constraint references unbound feature `{name}`"),
            )],
        }
    }
}

fn ivml_type(t: FeatureType) -> IvmlType {
    match t {
        FeatureType::Boolean => IvmlType::Boolean,
        FeatureType::String => IvmlType::String,
        FeatureType::Integer => IvmlType::Integer,
        FeatureType::Real => IvmlType::Real,
    }
}

/// Assigns every feature its IVML representation and inclusion condition.
pub fn classify_features(model: &UvlModel, opts: &TransformOptions) -> Result<Bindings, TransformError> {
    let mut pool = NamePool::new(model, opts);
    let mut bindings = Bindings::new();
    bindings.insert(
        model.root.name.clone(),
        FeatureBinding {
            feature: model.root.name.clone(),
            parent: None,
            kind: BindingKind::AlwaysIncluded,
            inclusion: IvmlExpr::Bool(true),
        },
    );
    classify_children(&model.root, &mut pool, &mut bindings)?;
    Ok(bindings)
}

fn classify_children(
    parent: &FeatureNode,
    pool: &mut NamePool,
    bindings: &mut Bindings,
) -> Result<(), TransformError> {
    let parent_binding = bindings[&parent.name].clone();
    let parent_cond = parent_binding.inclusion.clone();

    for group in &parent.groups {
        let names = match group.kind {
            GroupKind::Mandatory | GroupKind::Optional => None,
            kind => Some(pool.group_names(&parent.name, kind, group.location)?),
        };
        for child in &group.children {
            let typed = child.declared_type != FeatureType::Boolean;
            let (kind, inclusion) = match (group.kind, &names) {
                (GroupKind::Mandatory | GroupKind::Optional, _) if typed => {
                    pool.declare_source(&child.name, child.location)?;
                    let kind = BindingKind::TypedVar {
                        var: child.name.clone(),
                        ty: ivml_type(child.declared_type),
                    };
                    (kind, parent_cond.clone())
                }
                (GroupKind::Mandatory, _) if parent_binding.is_elided() => {
                    (BindingKind::AlwaysIncluded, IvmlExpr::Bool(true))
                }
                (GroupKind::Mandatory, _) => (BindingKind::FollowsParent, parent_cond.clone()),
                (GroupKind::Optional, _) => {
                    pool.declare_source(&child.name, child.location)?;
                    (
                        BindingKind::BooleanVar(child.name.clone()),
                        IvmlExpr::var(child.name.clone()),
                    )
                }
                (GroupKind::Alternative, Some(names)) => {
                    let selected = IvmlExpr::binary(
                        IvmlOp::Eq,
                        IvmlExpr::var(names.variable.clone()),
                        IvmlExpr::literal(names.enum_name.clone(), child.name.clone()),
                    );
                    // an undefined instance must read as "not selected" under negation
                    let inclusion = if parent_cond.is_true() {
                        selected
                    } else {
                        IvmlExpr::and(IvmlExpr::IsDefined(names.variable.clone()), selected)
                    };
                    let kind = BindingKind::AltMember {
                        instance: names.variable.clone(),
                        enum_name: names.enum_name.clone(),
                        literal: child.name.clone(),
                    };
                    (kind, inclusion)
                }
                (_, Some(names)) => {
                    let kind = BindingKind::OrMember {
                        set: names.variable.clone(),
                        enum_name: names.enum_name.clone(),
                        literal: child.name.clone(),
                    };
                    let inclusion = IvmlExpr::includes(names.variable.clone(), names.enum_name.clone(), child.name.clone());
                    (kind, inclusion)
                }
                (_, None) => unreachable!("variability groups always have generated names"),
            };
            bindings.insert(
                child.name.clone(),
                FeatureBinding {
                    feature: child.name.clone(),
                    parent: Some(parent.name.clone()),
                    kind,
                    inclusion,
                },
            );
            classify_children(child, pool, bindings)?;
        }
    }
    Ok(())
}

/// Declarations produced for one group. `auxiliary` holds the strict-mode
/// reverse constraints, which the project lists after the cross-tree constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupOutput {
    pub decls: Vec<IvmlDecl>,
    pub auxiliary: Vec<IvmlDecl>,
}

fn guarded(condition: &IvmlExpr, consequent: IvmlExpr) -> IvmlDecl {
    IvmlDecl::Constraint(simplify(IvmlExpr::implies(condition.clone(), consequent)))
}

fn size_cmp(op: IvmlOp, set: &str, bound: u32) -> IvmlExpr {
    IvmlExpr::binary(op, IvmlExpr::Size(set.to_string()), IvmlExpr::Int(bound.into()))
}

/// Transforms one group of `parent` given the bindings computed by
/// [`classify_features`].
pub fn transform_group(
    parent: &FeatureNode,
    group: &GroupNode,
    bindings: &Bindings,
    opts: &TransformOptions,
) -> GroupOutput {
    let parent_cond = &bindings[&parent.name].inclusion;
    let strict = opts.mode == Mode::Strict && !parent_cond.is_true();
    let mut out = GroupOutput::default();

    let enum_decl = |enum_name: &str| {
        IvmlDecl::Enum(EnumDef {
            name: enum_name.to_string(),
            literals: group.children.iter().map(|c| c.name.clone()).collect(),
        })
    };

    match group.kind {
        GroupKind::Mandatory | GroupKind::Optional => {
            for child in &group.children {
                match &bindings[&child.name].kind {
                    BindingKind::BooleanVar(var) => {
                        out.decls.push(IvmlDecl::Var(VarDecl {
                            name: var.clone(),
                            ty: IvmlType::Boolean,
                        }));
                        if strict {
                            out.auxiliary
                                .push(guarded(&IvmlExpr::var(var.clone()), parent_cond.clone()));
                        }
                    }
                    BindingKind::TypedVar { var, ty } => out.decls.push(IvmlDecl::Var(VarDecl {
                        name: var.clone(),
                        ty: ty.clone(),
                    })),
                    _ => {}
                }
            }
        }
        GroupKind::Alternative => {
            let BindingKind::AltMember {
                instance, enum_name, ..
            } = &bindings[&group.children[0].name].kind
            else {
                unreachable!("alternative members are bound as AltMember")
            };
            out.decls.push(enum_decl(enum_name));
            out.decls.push(IvmlDecl::Var(VarDecl {
                name: instance.clone(),
                ty: IvmlType::Enum(enum_name.clone()),
            }));
            out.decls.push(guarded(parent_cond, IvmlExpr::IsDefined(instance.clone())));
            if strict {
                out.auxiliary
                    .push(guarded(&IvmlExpr::IsDefined(instance.clone()), parent_cond.clone()));
            }
        }
        GroupKind::Or | GroupKind::Cardinality { .. } => {
            let BindingKind::OrMember { set, enum_name, .. } = &bindings[&group.children[0].name].kind else {
                unreachable!("or/cardinality members are bound as OrMember")
            };
            out.decls.push(enum_decl(enum_name));
            out.decls.push(IvmlDecl::Var(VarDecl {
                name: set.clone(),
                ty: IvmlType::SetOf(enum_name.clone()),
            }));
            let (lo, hi) = match group.kind {
                GroupKind::Cardinality { lo, hi } => (lo, hi),
                _ => (1, group.children.len() as u32),
            };
            if lo > 0 {
                out.decls.push(guarded(parent_cond, size_cmp(IvmlOp::Ge, set, lo)));
            }
            if (hi as usize) < group.children.len() {
                out.decls.push(guarded(parent_cond, size_cmp(IvmlOp::Le, set, hi)));
            }
            if strict {
                out.auxiliary
                    .push(guarded(&size_cmp(IvmlOp::Ge, set, 1), parent_cond.clone()));
            }
        }
    }
    out
}

/// Rewrites a UVL constraint into IVML and simplifies the result.
pub fn rewrite_constraint(expr: &ConstraintExpr, bindings: &Bindings) -> Result<IvmlExpr, TransformError> {
    Ok(simplify(rewrite(expr, bindings)?))
}

fn map_op(op: BinaryOp) -> IvmlOp {
    match op {
        BinaryOp::And => IvmlOp::And,
        BinaryOp::Or => IvmlOp::Or,
        BinaryOp::Implies => IvmlOp::Implies,
        BinaryOp::Iff => IvmlOp::Iff,
        BinaryOp::Gt => IvmlOp::Gt,
        BinaryOp::Ge => IvmlOp::Ge,
        BinaryOp::Lt => IvmlOp::Lt,
        BinaryOp::Le => IvmlOp::Le,
        BinaryOp::Eq => IvmlOp::Eq,
        BinaryOp::Ne => IvmlOp::Ne,
        BinaryOp::Add => IvmlOp::Add,
        BinaryOp::Sub => IvmlOp::Sub,
        BinaryOp::Mul => IvmlOp::Mul,
        BinaryOp::Div => IvmlOp::Div,
    }
}

fn rewrite(expr: &ConstraintExpr, bindings: &Bindings) -> Result<IvmlExpr, TransformError> {
    let lookup = |name: &str| {
        bindings
            .get(name)
            .ok_or_else(|| TransformError::UnboundFeature(name.to_string()))
    };
    Ok(match expr {
        ConstraintExpr::Feature(name) => {
            let binding = lookup(name)?;
            match &binding.kind {
                BindingKind::BooleanVar(var) | BindingKind::TypedVar { var, .. } => IvmlExpr::var(var.clone()),
                _ => binding.inclusion.clone(),
            }
        }
        ConstraintExpr::Bool(b) => IvmlExpr::Bool(*b),
        ConstraintExpr::Int(v) => IvmlExpr::Int(*v),
        ConstraintExpr::Real(v) => IvmlExpr::Real(*v),
        ConstraintExpr::Str(s) => IvmlExpr::Str(s.clone()),
        ConstraintExpr::Not(inner) => IvmlExpr::not(rewrite(inner, bindings)?),
        ConstraintExpr::Binary(op, lhs, rhs) => {
            IvmlExpr::binary(map_op(*op), rewrite(lhs, bindings)?, rewrite(rhs, bindings)?)
        }
        ConstraintExpr::Len(inner) => match inner.as_ref() {
            ConstraintExpr::Feature(name) => match &lookup(name)?.kind {
                BindingKind::TypedVar { var, .. } => IvmlExpr::Size(var.clone()),
                _ => return Err(TransformError::UnboundFeature(name.clone())),
            },
            // validation only admits `len(<String feature>)`
            other => return Err(TransformError::UnboundFeature(crate::uvl::print_constraint(other))),
        },
        ConstraintExpr::Floor(inner) => IvmlExpr::Floor(Box::new(rewrite(inner, bindings)?)),
    })
}

/// Runs the whole transformation. Declarations follow a pre-order walk of the
/// tree (groups in document order), then the cross-tree constraints in source
/// order, then strict-mode reverse constraints.
pub fn transform(model: &UvlModel, opts: &TransformOptions) -> Result<(IvmlProject, Bindings), TransformError> {
    let diagnostics = validate_uvl(model);
    if crate::diagnostic::has_errors(&diagnostics) {
        return Err(TransformError::Invalid(diagnostics));
    }
    let bindings = classify_features(model, opts)?;

    let mut declarations = Vec::new();
    let mut auxiliary = Vec::new();
    walk_groups(&model.root, &bindings, opts, &mut declarations, &mut auxiliary);

    for constraint in &model.constraints {
        let expr = rewrite_constraint(&constraint.expr, &bindings)?;
        if !expr.is_true() {
            declarations.push(IvmlDecl::Constraint(expr));
        }
    }
    declarations.extend(auxiliary);

    let name = opts
        .project_name
        .clone()
        .or_else(|| model.namespace.clone())
        .unwrap_or_else(|| model.root.name.clone());
    Ok((IvmlProject { name, declarations }, bindings))
}

fn walk_groups(
    node: &FeatureNode,
    bindings: &Bindings,
    opts: &TransformOptions,
    declarations: &mut Vec<IvmlDecl>,
    auxiliary: &mut Vec<IvmlDecl>,
) {
    for group in &node.groups {
        let out = transform_group(node, group, bindings, opts);
        declarations.extend(out.decls.into_iter().filter(is_informative));
        auxiliary.extend(out.auxiliary.into_iter().filter(is_informative));
        for child in &group.children {
            walk_groups(child, bindings, opts, declarations, auxiliary);
        }
    }
}

fn is_informative(decl: &IvmlDecl) -> bool {
    !matches!(decl, IvmlDecl::Constraint(IvmlExpr::Bool(true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivml::emit_ivml;
    use crate::uvl::parse_uvl;

    fn run(src: &str, opts: &TransformOptions) -> (IvmlProject, Bindings) {
        transform(&parse_uvl(src).unwrap(), opts).unwrap()
    }

    fn body(src: &str, opts: &TransformOptions) -> Vec<String> {
        let (project, _) = run(src, opts);
        emit_ivml(&project)
            .unwrap()
            .lines()
            .skip(1)
            .filter(|l| *l != "}")
            .map(|l| l.trim().to_string())
            .collect()
    }

    fn strict() -> TransformOptions {
        TransformOptions {
            mode: Mode::Strict,
            ..TransformOptions::default()
        }
    }

    #[test]
    fn no_variability_gives_empty_project() {
        let (project, bindings) = run("features\n A\n  mandatory\n   B\n", &TransformOptions::default());
        assert!(project.declarations.is_empty());
        assert_eq!(project.name, "A");
        assert!(bindings.values().all(FeatureBinding::is_elided));
    }

    #[test]
    fn project_name_precedence() {
        let src = "namespace Shop\nfeatures\n A\n";
        assert_eq!(run(src, &TransformOptions::default()).0.name, "Shop");
        let opts = TransformOptions {
            project_name: Some("Other".into()),
            ..TransformOptions::default()
        };
        assert_eq!(run(src, &opts).0.name, "Other");
    }

    #[test]
    fn suffix_naming_for_alternative() {
        let lines = body(
            "features\n R\n  mandatory\n   Payment\n    alternative\n     Debit\n     Credit\n",
            &TransformOptions::default(),
        );
        assert_eq!(
            lines,
            [
                "enum Payment__ENUM__1 {Debit, Credit};",
                "Payment__ENUM__1 Payment__ENUM__1__INSTANCE;",
                "isDefined(Payment__ENUM__1__INSTANCE);",
            ]
        );
    }

    #[test]
    fn mandatory_under_optional_follows_parent() {
        let (_, bindings) = run(
            "features\n R\n  optional\n   P\n    mandatory\n     C\n",
            &TransformOptions::default(),
        );
        assert_eq!(bindings["C"].kind, BindingKind::FollowsParent);
        assert_eq!(bindings["C"].inclusion, IvmlExpr::var("P"));
    }

    #[test]
    fn or_under_optional_parent_in_strict_mode() {
        let lines = body("features\n R\n  optional\n   P\n    or\n     A\n     B\n", &strict());
        assert_eq!(
            lines,
            [
                "Boolean P;",
                "enum P__ENUM__1 {A, B};",
                "setOf(P__ENUM__1) P__SET__1__INSTANCE;",
                "P implies (size(P__SET__1__INSTANCE) >= 1);",
                "(size(P__SET__1__INSTANCE) >= 1) implies P;",
            ]
        );
    }

    #[test]
    fn strict_reverse_constraints_for_optional_and_alternative() {
        let lines = body(
            "features\n R\n  optional\n   P\n    optional\n     Q\n    alternative\n     A\n     B\n",
            &strict(),
        );
        assert!(lines.contains(&"Q implies P;".to_string()));
        assert!(lines.contains(&"isDefined(P__ENUM__1__INSTANCE) implies P;".to_string()));
        // the root's optional child needs no reverse constraint
        assert!(!lines.iter().any(|l| l.starts_with("P implies true")));
    }

    #[test]
    fn alternative_member_under_variable_parent_is_guarded() {
        let (_, bindings) = run(
            "features\n R\n  optional\n   P\n    alternative\n     A\n     B\n",
            &TransformOptions::default(),
        );
        assert_eq!(
            crate::ivml::render_expr(&bindings["A"].inclusion),
            "isDefined(P__ENUM__1__INSTANCE) and P__ENUM__1__INSTANCE == P__ENUM__1.A"
        );
    }

    #[test]
    fn cardinality_bounds() {
        let lines = body(
            "features\n R\n  mandatory\n   G\n    [0..2]\n     A\n     B\n     C\n",
            &TransformOptions::default(),
        );
        assert_eq!(lines.last().unwrap(), "size(G__SET__1__INSTANCE) <= 2;");
        assert!(!lines.iter().any(|l| l.contains(">=")));
    }

    #[test]
    fn constraint_with_elided_antecedent_simplifies() {
        let lines = body(
            "features\n R\n  mandatory\n   Catalog\n  optional\n   Search\nconstraints\n Catalog => Search\n Search => Catalog\n",
            &TransformOptions::default(),
        );
        assert_eq!(lines, ["Boolean Search;", "Search;"]);
    }

    #[test]
    fn typed_features_become_typed_variables() {
        let lines = body(
            "features\n R\n  optional\n   String Name\n   Integer Count\nconstraints\n len(Name) > Count\n",
            &TransformOptions::default(),
        );
        assert_eq!(lines, ["String Name;", "Integer Count;", "size(Name) > Count;"]);
    }

    #[test]
    fn name_collision_is_reported() {
        let err = transform(
            &parse_uvl("features\n R\n  optional\n   R__ENUM__1\n  alternative\n   A\n   B\n").unwrap(),
            &TransformOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, TransformError::NameCollision { .. }));
    }

    #[test]
    fn invalid_model_is_rejected() {
        let err = transform(
            &parse_uvl("features\n R\n  optional\n   A\n   A\n").unwrap(),
            &TransformOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, TransformError::Invalid(_)));
    }
}
