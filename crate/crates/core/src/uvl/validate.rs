use std::collections::HashMap;
use std::fmt;

use crate::diagnostic::{Diagnostic, Location};

use super::{BinaryOp, ConstraintExpr, FeatureNode, FeatureType, GroupKind, UvlModel};

/// Checks a parsed model for semantic errors and warnings. An empty result means
/// the model is valid.
pub fn validate_uvl(model: &UvlModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut types: HashMap<&str, FeatureType> = HashMap::new();
    let mut first_seen: HashMap<&str, Location> = HashMap::new();

    if model.root.declared_type != FeatureType::Boolean {
        diags.push(Diagnostic::error(
            model.root.location,
            format!("root feature `{}` must be Boolean", model.root.name),
        ));
    }

    for feature in model.features() {
        match first_seen.get(feature.name.as_str()) {
            Some(first) => diags.push(Diagnostic::error(
                feature.location,
                format!(
                    "duplicate feature name `{}` (first declared at {first})",
                    feature.name
                ),
            )),
            None => {
                first_seen.insert(&feature.name, feature.location);
                types.insert(&feature.name, feature.declared_type);
            }
        }
        check_groups(feature, &mut diags);
    }

    for constraint in &model.constraints {
        let mut checker = TypeChecker {
            types: &types,
            location: constraint.location,
            diags: &mut diags,
        };
        if let Some(ty) = checker.infer(&constraint.expr) {
            if ty != Ty::Bool {
                checker.error(format!("constraint must be Boolean, found {ty}"));
            }
        }
    }
    diags
}

fn check_groups(feature: &FeatureNode, diags: &mut Vec<Diagnostic>) {
    for group in &feature.groups {
        let n = group.children.len();
        match group.kind {
            GroupKind::Cardinality { lo, hi } => {
                if hi == 0 {
                    diags.push(Diagnostic::error(
                        group.location,
                        format!("cardinality upper bound of {} must be positive", group.kind),
                    ));
                } else if lo > hi || hi as usize > n {
                    diags.push(Diagnostic::error(
                        group.location,
                        format!(
                            "cardinality {} of `{}` requires 0 <= lo <= hi <= {n} (number of children)",
                            group.kind, feature.name
                        ),
                    ));
                }
            }
            GroupKind::Or | GroupKind::Alternative if n == 1 => {
                diags.push(Diagnostic::warning(
                    group.location,
                    format!(
                        "`{}` group under `{}` has a single child `{}`",
                        group.kind, feature.name, group.children[0].name
                    ),
                ));
            }
            _ => {}
        }
        if matches!(
            group.kind,
            GroupKind::Or | GroupKind::Alternative | GroupKind::Cardinality { .. }
        ) {
            for child in &group.children {
                if child.declared_type != FeatureType::Boolean {
                    diags.push(Diagnostic::error(
                        child.location,
                        format!(
                            "{} feature `{}` cannot be a member of a `{}` group",
                            child.declared_type.keyword(),
                            child.name,
                            group.kind
                        ),
                    ));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Int,
    Real,
    Str,
}

impl Ty {
    fn is_numeric(self) -> bool {
        matches!(self, Ty::Int | Ty::Real)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Bool => "Boolean",
            Ty::Int => "Integer",
            Ty::Real => "Real",
            Ty::Str => "String",
        })
    }
}

impl From<FeatureType> for Ty {
    fn from(t: FeatureType) -> Self {
        match t {
            FeatureType::Boolean => Ty::Bool,
            FeatureType::String => Ty::Str,
            FeatureType::Integer => Ty::Int,
            FeatureType::Real => Ty::Real,
        }
    }
}

struct TypeChecker<'a> {
    types: &'a HashMap<&'a str, FeatureType>,
    location: Location,
    diags: &'a mut Vec<Diagnostic>,
}

impl TypeChecker<'_> {
    fn error(&mut self, message: String) {
        self.diags.push(Diagnostic::error(self.location, message));
    }

    /// Returns `None` once an error has been reported for the subexpression.
    fn infer(&mut self, expr: &ConstraintExpr) -> Option<Ty> {
        match expr {
            ConstraintExpr::Feature(name) => match self.types.get(name.as_str()) {
                Some(t) => Some((*t).into()),
                None => {
                    self.error(format!("constraint references unknown feature `{name}`"));
                    None
                }
            },
            ConstraintExpr::Bool(_) => Some(Ty::Bool),
            ConstraintExpr::Int(_) => Some(Ty::Int),
            ConstraintExpr::Real(_) => Some(Ty::Real),
            ConstraintExpr::Str(_) => Some(Ty::Str),
            ConstraintExpr::Not(inner) => {
                let t = self.infer(inner)?;
                if t != Ty::Bool {
                    self.error(format!("`!` expects a Boolean operand, found {t}"));
                    return None;
                }
                Some(Ty::Bool)
            }
            ConstraintExpr::Len(inner) => match inner.as_ref() {
                ConstraintExpr::Feature(name) => {
                    let t = self.infer(inner)?;
                    if t != Ty::Str {
                        self.error(format!("`len` expects a String feature, but `{name}` is {t}"));
                        return None;
                    }
                    Some(Ty::Int)
                }
                _ => {
                    self.error("`len` expects a String feature reference".into());
                    None
                }
            },
            ConstraintExpr::Floor(inner) => {
                let t = self.infer(inner)?;
                if !t.is_numeric() {
                    self.error(format!("`floor` expects a numeric operand, found {t}"));
                    return None;
                }
                Some(Ty::Int)
            }
            ConstraintExpr::Binary(op, lhs, rhs) => {
                let l = self.infer(lhs);
                let r = self.infer(rhs);
                let (l, r) = (l?, r?);
                let sym = op.symbol();
                if op.is_logical() {
                    if l != Ty::Bool || r != Ty::Bool {
                        self.error(format!("`{sym}` expects Boolean operands, found {l} and {r}"));
                        return None;
                    }
                    Some(Ty::Bool)
                } else if op.is_arithmetic() {
                    if !l.is_numeric() || !r.is_numeric() {
                        self.error(format!("`{sym}` expects numeric operands, found {l} and {r}"));
                        return None;
                    }
                    Some(if l == Ty::Real || r == Ty::Real { Ty::Real } else { Ty::Int })
                } else if matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
                    let compatible = l == r || (l.is_numeric() && r.is_numeric());
                    if !compatible {
                        self.error(format!("`{sym}` cannot compare {l} with {r}"));
                        return None;
                    }
                    Some(Ty::Bool)
                } else {
                    if !l.is_numeric() || !r.is_numeric() {
                        self.error(format!("`{sym}` expects numeric operands, found {l} and {r}"));
                        return None;
                    }
                    Some(Ty::Bool)
                }
            }
        }
    }
}
