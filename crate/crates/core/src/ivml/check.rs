use std::collections::{HashMap, HashSet};

use super::{IvmlDecl, IvmlExpr, IvmlProject, IvmlType, KEYWORDS, UNSUPPORTED};

/// A broken project invariant. `decl` indexes the offending declaration, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub decl: Option<usize>,
    pub message: String,
}

/// Checks naming, enum and built-in typing invariants. Empty means valid.
pub fn check_project(project: &IvmlProject) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |decl: Option<usize>, message: String| out.push(Violation { decl, message });

    if !is_identifier(&project.name) {
        push(None, format!("project name `{}` is not an identifier", project.name));
    }

    let enums: HashMap<&str, &[String]> = project
        .enums()
        .map(|e| (e.name.as_str(), e.literals.as_slice()))
        .collect();
    let vars: HashMap<&str, &IvmlType> = project.variables().map(|v| (v.name.as_str(), &v.ty)).collect();

    let mut names = HashSet::new();
    for (idx, decl) in project.declarations.iter().enumerate() {
        let name = match decl {
            IvmlDecl::Enum(e) => {
                if e.literals.is_empty() {
                    push(Some(idx), format!("enum `{}` has no literals", e.name));
                }
                let mut seen = HashSet::new();
                for lit in &e.literals {
                    if !seen.insert(lit) {
                        push(Some(idx), format!("enum `{}` repeats literal `{lit}`", e.name));
                    }
                    if !is_identifier(lit) {
                        push(Some(idx), format!("enum literal `{lit}` is not a valid IVML name"));
                    }
                }
                &e.name
            }
            IvmlDecl::Var(v) => {
                if let IvmlType::Enum(e) | IvmlType::SetOf(e) = &v.ty {
                    if !enums.contains_key(e.as_str()) {
                        push(Some(idx), format!("variable `{}` refers to undeclared enum `{e}`", v.name));
                    }
                }
                &v.name
            }
            IvmlDecl::Constraint(expr) => {
                check_expr(expr, &enums, &vars, &mut |m| push(Some(idx), m));
                continue;
            }
        };
        if !names.insert(name.as_str()) {
            push(Some(idx), format!("duplicate declaration name `{name}`"));
        }
        if !is_identifier(name) {
            push(Some(idx), format!("`{name}` is not a valid IVML name"));
        }
    }
    out
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
        && !UNSUPPORTED.contains(&name)
}

fn check_expr(
    expr: &IvmlExpr,
    enums: &HashMap<&str, &[String]>,
    vars: &HashMap<&str, &IvmlType>,
    report: &mut dyn FnMut(String),
) {
    let literal_ok = |e: &str, l: &str| enums.get(e).is_some_and(|lits| lits.iter().any(|x| x == l));
    match expr {
        IvmlExpr::Var(v) | IvmlExpr::IsDefined(v) => {
            if !vars.contains_key(v.as_str()) {
                report(format!("constraint references undeclared variable `{v}`"));
            }
        }
        IvmlExpr::EnumLiteral { enum_name, literal } => {
            if !literal_ok(enum_name, literal) {
                report(format!("unknown enum literal `{enum_name}.{literal}`"));
            }
        }
        IvmlExpr::Size(v) => match vars.get(v.as_str()) {
            Some(IvmlType::SetOf(_) | IvmlType::String) => {}
            Some(_) => report(format!("`size` applies to setOf and String variables, not `{v}`")),
            None => report(format!("constraint references undeclared variable `{v}`")),
        },
        IvmlExpr::Includes {
            set,
            enum_name,
            literal,
        } => {
            match vars.get(set.as_str()) {
                Some(IvmlType::SetOf(e)) if e == enum_name => {}
                Some(IvmlType::SetOf(e)) => report(format!(
                    "`includes({set}, ...)` tests a `{enum_name}` literal but `{set}` holds `{e}`"
                )),
                Some(_) => report(format!("`includes` requires a setOf variable, `{set}` is not one")),
                None => report(format!("constraint references undeclared variable `{set}`")),
            }
            if !literal_ok(enum_name, literal) {
                report(format!("unknown enum literal `{enum_name}.{literal}`"));
            }
        }
        IvmlExpr::Floor(inner) | IvmlExpr::Not(inner) => check_expr(inner, enums, vars, report),
        IvmlExpr::Binary(_, lhs, rhs) => {
            check_expr(lhs, enums, vars, report);
            check_expr(rhs, enums, vars, report);
        }
        IvmlExpr::Bool(_) | IvmlExpr::Int(_) | IvmlExpr::Real(_) | IvmlExpr::Str(_) => {}
    }
}
