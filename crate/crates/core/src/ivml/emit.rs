use std::fmt::Write;

use crate::uvl::format_real;

use super::{check_project, IvmlDecl, IvmlError, IvmlExpr, IvmlProject, IvmlType};

const INDENT: &str = "    ";

/// Serializes a project as IVML text: one declaration per line, four-space
/// indentation, LF line endings and a trailing newline.
///
/// The project is checked first; nothing is rendered if it is invalid.
pub fn emit_ivml(project: &IvmlProject) -> Result<String, IvmlError> {
    let violations = check_project(project);
    if !violations.is_empty() {
        return Err(IvmlError::Invalid(violations));
    }
    let mut out = String::new();
    let _ = writeln!(out, "project {} {{", project.name);
    for decl in &project.declarations {
        out.push_str(INDENT);
        out.push_str(&render_decl(decl));
        out.push('\n');
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn render_decl(decl: &IvmlDecl) -> String {
    match decl {
        IvmlDecl::Enum(e) => format!("enum {} {{{}}};", e.name, e.literals.join(", ")),
        IvmlDecl::Var(v) => match &v.ty {
            IvmlType::Boolean => format!("Boolean {};", v.name),
            IvmlType::Integer => format!("Integer {};", v.name),
            IvmlType::Real => format!("Real {};", v.name),
            IvmlType::String => format!("String {};", v.name),
            IvmlType::Enum(e) => format!("{e} {};", v.name),
            IvmlType::SetOf(e) => format!("setOf({e}) {};", v.name),
        },
        IvmlDecl::Constraint(expr) => format!("{};", render_expr(expr)),
    }
}

/// Renders an expression with the parenthesization rules of the emitter:
/// a child is parenthesized when it binds less tightly than its parent (or
/// equally, on the right), and binary operands of `implies`/`iff` are always
/// parenthesized.
pub fn render_expr(expr: &IvmlExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn precedence(expr: &IvmlExpr) -> u8 {
    match expr {
        IvmlExpr::Binary(op, _, _) => op.precedence(),
        _ => u8::MAX,
    }
}

fn write_expr(expr: &IvmlExpr, out: &mut String) {
    match expr {
        IvmlExpr::Var(name) => out.push_str(name),
        IvmlExpr::EnumLiteral { enum_name, literal } => {
            let _ = write!(out, "{enum_name}.{literal}");
        }
        IvmlExpr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        IvmlExpr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        IvmlExpr::Real(v) => out.push_str(&format_real(*v)),
        IvmlExpr::Str(s) => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        IvmlExpr::IsDefined(v) => {
            let _ = write!(out, "isDefined({v})");
        }
        IvmlExpr::Size(v) => {
            let _ = write!(out, "size({v})");
        }
        IvmlExpr::Includes {
            set,
            enum_name,
            literal,
        } => {
            let _ = write!(out, "includes({set}, {enum_name}.{literal})");
        }
        IvmlExpr::Floor(inner) => {
            out.push_str("floor(");
            write_expr(inner, out);
            out.push(')');
        }
        IvmlExpr::Not(inner) => {
            if matches!(inner.as_ref(), IvmlExpr::Includes { .. }) {
                out.push('(');
                write_expr(inner, out);
                out.push_str(" <> true)");
            } else {
                out.push_str("not (");
                write_expr(inner, out);
                out.push(')');
            }
        }
        IvmlExpr::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            let guarded = p == 1;
            let lhs_parens = precedence(lhs) < p || (guarded && lhs.is_binary());
            let rhs_parens = precedence(rhs) <= p || (guarded && rhs.is_binary());
            write_operand(lhs, lhs_parens, out);
            let _ = write!(out, " {} ", op.keyword());
            write_operand(rhs, rhs_parens, out);
        }
    }
}

fn write_operand(expr: &IvmlExpr, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_expr(expr, out);
        out.push(')');
    } else {
        write_expr(expr, out);
    }
}
