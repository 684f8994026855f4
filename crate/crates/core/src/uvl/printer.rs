use std::fmt::Write;

use super::{BinaryOp, ConstraintExpr, FeatureNode, UvlModel};

/// Serializes a model as canonical UVL: tab indentation, one group keyword per
/// line, minimal parentheses in constraints.
pub fn print_uvl(model: &UvlModel) -> String {
    let mut out = String::new();
    if let Some(ns) = &model.namespace {
        let _ = writeln!(out, "namespace {ns}\n");
    }
    out.push_str("features\n");
    print_feature(&model.root, 1, &mut out);
    if !model.constraints.is_empty() {
        out.push_str("constraints\n");
        for c in &model.constraints {
            let _ = writeln!(out, "\t{}", print_constraint(&c.expr));
        }
    }
    out
}

fn print_feature(node: &FeatureNode, depth: usize, out: &mut String) {
    indent(out, depth);
    if node.declared_type != super::FeatureType::Boolean {
        let _ = write!(out, "{} ", node.declared_type.keyword());
    }
    out.push_str(&node.name);
    if !node.attributes.is_empty() {
        let attrs: Vec<String> = node
            .attributes
            .iter()
            .map(|a| match &a.value {
                Some(v) => format!("{} {}", a.key, v),
                None => a.key.clone(),
            })
            .collect();
        let _ = write!(out, " {{{}}}", attrs.join(", "));
    }
    out.push('\n');
    for group in &node.groups {
        indent(out, depth + 1);
        let _ = writeln!(out, "{}", group.kind);
        for child in &group.children {
            print_feature(child, depth + 2, out);
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push('\t');
    }
}

/// Renders a constraint expression in UVL syntax.
pub fn print_constraint(expr: &ConstraintExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn precedence(expr: &ConstraintExpr) -> u8 {
    match expr {
        ConstraintExpr::Binary(op, _, _) => op.precedence(),
        // unary and atoms bind tighter than any binary operator
        _ => u8::MAX,
    }
}

fn write_expr(expr: &ConstraintExpr, out: &mut String) {
    match expr {
        ConstraintExpr::Feature(name) => out.push_str(name),
        ConstraintExpr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ConstraintExpr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ConstraintExpr::Real(v) => out.push_str(&format_real(*v)),
        ConstraintExpr::Str(s) => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        ConstraintExpr::Not(inner) => {
            out.push('!');
            write_operand(inner, precedence(inner) < u8::MAX, out);
        }
        ConstraintExpr::Len(inner) | ConstraintExpr::Floor(inner) => {
            out.push_str(if matches!(expr, ConstraintExpr::Len(_)) { "len(" } else { "floor(" });
            write_expr(inner, out);
            out.push(')');
        }
        ConstraintExpr::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            let right_assoc = *op == BinaryOp::Implies;
            let non_assoc = op.is_comparison();
            let lhs_parens = precedence(lhs) < p || (precedence(lhs) == p && (right_assoc || non_assoc));
            let rhs_parens = precedence(rhs) < p || (precedence(rhs) == p && !right_assoc);
            write_operand(lhs, lhs_parens, out);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(rhs, rhs_parens, out);
        }
    }
}

fn write_operand(expr: &ConstraintExpr, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_expr(expr, out);
        out.push(')');
    } else {
        write_expr(expr, out);
    }
}

pub(crate) fn format_real(v: f64) -> String {
    let s = v.to_string();
    if s.contains('.') || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_uvl;
    use super::*;

    #[test]
    fn reprints_minimal_parentheses() {
        for src in [
            "A => B => C",
            "(A => B) => C",
            "A | B & !C",
            "(A | B) & C",
            "!(A & B)",
            "a - (b - c) > 2",
            "a - b - c > 2.5",
            "len(S) == 3",
            "A <=> (B <=> C)",
        ] {
            let model = parse_uvl(&format!("features\n\tR\nconstraints\n\t{src}\n")).unwrap();
            assert_eq!(print_constraint(&model.constraints[0].expr), src);
        }
    }

    #[test]
    fn reals_keep_a_decimal_point() {
        assert_eq!(format_real(2.0), "2.0");
        assert_eq!(format_real(-0.5), "-0.5");
    }
}
