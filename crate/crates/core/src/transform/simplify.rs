use crate::ivml::{IvmlExpr, IvmlOp};

/// Folds Boolean constants and double negations until nothing changes.
///
/// The rules are sound under three-valued (Kleene) evaluation, so simplified
/// constraints accept exactly the same assignments as the originals.
pub fn simplify(expr: IvmlExpr) -> IvmlExpr {
    let mut current = expr;
    loop {
        let next = step(current.clone());
        if next == current {
            return current;
        }
        current = next;
    }
}

fn step(expr: IvmlExpr) -> IvmlExpr {
    use IvmlExpr::{Binary, Bool, Not};
    match expr {
        Not(inner) => match step(*inner) {
            Bool(b) => Bool(!b),
            Not(x) => *x,
            other => IvmlExpr::not(other),
        },
        IvmlExpr::Floor(inner) => IvmlExpr::Floor(Box::new(step(*inner))),
        Binary(op, lhs, rhs) => fold(op, step(*lhs), step(*rhs)),
        other => other,
    }
}

fn fold(op: IvmlOp, lhs: IvmlExpr, rhs: IvmlExpr) -> IvmlExpr {
    use IvmlExpr::Bool;
    match (op, lhs, rhs) {
        (IvmlOp::And, Bool(true), x) | (IvmlOp::And, x, Bool(true)) => x,
        (IvmlOp::And, Bool(false), _) | (IvmlOp::And, _, Bool(false)) => Bool(false),
        (IvmlOp::Or, Bool(false), x) | (IvmlOp::Or, x, Bool(false)) => x,
        (IvmlOp::Or, Bool(true), _) | (IvmlOp::Or, _, Bool(true)) => Bool(true),
        (IvmlOp::Implies, Bool(true), x) => x,
        (IvmlOp::Implies, _, Bool(true)) | (IvmlOp::Implies, Bool(false), _) => Bool(true),
        (IvmlOp::Implies, x, Bool(false)) => IvmlExpr::not(x),
        (IvmlOp::Iff | IvmlOp::Eq, Bool(b), x) | (IvmlOp::Iff | IvmlOp::Eq, x, Bool(b)) => {
            if b {
                x
            } else {
                IvmlExpr::not(x)
            }
        }
        (IvmlOp::Ne, Bool(b), x) | (IvmlOp::Ne, x, Bool(b)) => {
            if b {
                IvmlExpr::not(x)
            } else {
                x
            }
        }
        (op, lhs, rhs) => IvmlExpr::binary(op, lhs, rhs),
    }
}
