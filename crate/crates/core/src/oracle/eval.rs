//! Three-valued evaluation of IVML constraints over finite assignments.
//!
//! An enum instance may be UNDEFINED. Reading it anywhere except inside
//! `isDefined` yields *unknown*, which propagates with Kleene semantics
//! (`false and unknown` is false, `true or unknown` is true). A constraint
//! holds only when it evaluates to true.

use std::collections::{BTreeSet, HashMap};

use crate::ivml::{IvmlExpr, IvmlOp, IvmlProject, IvmlType};

use super::{OracleError, Value};

/// Runtime value during evaluation.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Val {
    Unknown,
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    /// Enum index and literal index.
    Enum(usize, usize),
    /// Enum index and membership mask.
    Set(usize, u64),
}

#[derive(Debug, Clone)]
enum CExpr {
    Var(usize),
    Lit(Val),
    IsDefined(usize),
    Size(usize),
    Includes(usize, u64),
    Floor(Box<CExpr>),
    Not(Box<CExpr>),
    Binary(IvmlOp, Box<CExpr>, Box<CExpr>),
}

/// Finite domain of one variable, or `None` for String/Integer/Real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Domain {
    Boolean,
    /// Literal count; digit 0 is UNDEFINED, digit i+1 is literal i.
    Enum { enum_idx: usize, literals: usize },
    /// Digit is the membership mask.
    Set { enum_idx: usize, literals: usize },
    Unbounded(TypeTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TypeTag {
    Integer,
    Real,
    String,
}

impl Domain {
    /// Number of values, or `None` if unbounded.
    pub(crate) fn size(self) -> Option<u64> {
        match self {
            Domain::Boolean => Some(2),
            Domain::Enum { literals, .. } => Some(literals as u64 + 1),
            Domain::Set { literals, .. } => 1u64.checked_shl(literals as u32),
            Domain::Unbounded(_) => None,
        }
    }
}

/// A project with names resolved to indices.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub(crate) enums: Vec<(String, Vec<String>)>,
    pub(crate) vars: Vec<(String, Domain)>,
    pub(crate) var_index: HashMap<String, usize>,
    constraints: Vec<CExpr>,
}

/// Source of variable values for [`Compiled::holds`].
pub(crate) trait Env {
    fn get(&self, var: usize) -> Val;
}

/// Assignment encoded as one digit per variable (see [`Domain`]).
pub(crate) struct Digits<'a> {
    pub(crate) compiled: &'a Compiled,
    pub(crate) digits: &'a [u64],
}

impl Env for Digits<'_> {
    fn get(&self, var: usize) -> Val {
        let d = self.digits[var];
        match self.compiled.vars[var].1 {
            Domain::Boolean => Val::Bool(d == 1),
            Domain::Enum { enum_idx, .. } => {
                if d == 0 {
                    Val::Unknown
                } else {
                    Val::Enum(enum_idx, d as usize - 1)
                }
            }
            Domain::Set { enum_idx, .. } => Val::Set(enum_idx, d),
            Domain::Unbounded(_) => Val::Unknown,
        }
    }
}

/// Assignment given as resolved runtime values.
pub(crate) struct Values(pub(crate) Vec<Val>);

impl Env for Values {
    fn get(&self, var: usize) -> Val {
        self.0[var].clone()
    }
}

impl Compiled {
    pub(crate) fn new(project: &IvmlProject) -> Result<Self, OracleError> {
        let enums: Vec<(String, Vec<String>)> = project
            .enums()
            .map(|e| (e.name.clone(), e.literals.clone()))
            .collect();
        let enum_index: HashMap<&str, usize> = enums.iter().enumerate().map(|(i, e)| (e.0.as_str(), i)).collect();
        let lookup_enum = |name: &str| {
            enum_index
                .get(name)
                .copied()
                .ok_or_else(|| OracleError::TypeMismatch(format!("unknown enum `{name}`")))
        };

        let mut vars = Vec::new();
        for v in project.variables() {
            let domain = match &v.ty {
                IvmlType::Boolean => Domain::Boolean,
                IvmlType::Integer => Domain::Unbounded(TypeTag::Integer),
                IvmlType::Real => Domain::Unbounded(TypeTag::Real),
                IvmlType::String => Domain::Unbounded(TypeTag::String),
                IvmlType::Enum(e) => {
                    let enum_idx = lookup_enum(e)?;
                    Domain::Enum {
                        enum_idx,
                        literals: enums[enum_idx].1.len(),
                    }
                }
                IvmlType::SetOf(e) => {
                    let enum_idx = lookup_enum(e)?;
                    let literals = enums[enum_idx].1.len();
                    if literals > 63 {
                        return Err(OracleError::TypeMismatch(format!(
                            "set `{}` ranges over {literals} literals; at most 63 are supported",
                            v.name
                        )));
                    }
                    Domain::Set { enum_idx, literals }
                }
            };
            vars.push((v.name.clone(), domain));
        }
        let var_index = vars.iter().enumerate().map(|(i, v)| (v.0.clone(), i)).collect();

        let mut compiled = Compiled {
            enums,
            vars,
            var_index,
            constraints: Vec::new(),
        };
        let constraints = project
            .constraints()
            .map(|c| compiled.compile(c))
            .collect::<Result<Vec<_>, _>>()?;
        compiled.constraints = constraints;
        Ok(compiled)
    }

    fn var(&self, name: &str) -> Result<usize, OracleError> {
        self.var_index
            .get(name)
            .copied()
            .ok_or_else(|| OracleError::TypeMismatch(format!("undeclared variable `{name}`")))
    }

    fn literal(&self, enum_name: &str, literal: &str) -> Result<(usize, usize), OracleError> {
        self.enums
            .iter()
            .enumerate()
            .find(|(_, e)| e.0 == enum_name)
            .and_then(|(i, e)| e.1.iter().position(|l| l == literal).map(|l| (i, l)))
            .ok_or_else(|| OracleError::TypeMismatch(format!("unknown literal `{enum_name}.{literal}`")))
    }

    fn compile(&self, expr: &IvmlExpr) -> Result<CExpr, OracleError> {
        Ok(match expr {
            IvmlExpr::Var(name) => CExpr::Var(self.var(name)?),
            IvmlExpr::EnumLiteral { enum_name, literal } => {
                let (e, l) = self.literal(enum_name, literal)?;
                CExpr::Lit(Val::Enum(e, l))
            }
            IvmlExpr::Bool(b) => CExpr::Lit(Val::Bool(*b)),
            IvmlExpr::Int(v) => CExpr::Lit(Val::Int(*v)),
            IvmlExpr::Real(v) => CExpr::Lit(Val::Real(*v)),
            IvmlExpr::Str(s) => CExpr::Lit(Val::Str(s.clone())),
            IvmlExpr::IsDefined(name) => CExpr::IsDefined(self.var(name)?),
            IvmlExpr::Size(name) => {
                let v = self.var(name)?;
                match self.vars[v].1 {
                    Domain::Set { .. } | Domain::Unbounded(TypeTag::String) => CExpr::Size(v),
                    _ => {
                        return Err(OracleError::TypeMismatch(format!(
                            "size() applied to non-set variable `{name}`"
                        )))
                    }
                }
            }
            IvmlExpr::Includes {
                set,
                enum_name,
                literal,
            } => {
                let v = self.var(set)?;
                let (e, l) = self.literal(enum_name, literal)?;
                match self.vars[v].1 {
                    Domain::Set { enum_idx, .. } if enum_idx == e => CExpr::Includes(v, 1 << l),
                    _ => {
                        return Err(OracleError::TypeMismatch(format!(
                            "includes() applied to `{set}`, which is not a set of {enum_name}"
                        )))
                    }
                }
            }
            IvmlExpr::Floor(inner) => CExpr::Floor(Box::new(self.compile(inner)?)),
            IvmlExpr::Not(inner) => CExpr::Not(Box::new(self.compile(inner)?)),
            IvmlExpr::Binary(op, lhs, rhs) => {
                CExpr::Binary(*op, Box::new(self.compile(lhs)?), Box::new(self.compile(rhs)?))
            }
        })
    }

    /// True iff every constraint evaluates to true.
    pub(crate) fn holds(&self, env: &impl Env) -> bool {
        self.constraints.iter().all(|c| eval(c, env) == Val::Bool(true))
    }

    /// Converts public values into runtime values, checking types.
    pub(crate) fn resolve(&self, assignment: &super::IvmlAssignment) -> Result<Values, OracleError> {
        let mut out = Vec::with_capacity(self.vars.len());
        for (name, domain) in &self.vars {
            let value = assignment
                .get(name)
                .ok_or_else(|| OracleError::MissingVariable(name.clone()))?;
            let mismatch = || OracleError::TypeMismatch(format!("value {value} does not fit variable `{name}`"));
            let val = match (domain, value) {
                (Domain::Boolean, Value::Bool(b)) => Val::Bool(*b),
                (Domain::Unbounded(TypeTag::Integer), Value::Int(v)) => Val::Int(*v),
                (Domain::Unbounded(TypeTag::Real), Value::Real(v)) => Val::Real(*v),
                (Domain::Unbounded(TypeTag::String), Value::Str(s)) => Val::Str(s.clone()),
                (Domain::Enum { .. }, Value::Enum(None)) => Val::Unknown,
                (Domain::Enum { enum_idx, .. }, Value::Enum(Some(lit))) => {
                    let l = self.enums[*enum_idx].1.iter().position(|x| x == lit).ok_or_else(mismatch)?;
                    Val::Enum(*enum_idx, l)
                }
                (Domain::Set { enum_idx, .. }, Value::Set(members)) => {
                    let mut mask = 0u64;
                    for m in members {
                        let l = self.enums[*enum_idx].1.iter().position(|x| x == m).ok_or_else(mismatch)?;
                        mask |= 1 << l;
                    }
                    Val::Set(*enum_idx, mask)
                }
                _ => return Err(mismatch()),
            };
            out.push(val);
        }
        Ok(Values(out))
    }

    /// Decodes a digit vector into a public assignment.
    pub(crate) fn to_assignment(&self, digits: &[u64]) -> super::IvmlAssignment {
        self.vars
            .iter()
            .zip(digits)
            .map(|((name, domain), &d)| {
                let value = match *domain {
                    Domain::Boolean => Value::Bool(d == 1),
                    Domain::Enum { enum_idx, .. } => {
                        Value::Enum((d > 0).then(|| self.enums[enum_idx].1[d as usize - 1].clone()))
                    }
                    Domain::Set { enum_idx, .. } => Value::Set(
                        self.enums[enum_idx]
                            .1
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| d & (1 << i) != 0)
                            .map(|(_, l)| l.clone())
                            .collect::<BTreeSet<_>>(),
                    ),
                    Domain::Unbounded(_) => unreachable!("unbounded domains are never enumerated"),
                };
                (name.clone(), value)
            })
            .collect()
    }
}

fn kleene_not(v: Val) -> Val {
    match v {
        Val::Bool(b) => Val::Bool(!b),
        _ => Val::Unknown,
    }
}

fn kleene_and(a: Val, b: Val) -> Val {
    match (a, b) {
        (Val::Bool(false), _) | (_, Val::Bool(false)) => Val::Bool(false),
        (Val::Bool(true), Val::Bool(true)) => Val::Bool(true),
        _ => Val::Unknown,
    }
}

fn kleene_or(a: Val, b: Val) -> Val {
    kleene_not(kleene_and(kleene_not(a), kleene_not(b)))
}

fn number(v: &Val) -> Option<f64> {
    match v {
        Val::Int(i) => Some(*i as f64),
        Val::Real(r) => Some(*r),
        _ => None,
    }
}

fn equal(a: &Val, b: &Val) -> Val {
    match (a, b) {
        (Val::Unknown, _) | (_, Val::Unknown) => Val::Unknown,
        (Val::Int(x), Val::Int(y)) => Val::Bool(x == y),
        _ => match (number(a), number(b)) {
            (Some(x), Some(y)) => Val::Bool(x == y),
            _ => Val::Bool(a == b),
        },
    }
}

fn arithmetic(op: IvmlOp, a: Val, b: Val) -> Val {
    if let (Val::Int(x), Val::Int(y)) = (&a, &b) {
        let r = match op {
            IvmlOp::Add => x.checked_add(*y),
            IvmlOp::Sub => x.checked_sub(*y),
            IvmlOp::Mul => x.checked_mul(*y),
            _ => x.checked_div(*y),
        };
        return r.map_or(Val::Unknown, Val::Int);
    }
    match (number(&a), number(&b)) {
        (Some(x), Some(y)) => {
            let r = match op {
                IvmlOp::Add => x + y,
                IvmlOp::Sub => x - y,
                IvmlOp::Mul => x * y,
                _ => x / y,
            };
            if r.is_finite() {
                Val::Real(r)
            } else {
                Val::Unknown
            }
        }
        _ => Val::Unknown,
    }
}

fn eval(expr: &CExpr, env: &impl Env) -> Val {
    match expr {
        CExpr::Var(v) => env.get(*v),
        CExpr::Lit(v) => v.clone(),
        CExpr::IsDefined(v) => Val::Bool(env.get(*v) != Val::Unknown),
        CExpr::Size(v) => match env.get(*v) {
            Val::Set(_, mask) => Val::Int(mask.count_ones().into()),
            Val::Str(s) => Val::Int(s.chars().count() as i64),
            _ => Val::Unknown,
        },
        CExpr::Includes(v, bit) => match env.get(*v) {
            Val::Set(_, mask) => Val::Bool(mask & bit != 0),
            _ => Val::Unknown,
        },
        CExpr::Floor(inner) => match eval(inner, env) {
            Val::Int(i) => Val::Int(i),
            Val::Real(r) => Val::Int(r.floor() as i64),
            _ => Val::Unknown,
        },
        CExpr::Not(inner) => kleene_not(eval(inner, env)),
        CExpr::Binary(op, lhs, rhs) => {
            let a = eval(lhs, env);
            // short circuit keeps Kleene semantics and saves work
            match (op, &a) {
                (IvmlOp::And, Val::Bool(false)) => return Val::Bool(false),
                (IvmlOp::Or, Val::Bool(true)) => return Val::Bool(true),
                (IvmlOp::Implies, Val::Bool(false)) => return Val::Bool(true),
                _ => {}
            }
            let b = eval(rhs, env);
            match op {
                IvmlOp::And => kleene_and(a, b),
                IvmlOp::Or => kleene_or(a, b),
                IvmlOp::Implies => kleene_or(kleene_not(a), b),
                IvmlOp::Iff => match (a, b) {
                    (Val::Bool(x), Val::Bool(y)) => Val::Bool(x == y),
                    _ => Val::Unknown,
                },
                IvmlOp::Eq => equal(&a, &b),
                IvmlOp::Ne => kleene_not(equal(&a, &b)),
                IvmlOp::Lt | IvmlOp::Le | IvmlOp::Gt | IvmlOp::Ge => {
                    let ord = match (&a, &b) {
                        (Val::Str(x), Val::Str(y)) => Some(x.cmp(y)),
                        _ => number(&a).zip(number(&b)).and_then(|(x, y)| x.partial_cmp(&y)),
                    };
                    match ord {
                        Some(o) => Val::Bool(match op {
                            IvmlOp::Lt => o.is_lt(),
                            IvmlOp::Le => o.is_le(),
                            IvmlOp::Gt => o.is_gt(),
                            _ => o.is_ge(),
                        }),
                        None => Val::Unknown,
                    }
                }
                IvmlOp::Add | IvmlOp::Sub | IvmlOp::Mul | IvmlOp::Div => arithmetic(*op, a, b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivml::parse_ivml_subset;

    fn compiled(body: &str) -> Compiled {
        Compiled::new(&parse_ivml_subset(&format!("project P {{\n{body}\n}}\n")).unwrap()).unwrap()
    }

    fn holds(c: &Compiled, digits: &[u64]) -> bool {
        c.holds(&Digits { compiled: c, digits })
    }

    #[test]
    fn undefined_instance_makes_comparisons_unknown() {
        let c = compiled("enum E {A, B}; E x; Boolean b; x == E.A or b;");
        assert!(!holds(&c, &[0, 0]));
        assert!(holds(&c, &[0, 1]));
        assert!(holds(&c, &[1, 0]));
        // unknown under negation stays unknown
        let c = compiled("enum E {A, B}; E x; not (x == E.A);");
        assert!(!holds(&c, &[0]));
        assert!(holds(&c, &[2]));
    }

    #[test]
    fn guarded_membership_is_false_when_undefined() {
        let c = compiled("enum E {A, B}; E x; not (isDefined(x) and x == E.A);");
        assert!(holds(&c, &[0]));
        assert!(!holds(&c, &[1]));
    }

    #[test]
    fn set_functions() {
        let c = compiled("enum E {A, B, C}; setOf(E) s; size(s) >= 2; includes(s, E.C);");
        assert!(holds(&c, &[0b101]));
        assert!(!holds(&c, &[0b011]));
        assert!(!holds(&c, &[0b100]));
    }

    #[test]
    fn arithmetic_and_floor() {
        let c = compiled("Integer n; floor(7 / 2) == 3; 1 + 2 * 3 == 7; 7.0 / 2 > 3;");
        assert!(c.holds(&Values(vec![Val::Int(0)])));
        let c = compiled("1 / 0 == 0 or true;");
        assert!(c.holds(&Values(vec![])));
    }

    #[test]
    fn type_mismatch_is_reported() {
        let project = IvmlProject {
            name: "P".into(),
            declarations: vec![
                crate::ivml::IvmlDecl::Var(crate::ivml::VarDecl {
                    name: "b".into(),
                    ty: IvmlType::Boolean,
                }),
                crate::ivml::IvmlDecl::Constraint(IvmlExpr::Size("b".into())),
            ],
        };
        assert!(matches!(Compiled::new(&project), Err(OracleError::TypeMismatch(_))));
    }
}
