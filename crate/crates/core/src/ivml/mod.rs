//! The IVML subset produced by the transformation: projects made of enums,
//! typed variables and constraints.

mod check;
mod emit;
mod parse;

use crate::diagnostic::Location;

pub use check::{check_project, Violation};
pub use emit::{emit_ivml, render_decl, render_expr};
pub use parse::{parse_ivml_subset, parse_ivml_with_locations};

#[derive(Debug, Clone, PartialEq)]
pub struct IvmlProject {
    pub name: String,
    pub declarations: Vec<IvmlDecl>,
}

impl IvmlProject {
    pub fn new(name: impl Into<String>) -> Self {
        IvmlProject {
            name: name.into(),
            declarations: Vec::new(),
        }
    }

    pub fn enums(&self) -> impl Iterator<Item = &EnumDef> {
        self.declarations.iter().filter_map(|d| match d {
            IvmlDecl::Enum(e) => Some(e),
            _ => None,
        })
    }

    pub fn variables(&self) -> impl Iterator<Item = &VarDecl> {
        self.declarations.iter().filter_map(|d| match d {
            IvmlDecl::Var(v) => Some(v),
            _ => None,
        })
    }

    pub fn constraints(&self) -> impl Iterator<Item = &IvmlExpr> {
        self.declarations.iter().filter_map(|d| match d {
            IvmlDecl::Constraint(c) => Some(c),
            _ => None,
        })
    }

    pub fn find_enum(&self, name: &str) -> Option<&EnumDef> {
        self.enums().find(|e| e.name == name)
    }

    pub fn find_variable(&self, name: &str) -> Option<&VarDecl> {
        self.variables().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IvmlDecl {
    Enum(EnumDef),
    Var(VarDecl),
    Constraint(IvmlExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDef {
    pub name: String,
    pub literals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: IvmlType,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IvmlType {
    Boolean,
    Integer,
    Real,
    String,
    /// An instance of a user-defined enum.
    Enum(String),
    SetOf(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IvmlOp {
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
    Add,
    Sub,
    Mul,
    Div,
}

impl IvmlOp {
    pub fn keyword(self) -> &'static str {
        match self {
            IvmlOp::And => "and",
            IvmlOp::Or => "or",
            IvmlOp::Implies => "implies",
            IvmlOp::Iff => "iff",
            IvmlOp::Eq => "==",
            IvmlOp::Ne => "<>",
            IvmlOp::Gt => ">",
            IvmlOp::Ge => ">=",
            IvmlOp::Lt => "<",
            IvmlOp::Le => "<=",
            IvmlOp::Add => "+",
            IvmlOp::Sub => "-",
            IvmlOp::Mul => "*",
            IvmlOp::Div => "/",
        }
    }

    /// Loosest first: `implies`/`iff`, `or`, `and`, equality, relational,
    /// additive, multiplicative.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            IvmlOp::Implies | IvmlOp::Iff => 1,
            IvmlOp::Or => 2,
            IvmlOp::And => 3,
            IvmlOp::Eq | IvmlOp::Ne => 4,
            IvmlOp::Gt | IvmlOp::Ge | IvmlOp::Lt | IvmlOp::Le => 5,
            IvmlOp::Add | IvmlOp::Sub => 6,
            IvmlOp::Mul | IvmlOp::Div => 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IvmlExpr {
    Var(String),
    /// Qualified literal `Enum.Literal`.
    EnumLiteral { enum_name: String, literal: String },
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    IsDefined(String),
    Size(String),
    Includes {
        set: String,
        enum_name: String,
        literal: String,
    },
    Floor(Box<IvmlExpr>),
    Not(Box<IvmlExpr>),
    Binary(IvmlOp, Box<IvmlExpr>, Box<IvmlExpr>),
}

impl IvmlExpr {
    pub fn var(name: impl Into<String>) -> Self {
        IvmlExpr::Var(name.into())
    }

    pub fn literal(enum_name: impl Into<String>, literal: impl Into<String>) -> Self {
        IvmlExpr::EnumLiteral {
            enum_name: enum_name.into(),
            literal: literal.into(),
        }
    }

    pub fn includes(set: impl Into<String>, enum_name: impl Into<String>, literal: impl Into<String>) -> Self {
        IvmlExpr::Includes {
            set: set.into(),
            enum_name: enum_name.into(),
            literal: literal.into(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: IvmlExpr) -> Self {
        IvmlExpr::Not(Box::new(inner))
    }

    pub fn binary(op: IvmlOp, lhs: IvmlExpr, rhs: IvmlExpr) -> Self {
        IvmlExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: IvmlExpr, rhs: IvmlExpr) -> Self {
        Self::binary(IvmlOp::And, lhs, rhs)
    }

    pub fn implies(lhs: IvmlExpr, rhs: IvmlExpr) -> Self {
        Self::binary(IvmlOp::Implies, lhs, rhs)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, IvmlExpr::Bool(true))
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, IvmlExpr::Binary(..))
    }
}

/// Errors from parsing or emitting IVML.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IvmlError {
    #[error("{location}: {message}")]
    Syntax { location: Location, message: String },
    #[error("{location}: unsupported IVML construct `{construct}`")]
    Unsupported { location: Location, construct: String },
    #[error("invalid IVML project: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// IVML keywords that cannot be used as declaration names.
pub(crate) const KEYWORDS: &[&str] = &[
    "project", "enum", "setOf", "Boolean", "Integer", "Real", "String", "isDefined", "size",
    "includes", "floor", "not", "and", "or", "xor", "implies", "iff", "true", "false",
];

/// Advanced IVML constructs outside the supported subset.
pub(crate) const UNSUPPORTED: &[&str] = &[
    "compound", "typedef", "abstract", "refines", "refTo", "refBy", "sequenceOf", "attribute",
    "annotate", "assign", "to", "conflicts", "if", "then", "else", "endif", "def", "let", "in",
    "import", "interface", "export", "version", "freeze", "eval", "static", "const", "with",
    "insert", "null", "self", "Constraint",
];
