//! UVL feature models: abstract syntax, parser, validation and a canonical printer.

mod lexer;
mod parser;
mod printer;
mod validate;

use std::fmt;

use crate::diagnostic::{Diagnostic, Location};

pub use parser::{parse_uvl, parse_uvl_named};
pub(crate) use printer::format_real;
pub use printer::{print_constraint, print_uvl};
pub use validate::validate_uvl;

/// A parsed UVL model: one feature tree plus its cross-tree constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct UvlModel {
    pub namespace: Option<String>,
    pub root: FeatureNode,
    pub constraints: Vec<Constraint>,
    /// File name used when rendering diagnostics.
    pub source_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FeatureType {
    #[default]
    Boolean,
    String,
    Integer,
    Real,
}

impl FeatureType {
    pub fn keyword(self) -> &'static str {
        match self {
            FeatureType::Boolean => "Boolean",
            FeatureType::String => "String",
            FeatureType::Integer => "Integer",
            FeatureType::Real => "Real",
        }
    }

    pub(crate) fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "Boolean" => Some(FeatureType::Boolean),
            "String" => Some(FeatureType::String),
            "Integer" => Some(FeatureType::Integer),
            "Real" => Some(FeatureType::Real),
            _ => None,
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, FeatureType::Integer | FeatureType::Real)
    }
}

/// An attribute from a `{...}` block. Values are kept as raw source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub key: String,
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureNode {
    pub name: String,
    pub declared_type: FeatureType,
    pub is_abstract: bool,
    pub attributes: Vec<Attribute>,
    pub groups: Vec<GroupNode>,
    pub location: Location,
}

impl FeatureNode {
    pub fn new(name: impl Into<String>) -> Self {
        FeatureNode {
            name: name.into(),
            declared_type: FeatureType::Boolean,
            is_abstract: false,
            attributes: Vec::new(),
            groups: Vec::new(),
            location: Location::default(),
        }
    }

    pub fn with_group(mut self, kind: GroupKind, children: Vec<FeatureNode>) -> Self {
        self.groups.push(GroupNode {
            kind,
            children,
            location: Location::default(),
        });
        self
    }

    pub fn children(&self) -> impl Iterator<Item = &FeatureNode> {
        self.groups.iter().flat_map(|g| g.children.iter())
    }

    /// Pre-order traversal of this feature and all its descendants.
    pub fn walk(&self) -> Vec<&FeatureNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            let children: Vec<_> = node.children().collect();
            stack.extend(children.into_iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Mandatory,
    Optional,
    Or,
    Alternative,
    Cardinality { lo: u32, hi: u32 },
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Mandatory => f.write_str("mandatory"),
            GroupKind::Optional => f.write_str("optional"),
            GroupKind::Or => f.write_str("or"),
            GroupKind::Alternative => f.write_str("alternative"),
            GroupKind::Cardinality { lo, hi } => write!(f, "[{lo}..{hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupNode {
    pub kind: GroupKind,
    pub children: Vec<FeatureNode>,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: ConstraintExpr,
    pub location: Location,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    And,
    Or,
    Implies,
    Iff,
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
            BinaryOp::Implies => "=>",
            BinaryOp::Iff => "<=>",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    /// Binding strength, loosest first: `<=>`, `=>`, `|`, `&`, comparisons,
    /// additive, multiplicative.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Iff => 1,
            BinaryOp::Implies => 2,
            BinaryOp::Or => 3,
            BinaryOp::And => 4,
            BinaryOp::Gt
            | BinaryOp::Ge
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Eq
            | BinaryOp::Ne => 5,
            BinaryOp::Add | BinaryOp::Sub => 6,
            BinaryOp::Mul | BinaryOp::Div => 7,
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(
            self,
            BinaryOp::And | BinaryOp::Or | BinaryOp::Implies | BinaryOp::Iff
        )
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 5
    }

    pub fn is_arithmetic(self) -> bool {
        self.precedence() >= 6
    }
}

/// Cross-tree constraint expression.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintExpr {
    Feature(String),
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Not(Box<ConstraintExpr>),
    Binary(BinaryOp, Box<ConstraintExpr>, Box<ConstraintExpr>),
    Len(Box<ConstraintExpr>),
    Floor(Box<ConstraintExpr>),
}

impl ConstraintExpr {
    pub fn feature(name: impl Into<String>) -> Self {
        ConstraintExpr::Feature(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: ConstraintExpr) -> Self {
        ConstraintExpr::Not(Box::new(inner))
    }

    pub fn binary(op: BinaryOp, lhs: ConstraintExpr, rhs: ConstraintExpr) -> Self {
        ConstraintExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Feature names referenced anywhere in the expression, in first-occurrence order.
    pub fn referenced_features(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ConstraintExpr::Feature(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            ConstraintExpr::Not(inner) | ConstraintExpr::Len(inner) | ConstraintExpr::Floor(inner) => {
                inner.collect_refs(out)
            }
            ConstraintExpr::Binary(_, lhs, rhs) => {
                lhs.collect_refs(out);
                rhs.collect_refs(out);
            }
            ConstraintExpr::Bool(_)
            | ConstraintExpr::Int(_)
            | ConstraintExpr::Real(_)
            | ConstraintExpr::Str(_) => {}
        }
    }
}

/// Lexing or parsing failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{location}: {message}")]
    Lex { location: Location, message: String },
    #[error("{location}: {message}")]
    Parse { location: Location, message: String },
}

impl SyntaxError {
    pub fn location(&self) -> Location {
        match self {
            SyntaxError::Lex { location, .. } | SyntaxError::Parse { location, .. } => *location,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            SyntaxError::Lex { message, .. } | SyntaxError::Parse { message, .. } => message,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.location(), self.message())
    }
}

impl UvlModel {
    /// Every feature in pre-order.
    pub fn features(&self) -> Vec<&FeatureNode> {
        self.root.walk()
    }

    pub fn feature_count(&self) -> usize {
        self.features().len()
    }

    pub fn find(&self, name: &str) -> Option<&FeatureNode> {
        self.features().into_iter().find(|f| f.name == name)
    }

    /// Copy with every source location reset, for structural comparison.
    pub fn without_locations(&self) -> UvlModel {
        fn strip(node: &FeatureNode) -> FeatureNode {
            FeatureNode {
                location: Location::default(),
                groups: node
                    .groups
                    .iter()
                    .map(|g| GroupNode {
                        kind: g.kind,
                        children: g.children.iter().map(strip).collect(),
                        location: Location::default(),
                    })
                    .collect(),
                ..node.clone()
            }
        }
        UvlModel {
            namespace: self.namespace.clone(),
            root: strip(&self.root),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    expr: c.expr.clone(),
                    location: Location::default(),
                })
                .collect(),
            source_name: String::new(),
        }
    }

    pub fn structurally_eq(&self, other: &UvlModel) -> bool {
        self.without_locations() == other.without_locations()
    }
}
