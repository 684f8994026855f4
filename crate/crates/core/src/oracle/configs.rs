//! Tree-wise enumeration of valid UVL configurations.
//!
//! Core features (the root and every feature on an all-mandatory chain from
//! it) are selected in every configuration. The remaining features get one
//! bit each, so a configuration is a `u64` mask.

use std::collections::HashMap;

use crate::uvl::{BinaryOp, ConstraintExpr, FeatureNode, FeatureType, GroupKind, UvlModel};

use super::OracleError;

/// Valid configurations of a Boolean-level model in compact form.
#[derive(Debug, Clone)]
pub(crate) struct ConfigSpace {
    pub(crate) core: Vec<String>,
    /// Feature name per bit.
    pub(crate) variable: Vec<String>,
    /// Sorted ascending.
    pub(crate) masks: Vec<u64>,
}

impl ConfigSpace {
    pub(crate) fn bit(&self, name: &str) -> Option<usize> {
        self.variable.iter().position(|v| v == name)
    }

    pub(crate) fn to_configuration(&self, mask: u64) -> super::Configuration {
        self.core
            .iter()
            .map(|n| (n.clone(), true))
            .chain(
                self.variable
                    .iter()
                    .enumerate()
                    .map(|(i, n)| (n.clone(), mask & (1 << i) != 0)),
            )
            .collect()
    }
}

/// Number of features that are not always selected.
pub fn variable_feature_count(model: &UvlModel) -> usize {
    let mut core = Vec::new();
    collect_core(&model.root, &mut core);
    model.feature_count() - core.len()
}

fn collect_core<'a>(node: &'a FeatureNode, out: &mut Vec<&'a FeatureNode>) {
    out.push(node);
    for group in node.groups.iter().filter(|g| g.kind == GroupKind::Mandatory) {
        for child in &group.children {
            collect_core(child, out);
        }
    }
}

pub(crate) fn enumerate(model: &UvlModel, cap: u32) -> Result<ConfigSpace, OracleError> {
    if let Some(f) = model.features().into_iter().find(|f| f.declared_type != FeatureType::Boolean) {
        return Err(OracleError::NonBooleanModel(f.name.clone()));
    }
    let mut core_nodes = Vec::new();
    collect_core(&model.root, &mut core_nodes);
    let core: Vec<String> = core_nodes.iter().map(|n| n.name.clone()).collect();
    let variable: Vec<String> = model
        .features()
        .into_iter()
        .map(|f| f.name.clone())
        .filter(|n| !core.contains(n))
        .collect();
    if variable.len() > cap as usize {
        return Err(OracleError::CapExceeded {
            cap,
            needed: format!("{} variable features", variable.len()),
        });
    }

    let bits: HashMap<&str, usize> = variable.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let structural = subtree(&model.root, &bits);
    let constraints: Vec<Compiled> = model
        .constraints
        .iter()
        .map(|c| compile(&c.expr, &bits))
        .collect();
    let mut masks: Vec<u64> = structural
        .into_iter()
        .filter(|&m| constraints.iter().all(|c| eval(c, m) == V::Bool(true)))
        .collect();
    masks.sort_unstable();
    Ok(ConfigSpace { core, variable, masks })
}

fn own_bit(node: &FeatureNode, bits: &HashMap<&str, usize>) -> u64 {
    bits.get(node.name.as_str()).map_or(0, |b| 1 << b)
}

/// All masks for `node`'s subtree given that `node` is selected.
fn subtree(node: &FeatureNode, bits: &HashMap<&str, usize>) -> Vec<u64> {
    let mut acc = vec![own_bit(node, bits)];
    for group in &node.groups {
        let per_child: Vec<Vec<u64>> = group.children.iter().map(|c| subtree(c, bits)).collect();
        let n = group.children.len();
        let options: Vec<u64> = match group.kind {
            GroupKind::Mandatory => product(&per_child),
            GroupKind::Optional => {
                let with_none: Vec<Vec<u64>> = per_child
                    .into_iter()
                    .map(|mut v| {
                        v.insert(0, 0);
                        v
                    })
                    .collect();
                product(&with_none)
            }
            GroupKind::Alternative => per_child.concat(),
            GroupKind::Or | GroupKind::Cardinality { .. } => {
                let (lo, hi) = match group.kind {
                    GroupKind::Cardinality { lo, hi } => (lo as usize, hi as usize),
                    _ => (1, n),
                };
                let mut out = Vec::new();
                for subset in 0u64..(1 << n) {
                    let k = subset.count_ones() as usize;
                    if k < lo || k > hi {
                        continue;
                    }
                    let chosen: Vec<Vec<u64>> = (0..n)
                        .filter(|i| subset & (1 << i) != 0)
                        .map(|i| per_child[i].clone())
                        .collect();
                    out.extend(product(&chosen));
                }
                out
            }
        };
        acc = product(&[acc, options]);
    }
    acc
}

/// Cartesian product of disjoint-bit alternatives, combined by OR.
fn product(factors: &[Vec<u64>]) -> Vec<u64> {
    let mut out = vec![0u64];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            for &b in f {
                next.push(a | b);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum V {
    Bool(bool),
    Num(f64),
    Str(String),
}

/// Constraint with features resolved to bits; `None` marks a core feature.
#[derive(Debug, Clone)]
enum Compiled {
    Feature(Option<u64>),
    Lit(V),
    Not(Box<Compiled>),
    Binary(BinaryOp, Box<Compiled>, Box<Compiled>),
    Floor(Box<Compiled>),
    Len(Box<Compiled>),
}

fn compile(expr: &ConstraintExpr, bits: &HashMap<&str, usize>) -> Compiled {
    match expr {
        ConstraintExpr::Feature(name) => Compiled::Feature(bits.get(name.as_str()).map(|b| 1 << b)),
        ConstraintExpr::Bool(b) => Compiled::Lit(V::Bool(*b)),
        ConstraintExpr::Int(v) => Compiled::Lit(V::Num(*v as f64)),
        ConstraintExpr::Real(v) => Compiled::Lit(V::Num(*v)),
        ConstraintExpr::Str(s) => Compiled::Lit(V::Str(s.clone())),
        ConstraintExpr::Not(inner) => Compiled::Not(Box::new(compile(inner, bits))),
        ConstraintExpr::Binary(op, l, r) => {
            Compiled::Binary(*op, Box::new(compile(l, bits)), Box::new(compile(r, bits)))
        }
        ConstraintExpr::Len(inner) => Compiled::Len(Box::new(compile(inner, bits))),
        ConstraintExpr::Floor(inner) => Compiled::Floor(Box::new(compile(inner, bits))),
    }
}

fn truth(v: V) -> bool {
    v == V::Bool(true)
}

/// Two-valued evaluation: unselected features are false.
fn eval(c: &Compiled, mask: u64) -> V {
    match c {
        Compiled::Feature(bit) => V::Bool(bit.is_none_or(|b| mask & b != 0)),
        Compiled::Lit(v) => v.clone(),
        Compiled::Not(inner) => V::Bool(!truth(eval(inner, mask))),
        Compiled::Floor(inner) => match eval(inner, mask) {
            V::Num(x) => V::Num(x.floor()),
            other => other,
        },
        Compiled::Len(inner) => match eval(inner, mask) {
            V::Str(s) => V::Num(s.chars().count() as f64),
            other => other,
        },
        Compiled::Binary(op, l, r) => {
            let (a, b) = (eval(l, mask), eval(r, mask));
            match op {
                BinaryOp::And => V::Bool(truth(a) && truth(b)),
                BinaryOp::Or => V::Bool(truth(a) || truth(b)),
                BinaryOp::Implies => V::Bool(!truth(a) || truth(b)),
                BinaryOp::Iff => V::Bool(truth(a) == truth(b)),
                BinaryOp::Eq => V::Bool(a == b),
                BinaryOp::Ne => V::Bool(a != b),
                _ => match (a, b) {
                    (V::Num(x), V::Num(y)) => match op {
                        BinaryOp::Lt => V::Bool(x < y),
                        BinaryOp::Le => V::Bool(x <= y),
                        BinaryOp::Gt => V::Bool(x > y),
                        BinaryOp::Ge => V::Bool(x >= y),
                        BinaryOp::Add => V::Num(x + y),
                        BinaryOp::Sub => V::Num(x - y),
                        BinaryOp::Mul => V::Num(x * y),
                        _ => V::Num(x / y),
                    },
                    _ => V::Bool(false),
                },
            }
        }
    }
}
