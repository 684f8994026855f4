use std::collections::{HashMap, HashSet};

use crate::uvl::{GroupKind, UvlModel};

use super::{Naming, TransformError, TransformOptions};
use crate::diagnostic::Location;

/// Suffix families for generated names. Compounds are reserved: the flattening
/// transformation never creates one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuffixKind {
    Enum,
    Set,
    Compound,
}

impl SuffixKind {
    fn marker(self) -> &'static str {
        match self {
            SuffixKind::Enum => "__ENUM__",
            SuffixKind::Set => "__SET__",
            SuffixKind::Compound => "__COMPOUND__",
        }
    }
}

/// `<parent>__ENUM__<n>` or, for instances, `<parent>__ENUM__<n>__INSTANCE`.
pub fn suffix_name(parent: &str, kind: SuffixKind, number: u32, instance: bool) -> String {
    let mut name = format!("{parent}{}{number}", kind.marker());
    if instance {
        name.push_str("__INSTANCE");
    }
    name
}

/// Names generated for one alternative, or, or cardinality group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupNames {
    pub enum_name: String,
    /// Enum instance (alternative) or set variable (or/cardinality).
    pub variable: String,
}

/// Allocates generated names for one transformation run.
#[derive(Debug)]
pub struct NamePool {
    naming: Naming,
    overrides: HashMap<String, String>,
    source: HashSet<String>,
    taken: HashSet<String>,
    counters: HashMap<(String, SuffixKind), u32>,
    /// Variability groups seen per parent, for pretty-name numbering.
    groups_seen: HashMap<String, u32>,
}

impl NamePool {
    pub fn new(model: &UvlModel, opts: &TransformOptions) -> Self {
        NamePool {
            naming: opts.naming,
            overrides: opts.enum_names.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            source: model.features().into_iter().map(|f| f.name.clone()).collect(),
            taken: HashSet::new(),
            counters: HashMap::new(),
            groups_seen: HashMap::new(),
        }
    }

    /// Next number (starting at 1) for `kind` under `parent`.
    pub fn next_number(&mut self, parent: &str, kind: SuffixKind) -> u32 {
        let counter = self.counters.entry((parent.to_string(), kind)).or_insert(0);
        *counter += 1;
        *counter
    }

    /// Registers a variable named after its source feature.
    pub fn declare_source(&mut self, name: &str, location: Location) -> Result<(), TransformError> {
        if !self.taken.insert(name.to_string()) {
            return Err(TransformError::NameCollision {
                name: name.to_string(),
                location,
            });
        }
        Ok(())
    }

    /// Registers a generated name. It may reuse the source name of the group's
    /// own parent (pretty naming), but no other source or generated name.
    fn claim(&mut self, name: String, parent: &str, location: Location) -> Result<String, TransformError> {
        if self.taken.contains(&name) || (self.source.contains(&name) && name != parent) {
            return Err(TransformError::NameCollision { name, location });
        }
        self.taken.insert(name.clone());
        Ok(name)
    }

    /// Generates the enum and variable names for a group of `parent`.
    pub fn group_names(
        &mut self,
        parent: &str,
        kind: GroupKind,
        location: Location,
    ) -> Result<GroupNames, TransformError> {
        let is_set = !matches!(kind, GroupKind::Alternative);
        let (enum_name, variable) = match self.naming {
            Naming::Suffix => {
                let n = self.next_number(parent, SuffixKind::Enum);
                let enum_name = suffix_name(parent, SuffixKind::Enum, n, false);
                let variable = if is_set {
                    let m = self.next_number(parent, SuffixKind::Set);
                    suffix_name(parent, SuffixKind::Set, m, true)
                } else {
                    suffix_name(parent, SuffixKind::Enum, n, true)
                };
                (enum_name, variable)
            }
            Naming::Pretty => {
                let seen = self.groups_seen.entry(parent.to_string()).or_insert(0);
                *seen += 1;
                let ordinal = if *seen == 1 { String::new() } else { seen.to_string() };
                let stem = if kind == GroupKind::Or { "Options" } else { "Types" };
                let enum_name = match self.overrides.get(parent) {
                    Some(custom) if *seen == 1 => custom.clone(),
                    _ => format!("{parent}{stem}{ordinal}"),
                };
                (enum_name, format!("{parent}{ordinal}"))
            }
        };
        let enum_name = self.claim(enum_name, parent, location)?;
        let variable = self.claim(variable, parent, location)?;
        Ok(GroupNames { enum_name, variable })
    }
}
