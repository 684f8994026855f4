//! Brute-force semantics oracle.
//!
//! Enumerates the valid configurations of a Boolean-level UVL model, maps
//! each one through the transformation's bindings, and independently
//! enumerates every assignment of the IVML project's finite domains. The two
//! sides are then compared as sets.

mod configs;
mod eval;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ivml::IvmlProject;
use crate::transform::{BindingKind, Bindings};
use crate::uvl::UvlModel;

pub use configs::variable_feature_count;
use eval::{Compiled, Digits, Domain};

/// Default limit: 24 variable features, 2^24 IVML candidate assignments.
pub const DEFAULT_CAP: u32 = 24;
/// Largest accepted cap; enumeration indices must fit in 64 bits.
pub const MAX_CAP: u32 = 62;
/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "UVL2IVML_CAP";

const SAMPLE_LIMIT: usize = 5;

/// Cap from [`CAP_ENV`], or [`DEFAULT_CAP`] if unset.
pub fn cap_from_env() -> Result<u32, String> {
    match std::env::var(CAP_ENV) {
        Ok(raw) => parse_cap(&raw),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

pub fn parse_cap(raw: &str) -> Result<u32, String> {
    match raw.trim().parse::<u32>() {
        Ok(c) if (1..=MAX_CAP).contains(&c) => Ok(c),
        _ => Err(format!("invalid cap `{raw}`: expected an integer in 1..={MAX_CAP}")),
    }
}

/// Selection state per feature.
pub type Configuration = BTreeMap<String, bool>;

/// Value per declared IVML variable.
pub type IvmlAssignment = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    /// Enum instance; `None` is UNDEFINED.
    Enum(Option<String>),
    Set(BTreeSet<String>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Enum(Some(l)) => f.write_str(l),
            Value::Enum(None) => f.write_str("UNDEFINED"),
            Value::Set(s) => write!(f, "{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration cap of {cap} exceeded ({needed}); raise it with --cap or {CAP_ENV}")]
    CapExceeded { cap: u32, needed: String },
    #[error("`{0}` is not Boolean; only Boolean-level models can be enumerated")]
    NonBooleanModel(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("assignment has no value for `{0}`")]
    MissingVariable(String),
    #[error("configuration selects both `{first}` and `{second}` of one alternative group")]
    TwoAlternatives { first: String, second: String },
}

/// All valid configurations of `model`, sorted.
pub fn enumerate_uvl_configurations(model: &UvlModel, cap: u32) -> Result<Vec<Configuration>, OracleError> {
    let space = configs::enumerate(model, cap)?;
    Ok(space.masks.iter().map(|&m| space.to_configuration(m)).collect())
}

/// Whether every constraint of `project` evaluates to true under `assignment`.
pub fn evaluate_ivml(project: &IvmlProject, assignment: &IvmlAssignment) -> Result<bool, OracleError> {
    let compiled = Compiled::new(project)?;
    let values = compiled.resolve(assignment)?;
    Ok(compiled.holds(&values))
}

/// Image of a configuration under the bindings. Features missing from
/// `config` count as unselected.
pub fn map_configuration(config: &Configuration, bindings: &Bindings) -> Result<IvmlAssignment, OracleError> {
    let selected = |f: &str| config.get(f).copied().unwrap_or(false);
    let mut out = IvmlAssignment::new();
    let mut chosen: BTreeMap<&str, &str> = BTreeMap::new();
    for b in bindings.values() {
        match &b.kind {
            BindingKind::AlwaysIncluded | BindingKind::FollowsParent => {}
            BindingKind::BooleanVar(var) => {
                out.insert(var.clone(), Value::Bool(selected(&b.feature)));
            }
            BindingKind::AltMember { instance, literal, .. } => {
                let entry = out.entry(instance.clone()).or_insert(Value::Enum(None));
                if selected(&b.feature) {
                    if let Some(first) = chosen.insert(instance, literal) {
                        return Err(OracleError::TwoAlternatives {
                            first: first.to_string(),
                            second: literal.clone(),
                        });
                    }
                    *entry = Value::Enum(Some(literal.clone()));
                }
            }
            BindingKind::OrMember { set, literal, .. } => {
                let entry = out.entry(set.clone()).or_insert_with(|| Value::Set(BTreeSet::new()));
                if let (true, Value::Set(members)) = (selected(&b.feature), entry) {
                    members.insert(literal.clone());
                }
            }
            BindingKind::TypedVar { .. } => return Err(OracleError::NonBooleanModel(b.feature.clone())),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub uvl_count: u64,
    pub ivml_count: u64,
    pub bijective: bool,
    pub injective: bool,
    /// Valid IVML assignments that no configuration maps to.
    pub unmapped_count: u64,
    /// Up to five, in enumeration order.
    pub unmapped_ivml: Vec<IvmlAssignment>,
    /// Configurations whose image violates the project.
    pub invalid_count: u64,
    /// Up to five, in configuration order.
    pub invalid_images: Vec<(Configuration, IvmlAssignment)>,
    pub elapsed: Duration,
}

impl EquivalenceReport {
    pub fn all_images_valid(&self) -> bool {
        self.invalid_count == 0
    }

    /// `EQUIV uvl=<n> ivml=<m> bijective=<bool>`
    pub fn equiv_line(&self) -> String {
        format!(
            "EQUIV uvl={} ivml={} bijective={}",
            self.uvl_count, self.ivml_count, self.bijective
        )
    }
}

fn write_assignment(f: &mut fmt::Formatter<'_>, a: &IvmlAssignment) -> fmt::Result {
    let parts: Vec<String> = a.iter().map(|(k, v)| format!("{k}={v}")).collect();
    write!(f, "{{{}}}", parts.join(", "))
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "valid UVL configurations: {}", self.uvl_count)?;
        writeln!(f, "valid IVML assignments:   {}", self.ivml_count)?;
        writeln!(f, "injective:                {}", self.injective)?;
        writeln!(f, "invalid images:           {}", self.invalid_count)?;
        writeln!(f, "unmapped assignments:     {}", self.unmapped_count)?;
        writeln!(f, "elapsed:                  {:.3}s", self.elapsed.as_secs_f64())?;
        for (config, image) in &self.invalid_images {
            let selected: Vec<&str> = config.iter().filter(|e| *e.1).map(|e| e.0.as_str()).collect();
            write!(f, "invalid image of {{{}}}: ", selected.join(", "))?;
            write_assignment(f, image)?;
            writeln!(f)?;
        }
        for a in &self.unmapped_ivml {
            f.write_str("unmapped assignment: ")?;
            write_assignment(f, a)?;
            writeln!(f)?;
        }
        write!(f, "{}", self.equiv_line())
    }
}

/// How a variable feature's bit contributes to the image digits.
#[derive(Debug, Clone, Copy)]
enum Action {
    None,
    Bool(usize),
    Enum(usize, u64),
    Set(usize, u64),
}

/// Mixed-radix layout of the IVML assignment space.
struct Layout {
    strides: Vec<u64>,
    radices: Vec<u64>,
    total: u64,
}

impl Layout {
    fn new(compiled: &Compiled, cap: u32) -> Result<Self, OracleError> {
        let limit = 1u64 << cap;
        let mut strides = Vec::new();
        let mut radices = Vec::new();
        let mut total: u64 = 1;
        for (name, domain) in &compiled.vars {
            let size = domain
                .size()
                .ok_or_else(|| OracleError::NonBooleanModel(name.clone()))?;
            strides.push(total);
            radices.push(size);
            total = total.checked_mul(size).filter(|&t| t <= limit).ok_or_else(|| {
                OracleError::CapExceeded {
                    cap,
                    needed: "IVML assignment space exceeds 2^cap candidates".into(),
                }
            })?;
        }
        Ok(Layout { strides, radices, total })
    }

    fn index(&self, digits: &[u64]) -> u64 {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    fn digits(&self, mut index: u64) -> Vec<u64> {
        self.radices
            .iter()
            .map(|r| {
                let d = index % r;
                index /= r;
                d
            })
            .collect()
    }

    /// Advances `digits` to the next index (odometer order).
    fn advance(&self, digits: &mut [u64]) {
        for (d, r) in digits.iter_mut().zip(&self.radices) {
            *d += 1;
            if *d < *r {
                return;
            }
            *d = 0;
        }
    }
}

#[derive(Default)]
struct Tally {
    valid: u64,
    unmapped: u64,
    samples: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.valid += other.valid;
        self.unmapped += other.unmapped;
        self.samples.extend(other.samples);
        self.samples.sort_unstable();
        self.samples.truncate(SAMPLE_LIMIT);
        self
    }
}

const CHUNK: u64 = 1 << 12;

/// Compares the configuration space of `model` with the assignment space of
/// `project` through `bindings`.
pub fn check_equivalence(
    model: &UvlModel,
    project: &IvmlProject,
    bindings: &Bindings,
    cap: u32,
) -> Result<EquivalenceReport, OracleError> {
    let start = Instant::now();
    let space = configs::enumerate(model, cap)?;
    let compiled = Compiled::new(project)?;
    let layout = Layout::new(&compiled, cap)?;

    // one action per variable feature bit
    let mut actions = vec![Action::None; space.variable.len()];
    for b in bindings.values() {
        let Some(bit) = space.bit(&b.feature) else { continue };
        let var = |name: &str| compiled.var_index.get(name).copied();
        actions[bit] = match &b.kind {
            BindingKind::BooleanVar(v) => var(v).map_or(Action::None, Action::Bool),
            BindingKind::AltMember { instance, literal, .. } => match var(instance) {
                Some(i) => match compiled.vars[i].1 {
                    Domain::Enum { enum_idx, .. } => {
                        let l = compiled.enums[enum_idx].1.iter().position(|x| x == literal);
                        l.map_or(Action::None, |l| Action::Enum(i, l as u64 + 1))
                    }
                    _ => Action::None,
                },
                None => Action::None,
            },
            BindingKind::OrMember { set, literal, .. } => match var(set) {
                Some(i) => match compiled.vars[i].1 {
                    Domain::Set { enum_idx, .. } => {
                        let l = compiled.enums[enum_idx].1.iter().position(|x| x == literal);
                        l.map_or(Action::None, |l| Action::Set(i, 1 << l))
                    }
                    _ => Action::None,
                },
                None => Action::None,
            },
            BindingKind::TypedVar { .. } => return Err(OracleError::NonBooleanModel(b.feature.clone())),
            BindingKind::AlwaysIncluded | BindingKind::FollowsParent => Action::None,
        };
    }

    let image = |mask: u64| -> Result<Vec<u64>, OracleError> {
        let mut digits = vec![0u64; compiled.vars.len()];
        for (bit, action) in actions.iter().enumerate() {
            if mask & (1 << bit) == 0 {
                continue;
            }
            match *action {
                Action::None => {}
                Action::Bool(v) => digits[v] = 1,
                Action::Enum(v, d) => {
                    if digits[v] != 0 {
                        return Err(OracleError::TwoAlternatives {
                            first: compiled.enums[enum_of(&compiled, v)].1[digits[v] as usize - 1].clone(),
                            second: compiled.enums[enum_of(&compiled, v)].1[d as usize - 1].clone(),
                        });
                    }
                    digits[v] = d;
                }
                Action::Set(v, m) => digits[v] |= m,
            }
        }
        Ok(digits)
    };

    let mut images = HashSet::with_capacity(space.masks.len());
    let mut invalid_count = 0u64;
    let mut invalid_images = Vec::new();
    for &mask in &space.masks {
        let digits = image(mask)?;
        if !compiled.holds(&Digits {
            compiled: &compiled,
            digits: &digits,
        }) {
            invalid_count += 1;
            if invalid_images.len() < SAMPLE_LIMIT {
                invalid_images.push((space.to_configuration(mask), compiled.to_assignment(&digits)));
            }
        }
        images.insert(layout.index(&digits));
    }
    let injective = images.len() == space.masks.len();

    let chunks = layout.total.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK;
            let last = (first + CHUNK).min(layout.total);
            let mut digits = layout.digits(first);
            let mut t = Tally::default();
            for index in first..last {
                let env = Digits {
                    compiled: &compiled,
                    digits: &digits,
                };
                if compiled.holds(&env) {
                    t.valid += 1;
                    if !images.contains(&index) {
                        t.unmapped += 1;
                        if t.samples.len() < SAMPLE_LIMIT {
                            t.samples.push(index);
                        }
                    }
                }
                layout.advance(&mut digits);
            }
            t
        })
        .reduce(Tally::default, Tally::merge);

    let uvl_count = space.masks.len() as u64;
    let bijective =
        invalid_count == 0 && injective && tally.unmapped == 0 && uvl_count == tally.valid;
    Ok(EquivalenceReport {
        uvl_count,
        ivml_count: tally.valid,
        bijective,
        injective,
        unmapped_count: tally.unmapped,
        unmapped_ivml: tally
            .samples
            .iter()
            .map(|&i| compiled.to_assignment(&layout.digits(i)))
            .collect(),
        invalid_count,
        invalid_images,
        elapsed: start.elapsed(),
    })
}

fn enum_of(compiled: &Compiled, var: usize) -> usize {
    match compiled.vars[var].1 {
        Domain::Enum { enum_idx, .. } | Domain::Set { enum_idx, .. } => enum_idx,
        _ => 0,
    }
}
