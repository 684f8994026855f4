//! Transpiles UVL feature models into IVML projects.
//!
//! The pipeline is `uvl::parse_uvl` → `uvl::validate_uvl` → `transform::transform`
//! → `ivml::emit_ivml`. The `oracle` module enumerates both configuration spaces
//! and checks that the transformation preserves them.

pub mod cli;
pub mod diagnostic;
pub mod ivml;
pub mod oracle;
pub mod transform;
pub mod uvl;

pub use diagnostic::{Diagnostic, Location, Severity};
pub use ivml::{emit_ivml, parse_ivml_subset, IvmlDecl, IvmlExpr, IvmlProject, IvmlType};
pub use oracle::{check_equivalence, EquivalenceReport};
pub use transform::{transform, Mode, Naming, TransformOptions};
pub use uvl::{parse_uvl, validate_uvl, UvlModel};
