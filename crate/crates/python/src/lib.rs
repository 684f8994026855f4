//! Python bindings: parse UVL, transform, emit and parse IVML, and run the
//! equivalence check.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use uvl2ivml::oracle::{self, DEFAULT_CAP};
use uvl2ivml::{ivml, uvl, Mode, Naming, TransformOptions};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "UvlModel", frozen)]
struct PyUvlModel {
    inner: uvl::UvlModel,
}

#[pymethods]
impl PyUvlModel {
    #[getter]
    fn namespace(&self) -> Option<String> {
        self.inner.namespace.clone()
    }

    #[getter]
    fn root(&self) -> String {
        self.inner.root.name.clone()
    }

    /// Feature names in pre-order.
    #[getter]
    fn features(&self) -> Vec<String> {
        self.inner.features().iter().map(|f| f.name.clone()).collect()
    }

    #[getter]
    fn constraint_count(&self) -> usize {
        self.inner.constraints.len()
    }

    /// Validation diagnostics rendered as `file:line:col: severity: message`.
    fn validate(&self) -> Vec<String> {
        uvl::validate_uvl(&self.inner)
            .iter()
            .map(|d| d.render(&self.inner.source_name))
            .collect()
    }

    fn to_uvl(&self) -> String {
        uvl::print_uvl(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("UvlModel(root={:?}, features={})", self.inner.root.name, self.inner.feature_count())
    }
}

#[pyclass(name = "IvmlProject", frozen)]
struct PyIvmlProject {
    inner: ivml::IvmlProject,
}

#[pymethods]
impl PyIvmlProject {
    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// `(name, type)` pairs, e.g. `("Payment", "PaymentTypes")`.
    #[getter]
    fn variables(&self) -> Vec<(String, String)> {
        self.inner
            .variables()
            .map(|v| {
                let ty = match &v.ty {
                    ivml::IvmlType::Boolean => "Boolean".to_string(),
                    ivml::IvmlType::Integer => "Integer".to_string(),
                    ivml::IvmlType::Real => "Real".to_string(),
                    ivml::IvmlType::String => "String".to_string(),
                    ivml::IvmlType::Enum(e) => e.clone(),
                    ivml::IvmlType::SetOf(e) => format!("setOf({e})"),
                };
                (v.name.clone(), ty)
            })
            .collect()
    }

    #[getter]
    fn constraints(&self) -> Vec<String> {
        self.inner.constraints().map(ivml::render_expr).collect()
    }

    fn emit(&self) -> PyResult<String> {
        ivml::emit_ivml(&self.inner).map_err(value_error)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "IvmlProject(name={:?}, declarations={})",
            self.inner.name,
            self.inner.declarations.len()
        )
    }
}

#[pyclass(name = "EquivalenceReport", frozen)]
struct PyReport {
    inner: oracle::EquivalenceReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn uvl_count(&self) -> u64 {
        self.inner.uvl_count
    }

    #[getter]
    fn ivml_count(&self) -> u64 {
        self.inner.ivml_count
    }

    #[getter]
    fn bijective(&self) -> bool {
        self.inner.bijective
    }

    #[getter]
    fn injective(&self) -> bool {
        self.inner.injective
    }

    #[getter]
    fn all_images_valid(&self) -> bool {
        self.inner.all_images_valid()
    }

    fn equiv_line(&self) -> String {
        self.inner.equiv_line()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

fn options(
    mode: &str,
    naming: &str,
    project_name: Option<String>,
    enum_names: Option<BTreeMap<String, String>>,
) -> PyResult<TransformOptions> {
    Ok(TransformOptions {
        mode: match mode {
            "faithful" => Mode::Faithful,
            "strict" => Mode::Strict,
            other => return Err(value_error(format!("unknown mode `{other}`"))),
        },
        naming: match naming {
            "suffix" => Naming::Suffix,
            "pretty" => Naming::Pretty,
            other => return Err(value_error(format!("unknown naming `{other}`"))),
        },
        project_name,
        enum_names: enum_names.unwrap_or_default(),
    })
}

/// Parses UVL text. Raises `ValueError` with a located message on syntax errors.
#[pyfunction]
#[pyo3(signature = (text, source_name = "<string>"))]
fn parse_uvl(text: &str, source_name: &str) -> PyResult<PyUvlModel> {
    uvl::parse_uvl_named(text, source_name)
        .map(|inner| PyUvlModel { inner })
        .map_err(|e| value_error(e.to_diagnostic().render(source_name)))
}

/// Parses the supported IVML subset.
#[pyfunction]
fn parse_ivml(text: &str) -> PyResult<PyIvmlProject> {
    ivml::parse_ivml_subset(text)
        .map(|inner| PyIvmlProject { inner })
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (model, mode = "faithful", naming = "suffix", project_name = None, enum_names = None))]
fn transform(
    model: &PyUvlModel,
    mode: &str,
    naming: &str,
    project_name: Option<String>,
    enum_names: Option<BTreeMap<String, String>>,
) -> PyResult<PyIvmlProject> {
    let opts = options(mode, naming, project_name, enum_names)?;
    uvl2ivml::transform(&model.inner, &opts)
        .map(|(inner, _)| PyIvmlProject { inner })
        .map_err(|e| {
            let lines: Vec<String> = e
                .diagnostics()
                .iter()
                .map(|d| d.render(&model.inner.source_name))
                .collect();
            value_error(lines.join("\n"))
        })
}

/// Transforms `model` and compares configuration spaces by enumeration.
#[pyfunction]
#[pyo3(signature = (model, mode = "strict", naming = "suffix", cap = DEFAULT_CAP))]
fn check(py: Python<'_>, model: &PyUvlModel, mode: &str, naming: &str, cap: u32) -> PyResult<PyReport> {
    let opts = options(mode, naming, None, None)?;
    let (project, bindings) = uvl2ivml::transform(&model.inner, &opts).map_err(value_error)?;
    let inner = py
        .detach(|| oracle::check_equivalence(&model.inner, &project, &bindings, cap))
        .map_err(value_error)?;
    Ok(PyReport { inner })
}

#[pymodule]
#[pyo3(name = "uvl2ivml")]
fn uvl2ivml_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUvlModel>()?;
    m.add_class::<PyIvmlProject>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(parse_uvl, m)?)?;
    m.add_function(wrap_pyfunction!(parse_ivml, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add("DEFAULT_CAP", DEFAULT_CAP)?;
    Ok(())
}
