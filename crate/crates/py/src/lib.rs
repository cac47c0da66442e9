//! Python bindings: float-valued forms, the model G2-structure, the suite
//! runner, Lie-algebra checks and the variation harness.

use std::collections::BTreeMap;

use g2core::exterior::{KForm, OrientedPlane, Vector};
use g2core::g2::{self as g2, G2Structure, SymTensor2};
use g2core::liegeom::write_structure_constants;
use g2core::liegeom::{
    bryant_identities_check, parse_structure_constants, search_closed_g2, validate_closed_g2,
};
use g2core::linalg::Matrix;
use g2core::report::{verify as run_verify, RunConfig};
use g2core::scalar::{Rational, Scalar, ScalarMode};
use g2core::variations::{first_variation_check, ImmersionFamily, QuadratureSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model() -> G2Structure<f64> {
    G2Structure::model()
}

fn vector(v: Vec<f64>) -> Vector<f64> {
    Vector::new(v)
}

/// A differential form with constant f64 coefficients.
#[pyclass(name = "Form", module = "g2lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyForm(KForm<f64>);

/// "e145" or "145" → [0, 3, 4].
fn parse_index(key: &str, dim: usize) -> PyResult<Vec<usize>> {
    let digits = key.trim_start_matches('e');
    digits
        .chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d >= 1 && (d as usize) <= dim => Ok(d as usize - 1),
            _ => Err(err(format!("bad index `{key}` for dimension {dim}"))),
        })
        .collect()
}

#[pymethods]
impl PyForm {
    /// Form(dim, degree, {"e12": 1.0, ...}).
    #[new]
    #[pyo3(signature = (dim, degree, terms = None))]
    fn new(dim: usize, degree: usize, terms: Option<BTreeMap<String, f64>>) -> PyResult<Self> {
        let mut f = KForm::try_new(
            dim,
            degree,
            vec![0.0; g2core::exterior::binomial(dim, degree)],
        )
        .map_err(err)?;
        for (k, c) in terms.unwrap_or_default() {
            let idx = parse_index(&k, dim)?;
            if idx.len() != degree {
                return Err(err(format!("term `{k}` does not have degree {degree}")));
            }
            f.add_term(&idx, c);
        }
        Ok(Self(f))
    }

    #[staticmethod]
    fn phi() -> Self {
        Self(model().phi().clone())
    }

    #[staticmethod]
    fn psi() -> Self {
        Self(model().psi().clone())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    /// Nonzero coefficients keyed by 1-based index strings.
    fn coeffs(&self) -> BTreeMap<String, f64> {
        self.0
            .terms()
            .map(|(idx, c)| {
                (
                    idx.iter().map(|i| (i + 1).to_string()).collect::<String>(),
                    *c,
                )
            })
            .collect()
    }

    fn wedge(&self, other: &PyForm) -> PyResult<Self> {
        self.0.wedge(&other.0).map(Self).map_err(err)
    }

    fn hodge(&self) -> Self {
        Self(self.0.hodge())
    }

    fn interior(&self, v: Vec<f64>) -> PyResult<Self> {
        self.0.interior(&vector(v)).map(Self).map_err(err)
    }

    fn inner(&self, other: &PyForm) -> PyResult<f64> {
        self.0.inner(&other.0).map_err(err)
    }

    fn norm_sq(&self) -> f64 {
        self.0.norm_sq()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn evaluate(&self, vectors: Vec<Vec<f64>>) -> PyResult<f64> {
        let vs: Vec<Vector<f64>> = vectors.into_iter().map(vector).collect();
        self.0.evaluate(&vs).map_err(err)
    }

    fn __add__(&self, other: &PyForm) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &PyForm) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, s: f64) -> Self {
        Self(self.0.scale(&s))
    }

    fn __rmul__(&self, s: f64) -> Self {
        Self(self.0.scale(&s))
    }

    fn __eq__(&self, other: &PyForm) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Form({})", self.0)
    }
}

/// The G2 cross product u × v.
#[pyfunction]
fn cross(u: Vec<f64>, v: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(model()
        .cross(&vector(u), &vector(v))
        .map_err(err)?
        .components()
        .to_vec())
}

fn four(vectors: Vec<Vec<f64>>) -> PyResult<[Vector<f64>; 4]> {
    let vs: Vec<Vector<f64>> = vectors.into_iter().map(vector).collect();
    vs.try_into().map_err(|_| err("need exactly four vectors"))
}

/// The coassociator C(v₁, …, v₄).
#[pyfunction]
fn coassociator(vectors: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    Ok(model()
        .coassociator(&four(vectors)?)
        .map_err(err)?
        .components()
        .to_vec())
}

/// (ψ(v)², |C(v)|², det Gram(v)); the first two sum to the third.
#[pyfunction]
fn hl_terms(vectors: Vec<Vec<f64>>) -> PyResult<(f64, f64, f64)> {
    let vs = four(vectors)?;
    let g = model();
    let p = g.psi_value(&vs).map_err(err)?;
    let c = g.coassociator(&vs).map_err(err)?.norm_sq();
    let gram = Matrix::from_fn(4, 4, |i, j| vs[i].dot(&vs[j])).determinant();
    Ok((p * p, c, gram))
}

/// (ψ value, 1 − ψ², |C|²) on the plane spanned by four vectors.
#[pyfunction]
fn calibration_defect(vectors: Vec<Vec<f64>>) -> PyResult<(f64, f64, f64)> {
    let plane = OrientedPlane::new(four(vectors)?.to_vec()).map_err(err)?;
    let d = model().calibration_defect(&plane).map_err(err)?;
    Ok((d.psi_value, d.defect, d.coassociator_norm_sq))
}

/// (Λ²₇ part, Λ²₁₄ part).
#[pyfunction]
fn project_lambda2(form: &PyForm) -> PyResult<(PyForm, PyForm)> {
    let (a, b) = g2::project_lambda2(&model(), &form.0).map_err(err)?;
    Ok((PyForm(a), PyForm(b)))
}

/// (Λ³₁, Λ³₇, Λ³₂₇ parts).
#[pyfunction]
fn project_lambda3(form: &PyForm) -> PyResult<(PyForm, PyForm, PyForm)> {
    let (a, b, c) = g2::project_lambda3(&model(), &form.0).map_err(err)?;
    Ok((PyForm(a), PyForm(b), PyForm(c)))
}

/// Bryant's i map on a symmetric 7×7 matrix.
#[pyfunction]
fn i_map(h: Vec<Vec<f64>>) -> PyResult<PyForm> {
    if h.len() != 7 || h.iter().any(|r| r.len() != 7) {
        return Err(err("i_map needs a 7×7 matrix"));
    }
    let m = Matrix::from_rows(&h);
    let s = SymTensor2::new(m).map_err(err)?;
    Ok(PyForm(g2::i_map(&model(), &s)))
}

/// Runs the identity suites and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suites = None, mode = "exact", seed = 0, trials = None))]
fn verify(
    py: Python<'_>,
    suites: Option<Vec<String>>,
    mode: &str,
    seed: u64,
    trials: Option<u64>,
) -> PyResult<String> {
    let mode: ScalarMode = mode.parse().map_err(err)?;
    let cfg = RunConfig {
        seed,
        trials,
        mode,
        suites: suites.unwrap_or_default(),
        ..Default::default()
    };
    let report = py.detach(|| run_verify(&cfg)).map_err(err)?;
    Ok(report.to_json())
}

/// Validates structure constants as a closed G2-structure and returns
/// (τ₂, |τ₂|², tr Ric, largest identity residual).
#[pyfunction]
fn check_structure_constants(text: &str) -> PyResult<(PyForm, f64, f64, f64)> {
    let alg = parse_structure_constants(text).map_err(err)?;
    let g = G2Structure::<Rational>::model();
    let closed = validate_closed_g2(&g, &alg).map_err(err)?;
    let r = bryant_identities_check(&g, &closed).map_err(err)?;
    Ok((
        PyForm(closed.tau2.to_f64()),
        closed.tau2.norm_sq().to_f64(),
        closed.curvature.scal.to_f64(),
        r.max_residual(),
    ))
}

/// Searches two-step closed-G2 algebras; returns each in the text format.
#[pyfunction]
#[pyo3(signature = (coefficients = vec!["0".to_string(), "1".to_string(), "-1".to_string()], step_bound = 2))]
fn search(py: Python<'_>, coefficients: Vec<String>, step_bound: usize) -> PyResult<Vec<String>> {
    let set: Vec<Rational> = coefficients
        .iter()
        .map(|s| {
            s.parse::<Rational>()
                .map_err(|_| err(format!("bad coefficient `{s}`")))
        })
        .collect::<PyResult<_>>()?;
    let hits = py
        .detach(|| search_closed_g2(step_bound, &set))
        .map_err(err)?;
    Ok(hits
        .iter()
        .map(|h| write_structure_constants(&h.alg, &[format!("|tau2|^2 = {}", h.tau2_norm_sq)]))
        .collect())
}

/// First-variation comparison for a registry family, as JSON.
#[pyfunction]
#[pyo3(signature = (family, grid = 16))]
fn first_variation(py: Python<'_>, family: &str, grid: usize) -> PyResult<String> {
    let fam = ImmersionFamily::from_name(family).map_err(err)?;
    let q = QuadratureSpec::new(grid).map_err(err)?;
    let r = py.detach(|| first_variation_check(&fam, &q)).map_err(err)?;
    serde_json::to_string(&r).map_err(err)
}

#[pymodule(name = "g2lab")]
fn g2lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyForm>()?;
    m.add_function(wrap_pyfunction!(cross, m)?)?;
    m.add_function(wrap_pyfunction!(coassociator, m)?)?;
    m.add_function(wrap_pyfunction!(hl_terms, m)?)?;
    m.add_function(wrap_pyfunction!(calibration_defect, m)?)?;
    m.add_function(wrap_pyfunction!(project_lambda2, m)?)?;
    m.add_function(wrap_pyfunction!(project_lambda3, m)?)?;
    m.add_function(wrap_pyfunction!(i_map, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(check_structure_constants, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(first_variation, m)?)?;
    Ok(())
}
