//! Python bindings. Structured results come back as plain dicts and lists.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use ::evodyn as core;
use core::dynamics::{self, FixedPointOptions, JacobianMethod};
use core::experiment::{self, ExperimentConfig};
use core::flows::{self, problem, IntegratorConfig, MatrixFlowProblem};
use core::group::{GeneratorSpec, PermutationGroup};
use core::mixing::{self, CrossoverKind, CrossoverSpec, FitnessPipeline, Kernel, MutationSpec, PopulationVector};
use core::spectral;

fn py_err(e: core::Error) -> PyErr {
    if e.exit_code() == 2 {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and of equal length"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn population(p: Vec<f64>) -> PyResult<PopulationVector> {
    PopulationVector::new(p).map_err(py_err)
}

/// The ring `Z_d^l` with genomes encoded as integers in `[0, d^l)`.
#[pyclass(name = "GenomeSpace", frozen)]
struct PyGenomeSpace(core::ring::GenomeSpace);

impl PyGenomeSpace {
    fn check(&self, values: &[usize]) -> PyResult<()> {
        match values.iter().find(|&&v| v >= self.0.n()) {
            Some(v) => Err(PyValueError::new_err(format!("genome {v} outside [0, {})", self.0.n()))),
            None => Ok(()),
        }
    }
}

#[pymethods]
impl PyGenomeSpace {
    #[new]
    fn new(d: u32, l: u32) -> PyResult<Self> {
        core::ring::GenomeSpace::new(d, l).map(Self).map_err(py_err)
    }

    #[getter]
    fn d(&self) -> u32 {
        self.0.d()
    }

    #[getter]
    fn l(&self) -> u32 {
        self.0.l()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn add(&self, u: usize, v: usize) -> PyResult<usize> {
        self.check(&[u, v])?;
        Ok(self.0.add_raw(u, v))
    }

    fn mul(&self, u: usize, v: usize) -> PyResult<usize> {
        self.check(&[u, v])?;
        Ok(self.0.mul_raw(u, v))
    }

    fn sub(&self, u: usize, v: usize) -> PyResult<usize> {
        self.check(&[u, v])?;
        Ok(self.0.sub_raw(u, v))
    }

    fn neg(&self, u: usize) -> PyResult<usize> {
        self.check(&[u])?;
        Ok(self.0.neg_raw(u))
    }

    fn complement(&self, u: usize) -> PyResult<usize> {
        self.check(&[u])?;
        Ok(self.0.complement_raw(u))
    }

    fn hamming(&self, u: usize, v: usize) -> PyResult<u32> {
        self.check(&[u, v])?;
        Ok(self.0.hamming_raw(u, v))
    }

    fn digits(&self, u: usize) -> PyResult<Vec<u32>> {
        self.check(&[u])?;
        Ok(self.0.digits_raw(u))
    }

    fn from_digits(&self, digits: Vec<u32>) -> PyResult<usize> {
        self.0.from_digits(&digits).map(|g| g.value()).map_err(py_err)
    }

    /// `(u, v)` with `u + v = i`, `u` supported on the binary mask.
    fn binary_decompose(&self, mask: usize, i: usize) -> PyResult<(usize, usize)> {
        let m = self.0.genome(mask).map_err(py_err)?;
        let i = self.0.genome(i).map_err(py_err)?;
        let (u, v) = m.binary_decompose(&i).map_err(py_err)?;
        Ok((u.value(), v.value()))
    }

    /// Orbit classes of the group generated by the given specs
    /// (`"rotation"`, `"translations"`, `"translation:S"`, `"digit_perm:..."`).
    fn orbits(&self, generators: Vec<String>) -> PyResult<Vec<Vec<usize>>> {
        let specs = generators
            .iter()
            .map(|g| g.parse::<GeneratorSpec>())
            .collect::<core::Result<Vec<_>>>()
            .map_err(py_err)?;
        let group = PermutationGroup::from_specs(&self.0, &specs).map_err(py_err)?;
        Ok(group.orbit_partition().classes().to_vec())
    }

    fn __repr__(&self) -> String {
        format!("GenomeSpace(d={}, l={})", self.0.d(), self.0.l())
    }
}

/// The generation map `G = M ∘ F` for proportional selection, crossover
/// and per-digit mutation.
#[pyclass(name = "Heuristic", frozen)]
struct PyHeuristic(mixing::Heuristic);

#[pymethods]
impl PyHeuristic {
    /// `crossover` is `"uniform"`, `"one_point"` or `"none"`; `fitness`
    /// defaults to onemax (`1 + number of nonzero digits`).
    #[new]
    #[pyo3(signature = (d, l, q, crossover = "uniform", fitness = None))]
    fn new(d: u32, l: u32, q: f64, crossover: &str, fitness: Option<Vec<f64>>) -> PyResult<Self> {
        let space = core::ring::GenomeSpace::new(d, l).map_err(py_err)?;
        let kind = match crossover {
            "uniform" => CrossoverKind::Uniform,
            "one_point" => CrossoverKind::OnePoint,
            "none" => CrossoverKind::None,
            other => return Err(PyValueError::new_err(format!("unknown crossover `{other}`"))),
        };
        let kernel = Kernel::new(space, CrossoverSpec::preset(&space, kind), MutationSpec::new(q).map_err(py_err)?);
        let h = match fitness {
            Some(phi) => mixing::Heuristic::with_fitness(phi, kernel),
            None => mixing::Heuristic::new(&FitnessPipeline::onemax(), kernel),
        };
        h.map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.space().n()
    }

    #[getter]
    fn fitness(&self) -> Vec<f64> {
        self.0.fitness().to_vec()
    }

    /// Mixing probability `a(u, v, ω)`.
    fn a(&self, u: usize, v: usize, omega: usize) -> PyResult<f64> {
        let n = self.0.space().n();
        if u >= n || v >= n || omega >= n {
            return Err(PyValueError::new_err("genome out of range"));
        }
        Ok(self.0.mixing().a(u, v, omega))
    }

    fn select(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.select(&population(p)?).map(PopulationVector::into_inner).map_err(py_err)
    }

    fn mix(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.mix(&population(p)?).map(PopulationVector::into_inner).map_err(py_err)
    }

    fn generation(&self, p: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.generation(&population(p)?).map(PopulationVector::into_inner).map_err(py_err)
    }

    /// States `p_0, …, p_T`, stopping early once a step moves less than `tol`.
    #[pyo3(signature = (p0, steps, tol = 0.0))]
    fn iterate(&self, p0: Vec<f64>, steps: usize, tol: f64) -> PyResult<Vec<Vec<f64>>> {
        let traj = dynamics::iterate(&self.0, &population(p0)?, steps, tol).map_err(py_err)?;
        Ok(traj.states.into_iter().map(PopulationVector::into_inner).collect())
    }

    /// Jacobian of `G` in tangent coordinates.
    #[pyo3(signature = (p, finite_difference = false))]
    fn jacobian(&self, p: Vec<f64>, finite_difference: bool) -> PyResult<Vec<Vec<f64>>> {
        let method = if finite_difference {
            JacobianMethod::FiniteDifference
        } else {
            JacobianMethod::Analytic
        };
        Ok(rows(&dynamics::jacobian_at(&self.0, &population(p)?, method)))
    }

    fn fixed_point<'py>(&self, py: Python<'py>, p0: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let report = dynamics::find_fixed_point(&self.0, &population(p0)?, FixedPointOptions::default()).map_err(py_err)?;
        to_py(py, &report)
    }

    /// Spectrum of the tangent Jacobian at a fixed point.
    fn spectrum<'py>(&self, py: Python<'py>, at: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::ea_map_spectrum(&self.0, &population(at)?).map_err(py_err)?)
    }

    /// One finite-population generation of size `mu`; returns the empirical
    /// frequency vector.
    fn sample(&self, p: Vec<f64>, mu: usize, seed: u64) -> PyResult<Vec<f64>> {
        let mut rng = core::random::RandomSource::new(seed);
        let (_, emp) = self.0.sample_generation(&population(p)?, mu, &mut rng).map_err(py_err)?;
        Ok(emp.into_inner())
    }
}

#[pyfunction]
fn eigenvalues(m: Vec<Vec<f64>>) -> PyResult<Vec<Complex64>> {
    spectral::eigenvalues(&matrix(m)?).map_err(py_err)
}

#[pyfunction]
fn spectral_radius(m: Vec<Vec<f64>>) -> PyResult<f64> {
    spectral::spectral_radius(&matrix(m)?).map_err(py_err)
}

#[pyfunction]
fn group_dft(d: u32, l: u32, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let space = core::ring::GenomeSpace::new(d, l).map_err(py_err)?;
    spectral::group_dft(&space, &x).map_err(py_err)
}

#[pyfunction]
fn inverse_group_dft(d: u32, l: u32, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let space = core::ring::GenomeSpace::new(d, l).map_err(py_err)?;
    spectral::inverse_group_dft(&space, &x).map_err(py_err)
}

#[pyfunction]
fn jsr_bounds<'py>(py: Python<'py>, matrices: Vec<Vec<Vec<f64>>>, depth: usize) -> PyResult<Bound<'py, PyAny>> {
    let set = matrices.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
    to_py(py, &spectral::jsr_bounds(&set, depth).map_err(py_err)?)
}

/// Gradient flow of the polynomial with dense coefficients (graded
/// monomial order), optionally constrained to the zero set of a
/// polynomial map given the same way.
#[pyfunction]
#[pyo3(signature = (degree, coefficients, x0, constraints = None, max_time = 1e4))]
fn gradient_flow<'py>(
    py: Python<'py>,
    degree: u32,
    coefficients: Vec<f64>,
    x0: Vec<f64>,
    constraints: Option<Vec<(u32, Vec<f64>)>>,
    max_time: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let dim = x0.len();
    let obj = problem::Polynomial::dense(dim, degree, &coefficients).map_err(py_err)?;
    let cfg = IntegratorConfig::default().with_max_time(max_time);
    let result = match constraints {
        None => flows::gradient_flow(&obj, &x0, &cfg),
        Some(cs) => {
            let comps = cs
                .iter()
                .map(|(deg, c)| problem::Polynomial::dense(dim, *deg, c))
                .collect::<core::Result<Vec<_>>>()
                .map_err(py_err)?;
            let con = problem::PolynomialMap::new(dim, comps).map_err(py_err)?;
            flows::projected_gradient_flow(&obj, &con, &x0, &cfg)
        }
    };
    to_py(py, &result.map_err(py_err)?)
}

/// Double-bracket flow `Ḣ = [H, [H, N]]` from a symmetric `A`, with
/// `N = diag(1, …, n)` unless given.
#[pyfunction]
#[pyo3(signature = (a, n = None, max_time = 1e4))]
fn double_bracket<'py>(py: Python<'py>, a: Vec<Vec<f64>>, n: Option<Vec<f64>>, max_time: f64) -> PyResult<Bound<'py, PyAny>> {
    let a = matrix(a)?;
    let cfg = IntegratorConfig::default().with_max_time(max_time);
    let problem = match n {
        Some(n) => MatrixFlowProblem::new(a, n, cfg),
        None => MatrixFlowProblem::ascending(a, cfg),
    }
    .map_err(py_err)?;
    to_py(py, &flows::double_bracket_flow(&problem).map_err(py_err)?)
}

/// Runs a JSON experiment configuration under `out_dir`; returns the run
/// directory.
#[pyfunction]
fn run(config_json: &str, out_dir: &str) -> PyResult<String> {
    let config = ExperimentConfig::from_json(config_json).map_err(py_err)?;
    let outcome = experiment::run_into(&config, Path::new(out_dir)).map_err(py_err)?;
    Ok(outcome.dir.to_string_lossy().into_owned())
}

#[pyfunction]
fn describe(kind: &str) -> PyResult<String> {
    experiment::describe(kind).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (inject_fault = None))]
fn verify<'py>(py: Python<'py>, inject_fault: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &experiment::verify(inject_fault).map_err(py_err)?)
}

#[pymodule]
fn evodyn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGenomeSpace>()?;
    m.add_class::<PyHeuristic>()?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(group_dft, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_group_dft, m)?)?;
    m.add_function(wrap_pyfunction!(jsr_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_flow, m)?)?;
    m.add_function(wrap_pyfunction!(double_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
